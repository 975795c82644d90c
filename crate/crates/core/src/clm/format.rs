//! Text format for conditional linear functions.
//!
//! ```text
//! clf 2 2 1 1
//! level 1 id
//! level 2 table
//! when 0 : 0
//! when 1 : 1
//! ```
//!
//! A `table` level lists one `when` line per prefix of earlier outputs;
//! matrix rows are separated by commas. A file holds one or two blocks.

use super::clf::{Clf, FieldSpace, LevelRule, TABLE_PREFIX_CAP};
use super::field::Matrix;
use crate::error::{syntax, Error, Result};

fn numbers(line: usize, text: &str) -> Result<Vec<u32>> {
    text.split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| syntax(line, format!("bad number {t:?}"))))
        .collect()
}

fn prefix_index(q: u32, digits: &[u32]) -> usize {
    digits.iter().fold(0usize, |acc, &d| acc * q as usize + d as usize)
}

struct Pending {
    space: FieldSpace,
    levels: Vec<LevelRule>,
    table: Option<(usize, Vec<Option<Matrix>>)>,
}

impl Pending {
    fn close_table(&mut self, line: usize) -> Result<()> {
        if let Some((level, entries)) = self.table.take() {
            let ms = entries
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| syntax(line, format!("level {} table is incomplete", level + 1)))?;
            self.levels.push(LevelRule::Table(ms));
        }
        Ok(())
    }

    fn finish(mut self, line: usize) -> Result<Clf> {
        self.close_table(line)?;
        if self.levels.len() != self.space.dims.len() {
            return Err(syntax(line, "missing level rules"));
        }
        Clf::new(self.space, self.levels)
    }
}

pub fn parse_clf(text: &str) -> Result<Vec<Clf>> {
    let mut out = Vec::new();
    let mut cur: Option<Pending> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        match words.next() {
            Some("clf") => {
                if let Some(p) = cur.take() {
                    out.push(p.finish(line)?);
                }
                let nums = numbers(line, &body[3..])?;
                if nums.len() < 2 || nums.len() != 2 + nums[1] as usize {
                    return Err(syntax(line, "expected `clf q k d1..dk`"));
                }
                let dims = nums[2..].iter().map(|&d| d as usize).collect();
                let space = FieldSpace::new(nums[0], dims).map_err(|e| syntax(line, e.to_string()))?;
                cur = Some(Pending { space, levels: Vec::new(), table: None });
            }
            Some("level") => {
                let p = cur.as_mut().ok_or_else(|| syntax(line, "level before header"))?;
                p.close_table(line)?;
                let idx: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| syntax(line, "expected level number"))?;
                if idx != p.levels.len() + 1 || idx > p.space.dims.len() {
                    return Err(syntax(line, format!("expected level {}", p.levels.len() + 1)));
                }
                match words.next() {
                    Some("id") => p.levels.push(LevelRule::Identity),
                    Some("zero") => p.levels.push(LevelRule::Zero),
                    Some("table") => {
                        let prefix: usize = p.space.dims[..idx - 1].iter().sum();
                        let size = (p.space.q() as usize)
                            .checked_pow(prefix as u32)
                            .filter(|&s| s <= TABLE_PREFIX_CAP)
                            .ok_or_else(|| syntax(line, "prefix space too large for a table"))?;
                        p.table = Some((idx - 1, vec![None; size]));
                    }
                    other => return Err(syntax(line, format!("unknown rule {other:?}"))),
                }
            }
            Some("when") => {
                let p = cur.as_mut().ok_or_else(|| syntax(line, "when before header"))?;
                let q = p.space.q();
                let (level, d) = match &p.table {
                    Some((l, _)) => (*l, p.space.dims[*l]),
                    None => return Err(syntax(line, "when outside a table level")),
                };
                let (pre, rows) = body[4..]
                    .split_once(':')
                    .ok_or_else(|| syntax(line, "expected `when prefix : rows`"))?;
                let digits = numbers(line, pre)?;
                let prefix: usize = p.space.dims[..level].iter().sum();
                if digits.len() != prefix || digits.iter().any(|&v| v >= q) {
                    return Err(syntax(line, format!("prefix must be {prefix} digits below {q}")));
                }
                let rows = rows
                    .split(',')
                    .map(|r| numbers(line, r))
                    .collect::<Result<Vec<_>>>()?;
                let m = Matrix::from_rows(rows).map_err(|e| syntax(line, e.to_string()))?;
                if m.rows != d || m.cols != d || m.data.iter().any(|&v| v >= q) {
                    return Err(syntax(line, format!("matrix must be {d}x{d} over F_{q}")));
                }
                let slot = &mut p.table.as_mut().expect("table").1[prefix_index(q, &digits)];
                if slot.is_some() {
                    return Err(syntax(line, "duplicate prefix"));
                }
                *slot = Some(m);
            }
            Some(other) => return Err(syntax(line, format!("unknown keyword {other:?}"))),
            None => unreachable!(),
        }
    }
    if let Some(p) = cur.take() {
        out.push(p.finish(last)?);
    }
    if out.is_empty() || out.len() > 2 {
        return Err(Error::Malformed(format!("expected one or two clf blocks, found {}", out.len())));
    }
    Ok(out)
}

pub fn write_clf(l: &Clf) -> String {
    let space = l.space();
    let q = space.q();
    let dims: Vec<String> = space.dims.iter().map(usize::to_string).collect();
    let mut s = format!("clf {q} {} {}\n", space.dims.len(), dims.join(" "));
    let mut prefix = 0usize;
    for (i, rule) in l.levels().iter().enumerate() {
        match rule {
            LevelRule::Identity => s += &format!("level {} id\n", i + 1),
            LevelRule::Zero => s += &format!("level {} zero\n", i + 1),
            LevelRule::Table(ms) => {
                s += &format!("level {} table\n", i + 1);
                let pfx = FieldSpace { field: space.field, dims: vec![prefix.max(1)] };
                for (j, m) in ms.iter().enumerate() {
                    let digits: Vec<String> = if prefix == 0 {
                        Vec::new()
                    } else {
                        pfx.vector(j as u64).iter().map(u32::to_string).collect()
                    };
                    let rows: Vec<String> = (0..m.rows)
                        .map(|r| m.row(r).iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
                        .collect();
                    s += &format!("when {} : {}\n", digits.join(" "), rows.join(", "));
                }
            }
        }
        prefix += space.dims[i];
    }
    s
}
