//! Text formats for constraint systems.
//!
//! DIMACS CNF, with an optional `w i p/q` line per clause (1-based clause
//! index) carrying an exact weight. Variables are named `x1 .. xn`.
//!
//! CSX, for arbitrary alphabets:
//!
//! ```text
//! csx <k> <n> <m>
//! var <NAME>                    (n lines, index order)
//! con <ID> w <P/Q|-> ctx <i>... sat <a>... [cnf <lit>... | eq]
//! ```
//!
//! Context indices are 0-based. Each `a` is a base-k string (digits `0-9a-z`)
//! with one digit per context variable. `cnf` literals are 0-based variable
//! indices, `~` marking negation. `w -` means no distribution; either every
//! constraint has a weight or none does. `#` starts a comment in CSX, `c`
//! starts one in DIMACS.

use std::fmt::Write as _;

use super::{Constraint, ConstraintDistribution, ConstraintKind, ConstraintSystem, Literal};
use crate::error::{syntax, Error, Result};
use crate::rational::{self, Rational};

type Parsed = (ConstraintSystem, Option<ConstraintDistribution>);

/// Dispatches on the first meaningful token: `csx` or DIMACS.
pub fn parse_system(text: &str) -> Result<Parsed> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('c'))
        .unwrap_or("");
    if first.starts_with("csx") || text.trim_start().starts_with("csx") {
        parse_csx(text)
    } else {
        parse_dimacs(text)
    }
}

pub fn parse_dimacs(text: &str) -> Result<Parsed> {
    let mut header: Option<(usize, usize)> = None;
    let mut system = ConstraintSystem::boolean();
    let mut pending: Vec<Literal> = Vec::new();
    let mut weights: Vec<(usize, usize, Rational)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate problem line"));
            }
            tokens.next();
            if tokens.next() != Some("cnf") {
                return Err(syntax(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parse_usize(tokens.next(), line_no, "variable count")?;
            let m = parse_usize(tokens.next(), line_no, "clause count")?;
            if tokens.next().is_some() {
                return Err(syntax(line_no, "trailing tokens after problem line"));
            }
            for v in 1..=n {
                system.intern(format!("x{v}"));
            }
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| syntax(line_no, "clause before problem line"))?;
        if line.starts_with('w') {
            tokens.next();
            let i = parse_usize(tokens.next(), line_no, "clause index")?;
            let w = tokens
                .next()
                .and_then(rational::parse_rational)
                .ok_or_else(|| syntax(line_no, "expected rational weight p/q"))?;
            if tokens.next().is_some() {
                return Err(syntax(line_no, "trailing tokens after weight"));
            }
            weights.push((line_no, i, w));
            continue;
        }
        for tok in tokens {
            let lit: i64 = tok
                .parse()
                .map_err(|_| syntax(line_no, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                if pending.is_empty() {
                    return Err(syntax(line_no, "empty clause"));
                }
                let id = system.num_constraints();
                system
                    .push(Constraint::clause(format!("c{}", id + 1), std::mem::take(&mut pending)))
                    .map_err(|e| syntax(line_no, e.to_string()))?;
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > n {
                return Err(syntax(line_no, format!("variable {var} exceeds declared {n}")));
            }
            pending.push(Literal {
                var: var - 1,
                negated: lit < 0,
            });
        }
    }
    let (_, m) = header.ok_or_else(|| syntax(last_line.max(1), "missing problem line"))?;
    if !pending.is_empty() {
        return Err(syntax(last_line, "clause not terminated by 0"));
    }
    if system.num_constraints() != m {
        return Err(syntax(
            last_line,
            format!("declared {m} clauses, found {}", system.num_constraints()),
        ));
    }
    let distribution = if weights.is_empty() {
        None
    } else {
        let mut slots: Vec<Option<Rational>> = vec![None; m];
        for (line_no, i, w) in weights {
            if i == 0 || i > m {
                return Err(syntax(line_no, format!("weight for clause {i} of {m}")));
            }
            if slots[i - 1].replace(w).is_some() {
                return Err(syntax(line_no, format!("duplicate weight for clause {i}")));
            }
        }
        let weights = slots
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::Malformed(format!("clause {} has no weight", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Some(ConstraintDistribution::new(weights)?)
    };
    Ok((system, distribution))
}

/// DIMACS text. Every constraint must be a clause.
pub fn write_dimacs(
    system: &ConstraintSystem,
    distribution: Option<&ConstraintDistribution>,
) -> Result<String> {
    if let Some(d) = distribution {
        d.check_matches(system)?;
    }
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", system.num_variables(), system.num_constraints()).unwrap();
    for (i, c) in system.constraints().iter().enumerate() {
        let lits = c
            .literals()
            .ok_or_else(|| Error::Malformed(format!("constraint {i} is not a clause")))?;
        for l in lits {
            let v = l.var as i64 + 1;
            write!(out, "{} ", if l.negated { -v } else { v }).unwrap();
        }
        out.push_str("0\n");
    }
    if let Some(d) = distribution {
        for (i, w) in d.weights().iter().enumerate() {
            writeln!(out, "w {} {}", i + 1, rational::format_rational(w)).unwrap();
        }
    }
    Ok(out)
}

pub fn parse_csx(text: &str) -> Result<Parsed> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, head) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let mut tokens = head.split_whitespace();
    if tokens.next() != Some("csx") {
        return Err(syntax(line_no, "expected `csx <k> <n> <m>`"));
    }
    let k = parse_usize(tokens.next(), line_no, "alphabet size")?;
    let n = parse_usize(tokens.next(), line_no, "variable count")?;
    let m = parse_usize(tokens.next(), line_no, "constraint count")?;
    if !(2..=36).contains(&k) {
        return Err(syntax(line_no, "alphabet size must lie in 2..=36"));
    }
    let mut system = ConstraintSystem::new(k);

    for _ in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| syntax(line_no, "missing var line"))?;
        let mut tokens = line.split_whitespace();
        let (Some("var"), Some(name), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(syntax(line_no, "expected `var <NAME>`"));
        };
        if system.variable_index(name).is_some() {
            return Err(syntax(line_no, format!("duplicate variable `{name}`")));
        }
        system.intern(name);
    }

    let mut weights: Vec<Option<Rational>> = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| syntax(line_no, "missing con line"))?;
        let (constraint, weight) = parse_con(line, line_no, &system)?;
        system
            .push(constraint)
            .map_err(|e| syntax(line_no, e.to_string()))?;
        weights.push(weight);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(syntax(line_no, "unexpected trailing content"));
    }

    let distribution = if weights.iter().all(Option::is_none) {
        None
    } else if weights.iter().all(Option::is_some) {
        Some(ConstraintDistribution::new(weights.into_iter().flatten().collect())?)
    } else {
        return Err(Error::Malformed("weights given for only some constraints".into()));
    };
    Ok((system, distribution))
}

fn parse_con(line: &str, line_no: usize, system: &ConstraintSystem) -> Result<(Constraint, Option<Rational>)> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 4 || tokens[0] != "con" || tokens[2] != "w" {
        return Err(syntax(line_no, "expected `con <ID> w <P/Q|-> ctx ...`"));
    }
    let name = tokens[1];
    let weight = match tokens[3] {
        "-" => None,
        t => Some(rational::parse_rational(t).ok_or_else(|| syntax(line_no, format!("bad weight `{t}`")))?),
    };
    let mut pos = 4;
    if tokens.get(pos) != Some(&"ctx") {
        return Err(syntax(line_no, "expected `ctx`"));
    }
    pos += 1;
    let mut context = Vec::new();
    while pos < tokens.len() && tokens[pos] != "sat" {
        let v: usize = tokens[pos]
            .parse()
            .map_err(|_| syntax(line_no, format!("bad variable index `{}`", tokens[pos])))?;
        context.push(v);
        pos += 1;
    }
    if context.is_empty() {
        return Err(syntax(line_no, "empty context"));
    }
    if pos == tokens.len() {
        return Err(syntax(line_no, "expected `sat`"));
    }
    pos += 1;
    let k = system.alphabet();
    let mut relation = Vec::new();
    while pos < tokens.len() && tokens[pos] != "cnf" && tokens[pos] != "eq" {
        let a = parse_digits(tokens[pos], k).ok_or_else(|| {
            syntax(line_no, format!("bad base-{k} assignment `{}`", tokens[pos]))
        })?;
        if a.len() != context.len() {
            return Err(Error::Arity {
                constraint: system.num_constraints(),
                expected: context.len(),
                found: a.len(),
            });
        }
        relation.push(a);
        pos += 1;
    }
    let general = Constraint::new(name, context, relation);
    let constraint = match tokens.get(pos) {
        None => general,
        Some(&"eq") => {
            if pos + 1 != tokens.len() {
                return Err(syntax(line_no, "trailing tokens after `eq`"));
            }
            let ctx = general.context();
            let eq = match ctx {
                [x] => Constraint::equality(name, k, *x, *x),
                [x, y] => Constraint::equality(name, k, *x, *y),
                _ => return Err(syntax(line_no, "`eq` needs one or two context variables")),
            };
            if eq.relation() != general.relation() {
                return Err(syntax(line_no, "relation is not the equality relation"));
            }
            eq
        }
        Some(_) => {
            let lits = tokens[pos + 1..]
                .iter()
                .map(|t| {
                    let (negated, body) = match t.strip_prefix('~') {
                        Some(rest) => (true, rest),
                        None => (false, *t),
                    };
                    body.parse::<usize>()
                        .map(|var| Literal { var, negated })
                        .map_err(|_| syntax(line_no, format!("bad literal `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if lits.is_empty() {
                return Err(syntax(line_no, "`cnf` without literals"));
            }
            let clause = Constraint::clause(name, lits);
            if clause.context() != general.context() || clause.relation() != general.relation() {
                return Err(syntax(line_no, "relation differs from the clause literals"));
            }
            clause
        }
    };
    Ok((constraint, weight))
}

pub fn write_csx(system: &ConstraintSystem, distribution: Option<&ConstraintDistribution>) -> Result<String> {
    if let Some(d) = distribution {
        d.check_matches(system)?;
    }
    let k = system.alphabet();
    let mut out = String::new();
    writeln!(out, "csx {} {} {}", k, system.num_variables(), system.num_constraints()).unwrap();
    for name in system.variables() {
        writeln!(out, "var {name}").unwrap();
    }
    for (i, c) in system.constraints().iter().enumerate() {
        let w = distribution
            .map(|d| rational::format_rational(d.weight(i)))
            .unwrap_or_else(|| "-".into());
        write!(out, "con {} w {} ctx", c.name, w).unwrap();
        for v in c.context() {
            write!(out, " {v}").unwrap();
        }
        out.push_str(" sat");
        for a in c.relation() {
            out.push(' ');
            out.extend(a.iter().map(|&d| std::char::from_digit(d as u32, k as u32).unwrap()));
        }
        match c.kind() {
            ConstraintKind::General => {}
            ConstraintKind::Equality => out.push_str(" eq"),
            ConstraintKind::Clause(lits) => {
                out.push_str(" cnf");
                for l in lits {
                    write!(out, " {}{}", if l.negated { "~" } else { "" }, l.var).unwrap();
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn parse_digits(token: &str, k: usize) -> Option<Vec<u8>> {
    token
        .chars()
        .map(|ch| ch.to_digit(k as u32).map(|d| d as u8))
        .collect()
}

fn parse_usize(token: Option<&str>, line: usize, what: &str) -> Result<usize> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| syntax(line, format!("expected {what}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn dimacs_single_clause() {
        let (s, d) = parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap();
        assert!(d.is_none());
        assert_eq!(s.num_constraints(), 1);
        assert_eq!(
            s.constraint(0).literals().unwrap(),
            &[Literal::pos(0), Literal::pos(1), Literal::pos(2)]
        );
        assert_eq!(s.variables(), &["x1", "x2", "x3"]);
    }

    #[test]
    fn dimacs_weights_are_exact() {
        let text = "c demo\np cnf 3 2\n1 -2 3 0\n-1 2 2 0\nw 1 1/3\nw 2 2/3\n";
        let (s, d) = parse_dimacs(text).unwrap();
        let d = d.unwrap();
        assert_eq!(d.weights(), &[ratio(1, 3), ratio(2, 3)]);
        assert_eq!(write_dimacs(&s, Some(&d)).unwrap(), "p cnf 3 2\n1 -2 3 0\n-1 2 2 0\nw 1 1/3\nw 2 2/3\n");
    }

    #[test]
    fn dimacs_errors_carry_line_numbers() {
        let err = parse_dimacs("p cnf 2 1\n1 x 0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        let err = parse_dimacs("p cnf 2 2\n1 2 0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
        let err = parse_dimacs("p cnf 2 1\n1 5 0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        let err = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\nw 1 1/2\nw 2 1/3\n").unwrap_err();
        assert!(matches!(err, Error::WeightSum { .. }));
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2\n").is_err());
    }

    #[test]
    fn clauses_may_span_lines() {
        let (s, _) = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n-2 -3 0\n").unwrap();
        assert_eq!(s.num_constraints(), 2);
    }

    #[test]
    fn csx_round_trip() {
        let text = "csx 3 2 2\nvar a\nvar b\ncon e w 1/2 ctx 0 1 sat 00 11 22 eq\ncon g w 1/2 ctx 1 sat 2\n";
        let (s, d) = parse_csx(text).unwrap();
        assert_eq!(s.alphabet(), 3);
        assert_eq!(s.constraint(0).kind(), &ConstraintKind::Equality);
        assert_eq!(write_csx(&s, d.as_ref()).unwrap(), text);
    }

    #[test]
    fn csx_rejects_inconsistent_tags() {
        let bad_eq = "csx 2 2 1\nvar a\nvar b\ncon e w - ctx 0 1 sat 00 eq\n";
        assert!(parse_csx(bad_eq).is_err());
        let bad_cnf = "csx 2 2 1\nvar a\nvar b\ncon c w - ctx 0 1 sat 01 11 cnf 0 1\n";
        assert!(parse_csx(bad_cnf).is_err());
        let arity = "csx 2 2 1\nvar a\nvar b\ncon c w - ctx 0 1 sat 011\n";
        assert!(matches!(parse_csx(arity), Err(Error::Arity { .. })));
        let partial = "csx 2 1 2\nvar a\ncon c w 1 ctx 0 sat 1\ncon d w - ctx 0 sat 0\n";
        assert!(parse_csx(partial).is_err());
    }

    #[test]
    fn system_dispatch() {
        assert!(parse_system("csx 2 1 1\nvar a\ncon c w - ctx 0 sat 1\n").is_ok());
        assert!(parse_system("c x\np cnf 1 1\n1 0\n").is_ok());
    }
}
