//! `nlg` text format.
//!
//! ```text
//! nlg <questions> <pairs> sync|async
//! q <index> <answers> <label>          (one per question, index order)
//! pair <i> <j> <p/q> <hex>             (one per pair)
//! ```
//!
//! The last field packs the row-major acceptance table, first entry in the
//! most significant bit of the first hex digit, zero-padded to a whole
//! digit. Labels may not contain whitespace.

use std::fmt::Write as _;

use super::{NonlocalGame, Predicate, Question, QuestionPair};
use crate::error::{syntax, Result};
use crate::rational;

pub fn write_nlg(game: &NonlocalGame) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "nlg {} {} {}",
        game.num_questions(),
        game.pairs().len(),
        if game.synchronous() { "sync" } else { "async" }
    )
    .unwrap();
    for (i, q) in game.questions().iter().enumerate() {
        writeln!(out, "q {} {} {}", i, q.answers, q.label).unwrap();
    }
    for p in game.pairs() {
        let table = p.predicate.to_table(game.answers(p.alice), game.answers(p.bob));
        writeln!(
            out,
            "pair {} {} {} {}",
            p.alice,
            p.bob,
            rational::format_rational(&p.weight),
            encode_bits(&table)
        )
        .unwrap();
    }
    out
}

pub fn parse_nlg(text: &str) -> Result<NonlocalGame> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, head) = lines.next().ok_or_else(|| syntax(1, "empty input"))?;
    let h: Vec<&str> = head.split_whitespace().collect();
    let ["nlg", nq, np, mode] = h[..] else {
        return Err(syntax(line_no, "expected `nlg <questions> <pairs> sync|async`"));
    };
    let nq: usize = nq.parse().map_err(|_| syntax(line_no, "bad question count"))?;
    let np: usize = np.parse().map_err(|_| syntax(line_no, "bad pair count"))?;
    let synchronous = match mode {
        "sync" => true,
        "async" => false,
        _ => return Err(syntax(line_no, "mode must be sync or async")),
    };
    let mut questions = Vec::with_capacity(nq);
    for idx in 0..nq {
        let (line_no, line) = lines.next().ok_or_else(|| syntax(line_no, "missing question line"))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        let ["q", i, answers, label] = t[..] else {
            return Err(syntax(line_no, "expected `q <index> <answers> <label>`"));
        };
        if i.parse::<usize>().ok() != Some(idx) {
            return Err(syntax(line_no, format!("expected question index {idx}")));
        }
        let answers = answers
            .parse()
            .map_err(|_| syntax(line_no, "bad answer count"))?;
        questions.push(Question {
            label: label.to_string(),
            answers,
        });
    }
    let mut pairs = Vec::with_capacity(np);
    for _ in 0..np {
        let (line_no, line) = lines.next().ok_or_else(|| syntax(line_no, "missing pair line"))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        let ["pair", a, b, w, bits] = t[..] else {
            return Err(syntax(line_no, "expected `pair <i> <j> <p/q> <hex>`"));
        };
        let alice: usize = a.parse().map_err(|_| syntax(line_no, "bad question index"))?;
        let bob: usize = b.parse().map_err(|_| syntax(line_no, "bad question index"))?;
        let (Some(qa), Some(qb)) = (questions.get(alice), questions.get(bob)) else {
            return Err(syntax(line_no, "question index out of range"));
        };
        let weight = rational::parse_rational(w).ok_or_else(|| syntax(line_no, "bad weight"))?;
        let len = qa.answers * qb.answers;
        let table = decode_bits(bits, len).ok_or_else(|| syntax(line_no, "bad acceptance bitmap"))?;
        pairs.push(QuestionPair {
            alice,
            bob,
            weight,
            predicate: Predicate::Table(table),
        });
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(syntax(line_no, "unexpected trailing content"));
    }
    NonlocalGame::new(questions, pairs, synchronous)
}

fn encode_bits(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|chunk| {
            let mut nibble = 0u32;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    nibble |= 8 >> i;
                }
            }
            std::char::from_digit(nibble, 16).unwrap()
        })
        .collect()
}

fn decode_bits(hex: &str, len: usize) -> Option<Vec<bool>> {
    if hex.len() != len.div_ceil(4) {
        return None;
    }
    let mut out = Vec::with_capacity(hex.len() * 4);
    for ch in hex.chars() {
        let nibble = ch.to_digit(16)?;
        for i in 0..4 {
            out.push(nibble & (8 >> i) != 0);
        }
    }
    if out[len..].iter().any(|&b| b) {
        return None;
    }
    out.truncate(len);
    Some(out)
}
