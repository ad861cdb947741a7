//! Line-oriented text format.
//!
//! ```text
//! # comment
//! kcm k=1 alphabet=0,1,BS real_time=1 accept=final_zero lambda_bound=8
//! state q0 initial
//! state q1 final
//! trans q0 0 0 q1 1
//! trans q1 BS 1 q1 -1
//! ```
//!
//! The zero pattern lists one digit per counter, counter 0 first, with `1`
//! meaning "positive". The delta vector is comma separated. Both are written
//! `-` when `k = 0`. `EPS` denotes λ. Letters may not contain whitespace
//! or commas.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::{Acceptance, CounterMachine, Delta, MachineParts, Pattern, Transition, MAX_COUNTERS};
use crate::letter::Letter;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing kcm header")]
    MissingHeader,
    #[error("no initial state declared")]
    MissingInitial,
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

struct Header {
    k: usize,
    alphabet: Vec<Letter>,
    real_time: bool,
    acceptance: Acceptance,
    lambda_bound: usize,
}

fn parse_header(fields: &[&str], line: usize) -> Result<Header, FormatError> {
    let mut k = None;
    let mut alphabet = None;
    let mut real_time = None;
    let mut acceptance = None;
    let mut lambda_bound = None;
    for field in fields {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("malformed header field `{field}`")))?;
        match key {
            "k" => {
                let v: usize = value.parse().map_err(|_| syntax(line, "k is not an integer"))?;
                if v > MAX_COUNTERS {
                    return Err(syntax(line, format!("k = {v} exceeds {MAX_COUNTERS}")));
                }
                k = Some(v);
            }
            "alphabet" => {
                let letters = if value.is_empty() {
                    Vec::new()
                } else {
                    value.split(',').map(Letter::new).collect()
                };
                alphabet = Some(letters);
            }
            "real_time" => {
                real_time = Some(match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(syntax(line, "real_time must be 0 or 1")),
                })
            }
            "accept" => {
                acceptance = Some(match value {
                    "final" => Acceptance::FinalState,
                    "final_zero" => Acceptance::FinalStateAndZero,
                    _ => return Err(syntax(line, "accept must be final or final_zero")),
                })
            }
            "lambda_bound" => {
                lambda_bound = Some(
                    value
                        .parse()
                        .map_err(|_| syntax(line, "lambda_bound is not an integer"))?,
                )
            }
            other => return Err(syntax(line, format!("unknown header field `{other}`"))),
        }
    }
    let missing = |name: &str| syntax(line, format!("header lacks `{name}`"));
    Ok(Header {
        k: k.ok_or_else(|| missing("k"))?,
        alphabet: alphabet.ok_or_else(|| missing("alphabet"))?,
        real_time: real_time.ok_or_else(|| missing("real_time"))?,
        acceptance: acceptance.ok_or_else(|| missing("accept"))?,
        lambda_bound: lambda_bound.ok_or_else(|| missing("lambda_bound"))?,
    })
}

fn parse_pattern(text: &str, k: usize, line: usize) -> Result<Pattern, FormatError> {
    if k == 0 {
        return if text == "-" {
            Ok(Pattern(0))
        } else {
            Err(syntax(line, "zero pattern must be `-` when k = 0"))
        };
    }
    if text.len() != k {
        return Err(syntax(line, format!("zero pattern `{text}` must have {k} digits")));
    }
    let mut p = Pattern(0);
    for (m, ch) in text.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => p = p.with(m, true),
            _ => return Err(syntax(line, format!("bad zero pattern `{text}`"))),
        }
    }
    Ok(p)
}

fn parse_delta(text: &str, k: usize, line: usize) -> Result<Delta, FormatError> {
    if k == 0 {
        return if text == "-" {
            Ok(Delta::ZERO)
        } else {
            Err(syntax(line, "delta must be `-` when k = 0"))
        };
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != k {
        return Err(syntax(line, format!("delta `{text}` must have {k} entries")));
    }
    let mut values = Vec::with_capacity(k);
    for p in parts {
        let v: i8 = p
            .trim_start_matches('+')
            .parse()
            .map_err(|_| syntax(line, format!("bad delta entry `{p}`")))?;
        values.push(v);
    }
    Ok(Delta::from_slice(&values))
}

/// Parses the text format. Structural invariants are checked separately by
/// [`super::validate_machine`].
pub fn parse_machine(text: &str) -> Result<CounterMachine, FormatError> {
    let mut header: Option<Header> = None;
    let mut states: Vec<String> = Vec::new();
    let mut index: FxHashMap<String, usize> = FxHashMap::default();
    let mut initial = None;
    let mut finals = Vec::new();
    let mut pending = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "kcm" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate kcm header"));
                }
                header = Some(parse_header(&fields[1..], line)?);
            }
            "state" => {
                if header.is_none() {
                    return Err(FormatError::MissingHeader);
                }
                let name = fields
                    .get(1)
                    .ok_or_else(|| syntax(line, "state without a name"))?;
                if index.contains_key(*name) {
                    return Err(syntax(line, format!("duplicate state `{name}`")));
                }
                let id = states.len();
                states.push(name.to_string());
                index.insert(name.to_string(), id);
                for flag in &fields[2..] {
                    match *flag {
                        "initial" => {
                            if initial.is_some() {
                                return Err(syntax(line, "second initial state"));
                            }
                            initial = Some(id);
                        }
                        "final" => finals.push(id),
                        other => return Err(syntax(line, format!("unknown state flag `{other}`"))),
                    }
                }
            }
            "trans" => {
                let h = header.as_ref().ok_or(FormatError::MissingHeader)?;
                if fields.len() != 6 {
                    return Err(syntax(line, "trans needs 5 fields"));
                }
                let letter = match fields[2] {
                    "EPS" => None,
                    name => Some(Letter::new(name)),
                };
                let pattern = parse_pattern(fields[3], h.k, line)?;
                let delta = parse_delta(fields[5], h.k, line)?;
                pending.push((line, fields[1].to_string(), letter, pattern, fields[4].to_string(), delta));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    let h = header.ok_or(FormatError::MissingHeader)?;
    let initial = initial.ok_or(FormatError::MissingInitial)?;
    let mut transitions = Vec::with_capacity(pending.len());
    for (line, src, letter, pattern, tgt, delta) in pending {
        let source = *index
            .get(&src)
            .ok_or_else(|| syntax(line, format!("unknown state `{src}`")))?;
        let target = *index
            .get(&tgt)
            .ok_or_else(|| syntax(line, format!("unknown state `{tgt}`")))?;
        transitions.push(Transition {
            source,
            letter,
            pattern,
            target,
            delta,
        });
    }
    Ok(CounterMachine::from_parts(MachineParts {
        k: h.k,
        states,
        alphabet: h.alphabet,
        initial,
        finals,
        transitions,
        real_time: h.real_time,
        acceptance: h.acceptance,
        lambda_chain_bound: h.lambda_bound,
    }))
}

/// Serializes a machine; transitions are sorted by their text form.
pub fn serialize_machine(m: &CounterMachine) -> String {
    let k = m.k();
    let mut out = String::new();
    let alphabet: Vec<&str> = m.alphabet.iter().map(|l| l.name()).collect();
    let _ = writeln!(
        out,
        "kcm k={} alphabet={} real_time={} accept={} lambda_bound={}",
        k,
        alphabet.join(","),
        u8::from(m.real_time),
        match m.acceptance {
            Acceptance::FinalState => "final",
            Acceptance::FinalStateAndZero => "final_zero",
        },
        m.lambda_chain_bound
    );
    for (i, name) in m.states.iter().enumerate() {
        let _ = write!(out, "state {name}");
        if i == m.initial {
            out.push_str(" initial");
        }
        if m.final_flags[i] {
            out.push_str(" final");
        }
        out.push('\n');
    }
    let mut lines: Vec<String> = m
        .transitions
        .iter()
        .map(|t| {
            let pattern = if k == 0 {
                "-".to_owned()
            } else {
                (0..k).map(|c| if t.pattern.positive(c) { '1' } else { '0' }).collect()
            };
            let delta = if k == 0 {
                "-".to_owned()
            } else {
                (0..k)
                    .map(|c| t.delta.get(c).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            format!(
                "trans {} {} {} {} {}",
                m.states[t.source],
                t.letter.map(|l| l.name()).unwrap_or("EPS"),
                pattern,
                m.states[t.target],
                delta
            )
        })
        .collect();
    lines.sort();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
