//! Exhaustive agreement checks between a machine and an oracle.
//!
//! Words are visited depth first along the word trie, so each word costs a
//! single simulation step from its parent. A subtree is skipped only when
//! the machine has no live configuration left and the oracle's prefix
//! predicate rules out every extension; both sides then reject all of it.

use std::fmt;

use crate::letter::{format_word, Letter, Word};
use crate::machine::{ConfigSet, CounterSystem, Runner};
use crate::oracle::LanguageOracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub word: Word,
    pub machine: bool,
    pub oracle: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub tag: String,
    pub max_len: usize,
    /// Words evaluated on both sides.
    pub evaluated: u64,
    /// Words rejected on both sides without individual evaluation.
    pub pruned: u64,
    pub accepted: u64,
    pub mismatch_count: u64,
    /// The first few mismatches in visiting order.
    pub mismatches: Vec<Mismatch>,
}

impl CrossCheckReport {
    pub fn agrees(&self) -> bool {
        self.mismatch_count == 0
    }

    pub fn covered(&self) -> u64 {
        self.evaluated + self.pruned
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: len<={} covered={} evaluated={} accepted={} mismatches={}",
            self.tag,
            self.max_len,
            self.covered(),
            self.evaluated,
            self.accepted,
            self.mismatch_count
        )?;
        if let Some(m) = self.mismatches.first() {
            write!(
                f,
                " first={} machine={} oracle={}",
                format_word(&m.word),
                m.machine,
                m.oracle
            )?;
        }
        Ok(())
    }
}

/// Number of words of length at most `n` over `size` letters.
pub fn words_up_to(size: usize, n: usize) -> u64 {
    let mut total = 0u64;
    let mut layer = 1u64;
    for _ in 0..=n {
        total += layer;
        layer *= size as u64;
    }
    total
}

struct Walk<'a> {
    runner: Runner<'a>,
    oracle: &'a LanguageOracle,
    letters: Vec<Letter>,
    max_len: usize,
    report: CrossCheckReport,
}

const KEPT_MISMATCHES: usize = 8;

impl Walk<'_> {
    fn visit(&mut self, prefix: &mut Word, set: ConfigSet) {
        let machine = self.runner.accepting(&set);
        let oracle = self.oracle.contains(prefix);
        self.report.evaluated += 1;
        if machine {
            self.report.accepted += 1;
        }
        if machine != oracle {
            self.report.mismatch_count += 1;
            if self.report.mismatches.len() < KEPT_MISMATCHES {
                self.report.mismatches.push(Mismatch {
                    word: prefix.clone(),
                    machine,
                    oracle,
                });
            }
        }
        if prefix.len() == self.max_len {
            return;
        }
        for i in 0..self.letters.len() {
            let l = self.letters[i];
            let next = if set.is_empty() { Vec::new() } else { self.runner.step(&set, l) };
            prefix.push(l);
            if next.is_empty() && !self.oracle.may_extend(prefix) {
                self.report.pruned += words_up_to(self.letters.len(), self.max_len - prefix.len());
            } else {
                self.visit(prefix, next);
            }
            prefix.pop();
        }
    }
}

/// Compares `sys` with `oracle` on every word of length at most `max_len`
/// over the machine's alphabet.
pub fn crosscheck(sys: &dyn CounterSystem, oracle: &LanguageOracle, max_len: usize) -> CrossCheckReport {
    let mut letters = sys.alphabet().to_vec();
    letters.sort();
    let runner = Runner::new(sys, max_len);
    let start = runner.start();
    let mut walk = Walk {
        runner,
        oracle,
        letters,
        max_len,
        report: CrossCheckReport {
            tag: oracle.tag().to_owned(),
            max_len,
            evaluated: 0,
            pruned: 0,
            accepted: 0,
            mismatch_count: 0,
            mismatches: Vec::new(),
        },
    };
    walk.visit(&mut Vec::new(), start);
    walk.report
}

/// Oracle backed by a machine, for machine-to-machine comparisons.
pub fn machine_oracle(sys: std::sync::Arc<dyn CounterSystem>, tag: &str) -> LanguageOracle {
    let letters = sys.alphabet().to_vec();
    LanguageOracle::new(letters, tag, move |w| {
        let runner = Runner::new(sys.as_ref(), w.len());
        runner.accepting(&runner.run(w))
    })
}

/// Calls `f` on every word of length at most `max_len` over `letters`,
/// in length-lexicographic order.
pub fn for_each_word(letters: &[Letter], max_len: usize, mut f: impl FnMut(&[Letter])) {
    let mut sorted = letters.to_vec();
    sorted.sort();
    f(&[]);
    if sorted.is_empty() {
        return;
    }
    let mut word: Word = Vec::new();
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        loop {
            word.clear();
            word.extend(idx.iter().map(|&i| sorted[i]));
            f(&word);
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < sorted.len() {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::alphabet;

    #[test]
    fn word_counts() {
        assert_eq!(words_up_to(3, 10), 88_573);
        assert_eq!(words_up_to(2, 0), 1);
    }

    #[test]
    fn enumerates_every_word_once() {
        let letters = alphabet(&["x", "y", "z"]);
        let mut seen = Vec::new();
        for_each_word(&letters, 3, |w| seen.push(w.to_vec()));
        assert_eq!(seen.len() as u64, words_up_to(3, 3));
        let mut dedup = seen.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), seen.len());
        assert!(seen[0].is_empty());
        assert_eq!(seen[1], alphabet(&["x"]));
    }
}
