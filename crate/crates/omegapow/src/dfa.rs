//! Complete deterministic finite automata.

use thiserror::Error;

use crate::letter::{Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DfaError {
    #[error("transition table has {got} entries, expected {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
}

#[derive(Clone, Debug)]
pub struct Dfa {
    alphabet: Vec<Letter>,
    num_states: usize,
    initial: usize,
    finals: Vec<bool>,
    table: Vec<usize>,
}

impl Dfa {
    /// `table[s * |alphabet| + i]` is the successor of `s` on `alphabet[i]`.
    pub fn new(
        alphabet: Vec<Letter>,
        num_states: usize,
        initial: usize,
        finals: &[usize],
        table: Vec<usize>,
    ) -> Result<Dfa, DfaError> {
        let expected = num_states * alphabet.len();
        if table.len() != expected {
            return Err(DfaError::TableSize {
                expected,
                got: table.len(),
            });
        }
        if initial >= num_states {
            return Err(DfaError::StateOutOfRange(initial));
        }
        if let Some(&bad) = table.iter().chain(finals).find(|&&s| s >= num_states) {
            return Err(DfaError::StateOutOfRange(bad));
        }
        let mut flags = vec![false; num_states];
        for &f in finals {
            flags[f] = true;
        }
        Ok(Dfa {
            alphabet,
            num_states,
            initial,
            finals: flags,
            table,
        })
    }

    /// Builds a DFA from a successor function.
    pub fn from_fn(
        alphabet: Vec<Letter>,
        num_states: usize,
        initial: usize,
        finals: &[usize],
        next: impl Fn(usize, Letter) -> usize,
    ) -> Result<Dfa, DfaError> {
        let mut table = Vec::with_capacity(num_states * alphabet.len());
        for s in 0..num_states {
            for &l in &alphabet {
                table.push(next(s, l));
            }
        }
        Dfa::new(alphabet, num_states, initial, finals, table)
    }

    pub fn accept_all(alphabet: Vec<Letter>) -> Dfa {
        Dfa::from_fn(alphabet, 1, 0, &[0], |_, _| 0).expect("well-formed")
    }

    pub fn empty(alphabet: Vec<Letter>) -> Dfa {
        Dfa::from_fn(alphabet, 1, 0, &[], |_, _| 0).expect("well-formed")
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals[s]
    }

    pub fn letter_index(&self, l: Letter) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == l)
    }

    pub fn step(&self, s: usize, l: Letter) -> Option<usize> {
        let i = self.letter_index(l)?;
        Some(self.table[s * self.alphabet.len() + i])
    }

    pub fn run(&self, w: &[Letter]) -> Option<usize> {
        w.iter().try_fold(self.initial, |s, &l| self.step(s, l))
    }

    pub fn accepts(&self, w: &[Letter]) -> bool {
        self.run(w).is_some_and(|s| self.finals[s])
    }

    /// States from which some final state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let mut live = self.finals.clone();
        let width = self.alphabet.len();
        loop {
            let mut changed = false;
            for s in 0..self.num_states {
                if !live[s] && self.table[s * width..(s + 1) * width].iter().any(|&t| live[t]) {
                    live[s] = true;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }

    /// True iff `w` extends to an accepted word.
    pub fn is_viable_prefix(&self, w: &[Letter]) -> bool {
        match self.run(w) {
            Some(s) => self.live_states()[s],
            None => false,
        }
    }

    /// Every accepted word of length at most `max_len`, visiting only
    /// live prefixes.
    pub fn accepted_words(&self, max_len: usize) -> Vec<Word> {
        let live = self.live_states();
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect(self.initial, max_len, &live, &mut prefix, &mut out);
        out
    }

    fn collect(&self, s: usize, budget: usize, live: &[bool], prefix: &mut Word, out: &mut Vec<Word>) {
        if self.finals[s] {
            out.push(prefix.clone());
        }
        if budget == 0 {
            return;
        }
        for (i, &l) in self.alphabet.iter().enumerate() {
            let t = self.table[s * self.alphabet.len() + i];
            if live[t] {
                prefix.push(l);
                self.collect(t, budget - 1, live, prefix, out);
                prefix.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::{alphabet, parse_word};

    fn even_length() -> Dfa {
        Dfa::from_fn(alphabet(&["a", "b"]), 2, 0, &[0], |s, _| 1 - s).unwrap()
    }

    #[test]
    fn parity_dfa() {
        let d = even_length();
        assert!(d.accepts(&parse_word("")));
        assert!(d.accepts(&parse_word("ab")));
        assert!(!d.accepts(&parse_word("aba")));
        assert!(!d.accepts(&parse_word("ac")));
    }

    #[test]
    fn rejects_partial_tables() {
        let err = Dfa::new(alphabet(&["a"]), 2, 0, &[], vec![0]).unwrap_err();
        assert_eq!(err, DfaError::TableSize { expected: 2, got: 1 });
    }

    #[test]
    fn viability() {
        let sink = Dfa::from_fn(alphabet(&["a", "b"]), 2, 0, &[0], |s, l| {
            if s == 1 || l.name() == "b" { 1 } else { 0 }
        })
        .unwrap();
        assert!(sink.is_viable_prefix(&parse_word("aa")));
        assert!(!sink.is_viable_prefix(&parse_word("ab")));
    }
}
