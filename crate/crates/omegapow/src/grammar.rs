//! Context-free membership by dynamic programming over spans.
//!
//! Used as an independent oracle. Right-hand sides may be empty and mix
//! terminals with nonterminals; no normal form is required, but a
//! nonterminal must not derive itself over the same span (no cycles through
//! nullable symbols).

use rustc_hash::FxHashMap;

use crate::letter::Letter;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Symbol {
    T(Letter),
    N(usize),
}

#[derive(Clone, Debug)]
pub struct Grammar {
    start: usize,
    rules: Vec<Vec<Vec<Symbol>>>,
}

impl Grammar {
    /// `rules[n]` lists the right-hand sides of nonterminal `n`.
    pub fn new(start: usize, rules: Vec<Vec<Vec<Symbol>>>) -> Grammar {
        Grammar { start, rules }
    }

    pub fn derives(&self, w: &[Letter]) -> bool {
        let mut memo = Memo {
            grammar: self,
            word: w,
            spans: FxHashMap::default(),
        };
        memo.nonterminal(self.start, 0, w.len())
    }
}

struct Memo<'a> {
    grammar: &'a Grammar,
    word: &'a [Letter],
    spans: FxHashMap<(usize, usize, usize), bool>,
}

impl Memo<'_> {
    fn nonterminal(&mut self, n: usize, i: usize, j: usize) -> bool {
        if let Some(&v) = self.spans.get(&(n, i, j)) {
            return v;
        }
        let mut result = false;
        for r in 0..self.grammar.rules[n].len() {
            if self.sequence(n, r, 0, i, j) {
                result = true;
                break;
            }
        }
        self.spans.insert((n, i, j), result);
        result
    }

    fn sequence(&mut self, n: usize, r: usize, pos: usize, i: usize, j: usize) -> bool {
        let rhs = &self.grammar.rules[n][r];
        if pos == rhs.len() {
            return i == j;
        }
        match rhs[pos] {
            Symbol::T(l) => i < j && self.word[i] == l && self.sequence(n, r, pos + 1, i + 1, j),
            Symbol::N(m) => {
                for mid in i..=j {
                    if self.nonterminal(m, i, mid) && self.sequence(n, r, pos + 1, mid, j) {
                        return true;
                    }
                }
                false
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;

    #[test]
    fn balanced_parentheses() {
        let (o, c) = (Letter::new("("), Letter::new(")"));
        let g = Grammar::new(
            0,
            vec![vec![vec![], vec![Symbol::T(o), Symbol::N(0), Symbol::T(c), Symbol::N(0)]]],
        );
        assert!(g.derives(&parse_word("")));
        assert!(g.derives(&parse_word("(())()")));
        assert!(!g.derives(&parse_word("(()")));
        assert!(!g.derives(&parse_word(")(")));
    }
}
