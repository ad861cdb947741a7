use std::cell::RefCell;
use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Acceptance, CounterSystem, Edge, MachineError, Pattern, StateId, MAX_COUNTERS};
use crate::letter::{Letter, Word};

/// A machine state with its counter values. The input position is implicit:
/// a [`ConfigSet`] holds the configurations reachable after a fixed prefix.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    pub state: StateId,
    pub counters: [u32; MAX_COUNTERS],
}

impl Configuration {
    pub fn pattern(&self) -> Pattern {
        Pattern::of_counters(&self.counters)
    }

    pub fn all_zero(&self) -> bool {
        self.counters.iter().all(|&c| c == 0)
    }

    /// Applies a delta, returning `None` if a counter would leave `0..=cap`.
    pub fn apply(&self, edge: &Edge, k: usize, cap: u32) -> Option<Configuration> {
        let mut counters = self.counters;
        for (m, c) in counters.iter_mut().enumerate().take(k) {
            let v = *c as i64 + edge.delta.get(m) as i64;
            if v < 0 || v > cap as i64 {
                return None;
            }
            *c = v as u32;
        }
        Some(Configuration {
            state: edge.target,
            counters,
        })
    }
}

/// Sorted, duplicate-free set of configurations.
pub type ConfigSet = Vec<Configuration>;

/// Successor edges by state and zero pattern.
type EdgeMemo = RefCell<FxHashMap<(StateId, u8), Rc<[Edge]>>>;

/// Breadth-first simulator over configuration sets.
pub struct Runner<'a> {
    sys: &'a dyn CounterSystem,
    k: usize,
    bound: usize,
    cap: u32,
    memo: EdgeMemo,
}

/// Entries kept in the successor memo before it is flushed.
const MEMO_LIMIT: usize = 1 << 20;

impl<'a> Runner<'a> {
    /// Runner for inputs of length at most `max_len`; counters are capped at
    /// `(max_len + 1) * (lambda_chain_bound + 1)`.
    pub fn new(sys: &'a dyn CounterSystem, max_len: usize) -> Runner<'a> {
        let bound = if sys.real_time() { 0 } else { sys.lambda_chain_bound() };
        let cap = (max_len as u64 + 1) * (bound as u64 + 1);
        Runner {
            sys,
            k: sys.counters(),
            bound,
            cap: cap.min(u32::MAX as u64) as u32,
            memo: RefCell::new(FxHashMap::default()),
        }
    }

    fn edges(&self, c: &Configuration) -> Rc<[Edge]> {
        let p = c.pattern();
        let key = (c.state, p.0);
        if let Some(e) = self.memo.borrow().get(&key) {
            return e.clone();
        }
        let mut buf = Vec::new();
        self.sys.edges(c.state, p, &mut buf);
        let edges: Rc<[Edge]> = buf.into();
        let mut memo = self.memo.borrow_mut();
        if memo.len() >= MEMO_LIMIT {
            memo.clear();
        }
        memo.insert(key, edges.clone());
        edges
    }

    pub fn system(&self) -> &'a dyn CounterSystem {
        self.sys
    }

    pub fn start(&self) -> ConfigSet {
        let init = Configuration {
            state: self.sys.initial(),
            counters: [0; MAX_COUNTERS],
        };
        self.close(vec![init])
    }

    pub fn step(&self, set: &[Configuration], letter: Letter) -> ConfigSet {
        let mut out = Vec::new();
        for c in set {
            for e in self.edges(c).iter() {
                if e.letter == Some(letter) {
                    if let Some(next) = c.apply(e, self.k, self.cap) {
                        out.push(next);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        self.close(out)
    }

    /// Adds every configuration reachable by at most `bound` λ-steps.
    fn close(&self, mut set: ConfigSet) -> ConfigSet {
        if self.bound == 0 || set.is_empty() {
            set.sort_unstable();
            set.dedup();
            return set;
        }
        let mut seen: FxHashSet<Configuration> = set.iter().copied().collect();
        let mut frontier = set.clone();
        for _ in 0..self.bound {
            let mut next = Vec::new();
            for c in &frontier {
                for e in self.edges(c).iter() {
                    if e.letter.is_none() {
                        if let Some(n) = c.apply(e, self.k, self.cap) {
                            if seen.insert(n) {
                                next.push(n);
                            }
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            set.extend_from_slice(&next);
            frontier = next;
        }
        set.sort_unstable();
        set.dedup();
        set
    }

    pub fn is_accepting(&self, c: &Configuration) -> bool {
        self.sys.is_final(c.state)
            && (self.sys.acceptance() == Acceptance::FinalState || c.all_zero())
    }

    pub fn accepting(&self, set: &[Configuration]) -> bool {
        set.iter().any(|c| self.is_accepting(c))
    }

    pub fn run(&self, w: &[Letter]) -> ConfigSet {
        let mut set = self.start();
        for &l in w {
            if set.is_empty() {
                break;
            }
            set = self.step(&set, l);
        }
        set
    }
}

/// Decides membership of `w` by breadth-first search over configurations.
pub fn accepts(sys: &dyn CounterSystem, w: &[Letter]) -> Result<bool, MachineError> {
    if let Some(&l) = w.iter().find(|l| !sys.alphabet().contains(l)) {
        return Err(MachineError::LetterOutsideAlphabet(l));
    }
    let runner = Runner::new(sys, w.len());
    Ok(runner.accepting(&runner.run(w)))
}

/// Every accepted word of length at most `max_len`, length-lexicographically.
pub fn enumerate_accepted(sys: &dyn CounterSystem, max_len: usize) -> Vec<Word> {
    let runner = Runner::new(sys, max_len);
    let mut letters = sys.alphabet().to_vec();
    letters.sort();
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    collect(&runner, &letters, max_len, &mut prefix, runner.start(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn collect(
    runner: &Runner<'_>,
    letters: &[Letter],
    max_len: usize,
    prefix: &mut Word,
    set: ConfigSet,
    out: &mut Vec<Word>,
) {
    if runner.accepting(&set) {
        out.push(prefix.clone());
    }
    if prefix.len() == max_len {
        return;
    }
    for &l in letters {
        let next = runner.step(&set, l);
        if next.is_empty() {
            continue;
        }
        prefix.push(l);
        collect(runner, letters, max_len, prefix, next, out);
        prefix.pop();
    }
}
