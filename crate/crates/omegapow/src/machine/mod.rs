//! k-counter automata.
//!
//! Two representations share one interface. [`CounterMachine`] is an
//! explicit table of states and transitions. Everything implementing
//! [`CounterSystem`] can be run, validated by exploration, and
//! materialized; the closure operations in [`ops`] are implemented as
//! systems that generate their successor edges on demand, which keeps
//! deep pipeline compositions usable without building them in full.

mod format;
pub mod ops;
mod run;
mod system;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::letter::Letter;

pub use format::{parse_machine, serialize_machine, FormatError};
pub use run::{accepts, enumerate_accepted, ConfigSet, Configuration, Runner};
pub use system::{materialize, validate_system, SystemReport};

/// Largest supported number of counters.
pub const MAX_COUNTERS: usize = 4;

/// Default bound on consecutive λ-transitions.
pub const DEFAULT_LAMBDA_BOUND: usize = 8;

/// Packed state identifier of a [`CounterSystem`].
pub type StateId = u128;

/// Zero pattern: bit `m` is set iff counter `m` is positive.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Pattern(pub u8);

impl Pattern {
    pub fn positive(self, m: usize) -> bool {
        self.0 >> m & 1 == 1
    }

    pub fn of_counters(counters: &[u32]) -> Pattern {
        let mut bits = 0u8;
        for (m, &c) in counters.iter().enumerate() {
            if c > 0 {
                bits |= 1 << m;
            }
        }
        Pattern(bits)
    }

    /// All patterns over `k` counters, in increasing bit order.
    pub fn all(k: usize) -> impl Iterator<Item = Pattern> {
        (0..1u16 << k).map(|b| Pattern(b as u8))
    }

    /// Restricts to the first `k` counters.
    pub fn truncate(self, k: usize) -> Pattern {
        Pattern(self.0 & ((1u16 << k) - 1) as u8)
    }

    pub fn with(self, m: usize, positive: bool) -> Pattern {
        if positive {
            Pattern(self.0 | 1 << m)
        } else {
            Pattern(self.0 & !(1 << m))
        }
    }
}

/// Counter update vector; entries past `k` are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Delta(pub [i8; MAX_COUNTERS]);

impl Delta {
    pub const ZERO: Delta = Delta([0; MAX_COUNTERS]);

    pub fn from_slice(values: &[i8]) -> Delta {
        let mut d = [0i8; MAX_COUNTERS];
        d[..values.len()].copy_from_slice(values);
        Delta(d)
    }

    /// Delta touching only counter `m`.
    pub fn unit(m: usize, value: i8) -> Delta {
        let mut d = [0i8; MAX_COUNTERS];
        d[m] = value;
        Delta(d)
    }

    pub fn get(self, m: usize) -> i8 {
        self.0[m]
    }

    pub fn with(mut self, m: usize, value: i8) -> Delta {
        self.0[m] = value;
        self
    }
}

/// Acceptance condition at the end of the input.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Acceptance {
    FinalState,
    FinalStateAndZero,
}

/// One successor edge generated by a [`CounterSystem`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub letter: Option<Letter>,
    pub target: StateId,
    pub delta: Delta,
}

/// A k-counter automaton presented through its successor function.
pub trait CounterSystem: Send + Sync {
    fn counters(&self) -> usize;
    fn alphabet(&self) -> &[Letter];
    fn real_time(&self) -> bool;
    fn acceptance(&self) -> Acceptance;
    fn lambda_chain_bound(&self) -> usize;
    fn initial(&self) -> StateId;
    fn is_final(&self, state: StateId) -> bool;
    /// Appends every edge leaving `state` that is enabled under `pattern`.
    fn edges(&self, state: StateId, pattern: Pattern, out: &mut Vec<Edge>);
    /// Number of bits used by packed state identifiers.
    fn state_bits(&self) -> u32;
    /// Upper bound on the number of states.
    fn state_bound(&self) -> u128;
    fn state_label(&self, state: StateId) -> String {
        format!("s{state}")
    }
    /// The explicit table, when this system is one.
    fn as_explicit(&self) -> Option<&CounterMachine> {
        None
    }
}

pub type SharedSystem = Arc<dyn CounterSystem>;

/// Bits needed to index `n` values.
pub fn bits_for(n: u128) -> u32 {
    if n <= 1 {
        1
    } else {
        128 - (n - 1).leading_zeros()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub source: usize,
    pub letter: Option<Letter>,
    pub pattern: Pattern,
    pub target: usize,
    pub delta: Delta,
}

/// Explicit k-counter automaton.
///
/// Construction does not enforce the invariants; [`validate_machine`]
/// reports every violation.
#[derive(Clone, Debug)]
pub struct CounterMachine {
    k: usize,
    states: Vec<String>,
    alphabet: Vec<Letter>,
    initial: usize,
    finals: Vec<usize>,
    transitions: Vec<Transition>,
    real_time: bool,
    acceptance: Acceptance,
    lambda_chain_bound: usize,
    final_flags: Vec<bool>,
    adjacency: Vec<Vec<(Pattern, Edge)>>,
}

/// Raw parts of a [`CounterMachine`].
#[derive(Clone, Debug)]
pub struct MachineParts {
    pub k: usize,
    pub states: Vec<String>,
    pub alphabet: Vec<Letter>,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<Transition>,
    pub real_time: bool,
    pub acceptance: Acceptance,
    pub lambda_chain_bound: usize,
}

impl CounterMachine {
    pub fn from_parts(parts: MachineParts) -> CounterMachine {
        let n = parts.states.len();
        let mut final_flags = vec![false; n];
        for &f in &parts.finals {
            if f < n {
                final_flags[f] = true;
            }
        }
        let mut order: Vec<usize> = (0..parts.transitions.len()).collect();
        order.sort_by_cached_key(|&i| {
            let t = &parts.transitions[i];
            (
                t.source,
                t.letter.map(|l| l.name()).unwrap_or("EPS"),
                t.pattern,
                t.target,
                t.delta,
            )
        });
        let mut adjacency = vec![Vec::new(); n];
        for i in order {
            let t = &parts.transitions[i];
            if t.source < n && t.target < n {
                adjacency[t.source].push((
                    t.pattern,
                    Edge {
                        letter: t.letter,
                        target: t.target as StateId,
                        delta: t.delta,
                    },
                ));
            }
        }
        let mut finals = parts.finals;
        finals.sort_unstable();
        finals.dedup();
        CounterMachine {
            k: parts.k,
            states: parts.states,
            alphabet: parts.alphabet,
            initial: parts.initial,
            finals,
            transitions: parts.transitions,
            real_time: parts.real_time,
            acceptance: parts.acceptance,
            lambda_chain_bound: parts.lambda_chain_bound,
            final_flags,
            adjacency,
        }
    }

    pub fn into_parts(self) -> MachineParts {
        MachineParts {
            k: self.k,
            states: self.states,
            alphabet: self.alphabet,
            initial: self.initial,
            finals: self.finals,
            transitions: self.transitions,
            real_time: self.real_time,
            acceptance: self.acceptance,
            lambda_chain_bound: self.lambda_chain_bound,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn is_real_time(&self) -> bool {
        self.real_time
    }

    /// Length of the longest chain of λ-transitions, ignoring counters, or
    /// `None` when the λ-graph has a cycle.
    pub fn structural_lambda_depth(&self) -> Option<usize> {
        let n = self.states.len();
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for t in &self.transitions {
            if t.letter.is_none() && t.source < n && t.target < n {
                succ[t.source].push(t.target);
                indeg[t.target] += 1;
            }
        }
        let mut depth = vec![0usize; n];
        let mut queue: Vec<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
        let mut seen = 0;
        while let Some(s) = queue.pop() {
            seen += 1;
            for &t in &succ[s] {
                depth[t] = depth[t].max(depth[s] + 1);
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push(t);
                }
            }
        }
        (seen == n).then(|| depth.into_iter().max().unwrap_or(0))
    }
}

impl CounterSystem for CounterMachine {
    fn counters(&self) -> usize {
        self.k
    }
    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }
    fn real_time(&self) -> bool {
        self.real_time
    }
    fn acceptance(&self) -> Acceptance {
        self.acceptance
    }
    fn lambda_chain_bound(&self) -> usize {
        self.lambda_chain_bound
    }
    fn initial(&self) -> StateId {
        self.initial as StateId
    }
    fn is_final(&self, state: StateId) -> bool {
        self.final_flags.get(state as usize).copied().unwrap_or(false)
    }
    fn edges(&self, state: StateId, pattern: Pattern, out: &mut Vec<Edge>) {
        if let Some(list) = self.adjacency.get(state as usize) {
            out.extend(list.iter().filter(|(p, _)| *p == pattern).map(|(_, e)| *e));
        }
    }
    fn state_bits(&self) -> u32 {
        bits_for(self.states.len() as u128)
    }
    fn state_bound(&self) -> u128 {
        self.states.len() as u128
    }
    fn state_label(&self, state: StateId) -> String {
        self.states
            .get(state as usize)
            .cloned()
            .unwrap_or_else(|| format!("s{state}"))
    }
    fn as_explicit(&self) -> Option<&CounterMachine> {
        Some(self)
    }
}

/// Incremental construction of explicit machines.
#[derive(Debug)]
pub struct MachineBuilder {
    k: usize,
    alphabet: Vec<Letter>,
    states: Vec<String>,
    index: rustc_hash::FxHashMap<String, usize>,
    initial: usize,
    finals: Vec<usize>,
    transitions: Vec<Transition>,
    real_time: bool,
    acceptance: Acceptance,
    lambda_chain_bound: usize,
}

impl MachineBuilder {
    pub fn new(k: usize, alphabet: Vec<Letter>) -> MachineBuilder {
        MachineBuilder {
            k,
            alphabet,
            states: Vec::new(),
            index: Default::default(),
            initial: 0,
            finals: Vec::new(),
            transitions: Vec::new(),
            real_time: true,
            acceptance: Acceptance::FinalStateAndZero,
            lambda_chain_bound: DEFAULT_LAMBDA_BOUND,
        }
    }

    pub fn acceptance(mut self, acceptance: Acceptance) -> Self {
        self.acceptance = acceptance;
        self
    }

    pub fn lambda_chain_bound(mut self, bound: usize) -> Self {
        self.lambda_chain_bound = bound;
        self
    }

    /// Returns the index of the named state, creating it if needed.
    pub fn state(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.states.len();
        self.states.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn set_initial(&mut self, state: usize) {
        self.initial = state;
    }

    pub fn add_final(&mut self, state: usize) {
        self.finals.push(state);
    }

    pub fn add(
        &mut self,
        source: usize,
        letter: Option<Letter>,
        pattern: Pattern,
        target: usize,
        delta: Delta,
    ) {
        if letter.is_none() {
            self.real_time = false;
        }
        self.transitions.push(Transition {
            source,
            letter,
            pattern,
            target,
            delta,
        });
    }

    /// Adds the transition once for every zero pattern accepted by `filter`.
    pub fn add_where(
        &mut self,
        source: usize,
        letter: Option<Letter>,
        filter: impl Fn(Pattern) -> bool,
        target: usize,
        delta: Delta,
    ) {
        for p in Pattern::all(self.k) {
            if filter(p) {
                self.add(source, letter, p, target, delta);
            }
        }
    }

    pub fn build(self) -> CounterMachine {
        CounterMachine::from_parts(MachineParts {
            k: self.k,
            states: self.states,
            alphabet: self.alphabet,
            initial: self.initial,
            finals: self.finals,
            transitions: self.transitions,
            real_time: self.real_time,
            acceptance: self.acceptance,
            lambda_chain_bound: self.lambda_chain_bound,
        })
    }
}

/// Category of an invariant violation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ViolationKind {
    ZeroTest,
    RealTime,
    UnknownState,
    UnknownLetter,
    DeltaRange,
    PatternRange,
    TooManyCounters,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::ZeroTest => "zero-test",
            ViolationKind::RealTime => "real-time",
            ViolationKind::UnknownState => "unknown-state",
            ViolationKind::UnknownLetter => "unknown-letter",
            ViolationKind::DeltaRange => "delta-range",
            ViolationKind::PatternRange => "pattern-range",
            ViolationKind::TooManyCounters => "too-many-counters",
        };
        f.write_str(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub(crate) fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

/// Checks every structural invariant of an explicit machine.
pub fn validate_machine(m: &CounterMachine) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = m.states.len();
    if m.k > MAX_COUNTERS {
        report.push(
            ViolationKind::TooManyCounters,
            format!("k = {} exceeds {MAX_COUNTERS}", m.k),
        );
    }
    if m.initial >= n {
        report.push(ViolationKind::UnknownState, format!("initial state index {}", m.initial));
    }
    for &f in &m.finals {
        if f >= n {
            report.push(ViolationKind::UnknownState, format!("final state index {f}"));
        }
    }
    for (i, t) in m.transitions.iter().enumerate() {
        if t.source >= n || t.target >= n {
            report.push(ViolationKind::UnknownState, format!("transition {i}"));
        }
        match t.letter {
            Some(l) if !m.alphabet.contains(&l) => {
                report.push(ViolationKind::UnknownLetter, format!("transition {i}: letter {l}"));
            }
            None if m.real_time => {
                report.push(ViolationKind::RealTime, format!("transition {i} reads λ"));
            }
            _ => {}
        }
        if m.k < 8 && t.pattern.0 >> m.k != 0 {
            report.push(ViolationKind::PatternRange, format!("transition {i}"));
        }
        for c in 0..MAX_COUNTERS {
            let d = t.delta.get(c);
            if !(-1..=1).contains(&d) || (c >= m.k && d != 0) {
                report.push(ViolationKind::DeltaRange, format!("transition {i}: counter {c}"));
            } else if c < m.k && !t.pattern.positive(c) && d == -1 {
                report.push(
                    ViolationKind::ZeroTest,
                    format!("transition {i}: counter {c} tested zero and decremented"),
                );
            }
        }
    }
    report
}

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("acceptance mode mismatch")]
    AcceptanceMismatch,
    #[error("invalid morphism: {0}")]
    Morphism(String),
    #[error("λ-chain bound {bound} exceeds pad count {pad_count} minus one")]
    LambdaChainTooLong { bound: usize, pad_count: usize },
    #[error("λ-transition leaves the initial state; it cannot be scheduled onto padding")]
    InitialLambda,
    #[error("pad letter {0} already belongs to the alphabet")]
    PadLetterInAlphabet(Letter),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("packed state identifiers need {0} bits, more than 128")]
    StateSpaceTooWide(u32),
    #[error("materialization budget of {0} states exceeded")]
    TooLarge(usize),
    #[error("letter {0} is not in the alphabet")]
    LetterOutsideAlphabet(Letter),
}
