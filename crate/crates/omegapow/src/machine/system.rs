use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use super::{
    CounterMachine, CounterSystem, MachineError, MachineParts, Pattern, StateId, Transition,
    ValidationReport, ViolationKind, MAX_COUNTERS,
};

/// Outcome of exploring a system's structural state graph.
#[derive(Clone, Debug)]
pub struct SystemReport {
    pub explored_states: usize,
    pub explored_edges: usize,
    /// True when every reachable state was visited within the budget.
    pub complete: bool,
    pub validation: ValidationReport,
}

impl SystemReport {
    pub fn is_ok(&self) -> bool {
        self.validation.is_ok()
    }
}

/// Explores up to `budget` structurally reachable states, checking each
/// generated edge against the machine invariants.
pub fn validate_system(sys: &dyn CounterSystem, budget: usize) -> SystemReport {
    let k = sys.counters();
    let mut report = ValidationReport::default();
    if k > MAX_COUNTERS {
        report.push(ViolationKind::TooManyCounters, format!("k = {k}"));
    }
    let alphabet = sys.alphabet();
    let mut seen: rustc_hash::FxHashSet<StateId> = Default::default();
    let mut queue = VecDeque::new();
    seen.insert(sys.initial());
    queue.push_back(sys.initial());
    let mut edges = Vec::new();
    let mut explored_states = 0;
    let mut explored_edges = 0;
    let mut complete = true;
    while let Some(s) = queue.pop_front() {
        if explored_states == budget {
            complete = false;
            break;
        }
        explored_states += 1;
        for p in Pattern::all(k) {
            edges.clear();
            sys.edges(s, p, &mut edges);
            for e in &edges {
                explored_edges += 1;
                match e.letter {
                    Some(l) if !alphabet.contains(&l) => {
                        report.push(ViolationKind::UnknownLetter, format!("{l} from {}", sys.state_label(s)));
                    }
                    None if sys.real_time() => {
                        report.push(ViolationKind::RealTime, format!("λ from {}", sys.state_label(s)));
                    }
                    _ => {}
                }
                for m in 0..MAX_COUNTERS {
                    let d = e.delta.get(m);
                    if !(-1..=1).contains(&d) || (m >= k && d != 0) {
                        report.push(ViolationKind::DeltaRange, format!("counter {m}"));
                    } else if m < k && !p.positive(m) && d == -1 {
                        report.push(
                            ViolationKind::ZeroTest,
                            format!("counter {m} from {}", sys.state_label(s)),
                        );
                    }
                }
                if seen.insert(e.target) {
                    queue.push_back(e.target);
                }
            }
            if report.violations.len() > 64 {
                return SystemReport {
                    explored_states,
                    explored_edges,
                    complete: false,
                    validation: report,
                };
            }
        }
    }
    SystemReport {
        explored_states,
        explored_edges,
        complete,
        validation: report,
    }
}

/// Builds the explicit table of the structurally reachable part of `sys`.
pub fn materialize(sys: &dyn CounterSystem, budget: usize) -> Result<CounterMachine, MachineError> {
    if let Some(m) = sys.as_explicit() {
        return Ok(m.clone());
    }
    let k = sys.counters();
    let mut index: FxHashMap<StateId, usize> = FxHashMap::default();
    let mut ids = vec![sys.initial()];
    index.insert(sys.initial(), 0);
    let mut transitions = Vec::new();
    let mut edges = Vec::new();
    let mut next = 0;
    while next < ids.len() {
        let s = ids[next];
        for p in Pattern::all(k) {
            edges.clear();
            sys.edges(s, p, &mut edges);
            for e in &edges {
                let target = match index.get(&e.target) {
                    Some(&t) => t,
                    None => {
                        if ids.len() == budget {
                            return Err(MachineError::TooLarge(budget));
                        }
                        ids.push(e.target);
                        index.insert(e.target, ids.len() - 1);
                        ids.len() - 1
                    }
                };
                transitions.push(Transition {
                    source: next,
                    letter: e.letter,
                    pattern: p,
                    target,
                    delta: e.delta,
                });
            }
        }
        next += 1;
    }
    let finals = (0..ids.len()).filter(|&i| sys.is_final(ids[i])).collect();
    let states = ids.iter().map(|&s| sys.state_label(s)).collect::<Vec<_>>();
    let real_time = sys.real_time() || transitions.iter().all(|t| t.letter.is_some());
    Ok(CounterMachine::from_parts(MachineParts {
        k,
        states: dedup_names(states),
        alphabet: sys.alphabet().to_vec(),
        initial: 0,
        finals,
        transitions,
        real_time,
        acceptance: sys.acceptance(),
        lambda_chain_bound: sys.lambda_chain_bound(),
    }))
}

fn dedup_names(names: Vec<String>) -> Vec<String> {
    let mut seen: FxHashMap<String, usize> = FxHashMap::default();
    names
        .into_iter()
        .map(|n| {
            let count = seen.entry(n.clone()).or_insert(0);
            *count += 1;
            if *count == 1 {
                n
            } else {
                format!("{n}#{}", *count - 1)
            }
        })
        .collect()
}
