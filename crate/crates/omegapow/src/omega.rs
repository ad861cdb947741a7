//! Finite-stage and ultimately periodic reasoning about ω-powers.
//!
//! Factor words are always nonempty: the empty word never counts as a
//! factor, whether or not the base language contains it.

use std::collections::VecDeque;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::dfa::Dfa;
use crate::letter::{Letter, Word};
use crate::machine::{Acceptance, CounterSystem, Edge, StateId, MAX_COUNTERS};
use crate::oracle::LanguageOracle;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OmegaError {
    #[error("the period of an ultimately periodic word must be nonempty")]
    EmptyPeriod,
}

/// A factorization of a finite word by its cut positions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factorization {
    /// `0 = c₀ < c₁ < … < c_r = |w|`.
    pub cuts: Vec<usize>,
    /// Whether the oracle certified each factor.
    pub certified: Vec<bool>,
}

impl Factorization {
    pub fn factors<'w>(&self, w: &'w [Letter]) -> Vec<&'w [Letter]> {
        self.cuts.windows(2).map(|c| &w[c[0]..c[1]]).collect()
    }

    /// The interior cuts, without `0` and `|w|`.
    pub fn interior(&self) -> &[usize] {
        let n = self.cuts.len();
        if n < 2 {
            &[]
        } else {
            &self.cuts[1..n - 1]
        }
    }
}

/// Membership of every factor `w[i..j]`, computed once.
fn factor_table(w: &[Letter], l: &LanguageOracle) -> Vec<Vec<bool>> {
    let n = w.len();
    (0..=n)
        .map(|i| (0..=n).map(|j| j > i && l.contains(&w[i..j])).collect())
        .collect()
}

/// Factorizations of `w` into nonempty members of `l`, at most `limit`
/// of them, in lexicographic order of the cut sequences.
pub fn factorizations(w: &[Letter], l: &LanguageOracle, limit: usize) -> Vec<Factorization> {
    let n = w.len();
    let mut out = Vec::new();
    if n == 0 || limit == 0 {
        return out;
    }
    let table = factor_table(w, l);
    // completes[i]: the suffix from i factors.
    let mut completes = vec![false; n + 1];
    completes[n] = true;
    for i in (0..n).rev() {
        completes[i] = (i + 1..=n).any(|j| table[i][j] && completes[j]);
    }
    let mut cuts = vec![0];
    extend(&table, &completes, n, &mut cuts, limit, &mut out);
    out
}

fn extend(
    table: &[Vec<bool>],
    completes: &[bool],
    n: usize,
    cuts: &mut Vec<usize>,
    limit: usize,
    out: &mut Vec<Factorization>,
) {
    let i = *cuts.last().expect("cuts start at 0");
    if i == n {
        out.push(Factorization {
            cuts: cuts.clone(),
            certified: vec![true; cuts.len() - 1],
        });
        return;
    }
    for j in i + 1..=n {
        if out.len() >= limit {
            return;
        }
        if table[i][j] && completes[j] {
            cuts.push(j);
            extend(table, completes, n, cuts, limit, out);
            cuts.pop();
        }
    }
}

/// True iff `w` is a product of nonempty members of `l` followed by a
/// proper prefix of a member.
///
/// The remainder is judged by the oracle's prefix predicate, so the answer
/// is exact only when that predicate is.
pub fn is_omega_power_prefix(w: &[Letter], l: &LanguageOracle) -> bool {
    let n = w.len();
    if n == 0 {
        return true;
    }
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for j in 1..=n {
        reach[j] = (0..j).any(|i| reach[i] && l.contains(&w[i..j]));
    }
    // An empty remainder after at least one factor is a proper prefix of
    // that factor.
    reach[n] || (0..n).any(|i| reach[i] && l.may_extend(&w[i..]))
}

/// The ω-word `u v^ω`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UPWord {
    u: Word,
    v: Word,
}

impl UPWord {
    pub fn new(u: Word, v: Word) -> Result<UPWord, OmegaError> {
        if v.is_empty() {
            return Err(OmegaError::EmptyPeriod);
        }
        Ok(UPWord { u, v })
    }

    pub fn stem(&self) -> &[Letter] {
        &self.u
    }

    pub fn period(&self) -> &[Letter] {
        &self.v
    }

    /// Positions of the lasso: `|u| + |v|`.
    pub fn positions(&self) -> usize {
        self.u.len() + self.v.len()
    }

    pub fn letter_at(&self, pos: usize) -> Letter {
        if pos < self.u.len() {
            self.u[pos]
        } else {
            self.v[pos - self.u.len()]
        }
    }

    /// Lasso position after reading the letter at `pos`.
    pub fn next(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.u.len()
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Word {
        let mut pos = 0;
        (0..n)
            .map(|_| {
                let a = self.letter_at(pos);
                pos = self.next(pos);
                a
            })
            .collect()
    }
}

impl fmt::Display for UPWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &[Letter]| w.iter().map(|l| l.name()).collect::<Vec<_>>().join("");
        write!(f, "{}({})^ω", show(&self.u), show(&self.v))
    }
}

/// True iff some strongly connected component of `g` contains an edge
/// marked by `good`.
fn has_good_cycle<N, E>(g: &DiGraph<N, E>, good: impl Fn(&E) -> bool) -> Option<(NodeIndex, NodeIndex, Vec<usize>)> {
    let mut comp = vec![0; g.node_count()];
    for (c, scc) in tarjan_scc(g).iter().enumerate() {
        for n in scc {
            comp[n.index()] = c;
        }
    }
    g.edge_references()
        .find(|e| good(e.weight()) && comp[e.source().index()] == comp[e.target().index()])
        .map(|e| (e.source(), e.target(), comp))
}

/// Exact test of `u v^ω ∈ L^∞` for a regular `L`.
pub fn up_membership_regular(x: &UPWord, dfa: &Dfa) -> bool {
    let mut g: DiGraph<(usize, usize), bool> = DiGraph::new();
    let mut index = FxHashMap::default();
    let start = (0, dfa.initial());
    index.insert(start, g.add_node(start));
    let mut queue = VecDeque::from([start]);
    while let Some(node @ (pos, q)) = queue.pop_front() {
        let from = index[&node];
        let Some(q2) = dfa.step(q, x.letter_at(pos)) else { continue };
        let next = x.next(pos);
        let mut targets = vec![((next, q2), false)];
        if dfa.is_final(q2) {
            targets.push(((next, dfa.initial()), true));
        }
        for (t, cut) in targets {
            let to = *index.entry(t).or_insert_with(|| {
                queue.push_back(t);
                g.add_node(t)
            });
            g.add_edge(from, to, cut);
        }
    }
    has_good_cycle(&g, |&cut| cut).is_some()
}

/// One move of a run over an ultimately periodic word.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Move {
    /// A machine edge; letter edges consume the letter at the current
    /// position.
    Step(Edge),
    /// Close the current factor and restart the machine.
    Cut,
}

/// A run `stem · cycle^ω` whose cycle closes at least one factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lasso {
    pub stem: Vec<Move>,
    pub cycle: Vec<Move>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UpVerdict {
    Yes(Lasso),
    /// Excluded by a search that hit neither cap.
    No,
    /// A cap cut the search short.
    Unknown,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Node {
    pos: usize,
    state: StateId,
    counters: [u32; MAX_COUNTERS],
    /// No letter read since the last cut.
    fresh: bool,
}

fn accepting(sys: &dyn CounterSystem, n: &Node) -> bool {
    sys.is_final(n.state) && (sys.acceptance() == Acceptance::FinalState || n.counters.iter().all(|&c| c == 0))
}

fn pattern_of(n: &Node) -> crate::machine::Pattern {
    crate::machine::Pattern::of_counters(&n.counters)
}

fn start_node(sys: &dyn CounterSystem) -> Node {
    Node {
        pos: 0,
        state: sys.initial(),
        counters: [0; MAX_COUNTERS],
        fresh: true,
    }
}

/// Applies one move. `Err(())` marks a counter above `cap`.
fn apply(sys: &dyn CounterSystem, x: &UPWord, n: &Node, mv: &Move, cap: Option<u32>) -> Result<Option<Node>, ()> {
    match mv {
        Move::Cut => Ok((!n.fresh && accepting(sys, n)).then(|| Node {
            pos: n.pos,
            ..start_node(sys)
        })),
        Move::Step(e) => {
            let mut out = *n;
            if let Some(a) = e.letter {
                if a != x.letter_at(n.pos) {
                    return Ok(None);
                }
                out.pos = x.next(n.pos);
                out.fresh = false;
            }
            for m in 0..sys.counters() {
                let v = n.counters[m] as i64 + e.delta.get(m) as i64;
                if v < 0 {
                    return Ok(None);
                }
                if cap.is_some_and(|c| v > c as i64) {
                    return Err(());
                }
                out.counters[m] = v as u32;
            }
            out.state = e.target;
            Ok(Some(out))
        }
    }
}

fn bfs_path(g: &DiGraph<Node, Move>, from: NodeIndex, to: NodeIndex, within: impl Fn(NodeIndex) -> bool) -> Vec<Move> {
    let mut parent: FxHashMap<NodeIndex, (NodeIndex, Move)> = FxHashMap::default();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; g.node_count()];
    seen[from.index()] = true;
    while let Some(a) = queue.pop_front() {
        if a == to {
            break;
        }
        for e in g.edges(a) {
            let b = e.target();
            if within(b) && !seen[b.index()] {
                seen[b.index()] = true;
                parent.insert(b, (a, *e.weight()));
                queue.push_back(b);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, mv) = parent[&cur];
        path.push(mv);
        cur = p;
    }
    path.reverse();
    path
}

/// Searches for a run of `sys` on `u v^ω` that closes infinitely many
/// factors at accepting configurations, with counters at most
/// `counter_cap` and at most `unroll_cap` configurations per lasso
/// position.
pub fn up_membership_bounded(x: &UPWord, sys: &dyn CounterSystem, counter_cap: u32, unroll_cap: usize) -> UpVerdict {
    let budget = unroll_cap.saturating_mul(x.positions());
    let mut g: DiGraph<Node, Move> = DiGraph::new();
    let mut index = FxHashMap::default();
    let start = start_node(sys);
    let root = g.add_node(start);
    index.insert(start, root);
    let mut queue = VecDeque::from([start]);
    let mut capped = false;
    let mut buf = Vec::new();
    while let Some(node) = queue.pop_front() {
        let from = index[&node];
        buf.clear();
        sys.edges(node.state, pattern_of(&node), &mut buf);
        let moves = buf.iter().map(|&e| Move::Step(e)).chain(std::iter::once(Move::Cut));
        for mv in moves {
            let next = match apply(sys, x, &node, &mv, Some(counter_cap)) {
                Ok(Some(n)) => n,
                Ok(None) => continue,
                Err(()) => {
                    capped = true;
                    continue;
                }
            };
            let to = match index.get(&next) {
                Some(&i) => i,
                None if g.node_count() >= budget => {
                    capped = true;
                    continue;
                }
                None => {
                    let i = g.add_node(next);
                    index.insert(next, i);
                    queue.push_back(next);
                    i
                }
            };
            g.add_edge(from, to, mv);
        }
    }
    match has_good_cycle(&g, |mv| *mv == Move::Cut) {
        Some((a, b, comp)) => {
            let c = comp[a.index()];
            let stem = bfs_path(&g, root, a, |_| true);
            let mut cycle = vec![Move::Cut];
            cycle.extend(bfs_path(&g, b, a, |n| comp[n.index()] == c));
            UpVerdict::Yes(Lasso { stem, cycle })
        }
        None if capped => UpVerdict::Unknown,
        None => UpVerdict::No,
    }
}

/// Steps a lasso through `sys` from the initial configuration and checks
/// that its cycle reads letters, closes a factor, and returns to where it
/// began.
pub fn replay_lasso(x: &UPWord, sys: &dyn CounterSystem, lasso: &Lasso) -> bool {
    let step = |n: &Node, mv: &Move| -> Option<Node> {
        if let Move::Step(e) = mv {
            let mut buf = Vec::new();
            sys.edges(n.state, pattern_of(n), &mut buf);
            if !buf.contains(e) {
                return None;
            }
        }
        apply(sys, x, n, mv, None).ok().flatten()
    };
    let Some(begin) = lasso.stem.iter().try_fold(start_node(sys), |n, mv| step(&n, mv)) else {
        return false;
    };
    let Some(end) = lasso.cycle.iter().try_fold(begin, |n, mv| step(&n, mv)) else {
        return false;
    };
    let reads = lasso
        .cycle
        .iter()
        .any(|mv| matches!(mv, Move::Step(e) if e.letter.is_some()));
    end == begin && reads && lasso.cycle.contains(&Move::Cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;
    use crate::machine::{Delta, MachineBuilder, Pattern};
    use crate::pi::{p_base_dfa, p_base_machine, pn_oracle};

    fn up(u: &str, v: &str) -> UPWord {
        UPWord::new(parse_word(u), parse_word(v)).unwrap()
    }

    #[test]
    fn factorization_examples() {
        let p2 = pn_oracle(2).unwrap();
        let fs = factorizations(&parse_word("0101"), &p2, 10);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].interior(), &[2]);
        assert_eq!(factorizations(&parse_word("1"), &p2, 10)[0].cuts, vec![0, 1]);
        assert!(factorizations(&parse_word("00"), &p2, 10).is_empty());
        assert_eq!(factorizations(&parse_word("111"), &p2, 2).len(), 1);
    }

    #[test]
    fn prefix_examples() {
        let [zero, one] = [Letter::new("0"), Letter::new("1")];
        let p2 = pn_oracle(2)
            .unwrap()
            .with_prefix_viability(move |w| w.iter().position(|&a| a == one).is_none_or(|i| i + 1 == w.len()));
        assert!(is_omega_power_prefix(&parse_word("00"), &p2));
        assert!(is_omega_power_prefix(&parse_word("01001"), &p2));
        assert!(is_omega_power_prefix(&parse_word("10"), &p2));
        assert!(!is_omega_power_prefix(&parse_word("10"), &p2.clone().with_prefix_viability(|_| false)));
        let only_one = LanguageOracle::new(vec![zero, one], "one", move |w| w == [one])
            .with_prefix_viability(move |w| w.is_empty() || w == [one]);
        assert!(!is_omega_power_prefix(&parse_word("0"), &only_one));
        assert!(is_omega_power_prefix(&[], &only_one));
    }

    #[test]
    fn regular_examples() {
        let p2 = p_base_dfa(2).unwrap();
        assert!(up_membership_regular(&up("", "01"), &p2));
        assert!(!up_membership_regular(&up("1", "0"), &p2));
        assert!(up_membership_regular(&up("", "0"), &p_base_dfa(1).unwrap()));
        assert!(UPWord::new(vec![], vec![]).is_err());
    }

    #[test]
    fn bounded_examples() {
        let p1 = p_base_machine(1).unwrap();
        let x = up("", "0");
        match up_membership_bounded(&x, &p1, 4, 8) {
            UpVerdict::Yes(l) => assert!(replay_lasso(&x, &p1, &l)),
            other => panic!("{other:?}"),
        }
        assert_eq!(up_membership_bounded(&up("", "1"), &p1, 4, 8), UpVerdict::No);

        // 0^n 1^n never closes a factor on 0^ω, and its counter grows.
        let [zero, one] = [Letter::new("0"), Letter::new("1")];
        let mut b = MachineBuilder::new(1, vec![zero, one]);
        let (s, t) = (b.state("s"), b.state("t"));
        b.set_initial(s);
        b.add_final(t);
        for p in [Pattern(0), Pattern(1)] {
            b.add(s, Some(zero), p, s, Delta::unit(0, 1));
        }
        b.add(s, Some(one), Pattern(1), t, Delta::unit(0, -1));
        b.add(t, Some(one), Pattern(1), t, Delta::unit(0, -1));
        let deep = b.build();
        assert_eq!(up_membership_bounded(&up("", "0"), &deep, 6, 100), UpVerdict::Unknown);
        assert!(matches!(up_membership_bounded(&up("", "01"), &deep, 6, 100), UpVerdict::Yes(_)));
    }
}
