//! Eraser semantics, the language L₃ of balanced erasures, and the
//! substitution `a ↦ L₃·a` on counter machines.

use std::sync::Arc;

use thiserror::Error;

use crate::grammar::{Grammar, Symbol};
use crate::letter::{Letter, Word};
use crate::machine::{
    materialize, Acceptance, CounterMachine, CounterSystem, Delta, Edge, MachineBuilder,
    Pattern, Runner, SharedSystem, StateId, MAX_COUNTERS,
};

#[derive(Debug, Error)]
pub enum EraserError {
    #[error("the eraser cannot be the final letter of an L3 factor")]
    EraserLetter,
    #[error("letter {0} is not in the base alphabet")]
    UnknownLetter(Letter),
    #[error("alphabet already contains the eraser")]
    EraserInAlphabet,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EvalResult {
    Word(Word),
    Underflow,
}

/// Evaluates backspaces left to right; a backspace on an empty result is
/// ignored.
pub fn eval_tilde(w: &[Letter]) -> Word {
    let mut out = Vec::new();
    for &l in w {
        if l.is_eraser() {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Like [`eval_tilde`], but a backspace on an empty result underflows.
pub fn eval_approx(w: &[Letter]) -> EvalResult {
    let mut out = Vec::new();
    for &l in w {
        if l.is_eraser() {
            if out.pop().is_none() {
                return EvalResult::Underflow;
            }
        } else {
            out.push(l);
        }
    }
    EvalResult::Word(out)
}

pub fn in_l3(w: &[Letter]) -> bool {
    eval_approx(w) == EvalResult::Word(Vec::new())
}

/// Grammar `S → x S ↞ S | x ↞ S | λ` over the given non-eraser letters.
pub fn l3_grammar(base: &[Letter]) -> Grammar {
    let bs = Symbol::T(Letter::eraser());
    let mut rhs = vec![Vec::new()];
    for &x in base.iter().filter(|l| !l.is_eraser()) {
        rhs.push(vec![Symbol::T(x), Symbol::N(0), bs, Symbol::N(0)]);
        rhs.push(vec![Symbol::T(x), bs, Symbol::N(0)]);
    }
    Grammar::new(0, vec![rhs])
}

/// Word with every occurrence of `d` removed.
pub fn remove_letter(w: &[Letter], d: Letter) -> Word {
    w.iter().copied().filter(|&l| l != d).collect()
}

fn base_letters(base: &[Letter]) -> Vec<Letter> {
    base.iter().copied().filter(|l| !l.is_eraser()).collect()
}

fn with_eraser(base: &[Letter]) -> Vec<Letter> {
    let mut letters = base_letters(base);
    letters.push(Letter::eraser());
    letters
}

/// Deterministic real-time one-counter machine for L₃ over `base ∪ {↞}`.
pub fn l3_machine(base: &[Letter]) -> CounterMachine {
    let letters = base_letters(base);
    let mut b = MachineBuilder::new(1, with_eraser(&letters));
    let z = b.state("Z");
    let p = b.state("P");
    b.set_initial(z);
    b.add_final(z);
    let bs = Some(Letter::eraser());
    for &x in &letters {
        b.add(z, Some(x), Pattern(0), p, Delta::ZERO);
        b.add_where(p, Some(x), |_| true, p, Delta::unit(0, 1));
    }
    b.add(p, bs, Pattern(1), p, Delta::unit(0, -1));
    b.add(p, bs, Pattern(0), z, Delta::ZERO);
    b.build()
}

/// Deterministic real-time one-counter machine for `L₃·a`.
///
/// The counter holds the stack height above a pending bottom letter.
/// `F_x` marks a bottom letter read in the last step, so acceptance in `F_a`
/// means the input ends with the surviving letter `a`.
pub fn l3a_machine(a: Letter, base: &[Letter]) -> Result<CounterMachine, EraserError> {
    if a.is_eraser() {
        return Err(EraserError::EraserLetter);
    }
    let letters = base_letters(base);
    if !letters.contains(&a) {
        return Err(EraserError::UnknownLetter(a));
    }
    let mut b = MachineBuilder::new(1, with_eraser(&letters));
    let z = b.state("Z");
    b.set_initial(z);
    let bs = Some(Letter::eraser());
    let pending: Vec<(usize, usize)> = letters
        .iter()
        .map(|x| (b.state(&format!("F_{x}")), b.state(&format!("P_{x}"))))
        .collect();
    for (i, &x) in letters.iter().enumerate() {
        let (fx, px) = pending[i];
        b.add(z, Some(x), Pattern(0), fx, Delta::ZERO);
        for src in [fx, px] {
            for &y in &letters {
                b.add_where(src, Some(y), |_| true, px, Delta::unit(0, 1));
            }
            b.add(src, bs, Pattern(1), px, Delta::unit(0, -1));
            b.add(src, bs, Pattern(0), z, Delta::ZERO);
        }
        if x == a {
            b.add_final(fx);
        }
    }
    Ok(b.build())
}

/// Lazy machine for `h(L(m))` with `h(a) = L₃·a`.
///
/// A new last counter measures the current L₃ segment. Every state comes
/// in a normal and a segment mode; the original counters only move on
/// letters read while the segment counter is zero.
pub struct ExpSubstitute {
    inner: SharedSystem,
    alphabet: Vec<Letter>,
    base: Vec<Letter>,
    k: usize,
    bits: u32,
}

const NORMAL: u128 = 0;
const SEGMENT: u128 = 1;

impl ExpSubstitute {
    pub fn new(inner: SharedSystem) -> Result<ExpSubstitute, EraserError> {
        if inner.alphabet().iter().any(|l| l.is_eraser()) {
            return Err(EraserError::EraserInAlphabet);
        }
        if !inner.real_time() {
            return Err(EraserError::Precondition("machine must be real-time".into()));
        }
        if inner.acceptance() != Acceptance::FinalStateAndZero {
            return Err(EraserError::Precondition(
                "machine must accept with final states and zero counters".into(),
            ));
        }
        let k = inner.counters() + 1;
        if k > MAX_COUNTERS {
            return Err(EraserError::Precondition(format!("{k} counters exceed {MAX_COUNTERS}")));
        }
        let bits = inner.state_bits() + 1;
        if bits > 128 {
            return Err(EraserError::Precondition("state space too wide".into()));
        }
        Ok(ExpSubstitute {
            base: inner.alphabet().to_vec(),
            alphabet: with_eraser(inner.alphabet()),
            k,
            inner,
            bits,
        })
    }
}

impl CounterSystem for ExpSubstitute {
    fn counters(&self) -> usize {
        self.k
    }
    fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }
    fn real_time(&self) -> bool {
        true
    }
    fn acceptance(&self) -> Acceptance {
        Acceptance::FinalStateAndZero
    }
    fn lambda_chain_bound(&self) -> usize {
        0
    }
    fn initial(&self) -> StateId {
        self.inner.initial() << 1 | NORMAL
    }
    fn is_final(&self, s: StateId) -> bool {
        s & 1 == NORMAL && self.inner.is_final(s >> 1)
    }
    fn edges(&self, s: StateId, p: Pattern, out: &mut Vec<Edge>) {
        let q = s >> 1;
        let seg = self.k - 1;
        let open = p.positive(seg);
        if !open {
            let mut buf = Vec::new();
            self.inner.edges(q, p.truncate(seg), &mut buf);
            for e in buf {
                if e.letter.is_some() {
                    out.push(Edge {
                        target: e.target << 1 | NORMAL,
                        ..e
                    });
                }
            }
        }
        for &x in &self.base {
            out.push(Edge {
                letter: Some(x),
                target: q << 1 | SEGMENT,
                delta: Delta::unit(seg, 1),
            });
        }
        if s & 1 == SEGMENT && open {
            out.push(Edge {
                letter: Some(Letter::eraser()),
                target: s,
                delta: Delta::unit(seg, -1),
            });
        }
    }
    fn state_bits(&self) -> u32 {
        self.bits
    }
    fn state_bound(&self) -> u128 {
        self.inner.state_bound().saturating_mul(2)
    }
    fn state_label(&self, s: StateId) -> String {
        let tag = if s & 1 == NORMAL { "n" } else { "e" };
        format!("{}{}", self.inner.state_label(s >> 1), tag)
    }
}

/// Explicit machine for `h(L(m))` with `h(a) = L₃·a`.
pub fn exp_substitute(m: &CounterMachine) -> Result<CounterMachine, EraserError> {
    let sys = ExpSubstitute::new(Arc::new(m.clone()))?;
    materialize(&sys, usize::MAX).map_err(|e| EraserError::Precondition(e.to_string()))
}

/// Definitional check for `h(L(m))`: dynamic programming over factor
/// boundaries, each factor tested with [`in_l3`], with the letter word run
/// through `m` itself.
pub fn exp_image_oracle(m: &dyn CounterSystem, u: &[Letter]) -> bool {
    let runner = Runner::new(m, u.len());
    let mut at: Vec<Vec<crate::machine::Configuration>> = vec![Vec::new(); u.len() + 1];
    at[0] = runner.start();
    for i in 0..u.len() {
        if at[i].is_empty() {
            continue;
        }
        for j in i + 1..=u.len() {
            let last = u[j - 1];
            if last.is_eraser() || !in_l3(&u[i..j - 1]) {
                continue;
            }
            let next = runner.step(&at[i], last);
            let mut merged = std::mem::take(&mut at[j]);
            merged.extend(next);
            merged.sort_unstable();
            merged.dedup();
            at[j] = merged;
        }
    }
    runner.accepting(&at[u.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::{alphabet, parse_word};
    use crate::machine::{accepts, validate_machine};

    fn w(s: &str) -> Word {
        parse_word(s)
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(eval_tilde(&w("aBSaBSaBS")), w(""));
        assert_eq!(eval_tilde(&w("BS")), w(""));
        assert_eq!(eval_tilde(&w("bbBSa")), w("ba"));
    }

    #[test]
    fn approx_examples() {
        assert_eq!(eval_approx(&w("BS")), EvalResult::Underflow);
        assert_eq!(eval_approx(&w("")), EvalResult::Word(w("")));
        assert_eq!(eval_approx(&w("abBS")), EvalResult::Word(w("a")));
    }

    #[test]
    fn l3_examples() {
        assert!(in_l3(&w("aBS")));
        assert!(in_l3(&w("")));
        assert!(!in_l3(&w("a")));
        let g = l3_grammar(&alphabet(&["a", "b"]));
        assert!(g.derives(&w("abBSBS")));
        assert!(!g.derives(&w("BSa")));
    }

    #[test]
    fn remove_letter_examples() {
        let d = Letter::new("d");
        assert_eq!(remove_letter(&w("adbd"), d), w("ab"));
        assert_eq!(remove_letter(&w(""), d), w(""));
        assert_eq!(remove_letter(&w("ddd"), d), w(""));
    }

    #[test]
    fn l3a_examples() {
        let base = alphabet(&["a", "b"]);
        let m = l3a_machine(Letter::new("a"), &base).unwrap();
        assert!(validate_machine(&m).is_ok());
        assert!(m.is_real_time());
        assert!(accepts(&m, &w("a")).unwrap());
        assert!(accepts(&m, &w("aBSa")).unwrap());
        assert!(!accepts(&m, &w("aa")).unwrap());
        assert!(!accepts(&m, &w("abBS")).unwrap());
        assert!(matches!(
            l3a_machine(Letter::eraser(), &base),
            Err(EraserError::EraserLetter)
        ));
    }

    #[test]
    fn l3_machine_rejects_underflow() {
        let m = l3_machine(&alphabet(&["a"]));
        assert!(accepts(&m, &w("")).unwrap());
        assert!(accepts(&m, &w("aaBSBS")).unwrap());
        assert!(!accepts(&m, &w("aBSa")).unwrap());
        assert!(!accepts(&m, &w("aBSaBSBS")).unwrap());
    }
}
