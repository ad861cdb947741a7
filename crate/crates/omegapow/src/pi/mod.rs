//! The `P_n` pipeline: base languages, the eraser substitution, and the
//! reduction of real-time two-counter machines to binary real-time
//! one-counter machines.

pub mod claim2;
pub mod mu;
pub mod script_l;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dfa::Dfa;
use crate::diagonal::Markers;
use crate::eraser::{exp_image_oracle, EraserError, ExpSubstitute};
use crate::letter::{alphabet, fresh_letter, Letter, Word};
use crate::machine::ops::{LetterMorphism, MorphicImage, RealtimePad, Union};
use crate::machine::{
    materialize, Acceptance, CounterMachine, CounterSystem, Delta, MachineBuilder, MachineError,
    Pattern, SharedSystem,
};
use crate::oracle::LanguageOracle;

pub use claim2::{accepting_run, claim2_backward, claim2_forward, RunStep};
pub use mu::{mu_five_machine, mu_five_oracle, mu_shape};
pub use script_l::{markers_for, script_l_naive, script_l_oracle, script_l_shape, ScriptL, ScriptLWitness};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("level {0} is not supported")]
    InvalidN(usize),
    #[error("level {n} exceeds the cap {cap}")]
    AboveCap { n: usize, cap: usize },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Eraser(#[from] EraserError),
    #[error("unsuitable subject machine: {0}")]
    Subject(String),
    #[error("letter {0} is outside the alphabet")]
    LetterOutside(Letter),
    #[error(
        "factor {factor} step {step}: block {index} needs {needed} zeros but holds {}",
        available.map_or("more than u64".to_owned(), |a| a.to_string())
    )]
    Feasibility {
        factor: usize,
        step: usize,
        index: usize,
        needed: u64,
        available: Option<u64>,
    },
    #[error("witnesses do not tile a coding word")]
    Tiling,
    #[error("witness invariant violated: {0}")]
    Invariant(String),
    #[error("factor {0} is not accepted by the subject")]
    NotAccepted(usize),
    #[error("factor {0} is empty")]
    EmptyFactor(usize),
    #[error("{0}")]
    Unsupported(String),
}

/// Default upper limit for pipeline levels.
pub const DEFAULT_CAP: usize = 6;

fn binary() -> Vec<Letter> {
    alphabet(&["0", "1"])
}

/// `{0}` for `n = 1`, `0*1` for `n = 2`, both over `{0, 1}`.
pub fn p_base_machine(n: usize) -> Result<CounterMachine, PipelineError> {
    let [zero, one] = [Letter::new("0"), Letter::new("1")];
    let mut b = MachineBuilder::new(0, binary());
    let s = b.state("s");
    let t = b.state("t");
    b.set_initial(s);
    b.add_final(t);
    match n {
        1 => b.add(s, Some(zero), Pattern(0), t, Delta::ZERO),
        2 => {
            b.add(s, Some(zero), Pattern(0), s, Delta::ZERO);
            b.add(s, Some(one), Pattern(0), t, Delta::ZERO);
        }
        _ => return Err(PipelineError::InvalidN(n)),
    }
    Ok(b.build())
}

/// The same base languages as complete DFAs.
pub fn p_base_dfa(n: usize) -> Result<Dfa, PipelineError> {
    let zero = Letter::new("0");
    // 0: start, 1: accepted, 2: dead.
    let next = move |s: usize, a: Letter| match (n, s, a == zero) {
        (1, 0, true) => 1,
        (2, 0, true) => 0,
        (2, 0, false) => 1,
        _ => 2,
    };
    match n {
        1 | 2 => Ok(Dfa::from_fn(binary(), 3, 0, &[1], next).expect("well-formed")),
        _ => Err(PipelineError::InvalidN(n)),
    }
}

/// Two-counter machine for `{ab}`: `a` raises the first counter and `b`
/// lowers it again.
pub fn test_machine_a0() -> CounterMachine {
    let mut b = MachineBuilder::new(2, alphabet(&["a", "b"]));
    let q0 = b.state("q0");
    let q2 = b.state("q2");
    let q1 = b.state("q1");
    b.set_initial(q0);
    b.add_final(q1);
    b.add(q0, Some(Letter::new("a")), Pattern(0), q2, Delta::from_slice(&[1, 0]));
    b.add(q2, Some(Letter::new("b")), Pattern(1), q1, Delta::from_slice(&[-1, 0]));
    b.build()
}

/// Two-counter machine for `x (uv | z | tr)* y`, whose moves cover the
/// remaining counter-update combinations.
pub fn test_machine_mixed() -> CounterMachine {
    let mut b = MachineBuilder::new(2, alphabet(&["x", "u", "v", "y", "z", "t", "r"]));
    let s0 = b.state("s0");
    let s1 = b.state("s1");
    let s2 = b.state("s2");
    let s3 = b.state("s3");
    let s4 = b.state("s4");
    b.set_initial(s0);
    b.add_final(s3);
    let both = Pattern(3);
    let l = |s| Some(Letter::new(s));
    b.add(s0, l("x"), Pattern(0), s1, Delta::from_slice(&[1, 1]));
    b.add(s1, l("u"), both, s2, Delta::from_slice(&[1, -1]));
    b.add(s2, l("v"), Pattern(1), s1, Delta::from_slice(&[-1, 1]));
    b.add(s1, l("z"), both, s1, Delta::ZERO);
    b.add(s1, l("t"), both, s4, Delta::from_slice(&[0, 1]));
    b.add(s4, l("r"), both, s1, Delta::from_slice(&[0, -1]));
    b.add(s1, l("y"), both, s3, Delta::from_slice(&[-1, -1]));
    b.build()
}

/// The bundled two-counter test subjects.
pub fn test_machines() -> Vec<(&'static str, CounterMachine)> {
    vec![("a0", test_machine_a0()), ("mixed", test_machine_mixed())]
}

/// `Y_j ↦ 0^j 1` for `j = 1, 2, …`, and the pad letter after them.
pub fn binary_recoding(y: &[Letter], pad: Option<Letter>) -> LetterMorphism {
    let [zero, one] = [Letter::new("0"), Letter::new("1")];
    let code = |j: usize| {
        let mut w = vec![zero; j];
        w.push(one);
        w
    };
    let mut pairs: Vec<(Letter, Word)> = y.iter().enumerate().map(|(i, &a)| (a, code(i + 1))).collect();
    if let Some(c) = pad {
        pairs.push((c, code(y.len() + 1)));
    }
    LetterMorphism::new(pairs)
        .and_then(|f| f.with_target(binary()))
        .expect("codes are nonempty and letters distinct")
}

/// Inverse of a prefix-code morphism on its image.
pub fn decode_code(f: &LetterMorphism, w: &[Letter]) -> Option<Word> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let a = f
            .source()
            .iter()
            .copied()
            .find(|&a| w[i..].starts_with(f.image(a).expect("source letter")))?;
        out.push(a);
        i += f.image(a).expect("source letter").len();
    }
    Some(out)
}

/// Inverse of `a ↦ a c^count`.
pub fn strip_padding(w: &[Letter], pad: Letter, count: usize) -> Option<Word> {
    if !w.len().is_multiple_of(count + 1) {
        return None;
    }
    let mut out = Vec::with_capacity(w.len() / (count + 1));
    for chunk in w.chunks(count + 1) {
        if chunk[0] == pad || chunk[1..].iter().any(|&x| x != pad) {
            return None;
        }
        out.push(chunk[0]);
    }
    Some(out)
}

/// One construction step and the shape of its result.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Stage {
    pub name: String,
    pub alphabet: Vec<Letter>,
    pub k: usize,
    pub real_time: bool,
    pub lambda_bound: usize,
    pub state_bound: u128,
}

impl Stage {
    pub fn of(name: &str, sys: &dyn CounterSystem) -> Stage {
        Stage {
            name: name.to_owned(),
            alphabet: sys.alphabet().to_vec(),
            k: sys.counters(),
            real_time: sys.real_time(),
            lambda_bound: if sys.real_time() { 0 } else { sys.lambda_chain_bound() },
            state_bound: sys.state_bound(),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<&str> = self.alphabet.iter().map(|l| l.name()).collect();
        write!(
            f,
            "{:<10} k={} real_time={} lambda<={} states<={} alphabet={{{}}}",
            self.name,
            self.k,
            self.real_time,
            self.lambda_bound,
            self.state_bound,
            letters.join(",")
        )
    }
}

/// Class description such as `real-time one-counter, FinalStateAndZero`.
pub fn class_label(sys: &dyn CounterSystem) -> String {
    let counters = match sys.counters() {
        0 => "finite-state".to_owned(),
        1 => "one-counter".to_owned(),
        2 => "two-counter".to_owned(),
        k => format!("{k}-counter"),
    };
    let timing = if sys.real_time() { "real-time " } else { "" };
    let acc = match sys.acceptance() {
        Acceptance::FinalState => "FinalState",
        Acceptance::FinalStateAndZero => "FinalStateAndZero",
    };
    format!("{timing}{counters}, {acc}")
}

/// A constructed system together with the steps that produced it.
#[derive(Clone)]
pub struct PipelineArtifact {
    pub system: SharedSystem,
    pub stages: Vec<Stage>,
    pub label: String,
    /// Borel class claimed for the ω-power of the language. Recorded, not
    /// checked.
    pub omega_class: String,
}

impl PipelineArtifact {
    pub(crate) fn new(system: SharedSystem, stages: Vec<Stage>, omega_class: String) -> PipelineArtifact {
        let label = class_label(system.as_ref());
        PipelineArtifact {
            system,
            stages,
            label,
            omega_class,
        }
    }

    /// Explicit table, if it has at most `budget` states.
    pub fn machine(&self, budget: usize) -> Result<CounterMachine, PipelineError> {
        Ok(materialize(self.system.as_ref(), budget)?)
    }

    /// Human-readable stage log.
    pub fn report(&self) -> String {
        let mut out = format!("class: {}\nomega-power class (claimed): {}\n", self.label, self.omega_class);
        for (i, s) in self.stages.iter().enumerate() {
            out.push_str(&format!("{i:>2} {s}\n"));
        }
        out
    }
}

impl fmt::Debug for PipelineArtifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PipelineArtifact")
            .field("label", &self.label)
            .field("omega_class", &self.omega_class)
            .field("stages", &self.stages)
            .finish()
    }
}

/// Number of pad letters after each letter in the real-time step.
pub const PAD_COUNT: usize = 6;

/// Turns a real-time two-counter subject into a binary real-time
/// one-counter system: block language united with the guard language,
/// padding, binary recoding.
pub fn one_counter_reduction(
    subject: SharedSystem,
    stages: &mut Vec<Stage>,
) -> Result<SharedSystem, PipelineError> {
    let sl = ScriptL::new(subject.clone())?;
    let mk = sl.markers();
    stages.push(Stage::of("block", &sl));
    let mu = mu_five_machine(subject.alphabet(), mk);
    stages.push(Stage::of("guard", &mu));
    let union = Union::new(Arc::new(sl), Arc::new(mu))?;
    stages.push(Stage::of("union", &union));
    let y = union.alphabet().to_vec();
    let pad = fresh_letter("c", &y);
    let padded = RealtimePad::new(Arc::new(union), pad, PAD_COUNT)?;
    stages.push(Stage::of("pad", &padded));
    let image = MorphicImage::new(Arc::new(padded), binary_recoding(&y, Some(pad)))?;
    stages.push(Stage::of("binary", &image));
    Ok(Arc::new(image))
}

pub fn build_pn(n: usize) -> Result<PipelineArtifact, PipelineError> {
    build_pn_capped(n, DEFAULT_CAP)
}

pub fn build_pn_capped(n: usize, cap: usize) -> Result<PipelineArtifact, PipelineError> {
    if n == 0 {
        return Err(PipelineError::InvalidN(0));
    }
    if n > cap {
        return Err(PipelineError::AboveCap { n, cap });
    }
    let mut stages = Vec::new();
    let sys = build_level(n, &mut stages)?;
    Ok(PipelineArtifact::new(sys, stages, format!("Pi0_{n}-complete")))
}

fn build_level(n: usize, stages: &mut Vec<Stage>) -> Result<SharedSystem, PipelineError> {
    match n {
        1 | 2 => {
            let m = p_base_machine(n)?;
            stages.push(Stage::of(&format!("P{n}"), &m));
            Ok(Arc::new(m))
        }
        3 => {
            let base: SharedSystem = Arc::new(p_base_machine(2)?);
            stages.push(Stage::of("P2", base.as_ref()));
            let exp = ExpSubstitute::new(base)?;
            stages.push(Stage::of("exp", &exp));
            let f = binary_recoding(exp.alphabet(), None);
            let image = MorphicImage::new(Arc::new(exp), f)?;
            let m = materialize(&image, usize::MAX)?;
            stages.push(Stage::of("binary", &m));
            Ok(Arc::new(m))
        }
        _ => {
            let prev = build_level(n - 1, stages)?;
            let exp = ExpSubstitute::new(prev)?;
            stages.push(Stage::of("exp", &exp));
            one_counter_reduction(Arc::new(exp), stages)
        }
    }
}

/// The binary word that [`one_counter_reduction`] over `subject` produces
/// for a word `u` of its block-or-guard alphabet.
pub fn reduction_encode(subject: &dyn CounterSystem, u: &[Letter]) -> Option<Word> {
    let mk = markers_for(subject);
    let mut y = subject.alphabet().to_vec();
    y.extend(mk.letters());
    let pad = fresh_letter("c", &y);
    let mut padded = Vec::with_capacity(u.len() * (PAD_COUNT + 1));
    for &a in u {
        if !y.contains(&a) {
            return None;
        }
        padded.push(a);
        padded.extend(std::iter::repeat_n(pad, PAD_COUNT));
    }
    binary_recoding(&y, Some(pad)).apply(&padded)
}

/// Definitional oracle for the language produced by
/// [`one_counter_reduction`] over `subject`.
pub fn reduction_oracle(subject: SharedSystem, tag: &str) -> Result<LanguageOracle, PipelineError> {
    script_l::check_subject(subject.as_ref())?;
    let mk = markers_for(subject.as_ref());
    let sigma = subject.alphabet().to_vec();
    let mut y = sigma.clone();
    y.extend(mk.letters());
    let pad = fresh_letter("c", &y);
    let f = binary_recoding(&y, Some(pad));
    Ok(LanguageOracle::new(binary(), tag, move |w| {
        let Some(z) = decode_code(&f, w) else { return false };
        let Some(u) = strip_padding(&z, pad, PAD_COUNT) else { return false };
        block_or_guard(subject.as_ref(), &sigma, mk, &u)
    }))
}

/// Membership in the union of the block language and the guard language.
pub fn block_or_guard(subject: &dyn CounterSystem, sigma: &[Letter], mk: Markers, u: &[Letter]) -> bool {
    mu_five_oracle(u, sigma, mk) || matches!(script_l_oracle(subject, u), Ok(Some(_)))
}

/// Stagewise definitional oracle for `P_n` over `{0, 1}`. Each level
/// refers to the constructed machine of the level below.
pub fn pn_oracle(n: usize) -> Result<LanguageOracle, PipelineError> {
    let zero = Letter::new("0");
    let one = Letter::new("1");
    let tag = format!("P{n}");
    match n {
        1 => Ok(LanguageOracle::new(binary(), tag, move |w| w == [zero])),
        2 => Ok(LanguageOracle::new(binary(), tag, move |w| {
            w.last() == Some(&one) && w[..w.len() - 1].iter().all(|&x| x == zero)
        })),
        3 => {
            let base = p_base_machine(2)?;
            let exp = ExpSubstitute::new(Arc::new(base.clone()))?;
            let f = binary_recoding(exp.alphabet(), None);
            Ok(LanguageOracle::new(binary(), tag, move |w| {
                decode_code(&f, w).is_some_and(|u| exp_image_oracle(&base, &u))
            }))
        }
        0 => Err(PipelineError::InvalidN(0)),
        _ => {
            let prev = build_pn(n - 1)?.system;
            reduction_oracle(Arc::new(ExpSubstitute::new(prev)?), &tag)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;
    use crate::machine::{accepts, validate_machine};

    #[test]
    fn base_machines() {
        let p1 = p_base_machine(1).unwrap();
        let p2 = p_base_machine(2).unwrap();
        assert!(accepts(&p1, &parse_word("0")).unwrap());
        assert!(!accepts(&p1, &parse_word("00")).unwrap());
        assert!(accepts(&p2, &parse_word("1")).unwrap());
        assert!(accepts(&p2, &parse_word("0001")).unwrap());
        assert!(!accepts(&p2, &parse_word("10")).unwrap());
        assert!(p_base_machine(3).is_err());
    }

    #[test]
    fn test_machines_validate() {
        for (name, m) in test_machines() {
            assert!(validate_machine(&m).is_ok(), "{name}");
        }
        let m = test_machine_mixed();
        assert!(accepts(&m, &parse_word("xuvzy")).unwrap());
        assert!(!accepts(&m, &parse_word("xuy")).unwrap());
    }

    #[test]
    fn recoding_round_trip() {
        let y = alphabet(&["p", "q"]);
        let c = Letter::new("c");
        let f = binary_recoding(&y, Some(c));
        assert_eq!(f.image(c).unwrap(), parse_word("0001").as_slice());
        let w = parse_word("pcq");
        assert_eq!(decode_code(&f, &f.apply(&w).unwrap()), Some(w));
        assert_eq!(decode_code(&f, &parse_word("0")), None);
        assert_eq!(strip_padding(&parse_word("pccqcc"), c, 2), Some(parse_word("pq")));
        assert_eq!(strip_padding(&parse_word("pcqcc"), c, 2), None);
    }

    #[test]
    fn level_bounds() {
        assert!(matches!(build_pn(0), Err(PipelineError::InvalidN(0))));
        assert!(matches!(build_pn(7), Err(PipelineError::AboveCap { n: 7, cap: 6 })));
        let a = build_pn(1).unwrap();
        assert!(accepts(a.system.as_ref(), &parse_word("0")).unwrap());
    }
}
