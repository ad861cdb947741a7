//! The `S_n` pipeline over `{0, 1, 2, 3}`: guard words `μ`, the coded
//! language `π = π₀ ∪ f(L)`, their union `A`, and the witness
//! transformations between factorizations and binary sequences.

pub mod classify;
pub mod defn;
pub mod lemma16;
pub mod pi1;

use std::sync::Arc;

use thiserror::Error;

use crate::machine::ops::Union;
use crate::machine::{materialize, CounterMachine, MachineError, SharedSystem};
use crate::oracle::LanguageOracle;
use crate::pi::{build_pn, one_counter_reduction, reduction_oracle, PipelineArtifact, PipelineError, Stage, DEFAULT_CAP};

pub use classify::{claim2_classify, AInfinityCase};
pub use defn::{
    a_oracle, component_machine, defn_oracle, f_blocks, four, has_one, has_one_machine, mu_oracle, pi1_oracle,
    s1_machine, s1_oracle, Component, FBlock,
};
pub use lemma16::{lemma16_backward, lemma16_forward, Lemma16Witness};
pub use pi1::Pi1System;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigmaError {
    #[error("malformed factorization: {0}")]
    Shape(String),
    #[error("factor {0} is empty")]
    EmptyFactor(usize),
    #[error("factor {0} is in none of the components")]
    Uncertified(usize),
    #[error("the finite factorization does not decide the case: {0}")]
    Inconclusive(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// `f(L)` as an explicit machine.
pub fn pi1_machine(l: &CounterMachine) -> Result<CounterMachine, MachineError> {
    materialize(&Pi1System::new(Arc::new(l.clone()))?, usize::MAX)
}

/// Union of the four fixed components with `f(L)`.
pub fn assemble_a_system(l: SharedSystem, stages: &mut Vec<Stage>) -> Result<SharedSystem, MachineError> {
    let pi1 = Pi1System::new(l)?;
    stages.push(Stage::of("pi1", &pi1));
    let mut acc: SharedSystem = Arc::new(pi1);
    for c in [Component::Pi0, Component::Mu2, Component::Mu1, Component::Mu0] {
        let m = component_machine(c).expect("fixed component");
        acc = Arc::new(Union::new(Arc::new(m), acc)?);
    }
    stages.push(Stage::of("A", acc.as_ref()));
    Ok(acc)
}

pub fn assemble_a(l: &CounterMachine) -> Result<CounterMachine, MachineError> {
    let sys = assemble_a_system(Arc::new(l.clone()), &mut Vec::new())?;
    materialize(sys.as_ref(), usize::MAX)
}

pub fn build_sn(n: usize) -> Result<PipelineArtifact, PipelineError> {
    build_sn_capped(n, DEFAULT_CAP)
}

pub fn build_sn_capped(n: usize, cap: usize) -> Result<PipelineArtifact, PipelineError> {
    if n > cap {
        return Err(PipelineError::AboveCap { n, cap });
    }
    let mut stages = Vec::new();
    let sys: SharedSystem = match n {
        0 => return Err(PipelineError::InvalidN(0)),
        1 => {
            let m = s1_machine();
            stages.push(Stage::of("S1", &m));
            Arc::new(m)
        }
        2 => {
            return Err(PipelineError::Unsupported(
                "S2 is constructed in external reference only".into(),
            ))
        }
        3 => {
            let l = has_one_machine();
            stages.push(Stage::of("L", &l));
            let a = assemble_a_system(Arc::new(l), &mut stages)?;
            let m = materialize(a.as_ref(), usize::MAX)?;
            stages.push(Stage::of("explicit", &m));
            Arc::new(m)
        }
        _ => {
            let prev = build_pn(n - 1)?;
            stages.extend(prev.stages);
            let a = assemble_a_system(prev.system, &mut stages)?;
            one_counter_reduction(a, &mut stages)?
        }
    };
    Ok(PipelineArtifact::new(sys, stages, format!("Sigma0_{n}-complete")))
}

/// Stagewise definitional oracle for `S_n`.
pub fn sn_oracle(n: usize) -> Result<LanguageOracle, PipelineError> {
    let tag = format!("S{n}");
    match n {
        1 => Ok(LanguageOracle::new(crate::letter::alphabet(&["0", "1"]), tag, s1_oracle)),
        2 => Err(PipelineError::Unsupported(
            "S2 is constructed in external reference only".into(),
        )),
        3 => Ok(LanguageOracle::new(four(), tag, |w| a_oracle(w, &has_one))),
        0 => Err(PipelineError::InvalidN(0)),
        _ => {
            let prev = build_pn(n - 1)?.system;
            let a = assemble_a_system(prev, &mut Vec::new())?;
            reduction_oracle(a, &tag)
        }
    }
}

/// Oracle for `A` over a language `L` given by a machine.
pub fn a_machine_oracle(l: SharedSystem, tag: &str) -> LanguageOracle {
    LanguageOracle::new(four(), tag, move |w| {
        a_oracle(w, &|x| crate::machine::accepts(l.as_ref(), x).unwrap_or(false))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;
    use crate::machine::{accepts, validate_machine};

    #[test]
    fn pi1_examples() {
        let m = pi1_machine(&has_one_machine()).unwrap();
        assert_eq!(m.k(), 1);
        assert!(m.is_real_time());
        assert!(validate_machine(&m).is_ok());
        for (w, expect) in [
            ("130002000", true),
            ("030002000", false),
            ("13000020000", false),
            ("1300020000", false),
            ("130002000 0103001112111", true),
            ("", false),
        ] {
            let w = parse_word(w);
            assert_eq!(accepts(&m, &w).unwrap(), expect, "{w:?}");
            assert_eq!(pi1_oracle(&w, &has_one), expect);
        }
    }

    #[test]
    fn build_sn_levels() {
        assert!(matches!(build_sn(2), Err(PipelineError::Unsupported(_))));
        assert!(matches!(build_sn(0), Err(PipelineError::InvalidN(0))));
        assert!(matches!(build_sn(9), Err(PipelineError::AboveCap { .. })));
        let s1 = build_sn(1).unwrap();
        assert!(accepts(s1.system.as_ref(), &parse_word("101")).unwrap());
        let s3 = build_sn(3).unwrap();
        assert_eq!(s3.system.counters(), 1);
        assert!(s3.system.real_time());
        assert!(accepts(s3.system.as_ref(), &parse_word("023")).unwrap());
        assert!(!accepts(s3.system.as_ref(), &[]).unwrap());
    }
}
