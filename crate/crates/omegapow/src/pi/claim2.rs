//! Moving between factorizations over the subject language and block-word
//! factorizations of the geometric coding.

use rustc_hash::FxHashMap;

use super::script_l::{check_subject, markers_for, scale, ScriptLWitness};
use super::PipelineError;
use crate::diagonal::{decode_g, GParams};
use crate::letter::{Letter, Word};
use crate::machine::{Configuration, CounterSystem, Edge, StateId};

/// One step of an accepting run: state and counters before the move.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RunStep {
    pub state: StateId,
    pub counters: [u32; 2],
    pub edge: Edge,
}

/// An accepting run of a real-time two-counter system, if one exists.
pub fn accepting_run(sys: &dyn CounterSystem, w: &[Letter]) -> Option<Vec<RunStep>> {
    let k = sys.counters();
    let cap = w.len() as u32 + 1;
    let start = Configuration {
        state: sys.initial(),
        counters: [0; 4],
    };
    let mut layers: Vec<FxHashMap<Configuration, Option<(Configuration, Edge)>>> =
        vec![FxHashMap::from_iter([(start, None)])];
    let mut buf = Vec::new();
    for &a in w {
        let mut next = FxHashMap::default();
        for c in layers.last().expect("nonempty").keys() {
            buf.clear();
            sys.edges(c.state, c.pattern(), &mut buf);
            for e in buf.iter().filter(|e| e.letter == Some(a)) {
                if let Some(n) = c.apply(e, k, cap) {
                    next.entry(n).or_insert(Some((*c, *e)));
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        layers.push(next);
    }
    let end = *layers
        .last()
        .expect("nonempty")
        .keys()
        .filter(|c| sys.is_final(c.state) && c.all_zero())
        .min()?;
    let mut steps = Vec::with_capacity(w.len());
    let mut cur = end;
    for i in (1..layers.len()).rev() {
        let (prev, edge) = layers[i][&cur].expect("back pointer");
        steps.push(RunStep {
            state: prev.state,
            counters: [prev.counters[0], prev.counters[1]],
            edge,
        });
        cur = prev;
    }
    steps.reverse();
    Some(steps)
}

fn power(c: [u32; 2]) -> Option<u64> {
    2u64.checked_pow(c[0])?.checked_mul(3u64.checked_pow(c[1])?)
}

/// Builds one witness per factor for the coding of their concatenation.
pub fn claim2_forward(
    subject: &dyn CounterSystem,
    factors: &[Word],
    p: GParams,
) -> Result<Vec<ScriptLWitness>, PipelineError> {
    check_subject(subject)?;
    let mut out = Vec::with_capacity(factors.len());
    let mut index = 0usize;
    for (j, factor) in factors.iter().enumerate() {
        if factor.is_empty() {
            return Err(PipelineError::EmptyFactor(j));
        }
        let run = accepting_run(subject, factor).ok_or(PipelineError::NotAccepted(j))?;
        let mut wit = ScriptLWitness {
            v: Vec::new(),
            w: Vec::new(),
            z: Vec::new(),
            letters: factor.clone(),
            states: vec![subject.initial()],
            deltas: Vec::new(),
        };
        for (i, step) in run.iter().enumerate() {
            let delta = (step.edge.delta.get(0), step.edge.delta.get(1));
            let infeasible = |needed| PipelineError::Feasibility {
                factor: j,
                step: i,
                index,
                needed,
                available: p.block(index),
            };
            let v = power(step.counters).ok_or(infeasible(u64::MAX))?;
            let wl = scale(v, delta.0, delta.1).ok_or(infeasible(u64::MAX))?;
            let block = p.block(index).ok_or(infeasible(wl))?;
            if wl > block {
                return Err(infeasible(wl));
            }
            wit.v.push(v);
            wit.w.push(wl);
            wit.z.push(block - wl);
            wit.states.push(step.edge.target);
            wit.deltas.push(delta);
            index += 1;
        }
        out.push(wit);
    }
    Ok(out)
}

/// Recovers the factors from witnesses that tile a coding word.
pub fn claim2_backward(
    subject: &dyn CounterSystem,
    witnesses: &[ScriptLWitness],
) -> Result<Vec<Word>, PipelineError> {
    if witnesses.is_empty() {
        return Ok(Vec::new());
    }
    let mk = markers_for(subject);
    let mut word = Vec::new();
    let mut letters = Vec::new();
    for (j, wit) in witnesses.iter().enumerate() {
        wit.check(subject)
            .map_err(|e| PipelineError::Invariant(format!("witness {j}: {e}")))?;
        word.extend(wit.to_word(mk));
        letters.extend_from_slice(&wit.letters);
    }
    word.push(mk.zero);
    match decode_g(&word, mk) {
        Some((_, sigma)) if sigma == letters => {}
        _ => return Err(PipelineError::Tiling),
    }
    Ok(witnesses.iter().map(|w| w.letters.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::encode_g;
    use crate::letter::parse_word;
    use crate::pi::script_l::script_l_oracle;
    use crate::pi::test_machine_a0;

    #[test]
    fn forward_backward_examples() {
        let m = test_machine_a0();
        let p = GParams::new(1, 2).unwrap();
        let ab = parse_word("ab");
        let wits = claim2_forward(&m, std::slice::from_ref(&ab), p).unwrap();
        assert_eq!(wits.len(), 1);
        let mk = markers_for(&m);
        let word = wits[0].to_word(mk);
        assert!(script_l_oracle(&m, &word).unwrap().is_some());
        let mut full = word.clone();
        full.push(mk.zero);
        assert_eq!(full, encode_g(p, &ab, mk).unwrap());
        assert_eq!(claim2_backward(&m, &wits).unwrap(), vec![ab.clone()]);

        assert!(claim2_forward(&m, &[], p).unwrap().is_empty());
        assert!(claim2_backward(&m, &[]).unwrap().is_empty());
        assert!(matches!(
            claim2_forward(&m, &[ab], GParams::new(1, 0).unwrap()),
            Err(PipelineError::Feasibility { index: 0, needed: 2, .. })
        ));

        let mut bad = wits.clone();
        bad[0].w[0] += 1;
        assert!(claim2_backward(&m, &bad).is_err());
    }
}
