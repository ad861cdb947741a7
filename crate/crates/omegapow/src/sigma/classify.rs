//! Case analysis of a finite factorization into words of `A = μ ∪ π`.

use crate::diagonal::k_prefix_check;
use crate::letter::{Letter, Word};

use super::defn::{defn_oracle, f_blocks, mu_oracle, Component, FBlock};
use super::SigmaError;

/// How a factorization into `A` words continues to an element of `A^∞`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AInfinityCase {
    MuPower,
    InK0,
    /// After the prefix `t`, the rest starts with `v` and continues as an
    /// element of `K_{N+i+1}`.
    Shifted { t: Word, i: u64, n: u64, v: Word },
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Kind {
    Mu,
    Pi0,
    Pi1(Vec<FBlock>),
}

fn certify(w: &[Letter], l: &dyn Fn(&[Letter]) -> bool) -> Option<Kind> {
    if mu_oracle(w) {
        return Some(Kind::Mu);
    }
    if defn_oracle(Component::Pi0, w) {
        return Some(Kind::Pi0);
    }
    let blocks = f_blocks(w)?;
    let letters: Word = blocks.iter().map(|b| b.a).collect();
    l(&letters).then_some(Kind::Pi1(blocks))
}

/// Start of the longest suffix of coded factors whose blocks all share
/// `|t|` and whose `|w|` grows by two from block to block.
fn consistent_start(kinds: &[Kind]) -> usize {
    let mut start = kinds.len();
    let mut next: Option<(usize, usize)> = None;
    for (m, kind) in kinds.iter().enumerate().rev() {
        let Kind::Pi1(blocks) = kind else { break };
        let mut expect = next;
        let mut ok = true;
        for b in blocks.iter().rev() {
            if let Some((t, w)) = expect {
                if b.t.len() != t || b.w.len() + 2 != w {
                    ok = false;
                    break;
                }
            }
            expect = Some((b.t.len(), b.w.len()));
        }
        if !ok {
            break;
        }
        next = expect;
        start = m;
    }
    start
}

fn shifted(factors: &[Word], cut: usize, kinds: &[Kind]) -> Result<AInfinityCase, SigmaError> {
    let Some(Kind::Pi1(blocks)) = kinds.get(cut) else {
        return Err(SigmaError::Inconclusive(format!(
            "no coded factor after position {cut} to start the shifted tail"
        )));
    };
    let b = &blocks[0];
    let mut v = vec![b.a];
    v.extend(&b.t);
    Ok(AInfinityCase::Shifted {
        t: factors[..cut].concat(),
        i: (b.w.len() as u64 - 3) / 2,
        n: b.t.len() as u64 / 2,
        v,
    })
}

/// Replays the case analysis on a finite factorization. Each factor must
/// be certified by one of the components; `l` decides the letter words of
/// coded factors.
pub fn claim2_classify(factors: &[Word], l: &dyn Fn(&[Letter]) -> bool) -> Result<AInfinityCase, SigmaError> {
    if factors.is_empty() {
        return Err(SigmaError::Inconclusive("empty factorization".into()));
    }
    let mut kinds = Vec::with_capacity(factors.len());
    for (j, w) in factors.iter().enumerate() {
        if w.is_empty() {
            return Err(SigmaError::EmptyFactor(j));
        }
        kinds.push(certify(w, l).ok_or(SigmaError::Uncertified(j))?);
    }
    if kinds.iter().all(|k| *k == Kind::Mu) {
        return Ok(AInfinityCase::MuPower);
    }
    let m0 = consistent_start(&kinds);
    if kinds[0] == Kind::Pi0 && m0 <= 1 && k_prefix_check(&factors.concat(), 0) {
        return Ok(AInfinityCase::InK0);
    }
    if m0 == kinds.len() {
        return Err(SigmaError::Inconclusive("no consistent coded tail".into()));
    }
    if m0 == 0 {
        return shifted(factors, 0, &kinds);
    }
    if kinds[..m0].contains(&Kind::Mu) {
        return shifted(factors, m0, &kinds);
    }
    match kinds[..m0].iter().position(|k| *k == Kind::Pi0) {
        Some(m) if m >= 1 => shifted(factors, m0, &kinds),
        Some(_) => {
            // The separators go wrong somewhere; cut after the first factor
            // whose prefix shows it.
            let cut = (m0..factors.len())
                .find(|&c| mu_oracle(&factors[..c].concat()))
                .ok_or_else(|| SigmaError::Inconclusive("no guard word among the prefixes".into()))?;
            shifted(factors, cut, &kinds)
        }
        None => shifted(factors, m0 + 1, &kinds),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;
    use crate::sigma::defn::has_one;
    use crate::sigma::lemma16::lemma16_backward;

    #[test]
    fn simple_cases() {
        let mu = parse_word("023");
        assert_eq!(
            claim2_classify(&[mu.clone(), mu.clone()], &has_one).unwrap(),
            AInfinityCase::MuPower
        );
        let wit = lemma16_backward(0, &[parse_word("1"), parse_word("01")], &|_| false).unwrap();
        assert_eq!(claim2_classify(&wit.factors, &has_one).unwrap(), AInfinityCase::InK0);

        let mut fs = vec![mu.clone()];
        fs.extend(wit.factors[1..].iter().cloned());
        match claim2_classify(&fs, &has_one).unwrap() {
            AInfinityCase::Shifted { t, i, n, v } => {
                assert_eq!(t, mu);
                assert_eq!(n, 0);
                assert_eq!(i, 0);
                assert_eq!(v.len(), 1);
                let rest = fs[1..].concat();
                assert!(k_prefix_check(&rest[v.len()..], (n + i + 1) as u32));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            claim2_classify(&[parse_word("0")], &has_one),
            Err(SigmaError::Uncertified(0))
        );
    }
}
