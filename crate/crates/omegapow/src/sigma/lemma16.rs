//! Moving between a factorization of a `K₀` prefix into `π₀ π₁*` words and
//! the words of `L` read along the odd part of an even vertical.

use crate::diagonal::{odd_part, pair, phi_forward, phi_inverse, unpair, vertical, bit, DiagonalPrefix, GridPoint};
use crate::letter::{Letter, Word};

use super::defn::{f_blocks, pi0_parse};
use super::SigmaError;

/// Both sides of the correspondence for one instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lemma16Witness {
    pub n: u64,
    /// The words of `L`, one per `π₁` factor.
    pub words: Vec<Word>,
    /// `s_0, s_1, …`; the last block may be partial.
    pub blocks: Vec<Word>,
    /// The `π₀` factor followed by the `π₁` factors.
    pub factors: Vec<Word>,
}

impl Lemma16Witness {
    /// `M_q = 2N + 2q + 2`, the index of the block holding letter `q`.
    pub fn m_q(&self, q: u64) -> u64 {
        2 * self.n + 2 * q + 2
    }

    /// `k_m`: one less than the number of coded blocks in factor `m ≥ 1`.
    pub fn k(&self, m: usize) -> Option<usize> {
        let w = self.words.get(m.checked_sub(1)?)?;
        w.len().checked_sub(1)
    }

    /// `S^q_p = Σ_{p ≤ m ≤ q} (k_m + 1)` over the factor indices.
    pub fn s_sum(&self, p: usize, q: usize) -> usize {
        (p.max(1)..=q).filter_map(|m| self.k(m)).map(|k| k + 1).sum()
    }

    pub fn concat(&self) -> Word {
        self.factors.concat()
    }
}

fn two() -> Letter {
    Letter::new("2")
}

fn three() -> Letter {
    Letter::new("3")
}

/// Builds the `π`-factorization for `N` and the given words. Bits of the
/// underlying binary sequence that the words do not constrain come from
/// `fill`, indexed by position.
pub fn lemma16_backward(n: u64, words: &[Word], fill: &dyn Fn(u64) -> bool) -> Result<Lemma16Witness, SigmaError> {
    if let Some(j) = words.iter().position(|w| w.is_empty()) {
        return Err(SigmaError::EmptyFactor(j));
    }
    let letters: Word = words.concat();
    if letters.iter().any(|&x| crate::diagonal::bit_value(x).is_none()) {
        return Err(SigmaError::Shape("factor words must be binary".into()));
    }
    let q_total = letters.len() as u64;
    let m_last = 2 * n + 2 * q_total + 2;
    let alpha_len = m_last * (m_last + 1) / 2;
    let alpha: Word = (0..alpha_len)
        .map(|x| {
            let g = unpair(x);
            if g.n == 2 * n && g.p % 2 == 1 && g.p / 2 < q_total {
                letters[(g.p / 2) as usize]
            } else {
                bit(fill(x))
            }
        })
        .collect();
    let blocks = phi_inverse(0, &alpha)
        .map_err(|e| SigmaError::Invariant(e.to_string()))?
        .blocks;
    let s = |m: u64| &blocks[m as usize];

    let mut first = Vec::new();
    for j in 0..=n {
        first.push(two());
        first.extend(s(2 * j));
        first.push(three());
        first.extend(s(2 * j + 1));
    }
    first.push(two());
    first.push(s(2 * n + 2)[0]);

    let mut factors = vec![first];
    let mut q = 0u64;
    for w in words {
        let mut piece = Vec::new();
        for _ in 0..w.len() {
            let m = 2 * n + 2 * q + 2;
            let cut = (2 * q + 1) as usize;
            piece.extend(&s(m)[cut..]);
            piece.push(three());
            piece.extend(s(m + 1));
            piece.push(two());
            piece.extend(&s(m + 2)[..cut + 2]);
            q += 1;
        }
        factors.push(piece);
    }
    let mut realized = blocks;
    realized.truncate(m_last as usize + 1);
    if let Some(last) = realized.last_mut() {
        last.truncate(2 * q_total as usize + 1);
    }
    Ok(Lemma16Witness {
        n,
        words: words.to_vec(),
        blocks: realized,
        factors,
    })
}

/// Recovers `N` and the words of `L` from a factorization, then checks
/// each recovered letter against the vertical it should sit on.
pub fn lemma16_forward(factors: &[Word]) -> Result<Lemma16Witness, SigmaError> {
    let first = factors
        .first()
        .ok_or_else(|| SigmaError::Shape("empty factorization".into()))?;
    let n = pi0_parse(first).ok_or_else(|| SigmaError::Shape("first factor is not in pi0".into()))?;
    let mut words = Vec::new();
    for (j, w) in factors.iter().enumerate().skip(1) {
        let blocks = f_blocks(w).ok_or_else(|| SigmaError::Shape(format!("factor {j} is not a coded word")))?;
        words.push(blocks.iter().map(|b| b.a).collect::<Word>());
    }
    let whole: Word = factors.concat();
    let parse = crate::diagonal::k_parse(&whole, 0)
        .ok_or_else(|| SigmaError::Shape("concatenation is not a prefix of K0".into()))?;

    let mut complete = parse.blocks.clone();
    if !parse.last_closed {
        complete.pop();
    }
    let alpha = phi_forward(&DiagonalPrefix { l: 0, blocks: complete })
        .map_err(|e| SigmaError::Invariant(e.to_string()))?;
    let column = odd_part(&vertical(&alpha, 2 * n));
    let letters: Word = words.concat();
    if column.len() < letters.len() || column[..letters.len()] != letters[..] {
        return Err(SigmaError::Invariant(format!(
            "letters {letters:?} do not match the vertical {column:?}"
        )));
    }
    Ok(Lemma16Witness {
        n,
        words,
        blocks: parse.blocks,
        factors: factors.to_vec(),
    })
}

/// Position of letter `q` in the binary sequence.
pub fn letter_position(n: u64, q: u64) -> u64 {
    pair(GridPoint::new(2 * n, 2 * q + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonal::k_prefix_check;
    use crate::letter::parse_word;
    use crate::sigma::defn::{defn_oracle, has_one, pi1_oracle, Component};

    fn zeros(_: u64) -> bool {
        false
    }

    #[test]
    fn minimal_round_trip() {
        let wit = lemma16_backward(0, &[parse_word("1")], &zeros).unwrap();
        assert_eq!(wit.factors.len(), 2);
        assert!(defn_oracle(Component::Pi0, &wit.factors[0]));
        assert!(pi1_oracle(&wit.factors[1], &has_one));
        assert!(k_prefix_check(&wit.concat(), 0));
        let back = lemma16_forward(&wit.factors).unwrap();
        assert_eq!((back.n, back.words.clone()), (0, vec![parse_word("1")]));
        assert_eq!(back.blocks, wit.blocks);
    }

    #[test]
    fn empty_tail_and_errors() {
        let wit = lemma16_backward(2, &[], &zeros).unwrap();
        assert_eq!(wit.factors.len(), 1);
        let back = lemma16_forward(&wit.factors).unwrap();
        assert_eq!((back.n, back.words.len()), (2, 0));
        assert!(lemma16_forward(&[parse_word("130002000")]).is_err());
        assert!(lemma16_backward(0, &[vec![]], &zeros).is_err());
    }

    #[test]
    fn two_words_with_fill() {
        let words = [parse_word("0"), parse_word("1")];
        let wit = lemma16_backward(1, &words, &|x| x % 3 == 0).unwrap();
        let back = lemma16_forward(&wit.factors).unwrap();
        assert_eq!((back.n, back.words), (1, words.to_vec()));
        assert_eq!(wit.k(1), Some(0));
        assert_eq!(wit.s_sum(1, 2), 2);
        assert_eq!(wit.m_q(1), 6);
    }
}
