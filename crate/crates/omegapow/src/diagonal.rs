//! Pairing along alternating diagonals, verticals, the 2/3-valuation coding
//! of block lengths, and the separator-structured prefix sets `K_l`.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::letter::{Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagonalError {
    #[error("valuations are undefined at 0")]
    Zero,
    #[error("6 divides N = {0}")]
    SixDividesN(u64),
    #[error("N must be positive")]
    NonPositiveN,
    #[error("encoded word would exceed {0} letters")]
    TooLong(u64),
    #[error("missing entry x({0}, {1})")]
    MissingEntry(u64, u64),
    #[error("block {index} has length {got}, expected {expected}")]
    BlockLength { index: usize, expected: usize, got: usize },
    #[error("block {0} is not binary")]
    NotBinary(usize),
    #[error("length {0} is not a sum of complete blocks")]
    Incompatible(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GridPoint {
    pub n: u64,
    pub p: u64,
}

impl GridPoint {
    pub fn new(n: u64, p: u64) -> GridPoint {
        GridPoint { n, p }
    }
}

fn triangle(d: u64) -> u64 {
    d * (d + 1) / 2
}

pub fn pair(g: GridPoint) -> u64 {
    let d = g.n + g.p;
    if d.is_multiple_of(2) {
        triangle(d) + g.n
    } else {
        triangle(d) + g.p
    }
}

/// Largest `q` with `q(q+1)/2 ≤ n`.
pub fn diagonal_index(n: u64) -> u64 {
    let mut q = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while triangle(q + 1) <= n {
        q += 1;
    }
    while triangle(q) > n {
        q -= 1;
    }
    q
}

pub fn unpair(q: u64) -> GridPoint {
    let d = diagonal_index(q);
    let offset = q - triangle(d);
    if d.is_multiple_of(2) {
        GridPoint::new(offset, d - offset)
    } else {
        GridPoint::new(d - offset, offset)
    }
}

/// Exponents of 2 and 3 in `m`.
pub fn valuations_23(m: u64) -> Result<(u32, u32), DiagonalError> {
    if m == 0 {
        return Err(DiagonalError::Zero);
    }
    let (mut m, mut two, mut three) = (m, 0, 0);
    while m % 2 == 0 {
        m /= 2;
        two += 1;
    }
    while m % 3 == 0 {
        m /= 3;
        three += 1;
    }
    Ok((two, three))
}

/// Letters of `alpha` at positions `⟨m, 0⟩, ⟨m, 1⟩, …` up to the first
/// position beyond the prefix.
pub fn vertical(alpha: &[Letter], m: u64) -> Word {
    let mut out = Vec::new();
    for p in 0.. {
        let i = pair(GridPoint::new(m, p));
        match alpha.get(i as usize) {
            Some(&l) => out.push(l),
            None => break,
        }
    }
    out
}

/// Letters at odd positions.
pub fn odd_part(w: &[Letter]) -> Word {
    w.iter().skip(1).step_by(2).copied().collect()
}

pub fn bit(b: bool) -> Letter {
    Letter::new(if b { "1" } else { "0" })
}

pub fn bit_value(l: Letter) -> Option<bool> {
    match l.name() {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

/// The reduction map on double sequences, on its first `out_len` positions.
pub fn c_map(x: &FxHashMap<(u64, u64), bool>, out_len: u64) -> Result<Word, DiagonalError> {
    let mut out = Vec::with_capacity(out_len as usize);
    for q in 0..out_len {
        let g = unpair(q);
        if g.n % 2 == 1 || g.p.is_multiple_of(2) {
            out.push(bit(false));
        } else {
            let key = (g.n / 2, (g.p - 1) / 2);
            let v = x.get(&key).ok_or(DiagonalError::MissingEntry(key.0, key.1))?;
            out.push(bit(!v));
        }
    }
    Ok(out)
}

/// Parameters `(N, l)` of the geometric block coding; `6 ∤ N`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GParams {
    pub n: u64,
    pub l: u32,
}

impl GParams {
    pub fn new(n: u64, l: u32) -> Result<GParams, DiagonalError> {
        if n == 0 {
            return Err(DiagonalError::NonPositiveN);
        }
        if n.is_multiple_of(6) {
            return Err(DiagonalError::SixDividesN(n));
        }
        Ok(GParams { n, l })
    }

    /// `N·6^(l+i)`, if it fits.
    pub fn block(&self, i: usize) -> Option<u64> {
        let e = u32::try_from(i).ok()?.checked_add(self.l)?;
        6u64.checked_pow(e)?.checked_mul(self.n)
    }
}

/// Marker letters of the block coding.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Markers {
    pub zero: Letter,
    pub one: Letter,
    pub two: Letter,
}

impl Markers {
    pub fn standard() -> Markers {
        Markers {
            zero: Letter::new("0"),
            one: Letter::new("1"),
            two: Letter::new("2"),
        }
    }

    /// `0`, `1`, `2`, primed as often as needed to avoid `taken`.
    pub fn fresh_for(taken: &[Letter]) -> Markers {
        let mut suffix = String::new();
        loop {
            let m = Markers {
                zero: Letter::new(&format!("0{suffix}")),
                one: Letter::new(&format!("1{suffix}")),
                two: Letter::new(&format!("2{suffix}")),
            };
            if !taken.iter().any(|l| m.contains(*l)) {
                return m;
            }
            suffix.push('\'');
        }
    }

    pub fn contains(&self, l: Letter) -> bool {
        l == self.zero || l == self.one || l == self.two
    }

    pub fn letters(&self) -> [Letter; 3] {
        [self.zero, self.one, self.two]
    }
}

/// Longest word [`encode_g`] will produce.
pub const MAX_ENCODED_LEN: u64 = 50_000_000;

/// `𝟎 ⌢_i σ(i) 𝟏 𝟎^{N·6^{l+i}} 𝟐 𝟎^{N·6^{l+i}}`.
pub fn encode_g(p: GParams, sigma: &[Letter], mk: Markers) -> Result<Word, DiagonalError> {
    GParams::new(p.n, p.l)?;
    let mut total = 1u64;
    for i in 0..sigma.len() {
        let b = p.block(i).ok_or(DiagonalError::TooLong(MAX_ENCODED_LEN))?;
        total = total.saturating_add(3 + 2 * b);
    }
    if total > MAX_ENCODED_LEN {
        return Err(DiagonalError::TooLong(MAX_ENCODED_LEN));
    }
    let mut out = Vec::with_capacity(total as usize);
    out.push(mk.zero);
    for (i, &a) in sigma.iter().enumerate() {
        let b = p.block(i).expect("checked above") as usize;
        out.push(a);
        out.push(mk.one);
        out.extend(std::iter::repeat_n(mk.zero, b));
        out.push(mk.two);
        out.extend(std::iter::repeat_n(mk.zero, b));
    }
    Ok(out)
}

/// Inverse of [`encode_g`] on its image. The single word `𝟎` encodes the
/// empty prefix under every parameter and is therefore rejected.
pub fn decode_g(w: &[Letter], mk: Markers) -> Option<(GParams, Word)> {
    if w.first() != Some(&mk.zero) {
        return None;
    }
    let mut i = 1;
    let mut sigma = Vec::new();
    let mut blocks = Vec::new();
    let zeros = |from: usize| w[from..].iter().take_while(|&&l| l == mk.zero).count();
    while i < w.len() {
        let a = w[i];
        if mk.contains(a) || w.get(i + 1) != Some(&mk.one) {
            return None;
        }
        let b1 = zeros(i + 2);
        if b1 == 0 || w.get(i + 2 + b1) != Some(&mk.two) {
            return None;
        }
        let b2 = zeros(i + 3 + b1);
        if b2 != b1 {
            return None;
        }
        sigma.push(a);
        blocks.push(b1 as u64);
        i += 3 + b1 + b2;
    }
    let first = *blocks.first()?;
    let mut n = first;
    let mut l = 0;
    while n % 6 == 0 {
        n /= 6;
        l += 1;
    }
    let p = GParams::new(n, l).ok()?;
    for (j, &b) in blocks.iter().enumerate() {
        if p.block(j) != Some(b) {
            return None;
        }
    }
    Some((p, sigma))
}

/// Finite prefix of an element of `K_l`: blocks `s_0, s_1, …` for `l = 0`,
/// blocks `s_1, s_2, …` for `l ≥ 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiagonalPrefix {
    pub l: u32,
    pub blocks: Vec<Word>,
}

impl DiagonalPrefix {
    /// Index `m` of the `t`-th block.
    pub fn block_index(l: u32, t: usize) -> usize {
        if l == 0 {
            t
        } else {
            t + 1
        }
    }

    /// Required length of block `s_m`.
    pub fn block_len(l: u32, m: usize) -> usize {
        if l == 0 {
            m
        } else {
            2 * l as usize + m
        }
    }

    pub fn validate(&self) -> Result<(), DiagonalError> {
        if self.l == 0 && self.blocks.is_empty() {
            return Err(DiagonalError::BlockLength {
                index: 0,
                expected: 0,
                got: 0,
            });
        }
        for (t, s) in self.blocks.iter().enumerate() {
            let m = Self::block_index(self.l, t);
            let expected = Self::block_len(self.l, m);
            if s.len() != expected {
                return Err(DiagonalError::BlockLength {
                    index: m,
                    expected,
                    got: s.len(),
                });
            }
            if s.iter().any(|&b| bit_value(b).is_none()) {
                return Err(DiagonalError::NotBinary(m));
            }
        }
        Ok(())
    }
}

fn oriented(block: &[Letter], m: usize) -> impl Iterator<Item = &Letter> {
    let rev = m % 2 == 1;
    let n = block.len();
    (0..n).map(move |i| &block[if rev { n - 1 - i } else { i }])
}

/// Concatenates the blocks, reversing those with odd index.
pub fn phi_forward(d: &DiagonalPrefix) -> Result<Word, DiagonalError> {
    d.validate()?;
    let mut out = Vec::new();
    for (t, s) in d.blocks.iter().enumerate() {
        out.extend(oriented(s, DiagonalPrefix::block_index(d.l, t)));
    }
    Ok(out)
}

/// Splits a binary word into complete blocks and undoes the reversals.
pub fn phi_inverse(l: u32, w: &[Letter]) -> Result<DiagonalPrefix, DiagonalError> {
    if let Some(pos) = w.iter().position(|&b| bit_value(b).is_none()) {
        return Err(DiagonalError::NotBinary(pos));
    }
    let mut blocks = Vec::new();
    let mut i = 0;
    let mut t = 0;
    loop {
        let m = DiagonalPrefix::block_index(l, t);
        let len = DiagonalPrefix::block_len(l, m);
        if i == w.len() && (l > 0 || t > 0) {
            break;
        }
        if i + len > w.len() {
            return Err(DiagonalError::Incompatible(w.len()));
        }
        blocks.push(oriented(&w[i..i + len], m).copied().collect());
        i += len;
        t += 1;
    }
    Ok(DiagonalPrefix { l, blocks })
}

/// Parsed separator structure of a `K_l` prefix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KParse {
    /// Complete blocks, followed by the possibly partial last block.
    pub blocks: Vec<Word>,
    /// True if the last block is complete (followed by a separator).
    pub last_closed: bool,
}

/// Parses `w` as a prefix of an element of `K_l`.
pub fn k_parse(w: &[Letter], l: u32) -> Option<KParse> {
    let two = Letter::new("2");
    let three = Letter::new("3");
    let mut expect = if l == 0 { two } else { three };
    let mut blocks: Vec<Word> = Vec::new();
    let mut current: Option<Word> = None;
    for &x in w {
        if x == two || x == three {
            if x != expect {
                return None;
            }
            if let Some(s) = current.take() {
                let m = DiagonalPrefix::block_index(l, blocks.len());
                if s.len() != DiagonalPrefix::block_len(l, m) {
                    return None;
                }
                blocks.push(s);
            }
            current = Some(Vec::new());
            expect = if x == two { three } else { two };
        } else {
            bit_value(x)?;
            let s = current.as_mut()?;
            s.push(x);
            let m = DiagonalPrefix::block_index(l, blocks.len());
            if s.len() > DiagonalPrefix::block_len(l, m) {
                return None;
            }
        }
    }
    let last_closed = current.is_none();
    if let Some(s) = current {
        blocks.push(s);
    }
    Some(KParse { blocks, last_closed })
}

/// True iff `w` is a prefix of some element of `K_l`.
pub fn k_prefix_check(w: &[Letter], l: u32) -> bool {
    k_parse(w, l).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;

    #[test]
    fn pairing_examples() {
        assert_eq!(pair(GridPoint::new(0, 0)), 0);
        assert_eq!(pair(GridPoint::new(3, 0)), 6);
        assert_eq!(pair(GridPoint::new(0, 1)), 2);
        assert_eq!(unpair(0), GridPoint::new(0, 0));
        assert_eq!(unpair(5), GridPoint::new(2, 0));
        assert_eq!(unpair(9), GridPoint::new(0, 3));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuations_23(12), Ok((2, 1)));
        assert_eq!(valuations_23(1), Ok((0, 0)));
        assert_eq!(valuations_23(6), Ok((1, 1)));
        assert_eq!(valuations_23(0), Err(DiagonalError::Zero));
    }

    #[test]
    fn vertical_and_odd_part() {
        assert_eq!(vertical(&parse_word("0100110"), 0), parse_word("000"));
        assert_eq!(vertical(&[], 3), parse_word(""));
        assert_eq!(vertical(&parse_word("1"), 0), parse_word("1"));
        assert_eq!(odd_part(&parse_word("0101")), parse_word("11"));
        assert_eq!(odd_part(&parse_word("ab")), parse_word("b"));
        assert_eq!(odd_part(&[]), parse_word(""));
    }

    #[test]
    fn c_map_branches() {
        let mut x = FxHashMap::default();
        x.insert((0, 0), true);
        let out = c_map(&x, 3).unwrap();
        assert_eq!(out, parse_word("000"));
        x.insert((0, 0), false);
        assert_eq!(c_map(&x, 3).unwrap(), parse_word("001"));
        assert!(c_map(&FxHashMap::default(), 3).is_err());
    }

    #[test]
    fn g_coding_examples() {
        let mk = Markers::standard();
        let p = GParams::new(1, 0).unwrap();
        let (a, b) = (Letter::new("a"), Letter::new("b"));
        let mut expected = parse_word("0a1020b1");
        expected.extend(parse_word("000000"));
        expected.push(mk.two);
        expected.extend(parse_word("000000"));
        assert_eq!(encode_g(p, &[a, b], mk).unwrap(), expected);
        assert_eq!(GParams::new(6, 0), Err(DiagonalError::SixDividesN(6)));
        let w = encode_g(GParams::new(1, 1).unwrap(), &[a], mk).unwrap();
        assert_eq!(w.len(), 1 + 3 + 12);
        assert_eq!(decode_g(&expected, mk), Some((p, vec![a, b])));
        assert_eq!(decode_g(&parse_word("00"), mk), None);
        let q = GParams::new(5, 2).unwrap();
        let w = encode_g(q, &[a, b, a], mk).unwrap();
        assert_eq!(decode_g(&w, mk), Some((q, vec![a, b, a])));
    }

    #[test]
    fn phi_examples() {
        let d = DiagonalPrefix {
            l: 0,
            blocks: vec![parse_word(""), parse_word("1"), parse_word("01")],
        };
        assert_eq!(phi_forward(&d).unwrap(), parse_word("101"));
        assert_eq!(phi_inverse(0, &parse_word("101")).unwrap(), d);
        let empty = DiagonalPrefix {
            l: 0,
            blocks: vec![parse_word("")],
        };
        assert_eq!(phi_forward(&empty).unwrap(), parse_word(""));
        assert_eq!(phi_inverse(0, &[]).unwrap(), empty);
        assert!(phi_inverse(0, &parse_word("10")).is_err());
    }

    #[test]
    fn k_prefix_examples() {
        assert!(k_prefix_check(&parse_word("2302"), 0));
        assert!(!k_prefix_check(&parse_word("3"), 0));
        assert!(k_prefix_check(&[], 0));
        assert!(!k_prefix_check(&parse_word("2302001"), 0));
        assert!(k_prefix_check(&parse_word("3000"), 1));
        assert!(k_prefix_check(&parse_word("30002"), 1));
        assert!(!k_prefix_check(&parse_word("3002"), 1));
    }
}
