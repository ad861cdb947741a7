//! Literal membership tests for the guard and block languages over
//! `{0, 1, 2, 3}`, and the small machines that accept them.

use crate::diagonal::bit_value;
use crate::letter::{alphabet, Letter, Word};
use crate::machine::{CounterMachine, Delta, MachineBuilder, Pattern};

pub fn four() -> Vec<Letter> {
    alphabet(&["0", "1", "2", "3"])
}

fn two() -> Letter {
    Letter::new("2")
}

fn three() -> Letter {
    Letter::new("3")
}

fn is_bit(x: Letter) -> bool {
    bit_value(x).is_some()
}

/// Which definition [`defn_oracle`] evaluates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Component {
    Mu0,
    Mu1,
    Mu2,
    Pi0,
    /// `w ∈ f(w(0))`: a single coded block.
    FShape,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::Mu0,
        Component::Mu1,
        Component::Mu2,
        Component::Pi0,
        Component::FShape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Mu0 => "mu0",
            Component::Mu1 => "mu1",
            Component::Mu2 => "mu2",
            Component::Pi0 => "pi0",
            Component::FShape => "f",
        }
    }
}

pub fn defn_oracle(which: Component, w: &[Letter]) -> bool {
    match which {
        Component::Mu0 => mu0(w),
        Component::Mu1 => mu_mismatch(w, three(), two()),
        Component::Mu2 => mu_mismatch(w, two(), three()),
        Component::Pi0 => pi0_parse(w).is_some(),
        Component::FShape => matches!(f_blocks(w).as_deref(), Some([_])),
    }
}

fn mu0(w: &[Letter]) -> bool {
    (1..w.len().saturating_sub(1)).any(|i| w[i] == two() && w[i + 1] == three())
}

fn bit_run(w: &[Letter], from: usize) -> usize {
    w[from..].iter().take_while(|&&x| is_bit(x)).count()
}

/// Some factor `open x mid y open` with binary `x, y` and `|y| ≠ |x| + 1`.
fn mu_mismatch(w: &[Letter], open: Letter, mid: Letter) -> bool {
    (0..w.len()).filter(|&i| w[i] == open).any(|i| {
        let x = bit_run(w, i + 1);
        let j = i + 1 + x;
        if w.get(j) != Some(&mid) {
            return false;
        }
        let y = bit_run(w, j + 1);
        w.get(j + 1 + y) == Some(&open) && y != x + 1
    })
}

/// The `N` of a `π₀` word.
pub fn pi0_parse(w: &[Letter]) -> Option<u64> {
    if w.len() < 2 || w[0] != two() || w[1] != three() {
        return None;
    }
    let mut i = 2 + bit_run(w, 2);
    let mut n = 0;
    loop {
        if w.get(i) != Some(&two()) {
            return None;
        }
        let r = bit_run(w, i + 1);
        i += 1 + r;
        if i == w.len() {
            return (r == 1).then_some(n);
        }
        if w[i] != three() {
            return None;
        }
        i += 1 + bit_run(w, i + 1);
        n += 1;
    }
}

/// One coded block `a t 3 u v 2 w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FBlock {
    pub a: Letter,
    pub t: Word,
    pub u: Word,
    pub v: Word,
    pub w: Word,
}

impl FBlock {
    pub fn to_word(&self) -> Word {
        let mut out = vec![self.a];
        out.extend(&self.t);
        out.push(three());
        out.extend(&self.u);
        out.extend(&self.v);
        out.push(two());
        out.extend(&self.w);
        out
    }
}

/// Splits `w` into coded blocks. The split is forced by the length
/// constraints, so there is at most one.
pub fn f_blocks(w: &[Letter]) -> Option<Vec<FBlock>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let a = w[i];
        if !is_bit(a) {
            return None;
        }
        let t_len = bit_run(w, i + 1);
        let t = w[i + 1..i + 1 + t_len].to_vec();
        i += 1 + t_len;
        if w.get(i) != Some(&three()) || t_len % 2 == 1 {
            return None;
        }
        let uv = bit_run(w, i + 1);
        if uv < t_len + 3 || (uv - t_len).is_multiple_of(2) {
            return None;
        }
        let u = w[i + 1..i + 1 + t_len].to_vec();
        let v = w[i + 1 + t_len..i + 1 + uv].to_vec();
        i += 1 + uv;
        if w.get(i) != Some(&two()) {
            return None;
        }
        let end = i + 1 + v.len();
        if end > w.len() || !w[i + 1..end].iter().all(|&x| is_bit(x)) {
            return None;
        }
        let ww = w[i + 1..end].to_vec();
        i = end;
        out.push(FBlock { a, t, u, v, w: ww });
    }
    (!out.is_empty()).then_some(out)
}

/// The first letters of the blocks of a `π₁` word.
pub fn pi1_letters(w: &[Letter]) -> Option<Word> {
    f_blocks(w).map(|b| b.iter().map(|x| x.a).collect())
}

pub fn pi1_oracle(w: &[Letter], l: &dyn Fn(&[Letter]) -> bool) -> bool {
    pi1_letters(w).is_some_and(|x| l(&x))
}

pub fn mu_oracle(w: &[Letter]) -> bool {
    [Component::Mu0, Component::Mu1, Component::Mu2]
        .into_iter()
        .any(|c| defn_oracle(c, w))
}

/// Membership in `μ ∪ π₀ ∪ f(L)`.
pub fn a_oracle(w: &[Letter], l: &dyn Fn(&[Letter]) -> bool) -> bool {
    mu_oracle(w) || defn_oracle(Component::Pi0, w) || pi1_oracle(w, l)
}

/// Binary words containing a `1`.
pub fn has_one(w: &[Letter]) -> bool {
    w.iter().all(|&x| is_bit(x)) && w.contains(&Letter::new("1"))
}

/// `w` starts with `0` or with `1 0^k 1`.
pub fn s1_oracle(w: &[Letter]) -> bool {
    let (zero, one) = (Letter::new("0"), Letter::new("1"));
    if !w.iter().all(|&x| x == zero || x == one) {
        return false;
    }
    match w.first() {
        Some(&x) if x == zero => true,
        Some(_) => w[1..].contains(&one),
        None => false,
    }
}

pub fn s1_machine() -> CounterMachine {
    let (zero, one) = (Some(Letter::new("0")), Some(Letter::new("1")));
    let mut b = MachineBuilder::new(0, alphabet(&["0", "1"]));
    let s = b.state("s");
    let p = b.state("10*");
    let acc = b.state("acc");
    b.set_initial(s);
    b.add_final(acc);
    let z = Pattern(0);
    b.add(s, zero, z, acc, Delta::ZERO);
    b.add(s, one, z, p, Delta::ZERO);
    b.add(p, zero, z, p, Delta::ZERO);
    b.add(p, one, z, acc, Delta::ZERO);
    b.add(acc, zero, z, acc, Delta::ZERO);
    b.add(acc, one, z, acc, Delta::ZERO);
    b.build()
}

/// Finite automaton for binary words with a `1`.
pub fn has_one_machine() -> CounterMachine {
    let (zero, one) = (Some(Letter::new("0")), Some(Letter::new("1")));
    let mut b = MachineBuilder::new(0, alphabet(&["0", "1"]));
    let s = b.state("no1");
    let t = b.state("seen1");
    b.set_initial(s);
    b.add_final(t);
    let z = Pattern(0);
    b.add(s, zero, z, s, Delta::ZERO);
    b.add(s, one, z, t, Delta::ZERO);
    b.add(t, zero, z, t, Delta::ZERO);
    b.add(t, one, z, t, Delta::ZERO);
    b.build()
}

pub fn mu0_machine() -> CounterMachine {
    let mut b = MachineBuilder::new(0, four());
    let s0 = b.state("start");
    let s1 = b.state("v");
    let s2 = b.state("v2");
    let acc = b.state("acc");
    b.set_initial(s0);
    b.add_final(acc);
    let z = Pattern(0);
    for x in four() {
        b.add(s0, Some(x), z, s1, Delta::ZERO);
        b.add(acc, Some(x), z, acc, Delta::ZERO);
        let from_v = if x == two() { s2 } else { s1 };
        b.add(s1, Some(x), z, from_v, Delta::ZERO);
        let from_v2 = if x == three() { acc } else { from_v };
        b.add(s2, Some(x), z, from_v2, Delta::ZERO);
    }
    b.build()
}

/// Real-time one-counter machine for a factor `open x mid y open` with
/// `|y| ≠ |x| + 1`. The machine guesses whether `y` is longer or shorter.
/// Going long, it counts `x mid` and needs a letter of `y` left over once
/// the count is used up. Going short, it skips a nonempty prefix of
/// `x mid`, counts the rest, and matches `y` against the count exactly.
fn mu_mismatch_machine(open: Letter, mid: Letter) -> CounterMachine {
    let mut b = MachineBuilder::new(1, four());
    let any = |_: Pattern| true;
    let pos = |p: Pattern| p.positive(0);
    let zero = |p: Pattern| !p.positive(0);
    let (inc, dec, keep) = (Delta::unit(0, 1), Delta::unit(0, -1), Delta::ZERO);
    let bits = alphabet(&["0", "1"]);
    let (open, mid) = (Some(open), Some(mid));

    let pre = b.state("pre");
    let f = b.state("open");
    let g1 = b.state("long.x");
    let g2 = b.state("long.y");
    let g3 = b.state("long.extra");
    let ls = b.state("short.skip");
    let li = b.state("short.x");
    let ld = b.state("short.y");
    let done = b.state("done");
    b.set_initial(pre);
    b.add_final(done);
    for x in four() {
        b.add_where(pre, Some(x), any, pre, keep);
        b.add_where(done, Some(x), any, done, keep);
    }
    b.add_where(pre, open, any, f, keep);
    b.add_where(f, mid, any, g2, inc);
    b.add_where(g1, mid, any, g2, inc);
    b.add_where(f, mid, any, ld, keep);
    b.add_where(ls, mid, any, ld, keep);
    b.add_where(ls, mid, any, ld, inc);
    b.add_where(li, mid, any, ld, inc);
    b.add_where(g3, open, any, done, keep);
    b.add_where(ld, open, zero, done, keep);
    for x in bits {
        let x = Some(x);
        b.add_where(f, x, any, g1, inc);
        b.add_where(g1, x, any, g1, inc);
        b.add_where(g2, x, pos, g2, dec);
        b.add_where(g2, x, zero, g3, keep);
        b.add_where(g3, x, any, g3, keep);
        b.add_where(f, x, any, ls, keep);
        b.add_where(ls, x, any, ls, keep);
        b.add_where(ls, x, any, li, inc);
        b.add_where(li, x, any, li, inc);
        b.add_where(ld, x, pos, ld, dec);
    }
    b.build()
}

pub fn mu1_machine() -> CounterMachine {
    mu_mismatch_machine(three(), two())
}

pub fn mu2_machine() -> CounterMachine {
    mu_mismatch_machine(two(), three())
}

/// Finite automaton for `2 3 B* (2 B* 3 B*)* 2 B` with `B = {0, 1}`.
pub fn pi0_machine() -> CounterMachine {
    let mut b = MachineBuilder::new(0, four());
    let q0 = b.state("start");
    let q1 = b.state("2");
    let odd = b.state("odd");
    let even = b.state("even");
    let last = b.state("a");
    let long = b.state("even+");
    b.set_initial(q0);
    b.add_final(last);
    let z = Pattern(0);
    let (t2, t3) = (Some(two()), Some(three()));
    b.add(q0, t2, z, q1, Delta::ZERO);
    b.add(q1, t3, z, odd, Delta::ZERO);
    b.add(odd, t2, z, even, Delta::ZERO);
    for s in [even, last, long] {
        b.add(s, t3, z, odd, Delta::ZERO);
    }
    for x in alphabet(&["0", "1"]) {
        let x = Some(x);
        b.add(odd, x, z, odd, Delta::ZERO);
        b.add(even, x, z, last, Delta::ZERO);
        b.add(last, x, z, long, Delta::ZERO);
        b.add(long, x, z, long, Delta::ZERO);
    }
    b.build()
}

/// The machine for one of the regular or one-counter components.
pub fn component_machine(which: Component) -> Option<CounterMachine> {
    match which {
        Component::Mu0 => Some(mu0_machine()),
        Component::Mu1 => Some(mu1_machine()),
        Component::Mu2 => Some(mu2_machine()),
        Component::Pi0 => Some(pi0_machine()),
        Component::FShape => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::parse_word;
    use crate::machine::{accepts, validate_machine};

    #[test]
    fn oracle_examples() {
        let w = parse_word;
        assert!(defn_oracle(Component::Mu0, &w("023")));
        assert!(!defn_oracle(Component::Mu0, &w("23")));
        assert!(defn_oracle(Component::Mu1, &w("323")));
        assert!(!defn_oracle(Component::Mu1, &w("3203")));
        assert!(defn_oracle(Component::Mu2, &w("23002")));
        assert!(!defn_oracle(Component::Mu2, &w("2302")));
        assert!(defn_oracle(Component::Pi0, &w("2320")));
        assert!(defn_oracle(Component::Pi0, &w("23121030021")));
        assert!(!defn_oracle(Component::Pi0, &w("23200")));
        assert!(defn_oracle(Component::FShape, &w("130002000")));
        assert!(defn_oracle(Component::FShape, &w("0103001012010")));
        assert!(!defn_oracle(Component::FShape, &w("1300002000")));
        assert!(s1_oracle(&w("0")) && s1_oracle(&w("101")) && !s1_oracle(&w("10")));
    }

    #[test]
    fn block_parse() {
        let b = f_blocks(&parse_word("130002000 0103001112111")).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[1].t.len(), 2);
        assert_eq!(b[1].v.len(), 3);
        assert_eq!(pi1_letters(&parse_word("130002000")), Some(parse_word("1")));
        assert!(pi1_oracle(&parse_word("130002000"), &has_one));
        assert!(!pi1_oracle(&parse_word("030002000"), &has_one));
        assert!(!pi1_oracle(&parse_word("1300020"), &has_one));
        for blk in &b {
            assert!(defn_oracle(Component::FShape, &blk.to_word()));
        }
    }

    #[test]
    fn machines_validate_and_match_examples() {
        for c in [Component::Mu0, Component::Mu1, Component::Mu2, Component::Pi0] {
            let m = component_machine(c).unwrap();
            assert!(validate_machine(&m).is_ok(), "{c:?}");
            assert!(m.is_real_time());
            for w in ["023", "323", "2302", "2320", "3203", ""] {
                let w = parse_word(w);
                assert_eq!(accepts(&m, &w).unwrap(), defn_oracle(c, &w), "{c:?} {w:?}");
            }
        }
        let s1 = s1_machine();
        for w in ["0", "101", "10", "1001", "", "11"] {
            let w = parse_word(w);
            assert_eq!(accepts(&s1, &w).unwrap(), s1_oracle(&w));
        }
    }
}
