//! Words of the coding shape whose last two blocks break the geometric
//! pattern.

use crate::dfa::Dfa;
use crate::diagonal::Markers;
use crate::letter::Letter;
use crate::machine::{CounterMachine, Delta, MachineBuilder, Pattern};

/// Parses `0 (a_i 1 0^P_i 2 0^Q_i)_{i<n}` into `(P_i, Q_i)` pairs.
pub fn parse_pq(w: &[Letter], sigma: &[Letter], mk: Markers) -> Option<Vec<(u64, u64)>> {
    if w.first() != Some(&mk.zero) {
        return None;
    }
    let mut i = 1;
    let mut out = Vec::new();
    let run = |i: &mut usize| {
        let s = *i;
        while *i < w.len() && w[*i] == mk.zero {
            *i += 1;
        }
        (*i - s) as u64
    };
    while i < w.len() {
        if !sigma.contains(&w[i]) || w.get(i + 1) != Some(&mk.one) {
            return None;
        }
        i += 2;
        let p = run(&mut i);
        if p == 0 || w.get(i) != Some(&mk.two) {
            return None;
        }
        i += 1;
        let q = run(&mut i);
        out.push((p, q));
    }
    Some(out)
}

pub fn mu_five_oracle(w: &[Letter], sigma: &[Letter], mk: Markers) -> bool {
    match parse_pq(w, sigma, mk) {
        Some(b) if b.len() >= 2 => {
            let (p2, q2) = b[b.len() - 2];
            let (p1, _) = b[b.len() - 1];
            p2 != q2 || p1 != 6 * p2
        }
        _ => false,
    }
}

/// DFA for the coding shape `0 (Σ 1 0⁺ 2 0*)*`.
pub fn mu_shape(sigma: &[Letter], mk: Markers) -> Dfa {
    let mut alphabet = sigma.to_vec();
    alphabet.extend(mk.letters());
    const DEAD: usize = 6;
    Dfa::from_fn(alphabet, 7, 0, &[5], |s, x| {
        let letter = !mk.contains(x);
        match s {
            0 if x == mk.zero => 1,
            1 | 5 if letter => 2,
            2 if x == mk.one => 3,
            3 | 4 if x == mk.zero => 4,
            4 if x == mk.two => 5,
            5 if x == mk.zero => 5,
            _ => DEAD,
        }
    })
    .expect("well-formed shape automaton")
}

/// One-counter machine for the same language. It guesses the second to
/// last block and then follows one of four branches: `P < Q`, `P > Q`,
/// `P' > 6P` or `P' < 6P`.
pub fn mu_five_machine(sigma: &[Letter], mk: Markers) -> CounterMachine {
    let mut alphabet = sigma.to_vec();
    alphabet.extend(mk.letters());
    let mut b = MachineBuilder::new(1, alphabet).lambda_chain_bound(5);
    let (zero, one, two) = (Some(mk.zero), Some(mk.one), Some(mk.two));
    let any = |_: Pattern| true;
    let pos = |p: Pattern| p.positive(0);
    let empty = |p: Pattern| !p.positive(0);
    let (inc, dec, keep) = (Delta::unit(0, 1), Delta::unit(0, -1), Delta::ZERO);

    let start = b.state("start");
    b.set_initial(start);
    let head = b.state("head");
    let f1 = b.state("f.a");
    let f2 = b.state("f.1");
    let f3 = b.state("f.P");
    let f4 = b.state("f.Q");
    b.add_where(start, zero, any, head, keep);
    b.add_where(f1, one, any, f2, keep);
    b.add_where(f2, zero, any, f3, keep);
    b.add_where(f3, zero, any, f3, keep);
    b.add_where(f3, two, any, f4, keep);
    b.add_where(f4, zero, any, f4, keep);

    // Last block, entered with counter zero and left unchanged.
    let l1 = b.state("last.a");
    let l2 = b.state("last.1");
    let l3 = b.state("last.P");
    let l4 = b.state("last.Q");
    b.add_final(l4);
    b.add_where(l1, one, any, l2, keep);
    b.add_where(l2, zero, any, l3, keep);
    b.add_where(l3, zero, any, l3, keep);
    b.add_where(l3, two, any, l4, keep);
    b.add_where(l4, zero, any, l4, keep);

    // P > Q: count part of P, skip at least one zero, then match Q exactly.
    let g1 = b.state("gt.a");
    let g2 = b.state("gt.1");
    let gi = b.state("gt.count");
    let gs = b.state("gt.skip");
    let gd = b.state("gt.Q");
    b.add_where(g1, one, any, g2, keep);
    b.add_where(g2, zero, any, gi, inc);
    b.add_where(g2, zero, any, gs, keep);
    b.add_where(gi, zero, any, gi, inc);
    b.add_where(gi, zero, any, gs, keep);
    b.add_where(gs, zero, any, gs, keep);
    b.add_where(gs, two, any, gd, keep);
    b.add_where(gd, zero, pos, gd, dec);

    // P < Q: count P, cancel it against Q, then read at least one more zero.
    let s1 = b.state("lt.a");
    let s2 = b.state("lt.1");
    let si = b.state("lt.P");
    let sd = b.state("lt.Q");
    let se = b.state("lt.extra");
    b.add_where(s1, one, any, s2, keep);
    b.add_where(s2, zero, any, si, inc);
    b.add_where(si, zero, any, si, inc);
    b.add_where(si, two, any, sd, keep);
    b.add_where(sd, zero, pos, sd, dec);
    b.add_where(sd, zero, empty, se, keep);
    b.add_where(se, zero, any, se, keep);

    // P' ≠ 6P. Every zero of P adds six, except that the machine may stop
    // short on one zero, adding less than six there and nothing afterwards.
    let y1 = b.state("six.a");
    let y2 = b.state("six.1");
    let ye = b.state("six.exact");
    let chain: Vec<usize> = (1..=5).map(|j| b.state(&format!("six.exact.{j}"))).collect();
    let stopped = b.state("six.short");
    let pending: Vec<usize> = (1..=4).map(|j| b.state(&format!("six.short.{j}"))).collect();
    b.add_where(y1, one, any, y2, keep);
    for src in [y2, ye] {
        b.add_where(src, zero, any, chain[4], inc);
        b.add_where(src, zero, any, stopped, keep);
        b.add_where(src, zero, any, stopped, inc);
        for &p in &pending {
            b.add_where(src, zero, any, p, inc);
        }
    }
    for j in (1..5).rev() {
        b.add_where(chain[j], None, any, chain[j - 1], inc);
    }
    b.add_where(chain[0], None, any, ye, inc);
    for j in (1..4).rev() {
        b.add_where(pending[j], None, any, pending[j - 1], inc);
    }
    b.add_where(pending[0], None, any, stopped, inc);
    b.add_where(stopped, zero, any, stopped, keep);
    let eq = b.state("six.exact.Q");
    let ea = b.state("six.exact.b");
    let ed = b.state("six.exact.P'");
    let eo = b.state("six.exact.over");
    b.add_where(ye, two, any, eq, keep);
    b.add_where(eq, zero, any, eq, keep);
    b.add_where(ea, one, any, ed, keep);
    b.add_where(ed, zero, pos, ed, dec);
    b.add_where(ed, zero, empty, eo, keep);
    b.add_where(eo, zero, any, eo, keep);
    b.add_where(eo, two, any, l4, keep);
    let sq = b.state("six.short.Q");
    let sa = b.state("six.short.b");
    let sd1 = b.state("six.short.P'");
    let sd2 = b.state("six.short.P'+");
    b.add_where(stopped, two, any, sq, keep);
    b.add_where(sq, zero, any, sq, keep);
    b.add_where(sa, one, any, sd1, keep);
    b.add_where(sd1, zero, pos, sd2, dec);
    b.add_where(sd2, zero, pos, sd2, dec);
    b.add_where(sd2, two, empty, l4, keep);

    for &a in sigma {
        let x = Some(a);
        for src in [head, f4] {
            for tgt in [f1, g1, s1, y1] {
                b.add_where(src, x, any, tgt, keep);
            }
        }
        b.add_where(gd, x, empty, l1, keep);
        b.add_where(se, x, empty, l1, keep);
        b.add_where(eq, x, any, ea, keep);
        b.add_where(sq, x, any, sa, keep);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letter::{alphabet, parse_word};
    use crate::machine::{accepts, validate_machine};

    #[test]
    fn oracle_examples() {
        let s = alphabet(&["a", "b"]);
        let mk = Markers::standard();
        assert!(mu_five_oracle(&parse_word("0a1020 0b102"), &s, mk));
        assert!(!mu_five_oracle(&parse_word("0a1020b1 000000 2"), &s, mk));
        assert!(!mu_five_oracle(&parse_word("0a102"), &s, mk));
    }

    #[test]
    fn machine_examples() {
        let s = alphabet(&["a", "b"]);
        let mk = Markers::standard();
        let m = mu_five_machine(&s, mk);
        assert!(validate_machine(&m).is_ok());
        assert_eq!(m.structural_lambda_depth(), Some(5));
        for (w, expect) in [
            ("0a10200b102", true),
            ("0a1020b10000002", false),
            ("0a1020b1000002", true),
            ("0a1020b100000002", true),
            ("0a102", false),
            ("", false),
        ] {
            assert_eq!(accepts(&m, &parse_word(w)).unwrap(), expect, "{w}");
        }
    }
}
