use proptest::prelude::*;

use omegapow::crosscheck::for_each_word;
use omegapow::letter::{alphabet, Letter, Word};
use omegapow::machine::accepts;
use omegapow::omega::*;
use omegapow::oracle::LanguageOracle;
use omegapow::pi::{build_pn, p_base_dfa, p_base_machine, pn_oracle};

fn bits() -> Vec<Letter> {
    alphabet(&["0", "1"])
}

fn binary_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(|b| b.into_iter().map(omegapow::diagonal::bit).collect())
}

/// Every subset of interior cuts, filtered and sorted.
fn naive_factorizations(w: &[Letter], l: &LanguageOracle) -> Vec<Vec<usize>> {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<usize>> = (0u32..1 << (n - 1))
        .map(|mask| {
            let mut cuts = vec![0];
            cuts.extend((1..n).filter(|i| mask >> (i - 1) & 1 == 1));
            cuts.push(n);
            cuts
        })
        .filter(|cuts| cuts.windows(2).all(|c| l.contains(&w[c[0]..c[1]])))
        .collect();
    out.sort();
    out
}

fn p2_viable() -> LanguageOracle {
    let one = Letter::new("1");
    pn_oracle(2)
        .unwrap()
        .with_prefix_viability(move |w| w.iter().position(|&a| a == one).is_none_or(|i| i + 1 == w.len()))
}

#[test]
fn periodic_words_over_p2() {
    let dfa = p_base_dfa(2).unwrap();
    let one = Letter::new("1");
    let mut checked = 0;
    for_each_word(&bits(), 6, |u| {
        for_each_word(&bits(), 6, |v| {
            if v.is_empty() {
                return;
            }
            let x = UPWord::new(u.to_vec(), v.to_vec()).unwrap();
            assert_eq!(up_membership_regular(&x, &dfa), v.contains(&one), "{x}");
            checked += 1;
        })
    });
    assert_eq!(checked, 127 * 126);
    let zeros = UPWord::new(vec![], alphabet(&["0"])).unwrap();
    assert!(up_membership_regular(&zeros, &p_base_dfa(1).unwrap()));
}

#[test]
fn bounded_search_agrees_with_the_exact_test() {
    let m = p_base_machine(2).unwrap();
    let dfa = p_base_dfa(2).unwrap();
    for_each_word(&bits(), 3, |u| {
        for_each_word(&bits(), 3, |v| {
            if v.is_empty() {
                return;
            }
            let x = UPWord::new(u.to_vec(), v.to_vec()).unwrap();
            match up_membership_bounded(&x, &m, 1, 16) {
                UpVerdict::Yes(l) => {
                    assert!(up_membership_regular(&x, &dfa));
                    assert!(replay_lasso(&x, &m, &l));
                }
                UpVerdict::No => assert!(!up_membership_regular(&x, &dfa)),
                UpVerdict::Unknown => panic!("finite-state search hit a cap on {x}"),
            }
        })
    });
}

#[test]
fn counter_base_lassos_replay() {
    // The shortest member of P3, repeated forever.
    let p3 = build_pn(3).unwrap().system;
    let member = omegapow::machine::enumerate_accepted(p3.as_ref(), 7)
        .into_iter()
        .next()
        .unwrap();
    let x = UPWord::new(vec![], member.clone()).unwrap();
    match up_membership_bounded(&x, p3.as_ref(), 8, 64) {
        UpVerdict::Yes(l) => {
            assert!(replay_lasso(&x, p3.as_ref(), &l));
            assert!(accepts(p3.as_ref(), &member).unwrap());
        }
        other => panic!("{other:?}"),
    }
    // A corrupted certificate does not replay.
    if let UpVerdict::Yes(mut l) = up_membership_bounded(&x, p3.as_ref(), 8, 64) {
        l.cycle.retain(|m| *m != Move::Cut);
        assert!(!replay_lasso(&x, p3.as_ref(), &l));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn factorizations_match_naive_enumeration(w in binary_word(12), limit in 1usize..50) {
        for l in [pn_oracle(2).unwrap(), pn_oracle(3).unwrap()] {
            let fast: Vec<Vec<usize>> = factorizations(&w, &l, limit).into_iter().map(|f| f.cuts).collect();
            let mut naive = naive_factorizations(&w, &l);
            naive.truncate(limit);
            prop_assert_eq!(fast, naive);
        }
    }

    #[test]
    fn prefix_witnesses_are_prefix_closed(w in binary_word(12), cut in 0usize..=12) {
        let l = p2_viable();
        if is_omega_power_prefix(&w, &l) {
            prop_assert!(is_omega_power_prefix(&w[..cut.min(w.len())], &l));
        }
        // Cutting after every 1 leaves a run of zeros, so every binary word
        // qualifies.
        prop_assert!(is_omega_power_prefix(&w, &l));
    }

    #[test]
    fn yes_verdicts_carry_replayable_lassos(u in binary_word(4), v in binary_word(4)) {
        prop_assume!(!v.is_empty());
        let x = UPWord::new(u, v).unwrap();
        let p3 = build_pn(3).unwrap().system;
        if let UpVerdict::Yes(l) = up_membership_bounded(&x, p3.as_ref(), 6, 32) {
            prop_assert!(replay_lasso(&x, p3.as_ref(), &l));
        }
    }
}
