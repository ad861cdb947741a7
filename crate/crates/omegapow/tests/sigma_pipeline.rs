use std::sync::Arc;
use std::time::Instant;

use proptest::prelude::*;

use omegapow::crosscheck::crosscheck;
use omegapow::diagonal::{k_prefix_check, odd_part, phi_forward, vertical, DiagonalPrefix};
use omegapow::letter::{parse_word, Letter, Word};
use omegapow::diagonal::GParams;
use omegapow::machine::{accepts, validate_system, SharedSystem};
use omegapow::pi::{build_pn, claim2_forward, markers_for, reduction_encode};
use omegapow::oracle::LanguageOracle;
use omegapow::sigma::*;

fn component_oracle(c: Component) -> LanguageOracle {
    LanguageOracle::new(four(), c.name(), move |w| defn_oracle(c, w))
}

#[test]
fn components_match_definitions() {
    for c in [Component::Mu0, Component::Mu1, Component::Mu2, Component::Pi0] {
        let t = Instant::now();
        let m = component_machine(c).unwrap();
        let report = crosscheck(&m, &component_oracle(c), 8);
        println!("{report} in {:?}", t.elapsed());
        assert!(report.agrees(), "{report}");
    }
    let pi1 = pi1_machine(&has_one_machine()).unwrap();
    let oracle = LanguageOracle::new(four(), "pi1", |w| pi1_oracle(w, &has_one));
    let report = crosscheck(&pi1, &oracle, 10);
    println!("{report}");
    assert!(report.agrees(), "{report}");
    assert!(report.accepted > 0);
}

#[test]
fn low_levels_match_oracles() {
    let s1 = build_sn(1).unwrap();
    let report = crosscheck(s1.system.as_ref(), &sn_oracle(1).unwrap(), 10);
    assert!(report.agrees(), "{report}");

    let t = Instant::now();
    let s3 = build_sn(3).unwrap();
    println!("{}", s3.report());
    let sys = s3.system.as_ref();
    assert_eq!((sys.counters(), sys.real_time()), (1, true));
    assert!(validate_system(sys, 1_000_000).is_ok());
    let report = crosscheck(sys, &sn_oracle(3).unwrap(), 9);
    println!("{report} in {:?}", t.elapsed());
    assert!(report.agrees(), "{report}");
}

#[test]
fn assembled_union_over_a_counter_language() {
    // L = P3 has a counter, so the coded language needs two.
    let p3 = omegapow::pi::build_pn(3).unwrap().system;
    let a = assemble_a_system(p3.clone(), &mut Vec::new()).unwrap();
    assert_eq!(a.counters(), 2);
    let report = crosscheck(a.as_ref(), &a_machine_oracle(p3, "A(P3)"), 8);
    println!("{report}");
    assert!(report.agrees(), "{report}");
}

fn binary_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 1..=max)
        .prop_map(|b| b.into_iter().map(omegapow::diagonal::bit).collect())
}

fn letters_on_vertical(wit: &Lemma16Witness) -> Word {
    let mut complete = wit.blocks.clone();
    complete.pop();
    let alpha = phi_forward(&DiagonalPrefix { l: 0, blocks: complete }).unwrap();
    odd_part(&vertical(&alpha, 2 * wit.n))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lemma16_round_trip(
        n in 0u64..=2,
        words in prop::collection::vec(binary_word(3), 0..=3),
        seed in any::<u64>(),
    ) {
        let fill = move |x: u64| (x.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed).count_ones() % 2 == 1;
        let wit = lemma16_backward(n, &words, &fill).unwrap();
        prop_assert!(k_prefix_check(&wit.concat(), 0));
        prop_assert!(defn_oracle(Component::Pi0, &wit.factors[0]));
        for (f, w) in wit.factors[1..].iter().zip(&words) {
            let w = w.clone();
            prop_assert!(pi1_oracle(f, &move |x: &[Letter]| x == &w[..]));
        }
        let letters: Word = words.concat();
        let column = letters_on_vertical(&wit);
        prop_assert_eq!(&column[..letters.len()], &letters[..]);
        let back = lemma16_forward(&wit.factors).unwrap();
        prop_assert_eq!(back.n, n);
        prop_assert_eq!(&back.words, &words);
        prop_assert_eq!(claim2_classify(&wit.factors, &|_: &[Letter]| true).unwrap(), AInfinityCase::InK0);
    }

    #[test]
    fn shifted_tails_pass_the_prefix_check(
        n in 0u64..=2,
        words in prop::collection::vec(binary_word(3), 1..=3),
        guard in prop::sample::select(vec!["023", "0023", "323", "23002", "1023"]),
    ) {
        let wit = lemma16_backward(n, &words, &|_| false).unwrap();
        let mut factors = vec![parse_word(guard)];
        factors.extend(wit.factors[1..].iter().cloned());
        let case = claim2_classify(&factors, &|_: &[Letter]| true).unwrap();
        let AInfinityCase::Shifted { t, i, n: n2, v } = case else {
            return Err(TestCaseError::fail(format!("{case:?}")));
        };
        prop_assert!(mu_oracle(&t));
        prop_assert_eq!(n2, n);
        prop_assert_eq!(i, 0);
        prop_assert_eq!(v.len() as u64, 2 * n + 1);
        let rest: Word = factors.concat()[t.len()..].to_vec();
        prop_assert_eq!(&rest[..v.len()], &v[..]);
        prop_assert!(k_prefix_check(&rest[v.len()..], (n2 + i + 1) as u32));
    }
}

#[test]
fn classify_cases_from_the_case_analysis() {
    let has_one = |w: &[Letter]| has_one(w);
    let wit = lemma16_backward(1, &[parse_word("1"), parse_word("10"), parse_word("011")], &|x| x % 5 == 2).unwrap();

    // A coded tail alone starts the shifted case with an empty prefix.
    match claim2_classify(&wit.factors[1..], &has_one).unwrap() {
        AInfinityCase::Shifted { t, i, n, .. } => assert_eq!((t.len(), i, n), (0, 0, 1)),
        other => panic!("{other:?}"),
    }

    // A coded factor that breaks the growth pattern is absorbed into the
    // guard prefix, and the tail restarts after the next factor.
    let broken = parse_word("1300020000103000002000");
    assert!(pi1_oracle(&broken, &has_one));
    let mut fs = vec![broken.clone()];
    fs.extend(wit.factors[1..].iter().cloned());
    match claim2_classify(&fs, &has_one).unwrap() {
        AInfinityCase::Shifted { t, i, n, v } => {
            assert!(mu_oracle(&t));
            let rest = fs.concat()[t.len()..].to_vec();
            assert!(k_prefix_check(&rest[v.len()..], (n + i + 1) as u32));
        }
        other => panic!("{other:?}"),
    }

    let sys: SharedSystem = Arc::new(has_one_machine());
    assert!(assemble_a_system(sys, &mut Vec::new()).is_ok());
}

#[test]
fn level_four() {
    let t = Instant::now();
    let s4 = build_sn(4).unwrap();
    println!("{}", s4.report());
    let sys = s4.system.as_ref();
    assert_eq!((sys.counters(), sys.real_time(), sys.alphabet().len()), (1, true, 2));
    let v = validate_system(sys, 2_000_000);
    println!("explored {} states complete={} in {:?}", v.explored_states, v.complete, t.elapsed());
    assert!(v.is_ok());
    let oracle = sn_oracle(4).unwrap();
    let report = crosscheck(sys, &oracle, 12);
    println!("{report} in {:?}", t.elapsed());
    assert!(report.agrees(), "{report}");

    // Short members of A coded through the block language.
    let a = assemble_a_system(build_pn(3).unwrap().system, &mut Vec::new()).unwrap();
    for u in ["023", "323"] {
        let u = parse_word(u);
        let p = (1..=3u32)
            .find_map(|l| {
                let p = GParams::new(1, l).unwrap();
                claim2_forward(a.as_ref(), std::slice::from_ref(&u), p).ok()
            })
            .unwrap();
        let b = reduction_encode(a.as_ref(), &p[0].to_word(markers_for(a.as_ref()))).unwrap();
        assert!(accepts(sys, &b).unwrap());
        assert!(oracle.contains(&b));
        let cut = &b[..b.len() - 1];
        assert!(!accepts(sys, cut).unwrap() && !oracle.contains(cut));
        println!("member of length {} from {u:?}", b.len());
    }
}
