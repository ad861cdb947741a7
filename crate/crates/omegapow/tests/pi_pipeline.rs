use std::sync::Arc;
use std::time::Instant;

use omegapow::crosscheck::crosscheck;
use omegapow::diagonal::{GParams, Markers};
use omegapow::letter::{alphabet, format_word, parse_word};
use omegapow::machine::{accepts, materialize, validate_machine, CounterSystem, SharedSystem};
use omegapow::oracle::LanguageOracle;
use omegapow::pi::*;

fn script_l_oracle_for(subject: SharedSystem) -> LanguageOracle {
    let mk = markers_for(subject.as_ref());
    let shape = script_l_shape(subject.alphabet(), mk);
    let mut letters = subject.alphabet().to_vec();
    letters.extend(mk.letters());
    LanguageOracle::new(letters, "script-l", move |w| {
        script_l_oracle(subject.as_ref(), w).unwrap().is_some()
    })
    .with_prefix_viability(move |w| shape.is_viable_prefix(w))
}

#[test]
fn script_l_machine_matches_oracle() {
    for (name, m) in test_machines() {
        let t = Instant::now();
        let subject: SharedSystem = Arc::new(m);
        let machine = ScriptL::new(subject.clone()).unwrap();
        let report = crosscheck(&machine, &script_l_oracle_for(subject), 12);
        println!("{name}: {report} in {:?}", t.elapsed());
        assert!(report.agrees(), "{report}");
        let explicit = materialize(&machine, 100_000).unwrap();
        assert!(validate_machine(&explicit).is_ok());
        assert_eq!(explicit.k(), 1);
        assert!(explicit.structural_lambda_depth().unwrap() <= 5);
    }
}

#[test]
fn dp_oracle_matches_naive_oracle() {
    for (_, m) in test_machines() {
        let mk = markers_for(&m);
        let shape = script_l_shape(m.alphabet(), mk);
        let words = shape.accepted_words(10);
        assert!(!words.is_empty());
        for w in &words {
            let w = w.as_slice();
            let dp = script_l_oracle(&m, w).unwrap();
            assert_eq!(dp.is_some(), script_l_naive(&m, w).unwrap(), "{}", format_word(w));
            if let Some(wit) = dp {
                wit.check(&m).unwrap();
                assert_eq!(wit.to_word(mk), w);
            }
        }
    }
}

#[test]
fn long_members_are_accepted() {
    let m = test_machine_mixed();
    let subject: SharedSystem = Arc::new(m.clone());
    let machine = ScriptL::new(subject).unwrap();
    let mk = machine.markers();
    let p = GParams::new(1, 2).unwrap();
    for factor in ["xy", "xzy", "xuvy", "xtry", "xuvtrzy"] {
        let wits = claim2_forward(&m, &[parse_word(factor)], p).unwrap();
        let w = wits[0].to_word(mk);
        assert!(accepts(&machine, &w).unwrap(), "{factor}");
        let mut off = w.clone();
        off.push(mk.zero);
        assert!(!accepts(&machine, &off).unwrap(), "{factor}");
        assert!(script_l_oracle(&m, &off).unwrap().is_none());
    }
}

#[test]
fn mu_machine_matches_oracle() {
    let sigma = alphabet(&["a", "b"]);
    let mk = Markers::standard();
    let m = mu_five_machine(&sigma, mk);
    let shape = mu_shape(&sigma, mk);
    let s2 = sigma.clone();
    let oracle = LanguageOracle::new(m.alphabet().to_vec(), "mu", move |w| mu_five_oracle(w, &s2, mk))
        .with_prefix_viability(move |w| shape.is_viable_prefix(w));
    let t = Instant::now();
    let report = crosscheck(&m, &oracle, 12);
    println!("{report} in {:?}", t.elapsed());
    assert!(report.agrees(), "{report}");
}
