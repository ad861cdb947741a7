use std::sync::Arc;
use std::time::Instant;

use omegapow::crosscheck::crosscheck;
use omegapow::diagonal::GParams;
use omegapow::eraser::ExpSubstitute;
use omegapow::letter::parse_word;
use omegapow::machine::{accepts, enumerate_accepted, validate_machine, validate_system, SharedSystem};
use omegapow::pi::*;

#[test]
fn low_levels_match_oracles() {
    for (n, len) in [(1, 8), (2, 8), (3, 14)] {
        let t = Instant::now();
        let art = build_pn(n).unwrap();
        let report = crosscheck(art.system.as_ref(), &pn_oracle(n).unwrap(), len);
        println!("{report} in {:?}", t.elapsed());
        assert!(report.agrees(), "{report}");
    }
    let p3 = build_pn(3).unwrap();
    assert_eq!(p3.label, "real-time one-counter, FinalStateAndZero");
    assert!(validate_machine(&p3.machine(10_000).unwrap()).is_ok());
}

#[test]
fn level_four() {
    let t = Instant::now();
    let art = build_pn(4).unwrap();
    print!("{}", art.report());
    assert_eq!(art.label, "real-time one-counter, FinalStateAndZero");
    let report = validate_system(art.system.as_ref(), 2_000_000);
    println!("explored {} states complete={} in {:?}", report.explored_states, report.complete, t.elapsed());
    assert!(report.is_ok());
    let oracle = pn_oracle(4).unwrap();
    let cc = crosscheck(art.system.as_ref(), &oracle, 12);
    println!("{cc}");
    assert!(cc.agrees());

    let p3 = build_pn(3).unwrap().system;
    let subject: SharedSystem = Arc::new(ExpSubstitute::new(p3.clone()).unwrap());
    let u = enumerate_accepted(p3.as_ref(), 7).remove(0);
    assert_eq!(u, parse_word("001"));
    let wits = claim2_forward(subject.as_ref(), std::slice::from_ref(&u), GParams::new(1, 1).unwrap()).unwrap();
    let w = wits[0].to_word(markers_for(subject.as_ref()));
    let b = reduction_encode(subject.as_ref(), &w).unwrap();
    let t = Instant::now();
    assert!(accepts(art.system.as_ref(), &b).unwrap());
    assert!(oracle.contains(&b));
    let mut bad = b.clone();
    bad.truncate(b.len() - 2);
    assert!(!accepts(art.system.as_ref(), &bad).unwrap());
    assert!(!oracle.contains(&bad));
    println!("member of length {} checked in {:?}", b.len(), t.elapsed());
}
