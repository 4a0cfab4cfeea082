//! The genus mutation hook is process-global, so it gets a test binary of
//! its own.

use ncgenus::genus::{expected_trace_genus, set_genus_fault, TracedWordSystem};
use ncgenus::ncpoly::BasisSymbol;
use ncgenus::scalars::{MatProduct, MomentPoly};
use ncgenus::selftest::run_selftest;

#[test]
fn corrupted_genus_is_detected() {
    let sys = TracedWordSystem::from_traces(&[vec![(BasisSymbol::gue(0), MatProduct::identity()); 4]]).unwrap();
    assert_eq!(expected_trace_genus(&sys).unwrap(), MomentPoly::from_ints(&[2, 1]));

    set_genus_fault(true);
    let bad = expected_trace_genus(&sys);
    let report = run_selftest(1);
    set_genus_fault(false);

    assert_ne!(bad.ok(), Some(MomentPoly::from_ints(&[2, 1])));
    assert!(!report.pass);
    let engines = report.suites.iter().find(|s| s.name == "engine equivalence").unwrap();
    assert!(engines.failures > 0);
    assert_eq!(expected_trace_genus(&sys).unwrap(), MomentPoly::from_ints(&[2, 1]));
}
