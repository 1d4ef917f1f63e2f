use bit_core::{selfcheck, Config};

#[test]
fn selfcheck_passes() {
    let results = selfcheck::run(&Config::default());
    for r in &results {
        println!("{} {} {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    assert_eq!(results.len(), 10);
    assert!(results.iter().all(|r| r.passed));
}
