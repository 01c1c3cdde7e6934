use hyperlab::selftest;

#[test]
fn every_suite_passes() {
    let results = selftest::run(None);
    assert_eq!(results.len(), selftest::suites().len());
    for r in &results {
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).collect();
        assert!(r.pass(), "{}: {:?} {failed:?}", r.name, r.error);
    }
}
