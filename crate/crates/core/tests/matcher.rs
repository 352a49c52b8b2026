use molars::corpus::patterns::{check_many, random_case};

#[test]
fn matcher_agrees_with_exhaustive_enumeration() {
    let (failures, matched) = check_many(1_000, 100);
    assert!(failures.is_empty(), "{failures:#?}");
    assert!(matched >= 20, "only {matched} of 100 cases matched");
}

#[test]
fn nacs_are_exercised() {
    let with_nac = (1_000..1_100)
        .filter(|&s| !random_case(s).pattern.nots.is_empty())
        .count();
    assert!(with_nac >= 30, "{with_nac}");
}

#[test]
fn wider_sample_agrees() {
    let (failures, _) = check_many(50_000, 400);
    assert!(failures.is_empty(), "{failures:#?}");
}
