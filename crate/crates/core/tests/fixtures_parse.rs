use std::fs;
use std::path::Path;

use ivalue_core::bridges::consistency_transfer_check;
use ivalue_core::format::{parse, serialize, Document};
use ivalue_core::{ipr, Phase, DEFAULT_TOL};

fn load(name: &str) -> (String, Document) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    let text = fs::read_to_string(&path).unwrap();
    let doc = parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    (text, doc)
}

#[test]
fn every_fixture_is_canonical() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if !name.ends_with(".ivpr.json") {
            continue;
        }
        let (text, doc) = load(&name);
        assert_eq!(serialize(&doc), text.trim_end(), "{name}");
        count += 1;
    }
    assert!(count >= 7);
}

#[test]
fn fixture_contents() {
    let Document::IntervalMatrix(z) = load("consistent_4x4.ivpr.json").1 else { panic!() };
    let u = ipr::infer_neutral(&z);
    assert!(ipr::check_consistency(&z, u, DEFAULT_TOL).unwrap().is_consistent);

    let Document::IntervalMatrix(z) = load("perturbed_4x4.ivpr.json").1 else { panic!() };
    let u = ipr::infer_neutral(&z);
    assert!(!ipr::check_consistency(&z, u, DEFAULT_TOL).unwrap().is_consistent);

    let Document::FuzzyRelation(y) = load("fuzzy_consistent.ivpr.json").1 else { panic!() };
    assert!(y.is_additively_consistent(1e-9));
    assert!(consistency_transfer_check(&y, 1e-9));

    let Document::SaatyRelation(a) = load("saaty_3x3.ivpr.json").1 else { panic!() };
    assert!(a.is_multiplicatively_consistent(1e-9));

    let Document::Session(s) = load("session_pending.ivpr.json").1 else { panic!() };
    assert_eq!(s.phase(), Phase::ProposalPending);
    assert!((s.proposal().unwrap().alpha - 7.0 / 6.0).abs() < 1e-12);
}
