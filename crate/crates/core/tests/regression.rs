use std::path::PathBuf;

use serde_json::Value;
use subshift_core::ktheory::{k0_stabilization, level_report, phi_map};
use subshift_core::matrix::rational_rank;
use subshift_core::{factors, LanguageTable, SequenceSource};

fn tm() -> LanguageTable {
    factors(&SequenceSource::thue_morse().window(4096).unwrap(), 24).unwrap()
}

/// Compares against the stored fixture; `SUBSHIFT_BLESS=1` rewrites it.
fn check_fixture(name: &str, actual: Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    if std::env::var_os("SUBSHIFT_BLESS").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
    }
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stored, actual, "fixture {name} changed");
}

#[test]
fn tm_level_two_smith_data() {
    let lang = tm();
    let report = level_report(&lang, 2).unwrap();
    let map = phi_map(&lang, 2).unwrap();
    assert_eq!(report.snf.rank, rational_rank(&map.matrix));
    assert_eq!((report.source_size, report.target_size), (4, 6));
    check_fixture("tm_level2_snf.json", serde_json::to_value(&report).unwrap());
}

#[test]
fn tm_k0_truncation_four_to_ten() {
    let lang = tm();
    let report = k0_stabilization(&lang, 4, 10).unwrap();
    assert!(report.consistent);
    for lr in &report.levels {
        let map = phi_map(&lang, lr.level).unwrap();
        assert_eq!(lr.snf.cokernel_free_rank, lr.target_size - rational_rank(&map.matrix));
    }
    check_fixture("tm_k0_4_10.json", serde_json::to_value(&report).unwrap());
}
