//! The JSON report schema is pinned against a checked-in report of a fixed
//! corpus. Regenerate with `UPDATE_GOLDEN=1 cargo test -p ndv-scout-cli --test golden`.

use std::path::Path;
use std::process::Command;

const SPEC: &str = r#"{"files": [
  {"name": "golden", "columns": [
    {"name": "id", "value_type": {"type": "INT64"}, "ndv_true": 300, "rows": 6000,
     "layout": {"kind": "uniform"}, "row_group_rows": 1000, "seed": 11},
    {"name": "label", "value_type": {"type": "STRING", "length": {"law": "uniform", "min": 2, "max": 16}},
     "ndv_true": 40, "rows": 6000, "null_fraction": 0.1, "layout": {"kind": "sorted"}, "row_group_rows": 1000, "seed": 12},
    {"name": "score", "value_type": {"type": "DOUBLE"}, "ndv_true": 5000, "rows": 6000,
     "layout": {"kind": "partitioned", "partitions": 3}, "row_group_rows": 1000, "seed": 13}]}]}"#;

#[test]
fn estimate_json_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, SPEC).unwrap();
    let bin = env!("CARGO_BIN_EXE_ndv-scout");
    let o = Command::new(bin).arg("generate").arg(&spec).arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = Command::new(bin)
        .arg("estimate")
        .arg(dir.path().join("golden.parquet"))
        .args(["--explain", "--batch-size", "65536"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let actual = String::from_utf8(o.stdout).unwrap().replace(&dir.path().display().to_string(), "<dir>");

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/estimate.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&golden).expect("golden file present");
    assert_eq!(actual, expected, "report differs from {}", golden.display());
}
