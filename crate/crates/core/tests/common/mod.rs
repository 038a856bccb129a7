#![allow(dead_code)]

use groupcoda_core::PriorityMatrix;

pub fn fixture(name: &str) -> PriorityMatrix {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let labels: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.trim().parse().unwrap()).collect())
        .collect();
    PriorityMatrix::from_raw(&rows)
        .unwrap()
        .with_labels(labels)
        .unwrap()
}

pub fn printed() -> PriorityMatrix {
    fixture("example_5dm_4c.csv")
}

pub fn precise() -> PriorityMatrix {
    fixture("example_5dm_4c_precise.csv")
}

pub fn fifteen_dms() -> PriorityMatrix {
    fixture("signed_rank_15dm.csv")
}

pub fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        assert!((g - w).abs() <= tol, "entry {k}: {g} vs {w} (tol {tol})");
    }
}
