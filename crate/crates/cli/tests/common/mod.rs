#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};

use qap_core::{Matrix, QapInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random instance with entries in `0..max` and a zero diagonal.
pub fn random_instance(n: usize, seed: u64, max: i64) -> QapInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut square = || {
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    data[i * n + j] = rng.random_range(0..max);
                }
            }
        }
        Matrix::from_row_major(n, data).unwrap()
    };
    let f = square();
    let d = square();
    QapInstance::new(f, d).unwrap()
}

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
}

/// Writes `inst` as a QAPLIB file named `{name}.dat` under `dir`.
pub fn write_instance(dir: &Path, name: &str, inst: &QapInstance) -> PathBuf {
    let path = dir.join(format!("{name}.dat"));
    std::fs::write(&path, inst.to_qaplib()).unwrap();
    path
}

/// Prints a verdict line that bypasses test output capture, then asserts.
pub fn verdict(label: &str, ok: bool, detail: impl AsRef<str>) {
    let line = format!(
        "{} {label}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    assert!(ok, "{line}");
}
