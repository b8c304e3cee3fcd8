#![allow(dead_code)]

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Prints one verdict line straight to stderr (bypassing the test harness's
/// output capture) and fails the test if the criterion did not hold.
pub fn verdict(id: &str, what: &str, ok: bool, detail: impl AsRef<str>) {
    let line = format!(
        "{} criterion {id}: {what} [{}]\n",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {what} [{}]", detail.as_ref());
}

/// `exp(-i H t) psi` by a scaled Taylor series, independent of any
/// eigendecomposition.
pub fn taylor_evolve(h: &DMatrix<C64>, psi: &DVector<C64>, t: f64) -> DVector<C64> {
    let norm: f64 = h.iter().map(|x| x.norm()).sum::<f64>().max(1e-300);
    let steps = ((norm * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let a = h * C64::new(0.0, -dt);
    let mut out = psi.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..30 {
            term = &a * term / C64::new(k as f64, 0.0);
            acc += &term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        out = acc;
    }
    out
}
