//! Transfers `(|0⟩ + |1⟩)/√2` from ensemble 1 to ensemble 2 through the
//! fiber, at and away from the perfect-transfer coupling.

use std::f64::consts::PI;

use fiberqed::{run, transfer_condition, Model, Protocol, Scenario, SystemConfig};

fn main() -> fiberqed::Result<()> {
    let n = 100;
    for k in 1..=3 {
        let r = transfer_condition(k)?;
        let cfg = SystemConfig::symmetric(n, 1.0, r, Model::Full);
        let series = run(&Scenario::new(Protocol::transfer(), cfg))?;
        // A grid whose step equals its stop samples exactly {0, pi}.
        let at_pi = run(&Scenario::new(Protocol::transfer(), cfg).with_grid(PI, PI))?.values[1];
        println!(
            "k = {k}: r = {r:.4}, F(pi) = {at_pi:.12}, peak {:.9} at tau = {:.4}",
            series.peak.value, series.peak.time
        );
    }

    let detuned = SystemConfig::symmetric(n, 1.0, 0.8, Model::Full);
    let series = run(&Scenario::new(Protocol::transfer(), detuned))?;
    println!(
        "r = 0.8 (off condition): peak {:.6} at tau = {:.4}",
        series.peak.value, series.peak.time
    );
    Ok(())
}
