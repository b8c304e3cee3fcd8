//! Entangling `|1,0⟩` into a Bell-type state with unequal couplings, in the
//! reduced model and in the full model at growing fiber coupling.

use std::f64::consts::SQRT_2;

use fiberqed::{run, BellTarget, Model, Protocol, Scenario, SystemConfig};

fn main() -> fiberqed::Result<()> {
    for (target, g2) in [
        (BellTarget::E1, 1.0 + SQRT_2),
        (BellTarget::E2, SQRT_2 - 1.0),
    ] {
        let mut cfg = SystemConfig::symmetric(1, 1.0, 0.0, Model::Reduced);
        cfg.g2 = g2;
        let s = run(&Scenario::new(Protocol::Entangle { target }, cfg))?;
        println!(
            "reduced, {target:?} (g2 = {g2:.4}): peak {:.9} at tau = {:.4}",
            s.peak.value, s.peak.time
        );
    }

    for r in [5.0, 10.0, 20.0, 50.0] {
        let mut cfg = SystemConfig::symmetric(1, 1.0, r, Model::Full);
        cfg.g2 = 1.0 + SQRT_2;
        let s = run(&Scenario::new(
            Protocol::Entangle {
                target: BellTarget::E1,
            },
            cfg,
        ))?;
        println!(
            "full, r = {r:>4}: peak {:.6} at tau = {:.4}",
            s.peak.value, s.peak.time
        );
    }
    Ok(())
}
