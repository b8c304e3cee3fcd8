//! Controlled-Z fidelity in the reduced model for several coupling
//! mismatches `delta = g2 - g1`.

use fiberqed::{run, Model, Protocol, Scenario, SystemConfig};

fn main() -> fiberqed::Result<()> {
    for delta in [0.07, 0.35, 1.2] {
        let cfg = SystemConfig::symmetric(1, 1.0, 0.0, Model::Reduced).with_delta(delta);
        let s = run(&Scenario::new(Protocol::ControlledZ, cfg))?;
        println!(
            "delta = {delta:<4}: peak {:.6} at tau = {:.3}",
            s.peak.value, s.peak.time
        );
    }
    Ok(())
}
