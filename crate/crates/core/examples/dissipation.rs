//! Lindblad dynamics: compares closed and dissipative transfer peaks, then
//! follows the density matrix of a decaying single excitation.

use fiberqed::open::build_generator;
use fiberqed::{
    evolve_master, run, BasisState, DensityMatrix, Model, Protocol, Scenario, StateVector,
    SystemConfig,
};

fn main() -> fiberqed::Result<()> {
    for n in [20, 100, 1000] {
        let cfg = SystemConfig::symmetric(n, 1.0, 1.5f64.sqrt(), Model::Full);
        let closed = run(&Scenario::new(Protocol::transfer(), cfg))?;
        let lossy =
            run(&Scenario::new(Protocol::transfer(), cfg.with_rates(0.1, 0.1, 0.1)).dissipative())?;
        println!(
            "N = {n:>4}: closed peak {:.6}, dissipative peak {:.6} at tau = {:.4}",
            closed.peak.value, lossy.peak.value, lossy.peak.time
        );
    }

    let cfg = SystemConfig::symmetric(10, 1.0, 1.0, Model::Full).with_rates(0.05, 0.2, 0.2);
    let generator = build_generator(&cfg, &[1])?;
    let sub = generator
        .subspace()
        .expect("built from a configuration")
        .clone();
    let rho0 = DensityMatrix::pure(&StateVector::basis(sub, &BasisState::full(0, 0, 0, 1, 0))?);
    let times: Vec<f64> = (0..=5).map(|i| i as f64 * 2.0).collect();
    for (t, rho) in times.iter().zip(evolve_master(&generator, &rho0, &times)?) {
        println!(
            "t = {t:>4.1}: excitation {:.6}, purity {:.6}, trace {:.12}",
            rho.mean_excitation(),
            rho.purity(),
            rho.trace()
        );
    }
    Ok(())
}
