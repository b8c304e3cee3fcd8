//! Cross-checks the symmetric-sector pipeline against an explicit
//! per-atom tensor-product simulation for a few atoms.

use fiberqed::{run, small_n_oracle, Model, Protocol, Scenario, SystemConfig};

fn main() -> fiberqed::Result<()> {
    for n in 1..=3 {
        let cfg = SystemConfig::symmetric(n, 1.0, 1.2, Model::Full).with_rates(0.05, 0.05, 0.05);
        for sc in [
            Scenario::new(Protocol::transfer(), cfg).with_grid(4.0, 0.05),
            Scenario::new(Protocol::transfer(), cfg)
                .dissipative()
                .with_grid(4.0, 0.05),
        ] {
            let fast = run(&sc)?;
            let oracle = small_n_oracle(&sc)?;
            let gap = fast
                .values
                .iter()
                .zip(&oracle.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            println!(
                "N = {n}, dissipative = {}: peak {:.9}, max gap to oracle {gap:.2e}",
                sc.dissipative, fast.peak.value
            );
        }
    }
    Ok(())
}
