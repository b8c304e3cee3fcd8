//! Average swap-gate fidelity versus the fiber coupling ratio `r`.

use fiberqed::{run, Model, Protocol, Scenario, SystemConfig};

fn main() -> fiberqed::Result<()> {
    println!("{:>6} {:>10} {:>8}", "r", "peak F", "tau");
    for r in [0.6, 0.9, 1.2, 1.5, 2.0] {
        let cfg = SystemConfig::symmetric(10, 1.0, r, Model::Full);
        let s = run(&Scenario::new(Protocol::swap(), cfg))?;
        println!("{r:>6.2} {:>10.6} {:>8.4}", s.peak.value, s.peak.time);
    }
    Ok(())
}
