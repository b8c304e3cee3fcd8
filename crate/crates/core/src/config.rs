//! Physical parameters of a single scenario.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which Hamiltonian the scenario is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Two cavity modes plus the fiber mode.
    Full,
    /// Only the normal mode `c` that is resonant with the atoms.
    Reduced,
}

/// Atom numbers, couplings and loss rates for one scenario.
///
/// Rates are angular frequencies in the same units as `g1`. The ratio
/// `r = nu / (sqrt(N) g1)` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n1: u32,
    pub n2: u32,
    pub g1: f64,
    pub g2: f64,
    pub nu: f64,
    /// Spontaneous emission rate of each atom.
    pub kappa: f64,
    /// Photon leakage rate of each cavity mode.
    pub gamma: f64,
    /// Photon leakage rate of the fiber mode.
    pub beta: f64,
    pub blockade: bool,
    pub model: Model,
}

impl SystemConfig {
    /// Symmetric, lossless configuration with `g1 = g2 = g` and `nu = r sqrt(n) g`.
    pub fn symmetric(n: u32, g: f64, r: f64, model: Model) -> Self {
        SystemConfig {
            n1: n,
            n2: n,
            g1: g,
            g2: g,
            nu: r * (n as f64).sqrt() * g,
            kappa: 0.0,
            gamma: 0.0,
            beta: 0.0,
            blockade: true,
            model,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.g2 = self.g1 + delta;
        self
    }

    pub fn with_rates(mut self, kappa: f64, gamma: f64, beta: f64) -> Self {
        self.kappa = kappa;
        self.gamma = gamma;
        self.beta = beta;
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 {
            return Err(Error::invalid("n1", "must be at least 1"));
        }
        if self.n2 == 0 {
            return Err(Error::invalid("n2", "must be at least 1"));
        }
        if !(self.g1 > 0.0) || !self.g1.is_finite() {
            return Err(Error::invalid("g1", "must be positive and finite"));
        }
        for (name, v) in [
            ("g2", self.g2),
            ("nu", self.nu),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("beta", self.beta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(
                    name,
                    format!("must be a finite non-negative rate, got {v}"),
                ));
            }
        }
        Ok(())
    }

    /// `sqrt(N1) g1`, the unit that turns time into the dimensionless `tau`.
    pub fn time_scale(&self) -> f64 {
        (self.n1 as f64).sqrt() * self.g1
    }

    pub fn ratio(&self) -> f64 {
        self.nu / self.time_scale()
    }

    /// Coupling asymmetry `g2 - g1`.
    pub fn delta(&self) -> f64 {
        self.g2 - self.g1
    }

    pub fn is_lossless(&self) -> bool {
        self.kappa == 0.0 && self.gamma == 0.0 && self.beta == 0.0
    }

    pub fn atoms(&self, ensemble: usize) -> u32 {
        if ensemble == 1 {
            self.n1
        } else {
            self.n2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_round_trips() {
        let cfg = SystemConfig::symmetric(16, 0.5, 1.5f64.sqrt(), Model::Full);
        assert!((cfg.ratio() - 1.5f64.sqrt()).abs() < 1e-14);
        assert!((cfg.time_scale() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_negative_rates() {
        let cfg = SystemConfig::symmetric(1, 1.0, 1.0, Model::Full).with_rates(-0.1, 0.0, 0.0);
        match cfg.validate() {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "kappa"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_zero_atoms_and_coupling() {
        let mut cfg = SystemConfig::symmetric(1, 1.0, 1.0, Model::Full);
        cfg.n2 = 0;
        assert!(cfg.validate().is_err());
        let cfg = SystemConfig::symmetric(1, 0.0, 1.0, Model::Full);
        assert!(cfg.validate().is_err());
    }
}
