//! Closed-system propagation and the closed-form amplitudes it is checked against.

use nalgebra::{DMatrix, DVector};

use crate::basis::{BasisState, Subspace};
use crate::error::{Error, Result};
use crate::hamiltonian::HermitianMatrix;
use crate::operator::C64;

/// Normalized amplitude vector over a subspace (or direct sum of sectors).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    subspace: Subspace,
}

impl StateVector {
    pub fn new(subspace: Subspace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != subspace.dim() {
            return Err(Error::DimensionMismatch {
                expected: subspace.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "state vector norm is {norm}, expected 1"
            )));
        }
        Ok(StateVector {
            amplitudes,
            subspace,
        })
    }

    /// Unit vector on one basis label.
    pub fn basis(subspace: Subspace, state: &BasisState) -> Result<Self> {
        let index = subspace
            .index_of(state)
            .ok_or_else(|| Error::InconsistentBasis(format!("{state} is not in the subspace")))?;
        let mut amplitudes = DVector::zeros(subspace.dim());
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(StateVector {
            amplitudes,
            subspace,
        })
    }

    /// Normalized superposition of basis labels.
    pub fn superposition(subspace: Subspace, terms: &[(BasisState, C64)]) -> Result<Self> {
        let mut amplitudes = DVector::zeros(subspace.dim());
        for (state, amp) in terms {
            let index = subspace.index_of(state).ok_or_else(|| {
                Error::InconsistentBasis(format!("{state} is not in the subspace"))
            })?;
            amplitudes[index] += *amp;
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::Domain("superposition has zero norm".into()));
        }
        amplitudes /= C64::new(norm, 0.0);
        Ok(StateVector {
            amplitudes,
            subspace,
        })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn amplitude(&self, state: &BasisState) -> Option<C64> {
        self.subspace.index_of(state).map(|i| self.amplitudes[i])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }
}

/// Cached eigendecomposition `H = V diag(E) V†` for repeated propagation.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &DMatrix<C64>) -> Self {
        let eig = h.clone().symmetric_eigen();
        Propagator {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn from_hamiltonian(h: &HermitianMatrix) -> Self {
        Propagator::new(h.matrix())
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Coefficients of `psi` in the eigenbasis; feed them to [`Self::evolve_coefficients`].
    pub fn coefficients(&self, psi: &DVector<C64>) -> DVector<C64> {
        self.vectors.adjoint() * psi
    }

    pub fn evolve_coefficients(&self, coefficients: &DVector<C64>, t: f64) -> DVector<C64> {
        let phased = DVector::from_iterator(
            coefficients.len(),
            coefficients
                .iter()
                .zip(self.energies.iter())
                .map(|(c, e)| c * C64::from_polar(1.0, -e * t)),
        );
        &self.vectors * phased
    }

    /// `exp(-i H t) psi`.
    pub fn apply(&self, psi: &DVector<C64>, t: f64) -> DVector<C64> {
        self.evolve_coefficients(&self.coefficients(psi), t)
    }

    /// `exp(-i H t)` as a dense matrix.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let phases = DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|e| C64::from_polar(1.0, -e * t)),
        );
        &self.vectors * DMatrix::from_diagonal(&phases) * self.vectors.adjoint()
    }
}

/// `exp(-i H t) psi0` by exact eigendecomposition; any real `t`.
pub fn propagate(h: &HermitianMatrix, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if h.dim() != psi0.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.amplitudes.len(),
        });
    }
    let amplitudes = Propagator::from_hamiltonian(h).apply(&psi0.amplitudes, t);
    Ok(StateVector {
        amplitudes,
        subspace: psi0.subspace.clone(),
    })
}

/// Closed-form amplitudes on the full single-excitation basis for an
/// excitation starting in ensemble 1 (`C(0) = (0,1,0,0,0)`), with
/// `g1 = g2`, `r = ν/(√N g)` and `τ = √N g t`.
///
/// Basis order matches [`crate::enumerate_basis`] for one excitation:
/// `(|m2 = 1⟩, |m1 = 1⟩, |a2⟩, |b⟩, |a1⟩)`. The photonic amplitudes carry the
/// phase of `exp(-iHt)`, so at short times `C_a1 ≈ -iτ`.
pub fn transfer_amplitudes(r: f64, tau: f64) -> [C64; 5] {
    let w2 = 1.0 + 2.0 * r * r;
    let w = w2.sqrt();
    let (c, s) = (tau.cos(), tau.sin());
    let (cw, sw) = ((w * tau).cos(), (w * tau).sin());
    [
        C64::new(r * r / w2 - 0.5 * c + cw / (2.0 * w2), 0.0),
        C64::new(r * r / w2 + 0.5 * c + cw / (2.0 * w2), 0.0),
        C64::new(0.0, 0.5 * s - sw / (2.0 * w)),
        C64::new(-r / w2 + r * cw / w2, 0.0),
        C64::new(0.0, -0.5 * s - sw / (2.0 * w)),
    ]
}

/// Which ensemble holds the single excitation at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    First,
    Second,
}

/// Closed-form amplitudes on the reduced single-excitation basis
/// `(|0,1⟩, |1,0⟩, |1⟩_c)` under the reduced Hamiltonian (minus sign on `g2`).
///
/// With `Ω = √(N (g1² + g2²)/2)` and the excitation starting in ensemble 1:
/// `C = (g1 g2 (1 - cos Ωt), g2² + g1² cos Ωt, -i g1 √(g1²+g2²) sin Ωt) / (g1² + g2²)`.
/// Starting in ensemble 2 exchanges the roles and flips the photon phase:
/// `C = (g1² + g2² cos Ωt, g1 g2 (1 - cos Ωt), i g2 √(g1²+g2²) sin Ωt) / (g1² + g2²)`.
pub fn entangle_amplitudes(g1: f64, g2: f64, atoms: u32, t: f64, start: Ensemble) -> [C64; 3] {
    let sum = g1 * g1 + g2 * g2;
    let omega = (atoms as f64 * sum / 2.0).sqrt();
    let (c, s) = ((omega * t).cos(), (omega * t).sin());
    let mixed = g1 * g2 * (1.0 - c) / sum;
    match start {
        Ensemble::First => [
            C64::new(mixed, 0.0),
            C64::new((g2 * g2 + g1 * g1 * c) / sum, 0.0),
            C64::new(0.0, -g1 * s / sum.sqrt()),
        ],
        Ensemble::Second => [
            C64::new((g1 * g1 + g2 * g2 * c) / sum, 0.0),
            C64::new(mixed, 0.0),
            C64::new(0.0, g2 * s / sum.sqrt()),
        ],
    }
}
