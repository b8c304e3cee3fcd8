//! Interaction-picture Hamiltonians on symmetric-sector bases.
//!
//! Full model:
//! `H = Σ_j g_j (J_j⁻ a_j† + h.c.) + ν (b a_1† + b a_2† + h.c.)`.
//!
//! Reduced model, keeping only the normal mode `c = (a_1 - a_2)/√2`:
//! `H = (g_1 J_1⁻ c† - g_2 J_2⁻ c† + h.c.) / √2`.
//!
//! The collective lowering operator takes the Dicke state `|m, N-m⟩` to
//! `|m-1, N-m+1⟩` with amplitude `√(m (N - m + 1))`.

use nalgebra::DMatrix;

use crate::basis::{BasisState, Subspace};
use crate::config::{Model, SystemConfig};
use crate::error::{Error, Result};
use crate::operator::{hermiticity_error, SparseOp, C64};

/// Dense Hermitian matrix tied to the subspace it acts on.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    matrix: DMatrix<C64>,
    sparse: SparseOp,
    subspace: Subspace,
}

impl HermitianMatrix {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn sparse(&self) -> &SparseOp {
        &self.sparse
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix element `⟨row|H|col⟩` looked up by basis label.
    pub fn element(&self, row: &BasisState, col: &BasisState) -> Option<C64> {
        let r = self.subspace.index_of(row)?;
        let c = self.subspace.index_of(col)?;
        Some(self.matrix[(r, c)])
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }
}

/// `√(m (N - m + 1))`, the collective lowering amplitude out of `|m, N-m⟩`.
pub fn dicke_lowering(m: u8, atoms: u32) -> f64 {
    let m = m as f64;
    (m * (atoms as f64 - m + 1.0)).max(0.0).sqrt()
}

fn check_dicke_capacity(cfg: &SystemConfig, sub: &Subspace) -> Result<()> {
    for s in sub.states() {
        let (m1, m2) = s.atoms();
        if m1 as u32 > cfg.n1 || m2 as u32 > cfg.n2 {
            return Err(Error::InconsistentBasis(format!(
                "state {s} needs more excited atoms than the ensemble holds (n1 = {}, n2 = {})",
                cfg.n1, cfg.n2
            )));
        }
    }
    Ok(())
}

fn assemble(
    sub: &Subspace,
    lower: impl Fn(&BasisState) -> Vec<(BasisState, f64)>,
) -> HermitianMatrix {
    // `lower` yields the excitation-moving half of H; adding its adjoint
    // produces the full Hermitian operator.
    let half = SparseOp::from_action(sub.dim(), |col| {
        lower(sub.state(col))
            .into_iter()
            .filter_map(|(target, amp)| sub.index_of(&target).map(|row| (row, C64::new(amp, 0.0))))
            .collect::<Vec<_>>()
    });
    let sparse = half.plus_adjoint();
    HermitianMatrix {
        matrix: sparse.to_dense(),
        sparse,
        subspace: sub.clone(),
    }
}

pub fn build_full_hamiltonian(cfg: &SystemConfig, sub: &Subspace) -> Result<HermitianMatrix> {
    if sub.model() != Model::Full {
        return Err(Error::ModelMismatch {
            expected: Model::Full,
            found: sub.model(),
        });
    }
    check_dicke_capacity(cfg, sub)?;
    let cfg = *cfg;
    Ok(assemble(sub, move |s| {
        let BasisState::Full { n1, nf, n2, m1, m2 } = *s else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(4);
        if m1 > 0 {
            let amp = cfg.g1 * dicke_lowering(m1, cfg.n1) * ((n1 + 1) as f64).sqrt();
            out.push((BasisState::full(n1 + 1, nf, n2, m1 - 1, m2), amp));
        }
        if m2 > 0 {
            let amp = cfg.g2 * dicke_lowering(m2, cfg.n2) * ((n2 + 1) as f64).sqrt();
            out.push((BasisState::full(n1, nf, n2 + 1, m1, m2 - 1), amp));
        }
        if nf > 0 {
            let fiber = (nf as f64).sqrt();
            out.push((
                BasisState::full(n1 + 1, nf - 1, n2, m1, m2),
                cfg.nu * fiber * ((n1 + 1) as f64).sqrt(),
            ));
            out.push((
                BasisState::full(n1, nf - 1, n2 + 1, m1, m2),
                cfg.nu * fiber * ((n2 + 1) as f64).sqrt(),
            ));
        }
        out
    }))
}

pub fn build_reduced_hamiltonian(cfg: &SystemConfig, sub: &Subspace) -> Result<HermitianMatrix> {
    if sub.model() != Model::Reduced {
        return Err(Error::ModelMismatch {
            expected: Model::Reduced,
            found: sub.model(),
        });
    }
    check_dicke_capacity(cfg, sub)?;
    let cfg = *cfg;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    Ok(assemble(sub, move |s| {
        let BasisState::Reduced { nc, m1, m2 } = *s else {
            return Vec::new();
        };
        let photon = ((nc + 1) as f64).sqrt();
        let mut out = Vec::with_capacity(2);
        if m1 > 0 {
            let amp = inv_sqrt2 * cfg.g1 * dicke_lowering(m1, cfg.n1) * photon;
            out.push((BasisState::reduced(nc + 1, m1 - 1, m2), amp));
        }
        if m2 > 0 {
            let amp = -inv_sqrt2 * cfg.g2 * dicke_lowering(m2, cfg.n2) * photon;
            out.push((BasisState::reduced(nc + 1, m1, m2 - 1), amp));
        }
        out
    }))
}

/// Dispatches on the subspace's model.
pub fn build_hamiltonian(cfg: &SystemConfig, sub: &Subspace) -> Result<HermitianMatrix> {
    match sub.model() {
        Model::Full => build_full_hamiltonian(cfg, sub),
        Model::Reduced => build_reduced_hamiltonian(cfg, sub),
    }
}

/// Closed-form eigensystem of the single-excitation transfer problem
/// (`g1 = g2 = g`, `N1 = N2 = N`).
///
/// Rows of `s` are the eigenvectors, so `S H Sᵀ = diag(energies)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpectrum {
    pub energies: [f64; 5],
    pub s: [[f64; 5]; 5],
}

impl AnalyticSpectrum {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(5, 5, |i, j| self.s[i][j])
    }

    /// Largest deviation of `S H Sᵀ` from `diag(energies)`.
    pub fn diagonalization_error(&self, h: &HermitianMatrix) -> f64 {
        let s = self.matrix().map(|x| C64::new(x, 0.0));
        let d = &s * h.matrix() * s.transpose();
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let target = if i == j { self.energies[i] } else { 0.0 };
                worst = worst.max((d[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest deviation of `S Sᵀ` from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        let s = self.matrix();
        let p = &s * s.transpose();
        (p - DMatrix::identity(5, 5)).abs().max()
    }
}

pub fn analytic_spectrum(cfg: &SystemConfig) -> Result<AnalyticSpectrum> {
    if cfg.g1 != cfg.g2 {
        return Err(Error::Unsupported(
            "the closed-form spectrum requires g1 = g2".into(),
        ));
    }
    if cfg.n1 != cfg.n2 {
        return Err(Error::Unsupported(
            "the closed-form spectrum requires N1 = N2".into(),
        ));
    }
    let rabi = cfg.time_scale();
    let r = cfg.ratio();
    let w = (1.0 + 2.0 * r * r).sqrt();
    let energies = [0.0, -rabi, rabi, -rabi * w, rabi * w];
    let s = [
        [-r / w, -r / w, 0.0, 1.0 / w, 0.0],
        [0.5, -0.5, -0.5, 0.0, 0.5],
        [-0.5, 0.5, -0.5, 0.0, 0.5],
        [-0.5 / w, -0.5 / w, 0.5, -r / w, 0.5],
        [0.5 / w, 0.5 / w, 0.5, r / w, 0.5],
    ];
    Ok(AnalyticSpectrum { energies, s })
}

/// Coupling ratio `r = √((4k² - 1)/2)` for which the single excitation is
/// transferred exactly at `τ = π`.
pub fn transfer_condition(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("transfer condition needs k >= 1".into()));
    }
    let k = k as f64;
    Ok(((4.0 * k * k - 1.0) / 2.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;

    fn full(n: u32, g: f64, r: f64, excitation: u32) -> HermitianMatrix {
        let cfg = SystemConfig::symmetric(n, g, r, Model::Full);
        build_full_hamiltonian(&cfg, &enumerate_basis(&cfg, excitation).unwrap()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn single_excitation_matrix_is_the_published_one() {
        let (n, g, nu) = (4u32, 0.7, 1.3);
        let mut cfg = SystemConfig::symmetric(n, g, 0.0, Model::Full);
        cfg.nu = nu;
        let h = build_full_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        let a = (n as f64).sqrt() * g;
        let expected = [
            [0.0, 0.0, a, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, a],
            [a, 0.0, 0.0, nu, 0.0],
            [0.0, 0.0, nu, 0.0, nu],
            [0.0, a, 0.0, nu, 0.0],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert!((h.matrix()[(i, j)] - C64::new(expected[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn spectrum_with_integer_eigenvalues() {
        let h = full(4, 1.0, 6f64.sqrt() / 2.0, 1);
        assert_close(&h.eigenvalues(), &[-4.0, -2.0, 0.0, 2.0, 4.0], 1e-12);
    }

    #[test]
    fn zero_fiber_coupling_decouples_fiber_photon() {
        let h = full(3, 1.0, 0.0, 1);
        let fiber = h
            .subspace()
            .index_of(&BasisState::full(0, 1, 0, 0, 0))
            .unwrap();
        for j in 0..5 {
            assert_eq!(h.matrix()[(fiber, j)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn asymmetric_couplings_land_on_the_right_ensembles() {
        let cfg = SystemConfig::symmetric(9, 1.0, 1.0, Model::Full).with_delta(0.5);
        let h = build_full_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        let m = h.matrix();
        assert!((m[(1, 4)].re - 3.0 * 1.0).abs() < 1e-14);
        assert!((m[(0, 2)].re - 3.0 * 1.5).abs() < 1e-14);
    }

    #[test]
    fn two_excitation_full_matrix_is_hermitian_and_block_local() {
        let h = full(1, 1.0, 1.0, 2);
        assert_eq!(h.dim(), 13);
        assert!(h.hermiticity_error() < 1e-12);
    }

    #[test]
    fn unblockaded_single_atom_pair_is_inconsistent() {
        let mut cfg = SystemConfig::symmetric(1, 1.0, 1.0, Model::Full);
        cfg.blockade = false;
        let sub = enumerate_basis(&cfg, 2).unwrap();
        assert!(matches!(
            build_full_hamiltonian(&cfg, &sub),
            Err(Error::InconsistentBasis(_))
        ));
        cfg.n1 = 3;
        cfg.n2 = 3;
        let h = build_full_hamiltonian(&cfg, &sub).unwrap();
        let double = BasisState::full(0, 0, 0, 2, 0);
        let single = BasisState::full(1, 0, 0, 1, 0);
        let amp = h.element(&single, &double).unwrap().re;
        assert!((amp - (2.0f64 * 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn model_mismatch_is_reported() {
        let cfg = SystemConfig::symmetric(1, 1.0, 1.0, Model::Reduced);
        let sub = enumerate_basis(&cfg, 1).unwrap();
        assert!(matches!(
            build_full_hamiltonian(&cfg, &sub),
            Err(Error::ModelMismatch { .. })
        ));
        let cfg = cfg.with_model(Model::Full);
        let sub = enumerate_basis(&cfg, 1).unwrap();
        assert!(matches!(
            build_reduced_hamiltonian(&cfg, &sub),
            Err(Error::ModelMismatch { .. })
        ));
    }

    #[test]
    fn reduced_single_excitation_elements() {
        let cfg = SystemConfig::symmetric(4, 1.0, 0.0, Model::Reduced).with_delta(0.5);
        let h = build_reduced_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        let photon = BasisState::reduced(1, 0, 0);
        let e1 = h
            .element(&photon, &BasisState::reduced(0, 1, 0))
            .unwrap()
            .re;
        let e2 = h
            .element(&photon, &BasisState::reduced(0, 0, 1))
            .unwrap()
            .re;
        assert!((e1 - 2.0 / s2).abs() < 1e-14);
        assert!((e2 + 2.0 * 1.5 / s2).abs() < 1e-14);
    }

    #[test]
    fn reduced_equal_couplings_spectrum() {
        let cfg = SystemConfig::symmetric(9, 0.4, 0.0, Model::Reduced);
        let h = build_reduced_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        assert_close(&h.eigenvalues(), &[-1.2, 0.0, 1.2], 1e-12);
    }

    #[test]
    fn reduced_zero_g2_decouples_second_ensemble() {
        let mut cfg = SystemConfig::symmetric(2, 1.0, 0.0, Model::Reduced);
        cfg.g2 = 0.0;
        let h = build_reduced_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        for j in 0..3 {
            assert_eq!(h.matrix()[(0, j)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn reduced_two_photon_element_carries_sqrt_two() {
        let cfg = SystemConfig::symmetric(5, 1.0, 0.0, Model::Reduced).with_delta(0.2);
        let h = build_reduced_hamiltonian(&cfg, &enumerate_basis(&cfg, 2).unwrap()).unwrap();
        let two = BasisState::reduced(2, 0, 0);
        let v = h.element(&two, &BasisState::reduced(1, 0, 1)).unwrap().re;
        assert!((v + 5f64.sqrt() * 1.2).abs() < 1e-13);
        let v = h.element(&two, &BasisState::reduced(1, 1, 0)).unwrap().re;
        assert!((v - 5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn transfer_condition_values() {
        assert!((transfer_condition(1).unwrap() - 1.224744871391589).abs() < 1e-12);
        assert!((transfer_condition(2).unwrap() - 2.7386127875258306).abs() < 1e-12);
        assert!(matches!(transfer_condition(0), Err(Error::Domain(_))));
    }

    #[test]
    fn analytic_spectrum_at_first_condition() {
        let cfg = SystemConfig::symmetric(9, 1.0, transfer_condition(1).unwrap(), Model::Full);
        let spec = analytic_spectrum(&cfg).unwrap();
        assert!((spec.energies[3] + 6.0).abs() < 1e-12);
        assert!((spec.energies[4] - 6.0).abs() < 1e-12);
        let h = build_full_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        assert!(spec.diagonalization_error(&h) < 1e-12);
        assert!(spec.orthogonality_error() < 1e-12);
    }

    #[test]
    fn analytic_spectrum_without_fiber() {
        let cfg = SystemConfig::symmetric(2, 1.0, 0.0, Model::Full);
        let spec = analytic_spectrum(&cfg).unwrap();
        assert_eq!(spec.s[1], [0.5, -0.5, -0.5, 0.0, 0.5]);
        assert_eq!(spec.s[2], [-0.5, 0.5, -0.5, 0.0, 0.5]);
        let h = build_full_hamiltonian(&cfg, &enumerate_basis(&cfg, 1).unwrap()).unwrap();
        assert!(spec.diagonalization_error(&h) < 1e-12);
    }

    #[test]
    fn analytic_spectrum_requires_equal_couplings() {
        let cfg = SystemConfig::symmetric(2, 1.0, 1.0, Model::Full).with_delta(0.1);
        assert!(matches!(
            analytic_spectrum(&cfg),
            Err(Error::Unsupported(_))
        ));
    }
}
