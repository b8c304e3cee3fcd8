//! Lindblad dynamics in the symmetric sector.
//!
//! `dρ/dt = -i[H, ρ] + Σ_k rate_k (2 L_k ρ L_k† - L_k†L_k ρ - ρ L_k†L_k)`
//!
//! Photon loss uses the mode annihilators (`a_1`, `a_2` at rate γ and `b` at
//! rate β in the full model, `c` at rate γ in the reduced model).
//!
//! Atomic loss is a sum over individual atoms. On the retained states
//! (`m ≤ 1` per ensemble) it closes onto the symmetric sector:
//!
//! * `Σ_i σ_i⁻ |W⟩⟨W| σ_i⁺ = Σ_i (1/N) |G⟩⟨G| = |G⟩⟨G|`, and
//! * `Σ_i σ_i⁺ σ_i⁻ = m` (the number of excited atoms).
//!
//! So each ensemble contributes one effective jump `|m-1⟩⟨m|` with unit
//! amplitude at rate κ. The collective coupling grows as √N; the decay
//! does not.

use nalgebra::{DMatrix, DVector};

use crate::basis::{conserved_excitation, BasisState, Subspace};
use crate::config::{Model, SystemConfig};
use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::open::integrator::{Dopri5, Tolerance};
use crate::operator::{hermiticity_error, SparseOp, C64};

/// Hermitian, unit-trace, positive semidefinite operator over a subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    subspace: Subspace,
}

impl DensityMatrix {
    pub fn new(subspace: Subspace, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != subspace.dim() || matrix.ncols() != subspace.dim() {
            return Err(Error::DimensionMismatch {
                expected: subspace.dim(),
                found: matrix.nrows(),
            });
        }
        let rho = DensityMatrix { matrix, subspace };
        if rho.hermiticity_error() > 1e-10 {
            return Err(Error::Domain("density matrix is not Hermitian".into()));
        }
        if (rho.trace() - 1.0).abs() > 1e-8 {
            return Err(Error::Domain(format!(
                "density matrix trace is {}",
                rho.trace()
            )));
        }
        if rho.min_eigenvalue() < -1e-8 {
            return Err(Error::Domain(
                "density matrix has a negative eigenvalue".into(),
            ));
        }
        Ok(rho)
    }

    pub fn pure(state: &StateVector) -> Self {
        let psi = state.amplitudes();
        DensityMatrix {
            matrix: psi * psi.adjoint(),
            subspace: state.subspace().clone(),
        }
    }

    pub(crate) fn from_raw(subspace: Subspace, matrix: DMatrix<C64>) -> Self {
        DensityMatrix { matrix, subspace }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        sym.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &DVector<C64>) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }

    pub fn fidelity(&self, target: &StateVector) -> f64 {
        self.expectation(target.amplitudes())
    }

    pub fn population(&self, state: &BasisState) -> Option<f64> {
        self.subspace
            .index_of(state)
            .map(|i| self.matrix[(i, i)].re)
    }

    /// Mean total excitation number.
    pub fn mean_excitation(&self) -> f64 {
        self.subspace
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| conserved_excitation(s) as f64 * self.matrix[(i, i)].re)
            .sum()
    }

    /// Largest element coupling two different excitation sectors.
    pub fn coherence_between_sectors(&self) -> f64 {
        let states = self.subspace.states();
        let mut worst: f64 = 0.0;
        for i in 0..states.len() {
            for j in 0..states.len() {
                if conserved_excitation(&states[i]) != conserved_excitation(&states[j]) {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// A jump operator with its Lindblad rate.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub name: String,
    pub rate: f64,
    pub op: SparseOp,
}

/// Hamiltonian plus jump operators on a finite basis.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    hamiltonian: SparseOp,
    jumps: Vec<JumpOperator>,
    effective: SparseOp,
    subspace: Option<Subspace>,
}

impl LindbladGenerator {
    /// Generator on an arbitrary basis; zero-rate jumps are dropped.
    pub fn new(hamiltonian: SparseOp, jumps: Vec<JumpOperator>) -> Self {
        let jumps: Vec<JumpOperator> = jumps
            .into_iter()
            .filter(|j| j.rate > 0.0 && !j.op.is_zero())
            .collect();
        // H_eff = H - i Σ rate L†L
        let mut effective = hamiltonian.clone();
        for j in &jumps {
            for &(r, c, v) in j.op.adjoint_times_self().entries() {
                effective.push(r, c, v * C64::new(0.0, -j.rate));
            }
        }
        LindbladGenerator {
            hamiltonian,
            jumps,
            effective,
            subspace: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &SparseOp {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn subspace(&self) -> Option<&Subspace> {
        self.subspace.as_ref()
    }

    /// Writes the generator applied to a row-major `ρ` into `out`.
    pub fn apply_flat(&self, rho: &[C64], out: &mut [C64]) {
        let n = self.dim();
        out.fill(C64::new(0.0, 0.0));
        let minus_i = C64::new(0.0, -1.0);
        for &(i, k, h) in self.effective.entries() {
            let a = minus_i * h;
            let (dst, src) = (i * n, k * n);
            for j in 0..n {
                out[dst + j] += a * rho[src + j];
            }
        }
        for &(j, k, h) in self.effective.entries() {
            // -i (-ρ H_eff†): element (i, j) gains i ρ_ik conj(h_jk)
            let a = C64::new(0.0, 1.0) * h.conj();
            for i in 0..n {
                out[i * n + j] += a * rho[i * n + k];
            }
        }
        for jump in &self.jumps {
            let two_rate = 2.0 * jump.rate;
            let entries = jump.op.entries();
            for &(i, k, a) in entries {
                for &(j, l, b) in entries {
                    out[i * n + j] += a * b.conj() * rho[k * n + l] * two_rate;
                }
            }
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let n = self.dim();
        let flat = to_row_major(rho);
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        self.apply_flat(&flat, &mut out);
        from_row_major(n, &out)
    }
}

pub(crate) fn to_row_major(m: &DMatrix<C64>) -> Vec<C64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub(crate) fn from_row_major(n: usize, flat: &[C64]) -> DMatrix<C64> {
    DMatrix::from_row_slice(n, n, flat)
}

fn lowering(sub: &Subspace, lower: impl Fn(&BasisState) -> Option<(BasisState, f64)>) -> SparseOp {
    SparseOp::from_action(sub.dim(), |col| {
        lower(sub.state(col))
            .and_then(|(target, amp)| sub.index_of(&target).map(|row| (row, C64::new(amp, 0.0))))
    })
}

/// Generator for the dissipative model on the direct sum of `sectors` and
/// every sector below them (jumps only lower the excitation number).
pub fn build_generator(cfg: &SystemConfig, sectors: &[u32]) -> Result<LindbladGenerator> {
    cfg.validate()?;
    let top = *sectors
        .iter()
        .max()
        .ok_or_else(|| Error::invalid("sectors", "at least one sector is required"))?;
    if top >= 2 && !cfg.blockade {
        return Err(Error::Unsupported(
            "dissipative dynamics with two excitations needs the dipole blockade (m <= 1 per ensemble)".into(),
        ));
    }
    let all: Vec<u32> = (0..=top).collect();
    let sub = Subspace::direct_sum(cfg, &all)?;
    let h = build_hamiltonian(cfg, &sub)?;

    let atom1 = lowering(&sub, |s| match *s {
        BasisState::Full {
            n1,
            nf,
            n2,
            m1: 1,
            m2,
        } => Some((BasisState::full(n1, nf, n2, 0, m2), 1.0)),
        BasisState::Reduced { nc, m1: 1, m2 } => Some((BasisState::reduced(nc, 0, m2), 1.0)),
        _ => None,
    });
    let atom2 = lowering(&sub, |s| match *s {
        BasisState::Full {
            n1,
            nf,
            n2,
            m1,
            m2: 1,
        } => Some((BasisState::full(n1, nf, n2, m1, 0), 1.0)),
        BasisState::Reduced { nc, m1, m2: 1 } => Some((BasisState::reduced(nc, m1, 0), 1.0)),
        _ => None,
    });

    let mut jumps = Vec::new();
    match cfg.model {
        Model::Full => {
            let a1 = lowering(&sub, |s| match *s {
                BasisState::Full { n1, nf, n2, m1, m2 } if n1 > 0 => {
                    Some((BasisState::full(n1 - 1, nf, n2, m1, m2), (n1 as f64).sqrt()))
                }
                _ => None,
            });
            let a2 = lowering(&sub, |s| match *s {
                BasisState::Full { n1, nf, n2, m1, m2 } if n2 > 0 => {
                    Some((BasisState::full(n1, nf, n2 - 1, m1, m2), (n2 as f64).sqrt()))
                }
                _ => None,
            });
            let b = lowering(&sub, |s| match *s {
                BasisState::Full { n1, nf, n2, m1, m2 } if nf > 0 => {
                    Some((BasisState::full(n1, nf - 1, n2, m1, m2), (nf as f64).sqrt()))
                }
                _ => None,
            });
            jumps.push(JumpOperator {
                name: "a1".into(),
                rate: cfg.gamma,
                op: a1,
            });
            jumps.push(JumpOperator {
                name: "a2".into(),
                rate: cfg.gamma,
                op: a2,
            });
            jumps.push(JumpOperator {
                name: "b".into(),
                rate: cfg.beta,
                op: b,
            });
        }
        Model::Reduced => {
            let c = lowering(&sub, |s| match *s {
                BasisState::Reduced { nc, m1, m2 } if nc > 0 => {
                    Some((BasisState::reduced(nc - 1, m1, m2), (nc as f64).sqrt()))
                }
                _ => None,
            });
            jumps.push(JumpOperator {
                name: "c".into(),
                rate: cfg.gamma,
                op: c,
            });
        }
    }
    jumps.push(JumpOperator {
        name: "atoms1".into(),
        rate: cfg.kappa,
        op: atom1,
    });
    jumps.push(JumpOperator {
        name: "atoms2".into(),
        rate: cfg.kappa,
        op: atom2,
    });

    let mut generator = LindbladGenerator::new(h.sparse().clone(), jumps);
    generator.subspace = Some(sub);
    Ok(generator)
}

/// Step-by-step master-equation solver on a flattened density matrix.
pub(crate) struct MasterStepper<'a> {
    generator: &'a LindbladGenerator,
    stepper: Dopri5,
    state: Vec<C64>,
    time: f64,
}

impl<'a> MasterStepper<'a> {
    pub fn new(generator: &'a LindbladGenerator, rho0: &DMatrix<C64>, tol: Tolerance) -> Self {
        let n = generator.dim();
        MasterStepper {
            generator,
            stepper: Dopri5::new(n * n, tol),
            state: to_row_major(rho0),
            time: 0.0,
        }
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let generator = self.generator;
        let mut f = |y: &[C64], dy: &mut [C64]| generator.apply_flat(y, dy);
        self.stepper
            .advance(&mut f, &mut self.state, self.time, t)?;
        self.time = t;
        Ok(())
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        from_row_major(self.generator.dim(), &self.state)
    }
}

/// Solves the master equation and returns `ρ` at every grid time.
///
/// `t_grid` must be ascending and start at 0 or later.
pub fn evolve_master(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Vec<DensityMatrix>> {
    if rho0.matrix.nrows() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.matrix.nrows(),
        });
    }
    if t_grid.first().is_some_and(|&t| t < 0.0) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid(
            "t_grid",
            "times must be non-negative and ascending",
        ));
    }
    let mut stepper = MasterStepper::new(gen, &rho0.matrix, Tolerance::default());
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        stepper.advance_to(t)?;
        let rho = DensityMatrix::from_raw(rho0.subspace.clone(), stepper.matrix());
        let trace_dev = (rho.trace() - 1.0).abs();
        let herm = rho.hermiticity_error();
        if trace_dev > 1e-7 || herm > 1e-9 {
            return Err(Error::StepSize {
                t,
                reason: format!(
                    "tolerance not met (trace deviation {trace_dev:e}, hermiticity {herm:e})"
                ),
            });
        }
        out.push(rho);
    }
    Ok(out)
}
