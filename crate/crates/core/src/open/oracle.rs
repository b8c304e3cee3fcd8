//! Brute-force reference model with every atom kept individually.
//!
//! Each ensemble is a register of `N ≤ 3` two-level atoms, each field mode a
//! Fock space truncated at two photons. Nothing here uses Dicke states or
//! collective operators: the coupling is `Σ_i g σ_i⁻ a† + h.c.` and atomic
//! loss is one jump `σ_i⁻` per atom. The space is cut to the excitation
//! numbers the protocol can reach (exact, since `H` conserves them and
//! jumps lower them) and, with the blockade on, to at most one excited atom
//! per ensemble.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::basis::BasisState;
use crate::config::Model;
use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::open::integrator::Tolerance;
use crate::open::lindblad::{JumpOperator, LindbladGenerator, MasterStepper};
use crate::operator::{SparseOp, C64};
use crate::protocols::{
    protocol_terms, realize_terms, Dynamics, FidelityProblem, FidelitySeries, Scenario,
};

/// Largest ensemble the oracle accepts.
pub const MAX_ORACLE_ATOMS: u32 = 3;

const MAX_PHOTONS: u8 = 2;

/// One product state: excited-atom bit masks and photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Product {
    atoms: [u8; 2],
    /// Full model: cavity 1, fiber, cavity 2. Reduced model: `c`, 0, 0.
    modes: [u8; 3],
}

impl Product {
    fn excitation(&self) -> u32 {
        self.atoms[0].count_ones()
            + self.atoms[1].count_ones()
            + self.modes.iter().map(|&n| n as u32).sum::<u32>()
    }
}

struct TensorSpace {
    states: Vec<Product>,
    index: HashMap<Product, usize>,
    atoms: [u32; 2],
}

impl TensorSpace {
    fn new(atoms: [u32; 2], model: Model, max_excitation: u32, blockade: bool) -> Self {
        let mode_count = match model {
            Model::Full => 3,
            Model::Reduced => 1,
        };
        let mut states = Vec::new();
        for a1 in 0..(1u8 << atoms[0]) {
            for a2 in 0..(1u8 << atoms[1]) {
                if blockade && (a1.count_ones() > 1 || a2.count_ones() > 1) {
                    continue;
                }
                for n1 in 0..=MAX_PHOTONS {
                    for nf in 0..=MAX_PHOTONS {
                        for n2 in 0..=MAX_PHOTONS {
                            let modes = [n1, nf, n2];
                            if modes[mode_count..].iter().any(|&n| n > 0) {
                                continue;
                            }
                            let p = Product {
                                atoms: [a1, a2],
                                modes,
                            };
                            if p.excitation() <= max_excitation {
                                states.push(p);
                            }
                        }
                    }
                }
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        TensorSpace {
            states,
            index,
            atoms,
        }
    }

    fn dim(&self) -> usize {
        self.states.len()
    }

    /// Operator from a per-state action; targets outside the space are dropped.
    fn operator(&self, action: impl Fn(&Product) -> Vec<(Product, f64)>) -> SparseOp {
        SparseOp::from_action(self.dim(), |col| {
            action(&self.states[col])
                .into_iter()
                .filter_map(|(p, amp)| self.index.get(&p).map(|&row| (row, C64::new(amp, 0.0))))
                .collect::<Vec<_>>()
        })
    }

    /// Symmetric Dicke label written out on individual atoms.
    fn embed(&self, label: &BasisState) -> Result<DVector<C64>> {
        let (m, modes) = match *label {
            BasisState::Full { n1, nf, n2, m1, m2 } => ([m1, m2], [n1, nf, n2]),
            BasisState::Reduced { nc, m1, m2 } => ([m1, m2], [nc, 0, 0]),
        };
        let masks = |e: usize| -> Vec<u8> {
            (0..(1u8 << self.atoms[e]))
                .filter(|mask| mask.count_ones() == m[e] as u32)
                .collect()
        };
        let (first, second) = (masks(0), masks(1));
        if first.is_empty() || second.is_empty() {
            return Err(Error::InconsistentBasis(format!(
                "{label} does not fit the ensembles"
            )));
        }
        let amp = 1.0 / ((first.len() * second.len()) as f64).sqrt();
        let mut v = DVector::zeros(self.dim());
        for &a1 in &first {
            for &a2 in &second {
                let p = Product {
                    atoms: [a1, a2],
                    modes,
                };
                let i = self.index.get(&p).ok_or_else(|| {
                    Error::InconsistentBasis(format!("{label} lies outside the oracle space"))
                })?;
                v[*i] = C64::new(amp, 0.0);
            }
        }
        Ok(v)
    }
}

fn check_atoms(n: u32) -> Result<()> {
    if n > MAX_ORACLE_ATOMS {
        return Err(Error::OracleRefused(format!(
            "{n} atoms per ensemble; the tensor-product oracle is limited to {MAX_ORACLE_ATOMS}"
        )));
    }
    Ok(())
}

fn lower_atom(p: &Product, ensemble: usize, atom: u32) -> Option<Product> {
    let bit = 1u8 << atom;
    (p.atoms[ensemble] & bit != 0).then(|| {
        let mut q = *p;
        q.atoms[ensemble] &= !bit;
        q
    })
}

fn lower_mode(p: &Product, mode: usize) -> Option<(Product, f64)> {
    (p.modes[mode] > 0).then(|| {
        let mut q = *p;
        q.modes[mode] -= 1;
        (q, (p.modes[mode] as f64).sqrt())
    })
}

fn raise_mode(p: &Product, mode: usize) -> (Product, f64) {
    let mut q = *p;
    q.modes[mode] += 1;
    (q, (q.modes[mode] as f64).sqrt())
}

/// Runs a scenario in the explicit per-atom space and returns the same
/// fidelity series as [`crate::protocols::run`].
pub fn small_n_oracle(sc: &Scenario) -> Result<FidelitySeries> {
    sc.validate()?;
    let cfg = sc.system;
    check_atoms(cfg.n1)?;
    check_atoms(cfg.n2)?;
    let space = TensorSpace::new(
        [cfg.n1, cfg.n2],
        cfg.model,
        sc.protocol.max_sector(),
        cfg.blockade,
    );
    let g = [cfg.g1, cfg.g2];

    // Excitation-lowering half of H: σ_i⁻ a†, and the fiber hopping b a_j†.
    let half = space.operator(|p| {
        let mut out = Vec::new();
        for e in 0..2 {
            for atom in 0..space.atoms[e] {
                let Some(q) = lower_atom(p, e, atom) else {
                    continue;
                };
                match cfg.model {
                    Model::Full => {
                        let (q, amp) = raise_mode(&q, 2 * e);
                        out.push((q, g[e] * amp));
                    }
                    Model::Reduced => {
                        let sign = if e == 0 { 1.0 } else { -1.0 };
                        let (q, amp) = raise_mode(&q, 0);
                        out.push((q, sign * std::f64::consts::FRAC_1_SQRT_2 * g[e] * amp));
                    }
                }
            }
        }
        if cfg.model == Model::Full {
            if let Some((q, fiber)) = lower_mode(p, 1) {
                for cavity in [0, 2] {
                    let (r, amp) = raise_mode(&q, cavity);
                    out.push((r, cfg.nu * fiber * amp));
                }
            }
        }
        out
    });
    let hamiltonian = half.plus_adjoint();

    let terms = realize_terms(
        &protocol_terms(&sc.protocol, cfg.model),
        space.dim(),
        &|s| space.embed(s),
    )?;
    let dynamics = if sc.dissipative {
        let mut jumps = Vec::new();
        let modes: &[(usize, &str, f64)] = match cfg.model {
            Model::Full => &[
                (0, "a1", cfg.gamma),
                (1, "b", cfg.beta),
                (2, "a2", cfg.gamma),
            ],
            Model::Reduced => &[(0, "c", cfg.gamma)],
        };
        for &(mode, name, rate) in modes {
            jumps.push(JumpOperator {
                name: name.into(),
                rate,
                op: space.operator(|p| lower_mode(p, mode).into_iter().collect()),
            });
        }
        for e in 0..2 {
            for atom in 0..space.atoms[e] {
                jumps.push(JumpOperator {
                    name: format!("atom{}_{atom}", e + 1),
                    rate: cfg.kappa,
                    op: space.operator(|p| {
                        lower_atom(p, e, atom)
                            .map(|q| (q, 1.0))
                            .into_iter()
                            .collect()
                    }),
                });
            }
        }
        Dynamics::Open(LindbladGenerator::new(hamiltonian, jumps))
    } else {
        Dynamics::Closed(Propagator::new(&hamiltonian.to_dense()))
    };
    let problem = FidelityProblem {
        dynamics,
        terms,
        time_scale: cfg.time_scale(),
    };
    let times = sc.grid.points();
    let (values, peak) = problem.series(&times)?;
    Ok(FidelitySeries {
        times,
        values,
        peak,
        scenario: *sc,
    })
}

/// Population of the one-excitation Dicke state `|1, N-1⟩` of a single
/// ensemble decaying through individual `σ_i⁻` jumps at rate `kappa`,
/// sampled at the (absolute) `times`.
pub fn single_excitation_decay(atoms: u32, kappa: f64, times: &[f64]) -> Result<Vec<f64>> {
    check_atoms(atoms)?;
    if atoms == 0 {
        return Err(Error::invalid("atoms", "must be at least 1"));
    }
    let space = TensorSpace::new([atoms, 1], Model::Reduced, 1, true);
    let jumps = (0..atoms)
        .map(|atom| JumpOperator {
            name: format!("atom1_{atom}"),
            rate: kappa,
            op: space.operator(|p| {
                lower_atom(p, 0, atom)
                    .map(|q| (q, 1.0))
                    .into_iter()
                    .collect()
            }),
        })
        .collect();
    let generator = LindbladGenerator::new(SparseOp::new(space.dim()), jumps);
    let w = space.embed(&BasisState::reduced(0, 1, 0))?;
    let mut stepper = MasterStepper::new(&generator, &(&w * w.adjoint()), Tolerance::default());
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        stepper.advance_to(t)?;
        out.push(w.dotc(&(stepper.matrix() * &w)).re);
    }
    Ok(out)
}
