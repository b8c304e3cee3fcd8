//! Protocol runners: state transfer, swap, entangling and controlled-Z gates.
//!
//! Every protocol reduces to the same fidelity functional
//!
//! `F(t) = Re Σ_k Tr(O_k Λ_t(|ket_k⟩⟨bra_k|))`
//!
//! where `Λ_t` is the unitary or Lindblad evolution map. A pure input scored
//! against a pure target is the single term `ket = bra = ψ0`, `O = |T⟩⟨T|`.
//! The swap gate averages over the input angles; by linearity the angle
//! average folds into the observables, so only the register dyads
//! `|i⟩⟨j|` are ever evolved.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::basis::{BasisState, Subspace};
use crate::config::{Model, SystemConfig};
use crate::dynamics::{transfer_amplitudes, Propagator};
use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::open::integrator::{Dopri5, Tolerance};
use crate::open::lindblad::{build_generator, to_row_major, LindbladGenerator};
use crate::operator::C64;

/// Angle samples per qubit in the swap-gate average.
pub const SWAP_QUADRATURE: usize = 32;

/// Width of the time bracket left by the golden-section peak search.
pub const PEAK_TOLERANCE: f64 = 1e-4;

/// Bell-type target of the entangling gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellTarget {
    /// `(|0,1⟩ + |1,0⟩)/√2`
    E1,
    /// `(|1,0⟩ - |0,1⟩)/√2`
    E2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// Moves `α|0⟩ + β|1⟩` from ensemble 1 to ensemble 2.
    Transfer { alpha: C64, beta: C64 },
    /// Exchanges two ensemble qubits, scored by the fidelity averaged over
    /// product inputs `(sin θ|0⟩ + cos θ|1⟩)` on a `quadrature`² angle grid.
    Swap { quadrature: usize },
    /// Turns `|1,0⟩` into a Bell-type state.
    Entangle { target: BellTarget },
    /// Flips the sign of `|1,1⟩` on the equal-superposition input.
    ControlledZ,
}

impl Protocol {
    pub fn transfer() -> Self {
        Protocol::Transfer {
            alpha: C64::new(FRAC_1_SQRT_2, 0.0),
            beta: C64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    pub fn swap() -> Self {
        Protocol::Swap {
            quadrature: SWAP_QUADRATURE,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Transfer { .. } => "transfer",
            Protocol::Swap { .. } => "swap",
            Protocol::Entangle { .. } => "entangle",
            Protocol::ControlledZ => "cz",
        }
    }

    /// Highest excitation number the protocol populates.
    pub fn max_sector(&self) -> u32 {
        match self {
            Protocol::Transfer { .. } | Protocol::Entangle { .. } => 1,
            Protocol::Swap { .. } | Protocol::ControlledZ => 2,
        }
    }

    pub fn default_grid(&self) -> TimeGrid {
        match self {
            Protocol::ControlledZ => TimeGrid {
                stop: 60.0,
                step: 0.01,
            },
            _ => TimeGrid {
                stop: 4.0 * PI,
                step: 0.01,
            },
        }
    }
}

/// Uniform grid `0, step, 2 step, …` in dimensionless time `τ = √N1 g1 t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub stop: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn new(stop: f64, step: f64) -> Result<Self> {
        let grid = TimeGrid { stop, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid("grid.step", "must be positive"));
        }
        if !(self.stop >= 0.0) || !self.stop.is_finite() {
            return Err(Error::invalid("grid.stop", "must be non-negative"));
        }
        if self.stop / self.step > 1e7 {
            return Err(Error::invalid(
                "grid.step",
                "grid has more than 10^7 points",
            ));
        }
        Ok(())
    }

    /// Grid points; the last one is the largest multiple of `step` not past `stop`.
    pub fn points(&self) -> Vec<f64> {
        let n = (self.stop / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub protocol: Protocol,
    pub system: SystemConfig,
    /// Evolve with the master equation instead of the Schrödinger equation.
    pub dissipative: bool,
    pub grid: TimeGrid,
}

impl Scenario {
    /// Closed scenario on the protocol's default grid.
    pub fn new(protocol: Protocol, system: SystemConfig) -> Self {
        Scenario {
            protocol,
            system,
            dissipative: false,
            grid: protocol.default_grid(),
        }
    }

    pub fn dissipative(mut self) -> Self {
        self.dissipative = true;
        self
    }

    pub fn with_grid(mut self, stop: f64, step: f64) -> Self {
        self.grid = TimeGrid { stop, step };
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.grid.validate()?;
        match self.protocol {
            Protocol::Transfer { alpha, beta } => {
                let norm = alpha.norm_sqr() + beta.norm_sqr();
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(Error::invalid(
                        "alpha/beta",
                        format!("|alpha|^2 + |beta|^2 must be 1, got {norm}"),
                    ));
                }
            }
            Protocol::Swap { quadrature } => {
                if quadrature < 2 {
                    return Err(Error::invalid(
                        "quadrature",
                        "needs at least 2 points per angle",
                    ));
                }
                if !self.system.blockade {
                    return Err(Error::Unsupported(
                        "the swap gate requires the dipole blockade".into(),
                    ));
                }
            }
            Protocol::ControlledZ => {
                if !self.system.blockade {
                    return Err(Error::Unsupported(
                        "the controlled-Z gate requires the dipole blockade".into(),
                    ));
                }
            }
            Protocol::Entangle { .. } => {}
        }
        Ok(())
    }

    /// Excitation sectors the evolution needs (jumps feed the lower ones).
    pub fn sectors(&self) -> Vec<u32> {
        let top = self.protocol.max_sector();
        let bottom = if self.dissipative || !matches!(self.protocol, Protocol::Entangle { .. }) {
            0
        } else {
            1
        };
        (bottom..=top).collect()
    }
}

/// Location and value of the best fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub time: f64,
    pub value: f64,
}

/// Fidelity versus `τ` with its refined maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub peak: Peak,
    pub scenario: Scenario,
}

impl FidelitySeries {
    /// Linear interpolation of the grid values (clamped to the grid).
    pub fn value_at(&self, tau: f64) -> f64 {
        match self.times.iter().position(|&t| t >= tau) {
            None => *self.values.last().unwrap_or(&f64::NAN),
            Some(0) => self.values[0],
            Some(i) => {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let w = (tau - t0) / (t1 - t0);
                self.values[i - 1] * (1.0 - w) + self.values[i] * w
            }
        }
    }
}

/// Weighted sum of basis labels.
pub(crate) type Labeled = Vec<(BasisState, C64)>;

/// One term `(ket, bra, O)` of the fidelity functional, on basis labels.
#[derive(Debug, Clone)]
pub(crate) struct LabeledTerm {
    pub ket: Labeled,
    pub bra: Labeled,
    /// `O = Σ w |row⟩⟨col|`.
    pub observable: Vec<(BasisState, BasisState, C64)>,
}

fn projector(target: &Labeled) -> Vec<(BasisState, BasisState, C64)> {
    let mut out = Vec::new();
    for &(row, a) in target {
        for &(col, b) in target {
            out.push((row, col, a * b.conj()));
        }
    }
    out
}

fn pure_term(input: Labeled, target: Labeled) -> LabeledTerm {
    LabeledTerm {
        ket: input.clone(),
        bra: input,
        observable: projector(&target),
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Swap-gate angle weights `W[i][j][k][l] = ⟨c_i c_j d_k d_l⟩_θ` on the
/// register `|00⟩, |01⟩, |10⟩, |11⟩`; `c` is the input, `d` the swapped target.
pub(crate) fn swap_weights(quadrature: usize) -> [[[[f64; 4]; 4]; 4]; 4] {
    let mut w = [[[[0.0; 4]; 4]; 4]; 4];
    let q = quadrature as f64;
    for p in 0..quadrature {
        let (a1, b1) = (2.0 * PI * p as f64 / q).sin_cos();
        for s in 0..quadrature {
            let (a2, b2) = (2.0 * PI * s as f64 / q).sin_cos();
            let c = [a1 * a2, a1 * b2, b1 * a2, b1 * b2];
            let d = [a2 * a1, a2 * b1, b2 * a1, b2 * b1];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            w[i][j][k][l] += c[i] * c[j] * d[k] * d[l];
                        }
                    }
                }
            }
        }
    }
    let norm = q * q;
    for v in w.iter_mut().flatten().flatten().flatten() {
        *v /= norm;
    }
    w
}

/// Fidelity functional of a protocol on basis labels of `model`.
pub(crate) fn protocol_terms(protocol: &Protocol, model: Model) -> Vec<LabeledTerm> {
    let reg = |m1, m2| BasisState::register(model, m1, m2);
    match *protocol {
        Protocol::Transfer { alpha, beta } => vec![pure_term(
            vec![(reg(0, 0), alpha), (reg(1, 0), beta)],
            vec![(reg(0, 0), alpha), (reg(0, 1), beta)],
        )],
        Protocol::Entangle { target } => {
            let h = FRAC_1_SQRT_2;
            let target = match target {
                BellTarget::E1 => vec![(reg(0, 1), re(h)), (reg(1, 0), re(h))],
                BellTarget::E2 => vec![(reg(1, 0), re(h)), (reg(0, 1), re(-h))],
            };
            vec![pure_term(vec![(reg(1, 0), re(1.0))], target)]
        }
        Protocol::ControlledZ => vec![pure_term(
            vec![
                (reg(0, 0), re(0.5)),
                (reg(0, 1), re(0.5)),
                (reg(1, 0), re(0.5)),
                (reg(1, 1), re(0.5)),
            ],
            vec![
                (reg(0, 0), re(0.5)),
                (reg(0, 1), re(0.5)),
                (reg(1, 0), re(0.5)),
                (reg(1, 1), re(-0.5)),
            ],
        )],
        Protocol::Swap { quadrature } => {
            let w = swap_weights(quadrature);
            let register = [reg(0, 0), reg(0, 1), reg(1, 0), reg(1, 1)];
            let observable = |i: usize, j: usize| {
                // O_ij = Σ_kl W_ijkl |l⟩⟨k|
                let mut out = Vec::new();
                for k in 0..4 {
                    for l in 0..4 {
                        if w[i][j][k][l] != 0.0 {
                            out.push((register[l], register[k], re(w[i][j][k][l])));
                        }
                    }
                }
                out
            };
            // Λ(|j⟩⟨i|) = Λ(|i⟩⟨j|)†, so the (j, i) term folds into (i, j)
            // with observable O_ji†.
            let mut terms = Vec::new();
            for i in 0..4 {
                for j in i..4 {
                    let mut obs = observable(i, j);
                    if j != i {
                        obs.extend(
                            observable(j, i)
                                .into_iter()
                                .map(|(r, c, v)| (c, r, v.conj())),
                        );
                    }
                    terms.push(LabeledTerm {
                        ket: vec![(register[i], re(1.0))],
                        bra: vec![(register[j], re(1.0))],
                        observable: obs,
                    });
                }
            }
            terms
        }
    }
}

/// A fidelity term realized as vectors and a matrix on a concrete basis.
#[derive(Debug, Clone)]
pub(crate) struct Term {
    pub ket: DVector<C64>,
    pub bra: DVector<C64>,
    pub observable: DMatrix<C64>,
}

/// Turns labeled terms into vectors using `embed` to map each label.
pub(crate) fn realize_terms(
    terms: &[LabeledTerm],
    dim: usize,
    embed: &dyn Fn(&BasisState) -> Result<DVector<C64>>,
) -> Result<Vec<Term>> {
    let vector = |labels: &Labeled| -> Result<DVector<C64>> {
        let mut v = DVector::zeros(dim);
        for (s, a) in labels {
            v += embed(s)? * *a;
        }
        Ok(v)
    };
    terms
        .iter()
        .map(|t| {
            let mut observable = DMatrix::zeros(dim, dim);
            for (row, col, w) in &t.observable {
                observable += embed(row)? * embed(col)?.adjoint() * *w;
            }
            Ok(Term {
                ket: vector(&t.ket)?,
                bra: vector(&t.bra)?,
                observable,
            })
        })
        .collect()
}

/// Time evolution behind a fidelity functional.
pub(crate) enum Dynamics {
    Closed(Propagator),
    Open(LindbladGenerator),
    /// Exact closed-form fidelity as a function of `τ`.
    Analytic(Box<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Everything needed to evaluate `F(τ)`.
pub(crate) struct FidelityProblem {
    pub dynamics: Dynamics,
    pub terms: Vec<Term>,
    /// `t = τ / time_scale`.
    pub time_scale: f64,
}

struct OpenState {
    stepper: Dopri5,
    y: Vec<C64>,
    t: f64,
}

impl FidelityProblem {
    fn closed_value(&self, prop: &Propagator, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let ket = prop.apply(&term.ket, t);
                let bra = prop.apply(&term.bra, t);
                bra.dotc(&(&term.observable * ket)).re
            })
            .sum()
    }

    fn open_value(&self, dim: usize, y: &[C64]) -> f64 {
        let block = dim * dim;
        self.terms
            .iter()
            .enumerate()
            .map(|(k, term)| {
                let x = &y[k * block..(k + 1) * block];
                // Tr(O X) = Σ_ab O[b, a] X[a, b]
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        acc += term.observable[(b, a)] * x[a * dim + b];
                    }
                }
                acc.re
            })
            .sum()
    }

    fn open_start(&self, dim: usize) -> OpenState {
        let mut y = Vec::with_capacity(self.terms.len() * dim * dim);
        for term in &self.terms {
            y.extend(to_row_major(&(&term.ket * term.bra.adjoint())));
        }
        OpenState {
            stepper: Dopri5::new(y.len(), Tolerance::default()),
            y,
            t: 0.0,
        }
    }

    fn open_advance(gen: &LindbladGenerator, state: &mut OpenState, t: f64) -> Result<()> {
        let block = gen.dim() * gen.dim();
        let mut f = |y: &[C64], dy: &mut [C64]| {
            for (src, dst) in y.chunks(block).zip(dy.chunks_mut(block)) {
                gen.apply_flat(src, dst);
            }
        };
        state.stepper.advance(&mut f, &mut state.y, state.t, t)?;
        state.t = t;
        Ok(())
    }

    /// Fidelity on every grid point plus the refined peak.
    pub fn series(&self, taus: &[f64]) -> Result<(Vec<f64>, Peak)> {
        if taus.is_empty() {
            return Err(Error::invalid("grid", "time grid is empty"));
        }
        let scale = self.time_scale;
        match &self.dynamics {
            Dynamics::Closed(prop) => {
                let values: Vec<f64> = taus
                    .iter()
                    .map(|&tau| self.closed_value(prop, tau / scale))
                    .collect();
                let peak = find_peak(
                    taus,
                    &values,
                    |tau| Ok(self.closed_value(prop, tau / scale)),
                )?;
                Ok((values, peak))
            }
            Dynamics::Analytic(f) => {
                let values: Vec<f64> = taus.iter().map(|&tau| f(tau)).collect();
                let peak = find_peak(taus, &values, |tau| Ok(f(tau)))?;
                Ok((values, peak))
            }
            Dynamics::Open(gen) => {
                let dim = gen.dim();
                let mut state = self.open_start(dim);
                let mut values = Vec::with_capacity(taus.len());
                // State at the grid point before the current best.
                let mut checkpoint: Option<(f64, Vec<C64>)> = None;
                let mut previous: (f64, Vec<C64>) = (0.0, state.y.clone());
                let mut best = f64::NEG_INFINITY;
                for &tau in taus {
                    if tau < 0.0 {
                        return Err(Error::invalid("grid", "times must be non-negative"));
                    }
                    Self::open_advance(gen, &mut state, tau / scale)?;
                    let v = self.open_value(dim, &state.y);
                    if v > best {
                        best = v;
                        checkpoint = Some(previous.clone());
                    }
                    values.push(v);
                    previous = (state.t, state.y.clone());
                }
                let checkpoint = checkpoint.expect("non-empty grid");
                let peak = find_peak(taus, &values, |tau| {
                    let mut probe = OpenState {
                        stepper: Dopri5::new(checkpoint.1.len(), Tolerance::default()),
                        y: checkpoint.1.clone(),
                        t: checkpoint.0,
                    };
                    Self::open_advance(gen, &mut probe, tau / scale)?;
                    Ok(self.open_value(dim, &probe.y))
                })?;
                Ok((values, peak))
            }
        }
    }
}

/// Grid argmax (earliest on ties) refined by golden-section search on
/// `evaluate` between the neighbouring grid points.
///
/// A maximum on the first or last grid point, or a flat series, is returned
/// as is. The refined point replaces the grid point only if it is higher.
pub fn find_peak<F>(times: &[f64], values: &[f64], mut evaluate: F) -> Result<Peak>
where
    F: FnMut(f64) -> Result<f64>,
{
    if times.is_empty() || times.len() != values.len() {
        return Err(Error::invalid(
            "series",
            "times and values must be non-empty and of equal length",
        ));
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let grid = Peak {
        time: times[best],
        value: values[best],
    };
    if best == 0 || best + 1 == times.len() {
        return Ok(grid);
    }
    let (mut lo, mut hi) = (times[best - 1], times[best + 1]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = evaluate(x1)?;
    let mut f2 = evaluate(x2)?;
    while hi - lo > PEAK_TOLERANCE {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = evaluate(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = evaluate(x2)?;
        }
    }
    let (time, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if value > grid.value {
        Ok(Peak { time, value })
    } else {
        Ok(grid)
    }
}

fn unit_embedding(sub: &Subspace) -> impl Fn(&BasisState) -> Result<DVector<C64>> + '_ {
    move |s| {
        let i = sub.index_of(s).ok_or_else(|| {
            Error::InconsistentBasis(format!("{s} is not in the evolved subspace"))
        })?;
        let mut v = DVector::zeros(sub.dim());
        v[i] = C64::new(1.0, 0.0);
        Ok(v)
    }
}

fn closed_form_transfer(sc: &Scenario) -> Option<Dynamics> {
    let cfg = &sc.system;
    let Protocol::Transfer { alpha, beta } = sc.protocol else {
        return None;
    };
    if sc.dissipative || cfg.model != Model::Full || cfg.g1 != cfg.g2 || cfg.n1 != cfg.n2 {
        return None;
    }
    let r = cfg.ratio();
    // ⟨T|ψ(τ)⟩ = |α|² + |β|² C_1(τ), C_1 being the amplitude on |0,1⟩.
    Some(Dynamics::Analytic(Box::new(move |tau| {
        let c1 = transfer_amplitudes(r, tau)[0];
        (re(alpha.norm_sqr()) + c1 * beta.norm_sqr()).norm_sqr()
    })))
}

/// Builds the fidelity functional of a scenario in the symmetric sector.
pub(crate) fn build_problem(sc: &Scenario, use_closed_forms: bool) -> Result<FidelityProblem> {
    sc.validate()?;
    let cfg = &sc.system;
    let sub = Subspace::direct_sum(cfg, &sc.sectors())?;
    let terms = realize_terms(
        &protocol_terms(&sc.protocol, cfg.model),
        sub.dim(),
        &unit_embedding(&sub),
    )?;
    let dynamics = match closed_form_transfer(sc).filter(|_| use_closed_forms) {
        Some(d) => d,
        None if sc.dissipative => Dynamics::Open(build_generator(cfg, &sc.sectors())?),
        None => Dynamics::Closed(Propagator::from_hamiltonian(&build_hamiltonian(cfg, &sub)?)),
    };
    Ok(FidelityProblem {
        dynamics,
        terms,
        time_scale: cfg.time_scale(),
    })
}

fn run_checked(sc: &Scenario, expected: &str, use_closed_forms: bool) -> Result<FidelitySeries> {
    if sc.protocol.name() != expected {
        return Err(Error::invalid(
            "protocol",
            format!("expected a {expected} scenario, got {}", sc.protocol.name()),
        ));
    }
    let problem = build_problem(sc, use_closed_forms)?;
    let times = sc.grid.points();
    let (values, peak) = problem.series(&times)?;
    Ok(FidelitySeries {
        times,
        values,
        peak,
        scenario: *sc,
    })
}

/// State transfer. Closed runs with `g1 = g2`, `N1 = N2` on the full model
/// use the closed-form amplitudes; everything else is propagated numerically.
pub fn run_transfer(sc: &Scenario) -> Result<FidelitySeries> {
    run_checked(sc, "transfer", true)
}

/// Average swap-gate fidelity.
pub fn run_swap(sc: &Scenario) -> Result<FidelitySeries> {
    run_checked(sc, "swap", true)
}

pub fn run_entangle(sc: &Scenario) -> Result<FidelitySeries> {
    run_checked(sc, "entangle", true)
}

pub fn run_cz(sc: &Scenario) -> Result<FidelitySeries> {
    run_checked(sc, "cz", true)
}

/// Runs any scenario.
pub fn run(sc: &Scenario) -> Result<FidelitySeries> {
    run_checked(sc, sc.protocol.name(), true)
}

/// Runs a scenario by numerical propagation even where a closed form exists.
pub fn run_numeric(sc: &Scenario) -> Result<FidelitySeries> {
    run_checked(sc, sc.protocol.name(), false)
}
