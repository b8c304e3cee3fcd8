//! Excitation-conserving basis sets in the symmetric (Dicke) sector.
//!
//! Each ensemble is described only by its number of excited atoms `m`, so
//! `|m⟩` stands for the Dicke state `|m, N - m⟩`. The atom number enters
//! through matrix elements, never through the basis size.
//!
//! Ordering is canonical:
//!
//! * Full, one excitation: `|0,1⟩, |1,0⟩` (atomic `m1 m2`) followed by a
//!   photon in cavity 2, the fiber, cavity 1.
//! * Reduced, one excitation: `|0,1⟩, |1,0⟩, |1⟩_c`.
//! * Reduced, two excitations: `|1,1⟩, c|0,1⟩, c|1,0⟩, |2⟩_c, |2,0⟩, |0,2⟩`.
//! * Full, two excitations: lexicographic on `(m1, m2, n1, nf, n2)`, all
//!   descending, so atomic excitations come first.
//!
//! Under dipole blockade every state with `m1 >= 2` or `m2 >= 2` is dropped.

use std::fmt;

use crate::config::{Model, SystemConfig};
use crate::error::{Error, Result};

/// Occupation label of one basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    /// Photons in cavity 1, fiber, cavity 2 and excited atoms per ensemble.
    Full {
        n1: u8,
        nf: u8,
        n2: u8,
        m1: u8,
        m2: u8,
    },
    /// Photons in the resonant normal mode and excited atoms per ensemble.
    Reduced { nc: u8, m1: u8, m2: u8 },
}

impl BasisState {
    pub const fn full(n1: u8, nf: u8, n2: u8, m1: u8, m2: u8) -> Self {
        BasisState::Full { n1, nf, n2, m1, m2 }
    }

    pub const fn reduced(nc: u8, m1: u8, m2: u8) -> Self {
        BasisState::Reduced { nc, m1, m2 }
    }

    /// Atoms in `|m1, m2⟩` with every field mode empty.
    pub const fn register(model: Model, m1: u8, m2: u8) -> Self {
        match model {
            Model::Full => BasisState::full(0, 0, 0, m1, m2),
            Model::Reduced => BasisState::reduced(0, m1, m2),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            BasisState::Full { .. } => Model::Full,
            BasisState::Reduced { .. } => Model::Reduced,
        }
    }

    pub fn atoms(&self) -> (u8, u8) {
        match *self {
            BasisState::Full { m1, m2, .. } | BasisState::Reduced { m1, m2, .. } => (m1, m2),
        }
    }

    pub fn photons(&self) -> u32 {
        match *self {
            BasisState::Full { n1, nf, n2, .. } => (n1 + nf + n2) as u32,
            BasisState::Reduced { nc, .. } => nc as u32,
        }
    }

    pub fn is_field_vacuum(&self) -> bool {
        self.photons() == 0
    }
}

/// Total excitation number: photons plus excited atoms.
pub fn conserved_excitation(state: &BasisState) -> u32 {
    let (m1, m2) = state.atoms();
    state.photons() + m1 as u32 + m2 as u32
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisState::Full { n1, nf, n2, m1, m2 } => {
                write!(f, "|{n1}{nf}{n2}>f|{m1}>1|{m2}>2")
            }
            BasisState::Reduced { nc, m1, m2 } => write!(f, "|{nc}>c|{m1}>1|{m2}>2"),
        }
    }
}

/// An ordered list of basis states spanning one excitation sector, or a
/// direct sum of sectors listed in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    model: Model,
    sectors: Vec<u32>,
    states: Vec<BasisState>,
}

impl Subspace {
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn sectors(&self) -> &[u32] {
        &self.sectors
    }

    /// The excitation number, if this is a single sector.
    pub fn excitation(&self) -> Option<u32> {
        match self.sectors.as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn state(&self, index: usize) -> &BasisState {
        &self.states[index]
    }

    /// Concatenates the canonical bases of `sectors` (ascending, no repeats).
    pub fn direct_sum(cfg: &SystemConfig, sectors: &[u32]) -> Result<Self> {
        let mut sorted = sectors.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.is_empty() {
            return Err(Error::invalid("sectors", "at least one sector is required"));
        }
        let mut states = Vec::new();
        for &n in &sorted {
            states.extend(enumerate_basis(cfg, n)?.states);
        }
        Ok(Subspace {
            model: cfg.model,
            sectors: sorted,
            states,
        })
    }

    /// Ranges of indices belonging to each sector, in order.
    pub fn sector_ranges(&self) -> Vec<(u32, std::ops::Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0;
        for &n in &self.sectors {
            let len = self.states[start..]
                .iter()
                .take_while(|s| conserved_excitation(s) == n)
                .count();
            out.push((n, start..start + len));
            start += len;
        }
        out
    }
}

/// Canonically ordered basis of one excitation sector.
pub fn enumerate_basis(cfg: &SystemConfig, excitation: u32) -> Result<Subspace> {
    if excitation > 2 {
        return Err(Error::UnsupportedSector(excitation));
    }
    let states = match cfg.model {
        Model::Full => full_sector(excitation as u8),
        Model::Reduced => reduced_sector(excitation as u8),
    };
    let states = states
        .into_iter()
        .filter(|s| {
            let (m1, m2) = s.atoms();
            !cfg.blockade || (m1 <= 1 && m2 <= 1)
        })
        .collect();
    Ok(Subspace {
        model: cfg.model,
        sectors: vec![excitation],
        states,
    })
}

fn full_sector(excitation: u8) -> Vec<BasisState> {
    match excitation {
        0 => vec![BasisState::full(0, 0, 0, 0, 0)],
        1 => vec![
            BasisState::full(0, 0, 0, 0, 1),
            BasisState::full(0, 0, 0, 1, 0),
            BasisState::full(0, 0, 1, 0, 0),
            BasisState::full(0, 1, 0, 0, 0),
            BasisState::full(1, 0, 0, 0, 0),
        ],
        _ => {
            let mut out = Vec::new();
            for m1 in (0..=excitation).rev() {
                for m2 in (0..=excitation - m1).rev() {
                    let photons = excitation - m1 - m2;
                    for n1 in (0..=photons).rev() {
                        for nf in (0..=photons - n1).rev() {
                            let n2 = photons - n1 - nf;
                            out.push(BasisState::full(n1, nf, n2, m1, m2));
                        }
                    }
                }
            }
            out
        }
    }
}

fn reduced_sector(excitation: u8) -> Vec<BasisState> {
    match excitation {
        0 => vec![BasisState::reduced(0, 0, 0)],
        1 => vec![
            BasisState::reduced(0, 0, 1),
            BasisState::reduced(0, 1, 0),
            BasisState::reduced(1, 0, 0),
        ],
        _ => vec![
            BasisState::reduced(0, 1, 1),
            BasisState::reduced(1, 0, 1),
            BasisState::reduced(1, 1, 0),
            BasisState::reduced(2, 0, 0),
            BasisState::reduced(0, 2, 0),
            BasisState::reduced(0, 0, 2),
        ],
    }
}
