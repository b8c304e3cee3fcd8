//! Open-system (Lindblad) dynamics and the small-N reference model.

pub mod integrator;
pub mod lindblad;
pub mod oracle;

pub use integrator::{Dopri5, Tolerance};
pub use lindblad::{
    build_generator, evolve_master, DensityMatrix, JumpOperator, LindbladGenerator,
};
pub use oracle::{single_excitation_decay, small_n_oracle, MAX_ORACLE_ATOMS};
