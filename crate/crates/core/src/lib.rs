//! Quantum Brayton cycle thermodynamics for spin-1/2 working substances.
//!
//! The library models a single spin-1/2 or a coupled spin-1/2 pair (isotropic
//! XX exchange or a general anisotropic XY+Δ exchange) in thermal
//! equilibrium, the quasi-static processes that drive it (isobaric with
//! respect to either generalized force, adiabatic, isochoric, isothermal),
//! and the reversible Brayton cycles assembled from two isobars and two
//! adiabats — including the parallel thermodynamics of one subsystem of the
//! pair, which runs a Brayton cycle of its own under a held F_x and an Otto
//! cycle under a held F_y, and can act as a refrigerator while the composite
//! system produces work.
//!
//! Every closed form is paired with a definitional numerical route
//! (finite-difference force oracles, path-quadrature heat/work oracles); the
//! [`verify`] module runs the whole equivalence suite.

pub mod cycles;
pub mod error;
pub mod numerics;
pub mod processes;
pub mod substance;
pub mod verify;

pub use cycles::{
    brayton_report, interaction_bracket, oracle_report, ratio_chain_residual,
    refrigerator_threshold, solve_corners, sweep, BraytonSpec, CornerSet, CycleKind, CycleReport,
    HoldMode, SweepRow, SweepSpec, CLOSURE_REL,
};
pub use error::{Error, Result};
pub use numerics::{central_diff, find_root, integrate, Tolerances};
pub use processes::{
    build_adiabat, build_isobar, build_isochore, build_isotherm, heat_along, heat_work,
    isothermal_heat_directions, local_heat_along, solve_beta_on_isobar, work_along, Bump, Held,
    HeatWork, IsothermVary, IsothermalRecord, Path, PathKind, DEFAULT_SAMPLES,
};
pub use substance::{
    gibbs_probabilities, single_spin_force, Coordinate, CoupledPair, Level, LocalState, PairModel,
    Spectrum, SpinHalf, Substance, ThermalPoint,
};
