//! Tent functions, sup-norm shortest vectors, local minima of the maximum of
//! several tents and divergence certificates built on them.

pub mod minima;
pub mod shortest;
pub mod tent;

pub use minima::{
    divergence_certificate, local_minima, local_minima_tents, DivergenceReport, MinimumEvent,
    Verdict,
};
pub use shortest::{
    pl_sweep, shortest_sup, time_grid, verify_pl, w_lattice, LatticeSlice, PlSample, Shortest,
    SupNormSolver,
};
pub use tent::TentFunction;
