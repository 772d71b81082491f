//! Exact continued-fraction and lattice tools for cusp excursions of pairs of
//! reals: convergent ladders, the planar shortest-vector function and its tent
//! approximation, Farey counting, nested Cantor level construction with
//! certificates, and self-similar cover audits with closed-form dimension bounds.

pub mod cantor;
pub mod cf;
pub mod count;
pub mod cover;
pub mod error;
pub mod io;
pub mod lattice;
pub mod logs;

pub use error::{Error, Result};
