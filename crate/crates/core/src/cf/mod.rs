//! Continued fractions, convergent ladders and the relations between ladder entries.

pub mod growth;
pub mod ladder;
pub mod real;
pub mod relations;
pub mod stream;
pub mod vector;

pub use growth::{jb_ladder, JbLadder};
pub use ladder::{approximation_gaps_hold, ladder_from_stream, ConvergentLadder};
pub use real::{is_best_approx, RealHandle};
pub use relations::{
    backward_chain, decompose, enumerate_successors, predecessors, reach_rel, succ_rel,
};
pub use stream::{canonical_expand, parse_cf_list, PartialQuotientStream, StreamSource, Tail};
pub use vector::{pv, IntVec, PrimitiveVector};
