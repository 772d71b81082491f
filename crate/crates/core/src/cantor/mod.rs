mod dimension;
mod levels;
mod link;
mod verify;

pub use dimension::{combine_dimensions, lower_dim_estimate, recorded_counts, DimensionEstimate};
pub use levels::{
    build_levels, build_levels_auto, child_target, default_start, level_sizes, levels_from_json,
    levels_to_json, AutoBuild, CantorInterval, CantorLevel, LevelParams,
};
pub use link::{linked_divergence, linked_parameters};
pub use verify::{verify_levels, Certificate, VerifyReport};
