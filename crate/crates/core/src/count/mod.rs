mod band;
mod farey;
mod interval;

pub(crate) use band::as_decimal;
pub use band::{
    band_precondition_witness, band_ratio, count_band, count_band_lower_bound, count_band_mobius,
    count_floor_ratio, count_heights_in_band, count_reduced_scan, floor_ratio_bound, floor_sum,
    lattice_count, BandCount, CountLimits, CountMethod, DEFAULT_MOBIUS_LIMIT, DEFAULT_SCAN_BUDGET,
};
pub use farey::{farey_bracket, farey_next, farey_prev, nearest_in_band, Frac};
pub use interval::{min_height, min_height_in_interval, parse_rational, RationalInterval};
