mod bounds;
mod many;
mod two;

pub use bounds::{
    analytic_bound2, analytic_bound_n, dim_n_coefficient, dim_n_validity, tail_bound2, upper_dim2,
    upper_dim_n,
};
pub use many::{
    fiber_base_height, fiber_n_audit, inner_boxes_meet, node_n_in_j, sigma_n_member, ChildN,
    CoverNodeN, FiberCaps, FiberNReport, FiberRowN,
};
pub use two::{
    audit_sigma, cover_sum_audit, node2_in_j, sample_nodes, sigma2_enumerate, CoverAudit,
    CoverNode2, FiberIndex, FiberRow, Sigma2, Successor2,
};
