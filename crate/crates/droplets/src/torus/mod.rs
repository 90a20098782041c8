//! Torus-level machinery: the periodic Green's function, bubble placement on
//! the unit torus, and the finite-scale energy assembly.

mod eta;
mod greens;
mod placement;
mod quadrature;

pub use eta::{assemble_e_eta, EtaDecomposition};
pub use greens::{
    exp_int_e1, r0_closed_form, r0_spectral_richardson, striped_eval, wrap, GreensEvaluator,
};
pub use placement::{
    min_pairwise_distance, optimize_placement, placement_energy, torus_delta, DistanceReport,
    PlacementResult, TorusPlacement,
};
pub use quadrature::{lobe_nodes, log_pair_integral, pair_g_integral};
