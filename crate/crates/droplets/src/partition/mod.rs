//! Global minimization of the total droplet energy over bubble
//! configurations: signature enumeration with diagonal exclusion rules,
//! continuous mass refinement with KKT certificates, analytic mass bounds,
//! the split/merge comparison moves, a brute-force verification oracle, and
//! the coexistence parameter construction.

mod bounds;
mod coexist;
mod inner;
mod minimize;
mod moves;
mod oracle;
mod signature;

pub use bounds::{
    bounds_report, default_comparability, default_comparability_grid, mass_lower_bound,
    mass_upper_bound, BoundsReport,
};
pub use coexist::{coexistence_params, CoexistenceCertificate, CoexistenceParams};
pub use minimize::{
    kkt_residual, minimize_e0_bar, optimize_masses, signature_of, MinimizeResult, HARD_CAP,
};
pub use moves::merge_split_moves;
pub use oracle::{brute_force_oracle, OracleResult};
pub use signature::{enumerate_signatures, Enumeration, Signature, DOUBLE_PAIRS};
