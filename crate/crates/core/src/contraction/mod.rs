//! Wasserstein contraction of the geodesic random walk.
//!
//! The Dobrushin coefficient of the constant-target kernel is bounded by
//! transporting `P(x, .)` onto `P(R_a x, .)` with the rotation `R_a` of the
//! first coordinate plane. The transport cost reduces to the `a`-free
//! functional `E sqrt(v_1^2 + v_2^2)` under `v ~ P(e_1, .)`, and Jensen's
//! inequality bounds that by [`rate_bound`].

mod coupling;
mod rate;
mod wasserstein;

pub use coupling::{
    coupled_chord_factor, coupled_ratios, estimate_dobrushin_coupled, map_transitions, CouplingReport,
    MC_BLOCKS,
};
pub use rate::{
    quadrature_nodes, rate_bound, rate_bound_asymptote, spectral_gap_lower_bound, RateRow, RateTable,
    BASE_NODES,
};
pub use wasserstein::{
    empirical_wasserstein1, wasserstein_decay_experiment, DecayReport, DecayRow, FLOOR_REPS, MAX_CLOUD,
};
