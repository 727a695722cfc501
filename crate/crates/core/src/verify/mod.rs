//! Independent checks: a contour-integral weight oracle, round trips through
//! the inverse solver, stability sweeps and a seeded random problem corpus.

mod corpus;
mod oracle;
mod roundtrip;
mod sweep;

pub use corpus::{random_corpus, CorpusEntry};
pub use oracle::{residue_alpha_oracle, CONTOUR_NODES};
pub use roundtrip::{
    roundtrip, roundtrip_with_result, spectral_closure, Perturbation, RoundTripReport, Shift, SUP_RADIUS,
};
pub use sweep::{loglog_fit, stability_sweep, SweepReport, SLOPE_WINDOW};
