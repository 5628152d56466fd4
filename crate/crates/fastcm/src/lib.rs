//! Fast, statistically unbiased sampling of random networks from
//! maximum-entropy configuration models.
//!
//! The crate covers the full pipeline used in null-model analysis:
//!
//! * [`model`] — probability kernels and parameter containers for the
//!   undirected binary configuration model (UBCM, unweighted) and the
//!   undirected enhanced configuration model (UECM, integer-weighted),
//!   plus the Chung-Lu rate.
//! * [`inference`] — maximum-likelihood fitting of the per-node Lagrange
//!   multipliers from target degree (and strength) sequences.
//! * [`samplers`] — brute-force reference samplers, the Miller-Hagberg
//!   Chung-Lu sampler, stub matching, and geometric-skip rejection
//!   samplers for UBCM/UECM with bipartite and directed adapters.
//! * [`metrics`] — degree/strength recovery, triangle counts, rich-club
//!   densities, and ensemble aggregation.
//! * [`synth`] — Holme-Kim synthetic networks and the common-neighbor
//!   weighting transform.
//! * [`io`] — edge-list and parameter-file formats.
//! * [`harness`] — ensemble generation, benchmarking, and the bias
//!   demonstration pipeline behind the `fastcm` CLI.

pub mod error;
pub mod harness;
pub mod inference;
pub mod io;
pub mod metrics;
pub mod model;
pub mod samplers;
pub mod synth;

pub use error::{Error, Result};
pub use model::{DegreeSequence, EdgeList, StrengthSequence, UbcmParams, UecmParams};
pub use samplers::RngStream;
