//! Text segmentation by lexical cohesion profiling.
//!
//! The pipeline turns a machine-readable dictionary into a directed semantic
//! network ([`lexnet`]), measures word-to-word relatedness by spreading
//! activation over that network ([`activation`]), weights words by corpus
//! rarity ([`significance`]), scores the cohesion of a sliding window at every
//! token position ([`lcp`]), and reads topic boundaries off the valleys of the
//! resulting series ([`segmenter`]). Predicted boundaries are scored against
//! human judgements in [`eval`], and [`synth`] generates seeded synthetic
//! corpora for calibration and benchmarking.
//!
//! All stages are deterministic: the same inputs produce bit-identical
//! networks, cohesion series, and segmentations, regardless of thread count.

pub mod activation;
pub mod eval;
pub mod lcp;
pub mod lexnet;
pub mod segmenter;
pub mod significance;
pub mod synth;

mod textnorm;

pub use activation::{activate, similarity, ActivationParams, ActivationPattern, SeedSet};
pub use eval::{match_score, paragraph_independence_report, GoldBoundaries, MatchScore};
pub use lcp::{
    cohesiveness, compute_lcp, tokenize, window_bounds, CohesionParams, LcpSeries, SumWeighting,
    TokenSequence, WindowShape, WindowSpec,
};
pub use lexnet::{build_network, load_network, save_network, DictionaryEntry, NodeId, SemanticNetwork};
pub use segmenter::{find_valleys, vmp_series, Boundary, Segmentation};
pub use significance::SignificanceTable;
