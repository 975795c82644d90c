//! Reductions between constraint systems and label cover.

pub mod oracularize;
pub mod pipeline;
pub mod replacement;
pub mod slc;

pub use oracularize::{commutation_pairs, two_oracularize, uniformize_by_repetition, TwoOracularized, Uniformized};
pub use pipeline::{to_3sat5, PipelineParams, ThreeSat5};
pub use replacement::{equality_to_3cnf, g_replacement, GraphFamily, Replacement};
pub use slc::{build_slc, parse_slc, slc_two_cs_game, verify_slc, write_slc, SlcInstance, SlcProvenance, SlcReport, VerifyParams};
