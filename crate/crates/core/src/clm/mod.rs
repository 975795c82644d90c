//! Conditional linear functions over prime fields and the question
//! distributions they induce.

pub mod clf;
pub mod field;
pub mod format;
pub mod pad;
pub mod pmf;
pub mod transport;
pub mod typed;

pub use clf::{joint_preimage_dim, random_clf, Clf, FieldSpace, LevelRule};
pub use field::{AffineSpace, Field, Matrix};
pub use format::{parse_clf, write_clf};
pub use pad::{pad, sample_padded, MarginalReport, PaddedDistribution, PaddedQuestion};
pub use pmf::{clm_marginal, clm_pmf, clm_support};
pub use transport::{pad_verifier, random_distribution, Correlation, PaddedGame, TypedGame};
pub use typed::{oracularize_clm, TypedClm, TypedQuestion};
