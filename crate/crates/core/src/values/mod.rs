//! Classical and quantum values, defect accounting and strategy maps.

pub mod classical;
pub mod defect;
pub mod dummy;
pub mod rounding;
pub mod seesaw;
pub mod strategy;

pub use classical::{
    classical_value_exact, classical_value_search, satisfying_assignment, system_value_exact, ClassicalResult,
};
pub use defect::{
    defect_cv, defect_cv_weighted, defect_definitional, observable_gap, replacement_round_state, CvStrategy,
    DefectReport, ReplacementRounding,
};
pub use dummy::{slc_strategy_to_dummy, slc_strategy_to_slc, tensor_dummy_strategy, ToDummy};
pub use rounding::{round_povm_to_pvm, RoundingReport};
pub use seesaw::{seesaw_lower_bound, SeesawResult};
pub use strategy::{
    game_oracularizability, oracularizability_check, parse_operator_families, parse_strategy, slc_strategy_value, strategy_value,
    write_strategy, CommutationReport, FiniteDimStrategy,
};
