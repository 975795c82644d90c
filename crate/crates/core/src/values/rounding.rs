//! Rounding POVMs to PVMs by maximizing trace overlap.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingReport {
    pub pvm: Vec<CMat>,
    /// `sum_i tau(B_i P_i)`.
    pub overlap: f64,
    /// `sum_i tau(B_i B_i)`, the same functional at the input.
    pub povm_self_overlap: f64,
}

impl RoundingReport {
    /// Overlap gained over the input; nonnegative for two outcomes.
    pub fn gain(&self) -> f64 {
        self.overlap - self.povm_self_overlap
    }
}

/// PVM maximizing `sum_i tau(B_i P_i)`. Two outcomes take the nonnegative
/// eigenspace of `B_1 - B_2`, which is optimal; more outcomes use pairwise
/// refinement, which is a local optimum only. A PVM input is returned as is.
pub fn round_povm_to_pvm(povm: &[CMat]) -> Result<RoundingReport> {
    let v = linalg::povm_violation(povm);
    if v > 1e-6 {
        return Err(Error::Invariant(format!("not a POVM (violation {v:.3e})")));
    }
    let self_overlap = linalg::linear_objective(povm, povm);
    let pvm = if linalg::is_pvm(povm, linalg::PVM_TOL) {
        povm.to_vec()
    } else {
        let herm: Vec<CMat> = povm.iter().map(linalg::hermitize).collect();
        linalg::maximize_linear_pvm(&herm, Some(&herm))
    };
    Ok(RoundingReport {
        overlap: linalg::linear_objective(povm, &pvm),
        povm_self_overlap: self_overlap,
        pvm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn diagonal_example() {
        let b1 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.9, 0.0), C64::new(0.2, 0.0)]));
        let b2 = linalg::identity(2) - &b1;
        let r = round_povm_to_pvm(&[b1, b2]).unwrap();
        let expected = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
        assert!((&r.pvm[0] - expected).norm() < 1e-12);
        assert!(r.gain() >= 0.0);
    }
}
