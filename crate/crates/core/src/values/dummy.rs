//! Strategies for the dummy game and the label cover built from it.

use super::defect::{defect_cv, CvStrategy};
use super::rounding::{round_povm_to_pvm, RoundingReport};
use super::strategy::{coarse_grain, FiniteDimStrategy};
use crate::cs::ConstraintDistribution;
use crate::error::{Error, Result};
use crate::games::dummy::{Coord, DummyGame, DummyQuestion};
use crate::linalg::{self, CMat, C64};
use crate::reductions::{SlcInstance, SlcProvenance};

/// Largest tensor-power dimension built by default.
pub const TENSOR_DIM_CAP: usize = 4096;

/// Tensor-power strategy: a left question gets
/// `Phi_{i_1}^{s_1} (x) ... (x) Phi_{i_L}^{s_L}`, and a right question the same
/// with `Pi^{b}(x)` in the replaced coordinates. Questions are ordered as in
/// [`DummyGame::to_game`], with `rights` its right questions.
pub fn tensor_dummy_strategy(
    game: &DummyGame,
    rights: &[DummyQuestion],
    cv: &CvStrategy,
    tol: f64,
    dim_cap: usize,
) -> Result<FiniteDimStrategy> {
    let system = game.system();
    let defect = defect_cv(system, &ConstraintDistribution::uniform(system.num_constraints()), cv)?.total;
    if defect > tol {
        return Err(Error::Invariant(format!("strategy is not perfect (defect {defect:.3e})")));
    }
    let dim = cv
        .dim
        .checked_pow(game.len() as u32)
        .filter(|&d| d <= dim_cap)
        .ok_or_else(|| Error::CapExceeded {
            what: "tensor dimension".into(),
            needed: (cv.dim as u128).saturating_pow(game.len() as u32),
            cap: dim_cap as u128,
        })?;
    let mut ops = Vec::with_capacity(game.num_left() + rights.len());
    for idx in 0..game.num_left() {
        let left = game.left_question(idx);
        let radices = game.left_radices(&left);
        let factors: Vec<&[CMat]> = left.iter().map(|&c| cv.constraints[c].as_slice()).collect();
        ops.push(tensor_family(&radices, &factors));
    }
    for right in rights {
        let radices = game.right_radices(right);
        let factors: Vec<&[CMat]> = right
            .iter()
            .map(|c| match *c {
                Coord::Constraint(i) => cv.constraints[i].as_slice(),
                Coord::Variable(x) => cv.variables[x].as_slice(),
            })
            .collect();
        ops.push(tensor_family(&radices, &factors));
    }
    Ok(FiniteDimStrategy::new_unchecked(dim, ops))
}

/// Every product of one operator per factor, in mixed-radix order with the
/// first factor most significant.
fn tensor_family(radices: &[usize], factors: &[&[CMat]]) -> Vec<CMat> {
    let total: usize = radices.iter().product();
    (0..total)
        .map(|idx| {
            let digits = DummyGame::decode_answer(radices, idx);
            let mats: Vec<&CMat> = digits.iter().zip(factors).map(|(&d, f)| &f[d]).collect();
            linalg::kron_all(&mats)
        })
        .collect()
}

/// The label cover strategy `Q_v = P_v` on the left questions.
pub fn slc_strategy_to_slc(game: &DummyGame, dummy: &FiniteDimStrategy) -> Result<FiniteDimStrategy> {
    if dummy.num_questions() < game.num_left() {
        return Err(Error::Shape("strategy misses left questions".into()));
    }
    Ok(FiniteDimStrategy::new_unchecked(
        dummy.dim(),
        dummy.ops()[..game.num_left()].to_vec(),
    ))
}

#[derive(Debug, Clone)]
pub struct ToDummy {
    pub strategy: FiniteDimStrategy,
    /// One rounding per right question.
    pub roundings: Vec<RoundingReport>,
}

impl ToDummy {
    /// Total trace overlap lost or gained against the averaged POVMs.
    pub fn rounding_gain(&self) -> f64 {
        self.roundings.iter().map(RoundingReport::gain).sum()
    }
}

/// Dummy-game strategy from a label cover strategy: left questions keep
/// `Q_v`, and right question `u` gets the PVM rounded from
/// `E_{v in N_u} sum_{i in pi_{uv}^{-1}(l)} Q_v^i`.
pub fn slc_strategy_to_dummy(inst: &SlcInstance, prov: &SlcProvenance, slc: &FiniteDimStrategy, right_counts: &[usize]) -> Result<ToDummy> {
    if slc.num_questions() != inst.num_vertices() || right_counts.len() != prov.right.len() {
        return Err(Error::Shape("strategy or right question count mismatch".into()));
    }
    let dim = slc.dim();
    let mut ops: Vec<Vec<CMat>> = slc.ops().to_vec();
    let mut roundings = Vec::with_capacity(prov.right.len());
    for (u, incidences) in prov.incidences.iter().enumerate() {
        let k = right_counts[u];
        let scale = C64::new(1.0 / incidences.len() as f64, 0.0);
        let mut povm = vec![linalg::zeros(dim); k];
        for &(v, m) in incidences {
            for (l, q) in coarse_grain(slc.family(v), &inst.maps()[m], k).into_iter().enumerate() {
                if let Some(q) = q {
                    povm[l] += q * scale;
                }
            }
        }
        let r = round_povm_to_pvm(&povm)?;
        ops.push(r.pvm.clone());
        roundings.push(r);
    }
    Ok(ToDummy {
        strategy: FiniteDimStrategy::new_unchecked(dim, ops),
        roundings,
    })
}
