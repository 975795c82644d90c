//! Three operations for the static page in `www/`. Each takes plain numbers
//! and returns a JSON string; errors come back as a message.

use gamereduce::expanders::{adjacency_spectrum, cycle_graph, cycle_lambda, random_regular_expander};
use gamereduce::linalg::{self, random_povm};
use gamereduce::values::round_povm_to_pvm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Larger inputs make the page unresponsive.
const MAX_VERTICES: usize = 256;
const MAX_DIM: usize = 16;

#[derive(Serialize)]
pub struct Spectrum {
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub edges: Vec<(usize, usize)>,
    pub spectrum: Vec<f64>,
}

#[derive(Serialize)]
pub struct CyclePoint {
    pub n: usize,
    pub closed_form: f64,
    pub eigensolve: f64,
}

#[derive(Serialize)]
pub struct Rounding {
    pub dim: usize,
    pub before: f64,
    pub after: f64,
    /// Eigenvalues of `B_1 - B_2`; the rounded projector keeps the nonnegative ones.
    pub difference_spectrum: Vec<f64>,
    pub rank: usize,
}

pub fn expander(n: usize, d: usize, seed: u64, lambda_min: f64) -> Result<Spectrum, String> {
    if n > MAX_VERTICES {
        return Err(format!("at most {MAX_VERTICES} vertices"));
    }
    let (g, cert) = random_regular_expander(n, d, seed, lambda_min).map_err(|e| e.to_string())?;
    Ok(Spectrum {
        n,
        d,
        lambda: cert.lambda,
        edges: g.edges().to_vec(),
        spectrum: adjacency_spectrum(&g),
    })
}

pub fn cycle_curve(max_n: usize) -> Result<Vec<CyclePoint>, String> {
    if max_n > MAX_VERTICES {
        return Err(format!("at most {MAX_VERTICES} vertices"));
    }
    (3..=max_n)
        .map(|n| {
            let (_, cert) = cycle_graph(n).map_err(|e| e.to_string())?;
            Ok(CyclePoint {
                n,
                closed_form: cycle_lambda(n),
                eigensolve: cert.lambda,
            })
        })
        .collect()
}

pub fn round_two_outcome(dim: usize, seed: u64) -> Result<Rounding, String> {
    if dim == 0 || dim > MAX_DIM {
        return Err(format!("dimension must be 1..={MAX_DIM}"));
    }
    let povm = random_povm(dim, 2, &mut ChaCha8Rng::seed_from_u64(seed));
    let r = round_povm_to_pvm(&povm).map_err(|e| e.to_string())?;
    let (difference_spectrum, _) = linalg::eigh(&(&povm[0] - &povm[1]));
    let rank = (linalg::ntrace(&r.pvm[0]).re * dim as f64).round() as usize;
    Ok(Rounding {
        dim,
        before: r.povm_self_overlap,
        after: r.overlap,
        difference_spectrum,
        rank,
    })
}

fn to_js<T: Serialize>(v: Result<T, String>) -> Result<String, JsValue> {
    v.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = expanderSpectrum)]
pub fn expander_spectrum_js(n: usize, d: usize, seed: u64, lambda_min: f64) -> Result<String, JsValue> {
    to_js(expander(n, d, seed, lambda_min))
}

#[wasm_bindgen(js_name = cycleCurve)]
pub fn cycle_curve_js(max_n: usize) -> Result<String, JsValue> {
    to_js(cycle_curve(max_n))
}

#[wasm_bindgen(js_name = roundTwoOutcome)]
pub fn round_two_outcome_js(dim: usize, seed: u64) -> Result<String, JsValue> {
    to_js(round_two_outcome(dim, seed))
}
