//! Dense complex matrices under the normalized trace, random measurement
//! generation, and PVM optimization of linear trace functionals.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Default tolerance for projective-measurement invariants.
pub const PVM_TOL: f64 = 1e-8;

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> CMat {
    CMat::zeros(dim, dim)
}

/// `tr(a) / D`.
pub fn ntrace(a: &CMat) -> C64 {
    a.trace() / a.nrows() as f64
}

/// Real part of `tr(a b) / D`, without forming the product.
pub fn ntrace_product(a: &CMat, b: &CMat) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc / d as f64
}

/// `tau(a* a) = ||a||_F^2 / D`.
pub fn tau_norm_sq(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>() / a.nrows() as f64
}

pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Operator norm of `ab - ba`.
pub fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
    let c = a * b - b * a;
    operator_norm(&c)
}

pub fn operator_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// as columns.
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitize(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Projector onto the span of the given columns (assumed orthonormal).
pub fn projector_from_columns(vectors: &CMat, columns: &[usize]) -> CMat {
    let d = vectors.nrows();
    let mut p = zeros(d);
    for &c in columns {
        let v = vectors.column(c);
        p += &v * v.adjoint();
    }
    p
}

/// Projector onto the eigenspace of `h` with eigenvalues `>= 0`.
pub fn nonnegative_projector(h: &CMat) -> CMat {
    let (values, vectors) = eigh(h);
    let cols: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= 0.0).collect();
    projector_from_columns(&vectors, &cols)
}

/// Largest deviation from the PVM axioms: Hermiticity, idempotence,
/// pairwise orthogonality and completeness, in operator norm.
pub fn pvm_violation(ops: &[CMat]) -> f64 {
    let Some(first) = ops.first() else {
        return f64::INFINITY;
    };
    let d = first.nrows();
    let mut worst: f64 = 0.0;
    let mut total = zeros(d);
    for (a, p) in ops.iter().enumerate() {
        if p.nrows() != d || p.ncols() != d {
            return f64::INFINITY;
        }
        worst = worst.max(operator_norm(&(p - p.adjoint())));
        worst = worst.max(operator_norm(&(p * p - p)));
        for q in &ops[a + 1..] {
            worst = worst.max(operator_norm(&(p * q)));
        }
        total += p;
    }
    worst.max(operator_norm(&(total - identity(d))))
}

/// Largest deviation from the POVM axioms: Hermiticity, positivity and
/// completeness.
pub fn povm_violation(ops: &[CMat]) -> f64 {
    let Some(first) = ops.first() else {
        return f64::INFINITY;
    };
    let d = first.nrows();
    let mut worst: f64 = 0.0;
    let mut total = zeros(d);
    for b in ops {
        if b.nrows() != d || b.ncols() != d {
            return f64::INFINITY;
        }
        worst = worst.max(operator_norm(&(b - b.adjoint())));
        let (values, _) = eigh(b);
        worst = worst.max(-values.first().copied().unwrap_or(0.0));
        total += b;
    }
    worst.max(operator_norm(&(total - identity(d))))
}

pub fn is_pvm(ops: &[CMat], tol: f64) -> bool {
    pvm_violation(ops) <= tol
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary via QR with the phase correction that makes the
/// distribution exactly Haar.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random PVM: a Haar basis whose vectors are assigned to outcomes
/// uniformly at random. Outcomes may receive the zero projector.
pub fn random_pvm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Vec<CMat> {
    let u = random_unitary(dim, rng);
    let mut groups = vec![Vec::new(); outcomes];
    for col in 0..dim {
        groups[rng.gen_range(0..outcomes)].push(col);
    }
    groups.iter().map(|cols| projector_from_columns(&u, cols)).collect()
}

/// PVM with the given outcome at each diagonal position, conjugated by `u`.
pub fn pvm_from_labels(labels: &[usize], outcomes: usize, u: &CMat) -> Vec<CMat> {
    (0..outcomes)
        .map(|a| {
            let cols: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == a).collect();
            projector_from_columns(u, &cols)
        })
        .collect()
}

/// Random POVM `S^{-1/2} G_a S^{-1/2}` with `G_a = X_a X_a*` Wishart.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Vec<CMat> {
    let grams: Vec<CMat> = (0..outcomes)
        .map(|_| {
            let x = ginibre(dim, dim, rng);
            &x * x.adjoint()
        })
        .collect();
    let total = grams.iter().fold(zeros(dim), |acc, g| acc + g);
    let inv_sqrt = matrix_function(&total, |v| 1.0 / v.max(1e-300).sqrt());
    grams
        .iter()
        .map(|g| hermitize(&(&inv_sqrt * g * &inv_sqrt)))
        .collect()
}

/// `f(h)` through the spectral decomposition.
pub fn matrix_function(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = eigh(h);
    let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::new(f(v), 0.0)),
    ));
    &vectors * diag * vectors.adjoint()
}

/// `sum_a Re tr(W_a P_a) / D`.
pub fn linear_objective(weights: &[CMat], pvm: &[CMat]) -> f64 {
    weights
        .iter()
        .zip(pvm)
        .map(|(w, p)| ntrace_product(w, p))
        .sum()
}

/// PVM maximizing `sum_a tau(W_a P_a)` for Hermitian `W_a`.
///
/// Two outcomes are solved exactly by the nonnegative eigenspace of
/// `W_0 - W_1`. More outcomes use pairwise refinement: for each pair, the
/// pair's joint range is re-split optimally, which never lowers the
/// objective. Several starting points are tried, including `init`.
pub fn maximize_linear_pvm(weights: &[CMat], init: Option<&[CMat]>) -> Vec<CMat> {
    let k = weights.len();
    assert!(k > 0, "at least one outcome");
    let d = weights[0].nrows();
    if k == 1 {
        return vec![identity(d)];
    }
    if k == 2 {
        let p0 = nonnegative_projector(&(&weights[0] - &weights[1]));
        let p1 = identity(d) - &p0;
        return vec![p0, p1];
    }

    let mut starts: Vec<Vec<CMat>> = Vec::new();
    if let Some(init) = init {
        if init.len() == k && is_pvm(init, 1e-6) {
            starts.push(init.to_vec());
        }
    }
    let average = weights.iter().fold(zeros(d), |acc, w| acc + w) * C64::new(1.0 / k as f64, 0.0);
    starts.push(greedy_assignment(weights, &eigh(&average).1));
    for w in weights {
        starts.push(greedy_assignment(weights, &eigh(w).1));
    }

    let mut best: Option<(f64, Vec<CMat>)> = None;
    for start in starts {
        let refined = pairwise_refine(weights, start);
        let value = linear_objective(weights, &refined);
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, refined));
        }
    }
    best.unwrap().1
}

/// Assigns each basis vector to the outcome whose weight it overlaps most.
fn greedy_assignment(weights: &[CMat], basis: &CMat) -> Vec<CMat> {
    let d = basis.nrows();
    let mut groups = vec![Vec::new(); weights.len()];
    for col in 0..d {
        let v = basis.column(col);
        let best = (0..weights.len())
            .max_by(|&a, &b| {
                let va = (v.adjoint() * &weights[a] * v)[(0, 0)].re;
                let vb = (v.adjoint() * &weights[b] * v)[(0, 0)].re;
                va.total_cmp(&vb)
            })
            .unwrap();
        groups[best].push(col);
    }
    groups.iter().map(|cols| projector_from_columns(basis, cols)).collect()
}

fn pairwise_refine(weights: &[CMat], mut pvm: Vec<CMat>) -> Vec<CMat> {
    let k = weights.len();
    let mut value = linear_objective(weights, &pvm);
    for _ in 0..100 {
        for a in 0..k {
            for b in a + 1..k {
                let joint = &pvm[a] + &pvm[b];
                let (evals, evecs) = eigh(&joint);
                let range: Vec<usize> = (0..evals.len()).filter(|&i| evals[i] > 0.5).collect();
                if range.is_empty() {
                    continue;
                }
                let q = CMat::from_columns(
                    &range.iter().map(|&i| evecs.column(i).into_owned()).collect::<Vec<_>>(),
                );
                let local = q.adjoint() * (&weights[a] - &weights[b]) * &q;
                let (lv, lvec) = eigh(&local);
                let keep: Vec<usize> = (0..lv.len()).filter(|&i| lv[i] >= 0.0).collect();
                let basis = &q * lvec;
                let new_a = projector_from_columns(&basis, &keep);
                let joint_proj = projector_from_columns(&q, &(0..q.ncols()).collect::<Vec<_>>());
                pvm[b] = &joint_proj - &new_a;
                pvm[a] = new_a;
            }
        }
        let next = linear_objective(weights, &pvm);
        if next <= value + 1e-13 {
            break;
        }
        value = next;
    }
    pvm
}

/// Nearest PVM in the trace-overlap sense. Binary measurements threshold
/// the first operator at 1/2.
pub fn reproject_pvm(ops: &[CMat]) -> Vec<CMat> {
    let herm: Vec<CMat> = ops.iter().map(hermitize).collect();
    maximize_linear_pvm(&herm, Some(&herm))
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(mats: &[&CMat]) -> CMat {
    let mut acc = CMat::from_element(1, 1, C64::new(1.0, 0.0));
    for m in mats {
        acc = acc.kronecker(*m);
    }
    acc
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| C64::new(v, 0.0)),
        ))
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(4, &mut rng);
        assert!(operator_norm(&(u.adjoint() * &u - identity(4))) < 1e-12);
    }

    #[test]
    fn random_measurements_satisfy_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..5 {
            assert!(pvm_violation(&random_pvm(3, k, &mut rng)) < 1e-10);
            assert!(povm_violation(&random_povm(3, k, &mut rng)) < 1e-10);
        }
    }

    #[test]
    fn binary_rounding_takes_positive_eigenspace() {
        let b1 = diag(&[0.9, 0.2]);
        let b2 = identity(2) - &b1;
        let p = maximize_linear_pvm(&[b2.clone(), b1.clone()], None);
        assert!(operator_norm(&(&p[1] - diag(&[1.0, 0.0]))) < 1e-12);
    }

    #[test]
    fn projective_input_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [2, 3, 4] {
            let pvm = random_pvm(4, k, &mut rng);
            let out = maximize_linear_pvm(&pvm, None);
            for (p, q) in pvm.iter().zip(&out) {
                assert!(operator_norm(&(p - q)) < 1e-8, "k = {k}");
            }
        }
    }

    #[test]
    fn multi_outcome_search_beats_its_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let w = random_povm(3, 3, &mut rng);
            let start = random_pvm(3, 3, &mut rng);
            let out = maximize_linear_pvm(&w, Some(&start));
            assert!(pvm_violation(&out) < 1e-9);
            assert!(linear_objective(&w, &out) >= linear_objective(&w, &start) - 1e-12);
        }
    }

    #[test]
    fn trace_helpers() {
        let a = diag(&[1.0, 3.0]);
        assert!((ntrace(&a).re - 2.0).abs() < 1e-15);
        assert!((tau_norm_sq(&a) - 5.0).abs() < 1e-15);
        assert!((ntrace_product(&a, &a) - 5.0).abs() < 1e-15);
        let k = kron_all(&[&a, &identity(2)]);
        assert_eq!(k.nrows(), 4);
    }
}
