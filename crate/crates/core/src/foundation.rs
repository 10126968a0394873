//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Decompositions (eigen, SVD,
//! Hermitian eigen) are delegated to `faer`, whose complex QR iteration
//! converges on the unitary and permutation-like superoperators that show up
//! constantly here.
//!
//! Vectorization is column stacking everywhere: `vec(X)[i + j*d] = X[i, j]`,
//! so that `vec(B X A) = (Aᵀ ⊗ B) vec(X)` and a Kraus operator `K` acts as
//! `conj(K) ⊗ K`.

use std::sync::Once;

use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QmsError, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Relative tolerance (w.r.t. the spectral radius) for treating two
/// eigenvalues as the same.
pub const TOL_CLUSTER: f64 = 1e-7;

/// Biorthogonalization of a cluster is refused when the smallest singular
/// value of its Gram matrix is below the reciprocal of this.
const MAX_GRAM_CONDITION: f64 = 1e8;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

static SEQUENTIAL: Once = Once::new();

// faer would otherwise spawn its own worker pool inside our rayon tasks.
fn init_backend() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

fn to_faer(m: &ComplexMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize, m: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, m)
}

/// Builds a complex matrix from real entries.
pub fn from_real(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| C64::new(x, 0.0))
}

pub fn ensure_square(m: &ComplexMatrix, op: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(QmsError::Dimension(format!(
            "{op}: expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix, op: &str) -> Result<()> {
    if let Some((idx, _)) = m
        .iter()
        .enumerate()
        .find(|(_, z)| !z.re.is_finite() || !z.im.is_finite())
    {
        let (r, c) = (idx % m.nrows(), idx / m.nrows());
        return Err(QmsError::Validation(format!(
            "{op}: non-finite entry at ({r}, {c})"
        )));
    }
    Ok(())
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    init_backend();
    to_faer(m).singular_values().unwrap_or_else(|_| {
        m.clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    })
}

/// Operator 2-norm.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Schatten 1-norm without input validation. Hot path of every optimizer.
pub(crate) fn trace_norm_unchecked(m: &ComplexMatrix) -> f64 {
    match m.nrows() {
        0 => 0.0,
        1 => m[(0, 0)].norm(),
        2 => {
            // (s1 + s2)^2 = ‖M‖_F^2 + 2|det M|
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            (m.norm_squared() + 2.0 * det.norm()).max(0.0).sqrt()
        }
        _ => singular_values(m).iter().sum(),
    }
}

/// Sum of the singular values of a square matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    ensure_square(m, "trace_norm")?;
    ensure_finite(m, "trace_norm")?;
    Ok(trace_norm_unchecked(m))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
/// Only the lower triangle is read.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    ensure_square(m, "hermitian_eigen")?;
    init_backend();
    let evd = to_faer(m)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| QmsError::numeric("hermitian_eigen", format!("{e:?}")))?;
    let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, from_faer(evd.U())))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_square(m, "hermitian_eigenvalues")?;
    init_backend();
    to_faer(m)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| QmsError::numeric("hermitian_eigenvalues", format!("{e:?}")))
}

/// `(M + M†)/2`
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Right singular vectors belonging to the `k` smallest singular values,
/// i.e. an orthonormal basis of the numerical null space when `k` is its
/// dimension.
pub fn smallest_right_singular_vectors(m: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    init_backend();
    let svd = to_faer(m)
        .svd()
        .map_err(|e| QmsError::numeric("svd", format!("{e:?}")))?;
    let v = svd.V();
    let n = v.ncols();
    Ok(ComplexMatrix::from_fn(v.nrows(), k, |i, j| {
        v[(i, n - k + j)]
    }))
}

pub fn inverse(m: &ComplexMatrix, op: &'static str) -> Result<ComplexMatrix> {
    ensure_square(m, op)?;
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| QmsError::numeric(op, "matrix is singular"))?;
    ensure_finite(&inv, op).map_err(|_| QmsError::numeric(op, "inverse overflowed"))?;
    Ok(inv)
}

/// Ratio of extreme singular values; `inf` for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Column-stacking vectorization of a square matrix into a `d²×1` column.
pub fn vec(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = ensure_square(x, "vec")?;
    Ok(ComplexMatrix::from_fn(d * d, 1, |k, _| x[(k % d, k / d)]))
}

/// Inverse of [`vec`].
pub fn unvec(v: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    if v.ncols() != 1 || v.nrows() != d * d {
        return Err(QmsError::Dimension(format!(
            "unvec: expected a {}x1 column, got {}x{}",
            d * d,
            v.nrows(),
            v.ncols()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[(i + j * d, 0)]))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `e^{tM}` by scaling and squaring with a Padé approximant.
pub fn matrix_exp(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    ensure_square(m, "matrix_exp")?;
    ensure_finite(m, "matrix_exp")?;
    if !t.is_finite() {
        return Err(QmsError::Validation(
            "matrix_exp: time must be finite".into(),
        ));
    }
    let scaled = m.scale(t);
    let out = scaled.exp();
    ensure_finite(&out, "matrix_exp").map_err(|_| {
        QmsError::numeric(
            "matrix_exp",
            format!("overflow for ‖tM‖₂ ≈ {:.3e}", spectral_norm(&scaled)),
        )
    })?;
    Ok(out)
}

/// Eigendecomposition with biorthogonalized left eigenvectors.
///
/// Columns of `right_vectors` have unit 2-norm. Left vectors are scaled so
/// that `L† R = I` within every eigenvalue cluster that admits it; clusters
/// that do not (defective or nearly so) are listed in `defective_clusters`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<C64>,
    pub right_vectors: ComplexMatrix,
    pub left_vectors: ComplexMatrix,
    /// max ‖M r − λ r‖₂ over unit right eigenvectors.
    pub residual: f64,
    /// max |(L† R − I)_{ij}|
    pub biorthogonality_error: f64,
    /// Groups of indices into `eigenvalues` closer than the clustering tolerance.
    pub clusters: Vec<Vec<usize>>,
    pub defective_clusters: Vec<usize>,
    pub spectral_radius: f64,
}

impl EigenSystem {
    pub fn is_degenerate(&self) -> bool {
        !self.defective_clusters.is_empty()
    }

    /// `Σ λᵢ rᵢ lᵢ†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lam =
            ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
        &self.right_vectors * lam * self.left_vectors.adjoint()
    }

    /// Mean of the eigenvalues in one cluster.
    pub fn cluster_center(&self, cluster: usize) -> C64 {
        let idx = &self.clusters[cluster];
        idx.iter().map(|&i| self.eigenvalues[i]).sum::<C64>() / idx.len() as f64
    }
}

fn raw_eigen(m: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    init_backend();
    let evd = to_faer(m)
        .eigen()
        .map_err(|e| QmsError::numeric("eig", format!("no convergence: {e:?}")))?;
    let vals: Vec<C64> = evd.S().column_vector().iter().copied().collect();
    let mut vecs = from_faer(evd.U());
    for mut col in vecs.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= C64::new(n, 0.0);
        }
    }
    Ok((vals, vecs))
}

fn modulus_order(vals: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (vals[a], vals[b]);
        y.norm()
            .total_cmp(&x.norm())
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
    order
}

/// Single-linkage clustering of `vals` with absolute threshold `tol`.
/// Clusters are ordered by their first member.
pub fn cluster_values(vals: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (vals[i] - vals[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// General eigendecomposition. Eigenvalues are sorted by nonincreasing modulus.
pub fn eig(m: &ComplexMatrix) -> Result<EigenSystem> {
    let n = ensure_square(m, "eig")?;
    ensure_finite(m, "eig")?;
    if n == 0 {
        return Ok(EigenSystem {
            eigenvalues: Vec::new(),
            right_vectors: zeros(0, 0),
            left_vectors: zeros(0, 0),
            residual: 0.0,
            biorthogonality_error: 0.0,
            clusters: Vec::new(),
            defective_clusters: Vec::new(),
            spectral_radius: 0.0,
        });
    }

    let (vals_r, vecs_r) = raw_eigen(m)?;
    let order = modulus_order(&vals_r);
    let eigenvalues: Vec<C64> = order.iter().map(|&i| vals_r[i]).collect();
    let right = ComplexMatrix::from_fn(n, n, |i, j| vecs_r[(i, order[j])]);

    // Left eigenvectors of M are right eigenvectors of M† with conjugated eigenvalues.
    let (vals_l, vecs_l) = raw_eigen(&m.adjoint())?;

    let radius = eigenvalues[0].norm();
    let tol = TOL_CLUSTER * radius;
    let clusters = cluster_values(&eigenvalues, tol);

    let mut left = zeros(n, n);
    let mut used = vec![false; n];
    let mut defective = Vec::new();
    for (c, members) in clusters.iter().enumerate() {
        let center: C64 =
            members.iter().map(|&i| eigenvalues[i]).sum::<C64>() / members.len() as f64;
        // Take the |members| unused left eigenpairs closest to conj(center).
        let mut cand: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
        cand.sort_by(|&a, &b| {
            (vals_l[a].conj() - center)
                .norm()
                .total_cmp(&(vals_l[b].conj() - center).norm())
                .then(a.cmp(&b))
        });
        let picked: Vec<usize> = cand.into_iter().take(members.len()).collect();
        for &p in &picked {
            used[p] = true;
        }
        let l_c = ComplexMatrix::from_fn(n, members.len(), |i, j| vecs_l[(i, picked[j])]);
        let r_c = ComplexMatrix::from_fn(n, members.len(), |i, j| right[(i, members[j])]);
        let gram = l_c.adjoint() * &r_c;
        // Unit-norm columns: a tiny singular value of the Gram matrix means the
        // left and right eigenspaces are (nearly) orthogonal, i.e. a Jordan block.
        let gram_min = singular_values(&gram).last().copied().unwrap_or(0.0);
        let l_bi = if gram_min * MAX_GRAM_CONDITION > 1.0 {
            gram.clone()
                .try_inverse()
                .map(|g_inv| &l_c * g_inv.adjoint())
        } else {
            None
        };
        let l_final = match l_bi {
            Some(l) => l,
            None => {
                defective.push(c);
                l_c
            }
        };
        for (j, &col) in members.iter().enumerate() {
            left.set_column(col, &l_final.column(j));
        }
    }

    let residual = (0..n)
        .map(|j| (m * right.column(j) - right.column(j) * eigenvalues[j]).norm())
        .fold(0.0, f64::max);
    let biorthogonality_error = max_abs(&(left.adjoint() * &right - identity(n)));

    Ok(EigenSystem {
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        residual,
        biorthogonality_error,
        clusters,
        defective_clusters: defective,
        spectral_radius: radius,
    })
}

/// Eigenvalues only, sorted by nonincreasing modulus.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    ensure_square(m, "eigenvalues")?;
    init_backend();
    let vals = to_faer(m)
        .eigenvalues()
        .map_err(|e| QmsError::numeric("eigenvalues", format!("{e:?}")))?;
    let order = modulus_order(&vals);
    Ok(order.into_iter().map(|i| vals[i]).collect())
}

/// Number of singular values above `threshold`.
pub fn numerical_rank(m: &ComplexMatrix, threshold: f64) -> usize {
    singular_values(m)
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}
