//! Symmetric eigensolves, singular values, counting utilities and weak
//! Schatten quasinorms, plus matrix-level checks of the variational
//! principle and Fan's inequality.
//!
//! Ordering is deterministic: values sort descending with ties broken by
//! original index, so repeated runs produce identical counts.

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

/// A sorted spectrum (descending), either symmetric-matrix eigenvalues or
/// singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SpectrumKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    EigenvaluesSymmetric,
    SingularValues,
}

impl Spectrum {
    pub fn from_sorted(values: Vec<f64>, kind: SpectrumKind) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        Spectrum { values, kind }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of entries `>= r`.
    pub fn count_ge(&self, r: f64) -> usize {
        self.values.iter().take_while(|&&v| v >= r).count()
    }

    /// Weak quasinorm `sup_j (j+1)^{1/p} s_j` over the finite list.
    /// Entries must be nonnegative; tiny eigensolver noise below
    /// `-1e-12 * s_0` is rejected, smaller negatives are clamped to zero.
    pub fn weak_quasinorm(&self, p: f64) -> Result<f64> {
        assert!(p >= 1.0);
        let scale = self.values.first().copied().unwrap_or(0.0).abs();
        let mut sup = 0.0f64;
        for (j, &v) in self.values.iter().enumerate() {
            if v < -1e-12 * scale.max(1e-300) {
                return Err(Error::NegativeEntry(v));
            }
            let term = ((j + 1) as f64).powf(1.0 / p) * v.max(0.0);
            if term > sup {
                sup = term;
            }
        }
        Ok(sup)
    }
}

/// Relative symmetry defect `max|A - A^T| / max|A|`.
pub fn symmetry_defect(m: MatRef<'_, f64>) -> f64 {
    let (r, c) = (m.nrows(), m.ncols());
    if r != c {
        return f64::INFINITY;
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..r {
        for j in 0..c {
            num = num.max((m[(i, j)] - m[(j, i)]).abs());
            den = den.max(m[(i, j)].abs());
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Full spectrum of a symmetric matrix, descending.
pub fn eigh_descending(m: MatRef<'_, f64>) -> Result<Spectrum> {
    if m.nrows() == 0 {
        return Ok(Spectrum::from_sorted(vec![], SpectrumKind::EigenvaluesSymmetric));
    }
    let defect = symmetry_defect(m);
    if defect > 1e-10 {
        return Err(Error::NotSymmetric(defect));
    }
    let evd = m.self_adjoint_eigen(Side::Lower).expect("eigendecomposition failed");
    let n = m.nrows();
    let mut vals: Vec<f64> = (0..n).map(|i| evd.S()[i]).collect();
    sort_descending(&mut vals);
    Ok(Spectrum::from_sorted(vals, SpectrumKind::EigenvaluesSymmetric))
}

/// Spectrum plus orthonormal eigenvectors (columns, same order as values).
pub fn eigh_descending_with_vectors(m: MatRef<'_, f64>) -> Result<(Spectrum, Mat<f64>)> {
    let defect = symmetry_defect(m);
    if defect > 1e-10 {
        return Err(Error::NotSymmetric(defect));
    }
    let evd = m.self_adjoint_eigen(Side::Lower).expect("eigendecomposition failed");
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    let s = evd.S();
    idx.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap().then(a.cmp(&b)));
    let vals = idx.iter().map(|&i| s[i]).collect();
    let u = evd.U();
    let q = Mat::from_fn(n, n, |i, j| u[(i, idx[j])]);
    Ok((Spectrum::from_sorted(vals, SpectrumKind::EigenvaluesSymmetric), q))
}

/// Singular values of a real matrix, descending.
pub fn singular_values(m: MatRef<'_, f64>) -> Spectrum {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Spectrum::from_sorted(vec![], SpectrumKind::SingularValues);
    }
    let svd = m.svd().expect("svd failed");
    let k = m.nrows().min(m.ncols());
    let mut vals: Vec<f64> = (0..k).map(|i| svd.S()[i]).collect();
    sort_descending(&mut vals);
    Spectrum::from_sorted(vals, SpectrumKind::SingularValues)
}

/// Singular values of a complex matrix, descending.
pub fn singular_values_complex(m: MatRef<'_, c64>) -> Spectrum {
    let svd = m.svd().expect("svd failed");
    let k = m.nrows().min(m.ncols());
    let mut vals: Vec<f64> = (0..k).map(|i| svd.S()[i].re).collect();
    sort_descending(&mut vals);
    Spectrum::from_sorted(vals, SpectrumKind::SingularValues)
}

fn sort_descending(vals: &mut [f64]) {
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending. Used for
/// Golub-Welsch quadrature nodes.
pub fn sym_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n);
    let m = Mat::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j || j + 1 == i {
            off[i.min(j)]
        } else {
            0.0
        }
    });
    let evd = m.self_adjoint_eigen(Side::Lower).expect("eigendecomposition failed");
    let mut vals: Vec<f64> = (0..n).map(|i| evd.S()[i]).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Outcome of one `N_{>=1}(K) <= dim F + N_{>=1}(P K P)` check.
#[derive(Debug, Clone)]
pub struct VariationalReport {
    pub lhs: usize,
    pub dim_f: usize,
    pub projected_count: usize,
    pub holds: bool,
    /// Worst signed violation of the interlacing
    /// `lambda_{D+k}(K) <= lambda_k(P K P)`; nonpositive means it holds.
    pub interlacing_defect: f64,
}

/// Check the subspace-counting bound and eigenvalue interlacing for a PSD
/// matrix `k` against the span of `basis` (rows are grid vectors, not
/// necessarily orthonormal).
pub fn variational_check(k: MatRef<'_, f64>, basis: &[Vec<f64>]) -> Result<VariationalReport> {
    let n = k.nrows();
    let spec = eigh_descending(k)?;
    let min = spec.values().last().copied().unwrap_or(0.0);
    let scale = spec.values().first().copied().unwrap_or(0.0).abs();
    if min < -1e-10 * scale.max(1.0) {
        return Err(Error::NotPsd(min));
    }
    let q = orthonormalize(basis, n, 1e-10);
    let dim_f = q.len();
    // P K P with P = I - sum q q^T
    let mut kp = k.to_owned();
    project_out(&mut kp, &q);
    let spec_p = eigh_descending(kp.as_ref())?;
    let lhs = spec.count_ge(1.0);
    let projected_count = spec_p.count_ge(1.0);
    let holds = lhs <= dim_f + projected_count;
    let mut defect = f64::NEG_INFINITY;
    for kk in 0..n.saturating_sub(dim_f) {
        let lhs_v = spec.values()[dim_f + kk];
        let rhs_v = spec_p.values()[kk];
        defect = defect.max(lhs_v - rhs_v);
    }
    Ok(VariationalReport {
        lhs,
        dim_f,
        projected_count,
        holds,
        interlacing_defect: defect,
    })
}

/// Gram-Schmidt with drop tolerance relative to the largest row norm.
pub fn orthonormalize(basis: &[Vec<f64>], n: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    let max_norm = basis
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if max_norm == 0.0 {
        return q;
    }
    for v in basis {
        assert_eq!(v.len(), n);
        let mut u = v.clone();
        for _ in 0..2 {
            for qv in &q {
                let c: f64 = qv.iter().zip(&u).map(|(a, b)| a * b).sum();
                for (ui, qi) in u.iter_mut().zip(qv) {
                    *ui -= c * qi;
                }
            }
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol * max_norm {
            for ui in u.iter_mut() {
                *ui /= norm;
            }
            q.push(u);
        }
    }
    q
}

/// Conjugate `m` in place by the projector onto the complement of
/// `span(q)`, then symmetrize (projection of a symmetric matrix is
/// symmetric; enforcing it removes roundoff asymmetry that would
/// otherwise dominate when the projector annihilates most of `m`).
pub fn project_out(m: &mut Mat<f64>, q: &[Vec<f64>]) {
    let n = m.nrows();
    for qv in q {
        // m <- (I - q q^T) m (I - q q^T), applied as rank-1 updates
        let mq: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)] * qv[j]).sum())
            .collect();
        let qm: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| qv[i] * m[(i, j)]).sum())
            .collect();
        let qmq: f64 = (0..n).map(|i| qv[i] * mq[i]).sum();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += -qv[i] * qm[j] - mq[i] * qv[j] + qmq * qv[i] * qv[j];
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// One Fan-inequality instance on singular values,
/// `mu_m(A+B) <= mu_{ceil(m/2)}(A) + mu_{ceil(m/2)}(B)` (1-based `m`).
#[derive(Debug, Clone, Copy)]
pub struct FanReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn fan_check(a: MatRef<'_, f64>, b: MatRef<'_, f64>, m: usize) -> Result<FanReport> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::MatrixShapeMismatch(a.nrows(), a.ncols(), b.nrows(), b.ncols()));
    }
    assert!(m >= 1);
    let sum = a.to_owned() + b.to_owned();
    let mu_sum = singular_values(sum.as_ref());
    let mu_a = singular_values(a);
    let mu_b = singular_values(b);
    let at = |s: &Spectrum, k: usize| s.values().get(k - 1).copied().unwrap_or(0.0);
    let half = m.div_ceil(2);
    let lhs = at(&mu_sum, m);
    let rhs = at(&mu_a, half) + at(&mu_b, half);
    Ok(FanReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12 * rhs.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn diag(vals: &[f64]) -> Mat<f64> {
        Mat::from_fn(vals.len(), vals.len(), |i, j| if i == j { vals[i] } else { 0.0 })
    }

    #[test]
    fn eigh_sorts_descending() {
        let s = eigh_descending(diag(&[1.0, 3.0, 2.0]).as_ref()).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn eigh_identity() {
        let m = Mat::<f64>::identity(5, 5);
        let s = eigh_descending(m.as_ref()).unwrap();
        assert!(s.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn eigh_rejects_nonsymmetric() {
        let m = Mat::from_fn(2, 2, |i, j| (i * 2 + j) as f64);
        assert!(matches!(eigh_descending(m.as_ref()), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn weak_quasinorm_directly() {
        let s = Spectrum::from_sorted(vec![4.0, 2.0, 1.0], SpectrumKind::SingularValues);
        assert_relative_eq!(s.weak_quasinorm(1.0).unwrap(), 4.0);
        let ones = Spectrum::from_sorted(vec![1.0; 9], SpectrumKind::SingularValues);
        assert_relative_eq!(ones.weak_quasinorm(2.0).unwrap(), 3.0);
        let empty = Spectrum::from_sorted(vec![], SpectrumKind::SingularValues);
        assert_relative_eq!(empty.weak_quasinorm(1.0).unwrap(), 0.0);
    }

    #[test]
    fn weak_quasinorm_rejects_negative() {
        let s = Spectrum::from_sorted(vec![1.0, -0.5], SpectrumKind::EigenvaluesSymmetric);
        assert!(matches!(s.weak_quasinorm(1.0), Err(Error::NegativeEntry(_))));
    }

    #[test]
    fn count_ge_basics() {
        let s = Spectrum::from_sorted(vec![2.0, 1.0, 0.5], SpectrumKind::EigenvaluesSymmetric);
        assert_eq!(s.count_ge(1.0), 2);
        assert_eq!(s.count_ge(3.0), 0);
    }

    #[test]
    fn counting_by_quasinorm_on_random_psd() {
        // N_{>=1}(K) <= ||K||*_{1,inf}
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(2..12);
            let a = Mat::from_fn(n, n, |_, _| rng.random::<f64>() - 0.3);
            let k = &a * a.transpose();
            let s = eigh_descending(k.as_ref()).unwrap();
            let count = s.count_ge(1.0);
            let wn = s.weak_quasinorm(1.0).unwrap();
            assert!((count as f64) <= wn + 1e-9);
        }
    }

    #[test]
    fn variational_diagonal_case() {
        let k = diag(&[2.0, 2.0, 0.5]);
        let e1 = vec![1.0, 0.0, 0.0];
        let rep = variational_check(k.as_ref(), &[e1]).unwrap();
        assert_eq!(rep.lhs, 2);
        assert_eq!(rep.dim_f, 1);
        assert_eq!(rep.projected_count, 1);
        assert!(rep.holds);
    }

    #[test]
    fn variational_identity_equality() {
        let n = 6;
        let k = Mat::<f64>::identity(n, n);
        let basis: Vec<Vec<f64>> = (0..2)
            .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let rep = variational_check(k.as_ref(), &basis).unwrap();
        assert_eq!(rep.lhs, n);
        assert_eq!(rep.dim_f + rep.projected_count, n);
        assert!(rep.holds);
    }

    #[test]
    fn variational_rejects_indefinite_input() {
        let k = diag(&[1.0, -1.0]);
        assert!(matches!(
            variational_check(k.as_ref(), &[]),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn fan_identity_halves() {
        let n = 4;
        let a = Mat::<f64>::identity(n, n) * 0.5;
        for m in 1..=n {
            let rep = fan_check(a.as_ref(), a.as_ref(), m).unwrap();
            assert!(rep.holds, "m themselves = {m}");
            assert_relative_eq!(rep.lhs, 1.0);
            assert_relative_eq!(rep.rhs, 1.0);
        }
    }

    #[test]
    fn fan_zero_second_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Mat::from_fn(5, 5, |_, _| rng.random::<f64>());
        let b = Mat::<f64>::zeros(5, 5);
        for m in 1..=5 {
            assert!(fan_check(a.as_ref(), b.as_ref(), m).unwrap().holds);
        }
    }

    #[test]
    fn fan_shape_mismatch() {
        let a = Mat::<f64>::zeros(2, 2);
        let b = Mat::<f64>::zeros(3, 3);
        assert!(matches!(
            fan_check(a.as_ref(), b.as_ref(), 1),
            Err(Error::MatrixShapeMismatch(..))
        ));
    }

    #[test]
    fn minmax_consistency_small_matrices() {
        // lambda_j from eigh vs brute-force min-max over sampled subspaces:
        // the eigenvector construction attains the value (upper bound
        // direction), random subspaces never go below it.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = rng.random_range(2..=6usize);
            let a = Mat::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
            let k = &a * a.transpose();
            let (spec, vecs) = eigh_descending_with_vectors(k.as_ref()).unwrap();
            for j in 0..n {
                // optimal subspace: top-j eigenvectors
                let opt: Vec<Vec<f64>> = (0..j)
                    .map(|c| (0..n).map(|r| vecs[(r, c)]).collect())
                    .collect();
                let mut kp = k.clone();
                project_out(&mut kp, &opt);
                let top = eigh_descending(kp.as_ref()).unwrap().values()[0];
                assert_relative_eq!(top, spec.values()[j], epsilon = 1e-8, max_relative = 1e-8);
                // sampled subspaces give values >= lambda_j
                for _ in 0..20 {
                    let basis: Vec<Vec<f64>> = (0..j)
                        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
                        .collect();
                    let q = orthonormalize(&basis, n, 1e-12);
                    let mut kp = k.clone();
                    project_out(&mut kp, &q);
                    let top = eigh_descending(kp.as_ref()).unwrap().values()[0];
                    assert!(top >= spec.values()[j] - 1e-8);
                }
            }
        }
    }

    #[test]
    fn quasinorm_homogeneous_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let mut v: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let s = Spectrum::from_sorted(v.clone(), SpectrumKind::SingularValues);
            let t = 1.0 + rng.random::<f64>() * 3.0;
            let scaled = Spectrum::from_sorted(
                v.iter().map(|x| t * x).collect(),
                SpectrumKind::SingularValues,
            );
            for p in [1.0, 2.0, 3.0] {
                let a = s.weak_quasinorm(p).unwrap();
                let b = scaled.weak_quasinorm(p).unwrap();
                assert_relative_eq!(b, t * a, max_relative = 1e-12);
            }
        }
    }
}
