//! Pointwise fiber geometry: compatible f-structures, almost contact metric
//! structures, the tangent spaces of the fiber manifolds, the fiber metric
//! `h`, the fiber complex structure `J`, the standard vertical basis and the
//! two-fold covering onto f-structures.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    endo_to_wedge, index_pairs, pair_count, random_orthogonal_with, seeded_rng, trace_metric,
    wedge_to_endo, SkewEndo, TwoVector,
};
use crate::scalar::{real, to_f64, Real};

/// Singular-value cutoff separating the exact f-structure spectrum {0, ±i}.
const RANK_CUTOFF: f64 = 1e-8;

/// Compatible partially complex structure (f-structure) of rank `2k`:
/// a skew endomorphism `F` with `F³ + F = 0`.
#[derive(Clone, Debug)]
pub struct FStructure<S: Real> {
    f: SkewEndo<S>,
    k: usize,
}

impl<S: Real> FStructure<S> {
    /// Validates the f-structure identity and detects the rank by singular values.
    pub fn try_new(f: SkewEndo<S>, tol: S) -> Result<Self> {
        let m = f.matrix();
        let cubic = m * m * m + m;
        let dev = cubic.norm();
        if dev > tol {
            return Err(Error::NotFStructure(format!(
                "F^3 + F deviates by {:e}",
                to_f64(dev)
            )));
        }
        let svals = m.clone().singular_values();
        let cutoff = real::<S>(RANK_CUTOFF);
        let mut rank = 0usize;
        for v in svals.iter() {
            if *v > cutoff {
                if (*v - S::one()).abs() > real(1e-6) {
                    return Err(Error::NotFStructure(format!(
                        "nonzero singular value {} differs from 1",
                        to_f64(*v)
                    )));
                }
                rank += 1;
            }
        }
        if !rank.is_multiple_of(2) || rank == 0 {
            return Err(Error::NotFStructure(format!("rank {rank} is not even")));
        }
        Ok(Self { f, k: rank / 2 })
    }

    pub fn from_parts_unchecked(f: SkewEndo<S>, k: usize) -> Self {
        Self { f, k }
    }

    pub fn endo(&self) -> &SkewEndo<S> {
        &self.f
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        self.f.matrix()
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Rank parameter `k` (rank F = 2k).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn apply(&self, x: &DVector<S>) -> DVector<S> {
        self.f.apply(x)
    }
}

/// Linear almost contact metric structure `(φ, ξ)` on the model space:
/// `φ² x = −x + g(x,ξ)ξ`, `g(φx,φy) = g(x,y) − g(x,ξ)g(y,ξ)`, `φξ = 0`,
/// `‖ξ‖ = 1`.
#[derive(Clone, Debug)]
pub struct AlmostContactStructure<S: Real> {
    phi: FStructure<S>,
    xi: DVector<S>,
}

impl<S: Real> AlmostContactStructure<S> {
    /// Validates the almost-contact identities to `tol`.
    pub fn try_new(phi: SkewEndo<S>, xi: DVector<S>, tol: S) -> Result<Self> {
        let n = phi.dim();
        if xi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: xi.len(),
            });
        }
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::EvenDimension(n));
        }
        if (xi.norm() - S::one()).abs() > tol {
            return Err(Error::NotAlmostContact(format!(
                "xi has norm {}",
                to_f64(xi.norm())
            )));
        }
        if phi.apply(&xi).norm() > tol {
            return Err(Error::NotAlmostContact("phi(xi) != 0".into()));
        }
        let m = phi.matrix();
        let expected = -DMatrix::<S>::identity(n, n) + &xi * xi.transpose();
        if (m * m - expected).norm() > tol * real(10.0) {
            return Err(Error::NotAlmostContact(
                "phi^2 != -Id + xi xi^T".to_string(),
            ));
        }
        let phi = FStructure::try_new(phi, tol)?;
        if 2 * phi.k() + 1 != n {
            return Err(Error::NotAlmostContact(format!(
                "phi has rank {} in dimension {}",
                2 * phi.k(),
                n
            )));
        }
        Ok(Self { phi, xi })
    }

    pub fn from_parts_unchecked(phi: FStructure<S>, xi: DVector<S>) -> Self {
        Self { phi, xi }
    }

    pub fn phi(&self) -> &FStructure<S> {
        &self.phi
    }

    pub fn xi(&self) -> &DVector<S> {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn k(&self) -> usize {
        self.phi.k()
    }
}

/// The canonical structure `φ = e_{12} + … + e_{2k−1,2k}`, `ξ = e_{2k+1}`.
pub fn canonical_structure<S: Real>(n: usize) -> Result<AlmostContactStructure<S>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::EvenDimension(n));
    }
    let k = (n - 1) / 2;
    let mut mat = DMatrix::<S>::zeros(n, n);
    for r in 0..k {
        mat[(2 * r + 1, 2 * r)] = S::one();
        mat[(2 * r, 2 * r + 1)] = -S::one();
    }
    let mut xi = DVector::zeros(n);
    xi[n - 1] = S::one();
    Ok(AlmostContactStructure {
        phi: FStructure::from_parts_unchecked(SkewEndo::from_matrix_unchecked(mat), k),
        xi,
    })
}

/// Random structure obtained by conjugating the canonical one with a seeded
/// random orthogonal map. Deterministic for a fixed seed.
pub fn random_structure<S: Real>(n: usize, seed: u64) -> Result<AlmostContactStructure<S>> {
    let mut rng = seeded_rng(seed);
    random_structure_with(n, &mut rng)
}

/// As [`random_structure`], drawing from a caller-managed RNG.
pub fn random_structure_with<S: Real>(
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<AlmostContactStructure<S>> {
    let canonical = canonical_structure::<S>(n)?;
    let a = random_orthogonal_with::<S>(n, rng);
    Ok(AlmostContactStructure {
        phi: FStructure::from_parts_unchecked(canonical.phi.f.conjugate(&a), canonical.k()),
        xi: &a * canonical.xi(),
    })
}

/// Dimension of the manifold of rank-`2k` compatible f-structures:
/// `2nk − 3k² − k`.
pub fn fk_dimension(n: usize, k: usize) -> Result<usize> {
    if k == 0 || 2 * k > n {
        return Err(Error::RankOutOfRange { n, k });
    }
    Ok(2 * n * k - 3 * k * k - k)
}

/// Scalar curvature of the fiber metric `h`: `½(n−k−1)(2nk−3k²−k)`.
pub fn fiber_scalar_curvature<S: Real>(n: usize, k: usize) -> Result<S> {
    let dim = fk_dimension(n, k)?;
    Ok(real::<S>(0.5) * real((n - k - 1) as f64) * real(dim as f64))
}

/// Residual of the fiber tangency condition `Qφ² + φQφ + φ²Q + Q = 0`.
pub fn tangency_residual<S: Real>(q: &SkewEndo<S>, phi: &FStructure<S>) -> S {
    let f = phi.matrix();
    let qm = q.matrix();
    let f2 = f * f;
    (qm * &f2 + f * qm * f + &f2 * qm + qm).norm()
}

/// Tests tangency to the fiber through `phi` at tolerance `tol`.
pub fn is_tangent<S: Real>(q: &SkewEndo<S>, phi: &FStructure<S>, tol: S) -> bool {
    tangency_residual(q, phi) <= tol
}

/// Matrix of the tangency operator `Q ↦ Qφ² + φQφ + φ²Q + Q` on the
/// `n(n−1)/2`-dimensional space of skew endomorphisms in wedge coordinates.
///
/// The operator is symmetric for the trace metric, so its kernel projection
/// is spectral.
pub fn tangency_operator_matrix<S: Real>(phi: &FStructure<S>) -> DMatrix<S> {
    let n = phi.dim();
    let np = pair_count(n);
    let f = phi.matrix();
    let f2 = f * f;
    let mut op = DMatrix::<S>::zeros(np, np);
    for (col, (i, j)) in index_pairs(n).iter().enumerate() {
        let q = SkewEndo::<S>::basis(n, *i, *j);
        let qm = q.matrix();
        let image = qm * &f2 + f * qm * f + &f2 * qm + qm;
        let w = endo_to_wedge(&SkewEndo::from_matrix_unchecked(image));
        op.set_column(col, w.components());
    }
    op
}

/// Orthonormal (for the trace metric) basis of the tangent space `m_φ`,
/// obtained as the kernel of the tangency operator.
pub fn tangent_kernel_basis<S: Real>(phi: &FStructure<S>) -> Vec<SkewEndo<S>> {
    let op = tangency_operator_matrix(phi);
    let eig = op.symmetric_eigen();
    let cutoff = real::<S>(RANK_CUTOFF);
    let mut basis = Vec::new();
    for (idx, lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= cutoff {
            let col = eig.eigenvectors.column(idx).into_owned();
            let w = TwoVector::from_components(phi.dim(), col).expect("kernel column");
            basis.push(wedge_to_endo(&w));
        }
    }
    basis
}

/// Dimension of `m_φ` computed by rank (kernel dimension of the tangency operator).
pub fn tangent_space_dimension<S: Real>(phi: &FStructure<S>) -> usize {
    tangent_kernel_basis(phi).len()
}

/// G-orthogonal projection of an arbitrary skew `Q` onto the tangent space `m_φ`.
///
/// Idempotent; fixes tangent inputs.
pub fn tangent_project<S: Real>(q: &SkewEndo<S>, phi: &FStructure<S>) -> SkewEndo<S> {
    let basis = tangent_kernel_basis(phi);
    let w = endo_to_wedge(q);
    let mut acc = TwoVector::zero(phi.dim());
    for b in &basis {
        let bw = endo_to_wedge(b);
        let coeff = bw.inner(&w);
        acc = &acc + &bw.scale(coeff);
    }
    wedge_to_endo(&acc)
}

/// Ambient bilinear extension of the fiber metric:
/// `h(P,Q) = 2G(P,Q) − G(φPφ, Q)` without tangency checks.
pub fn fiber_metric_h_raw<S: Real>(p: &SkewEndo<S>, q: &SkewEndo<S>, phi: &FStructure<S>) -> S {
    let f = phi.matrix();
    let fpf = SkewEndo::from_matrix_unchecked(f * p.matrix() * f);
    let g_pq = trace_metric(p, q).expect("matching dimensions");
    let g_fpf_q = trace_metric(&fpf, q).expect("matching dimensions");
    real::<S>(2.0) * g_pq - g_fpf_q
}

/// Fiber metric `h(P,Q) = 2G(P,Q) − G(φPφ, Q)` on tangent arguments.
pub fn fiber_metric_h<S: Real>(
    p: &SkewEndo<S>,
    q: &SkewEndo<S>,
    phi: &FStructure<S>,
) -> Result<S> {
    for arg in [p, q] {
        let res = tangency_residual(arg, phi);
        if res > real(1e-8) {
            return Err(Error::NotTangent(to_f64(res)));
        }
    }
    Ok(fiber_metric_h_raw(p, q, phi))
}

/// Fiber complex structure `J Q = φQ − Qφ + φQφ²` on tangent arguments.
///
/// `J` preserves `m_φ`, squares to −Id there and is an `h`-isometry.
pub fn fiber_complex_structure<S: Real>(
    q: &SkewEndo<S>,
    phi: &FStructure<S>,
) -> Result<SkewEndo<S>> {
    let res = tangency_residual(q, phi);
    if res > real(1e-8) {
        return Err(Error::NotTangent(to_f64(res)));
    }
    let f = phi.matrix();
    let qm = q.matrix();
    let f2 = f * f;
    Ok(SkewEndo::from_matrix_unchecked(
        f * qm - qm * f + f * qm * &f2,
    ))
}

fn check_orthonormal<S: Real>(frame: &DMatrix<S>) -> Result<()> {
    let n = frame.nrows();
    let dev = (frame.transpose() * frame - DMatrix::<S>::identity(n, n)).norm();
    if dev > real(1e-8) {
        return Err(Error::FrameNotOrthonormal(to_f64(dev)));
    }
    Ok(())
}

/// The `h`-orthonormal vertical basis `{A'_pq, A''_pq, B'_r, B''_r}` of `m_φ`
/// at the image of the canonical structure under the orthonormal `frame`:
///
/// * `A'_pq = (1/√2)(e_{2p−1,2q−1} − e_{2p,2q})`,
///   `A''_pq = (1/√2)(e_{2p−1,2q} + e_{2p,2q−1})` for `1 ≤ p < q ≤ k`,
/// * `B'_r = (1/√2) e_{2r−1,2k+1}`, `B''_r = (1/√2) e_{2r,2k+1}` for `r ≤ k`,
///
/// expressed in that frame. Contains `k² + k` elements, with
/// `J A'_pq = A''_pq` and `J B'_r = B''_r`.
pub fn standard_vertical_basis<S: Real>(frame: &DMatrix<S>) -> Result<Vec<SkewEndo<S>>> {
    let n = frame.nrows();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::EvenDimension(n));
    }
    check_orthonormal(frame)?;
    let k = (n - 1) / 2;
    let inv_sqrt2 = S::one() / real::<S>(2.0).sqrt();
    let b = |i: usize, j: usize| SkewEndo::<S>::basis(n, i, j);
    let mut basis = Vec::with_capacity(k * k + k);
    for p in 0..k {
        for q in (p + 1)..k {
            let a1 = (&b(2 * p, 2 * q) - &b(2 * p + 1, 2 * q + 1)).scale(inv_sqrt2);
            let a2 = (&b(2 * p, 2 * q + 1) + &b(2 * p + 1, 2 * q)).scale(inv_sqrt2);
            basis.push(a1);
            basis.push(a2);
        }
    }
    for r in 0..k {
        basis.push(b(2 * r, n - 1).scale(inv_sqrt2));
        basis.push(b(2 * r + 1, n - 1).scale(inv_sqrt2));
    }
    Ok(basis.into_iter().map(|u| u.conjugate(frame)).collect())
}

/// Orthonormal frame adapted to `σ = (φ, ξ)`: columns `(v_1, φv_1, …, v_k,
/// φv_k, ξ)`, so that the canonical structure maps onto `σ` under it.
pub fn adapted_frame<S: Real>(sigma: &AlmostContactStructure<S>) -> DMatrix<S> {
    let n = sigma.dim();
    let k = sigma.k();
    let xi = sigma.xi();
    let mut cols: Vec<DVector<S>> = Vec::with_capacity(n);
    let mut candidates = 0usize;
    for _ in 0..k {
        // next standard basis vector with a usable component orthogonal to
        // xi and to everything already chosen
        loop {
            assert!(candidates < n, "ran out of frame candidates");
            let mut v = DVector::<S>::zeros(n);
            v[candidates] = S::one();
            candidates += 1;
            v -= xi * xi.dot(&v);
            for c in &cols {
                let coeff = c.dot(&v);
                v -= c * coeff;
            }
            let norm = v.norm();
            if norm > real(1e-6) {
                v /= norm;
                let fv = sigma.phi().apply(&v);
                cols.push(v);
                cols.push(fv);
                break;
            }
        }
    }
    cols.push(xi.clone());
    DMatrix::from_columns(&cols)
}

/// `h`-orthonormal basis of `m_φ` for an arbitrary structure, via the
/// adapted frame and the standard basis.
pub fn vertical_basis<S: Real>(sigma: &AlmostContactStructure<S>) -> Vec<SkewEndo<S>> {
    standard_vertical_basis(&adapted_frame(sigma)).expect("adapted frame is orthonormal")
}

/// Two-fold covering onto f-structures: `(φ, ξ) ↦ φ`.
pub fn covering_project<S: Real>(sigma: &AlmostContactStructure<S>) -> FStructure<S> {
    sigma.phi.clone()
}

/// Orientation component of a 3-dimensional structure: the sign of
/// `det(u, φu, ξ)` for any unit `u ⊥ ξ`.
pub fn orientation_class<S: Real>(sigma: &AlmostContactStructure<S>) -> Result<i8> {
    if sigma.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: sigma.dim(),
        });
    }
    let frame = adapted_frame(sigma);
    let det = frame.determinant();
    Ok(if det > S::zero() { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_skew;
    use crate::scalar::default_tol;

    fn canonical(n: usize) -> AlmostContactStructure<f64> {
        canonical_structure::<f64>(n).unwrap()
    }

    #[test]
    fn canonical_structure_small_dims() {
        let s3 = canonical(3);
        assert_eq!(s3.k(), 1);
        let e12 = SkewEndo::<f64>::basis(3, 0, 1);
        assert!(s3.phi().endo().distance(&e12) < 1e-15);
        assert_eq!(s3.xi()[2], 1.0);

        let s5 = canonical(5);
        let expected = &SkewEndo::<f64>::basis(5, 0, 1) + &SkewEndo::<f64>::basis(5, 2, 3);
        assert!(s5.phi().endo().distance(&expected) < 1e-15);
        assert_eq!(s5.xi()[4], 1.0);

        // invariants via the validating constructor
        AlmostContactStructure::try_new(s3.phi().endo().clone(), s3.xi().clone(), default_tol())
            .unwrap();
        canonical_structure::<f64>(4).unwrap_err();
    }

    #[test]
    fn random_structure_valid_and_deterministic() {
        for n in [3usize, 5, 7] {
            let s = random_structure::<f64>(n, 9).unwrap();
            AlmostContactStructure::try_new(s.phi().endo().clone(), s.xi().clone(), default_tol())
                .unwrap();
            assert_eq!(covering_project(&s).k(), (n - 1) / 2);
            let s2 = random_structure::<f64>(n, 9).unwrap();
            assert_eq!(s.phi().matrix(), s2.phi().matrix());
            assert_eq!(s.xi(), s2.xi());
        }
    }

    #[test]
    fn dimension_and_scalar_curvature_formulas() {
        assert_eq!(fk_dimension(3, 1).unwrap(), 2);
        assert_eq!(fk_dimension(5, 2).unwrap(), 6);
        assert_eq!(fk_dimension(7, 3).unwrap(), 12);
        assert!(fk_dimension(3, 2).is_err());
        assert_eq!(fiber_scalar_curvature::<f64>(3, 1).unwrap(), 1.0);
        assert_eq!(fiber_scalar_curvature::<f64>(5, 2).unwrap(), 6.0);
    }

    #[test]
    fn tangency_examples_n3() {
        let phi = canonical(3).phi().clone();
        let e13 = SkewEndo::<f64>::basis(3, 0, 2);
        let e12 = SkewEndo::<f64>::basis(3, 0, 1);
        assert!(is_tangent(&e13, &phi, 1e-10));
        assert!(!is_tangent(&e12, &phi, 1e-10));
    }

    #[test]
    fn tangent_projection_is_idempotent() {
        let mut rng = seeded_rng(21);
        for n in [3usize, 5] {
            let sigma = random_structure_with::<f64>(n, &mut rng).unwrap();
            let phi = sigma.phi();
            let q = random_skew::<f64>(n, &mut rng);
            let p1 = tangent_project(&q, phi);
            let p2 = tangent_project(&p1, phi);
            assert!(is_tangent(&p1, phi, 1e-9));
            assert!(p1.distance(&p2) < 1e-10);
            // fixes tangent inputs
            let basis = tangent_kernel_basis(phi);
            for b in &basis {
                assert!(tangent_project(b, phi).distance(b) < 1e-10);
            }
        }
    }

    #[test]
    fn tangent_space_dimension_matches_formula() {
        let mut rng = seeded_rng(33);
        for n in [3usize, 5, 7] {
            let k = (n - 1) / 2;
            let sigma = random_structure_with::<f64>(n, &mut rng).unwrap();
            assert_eq!(
                tangent_space_dimension(sigma.phi()),
                fk_dimension(n, k).unwrap()
            );
        }
    }

    #[test]
    fn fiber_metric_examples() {
        let phi = canonical(3).phi().clone();
        let e13 = SkewEndo::<f64>::basis(3, 0, 2);
        assert!((fiber_metric_h(&e13, &e13, &phi).unwrap() - 2.0).abs() < 1e-12);
        let half = e13.scale(1.0 / 2.0_f64.sqrt());
        assert!((fiber_metric_h(&half, &half, &phi).unwrap() - 1.0).abs() < 1e-12);
        // non-tangent input is rejected
        let e12 = SkewEndo::<f64>::basis(3, 0, 1);
        assert!(fiber_metric_h(&e12, &e13, &phi).is_err());
    }

    #[test]
    fn fiber_metric_symmetric_on_random_tangents() {
        let mut rng = seeded_rng(4);
        let sigma = random_structure_with::<f64>(5, &mut rng).unwrap();
        let phi = sigma.phi();
        let p = tangent_project(&random_skew::<f64>(5, &mut rng), phi);
        let q = tangent_project(&random_skew::<f64>(5, &mut rng), phi);
        let hpq = fiber_metric_h(&p, &q, phi).unwrap();
        let hqp = fiber_metric_h(&q, &p, phi).unwrap();
        assert!((hpq - hqp).abs() < 1e-12);
    }

    #[test]
    fn complex_structure_examples() {
        let phi = canonical(3).phi().clone();
        let e13 = SkewEndo::<f64>::basis(3, 0, 2);
        let e23 = SkewEndo::<f64>::basis(3, 1, 2);
        let j = fiber_complex_structure(&e13, &phi).unwrap();
        assert!(j.distance(&e23) < 1e-12);

        let mut rng = seeded_rng(8);
        for n in [3usize, 5, 7] {
            let sigma = random_structure_with::<f64>(n, &mut rng).unwrap();
            let phi = sigma.phi();
            let q = tangent_project(&random_skew::<f64>(n, &mut rng), phi);
            let jq = fiber_complex_structure(&q, phi).unwrap();
            // J maps m_phi to m_phi and squares to -Id there
            assert!(is_tangent(&jq, phi, 1e-8));
            let jjq = fiber_complex_structure(&jq, phi).unwrap();
            assert!((&jjq + &q).matrix().norm() < 1e-9);
            // isometry
            let h_q = fiber_metric_h(&q, &q, phi).unwrap();
            let h_jq = fiber_metric_h(&jq, &jq, phi).unwrap();
            assert!((h_q - h_jq).abs() < 1e-9);
        }
    }

    #[test]
    fn standard_basis_n3() {
        let frame = DMatrix::<f64>::identity(3, 3);
        let basis = standard_vertical_basis(&frame).unwrap();
        assert_eq!(basis.len(), 2);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert!(basis[0].distance(&SkewEndo::basis(3, 0, 2).scale(inv_sqrt2)) < 1e-15);
        assert!(basis[1].distance(&SkewEndo::basis(3, 1, 2).scale(inv_sqrt2)) < 1e-15);
    }

    #[test]
    fn standard_basis_h_orthonormal_and_j_paired() {
        for (n, seed) in [(3usize, 2u64), (5, 3), (7, 4)] {
            let a = crate::linalg::random_orthogonal::<f64>(n, seed);
            let basis = standard_vertical_basis(&a).unwrap();
            let k = (n - 1) / 2;
            assert_eq!(basis.len(), k * k + k);
            assert_eq!(basis.len(), fk_dimension(n, k).unwrap());

            let canonical = canonical_structure::<f64>(n).unwrap();
            let sigma = AlmostContactStructure::from_parts_unchecked(
                FStructure::from_parts_unchecked(canonical.phi().endo().conjugate(&a), k),
                &a * canonical.xi(),
            );
            let phi = sigma.phi();
            for (i, p) in basis.iter().enumerate() {
                assert!(is_tangent(p, phi, 1e-8));
                for (j, q) in basis.iter().enumerate() {
                    let h = fiber_metric_h(p, q, phi).unwrap();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((h - expected).abs() < 1e-10, "Gram deviation at ({i},{j})");
                }
            }
            // J pairs consecutive elements
            for pair in basis.chunks(2) {
                let j0 = fiber_complex_structure(&pair[0], phi).unwrap();
                assert!(j0.distance(&pair[1]) < 1e-9);
            }
        }
    }

    #[test]
    fn standard_basis_rejects_bad_frame() {
        let mut frame = DMatrix::<f64>::identity(3, 3);
        frame[(0, 0)] = 2.0;
        assert!(matches!(
            standard_vertical_basis(&frame),
            Err(Error::FrameNotOrthonormal(_))
        ));
    }

    #[test]
    fn adapted_frame_reproduces_structure() {
        let mut rng = seeded_rng(77);
        for n in [3usize, 5, 7] {
            let sigma = random_structure_with::<f64>(n, &mut rng).unwrap();
            let frame = adapted_frame(&sigma);
            check_orthonormal(&frame).unwrap();
            let canonical = canonical_structure::<f64>(n).unwrap();
            let phi = canonical.phi().endo().conjugate(&frame);
            assert!(phi.distance(sigma.phi().endo()) < 1e-9);
            assert!((&frame * canonical.xi() - sigma.xi()).norm() < 1e-9);
        }
    }

    #[test]
    fn covering_and_orientation() {
        let s = canonical(3);
        let flipped =
            AlmostContactStructure::from_parts_unchecked(s.phi().clone(), -s.xi().clone());
        assert!(covering_project(&s)
            .endo()
            .distance(covering_project(&flipped).endo())
            .abs()
            < 1e-15);
        assert_eq!(orientation_class(&s).unwrap(), 1);
        assert_eq!(orientation_class(&flipped).unwrap(), -1);
        assert!(orientation_class(&canonical(5)).is_err());
    }

    #[test]
    fn h_and_j_are_o_invariant() {
        let mut rng = seeded_rng(91);
        for n in [3usize, 5] {
            let sigma = canonical_structure::<f64>(n).unwrap();
            let phi = sigma.phi();
            let p = tangent_project(&random_skew::<f64>(n, &mut rng), phi);
            let q = tangent_project(&random_skew::<f64>(n, &mut rng), phi);
            let a = random_orthogonal_with::<f64>(n, &mut rng);
            let phi_a = FStructure::from_parts_unchecked(phi.endo().conjugate(&a), phi.k());
            let pa = p.conjugate(&a);
            let qa = q.conjugate(&a);
            let h = fiber_metric_h(&p, &q, phi).unwrap();
            let ha = fiber_metric_h(&pa, &qa, &phi_a).unwrap();
            assert!((h - ha).abs() < 1e-10);
            let j = fiber_complex_structure(&q, phi).unwrap().conjugate(&a);
            let ja = fiber_complex_structure(&qa, &phi_a).unwrap();
            assert!(j.distance(&ja) < 1e-10);
        }
    }

    #[test]
    fn vertical_pairing_is_injective() {
        // the map Q -> (Q, phi Q xi) is a graph over m_phi: the paired
        // vector is linear in Q, so injectivity is the statement that the
        // first component alone separates points
        let mut rng = seeded_rng(55);
        let sigma = random_structure_with::<f64>(5, &mut rng).unwrap();
        let basis = tangent_kernel_basis(sigma.phi());
        assert_eq!(basis.len(), fk_dimension(5, 2).unwrap());
        for b in &basis {
            assert!(b.matrix().norm() > 1e-8);
            let paired = sigma.phi().apply(&b.apply(sigma.xi()));
            // tangency pairs (Q, phi Q xi); check the advertised pairing
            let direct = sigma.phi().matrix() * b.matrix() * sigma.xi();
            assert!((paired - direct).norm() < 1e-12);
        }
    }
}
