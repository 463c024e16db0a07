//! Small dense linear algebra shared by every module: skew endomorphisms,
//! two-vectors, the wedge identification, the trace metric, interior
//! products, orthonormalization and seeded sampling.
//!
//! Two-vector components are always stored on the lexicographic basis
//! `{e_i ∧ e_j, i < j}`, which is orthonormal for the inner product
//! `g(x1∧x2, x3∧x4) = g(x1,x3)g(x2,x4) − g(x1,x4)g(x2,x3)`.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

/// Number of lexicographic index pairs `(i,j)`, `i < j`, in dimension `n`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of the pair `(i,j)` (`i < j`) in the lexicographic basis of Λ².
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (n - 1) - i * (i + 1) / 2 + j - 1
}

/// Lexicographic list of index pairs for dimension `n`.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Skew-symmetric endomorphism of the model Euclidean space.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewEndo<S: Real> {
    mat: DMatrix<S>,
}

impl<S: Real> SkewEndo<S> {
    /// Wraps a matrix after checking skew-symmetry to `tol`.
    pub fn try_new(mat: DMatrix<S>, tol: S) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let mut worst = S::zero();
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                let dev = (mat[(i, j)] + mat[(j, i)]).abs();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        if worst > tol {
            return Err(Error::NotSkew(to_f64(worst)));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is skew by construction.
    pub fn from_matrix_unchecked(mat: DMatrix<S>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat }
    }

    /// The zero endomorphism.
    pub fn zero(n: usize) -> Self {
        Self {
            mat: DMatrix::zeros(n, n),
        }
    }

    /// Basis endomorphism `e_{ij}`: sends `e_i → e_j`, `e_j → −e_i`, rest to 0.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n && i != j, "basis indices out of range");
        let mut mat = DMatrix::zeros(n, n);
        mat[(j, i)] = S::one();
        mat[(i, j)] = -S::one();
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.mat
    }

    /// Applies the endomorphism to a vector.
    pub fn apply(&self, x: &DVector<S>) -> DVector<S> {
        &self.mat * x
    }

    /// Conjugation `A S Aᵀ` (push-forward along the orthogonal map `A`).
    pub fn conjugate(&self, a: &DMatrix<S>) -> Self {
        Self {
            mat: a * &self.mat * a.transpose(),
        }
    }

    pub fn scale(&self, c: S) -> Self {
        Self {
            mat: &self.mat * c,
        }
    }

    /// Frobenius-norm distance to another skew endomorphism.
    pub fn distance(&self, other: &Self) -> S {
        (&self.mat - &other.mat).norm()
    }
}

impl<S: Real> std::ops::Add for &SkewEndo<S> {
    type Output = SkewEndo<S>;
    fn add(self, rhs: &SkewEndo<S>) -> SkewEndo<S> {
        SkewEndo {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl<S: Real> std::ops::Sub for &SkewEndo<S> {
    type Output = SkewEndo<S>;
    fn sub(self, rhs: &SkewEndo<S>) -> SkewEndo<S> {
        SkewEndo {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl<S: Real> std::ops::Neg for &SkewEndo<S> {
    type Output = SkewEndo<S>;
    fn neg(self) -> SkewEndo<S> {
        SkewEndo { mat: -&self.mat }
    }
}

/// Element of Λ² on the lexicographic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoVector<S: Real> {
    n: usize,
    comps: DVector<S>,
}

impl<S: Real> TwoVector<S> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            comps: DVector::zeros(pair_count(n)),
        }
    }

    /// Wraps raw components (length must be `n(n−1)/2`).
    pub fn from_components(n: usize, comps: DVector<S>) -> Result<Self> {
        if comps.len() != pair_count(n) {
            return Err(Error::DimensionMismatch {
                expected: pair_count(n),
                found: comps.len(),
            });
        }
        Ok(Self { n, comps })
    }

    /// Basis two-vector `e_i ∧ e_j` for arbitrary `i != j`.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n && i != j, "basis indices out of range");
        let mut w = Self::zero(n);
        if i < j {
            w.comps[pair_index(n, i, j)] = S::one();
        } else {
            w.comps[pair_index(n, j, i)] = -S::one();
        }
        w
    }

    /// The decomposable two-vector `x ∧ y`.
    pub fn wedge(x: &DVector<S>, y: &DVector<S>) -> Self {
        let n = x.len();
        debug_assert_eq!(n, y.len());
        let mut w = Self::zero(n);
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                w.comps[idx] = x[i] * y[j] - x[j] * y[i];
                idx += 1;
            }
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &DVector<S> {
        &self.comps
    }

    /// Inner product on Λ² (the lexicographic basis is orthonormal).
    pub fn inner(&self, other: &Self) -> S {
        self.comps.dot(&other.comps)
    }

    pub fn norm_squared(&self) -> S {
        self.comps.norm_squared()
    }

    pub fn norm(&self) -> S {
        self.comps.norm()
    }

    pub fn scale(&self, c: S) -> Self {
        Self {
            n: self.n,
            comps: &self.comps * c,
        }
    }
}

impl<S: Real> std::ops::Add for &TwoVector<S> {
    type Output = TwoVector<S>;
    fn add(self, rhs: &TwoVector<S>) -> TwoVector<S> {
        TwoVector {
            n: self.n,
            comps: &self.comps + &rhs.comps,
        }
    }
}

impl<S: Real> std::ops::Sub for &TwoVector<S> {
    type Output = TwoVector<S>;
    fn sub(self, rhs: &TwoVector<S>) -> TwoVector<S> {
        TwoVector {
            n: self.n,
            comps: &self.comps - &rhs.comps,
        }
    }
}

/// Trace metric `G(S,T) = −½ Trace(S·T)` on skew endomorphisms.
///
/// Positive definite; the wedge identification below is an isometry onto Λ².
pub fn trace_metric<S: Real>(a: &SkewEndo<S>, b: &SkewEndo<S>) -> Result<S> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut tr = S::zero();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            tr += a.mat[(i, j)] * b.mat[(j, i)];
        }
    }
    Ok(-tr / real(2.0))
}

/// Endomorphism of the two-vector `w`: the unique skew map `a` with
/// `g(aX, Y) = g(w, X∧Y)`.
pub fn wedge_to_endo<S: Real>(w: &TwoVector<S>) -> SkewEndo<S> {
    let n = w.n;
    let mut mat = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = w.comps[idx];
            mat[(j, i)] = c;
            mat[(i, j)] = -c;
            idx += 1;
        }
    }
    SkewEndo { mat }
}

/// Two-vector of a skew endomorphism; inverse of [`wedge_to_endo`].
pub fn endo_to_wedge<S: Real>(a: &SkewEndo<S>) -> TwoVector<S> {
    let n = a.dim();
    let mut w = TwoVector::zero(n);
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            w.comps[idx] = a.mat[(j, i)];
            idx += 1;
        }
    }
    w
}

/// Interior product `ι_X w`: the endomorphism of `w` applied to `X`.
pub fn interior_product<S: Real>(x: &DVector<S>, w: &TwoVector<S>) -> DVector<S> {
    wedge_to_endo(w).apply(x)
}

/// Polarization `¼(q(E+F) − q(E−F))` of a quadratic form evaluator.
pub fn polarize<S, V, Q>(q: Q, e: &V, f: &V) -> S
where
    S: Real,
    Q: Fn(&V) -> S,
    for<'a> &'a V: std::ops::Add<&'a V, Output = V> + std::ops::Sub<&'a V, Output = V>,
{
    let sum = e + f;
    let diff = e - f;
    (q(&sum) - q(&diff)) / real(4.0)
}

/// Gram–Schmidt orthonormalization of the columns of `frame` with respect to
/// the inner product `g` (`None` means the standard dot product).
///
/// Fails on linearly dependent input.
pub fn gram_schmidt<S: Real>(frame: &DMatrix<S>, g: Option<&DMatrix<S>>) -> Result<DMatrix<S>> {
    let n = frame.nrows();
    let m = frame.ncols();
    let inner = |x: &DVector<S>, y: &DVector<S>| -> S {
        match g {
            Some(gm) => (gm * y).dot(x),
            None => x.dot(y),
        }
    };
    let mut out = DMatrix::<S>::zeros(n, m);
    for c in 0..m {
        let mut v: DVector<S> = frame.column(c).into_owned();
        // two passes of modified Gram-Schmidt for numerical stability
        for _ in 0..2 {
            for p in 0..c {
                let u = out.column(p).into_owned();
                let coeff = inner(&v, &u);
                v -= &u * coeff;
            }
        }
        let norm_sq = inner(&v, &v);
        if norm_sq <= real(1e-20) {
            return Err(Error::DegenerateFrame {
                index: c,
                residual: to_f64(norm_sq),
            });
        }
        v /= norm_sq.sqrt();
        out.set_column(c, &v);
    }
    Ok(out)
}

/// Deterministic seeded RNG used by every sampling operation.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample via Box–Muller (identical stream for any scalar type).
pub fn normal_sample<S: Real>(rng: &mut ChaCha8Rng) -> S {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    real((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
}

/// Random vector with independent standard normal entries.
pub fn random_vector<S: Real>(n: usize, rng: &mut ChaCha8Rng) -> DVector<S> {
    DVector::from_fn(n, |_, _| normal_sample(rng))
}

/// Random skew endomorphism with normal entries above the diagonal.
pub fn random_skew<S: Real>(n: usize, rng: &mut ChaCha8Rng) -> SkewEndo<S> {
    let mut mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v: S = normal_sample(rng);
            mat[(j, i)] = v;
            mat[(i, j)] = -v;
        }
    }
    SkewEndo { mat }
}

/// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the sign
/// convention `diag(R) > 0`. Deterministic for a fixed seed.
pub fn random_orthogonal<S: Real>(n: usize, seed: u64) -> DMatrix<S> {
    let mut rng = seeded_rng(seed);
    random_orthogonal_with(n, &mut rng)
}

/// As [`random_orthogonal`], drawing from a caller-managed RNG.
pub fn random_orthogonal_with<S: Real>(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<S> {
    let gauss = DMatrix::<S>::from_fn(n, n, |_, _| normal_sample(rng));
    let qr = gauss.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..n {
        if r[(c, c)] < S::zero() {
            for i in 0..n {
                q[(i, c)] = -q[(i, c)];
            }
        }
    }
    q
}
