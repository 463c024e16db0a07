//! Chart-based numerical Riemannian geometry: Christoffel symbols, the
//! curvature operator on two-vectors, Ricci, scalar curvature and the
//! covariant derivative of the curvature — all by central differences —
//! plus closed-form model charts and the exact 3-dimensional
//! curvature-operator assembly.
//!
//! Sign convention. The curvature operator is defined through
//! `g(ℛ(X₁∧X₂), X₃∧X₄) = g((∇_{[X₁,X₂]} − [∇_{X₁},∇_{X₂}])X₃, X₄)`,
//! so a space form of curvature `ν` has `ℛ = ν·Id` and the round metric has
//! Ricci `(n−1)ν·g`. Every downstream formula consumes this convention; the
//! space-form tests below are its pinned witnesses.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, index_pairs, pair_count, pair_index, TwoVector};
use crate::scalar::{real, to_f64, Real};

/// Shared, thread-safe metric evaluator.
type MetricFn<S> = Arc<dyn Fn(&[S]) -> DMatrix<S> + Send + Sync>;

/// Smooth map from an open box to symmetric positive-definite matrices.
#[derive(Clone)]
pub struct ChartMetric<S: Real> {
    dim: usize,
    domain: Vec<(S, S)>,
    label: String,
    eval: MetricFn<S>,
}

impl<S: Real> ChartMetric<S> {
    /// Builds a chart from an evaluator. The evaluator must be callable
    /// concurrently and return a symmetric matrix on the whole domain.
    pub fn new<F>(dim: usize, domain: Vec<(S, S)>, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&[S]) -> DMatrix<S> + Send + Sync + 'static,
    {
        assert_eq!(domain.len(), dim, "domain must have one interval per axis");
        Self {
            dim,
            domain,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &[(S, S)] {
        &self.domain
    }

    /// True when `x` lies inside the domain with the given margin to every face.
    pub fn contains_with_margin(&self, x: &[S], margin: S) -> bool {
        x.len() == self.dim
            && x.iter().zip(&self.domain).all(|(xi, (lo, hi))| {
                *xi - *lo >= margin && *hi - *xi >= margin
            })
    }

    fn require_margin(&self, x: &[S], margin: S) -> Result<()> {
        if self.contains_with_margin(x, margin) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                label: self.label.clone(),
                margin: to_f64(margin),
            })
        }
    }

    /// Evaluates the metric, checking the domain and symmetry.
    pub fn metric_at(&self, x: &[S]) -> Result<DMatrix<S>> {
        self.require_margin(x, S::zero())?;
        let g = (self.eval)(x);
        let sym_tol = S::default_epsilon() * real(1e4);
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if (g[(i, j)] - g[(j, i)]).abs() > sym_tol {
                    return Err(Error::NonPositiveDefinite {
                        label: format!("{} (asymmetric)", self.label),
                    });
                }
            }
        }
        Ok(g)
    }

    fn metric_unchecked(&self, x: &[S]) -> DMatrix<S> {
        (self.eval)(x)
    }
}

/// Finite-difference configuration: steps for the first, second and third
/// derivative levels, with optional two-step Richardson extrapolation.
#[derive(Clone, Copy, Debug)]
pub struct FdConfig<S: Real> {
    pub step_first: S,
    pub step_second: S,
    pub step_third: S,
    pub richardson: bool,
}

impl<S: Real> Default for FdConfig<S> {
    fn default() -> Self {
        Self {
            step_first: real(1e-4),
            step_second: real(5e-4),
            step_third: real(2e-3),
            richardson: false,
        }
    }
}

impl<S: Real> FdConfig<S> {
    fn halved(&self) -> Self {
        let two = real::<S>(2.0);
        Self {
            step_first: self.step_first / two,
            step_second: self.step_second / two,
            step_third: self.step_third / two,
            richardson: false,
        }
    }

    /// Margin a chart point must keep to the boundary for Christoffel symbols.
    pub fn christoffel_margin(&self) -> S {
        self.step_first * real(2.0)
    }

    /// Margin required by the curvature operator.
    pub fn curvature_margin(&self) -> S {
        (self.step_first + self.step_second) * real(2.0)
    }

    /// Margin required by the covariant derivative of the curvature.
    pub fn nabla_margin(&self) -> S {
        (self.step_first + self.step_second + self.step_third) * real(2.0)
    }
}

/// Christoffel symbols: `gamma[i]` is the symmetric matrix `Γ^i_{jk}`.
pub type Christoffel<S> = Vec<DMatrix<S>>;

fn cholesky_inverse<S: Real>(g: &DMatrix<S>, label: &str) -> Result<DMatrix<S>> {
    Cholesky::new(g.clone())
        .map(|c| c.inverse())
        .ok_or_else(|| Error::NonPositiveDefinite {
            label: label.to_string(),
        })
}

fn shifted<S: Real>(x: &[S], axis: usize, delta: S) -> Vec<S> {
    let mut y = x.to_vec();
    y[axis] += delta;
    y
}

fn christoffel_raw<S: Real>(chart: &ChartMetric<S>, x: &[S], h: S) -> Result<Christoffel<S>> {
    let n = chart.dim();
    let g = chart.metric_at(x)?;
    let g_inv = cholesky_inverse(&g, chart.label())?;
    let two_h = h * real(2.0);
    // dg[m][(i,j)] = d g_ij / d x^m
    let mut dg = Vec::with_capacity(n);
    for m in 0..n {
        let plus = chart.metric_unchecked(&shifted(x, m, h));
        let minus = chart.metric_unchecked(&shifted(x, m, -h));
        dg.push((plus - minus) / two_h);
    }
    let half = real::<S>(0.5);
    let mut gamma = vec![DMatrix::<S>::zeros(n, n); n];
    for i in 0..n {
        for j in 0..n {
            for kk in j..n {
                let mut sum = S::zero();
                for l in 0..n {
                    sum += g_inv[(i, l)] * (dg[j][(l, kk)] + dg[kk][(l, j)] - dg[l][(j, kk)]);
                }
                let val = half * sum;
                gamma[i][(j, kk)] = val;
                gamma[i][(kk, j)] = val;
            }
        }
    }
    Ok(gamma)
}

/// Levi-Civita Christoffel symbols from central differences of the metric.
pub fn christoffel<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
) -> Result<Christoffel<S>> {
    chart.require_margin(x, cfg.christoffel_margin())?;
    if cfg.richardson {
        let coarse = christoffel_raw(chart, x, cfg.step_first)?;
        let fine = christoffel_raw(chart, x, cfg.step_first / real(2.0))?;
        let third = real::<S>(1.0 / 3.0);
        Ok(coarse
            .into_iter()
            .zip(fine)
            .map(|(c, f)| (f * real::<S>(4.0) - c) * third)
            .collect())
    } else {
        christoffel_raw(chart, x, cfg.step_first)
    }
}

/// Covariant 4-tensor `T[i][j][k][l] = g(R(∂_i,∂_j)∂_k, ∂_l)` in chart coordinates.
#[derive(Clone, Debug)]
pub struct Rank4<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Real> Rank4<S> {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n * n * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> S {
        self.data[self.idx(i, j, k, l)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: S) {
        let id = self.idx(i, j, k, l);
        self.data[id] = v;
    }

    fn scale_add(self, a: S, other: Self, b: S) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .into_iter()
                .zip(other.data)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    /// Contracts every index with the columns of `u` (change to a new basis).
    fn change_basis(&self, u: &DMatrix<S>) -> Self {
        let n = self.n;
        let mut pass = self.data.clone();
        // contract one slot per pass; slot layout is row-major, so rotate
        // the leading index each time
        for _ in 0..4 {
            let mut next = vec![S::zero(); pass.len()];
            let stride = n * n * n;
            for rest in 0..stride {
                for a in 0..n {
                    let mut sum = S::zero();
                    for i in 0..n {
                        sum += u[(i, a)] * pass[i * stride + rest];
                    }
                    // rotate: output slot order (jkl)(a)
                    next[rest * n + a] = sum;
                }
            }
            pass = next;
        }
        Self { n, data: pass }
    }
}

fn riemann_coord_raw<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
) -> Result<Rank4<S>> {
    let n = chart.dim();
    let h2 = cfg.step_second;
    let gamma = christoffel(chart, x, cfg)?;
    let mut dgamma = Vec::with_capacity(n);
    for m in 0..n {
        let plus = christoffel(chart, &shifted(x, m, h2), cfg)?;
        let minus = christoffel(chart, &shifted(x, m, -h2), cfg)?;
        let two_h = h2 * real(2.0);
        let d: Christoffel<S> = plus
            .into_iter()
            .zip(minus)
            .map(|(p, mi)| (p - mi) / two_h)
            .collect();
        dgamma.push(d);
    }
    let g = chart.metric_at(x)?;
    // R^l_{kij} = d_i Γ^l_{jk} − d_j Γ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}
    let mut upper = Rank4::zeros(n); // indexed [l][k][i][j]
    for l in 0..n {
        for kk in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgamma[i][l][(j, kk)] - dgamma[j][l][(i, kk)];
                    for m in 0..n {
                        v += gamma[l][(i, m)] * gamma[m][(j, kk)]
                            - gamma[l][(j, m)] * gamma[m][(i, kk)];
                    }
                    upper.set(l, kk, i, j, v);
                }
            }
        }
    }
    // lower: T[i][j][k][l] = g_{lm} R^m_{kij}
    let mut t = Rank4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    let mut v = S::zero();
                    for m in 0..n {
                        v += g[(l, m)] * upper.get(m, kk, i, j);
                    }
                    t.set(i, j, kk, l, v);
                }
            }
        }
    }
    Ok(t)
}

fn riemann_coord<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
) -> Result<Rank4<S>> {
    if cfg.richardson {
        let coarse = riemann_coord_raw(chart, x, &FdConfig { richardson: false, ..*cfg })?;
        let fine = riemann_coord_raw(chart, x, &cfg.halved())?;
        let third = real::<S>(1.0 / 3.0);
        Ok(fine.scale_add(real::<S>(4.0) * third, coarse, -third))
    } else {
        riemann_coord_raw(chart, x, cfg)
    }
}

/// Curvature of a chart at a point, expressed in the Gram–Schmidt
/// orthonormal frame of the coordinate basis: the operator on Λ², the Ricci
/// form/operator, the scalar curvature and optionally the covariant
/// derivative of the operator.
#[derive(Clone, Debug)]
pub struct CurvatureData<S: Real> {
    dim: usize,
    frame: DMatrix<S>,
    frame_inv: DMatrix<S>,
    operator: DMatrix<S>,
    ricci: DMatrix<S>,
    scalar: S,
    nabla: Option<Vec<DMatrix<S>>>,
    locally_symmetric: bool,
}

impl<S: Real> CurvatureData<S> {
    /// Synthetic data of a space form: `ℛ = ν·Id`, Ricci `(n−1)ν·Id`, `∇ℛ = 0`.
    pub fn constant_curvature(nu: S, n: usize) -> Self {
        let np = pair_count(n);
        Self {
            dim: n,
            frame: DMatrix::identity(n, n),
            frame_inv: DMatrix::identity(n, n),
            operator: DMatrix::identity(np, np) * nu,
            ricci: DMatrix::identity(n, n) * (nu * real((n - 1) as f64)),
            scalar: nu * real((n * (n - 1)) as f64),
            nabla: None,
            locally_symmetric: true,
        }
    }

    /// Flat data: everything zero.
    pub fn flat(n: usize) -> Self {
        Self::constant_curvature(S::zero(), n)
    }

    /// Assembles data from a frame and frame-expressed pieces.
    pub fn from_parts(
        frame: DMatrix<S>,
        operator: DMatrix<S>,
        ricci: DMatrix<S>,
        scalar: S,
        nabla: Option<Vec<DMatrix<S>>>,
        locally_symmetric: bool,
    ) -> Result<Self> {
        let dim = frame.nrows();
        let frame_inv = frame
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("frame is singular".into()))?;
        Ok(Self {
            dim,
            frame,
            frame_inv,
            operator,
            ricci,
            scalar,
            nabla,
            locally_symmetric,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Columns are the orthonormal frame vectors in chart coordinates.
    pub fn frame(&self) -> &DMatrix<S> {
        &self.frame
    }

    /// Matrix of the curvature operator on lexicographic frame two-vectors.
    pub fn operator(&self) -> &DMatrix<S> {
        &self.operator
    }

    /// Ricci form in frame components (equals the Ricci operator matrix).
    pub fn ricci(&self) -> &DMatrix<S> {
        &self.ricci
    }

    pub fn scalar(&self) -> S {
        self.scalar
    }

    pub fn nabla(&self) -> Option<&Vec<DMatrix<S>>> {
        self.nabla.as_ref()
    }

    pub fn is_locally_symmetric(&self) -> bool {
        self.locally_symmetric
    }

    /// Applies the curvature operator to a frame two-vector.
    pub fn apply_operator(&self, w: &TwoVector<S>) -> TwoVector<S> {
        TwoVector::from_components(self.dim, &self.operator * w.components())
            .expect("operator preserves Λ² dimension")
    }

    /// Applies `(∇_{u_e}ℛ)` to a frame two-vector; zero for locally
    /// symmetric data, error when the derivative is simply missing.
    pub fn apply_nabla(&self, e: usize, w: &TwoVector<S>) -> Result<TwoVector<S>> {
        match &self.nabla {
            Some(nab) => Ok(TwoVector::from_components(self.dim, &nab[e] * w.components())
                .expect("operator preserves Λ² dimension")),
            None if self.locally_symmetric => Ok(TwoVector::zero(self.dim)),
            None => Err(Error::MissingNablaR),
        }
    }

    /// Ricci quadratic form on frame components.
    pub fn ricci_quadratic(&self, x_frame: &DVector<S>) -> S {
        (&self.ricci * x_frame).dot(x_frame)
    }

    /// Ricci bilinear form on chart-coordinate vectors.
    pub fn ricci_form_coords(&self, v: &DVector<S>, w: &DVector<S>) -> S {
        let vf = &self.frame_inv * v;
        let wf = &self.frame_inv * w;
        (&self.ricci * &wf).dot(&vf)
    }

    /// Component `g(R(u_a,u_b)u_c, u_d)` reconstructed from the operator.
    pub fn tensor_component(&self, a: usize, b: usize, c: usize, d: usize) -> S {
        if a == b || c == d {
            return S::zero();
        }
        let (a1, b1, s1) = if a < b { (a, b, S::one()) } else { (b, a, -S::one()) };
        let (c1, d1, s2) = if c < d { (c, d, S::one()) } else { (d, c, -S::one()) };
        // operator[(cd),(ab)] = g(R(u_a,u_b)u_d, u_c) = -T[a][b][c][d]
        let row = pair_index(self.dim, c1, d1);
        let col = pair_index(self.dim, a1, b1);
        -s1 * s2 * self.operator[(row, col)]
    }

    /// Component `(∇_{u_e} T)(u_a,u_b,u_c,u_d)` of the derived tensor.
    pub fn nabla_tensor_component(
        &self,
        e: usize,
        a: usize,
        b: usize,
        c: usize,
        d: usize,
    ) -> Result<S> {
        if a == b || c == d {
            return Ok(S::zero());
        }
        let nab = match &self.nabla {
            Some(nab) => nab,
            None if self.locally_symmetric => return Ok(S::zero()),
            None => return Err(Error::MissingNablaR),
        };
        let (a1, b1, s1) = if a < b { (a, b, S::one()) } else { (b, a, -S::one()) };
        let (c1, d1, s2) = if c < d { (c, d, S::one()) } else { (d, c, -S::one()) };
        let row = pair_index(self.dim, c1, d1);
        let col = pair_index(self.dim, a1, b1);
        Ok(-s1 * s2 * nab[e][(row, col)])
    }
}

/// Computes the full curvature bundle of a chart at a point.
pub fn curvature_data<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
    want_nabla: bool,
) -> Result<CurvatureData<S>> {
    let margin = if want_nabla {
        cfg.nabla_margin()
    } else {
        cfg.curvature_margin()
    };
    chart.require_margin(x, margin)?;
    let n = chart.dim();
    let np = pair_count(n);
    let g = chart.metric_at(x)?;
    let frame = gram_schmidt(&DMatrix::<S>::identity(n, n), Some(&g))?;
    let frame_inv = frame
        .clone()
        .try_inverse()
        .expect("Gram-Schmidt frame is invertible");

    let t = riemann_coord(chart, x, cfg)?;
    let tf = t.change_basis(&frame);

    let pairs = index_pairs(n);
    let mut operator = DMatrix::<S>::zeros(np, np);
    for (col, (a, b)) in pairs.iter().enumerate() {
        for (row, (c, d)) in pairs.iter().enumerate() {
            // <R(u_a ∧ u_b), u_c ∧ u_d> = g(R(u_a,u_b)u_d, u_c)
            operator[(row, col)] = tf.get(*a, *b, *d, *c);
        }
    }
    let mut ricci = DMatrix::<S>::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut sum = S::zero();
            for e in 0..n {
                sum += tf.get(a, e, e, b);
            }
            ricci[(a, b)] = sum;
        }
    }
    let scalar = ricci.trace();

    let nabla = if want_nabla {
        let h3 = cfg.step_third;
        let two_h = h3 * real(2.0);
        let gamma = christoffel(chart, x, cfg)?;
        let mut per_direction = Vec::with_capacity(n);
        let mut dts = Vec::with_capacity(n);
        for m in 0..n {
            let plus = riemann_coord(chart, &shifted(x, m, h3), cfg)?;
            let minus = riemann_coord(chart, &shifted(x, m, -h3), cfg)?;
            dts.push(plus.scale_add(S::one() / two_h, minus, -S::one() / two_h));
        }
        // covariant correction: ∇_m T = ∂_m T − Γ•T on each slot
        for m in 0..n {
            let mut cov = Rank4::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    for kk in 0..n {
                        for l in 0..n {
                            let mut v = dts[m].get(i, j, kk, l);
                            for (a, ga) in gamma.iter().enumerate() {
                                v -= ga[(m, i)] * t.get(a, j, kk, l)
                                    + ga[(m, j)] * t.get(i, a, kk, l)
                                    + ga[(m, kk)] * t.get(i, j, a, l)
                                    + ga[(m, l)] * t.get(i, j, kk, a);
                            }
                            cov.set(i, j, kk, l, v);
                        }
                    }
                }
            }
            per_direction.push(cov.change_basis(&frame));
        }
        // direction index is still in coordinates; re-express along the frame
        let mut ops = Vec::with_capacity(n);
        for e in 0..n {
            let mut mat = DMatrix::<S>::zeros(np, np);
            for (col, (a, b)) in pairs.iter().enumerate() {
                for (row, (c, d)) in pairs.iter().enumerate() {
                    let mut v = S::zero();
                    for m in 0..n {
                        v += frame[(m, e)] * per_direction[m].get(*a, *b, *d, *c);
                    }
                    mat[(row, col)] = v;
                }
            }
            ops.push(mat);
        }
        Some(ops)
    } else {
        None
    };

    Ok(CurvatureData {
        dim: n,
        frame,
        frame_inv,
        operator,
        ricci: (ricci.clone() + ricci.transpose()) * real::<S>(0.5),
        scalar,
        nabla,
        locally_symmetric: false,
    })
}

/// Matrix of the curvature operator on Λ² (frame two-vector basis).
pub fn curvature_operator<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
) -> Result<DMatrix<S>> {
    Ok(curvature_data(chart, x, cfg, false)?.operator)
}

/// Ricci data `(c_M, ρ, s)` in frame components.
pub fn ricci<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
) -> Result<(DMatrix<S>, DMatrix<S>, S)> {
    let data = curvature_data(chart, x, cfg, false)?;
    Ok((data.ricci.clone(), data.ricci, data.scalar))
}

/// Covariant derivative of the curvature operator, one Λ² matrix per frame
/// direction.
pub fn nabla_r<S: Real>(
    chart: &ChartMetric<S>,
    x: &[S],
    cfg: &FdConfig<S>,
) -> Result<Vec<DMatrix<S>>> {
    Ok(curvature_data(chart, x, cfg, true)?
        .nabla
        .expect("nabla requested"))
}

/// Exact 3-dimensional curvature operator
/// `ℛ(X∧Y) = −(s/2)·X∧Y + ρ(X)∧Y + X∧ρ(Y)` assembled from the Ricci
/// operator and the scalar curvature.
pub fn curvature_operator_3d<S: Real>(rho: &DMatrix<S>, s: S) -> Result<DMatrix<S>> {
    if rho.nrows() != 3 || rho.ncols() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: rho.nrows(),
        });
    }
    let n = 3usize;
    let np = pair_count(n);
    let pairs = index_pairs(n);
    let mut op = DMatrix::<S>::zeros(np, np);
    let half_s = s * real::<S>(0.5);
    let add = |comps: &mut DVector<S>, i: usize, j: usize, coef: S| {
        if i == j {
            return;
        }
        if i < j {
            comps[pair_index(n, i, j)] += coef;
        } else {
            comps[pair_index(n, j, i)] -= coef;
        }
    };
    for (col, (a, b)) in pairs.iter().enumerate() {
        let mut comps = DVector::<S>::zeros(np);
        add(&mut comps, *a, *b, -half_s);
        for l in 0..n {
            add(&mut comps, l, *b, rho[(l, *a)]);
            add(&mut comps, *a, l, rho[(l, *b)]);
        }
        op.set_column(col, &comps);
    }
    Ok(op)
}

/// Flat chart: the identity metric on the unit box.
pub fn flat_chart<S: Real>(n: usize) -> ChartMetric<S> {
    let domain = vec![(-S::one(), S::one()); n];
    ChartMetric::new(n, domain, "flat", move |_x: &[S]| DMatrix::identity(n, n))
}

/// Conformal model of constant sectional curvature `ν ≥ 0`:
/// `g_ij(x) = δ_ij / (1 + (ν/4)‖x‖²)²` on the box `‖x‖_∞ < 1`.
pub fn space_form_chart<S: Real>(nu: S, n: usize) -> Result<ChartMetric<S>> {
    if nu < S::zero() {
        return Err(Error::InvalidParameter(
            "space form curvature must be nonnegative".into(),
        ));
    }
    if nu == S::zero() {
        return Ok(flat_chart(n));
    }
    let domain = vec![(-S::one(), S::one()); n];
    let quarter = real::<S>(0.25);
    let label = format!("space_form(nu={})", to_f64(nu));
    Ok(ChartMetric::new(n, domain, label, move |x: &[S]| {
        let r2 = x.iter().map(|v| *v * *v).fold(S::zero(), |a, b| a + b);
        let lambda = S::one() / (S::one() + nu * quarter * r2);
        DMatrix::identity(n, n) * (lambda * lambda)
    }))
}

/// Space-form chart with a smooth non-conformal bump:
/// `g(x) = λ(x)²·(Id + ε(s sᵀ + ½ c cᵀ))` with
/// `s_i = sin(π x_i + 0.7(i+1))` and `c_i = cos(π x_i + 0.3(i+1))`.
/// Positive definite for every `ε ≥ 0`.
pub fn perturbed_space_form_chart<S: Real>(
    nu: S,
    n: usize,
    eps: S,
) -> Result<ChartMetric<S>> {
    if nu < S::zero() || eps < S::zero() {
        return Err(Error::InvalidParameter(
            "curvature and bump amplitude must be nonnegative".into(),
        ));
    }
    let domain = vec![(-S::one(), S::one()); n];
    let quarter = real::<S>(0.25);
    let pi = S::pi();
    let label = format!(
        "perturbed_space_form(nu={}, eps={})",
        to_f64(nu),
        to_f64(eps)
    );
    Ok(ChartMetric::new(n, domain, label, move |x: &[S]| {
        let r2 = x.iter().map(|v| *v * *v).fold(S::zero(), |a, b| a + b);
        let lambda = S::one() / (S::one() + nu * quarter * r2);
        let s = DVector::<S>::from_fn(n, |i, _| {
            (pi * x[i] + real::<S>(0.7) * real((i + 1) as f64)).sin()
        });
        let c = DVector::<S>::from_fn(n, |i, _| {
            (pi * x[i] + real::<S>(0.3) * real((i + 1) as f64)).cos()
        });
        let bump = &s * s.transpose() + (&c * c.transpose()) * real::<S>(0.5);
        (DMatrix::identity(n, n) + bump * eps) * (lambda * lambda)
    }))
}
