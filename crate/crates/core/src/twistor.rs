//! The twistor space of an odd-dimensional Riemannian manifold: tangent
//! splitting, the metrics `h_t`, contact form `η_t`, characteristic field
//! `χ`, the partially complex structures `Φ₁/Φ₂`, the Ricci tensor of `h_t`
//! in closed form, and an independent unit-tangent-bundle oracle chart for
//! three-dimensional bases.
//!
//! Points are almost contact metric structures expressed in a g-orthonormal
//! frame of the base tangent space; with that convention the base metric is
//! the standard dot product and all fiber formulas apply verbatim.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::contact::{
    fiber_complex_structure, fiber_metric_h_raw, tangency_residual, vertical_basis,
    AlmostContactStructure, FStructure,
};
use crate::error::{Error, Result};
use crate::geometry::{christoffel, curvature_data, ChartMetric, CurvatureData, FdConfig};
use crate::linalg::{endo_to_wedge, gram_schmidt, random_vector, wedge_to_endo, SkewEndo, TwoVector};
use crate::scalar::{real, smax, to_f64, Real};

/// Tangent vector of the twistor space at a point `σ = (φ, ξ)`: a horizontal
/// part `X ∈ T_pM` and a vertical part `Q ∈ m_φ` (the full vertical datum is
/// the pair `(Q, φQξ)`).
#[derive(Clone, Debug)]
pub struct TwistorTangent<S: Real> {
    horizontal: DVector<S>,
    vertical: SkewEndo<S>,
}

impl<S: Real> TwistorTangent<S> {
    pub fn new(horizontal: DVector<S>, vertical: SkewEndo<S>) -> Self {
        debug_assert_eq!(horizontal.len(), vertical.dim());
        Self {
            horizontal,
            vertical,
        }
    }

    pub fn horizontal_vector(x: DVector<S>) -> Self {
        let n = x.len();
        Self {
            horizontal: x,
            vertical: SkewEndo::zero(n),
        }
    }

    pub fn vertical_vector(q: SkewEndo<S>) -> Self {
        let n = q.dim();
        Self {
            horizontal: DVector::zeros(n),
            vertical: q,
        }
    }

    pub fn horizontal(&self) -> &DVector<S> {
        &self.horizontal
    }

    pub fn vertical(&self) -> &SkewEndo<S> {
        &self.vertical
    }

    pub fn dim(&self) -> usize {
        self.horizontal.len()
    }

    pub fn scale(&self, c: S) -> Self {
        Self {
            horizontal: &self.horizontal * c,
            vertical: self.vertical.scale(c),
        }
    }
}

impl<S: Real> std::ops::Add for &TwistorTangent<S> {
    type Output = TwistorTangent<S>;
    fn add(self, rhs: &TwistorTangent<S>) -> TwistorTangent<S> {
        TwistorTangent {
            horizontal: &self.horizontal + &rhs.horizontal,
            vertical: &self.vertical + &rhs.vertical,
        }
    }
}

impl<S: Real> std::ops::Sub for &TwistorTangent<S> {
    type Output = TwistorTangent<S>;
    fn sub(self, rhs: &TwistorTangent<S>) -> TwistorTangent<S> {
        TwistorTangent {
            horizontal: &self.horizontal - &rhs.horizontal,
            vertical: &self.vertical - &rhs.vertical,
        }
    }
}

fn check_scale<S: Real>(t: S) -> Result<()> {
    if t <= S::zero() {
        return Err(Error::InvalidParameter(format!(
            "metric parameter t must be > 0, got {}",
            to_f64(t)
        )));
    }
    Ok(())
}

fn check_tangent<S: Real>(e: &TwistorTangent<S>, sigma: &AlmostContactStructure<S>) -> Result<()> {
    if e.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: e.dim(),
        });
    }
    let res = tangency_residual(&e.vertical, sigma.phi());
    if res > real(1e-8) {
        return Err(Error::NotTangent(to_f64(res)));
    }
    Ok(())
}

/// The twistor metric `h_t(E, E') = g(X, X') + t·h(Q, Q')`.
pub fn h_t<S: Real>(
    e: &TwistorTangent<S>,
    e2: &TwistorTangent<S>,
    sigma: &AlmostContactStructure<S>,
    t: S,
) -> Result<S> {
    check_scale(t)?;
    check_tangent(e, sigma)?;
    check_tangent(e2, sigma)?;
    Ok(e.horizontal.dot(&e2.horizontal)
        + t * fiber_metric_h_raw(&e.vertical, &e2.vertical, sigma.phi()))
}

/// Contact form `η_t(E) = g(X, ξ)`; vanishes exactly on `𝒱 ⊕ {A ∈ ℋ : A ⊥ χ}`.
pub fn eta_t<S: Real>(e: &TwistorTangent<S>, sigma: &AlmostContactStructure<S>) -> S {
    e.horizontal.dot(sigma.xi())
}

/// Characteristic field `χ`: the horizontal lift of `ξ` (so `η_t(χ) = 1`).
pub fn chi<S: Real>(sigma: &AlmostContactStructure<S>) -> TwistorTangent<S> {
    TwistorTangent::horizontal_vector(sigma.xi().clone())
}

/// Which of the two partially complex structures to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiIndex {
    /// `Φ₁`: the fiber complex structure on vertical parts.
    Phi1,
    /// `Φ₂`: the conjugate fiber structure on vertical parts.
    Phi2,
}

/// The structures `Φ_α`: `φ`-lift on horizontal parts, `±J` on vertical parts.
pub fn phi_structure<S: Real>(
    e: &TwistorTangent<S>,
    sigma: &AlmostContactStructure<S>,
    alpha: PhiIndex,
) -> Result<TwistorTangent<S>> {
    check_tangent(e, sigma)?;
    let jq = fiber_complex_structure(&e.vertical, sigma.phi())?;
    let vertical = match alpha {
        PhiIndex::Phi1 => jq,
        PhiIndex::Phi2 => -&jq,
    };
    Ok(TwistorTangent {
        horizontal: sigma.phi().apply(&e.horizontal),
        vertical,
    })
}

/// Ricci quadratic form of `(𝒞, h_t)` over a constant-curvature base:
///
/// `c_t(E,E) = 2kν(1−tν)‖X‖² + tν²‖φX‖² + ½(k+2t²ν²)‖Q‖²_h + t²ν²·h(φ∘Q∘φ, Q)`.
pub fn ricci_const_curv<S: Real>(
    e: &TwistorTangent<S>,
    sigma: &AlmostContactStructure<S>,
    nu: S,
    t: S,
) -> Result<S> {
    check_scale(t)?;
    check_tangent(e, sigma)?;
    let k = real::<S>(sigma.k() as f64);
    let phi = sigma.phi();
    let x = &e.horizontal;
    let q = &e.vertical;
    let phi_x = phi.apply(x);
    let h_qq = fiber_metric_h_raw(q, q, phi);
    let f = phi.matrix();
    let fqf = SkewEndo::from_matrix_unchecked(f * q.matrix() * f);
    let h_fqf_q = fiber_metric_h_raw(&fqf, q, phi);
    let two = real::<S>(2.0);
    let half = real::<S>(0.5);
    let t2nu2 = t * t * nu * nu;
    Ok(two * k * nu * (S::one() - t * nu) * x.norm_squared()
        + t * nu * nu * phi_x.norm_squared()
        + half * (k + two * t2nu2) * h_qq
        + t2nu2 * h_fqf_q)
}

/// Ricci quadratic form of `(𝒞, h_t)` over a general base with curvature
/// data supplied at the point (structures and tangents expressed in the
/// data's orthonormal frame):
///
/// `c_t(E,E) = c_M(X,X) − 2t·Trace(Z ↦ (∇_Z R)(JQ, X)) + 2t²‖ℛ(JQ)‖²_g
///  − 2t‖ι_X ∘ ℛ|m_φ‖²_{h,g} + ½k‖Q‖²_h`,
///
/// with the operator norm expanded as `Σ_α ‖ℛ(U_α)X‖²` over an
/// h-orthonormal vertical basis, and the trace term reading
/// `(∇_Z R)(JQ, X)` as the endomorphism `(∇_Z ℛ)(JQ)` applied to `X`.
pub fn ricci_general<S: Real>(
    e: &TwistorTangent<S>,
    sigma: &AlmostContactStructure<S>,
    curv: &CurvatureData<S>,
    t: S,
) -> Result<S> {
    check_scale(t)?;
    check_tangent(e, sigma)?;
    let n = sigma.dim();
    if curv.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: curv.dim(),
        });
    }
    let phi = sigma.phi();
    let x = &e.horizontal;
    let q = &e.vertical;
    let k = real::<S>(sigma.k() as f64);
    let two = real::<S>(2.0);
    let half = real::<S>(0.5);

    let c_m = curv.ricci_quadratic(x);

    let jq = fiber_complex_structure(q, phi)?;
    let jq_w = endo_to_wedge(&jq);
    let mut trace_term = S::zero();
    for a in 0..n {
        let dr_jq = curv.apply_nabla(a, &jq_w)?;
        trace_term += wedge_to_endo(&dr_jq).apply(x)[a];
    }

    let r_jq = curv.apply_operator(&jq_w);
    let vertical_term = two * t * t * r_jq.norm_squared();

    let mut mixed = S::zero();
    for u in vertical_basis(sigma) {
        let r_u = curv.apply_operator(&endo_to_wedge(&u));
        mixed += wedge_to_endo(&r_u).apply(x).norm_squared();
    }

    let h_qq = fiber_metric_h_raw(q, q, phi);

    Ok(c_m - two * t * trace_term + vertical_term - two * t * mixed + half * k * h_qq)
}

/// Horizontal eta-Einstein residual source: `c_M(X,X) − 2tΣ_α‖R(U_α)X‖²`.
pub fn eq41_lhs<S: Real>(
    x: &DVector<S>,
    sigma: &AlmostContactStructure<S>,
    curv: &CurvatureData<S>,
    t: S,
) -> S {
    let mut sum = S::zero();
    for u in vertical_basis(sigma) {
        let r_u = curv.apply_operator(&endo_to_wedge(&u));
        sum += wedge_to_endo(&r_u).apply(x).norm_squared();
    }
    curv.ricci_quadratic(x) - real::<S>(2.0) * t * sum
}

/// Vertical eta-Einstein residual source: `2t²‖ℛ(Q)‖² + ½k‖Q‖²_h`.
pub fn eq42_lhs<S: Real>(
    q: &SkewEndo<S>,
    sigma: &AlmostContactStructure<S>,
    curv: &CurvatureData<S>,
    t: S,
) -> S {
    let k = real::<S>(sigma.k() as f64);
    let r_q = curv.apply_operator(&endo_to_wedge(q));
    let h_qq = fiber_metric_h_raw(q, q, sigma.phi());
    real::<S>(2.0) * t * t * r_q.norm_squared() + real::<S>(0.5) * k * h_qq
}

/// Stereographic patch of the unit fiber sphere used by the oracle chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpherePatch {
    /// Covers everything but the south pole; `y = 0 ↦ (0,0,1)`.
    North,
    /// Covers everything but the north pole; `y = 0 ↦ (0,0,−1)`.
    South,
}

fn sphere_point<S: Real>(y: &[S], patch: SpherePatch) -> (DVector<S>, [DVector<S>; 2]) {
    let sign = match patch {
        SpherePatch::North => S::one(),
        SpherePatch::South => -S::one(),
    };
    let r2 = y[0] * y[0] + y[1] * y[1];
    let d = S::one() + r2;
    let two = real::<S>(2.0);
    let four = real::<S>(4.0);
    let n = DVector::from_vec(vec![two * y[0] / d, two * y[1] / d, sign * (S::one() - r2) / d]);
    let mut dn = [DVector::zeros(3), DVector::zeros(3)];
    for (a, da) in dn.iter_mut().enumerate() {
        for b in 0..2 {
            da[b] = if a == b { two / d } else { S::zero() } - four * y[a] * y[b] / (d * d);
        }
        da[2] = -four * sign * y[a] / (d * d);
    }
    (n, dn)
}

/// Matrix of the cross product with a unit vector: the unique compatible
/// `φ` with `(φ, ξ)` positively oriented in dimension three.
fn cross_matrix<S: Real>(n: &DVector<S>) -> DMatrix<S> {
    DMatrix::from_row_slice(
        3,
        3,
        &[
            S::zero(),
            -n[2],
            n[1],
            n[2],
            S::zero(),
            -n[0],
            -n[1],
            n[0],
            S::zero(),
        ],
    )
}

/// Independent finite-difference oracle for a three-dimensional base: an
/// explicit five-coordinate chart of the unit tangent bundle carrying the
/// Sasaki metric dilated by `2t` in the vertical directions, which the
/// covering identifies with `(𝒞₊, h_t)`.
///
/// Coordinates are `(x¹, x², x³, y¹, y²)`: `x` a base chart point and `y`
/// a stereographic chart of the unit fiber sphere expressed in the
/// Gram–Schmidt frame of the coordinate basis. The squared speed of a curve
/// is `g(ẋ, ẋ) + 2t·g(∇_ẋ ξ, ∇_ẋ ξ)`.
#[derive(Clone)]
pub struct SasakiOracle<S: Real> {
    base: ChartMetric<S>,
    nu: S,
    t: S,
    patch: SpherePatch,
    inner_cfg: FdConfig<S>,
}

/// Pointwise assembly data shared by the metric and the correspondence.
struct OracleFrameData<S: Real> {
    g: DMatrix<S>,
    frame: DMatrix<S>,
    // covariant derivatives of the frame fields, coordinates of ∇_{∂j} u_i
    cov_frame: Vec<DMatrix<S>>,
}

impl<S: Real> SasakiOracle<S> {
    /// Oracle over the conformal space form of curvature `ν > 0`.
    pub fn new(nu: S, t: S) -> Result<Self> {
        if nu <= S::zero() || t <= S::zero() {
            return Err(Error::InvalidParameter(
                "oracle requires nu > 0 and t > 0".into(),
            ));
        }
        Ok(Self {
            base: crate::geometry::space_form_chart(nu, 3)?,
            nu,
            t,
            patch: SpherePatch::North,
            inner_cfg: FdConfig::default(),
        })
    }

    pub fn with_patch(mut self, patch: SpherePatch) -> Self {
        self.patch = patch;
        self
    }

    pub fn nu(&self) -> S {
        self.nu
    }

    pub fn t(&self) -> S {
        self.t
    }

    /// Outer finite-difference configuration tuned for differencing a chart
    /// whose evaluator itself contains inner finite differences.
    pub fn outer_cfg() -> FdConfig<S> {
        FdConfig {
            step_first: real(1e-3),
            step_second: real(3e-3),
            step_third: real(6e-3),
            richardson: false,
        }
    }

    fn frame_data(&self, x: &[S]) -> Result<OracleFrameData<S>> {
        let g = self.base.metric_at(x)?;
        let id = DMatrix::<S>::identity(3, 3);
        let frame = gram_schmidt(&id, Some(&g))?;
        let gamma = christoffel(&self.base, x, &self.inner_cfg)?;
        let h = self.inner_cfg.step_first;
        let two_h = h * real(2.0);
        let frame_at = |p: &[S]| -> Result<DMatrix<S>> {
            let gp = self.base.metric_at(p)?;
            gram_schmidt(&id, Some(&gp))
        };
        let mut cov_frame = Vec::with_capacity(3);
        for j in 0..3 {
            let mut xp = x.to_vec();
            xp[j] += h;
            let mut xm = x.to_vec();
            xm[j] -= h;
            let du = (frame_at(&xp)? - frame_at(&xm)?) / two_h;
            // ∇_{∂j} u_i = (∂j U^m_i + Γ^m_{jl} U^l_i) ∂m
            let mut cov = du;
            for m in 0..3 {
                for i in 0..3 {
                    for l in 0..3 {
                        cov[(m, i)] += gamma[m][(j, l)] * frame[(l, i)];
                    }
                }
            }
            cov_frame.push(cov);
        }
        Ok(OracleFrameData { g, frame, cov_frame })
    }

    /// Velocity of the unit section: coordinates of `∇_ẋ ξ` as a linear map
    /// of the chart velocity `(ẋ, ẏ)`, returned as the two blocks `W` (3×3,
    /// per base direction) and `Z` (3×2, per fiber direction).
    fn vertical_blocks(
        &self,
        data: &OracleFrameData<S>,
        y: &[S],
    ) -> (DMatrix<S>, DMatrix<S>, DVector<S>) {
        let (nvec, dn) = sphere_point(y, self.patch);
        let mut w = DMatrix::<S>::zeros(3, 3);
        for j in 0..3 {
            for m in 0..3 {
                let mut sum = S::zero();
                for i in 0..3 {
                    sum += nvec[i] * data.cov_frame[j][(m, i)];
                }
                w[(m, j)] = sum;
            }
        }
        let mut z = DMatrix::<S>::zeros(3, 2);
        for (a, da) in dn.iter().enumerate() {
            let col = &data.frame * da;
            z.set_column(a, &col);
        }
        (w, z, nvec)
    }

    /// The five-dimensional oracle chart, ready for the curvature engine.
    pub fn chart(&self) -> ChartMetric<S> {
        let this = self.clone();
        let shrink = real::<S>(0.05);
        let mut domain: Vec<(S, S)> = self
            .base
            .domain()
            .iter()
            .map(|(lo, hi)| (*lo + shrink, *hi - shrink))
            .collect();
        domain.push((real(-0.9), real(0.9)));
        domain.push((real(-0.9), real(0.9)));
        let label = format!(
            "sasaki_oracle(nu={}, t={})",
            to_f64(self.nu),
            to_f64(self.t)
        );
        ChartMetric::new(5, domain, label, move |p: &[S]| {
            let (x, y) = p.split_at(3);
            let data = this.frame_data(x).expect("oracle chart domain keeps margin");
            let (w, z, _) = this.vertical_blocks(&data, y);
            let two_t = this.t * real::<S>(2.0);
            // G(v,v) = g(xdot,xdot) + 2t g(W xdot + Z ydot, W xdot + Z ydot)
            let mut big = DMatrix::<S>::zeros(5, 5);
            let gw = &data.g * &w;
            let gz = &data.g * &z;
            let xx = &data.g + (w.transpose() * &gw) * two_t;
            let xy = (w.transpose() * &gz) * two_t;
            let yy = (z.transpose() * &gz) * two_t;
            for i in 0..3 {
                for j in 0..3 {
                    big[(i, j)] = xx[(i, j)];
                }
                for a in 0..2 {
                    big[(i, 3 + a)] = xy[(i, a)];
                    big[(3 + a, i)] = xy[(i, a)];
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    big[(3 + a, 3 + b)] = yy[(a, b)];
                }
            }
            big
        })
    }

    /// Maps a chart point and tangent to the corresponding twistor point and
    /// tangent (orientation component `𝒞₊`, structures in the base frame).
    pub fn correspond(
        &self,
        point: &[S],
        tangent: &DVector<S>,
    ) -> Result<(AlmostContactStructure<S>, TwistorTangent<S>)> {
        if point.len() != 5 || tangent.len() != 5 {
            return Err(Error::DimensionMismatch {
                expected: 5,
                found: point.len().max(tangent.len()),
            });
        }
        let (x, y) = point.split_at(3);
        let data = self.frame_data(x)?;
        let (w, z, nvec) = self.vertical_blocks(&data, y);
        let frame_inv = data
            .frame
            .clone()
            .try_inverse()
            .expect("orthonormal frame is invertible");
        let xdot = DVector::from_vec(vec![tangent[0], tangent[1], tangent[2]]);
        let ydot = DVector::from_vec(vec![tangent[3], tangent[4]]);
        let x_frame = &frame_inv * &xdot;
        let v_coords = &w * &xdot + &z * &ydot;
        let v_frame = &frame_inv * v_coords;

        let phi_mat = cross_matrix(&nvec);
        let phi = FStructure::from_parts_unchecked(SkewEndo::from_matrix_unchecked(phi_mat), 1);
        let sigma = AlmostContactStructure::from_parts_unchecked(phi, nvec.clone());
        // vertical datum: xi-velocity V lifts to Q = (φV) ∧ ξ in m_φ
        let phi_v = sigma.phi().apply(&v_frame);
        let q = wedge_to_endo(&TwoVector::wedge(&phi_v, &nvec));
        Ok((sigma, TwistorTangent::new(x_frame, q)))
    }
}

/// One oracle comparison sample.
#[derive(Clone, Debug)]
pub struct OracleSample {
    pub point: Vec<f64>,
    pub tangent: Vec<f64>,
    pub h_t: f64,
    pub eta: f64,
    pub c_t_analytic: f64,
    pub c_t_oracle: f64,
    pub rel_deviation: f64,
}

/// Result of comparing the finite-difference oracle Ricci against the
/// closed-form route over sampled correspondences.
#[derive(Clone, Debug)]
pub struct OracleComparison {
    pub samples: Vec<OracleSample>,
    pub max_rel_deviation: f64,
}

/// Runs the oracle comparison: numeric Ricci of the dilated Sasaki chart
/// versus the constant-curvature closed form, at `points` base points with
/// `tangents` tangents each.
pub fn compare_oracle<S: Real>(
    oracle: &SasakiOracle<S>,
    cfg: &FdConfig<S>,
    seed: u64,
    points: usize,
    tangents: usize,
) -> Result<OracleComparison> {
    use rand::RngExt;
    let chart = oracle.chart();
    let mut rng: ChaCha8Rng = crate::linalg::seeded_rng(seed);
    let mut samples = Vec::with_capacity(points * tangents);
    let mut max_rel: f64 = 0.0;
    for _ in 0..points {
        let mut p = [S::zero(); 5];
        for (axis, pi) in p.iter_mut().enumerate() {
            let spread = if axis < 3 { 0.7 } else { 0.9 };
            *pi = real((rng.random::<f64>() - 0.5) * spread);
        }
        let data = curvature_data(&chart, &p, cfg, false)?;
        for _ in 0..tangents {
            let v = random_vector::<S>(5, &mut rng);
            let c_num = data.ricci_form_coords(&v, &v);
            let (sigma, e) = oracle.correspond(&p, &v)?;
            let c_ana = ricci_const_curv(&e, &sigma, oracle.nu(), oracle.t())?;
            let rel = to_f64((c_num - c_ana).abs() / smax(S::one(), c_ana.abs()));
            max_rel = max_rel.max(rel);
            samples.push(OracleSample {
                point: p.iter().map(|v| to_f64(*v)).collect(),
                tangent: v.iter().map(|v| to_f64(*v)).collect(),
                h_t: to_f64(h_t(&e, &e, &sigma, oracle.t())?),
                eta: to_f64(eta_t(&e, &sigma)),
                c_t_analytic: to_f64(c_ana),
                c_t_oracle: to_f64(c_num),
                rel_deviation: rel,
            });
        }
    }
    Ok(OracleComparison {
        samples,
        max_rel_deviation: max_rel,
    })
}
