//! Numeric validation of the fiber geometry: a coordinate chart of the
//! manifold of rank-`2k` compatible f-structures around the canonical one,
//! carrying the invariant metric `h`, so the curvature engine can check the
//! closed-form scalar curvature.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::contact::{
    fiber_metric_h_raw, fk_dimension, fiber_scalar_curvature, tangent_kernel_basis, FStructure,
};
use crate::error::{Error, Result};
use crate::geometry::{curvature_data, ChartMetric, FdConfig};
use crate::linalg::{endo_to_wedge, index_pairs, pair_count, wedge_to_endo, SkewEndo, TwoVector};
use crate::scalar::{real, to_f64, Real};

/// Scaling-and-squaring Taylor exponential; adequate for the small skew
/// generators the chart uses.
fn matrix_exp<S: Real>(a: &DMatrix<S>) -> DMatrix<S> {
    let n = a.nrows();
    let norm = a.norm();
    let mut squarings = 0u32;
    let mut scale = S::one();
    let half = real::<S>(0.5);
    let mut scaled_norm = norm;
    while scaled_norm > half {
        scaled_norm *= half;
        scale *= half;
        squarings += 1;
    }
    let b = a * scale;
    let mut term = DMatrix::<S>::identity(n, n);
    let mut sum = DMatrix::<S>::identity(n, n);
    for j in 1..=24 {
        term = &term * &b / real::<S>(j as f64);
        sum += &term;
        if term.norm() < S::default_epsilon() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Canonical rank-`2k` f-structure `e_{12} + … + e_{2k−1,2k}` in dimension `n`.
fn canonical_f_structure<S: Real>(n: usize, k: usize) -> FStructure<S> {
    let mut mat = DMatrix::<S>::zeros(n, n);
    for r in 0..k {
        mat[(2 * r + 1, 2 * r)] = S::one();
        mat[(2 * r, 2 * r + 1)] = -S::one();
    }
    FStructure::from_parts_unchecked(SkewEndo::from_matrix_unchecked(mat), k)
}

/// Chart of the fiber manifold around the canonical structure:
/// `y ↦ exp(A(y)) F₀ exp(A(y))ᵀ` with `A(y) = Σ y_α C_α` chosen so the
/// coordinate velocities at 0 are a kernel basis of the tangency operator.
/// The chart metric is `G_ab(y) = h(∂_a φ, ∂_b φ)` at `φ(y)`.
pub fn fiber_chart<S: Real>(n: usize, k: usize) -> Result<ChartMetric<S>> {
    let dim = fk_dimension(n, k)?;
    let f0 = canonical_f_structure::<S>(n, k);
    let basis = tangent_kernel_basis(&f0);
    debug_assert_eq!(basis.len(), dim);

    // solve [C_alpha, F0] = U_alpha in wedge coordinates (least squares)
    let np = pair_count(n);
    let mut ad = DMatrix::<S>::zeros(np, np);
    for (col, (i, j)) in index_pairs(n).iter().enumerate() {
        let c = SkewEndo::<S>::basis(n, *i, *j);
        let bracket = c.matrix() * f0.matrix() - f0.matrix() * c.matrix();
        ad.set_column(
            col,
            endo_to_wedge(&SkewEndo::from_matrix_unchecked(bracket)).components(),
        );
    }
    let svd = ad.svd(true, true);
    let mut generators = Vec::with_capacity(dim);
    for u in &basis {
        let rhs = endo_to_wedge(u).components().clone();
        let sol = svd
            .solve(&rhs, real(1e-10))
            .map_err(|e| Error::InvalidParameter(format!("generator solve failed: {e}")))?;
        generators.push(
            wedge_to_endo(&TwoVector::from_components(n, sol).expect("wedge dimension"))
                .matrix()
                .clone(),
        );
    }

    let f0_mat = f0.matrix().clone();
    let phi_at = move |y: &[S]| -> DMatrix<S> {
        let mut a = DMatrix::<S>::zeros(n, n);
        for (ya, c) in y.iter().zip(&generators) {
            a += c * *ya;
        }
        let e = matrix_exp(&a);
        &e * &f0_mat * e.transpose()
    };

    let step = real::<S>(1e-4);
    let domain = vec![(real(-0.5), real(0.5)); dim];
    let label = format!("fiber_chart(n={n}, k={k})");
    Ok(ChartMetric::new(dim, domain, label, move |y: &[S]| {
        let phi = phi_at(y);
        let fs = FStructure::from_parts_unchecked(SkewEndo::from_matrix_unchecked(phi), k);
        let two_step = step * real(2.0);
        let mut dphi = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut yp = y.to_vec();
            yp[a] += step;
            let mut ym = y.to_vec();
            ym[a] -= step;
            dphi.push(SkewEndo::from_matrix_unchecked(
                (phi_at(&yp) - phi_at(&ym)) / two_step,
            ));
        }
        let mut g = DMatrix::<S>::zeros(dim, dim);
        for a in 0..dim {
            for b in a..dim {
                let v = fiber_metric_h_raw(&dphi[a], &dphi[b], &fs);
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }))
}

/// Outcome of the numeric fiber validation for one `(n, k)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberCheck {
    pub n: usize,
    pub k: usize,
    pub dim_expected: usize,
    pub dim_rank: usize,
    pub scalar_closed_form: f64,
    pub scalar_numeric: f64,
    pub abs_error: f64,
}

/// Compares the rank-computed tangent dimension and the numeric scalar
/// curvature of the fiber chart against the closed forms.
pub fn fiber_check<S: Real>(n: usize, k: usize) -> Result<FiberCheck> {
    let dim_expected = fk_dimension(n, k)?;
    let f0 = canonical_f_structure::<S>(n, k);
    let dim_rank = tangent_kernel_basis(&f0).len();
    let chart = fiber_chart::<S>(n, k)?;
    let cfg = FdConfig::<S> {
        step_first: real(5e-4),
        step_second: real(2e-3),
        ..FdConfig::default()
    };
    // fixed interior point away from 0 so no symmetry hides errors
    let y: Vec<S> = (0..dim_expected)
        .map(|i| real(0.03 + 0.01 * ((i % 5) as f64)))
        .collect();
    let data = curvature_data(&chart, &y, &cfg, false)?;
    let expected = fiber_scalar_curvature::<S>(n, k)?;
    Ok(FiberCheck {
        n,
        k,
        dim_expected,
        dim_rank,
        scalar_closed_form: to_f64(expected),
        scalar_numeric: to_f64(data.scalar()),
        abs_error: to_f64((data.scalar() - expected).abs()),
    })
}
