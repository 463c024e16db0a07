//! Acceptance suite: every release criterion runs at its pinned tolerance
//! and prints one pass/fail line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use nalgebra::DMatrix;
use twistor_core::contact::{
    canonical_structure, fiber_complex_structure, fiber_metric_h, fk_dimension,
    random_structure_with, standard_vertical_basis, tangent_kernel_basis, tangent_project,
    tangency_residual, AlmostContactStructure,
};
use twistor_core::eta_einstein::{
    obstruction_residuals, scan_t, twistor_scalar_curvature, verify_theorem, SampleConfig,
};
use twistor_core::fiber::fiber_check;
use twistor_core::geometry::{
    curvature_data, curvature_operator, curvature_operator_3d, perturbed_space_form_chart,
    space_form_chart, CurvatureData, FdConfig,
};
use twistor_core::linalg::{random_orthogonal, random_skew, random_vector, seeded_rng};
use twistor_core::twistor::{
    chi, compare_oracle, eta_t, h_t, phi_structure, ricci_const_curv, ricci_general, PhiIndex,
    SasakiOracle, TwistorTangent,
};

fn verdict(criterion: &str, pass: bool, detail: String) {
    let line = format!(
        "[acceptance] {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    eprintln!("{line}");
    assert!(pass, "{criterion}: {detail}");
}

fn random_tangent(
    sigma: &AlmostContactStructure<f64>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> TwistorTangent<f64> {
    let n = sigma.dim();
    let x = random_vector::<f64>(n, rng);
    let q = tangent_project(&random_skew::<f64>(n, rng), sigma.phi());
    TwistorTangent::new(x, q)
}

#[test]
fn criterion_01_theorem_reproduction() {
    let cfg = SampleConfig::default();
    let mut detail = String::new();
    let mut pass = true;
    for nu in [0.5, 1.0, 2.0] {
        let t = 1.0 / (2.0 * nu);
        let start = Instant::now();
        let v = verify_theorem::<f64>(3, nu, t, 7, &cfg, 1e-9).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let ok = (v.a - 1.5 * nu).abs() <= 1e-9
            && (v.b + 0.5 * nu).abs() <= 1e-9
            && v.residual <= 1e-9
            && elapsed < 1.0;
        pass &= ok;
        detail.push_str(&format!(
            "nu={nu}: a={:.12}, b={:.12}, residual={:.2e}, {:.2}s; ",
            v.a, v.b, v.residual, elapsed
        ));
    }
    verdict("criterion 1 (theorem reproduction)", pass, detail);
}

#[test]
fn criterion_02_final_display_identity() {
    let (nu, t) = (1.0, 0.5);
    let mut rng = seeded_rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let sigma = random_structure_with::<f64>(3, &mut rng).unwrap();
        let e = random_tangent(&sigma, &mut rng);
        let c = ricci_const_curv(&e, &sigma, nu, t).unwrap();
        let ht = h_t(&e, &e, &sigma, t).unwrap();
        let eta = eta_t(&e, &sigma);
        worst = worst.max((c - (1.5 * nu * ht - 0.5 * nu * eta * eta)).abs());
    }
    verdict(
        "criterion 2 (final-display identity)",
        worst <= 1e-12,
        format!("max |c_t - (3nu/2)h_t + (nu/2)eta^2| = {worst:.2e} over 1000 samples"),
    );
}

#[test]
fn criterion_03_uniqueness_scan() {
    let cfg = SampleConfig {
        points: 4,
        tangents: 32,
    };
    let mut pass = true;
    let mut detail = String::new();
    for nu in [1.0, 2.0] {
        let start = Instant::now();
        let grid: Vec<f64> = (1..=50).map(|j| j as f64 * 0.05 / nu).collect();
        let scan = scan_t(3, nu, &grid, 19, &cfg).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let floor = scan.floor_off_point.unwrap();
        let ok = scan.argmin_index == 9
            && (scan.argmin_t - 0.5 / nu).abs() < 1e-12
            && scan.min_residual <= 1e-10
            && floor >= 1e-2
            && elapsed < 10.0;
        pass &= ok;
        detail.push_str(&format!(
            "nu={nu}: argmin t={}, min={:.2e}, floor={:.2e}, {:.2}s; ",
            scan.argmin_t, scan.min_residual, floor, elapsed
        ));
    }
    verdict("criterion 3 (uniqueness scan)", pass, detail);
}

#[test]
fn criterion_04_negative_result_high_dimensions() {
    let cfg = SampleConfig {
        points: 2,
        tangents: 16,
    };
    let mut pass = true;
    let mut detail = String::new();
    let mut rng = seeded_rng(4);
    for n in [5usize, 7] {
        let grid: Vec<f64> = (1..=50).map(|j| j as f64 * 0.05).collect();
        let scan = scan_t(n, 1.0, &grid, 23, &cfg).unwrap();
        let curv = CurvatureData::constant_curvature(1.0, n);
        let x = random_vector::<f64>(n, &mut rng);
        let ratio = obstruction_residuals(&curv, &x, 0.5, 0.0, 0.0, 0.0)
            .unwrap()
            .ratio
            .unwrap();
        let ok = scan.min_residual > 1e-6 && (ratio.ratio - 2.0).abs() <= 1e-9;
        pass &= ok;
        detail.push_str(&format!(
            "n={n}: min residual={:.2e}, |R(Q1)|^2/|R(Q2)|^2={:.12}; ",
            scan.min_residual, ratio.ratio
        ));
    }
    verdict("criterion 4 (negative result n >= 5)", pass, detail);
}

#[test]
fn criterion_05_oracle_equivalence() {
    let mut pass = true;
    let mut detail = String::new();
    let start = Instant::now();
    for (nu, t) in [(1.0, 0.5), (2.0, 0.25)] {
        let oracle = SasakiOracle::<f64>::new(nu, t).unwrap();
        let cmp = compare_oracle(&oracle, &SasakiOracle::<f64>::outer_cfg(), 31, 5, 4).unwrap();
        let ok = cmp.samples.len() >= 20 && cmp.max_rel_deviation <= 1e-3;
        pass &= ok;
        detail.push_str(&format!(
            "(nu={nu}, t={t}): {} samples, max rel dev={:.2e}; ",
            cmp.samples.len(),
            cmp.max_rel_deviation
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 60.0;
    detail.push_str(&format!("total {elapsed:.1}s"));
    verdict("criterion 5 (oracle equivalence)", pass, detail);
}

#[test]
fn criterion_06_general_route_collapse() {
    let mut worst: f64 = 0.0;
    let (nu, t) = (1.3, 0.45);
    for n in [3usize, 5, 7] {
        let curv = CurvatureData::constant_curvature(nu, n);
        let mut rng = seeded_rng(6 + n as u64);
        for _ in 0..1000 {
            let sigma = random_structure_with::<f64>(n, &mut rng).unwrap();
            let e = random_tangent(&sigma, &mut rng);
            let general = ricci_general(&e, &sigma, &curv, t).unwrap();
            let closed = ricci_const_curv(&e, &sigma, nu, t).unwrap();
            worst = worst.max((general - closed).abs() / general.abs().max(1.0));
        }
    }
    verdict(
        "criterion 6 (Ricci route collapse)",
        worst <= 1e-12,
        format!("max relative gap {worst:.2e} over 3000 samples, n in {{3,5,7}}"),
    );
}

#[test]
fn criterion_07_fiber_geometry() {
    let mut pass = true;
    let mut detail = String::new();
    for n in [3usize, 5, 7] {
        let k = (n - 1) / 2;
        let sigma = canonical_structure::<f64>(n).unwrap();
        let rank = tangent_kernel_basis(sigma.phi()).len();
        let expected = fk_dimension(n, k).unwrap();
        pass &= rank == expected;
        detail.push_str(&format!("dim m_phi(n={n})={rank} (expect {expected}); "));
    }
    let check = fiber_check::<f64>(3, 1).unwrap();
    pass &= check.abs_error <= 1e-3;
    detail.push_str(&format!(
        "numeric fiber scalar={:.6} vs {} (err {:.2e})",
        check.scalar_numeric, check.scalar_closed_form, check.abs_error
    ));
    verdict("criterion 7 (fiber geometry)", pass, detail);
}

#[test]
fn criterion_08_structural_invariants() {
    let t = 0.62;
    let mut worst: f64 = 0.0;
    let mut checks = 0usize;
    for n in [3usize, 5, 7] {
        let mut rng = seeded_rng(80 + n as u64);
        for round in 0..84 {
            let sigma = random_structure_with::<f64>(n, &mut rng).unwrap();
            let e = random_tangent(&sigma, &mut rng);
            let e2 = random_tangent(&sigma, &mut rng);
            let alpha = if round % 2 == 0 {
                PhiIndex::Phi1
            } else {
                PhiIndex::Phi2
            };
            // f-structure identity for Phi
            let fe = phi_structure(&e, &sigma, alpha).unwrap();
            let ffe = phi_structure(&fe, &sigma, alpha).unwrap();
            let fffe = phi_structure(&ffe, &sigma, alpha).unwrap();
            let dev_f = (fffe.horizontal() + fe.horizontal()).norm()
                + (fffe.vertical() + fe.vertical()).matrix().norm();
            // metric compatibility
            let lhs = h_t(&fe, &phi_structure(&e2, &sigma, alpha).unwrap(), &sigma, t).unwrap();
            let rhs = h_t(&e, &e2, &sigma, t).unwrap() - eta_t(&e, &sigma) * eta_t(&e2, &sigma);
            let dev_c = (lhs - rhs).abs();
            // eta(chi) = 1
            let dev_eta = (eta_t(&chi(&sigma), &sigma) - 1.0).abs();
            // tangency of J Q
            let jq = fiber_complex_structure(e.vertical(), sigma.phi()).unwrap();
            let dev_j = tangency_residual(&jq, sigma.phi());
            worst = worst.max(dev_f).max(dev_c).max(dev_eta).max(dev_j);
            checks += 4;
        }
        // h-orthonormality of the standard vertical basis in random frames
        for s in 0..4 {
            let frame = random_orthogonal::<f64>(n, 800 + s);
            let basis = standard_vertical_basis(&frame).unwrap();
            let sigma = {
                let canonical = canonical_structure::<f64>(n).unwrap();
                AlmostContactStructure::try_new(
                    canonical.phi().endo().conjugate(&frame),
                    &frame * canonical.xi(),
                    1e-8,
                )
                .unwrap()
            };
            for (i, p) in basis.iter().enumerate() {
                for (j, q) in basis.iter().enumerate() {
                    let h = fiber_metric_h(p, q, sigma.phi()).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((h - expect).abs());
                    checks += 1;
                }
            }
        }
    }
    verdict(
        "criterion 8 (structural invariants)",
        worst <= 1e-10 && checks >= 1000,
        format!("{checks} checks, max deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_09_trace_consistency() {
    let (nu, t) = (1.0, 0.5);
    let cfg = SampleConfig::default();
    let v = verify_theorem::<f64>(3, nu, t, 9, &cfg, 1e-9).unwrap();
    let sigma = canonical_structure::<f64>(3).unwrap();
    let s = twistor_scalar_curvature::<f64>(3, nu, t).unwrap();
    let c_chi = ricci_const_curv(&chi(&sigma), &sigma, nu, t).unwrap();
    let trace_s = (s - (5.0 * v.a + v.b)).abs();
    let chi_dev = (c_chi - (v.a + v.b)).abs();
    // s_base + t^{-1}(k^3+k^2) = (2k^2+4k+1)a + b, i.e. 6 + 4 = 7a + b = 10
    let lemma1 = (6.0 * nu + (1.0 / t) * 2.0 - (7.0 * v.a + v.b)).abs();
    let pass = trace_s <= 1e-9 && chi_dev <= 1e-9 && lemma1 <= 1e-9;
    verdict(
        "criterion 9 (trace consistency)",
        pass,
        format!(
            "s={s:.12} vs 5a+b={:.12}; c_t(chi,chi)={c_chi:.12} vs a+b={:.12}; lemma1 dev={lemma1:.2e}",
            5.0 * v.a + v.b,
            v.a + v.b
        ),
    );
}

#[test]
fn criterion_10_curvature_engine_calibration() {
    let cfg = FdConfig::<f64>::default();
    let chart = space_form_chart::<f64>(1.0, 3).unwrap();
    let mut rng = seeded_rng(10);
    use rand::RngExt;
    let mut worst_id: f64 = 0.0;
    for _ in 0..3 {
        let x: Vec<f64> = (0..3).map(|_| (rng.random::<f64>() - 0.5) * 1.2).collect();
        let op = curvature_operator(&chart, &x, &cfg).unwrap();
        worst_id = worst_id.max((op - DMatrix::<f64>::identity(3, 3)).norm());
    }
    let mut worst_co: f64 = 0.0;
    for eps in [0.1, 0.2] {
        let chart = perturbed_space_form_chart::<f64>(1.0, 3, eps).unwrap();
        for _ in 0..2 {
            let x: Vec<f64> = (0..3).map(|_| (rng.random::<f64>() - 0.5) * 1.2).collect();
            let data = curvature_data(&chart, &x, &cfg, false).unwrap();
            let assembled = curvature_operator_3d(data.ricci(), data.scalar()).unwrap();
            worst_co = worst_co
                .max((assembled - data.operator()).norm() / data.operator().norm().max(1.0));
        }
    }
    verdict(
        "criterion 10 (curvature engine calibration)",
        worst_id <= 1e-5 && worst_co <= 1e-3,
        format!("|R - Id| = {worst_id:.2e}; operator reassembly relative deviation = {worst_co:.2e}"),
    );
}
