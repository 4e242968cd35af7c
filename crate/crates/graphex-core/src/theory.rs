//! Exact expectation oracles and bias diagnostics.
//!
//! Everything here is pure quadrature against a model's base measure; the
//! samplers never feed into these routines, so they serve as independent
//! references for the Monte Carlo pipeline. The sigma = 1 boundary of the
//! regular-variation dichotomy (where the marginal tail integral picks up
//! an extra slowly-varying factor) has no canonical model in the toolkit
//! and is intentionally not represented.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::models::{BipartiteModelSpec, ModelSpec};

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol >= 1e-12) {
        return Err(Error::domain(format!(
            "rel_tol must be at least 1e-12, got {rel_tol}"
        )));
    }
    Ok(())
}

/// Smoothed-vertex-count integral I(t) = int (1 - e^{-t mu(x)}) rho(dx).
fn vertex_integral(model: &ModelSpec, t: f64, rel_tol: f64) -> Result<f64> {
    model.integrate_against_rho(
        |x| {
            let m = model.mu(x);
            if m <= 0.0 {
                0.0
            } else {
                -(-t * m).exp_m1()
            }
        },
        rel_tol,
    )
}

/// E[N_{p,size}] = p size int (1 - e^{-p size mu(x)}) rho(dx).
pub fn expected_n_p(model: &ModelSpec, p: f64, size: f64, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("p must be in (0, 1], got {p}")));
    }
    if !(size > 0.0) {
        return Err(Error::domain(format!("size must be positive, got {size}")));
    }
    Ok(p * size * vertex_integral(model, p * size, rel_tol)?)
}

/// Exact finite-size bias of the degree-smoothing estimator,
/// b = log(E N_1 / E N_p)/(-log p) - 1 - sigma.
pub fn bias_b(model: &ModelSpec, p: f64, size: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must be in (0, 1), got {p}")));
    }
    let en1 = expected_n_p(model, 1.0, size, 1e-10)?;
    let enp = expected_n_p(model, p, size, 1e-10)?;
    Ok(bias_from_expectations(en1, enp, p, model.sigma()))
}

/// Bias formula applied to externally supplied expectations; vanishes
/// identically when E N_p = p^{1+sigma} E N_1.
pub fn bias_from_expectations(en1: f64, enp: f64, p: f64, sigma: f64) -> f64 {
    (en1 / enp).ln() / (-p.ln()) - 1.0 - sigma
}

/// Second-order regular-variation diagnostics over a size grid.
#[derive(Debug, Clone)]
pub struct BiasDiagnostics {
    pub sizes: Vec<f64>,
    /// |I(p size) / (p^sigma I(size)) - 1| per size.
    pub gamma_values: Vec<f64>,
    /// Exact bias b per size.
    pub bias_values: Vec<f64>,
    /// OLS slope of log gamma against log size over the top half of sizes.
    pub loglog_slope: f64,
}

/// Numerical ratio deviation of the two vertex integrals, plus the exact
/// bias, per size, with a fitted log-log decay slope.
pub fn gamma_diagnostic(model: &ModelSpec, p: f64, sizes: &[f64]) -> Result<BiasDiagnostics> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must be in (0, 1), got {p}")));
    }
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("sizes must be strictly increasing"));
    }
    let sigma = model.sigma();
    let mut gamma_values = Vec::with_capacity(sizes.len());
    let mut bias_values = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let i_full = vertex_integral(model, size, 1e-10)?;
        let i_thin = vertex_integral(model, p * size, 1e-10)?;
        gamma_values.push((i_thin / (p.powf(sigma) * i_full) - 1.0).abs());
        bias_values.push(bias_from_expectations(
            size * i_full,
            p * size * i_thin,
            p,
            sigma,
        ));
    }
    let start = sizes.len() / 2;
    let xs: Vec<f64> = sizes[start..].iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = gamma_values[start..]
        .iter()
        .map(|g| g.max(1e-300).ln())
        .collect();
    Ok(BiasDiagnostics {
        sizes: sizes.to_vec(),
        gamma_values,
        bias_values,
        loglog_slope: ols_slope(&xs, &ys),
    })
}

/// Least-squares slope of ys against xs.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// E[M_{s,alpha}] = (s/2) int (1 - e^{-(alpha/2) mu_v(x)}) rho(dx).
pub fn expected_m(bmodel: &BipartiteModelSpec, s: f64, alpha: f64, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    if !(s > 0.0 && alpha > 0.0) {
        return Err(Error::domain(format!(
            "sizes must be positive, got ({s}, {alpha})"
        )));
    }
    let integral = bmodel.integrate_against_rho_v(
        |x| {
            let m = bmodel.mu_v(x);
            if m <= 0.0 {
                0.0
            } else {
                -(-0.5 * alpha * m).exp_m1()
            }
        },
        rel_tol,
    )?;
    Ok(0.5 * s * integral)
}

/// E[D_k] = (s alpha^k / k!) int mu_v(x)^k e^{-alpha mu_v(x)} rho(dx)
/// for the left part.
pub fn expected_dk(
    bmodel: &BipartiteModelSpec,
    s: f64,
    alpha: f64,
    k: u64,
    rel_tol: f64,
) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    if k < 1 {
        return Err(Error::domain("degree k must be at least 1"));
    }
    if !(s > 0.0 && alpha > 0.0) {
        return Err(Error::domain(format!(
            "sizes must be positive, got ({s}, {alpha})"
        )));
    }
    let kf = k as f64;
    let log_norm = ln_gamma(kf + 1.0);
    // integrand evaluated in log space so huge alpha^k and tiny mu^k cancel
    let integral = bmodel.integrate_against_rho_v(
        |x| {
            let m = bmodel.mu_v(x);
            if m <= 0.0 {
                0.0
            } else {
                (kf * (alpha * m).ln() - alpha * m - log_norm).exp()
            }
        },
        rel_tol,
    )?;
    Ok(s * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn dense_expected_n1_matches_antiderivative() {
        // independent oracle: alpha (1 - (2/alpha)(1 - e^{-alpha/2}))
        let model = ModelSpec::dense();
        for alpha in [3.0f64, 50.0, 400.0] {
            let closed = alpha * (1.0 - 2.0 / alpha * (1.0 - (-alpha / 2.0).exp()));
            let quad = expected_n_p(&model, 1.0, alpha, 1e-10).unwrap();
            assert!(
                (quad - closed).abs() / closed < 1e-9,
                "alpha {alpha}: {quad} vs {closed}"
            );
        }
    }

    #[test]
    fn substitution_identity() {
        let models = [
            ModelSpec::dense(),
            ModelSpec::almost_dense(),
            ModelSpec::sparse_separable(0.3).unwrap(),
            ModelSpec::sparse_nonseparable(0.3).unwrap(),
            ModelSpec::ggp(0.5).unwrap(),
        ];
        for model in &models {
            for p in [0.25, 0.5, 0.75] {
                for alpha in [10.0, 100.0, 1000.0] {
                    let a = expected_n_p(model, p, alpha, 1e-10).unwrap();
                    let b = expected_n_p(model, 1.0, p * alpha, 1e-10).unwrap();
                    assert!(
                        (a - b).abs() / b < 1e-6,
                        "{:?} p={p} alpha={alpha}",
                        model.kind()
                    );
                }
            }
        }
    }

    #[test]
    fn ggp_asymptote_within_ten_percent() {
        // alpha^{1+sigma} ell Gamma(1-sigma) with ell the model's constant
        let model = ModelSpec::ggp(0.5).unwrap();
        let value = expected_n_p(&model, 1.0, 400.0, 1e-10).unwrap();
        let ell = model.ell_limit().unwrap();
        let asymptote = 400f64.powf(1.5) * ell * gamma(0.5);
        let ratio = value / asymptote;
        assert!((ratio - 1.0).abs() < 0.10, "ratio {ratio}");
    }

    #[test]
    fn expected_n_p_strictly_increasing_in_size() {
        let models = [
            ModelSpec::dense(),
            ModelSpec::almost_dense(),
            ModelSpec::sparse_separable(0.3).unwrap(),
            ModelSpec::ggp(0.5).unwrap(),
        ];
        for model in &models {
            let mut prev = 0.0;
            for alpha in [1.0, 5.0, 25.0, 125.0, 625.0] {
                let v = expected_n_p(model, 0.5, alpha, 1e-10).unwrap();
                assert!(v > prev, "{:?} at alpha {alpha}", model.kind());
                prev = v;
            }
        }
    }

    #[test]
    fn bias_is_zero_on_an_exact_power_law() {
        // synthetic expectations with E N_p = p^{1+sigma} E N_1
        for sigma in [0.0, 0.3, 0.5, 0.9] {
            for p in [0.3f64, 0.5, 0.7] {
                let en1 = 1234.5f64;
                let enp = p.powf(1.0 + sigma) * en1;
                let b = bias_from_expectations(en1, enp, p, sigma);
                assert!(b.abs() < 1e-12, "sigma {sigma} p {p}: {b}");
            }
        }
    }

    #[test]
    fn dense_bias_vanishes_at_large_size() {
        let model = ModelSpec::dense();
        let b = bias_b(&model, 0.5, 1e4).unwrap();
        assert!(b.abs() <= 1e-3, "bias {b}");
    }

    #[test]
    fn ggp_scaled_bias_stays_bounded() {
        // decay exponent sigma: b(alpha) alpha^sigma bounded over the sweep
        let model = ModelSpec::ggp(0.5).unwrap();
        let mut worst: f64 = 0.0;
        for exp in 4..=12 {
            let alpha = (1u64 << exp) as f64;
            let b = bias_b(&model, 0.5, alpha).unwrap();
            worst = worst.max(b.abs() * alpha.powf(0.5));
        }
        assert!(worst < 3.0, "scaled bias {worst}");
    }

    #[test]
    fn bias_bounded_by_gamma_diagnostic() {
        // |b| <= Gamma (1 + Gamma) / (-log p); the first-order bound alone
        // is off by O(Gamma^2) when the integral ratio sits below one
        let sizes: Vec<f64> = (4..=12).map(|e| (1u64 << e) as f64).collect();
        for model in [
            ModelSpec::dense(),
            ModelSpec::almost_dense(),
            ModelSpec::sparse_separable(0.3).unwrap(),
            ModelSpec::ggp(0.5).unwrap(),
        ] {
            let p = 0.5;
            let d = gamma_diagnostic(&model, p, &sizes).unwrap();
            for ((b, g), size) in d.bias_values.iter().zip(&d.gamma_values).zip(&sizes) {
                assert!(
                    b.abs() <= g * (1.0 + g) / (-p.ln()) + 1e-12,
                    "{:?} at size {size}: |b| = {} vs gamma bound {}",
                    model.kind(),
                    b.abs(),
                    g / (-p.ln())
                );
            }
        }
    }

    #[test]
    fn expected_m_closed_form_and_scaling() {
        let bm = BipartiteModelSpec::dense();
        let (s, alpha) = (50.0f64, 50.0f64);
        // (s/2) [1 - (4/alpha)(1 - e^{-alpha/4})]
        let closed = 0.5 * s * (1.0 - 4.0 / alpha * (1.0 - (-alpha / 4.0).exp()));
        let quad = expected_m(&bm, s, alpha, 1e-10).unwrap();
        assert!((quad - closed).abs() / closed < 1e-9);

        let ggp = BipartiteModelSpec::ggp(0.5, 0.5).unwrap();
        let m1 = expected_m(&ggp, 3.0, 80.0, 1e-10).unwrap();
        let m2 = expected_m(&ggp, 6.0, 80.0, 1e-10).unwrap();
        assert!((m2 - 2.0 * m1).abs() / m2 < 1e-12, "s-linearity");
    }

    #[test]
    fn expected_m_ggp_asymptote() {
        let bm = BipartiteModelSpec::ggp(0.5, 0.5).unwrap();
        let (s, alpha) = (1.0, 400.0);
        let value = expected_m(&bm, s, alpha, 1e-10).unwrap();
        let ell_v = bm.ell_v_limit();
        let asymptote = 0.5 * s * (alpha / 2.0f64).powf(0.5) * ell_v * gamma(0.5);
        assert!(
            (value / asymptote - 1.0).abs() < 0.10,
            "ratio {}",
            value / asymptote
        );
    }

    #[test]
    fn expected_dk_poisson_mass_identity() {
        // sum_k E[D_k] equals the expected count of non-isolated left vertices
        let bm = BipartiteModelSpec::ggp(0.5, 0.5).unwrap();
        let (s, alpha) = (2.0, 30.0);
        let mut sum = 0.0;
        for k in 1..=400 {
            let term = expected_dk(&bm, s, alpha, k, 1e-10).unwrap();
            sum += term;
            if term < 1e-12 * sum {
                break;
            }
        }
        let total = s * bm
            .integrate_against_rho_v(
                |x| {
                    let m = bm.mu_v(x);
                    if m <= 0.0 {
                        0.0
                    } else {
                        -(-alpha * m).exp_m1()
                    }
                },
                1e-10,
            )
            .unwrap();
        assert!((sum - total).abs() / total < 1e-4, "{sum} vs {total}");
    }

    #[test]
    fn expected_dk_ratio_approaches_prop2_limit() {
        // E[D_2]/E[D_1] -> (1 - sigma)/2 for sigma = 0.5
        let bm = BipartiteModelSpec::ggp(0.5, 0.5).unwrap();
        let d1 = expected_dk(&bm, 1.0, 800.0, 1, 1e-10).unwrap();
        let d2 = expected_dk(&bm, 1.0, 800.0, 2, 1e-10).unwrap();
        let ratio = d2 / d1;
        assert!((ratio - 0.25).abs() / 0.25 < 0.05, "ratio {ratio}");
    }

    #[test]
    fn expected_dk_s_linearity() {
        let bm = BipartiteModelSpec::sparse_separable(0.4, 0.4).unwrap();
        let a = expected_dk(&bm, 2.0, 50.0, 3, 1e-10).unwrap();
        let b = expected_dk(&bm, 4.0, 50.0, 3, 1e-10).unwrap();
        assert!((b - 2.0 * a).abs() / b < 1e-12);
    }

    #[test]
    fn rel_tol_floor_enforced() {
        let model = ModelSpec::dense();
        assert!(expected_n_p(&model, 0.5, 10.0, 1e-13).is_err());
        assert!(expected_n_p(&model, 1.5, 10.0, 1e-8).is_err());
    }
}
