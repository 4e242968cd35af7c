//! Adaptive one-dimensional quadrature.
//!
//! Worst-interval-first subdivision driven by a 15-point Gauss-Kronrod
//! kernel. Improper integrals are handled upstream by mapping tails onto
//! finite intervals with a model-specific substitution, so the engine only
//! ever sees finite bounds (integrands may still have integrable endpoint
//! singularities, which the open Kronrod nodes tolerate).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// QUADPACK QK15 nodes on [-1, 1] (positive half). Even indices are
// Kronrod-only nodes, odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// 15-point Gauss-Kronrod rule on [a, b]; returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_abs = res_kronrod.abs();

    let mut fv = [0.0f64; 14]; // paired evaluations for the asc estimate
    for j in 0..7 {
        let abscissa = half * XGK[j];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv[j] = f1;
        fv[7 + j] = f2;
        let fsum = f1 + f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[7 + j] - mean).abs());
    }

    res_abs *= abs_half;
    res_asc *= abs_half;
    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    (res_kronrod * half, rescale_error(raw_err, res_abs, res_asc))
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

/// Default subdivision cap.
pub const MAX_INTERVALS: usize = 10_000;

/// Integrate `f` over the finite interval [a, b].
///
/// Stops once the accumulated error estimate drops below
/// `max(abs_tol, rel_tol * |integral|)`; exceeding `max_intervals`
/// subdivisions is a numerical error carrying diagnostics.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::domain(format!(
            "invalid integration bounds [{a}, {b}]"
        )));
    }
    let (value, error) = qk15(&f, a, b);
    if !value.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }

    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;

    while total_error > abs_tol.max(rel_tol * total_value.abs()) {
        if heap.len() >= max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature did not converge: {} intervals, value ~ {:.6e}, \
                 error estimate {:.3e}, requested rel_tol {:.1e}",
                heap.len(),
                total_value,
                total_error,
                rel_tol
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; accept its estimate
            total_error -= worst.error;
            heap.push(Interval {
                error: 0.0,
                ..worst
            });
            continue;
        }
        let (lv, le) = qk15(&f, worst.a, mid);
        let (rv, re) = qk15(&f, mid, worst.b);
        if !(lv.is_finite() && rv.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite integrand near [{}, {}]",
                worst.a, worst.b
            )));
        }
        total_value += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }

    Ok(QuadResult {
        value: total_value,
        abs_error: total_error,
        intervals: heap.len(),
    })
}
