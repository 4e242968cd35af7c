//! Closed-form descriptions of the canonical graphex models.
//!
//! Each model bundles its graphon W, marginal mu(x) = int W(x,x') rho(dx'),
//! two-point correlation nu, base-measure density rho, true tail-index and
//! the tail bounds the sampler needs to truncate the latent domain. The
//! marginals and correlations are evaluated through `expm1`/`ln_1p` so they
//! stay accurate deep into the tails, where the quadrature oracles probe.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use statrs::function::gamma::{gamma, gamma_li, gamma_ui};

use crate::error::{Error, Result};
use crate::quad::{adaptive, MAX_INTERVALS};

/// The five canonical unipartite model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// W(x,y) = (1-x)(1-y) on [0,1]^2; dense, sigma = 0.
    Dense,
    /// W(x,y) = exp(-x-y); sparse but almost dense, sigma = 0.
    AlmostDense,
    /// W(x,y) = (1+x)^(-1/s) (1+y)^(-1/s); power law, separable.
    SparseSeparable,
    /// W(x,y) = (1+x+y)^(-1/s-1); power law, non-separable.
    SparseNonSeparable,
    /// Generalized gamma process: rho(dx) = x^(-1-s) e^(-x) / Gamma(1-s)
    /// with the pair kernel W(x,y) = 1 - exp(-2xy) (the multigraph
    /// construction assigns Poisson(2 x_i x_j) interactions per pair).
    Ggp,
}

impl ModelKind {
    /// CLI / config key.
    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Dense => "dense",
            ModelKind::AlmostDense => "almost-dense",
            ModelKind::SparseSeparable => "sparse-sep",
            ModelKind::SparseNonSeparable => "sparse-nonsep",
            ModelKind::Ggp => "ggp",
        }
    }
}

/// A fully specified unipartite graphex model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    kind: ModelKind,
    sigma: f64,
}

/// Stable (1+x)^(-1/s) for x >= 0.
fn pow_one_plus(x: f64, exponent: f64) -> f64 {
    (exponent * x.ln_1p()).exp()
}

impl ModelSpec {
    pub fn dense() -> Self {
        ModelSpec {
            kind: ModelKind::Dense,
            sigma: 0.0,
        }
    }

    pub fn almost_dense() -> Self {
        ModelSpec {
            kind: ModelKind::AlmostDense,
            sigma: 0.0,
        }
    }

    pub fn sparse_separable(sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::SparseSeparable, sigma)
    }

    pub fn sparse_nonseparable(sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::SparseNonSeparable, sigma)
    }

    pub fn ggp(sigma: f64) -> Result<Self> {
        Self::checked(ModelKind::Ggp, sigma)
    }

    fn checked(kind: ModelKind, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::domain(format!(
                "{} requires a tail-index in (0, 1), got {sigma}",
                kind.key()
            )));
        }
        Ok(ModelSpec { kind, sigma })
    }

    /// Resolve a CLI key plus optional sigma.
    pub fn from_key(key: &str, sigma: Option<f64>) -> Result<Self> {
        match key {
            "dense" => Ok(Self::dense()),
            "almost-dense" => Ok(Self::almost_dense()),
            "sparse-sep" => Self::sparse_separable(Self::require_sigma(key, sigma)?),
            "sparse-nonsep" => Self::sparse_nonseparable(Self::require_sigma(key, sigma)?),
            "ggp" => Self::ggp(Self::require_sigma(key, sigma)?),
            other => Err(Error::domain(format!(
                "unknown model '{other}' (expected dense, almost-dense, sparse-sep, sparse-nonsep or ggp)"
            ))),
        }
    }

    fn require_sigma(key: &str, sigma: Option<f64>) -> Result<f64> {
        sigma.ok_or_else(|| Error::domain(format!("model '{key}' requires sigma=<float>")))
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// True tail-index of the marginal (0 for the dense families).
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Correlation-bound exponent eta.
    pub fn eta(&self) -> f64 {
        match self.kind {
            ModelKind::SparseNonSeparable => 0.5 * (1.0 + self.sigma),
            _ => 1.0,
        }
    }

    /// Sharp constant C with nu(x,x') <= C mu(x)^eta mu(x')^eta.
    pub fn assumption5_bound(&self) -> f64 {
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => 4.0 / 3.0,
            ModelKind::AlmostDense => 0.5,
            ModelKind::SparseSeparable => (1.0 - s) * (1.0 - s) / (s * (2.0 - s)),
            ModelKind::SparseNonSeparable => s.powf(-s) / (2.0 + s),
            ModelKind::Ggp => 1.0 - s,
        }
    }

    /// Constant limit of z^sigma F(z) as z -> 0 where F is the marginal tail
    /// function; `None` for the almost-dense family whose slowly varying
    /// factor is logarithmic rather than constant.
    pub fn ell_limit(&self) -> Option<f64> {
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => Some(1.0),
            ModelKind::AlmostDense => None,
            ModelKind::SparseSeparable => Some((s / (1.0 - s)).powf(s)),
            ModelKind::SparseNonSeparable => Some(s.powf(s)),
            // mu(x) ~ 2x near zero shifts the tail constant by 2^sigma
            ModelKind::Ggp => Some(2f64.powf(s) / (s * gamma(1.0 - s))),
        }
    }

    /// Graphon value; total on [0,inf)^2 (zero outside the support).
    pub fn graphon(&self, x: f64, y: f64) -> f64 {
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => {
                if x <= 1.0 && y <= 1.0 {
                    (1.0 - x) * (1.0 - y)
                } else {
                    0.0
                }
            }
            ModelKind::AlmostDense => (-x - y).exp(),
            ModelKind::SparseSeparable => pow_one_plus(x, -1.0 / s) * pow_one_plus(y, -1.0 / s),
            ModelKind::SparseNonSeparable => ((-1.0 / s - 1.0) * (x + y).ln_1p()).exp(),
            ModelKind::Ggp => -(-2.0 * x * y).exp_m1(),
        }
    }

    /// Closed-form marginal mu(x) = int W(x,x') rho(dx').
    pub fn eval_mu(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("mu requires x >= 0, got {x}")));
        }
        Ok(self.mu(x))
    }

    pub(crate) fn mu(&self, x: f64) -> f64 {
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => {
                if x <= 1.0 {
                    0.5 * (1.0 - x)
                } else {
                    0.0
                }
            }
            ModelKind::AlmostDense => (-x).exp(),
            ModelKind::SparseSeparable => s / (1.0 - s) * pow_one_plus(x, -1.0 / s),
            ModelKind::SparseNonSeparable => s * pow_one_plus(x, -1.0 / s),
            ModelKind::Ggp => (s * (2.0 * x).ln_1p()).exp_m1() / s,
        }
    }

    /// Two-point correlation nu(x,x') = int W(x,y) W(y,x') rho(dy).
    ///
    /// Closed form except for the non-separable family, which is computed by
    /// adaptive quadrature and cached.
    pub fn eval_nu(&self, x: f64, y: f64) -> Result<f64> {
        if !(x >= 0.0) || !(y >= 0.0) {
            return Err(Error::domain(format!(
                "nu requires x, y >= 0, got ({x}, {y})"
            )));
        }
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => {
                if x <= 1.0 && y <= 1.0 {
                    Ok((1.0 - x) * (1.0 - y) / 3.0)
                } else {
                    Ok(0.0)
                }
            }
            ModelKind::AlmostDense => Ok(0.5 * (-x - y).exp()),
            ModelKind::SparseSeparable => {
                Ok(s / (2.0 - s) * pow_one_plus(x, -1.0 / s) * pow_one_plus(y, -1.0 / s))
            }
            ModelKind::SparseNonSeparable => self.nu_nonseparable(x, y),
            ModelKind::Ggp => {
                let a = (s * (2.0 * x).ln_1p()).exp_m1();
                let b = (s * (2.0 * y).ln_1p()).exp_m1();
                let c = (s * (2.0 * (x + y)).ln_1p()).exp_m1();
                Ok((a + b - c) / s)
            }
        }
    }

    fn nu_nonseparable(&self, x: f64, y: f64) -> Result<f64> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64), f64>>> = OnceLock::new();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let key = (self.sigma.to_bits(), lo.to_bits(), hi.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(&v) = cache.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let v = self.integrate_against_rho(|t| self.graphon(lo, t) * self.graphon(t, hi), 1e-10)?;
        cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Base-measure density of rho with respect to Lebesgue measure.
    pub fn rho_density(&self, x: f64) -> f64 {
        match self.kind {
            ModelKind::Ggp => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    let s = self.sigma;
                    ((-1.0 - s) * x.ln() - x).exp() / gamma(1.0 - s)
                }
            }
            _ => 1.0,
        }
    }

    /// rho-mass of the window [lo, hi].
    pub fn rho_mass(&self, lo: f64, hi: f64) -> f64 {
        match self.kind {
            ModelKind::Ggp => self.ggp_upper_mass(lo) - self.ggp_upper_mass(hi),
            _ => (hi - lo).max(0.0),
        }
    }

    /// GGP rho-mass of [a, inf); infinite at a = 0.
    pub(crate) fn ggp_upper_mass(&self, a: f64) -> f64 {
        ggp_tail_mass(self.sigma, a)
    }

    /// Latent-domain window with the expected number of edges touching the
    /// omitted region bounded by `budget`.
    pub fn truncation_bounds(&self, size: f64, budget: f64) -> Result<(f64, f64)> {
        if !(size > 0.0) {
            return Err(Error::domain(format!("size must be positive, got {size}")));
        }
        if !(budget > 0.0) {
            return Err(Error::domain(format!(
                "budget must be positive, got {budget}"
            )));
        }
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => Ok((0.0, 1.0)),
            ModelKind::AlmostDense => {
                // size^2 e^{-x} + (size/2) e^{-2x} = budget
                let mass = |x: f64| size * size * (-x).exp() + 0.5 * size * (-2.0 * x).exp();
                Ok((0.0, solve_decreasing(mass, budget, 0.0)))
            }
            ModelKind::SparseSeparable => {
                let c_mu = (s / (1.0 - s)) * (s / (1.0 - s));
                let mass = |x: f64| {
                    size * size * c_mu * pow_one_plus(x, -(1.0 - s) / s)
                        + size * s / (2.0 - s) * pow_one_plus(x, -(2.0 - s) / s)
                };
                Ok((0.0, solve_decreasing(mass, budget, 0.0)))
            }
            ModelKind::SparseNonSeparable => {
                let c_mu = s * s / (1.0 - s);
                let mass = |x: f64| {
                    size * size * c_mu * pow_one_plus(x, -(1.0 - s) / s)
                        + size * 0.5 * s * ((-1.0 / s) * (2.0 * x).ln_1p()).exp()
                };
                Ok((0.0, solve_decreasing(mass, budget, 0.0)))
            }
            ModelKind::Ggp => {
                let g1ms = gamma(1.0 - s);
                // mu(x) <= 2x below, W(x,x) <= 2x^2: incomplete-gamma bounds
                let lower = |d: f64| {
                    2.0 * (size * size * gamma_li(1.0 - s, d) + size * gamma_li(2.0 - s, d)) / g1ms
                };
                let x_min = solve_increasing(lower, 0.5 * budget, 0.5);
                // for x >= 1: mu <= (3x)^sigma / sigma and rho-tail <= b^{-s} e^{-b}/(s Gamma)
                let upper = |b: f64| {
                    (size * size * 3f64.powf(s) * (-b).exp() / b / s
                        + size * b.powf(-s) * (-b).exp() / s)
                        / g1ms
                };
                let x_max = solve_decreasing(upper, 0.5 * budget, 1.0);
                Ok((x_min, x_max))
            }
        }
    }

    pub(crate) fn measure_plan(&self) -> Vec<Seg> {
        let s = self.sigma;
        match self.kind {
            ModelKind::Dense => vec![Seg::Lebesgue { a: 0.0, b: 1.0 }],
            ModelKind::AlmostDense => vec![
                Seg::Lebesgue { a: 0.0, b: 1.0 },
                Seg::LebesgueExp {
                    a: 1.0,
                    b: f64::INFINITY,
                },
            ],
            ModelKind::SparseSeparable | ModelKind::SparseNonSeparable => vec![
                Seg::Lebesgue { a: 0.0, b: 1.0 },
                Seg::LebesguePow {
                    a: 1.0,
                    b: f64::INFINITY,
                    kappa: (1.0 - s) / s,
                },
            ],
            ModelKind::Ggp => vec![
                Seg::GgpLower {
                    a: 0.0,
                    b: 1.0,
                    sigma: s,
                },
                Seg::GgpExp {
                    a: 1.0,
                    b: f64::INFINITY,
                    sigma: s,
                },
            ],
        }
    }

    /// Integral of `f` against the base measure rho over the whole latent
    /// domain, to relative tolerance `rel_tol`.
    pub fn integrate_against_rho<F: Fn(f64) -> f64>(&self, f: F, rel_tol: f64) -> Result<f64> {
        self.integrate_against_rho_on(f, 0.0, f64::INFINITY, rel_tol)
    }

    /// Same, restricted to the window [lo, hi].
    pub fn integrate_against_rho_on<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        hi: f64,
        rel_tol: f64,
    ) -> Result<f64> {
        let mut total = 0.0;
        for seg in self.measure_plan() {
            if let Some(clipped) = seg.clip(lo, hi) {
                total += clipped.integrate(&f, rel_tol)?;
            }
        }
        Ok(total)
    }
}

/// Mass of a generalized-gamma base measure on [a, inf) (integration by
/// parts against the x^{-sigma} antiderivative); infinite at a = 0.
pub(crate) fn ggp_tail_mass(sigma: f64, a: f64) -> f64 {
    if a <= 0.0 {
        return f64::INFINITY;
    }
    if a.is_infinite() {
        return 0.0;
    }
    (a.powf(-sigma) * (-a).exp() - gamma_ui(1.0 - sigma, a)) / (sigma * gamma(1.0 - sigma))
}

/// Smallest x >= lo with f(x) <= target, for decreasing f.
fn solve_decreasing<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64) -> f64 {
    if f(lo) <= target {
        return lo;
    }
    let mut hi = lo.max(1.0);
    while f(hi) > target {
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    let mut a = lo;
    let mut b = hi;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid) > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    b
}

/// Largest x <= hi with f(x) <= target, for increasing f with f(0+) = 0.
fn solve_increasing<F: Fn(f64) -> f64>(f: F, target: f64, hi: f64) -> f64 {
    if f(hi) <= target {
        return hi;
    }
    let mut a = 0.0;
    let mut b = hi;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid) <= target {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// One finite piece of an improper integral against a base measure, in a
/// transformed coordinate where the integrand is bounded.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Seg {
    /// Lebesgue measure, identity coordinate on [a, b].
    Lebesgue { a: f64, b: f64 },
    /// Lebesgue measure, u = e^{-x}; b may be infinite.
    LebesgueExp { a: f64, b: f64 },
    /// Lebesgue measure, v = (1+x)^{-kappa}; b may be infinite.
    LebesguePow { a: f64, b: f64, kappa: f64 },
    /// GGP density near zero, w = x^{1-sigma} on [a, b] within (0, 1].
    GgpLower { a: f64, b: f64, sigma: f64 },
    /// GGP density, u = e^{-x} on [a, b] with a >= 1; b may be infinite.
    GgpExp { a: f64, b: f64, sigma: f64 },
}

impl Seg {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Seg::Lebesgue { a, b }
            | Seg::LebesgueExp { a, b }
            | Seg::LebesguePow { a, b, .. }
            | Seg::GgpLower { a, b, .. }
            | Seg::GgpExp { a, b, .. } => (a, b),
        }
    }

    fn with_bounds(&self, a: f64, b: f64) -> Seg {
        match *self {
            Seg::Lebesgue { .. } => Seg::Lebesgue { a, b },
            Seg::LebesgueExp { .. } => Seg::LebesgueExp { a, b },
            Seg::LebesguePow { kappa, .. } => Seg::LebesguePow { a, b, kappa },
            Seg::GgpLower { sigma, .. } => Seg::GgpLower { a, b, sigma },
            Seg::GgpExp { sigma, .. } => Seg::GgpExp { a, b, sigma },
        }
    }

    pub(crate) fn clip(&self, lo: f64, hi: f64) -> Option<Seg> {
        let (a, b) = self.bounds();
        let na = a.max(lo);
        let nb = b.min(hi);
        (na < nb).then(|| self.with_bounds(na, nb))
    }

    pub(crate) fn integrate<F: Fn(f64) -> f64>(&self, f: &F, rel_tol: f64) -> Result<f64> {
        // integrands vanish in far tails; returning 0 before multiplying by
        // the (possibly huge) Jacobian keeps the composition NaN-free
        match *self {
            Seg::Lebesgue { a, b } => {
                Ok(adaptive(|x| f(x), a, b, rel_tol, 0.0, MAX_INTERVALS)?.value)
            }
            Seg::LebesgueExp { a, b } => {
                let u_lo = if b.is_infinite() { 0.0 } else { (-b).exp() };
                let u_hi = (-a).exp();
                let g = |u: f64| {
                    let x = -u.ln();
                    let fx = f(x);
                    if fx == 0.0 {
                        0.0
                    } else {
                        fx / u
                    }
                };
                Ok(adaptive(g, u_lo, u_hi, rel_tol, 0.0, MAX_INTERVALS)?.value)
            }
            Seg::LebesguePow { a, b, kappa } => {
                let v_lo = if b.is_infinite() {
                    0.0
                } else {
                    pow_one_plus(b, -kappa)
                };
                let v_hi = pow_one_plus(a, -kappa);
                let g = |v: f64| {
                    let x = v.powf(-1.0 / kappa) - 1.0;
                    let fx = f(x);
                    if fx == 0.0 {
                        0.0
                    } else {
                        fx * v.powf(-1.0 / kappa - 1.0) / kappa
                    }
                };
                Ok(adaptive(g, v_lo, v_hi, rel_tol, 0.0, MAX_INTERVALS)?.value)
            }
            Seg::GgpLower { a, b, sigma } => {
                let norm = (1.0 - sigma) * gamma(1.0 - sigma);
                let w_lo = a.powf(1.0 - sigma);
                let w_hi = b.powf(1.0 - sigma);
                let g = |w: f64| {
                    let x = w.powf(1.0 / (1.0 - sigma));
                    if x <= 0.0 {
                        return 0.0;
                    }
                    let fx = f(x);
                    if fx == 0.0 {
                        0.0
                    } else {
                        // rho density times Jacobian folds to e^{-x}/(x norm)
                        fx * (-x).exp() / (x * norm)
                    }
                };
                Ok(adaptive(g, w_lo, w_hi, rel_tol, 0.0, MAX_INTERVALS)?.value)
            }
            Seg::GgpExp { a, b, sigma } => {
                let norm = gamma(1.0 - sigma);
                let u_lo = if b.is_infinite() { 0.0 } else { (-b).exp() };
                let u_hi = (-a).exp();
                let g = |u: f64| {
                    let x = -u.ln();
                    let fx = f(x);
                    if fx == 0.0 {
                        0.0
                    } else {
                        // e^{-x} cancels the 1/u Jacobian exactly
                        fx * ((-1.0 - sigma) * x.ln()).exp() / norm
                    }
                };
                Ok(adaptive(g, u_lo, u_hi, rel_tol, 0.0, MAX_INTERVALS)?.value)
            }
        }
    }
}

/// Mirrored bipartite families; the two parts may carry different
/// tail-indexes where the family is indexed by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipartiteKind {
    Dense,
    SparseSeparable,
    Ggp,
}

/// A bipartite graphex model: base measures rho (left) and psi (right) and
/// a not-necessarily-symmetric graphon W on the product space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteModelSpec {
    kind: BipartiteKind,
    sigma_v: f64,
    sigma_w: f64,
    /// int int W drho dpsi, fixed at construction (must be finite).
    mean_graphon: f64,
}

impl BipartiteModelSpec {
    pub fn dense() -> Self {
        BipartiteModelSpec {
            kind: BipartiteKind::Dense,
            sigma_v: 0.0,
            sigma_w: 0.0,
            mean_graphon: 0.25,
        }
    }

    pub fn sparse_separable(sigma_v: f64, sigma_w: f64) -> Result<Self> {
        for s in [sigma_v, sigma_w] {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::domain(format!(
                    "part tail-index must be in (0,1), got {s}"
                )));
            }
        }
        let mean = sigma_v / (1.0 - sigma_v) * sigma_w / (1.0 - sigma_w);
        Ok(BipartiteModelSpec {
            kind: BipartiteKind::SparseSeparable,
            sigma_v,
            sigma_w,
            mean_graphon: mean,
        })
    }

    pub fn ggp(sigma_v: f64, sigma_w: f64) -> Result<Self> {
        for s in [sigma_v, sigma_w] {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::domain(format!(
                    "part tail-index must be in (0,1), got {s}"
                )));
            }
        }
        let mut spec = BipartiteModelSpec {
            kind: BipartiteKind::Ggp,
            sigma_v,
            sigma_w,
            mean_graphon: f64::NAN,
        };
        // integrability of W against rho x psi, checked numerically
        let mean = spec.integrate_against_rho_v(|x| spec.mu_v(x), 1e-9)?;
        if !mean.is_finite() {
            return Err(Error::Numerical(
                "bipartite graphon is not integrable against rho x psi".into(),
            ));
        }
        spec.mean_graphon = mean;
        Ok(spec)
    }

    pub fn kind(&self) -> BipartiteKind {
        self.kind
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    pub fn sigma_w(&self) -> f64 {
        self.sigma_w
    }

    /// int int W drho dpsi.
    pub fn mean_graphon(&self) -> f64 {
        self.mean_graphon
    }

    pub fn graphon(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            BipartiteKind::Dense => {
                if x <= 1.0 && y <= 1.0 {
                    (1.0 - x) * (1.0 - y)
                } else {
                    0.0
                }
            }
            BipartiteKind::SparseSeparable => {
                pow_one_plus(x, -1.0 / self.sigma_v) * pow_one_plus(y, -1.0 / self.sigma_w)
            }
            BipartiteKind::Ggp => -(-2.0 * x * y).exp_m1(),
        }
    }

    /// Left marginal mu_v(x) = int W(x,y) psi(dy).
    pub fn mu_v(&self, x: f64) -> f64 {
        match self.kind {
            BipartiteKind::Dense => {
                if x <= 1.0 {
                    0.5 * (1.0 - x)
                } else {
                    0.0
                }
            }
            BipartiteKind::SparseSeparable => {
                self.sigma_w / (1.0 - self.sigma_w) * pow_one_plus(x, -1.0 / self.sigma_v)
            }
            BipartiteKind::Ggp => (self.sigma_w * (2.0 * x).ln_1p()).exp_m1() / self.sigma_w,
        }
    }

    /// Right marginal mu_w(y) = int W(x,y) rho(dx).
    pub fn mu_w(&self, y: f64) -> f64 {
        match self.kind {
            BipartiteKind::Dense => {
                if y <= 1.0 {
                    0.5 * (1.0 - y)
                } else {
                    0.0
                }
            }
            BipartiteKind::SparseSeparable => {
                self.sigma_v / (1.0 - self.sigma_v) * pow_one_plus(y, -1.0 / self.sigma_w)
            }
            BipartiteKind::Ggp => (self.sigma_v * (2.0 * y).ln_1p()).exp_m1() / self.sigma_v,
        }
    }

    /// Left two-point correlation nu_v(x,x') = int W(x,y) W(x',y) psi(dy).
    pub fn nu_v(&self, x: f64, xp: f64) -> f64 {
        match self.kind {
            BipartiteKind::Dense => {
                if x <= 1.0 && xp <= 1.0 {
                    (1.0 - x) * (1.0 - xp) / 3.0
                } else {
                    0.0
                }
            }
            BipartiteKind::SparseSeparable => {
                self.sigma_w / (2.0 - self.sigma_w)
                    * pow_one_plus(x, -1.0 / self.sigma_v)
                    * pow_one_plus(xp, -1.0 / self.sigma_v)
            }
            BipartiteKind::Ggp => {
                let sw = self.sigma_w;
                let a = (sw * (2.0 * x).ln_1p()).exp_m1();
                let b = (sw * (2.0 * xp).ln_1p()).exp_m1();
                let c = (sw * (2.0 * (x + xp)).ln_1p()).exp_m1();
                (a + b - c) / sw
            }
        }
    }

    /// Constant limit of z^{sigma_v} F_v(z) as z -> 0.
    pub fn ell_v_limit(&self) -> f64 {
        match self.kind {
            BipartiteKind::Dense => 1.0,
            BipartiteKind::SparseSeparable => {
                (self.sigma_w / (1.0 - self.sigma_w)).powf(self.sigma_v)
            }
            BipartiteKind::Ggp => {
                2f64.powf(self.sigma_v) / (self.sigma_v * gamma(1.0 - self.sigma_v))
            }
        }
    }

    fn part_plan(&self, sigma: f64) -> Vec<Seg> {
        match self.kind {
            BipartiteKind::Dense => vec![Seg::Lebesgue { a: 0.0, b: 1.0 }],
            BipartiteKind::SparseSeparable => vec![
                Seg::Lebesgue { a: 0.0, b: 1.0 },
                Seg::LebesguePow {
                    a: 1.0,
                    b: f64::INFINITY,
                    kappa: (1.0 - sigma) / sigma,
                },
            ],
            BipartiteKind::Ggp => vec![
                Seg::GgpLower {
                    a: 0.0,
                    b: 1.0,
                    sigma,
                },
                Seg::GgpExp {
                    a: 1.0,
                    b: f64::INFINITY,
                    sigma,
                },
            ],
        }
    }

    /// Integral of `f` against the left base measure rho.
    pub fn integrate_against_rho_v<F: Fn(f64) -> f64>(&self, f: F, rel_tol: f64) -> Result<f64> {
        let mut total = 0.0;
        for seg in self.part_plan(self.sigma_v) {
            total += seg.integrate(&f, rel_tol)?;
        }
        Ok(total)
    }

    /// Integral of `f` against the right base measure psi.
    pub fn integrate_against_psi_w<F: Fn(f64) -> f64>(&self, f: F, rel_tol: f64) -> Result<f64> {
        let mut total = 0.0;
        for seg in self.part_plan(self.sigma_w) {
            total += seg.integrate(&f, rel_tol)?;
        }
        Ok(total)
    }

    /// Truncation window for the left part: expected edges incident to
    /// latent points outside it stay below `budget`.
    pub(crate) fn v_window(&self, s: f64, alpha: f64, budget: f64) -> (f64, f64) {
        match self.kind {
            BipartiteKind::Dense => (0.0, 1.0),
            BipartiteKind::SparseSeparable => {
                let sv = self.sigma_v;
                let c = self.sigma_w / (1.0 - self.sigma_w) * sv / (1.0 - sv);
                // s alpha int_a^inf mu_v = budget, closed-form inversion
                let base = (s * alpha * c / budget).max(1.0);
                (0.0, base.powf(sv / (1.0 - sv)) - 1.0)
            }
            BipartiteKind::Ggp => unreachable!("GGP bipartite sampling does not window"),
        }
    }

    pub(crate) fn w_window(&self, s: f64, alpha: f64, budget: f64) -> (f64, f64) {
        match self.kind {
            BipartiteKind::Dense => (0.0, 1.0),
            BipartiteKind::SparseSeparable => {
                let sw = self.sigma_w;
                let c = self.sigma_v / (1.0 - self.sigma_v) * sw / (1.0 - sw);
                let base = (s * alpha * c / budget).max(1.0);
                (0.0, base.powf(sw / (1.0 - sw)) - 1.0)
            }
            BipartiteKind::Ggp => unreachable!("GGP bipartite sampling does not window"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_models() -> Vec<ModelSpec> {
        vec![
            ModelSpec::dense(),
            ModelSpec::almost_dense(),
            ModelSpec::sparse_separable(0.3).unwrap(),
            ModelSpec::sparse_nonseparable(0.3).unwrap(),
            ModelSpec::ggp(0.5).unwrap(),
        ]
    }

    #[test]
    fn mu_closed_form_examples() {
        assert_eq!(ModelSpec::dense().eval_mu(0.0).unwrap(), 0.5);
        assert_eq!(ModelSpec::almost_dense().eval_mu(0.0).unwrap(), 1.0);
        let ggp = ModelSpec::ggp(0.5).unwrap();
        // ((1 + 2x)^sigma - 1)/sigma at x = 3
        assert!((ggp.eval_mu(3.0).unwrap() - 2.0 * (7f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!(ggp.eval_mu(-0.5).is_err());
    }

    #[test]
    fn nu_closed_form_examples() {
        let ggp = ModelSpec::ggp(0.5).unwrap();
        assert_eq!(ggp.eval_nu(0.0, 5.0).unwrap(), 0.0);
        let expect = 2.0 * (2.0 * 7f64.sqrt() - 13f64.sqrt() - 1.0);
        assert!((ggp.eval_nu(3.0, 3.0).unwrap() - expect).abs() < 1e-12);

        let dense = ModelSpec::dense();
        assert!((dense.eval_nu(0.5, 0.5).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!(dense.eval_nu(-1.0, 0.0).is_err());
    }

    #[test]
    fn nu_matches_direct_quadrature() {
        // independent route: integrate W(x,.)W(.,y) against rho
        for model in all_models() {
            for &(x, y) in &[(0.1, 0.4), (0.5, 2.0), (1.5, 3.0)] {
                let direct = model
                    .integrate_against_rho(|t| model.graphon(x, t) * model.graphon(t, y), 1e-10)
                    .unwrap();
                let closed = model.eval_nu(x, y).unwrap();
                let scale = direct.abs().max(1e-12);
                assert!(
                    (closed - direct).abs() / scale < 1e-6,
                    "{:?} nu({x},{y}): closed {closed} vs quadrature {direct}",
                    model.kind()
                );
            }
        }
    }

    #[test]
    fn mu_matches_quadrature_on_grid() {
        for model in all_models() {
            let (lo, hi) = model.truncation_bounds(100.0, 1e-3).unwrap();
            let lo = lo.max(1e-9);
            for i in 0..50 {
                // geometric grid spans the window even when it covers many decades
                let t = i as f64 / 49.0;
                let x = lo * (hi / lo).powf(t);
                let quad = model
                    .integrate_against_rho(|y| model.graphon(x, y), 1e-9)
                    .unwrap();
                let mu = model.eval_mu(x).unwrap();
                let scale = mu.abs().max(1e-300);
                assert!(
                    (mu - quad).abs() / scale < 1e-6,
                    "{:?} mu({x}) = {mu} vs quadrature {quad}",
                    model.kind()
                );
            }
        }
    }

    #[test]
    fn graphon_is_a_probability_and_symmetric() {
        for model in all_models() {
            for i in 0..20 {
                for j in 0..=i {
                    let x = 0.37 * i as f64;
                    let y = 0.41 * j as f64;
                    let w = model.graphon(x, y);
                    assert!(
                        (0.0..=1.0).contains(&w),
                        "{:?} W({x},{y}) = {w}",
                        model.kind()
                    );
                    assert_eq!(w, model.graphon(y, x));
                }
            }
        }
    }

    #[test]
    fn assumption5_holds_on_grid() {
        for model in all_models() {
            let eta = model.eta();
            let c = model.assumption5_bound();
            let (lo, hi) = model.truncation_bounds(100.0, 1e-3).unwrap();
            let lo = lo.max(1e-8);
            let grid: Vec<f64> = (0..50)
                .map(|i| lo * (hi / lo).powf(i as f64 / 49.0))
                .collect();
            let mut worst: f64 = 0.0;
            for &x in &grid {
                for &y in &grid {
                    if y < x {
                        continue;
                    }
                    let nu = model.eval_nu(x, y).unwrap();
                    let denom = model.mu(x).powf(eta) * model.mu(y).powf(eta);
                    if denom > 0.0 {
                        worst = worst.max(nu / denom);
                    }
                }
            }
            // 1e-6 slack: the GGP ratio attains 1 - sigma only as x -> 0,
            // where the expm1 differences carry ~1e-8 relative rounding
            assert!(
                worst <= c * (1.0 + 1e-6),
                "{:?}: grid ratio {worst} exceeds bound {c}",
                model.kind()
            );
        }
    }

    #[test]
    fn truncation_examples() {
        // compact support
        assert_eq!(
            ModelSpec::dense().truncation_bounds(50.0, 1e-3).unwrap(),
            (0.0, 1.0)
        );

        // exponential tail: size^2 e^{-x} = budget up to the diagonal term
        let (lo, hi) = ModelSpec::almost_dense()
            .truncation_bounds(100.0, 1e-3)
            .unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - (1e7f64).ln()).abs() < 1e-6, "x_max = {hi}");

        assert!(ModelSpec::dense().truncation_bounds(50.0, 0.0).is_err());
        assert!(ModelSpec::dense().truncation_bounds(0.0, 1e-3).is_err());
    }

    #[test]
    fn truncation_omitted_mass_verified_by_quadrature() {
        let size = 100.0;
        let budget = 1e-3;
        for model in all_models() {
            let (lo, hi) = model.truncation_bounds(size, budget).unwrap();
            let mut omitted = 0.0;
            if lo > 0.0 {
                omitted += size
                    * size
                    * model
                        .integrate_against_rho_on(|x| model.mu(x), 0.0, lo, 1e-9)
                        .unwrap();
                omitted += size
                    * model
                        .integrate_against_rho_on(|x| model.graphon(x, x), 0.0, lo, 1e-9)
                        .unwrap();
            }
            if hi < f64::INFINITY {
                omitted += size
                    * size
                    * model
                        .integrate_against_rho_on(|x| model.mu(x), hi, f64::INFINITY, 1e-9)
                        .unwrap();
                omitted += size
                    * model
                        .integrate_against_rho_on(|x| model.graphon(x, x), hi, f64::INFINITY, 1e-9)
                        .unwrap();
            }
            assert!(
                omitted <= budget * (1.0 + 1e-6),
                "{:?}: omitted mass {omitted} exceeds budget {budget}",
                model.kind()
            );
        }
    }

    #[test]
    fn truncation_window_monotone_in_budget() {
        for model in all_models() {
            let mut prev: Option<(f64, f64)> = None;
            for budget in [1e-4, 1e-3, 1e-2] {
                let (lo, hi) = model.truncation_bounds(100.0, budget).unwrap();
                if let Some((plo, phi)) = prev {
                    // larger budget never enlarges the window
                    assert!(lo >= plo - 1e-12);
                    assert!(hi <= phi + 1e-9 * phi.abs().max(1.0));
                }
                prev = Some((lo, hi));
            }
        }
    }

    #[test]
    fn ggp_mass_matches_quadrature() {
        let model = ModelSpec::ggp(0.5).unwrap();
        for (lo, hi) in [(0.01, 2.0), (0.5, f64::INFINITY), (1e-6, 1.0)] {
            let quad = model
                .integrate_against_rho_on(|_| 1.0, lo, hi, 1e-10)
                .unwrap();
            let closed = model.rho_mass(lo, hi);
            assert!(
                (quad - closed).abs() / closed < 1e-7,
                "mass({lo},{hi}): quadrature {quad} vs closed {closed}"
            );
        }
    }

    #[test]
    fn bipartite_marginals_match_quadrature() {
        let models = vec![
            BipartiteModelSpec::dense(),
            BipartiteModelSpec::sparse_separable(0.4, 0.6).unwrap(),
            BipartiteModelSpec::ggp(0.5, 0.5).unwrap(),
            BipartiteModelSpec::ggp(0.3, 0.7).unwrap(),
        ];
        for bm in models {
            for i in 0..50 {
                let x = 1e-3 * (4e3f64).powf(i as f64 / 49.0);
                let quad = bm
                    .integrate_against_psi_w(|y| bm.graphon(x, y), 1e-9)
                    .unwrap();
                let mu = bm.mu_v(x);
                let scale = mu.abs().max(1e-300);
                assert!(
                    (mu - quad).abs() / scale < 1e-6,
                    "{:?} mu_v({x}) = {mu} vs {quad}",
                    bm.kind()
                );
            }
            assert!(bm.mean_graphon().is_finite());
        }
    }

    #[test]
    fn bipartite_nu_v_matches_quadrature() {
        let bm = BipartiteModelSpec::ggp(0.3, 0.7).unwrap();
        let direct = bm
            .integrate_against_psi_w(|y| bm.graphon(0.8, y) * bm.graphon(2.5, y), 1e-10)
            .unwrap();
        let closed = bm.nu_v(0.8, 2.5);
        assert!((closed - direct).abs() / direct < 1e-7);
    }

    #[test]
    fn model_keys_round_trip() {
        for model in all_models() {
            let sigma = if model.sigma() > 0.0 {
                Some(model.sigma())
            } else {
                None
            };
            let back = ModelSpec::from_key(model.kind().key(), sigma).unwrap();
            assert_eq!(back, model);
        }
        assert!(ModelSpec::from_key("nope", None).is_err());
        assert!(ModelSpec::from_key("ggp", None).is_err());
        assert!(ModelSpec::from_key("ggp", Some(1.5)).is_err());
    }
}
