//! Graph samplers: Poisson-process truncation plus Bernoulli edge tossing,
//! and vertex subsampling of existing graphs.
//!
//! Two constructions share the generative law. Models with a locally finite
//! base measure materialize every latent point in a truncated window and
//! toss the pairwise coins directly; the pair loop scans coordinates in
//! marginal-decreasing order with geometric envelope skipping, which
//! realizes the exact independent Bernoulli field in roughly O(K + |E|)
//! draws instead of O(K^2).
//!
//! The generalized-gamma family has infinitely many tiny latent points per
//! unit size, so the direct construction is unusable at any honest edge
//! budget. There the Bernoulli field is realized through its equivalent
//! Poisson multigraph: pair (i,j) carries Poisson(x_i x_j) multiedges, so a
//! single Poisson(T^2/2) draw with size-biased endpoint picks reproduces
//! every indicator exactly. Latent points below a dust threshold are not
//! enumerated; a multiedge endpoint landing in the dust instantiates a
//! fresh vertex drawn from the size-biased dust law. The threshold is
//! chosen so the expected count of misattributed dust events (two hits on
//! one dust atom, dust self-loops) stays below the caller's budget.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use statrs::function::gamma::{gamma, gamma_li};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, UndirectedGraph, VertexId};
use crate::models::{ggp_tail_mass, BipartiteKind, BipartiteModelSpec, ModelKind, ModelSpec};
use crate::rng::{stream, Purpose};

fn poisson_count(rng: &mut ChaCha8Rng, lambda: f64) -> Result<u64> {
    if !lambda.is_finite() {
        return Err(Error::Internal(format!(
            "non-finite point-process intensity {lambda}; truncation bound is broken"
        )));
    }
    if lambda <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::Internal(format!("invalid Poisson intensity {lambda}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Draw a finite graph of the given size from a unipartite model.
///
/// Deterministic in (model, size, budget, seed); latent coordinates are
/// recorded on every surviving vertex and isolated points are dropped.
pub fn sample_unipartite(
    model: &ModelSpec,
    size: f64,
    budget: f64,
    seed: u64,
) -> Result<UndirectedGraph> {
    if !(size > 0.0) {
        return Err(Error::domain(format!("size must be positive, got {size}")));
    }
    if !(budget > 0.0) {
        return Err(Error::domain(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let mut rng = stream(seed, Purpose::SampleGraph as u64, 0, 0);
    match model.kind() {
        ModelKind::Ggp => sample_ggp(model, size, budget, &mut rng),
        _ => sample_windowed(model, size, budget, &mut rng),
    }
}

/// Direct construction for locally finite base measures.
fn sample_windowed(
    model: &ModelSpec,
    size: f64,
    budget: f64,
    rng: &mut ChaCha8Rng,
) -> Result<UndirectedGraph> {
    let (lo, hi) = model.truncation_bounds(size, budget)?;
    let mass = model.rho_mass(lo, hi);
    if !mass.is_finite() {
        return Err(Error::Internal(format!(
            "non-finite rho-mass on window [{lo}, {hi}]"
        )));
    }
    let k = poisson_count(rng, size * mass)? as usize;
    let mut xs: Vec<f64> = (0..k)
        .map(|_| lo + (hi - lo) * rng.random::<f64>())
        .collect();
    xs.sort_unstable_by(f64::total_cmp);

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        if rng.random::<f64>() < model.graphon(x, x) {
            edges.push((i as VertexId, i as VertexId));
        }
    }
    for i in 0..k {
        bernoulli_scan(
            rng,
            i + 1,
            k,
            |j| model.graphon(xs[i], xs[j]),
            |j| edges.push((i as VertexId, j as VertexId)),
        );
    }

    let coords: BTreeMap<VertexId, f64> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i as VertexId, x))
        .collect();
    Ok(UndirectedGraph::from_edges_with_coords(edges, &coords))
}

/// Independent Bernoulli(w(j)) sweep over positions start..end where w is
/// nonincreasing: skip ahead geometrically under the current envelope,
/// thin to the exact probability, tighten the envelope at each candidate.
fn bernoulli_scan<W, E>(rng: &mut ChaCha8Rng, start: usize, end: usize, w: W, mut on_hit: E)
where
    W: Fn(usize) -> f64,
    E: FnMut(usize),
{
    let mut j = start;
    if j >= end {
        return;
    }
    let mut envelope = w(j);
    while j < end {
        if envelope <= 0.0 {
            return;
        }
        if envelope < 1.0 {
            let u: f64 = rng.random();
            let skip = ((1.0 - u).ln() / (1.0 - envelope).ln()).floor();
            if !(skip >= 0.0) || skip >= (end - j) as f64 {
                return;
            }
            j += skip as usize;
        }
        let p = w(j);
        let u: f64 = rng.random();
        if u * envelope < p {
            on_hit(j);
        }
        envelope = p;
        j += 1;
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Endpoint {
    Atom(usize),
    Dust(VertexId),
}

/// Dust threshold keeping the expected misattribution mass (dust-atom
/// collisions, dust self-interactions) below `budget`; the caller supplies
/// the linear coefficient of the truncated second moment Q(eps) in that
/// mass, e.g. 2 size^3 + 3 size for a unipartite draw where collisions
/// arrive at rate ~ 2 T^2 size Q with T ~ size.
fn ggp_dust_threshold(sigma: f64, misattribution_coeff: f64, budget: f64) -> f64 {
    let g1ms = gamma(1.0 - sigma);
    let target = budget * g1ms / misattribution_coeff;
    let mut eps = ((2.0 - sigma) * target).powf(1.0 / (2.0 - sigma)).min(0.25);
    // gamma_li(2-sigma, eps) <= eps^{2-sigma}/(2-sigma) makes the analytic
    // solve conservative already; the loop only fires for clipped eps
    while gamma_li(2.0 - sigma, eps) > target && eps > 1e-300 {
        eps *= 0.5;
    }
    eps
}

/// Sample atoms of a generalized-gamma measure above `eps` by Pareto
/// proposals thinned with the exponential tilt.
fn ggp_atoms(rng: &mut ChaCha8Rng, sigma: f64, count: u64, eps: f64) -> Vec<f64> {
    let mut xs = Vec::with_capacity(count as usize);
    while xs.len() < count as usize {
        let u = 1.0 - rng.random::<f64>(); // (0, 1]
        let x = eps * u.powf(-1.0 / sigma);
        if !x.is_finite() {
            continue;
        }
        if rng.random::<f64>() < (-(x - eps)).exp() {
            xs.push(x);
        }
    }
    xs
}

/// Size-biased coordinate of a dust atom: density proportional to
/// x^{-sigma} e^{-x} on (0, eps].
fn ggp_dust_coord(rng: &mut ChaCha8Rng, sigma: f64, eps: f64) -> f64 {
    loop {
        let u = 1.0 - rng.random::<f64>();
        let x = eps * u.powf(1.0 / (1.0 - sigma));
        if rng.random::<f64>() < (-x).exp() {
            return x;
        }
    }
}

struct SizeBiasedPicker {
    cumulative: Vec<f64>,
    total_materialized: f64,
    total: f64,
}

impl SizeBiasedPicker {
    fn new(xs: &[f64], dust_mass: f64) -> Self {
        let mut cumulative = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
            cumulative.push(acc);
        }
        SizeBiasedPicker {
            cumulative,
            total_materialized: acc,
            total: acc + dust_mass,
        }
    }

    fn pick<F: FnMut(&mut ChaCha8Rng) -> VertexId>(
        &self,
        rng: &mut ChaCha8Rng,
        mut fresh_dust: F,
    ) -> Endpoint {
        let v = rng.random::<f64>() * self.total;
        if v < self.total_materialized && !self.cumulative.is_empty() {
            let idx = self.cumulative.partition_point(|&c| c <= v);
            Endpoint::Atom(idx.min(self.cumulative.len() - 1))
        } else {
            Endpoint::Dust(fresh_dust(rng))
        }
    }
}

/// Poisson-multigraph construction for the generalized-gamma family.
fn sample_ggp(
    model: &ModelSpec,
    size: f64,
    budget: f64,
    rng: &mut ChaCha8Rng,
) -> Result<UndirectedGraph> {
    let sigma = model.sigma();
    let g1ms = gamma(1.0 - sigma);
    let eps = ggp_dust_threshold(sigma, 2.0 * size * size * size + 3.0 * size, budget);
    let atom_mass = ggp_tail_mass(sigma, eps);
    if !atom_mass.is_finite() {
        return Err(Error::Internal(format!(
            "non-finite rho-mass above dust threshold {eps}"
        )));
    }

    let k = poisson_count(rng, size * atom_mass)?;
    let xs = ggp_atoms(rng, sigma, k, eps);
    let dust_mass = size * gamma_li(1.0 - sigma, eps) / g1ms;
    let picker = SizeBiasedPicker::new(&xs, dust_mass);

    let mut coords: BTreeMap<VertexId, f64> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i as VertexId, x))
        .collect();
    let mut next_id = xs.len() as VertexId;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();

    let multiedges = poisson_count(rng, picker.total * picker.total)?;
    for _ in 0..multiedges {
        let mut fresh = |rng: &mut ChaCha8Rng| {
            let id = next_id;
            next_id += 1;
            coords.insert(id, ggp_dust_coord(rng, sigma, eps));
            id
        };
        let a = picker.pick(rng, &mut fresh);
        let b = picker.pick(rng, &mut fresh);
        match (a, b) {
            // diagonal multiedges are excluded; self-loops carry the exact
            // graphon weight below rather than the multigraph's halved rate
            (Endpoint::Atom(i), Endpoint::Atom(j)) if i == j => continue,
            (a, b) => {
                let ia = match a {
                    Endpoint::Atom(i) => i as VertexId,
                    Endpoint::Dust(id) => id,
                };
                let ib = match b {
                    Endpoint::Atom(i) => i as VertexId,
                    Endpoint::Dust(id) => id,
                };
                edges.push((ia, ib));
            }
        }
    }

    for (i, &x) in xs.iter().enumerate() {
        if rng.random::<f64>() < model.graphon(x, x) {
            edges.push((i as VertexId, i as VertexId));
        }
    }

    Ok(UndirectedGraph::from_edges_with_coords(edges, &coords))
}

/// Draw a finite bipartite graph of sizes (s, alpha).
pub fn sample_bipartite(
    bmodel: &BipartiteModelSpec,
    s: f64,
    alpha: f64,
    budget: f64,
    seed: u64,
) -> Result<BipartiteGraph> {
    if !(s > 0.0 && alpha > 0.0) {
        return Err(Error::domain(format!(
            "part sizes must be positive, got ({s}, {alpha})"
        )));
    }
    if !(budget > 0.0) {
        return Err(Error::domain(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let mut rng = stream(seed, Purpose::BipartiteSample as u64, 0, 0);
    match bmodel.kind() {
        BipartiteKind::Ggp => sample_bipartite_ggp(bmodel, s, alpha, budget, &mut rng),
        _ => sample_bipartite_windowed(bmodel, s, alpha, budget, &mut rng),
    }
}

fn sample_bipartite_windowed(
    bmodel: &BipartiteModelSpec,
    s: f64,
    alpha: f64,
    budget: f64,
    rng: &mut ChaCha8Rng,
) -> Result<BipartiteGraph> {
    let (vlo, vhi) = bmodel.v_window(s, alpha, 0.5 * budget);
    let (wlo, whi) = bmodel.w_window(s, alpha, 0.5 * budget);
    for mass in [vhi - vlo, whi - wlo] {
        if !mass.is_finite() {
            return Err(Error::Internal("non-finite part window".into()));
        }
    }
    let kv = poisson_count(rng, s * (vhi - vlo))? as usize;
    let kw = poisson_count(rng, alpha * (whi - wlo))? as usize;
    let xs: Vec<f64> = (0..kv)
        .map(|_| vlo + (vhi - vlo) * rng.random::<f64>())
        .collect();
    let mut ys: Vec<f64> = (0..kw)
        .map(|_| wlo + (whi - wlo) * rng.random::<f64>())
        .collect();
    ys.sort_unstable_by(f64::total_cmp);

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        bernoulli_scan(
            rng,
            0,
            ys.len(),
            |j| bmodel.graphon(x, ys[j]),
            |j| edges.push((i as VertexId, j as VertexId)),
        );
    }
    Ok(BipartiteGraph::from_edges(edges))
}

fn sample_bipartite_ggp(
    bmodel: &BipartiteModelSpec,
    s: f64,
    alpha: f64,
    budget: f64,
    rng: &mut ChaCha8Rng,
) -> Result<BipartiteGraph> {
    let (sv, sw) = (bmodel.sigma_v(), bmodel.sigma_w());
    // collisions on one part scale with the square of the opposite total
    let eps_v = ggp_dust_threshold(sv, 2.0 * alpha * alpha * s, 0.5 * budget);
    let eps_w = ggp_dust_threshold(sw, 2.0 * s * s * alpha, 0.5 * budget);

    let kv = poisson_count(rng, s * ggp_tail_mass(sv, eps_v))?;
    let xs = ggp_atoms(rng, sv, kv, eps_v);
    let kw = poisson_count(rng, alpha * ggp_tail_mass(sw, eps_w))?;
    let ys = ggp_atoms(rng, sw, kw, eps_w);

    let dust_v = s * gamma_li(1.0 - sv, eps_v) / gamma(1.0 - sv);
    let dust_w = alpha * gamma_li(1.0 - sw, eps_w) / gamma(1.0 - sw);
    let left = SizeBiasedPicker::new(&xs, dust_v);
    let right = SizeBiasedPicker::new(&ys, dust_w);

    let mut next_left = xs.len() as VertexId;
    let mut next_right = ys.len() as VertexId;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let multiedges = poisson_count(rng, 2.0 * left.total * right.total)?;
    for _ in 0..multiedges {
        // bipartite graphs carry no latent coordinates, so dust vertices
        // only need fresh identities
        let a = left.pick(rng, |_| {
            let id = next_left;
            next_left += 1;
            id
        });
        let b = right.pick(rng, |_| {
            let id = next_right;
            next_right += 1;
            id
        });
        let ia = match a {
            Endpoint::Atom(i) => i as VertexId,
            Endpoint::Dust(id) => id,
        };
        let ib = match b {
            Endpoint::Atom(i) => i as VertexId,
            Endpoint::Dust(id) => id,
        };
        edges.push((ia, ib));
    }
    Ok(BipartiteGraph::from_edges(edges))
}

/// Keep each vertex independently with probability `r`, keep the edges
/// whose endpoints all survive (a self-loop needs only its own vertex),
/// and drop anything left isolated.
pub fn p_sample(graph: &UndirectedGraph, r: f64, seed: u64) -> Result<UndirectedGraph> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!(
            "retention probability must be in [0,1], got {r}"
        )));
    }
    let mut rng = stream(seed, Purpose::PSample as u64, 0, 0);
    let mut marked: BTreeMap<VertexId, bool> = BTreeMap::new();
    for v in graph.vertices() {
        marked.insert(v, rng.random::<f64>() < r);
    }
    let edges = graph.edges().filter(|&(a, b)| marked[&a] && marked[&b]);
    let coords: BTreeMap<VertexId, f64> = graph
        .vertices()
        .filter_map(|v| graph.latent_coord(v).map(|x| (v, x)))
        .collect();
    Ok(UndirectedGraph::from_edges_with_coords(edges, &coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{expected_m, expected_n_p};
    use proptest::prelude::*;

    fn mc_mean_se(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        for model in [ModelSpec::dense(), ModelSpec::ggp(0.5).unwrap()] {
            let a = sample_unipartite(&model, 50.0, 1e-3, 7).unwrap();
            let b = sample_unipartite(&model, 50.0, 1e-3, 7).unwrap();
            assert_eq!(a, b);
            let c = sample_unipartite(&model, 50.0, 1e-3, 8).unwrap();
            assert_ne!(a, c);
        }
        let bm = BipartiteModelSpec::ggp(0.5, 0.5).unwrap();
        let a = sample_bipartite(&bm, 20.0, 20.0, 1e-3, 3).unwrap();
        let b = sample_bipartite(&bm, 20.0, 20.0, 1e-3, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coordinates_stay_inside_the_window() {
        let model = ModelSpec::sparse_separable(0.3).unwrap();
        let (lo, hi) = model.truncation_bounds(30.0, 1e-3).unwrap();
        let g = sample_unipartite(&model, 30.0, 1e-3, 11).unwrap();
        for v in g.vertices() {
            let x = g
                .latent_coord(v)
                .expect("sampled vertices carry coordinates");
            assert!(x >= lo && x <= hi);
        }
    }

    #[test]
    fn no_isolated_vertices_and_self_loops_occur() {
        let model = ModelSpec::dense();
        let mut saw_self_loop = false;
        for seed in 0..40 {
            let g = sample_unipartite(&model, 40.0, 1e-3, seed).unwrap();
            for v in g.vertices() {
                let degree = g.non_self_degree(v).unwrap() + u64::from(g.has_self_loop(v));
                assert!(degree >= 1);
            }
            saw_self_loop |= g.count_self_loops() > 0;
        }
        assert!(saw_self_loop, "dense graphon has W(x,x) > 0");
    }

    #[test]
    fn windowed_mc_mean_matches_oracle() {
        let model = ModelSpec::dense();
        let reps = 400;
        let mut n1 = Vec::new();
        let mut nh = Vec::new();
        for seed in 0..reps {
            let g = sample_unipartite(&model, 20.0, 1e-3, seed).unwrap();
            n1.push(crate::estimators::count_n_p(&g, 1.0).unwrap());
            nh.push(crate::estimators::count_n_p(&g, 0.5).unwrap());
        }
        for (values, p) in [(n1, 1.0), (nh, 0.5)] {
            let (mean, se) = mc_mean_se(&values);
            let oracle = expected_n_p(&model, p, 20.0, 1e-9).unwrap();
            assert!(
                (mean - oracle).abs() <= 4.0 * se,
                "p={p}: mean {mean} vs oracle {oracle} (se {se})"
            );
        }
    }

    #[test]
    fn ggp_mc_mean_matches_oracle() {
        let model = ModelSpec::ggp(0.5).unwrap();
        let reps = 400;
        let mut n1 = Vec::new();
        let mut nh = Vec::new();
        for seed in 0..reps {
            let g = sample_unipartite(&model, 10.0, 1e-3, seed).unwrap();
            n1.push(crate::estimators::count_n_p(&g, 1.0).unwrap());
            nh.push(crate::estimators::count_n_p(&g, 0.5).unwrap());
        }
        for (values, p) in [(n1, 1.0), (nh, 0.5)] {
            let (mean, se) = mc_mean_se(&values);
            let oracle = expected_n_p(&model, p, 10.0, 1e-9).unwrap();
            assert!(
                (mean - oracle).abs() <= 4.0 * se,
                "p={p}: mean {mean} vs oracle {oracle} (se {se})"
            );
        }
    }

    #[test]
    fn bipartite_mc_mean_matches_oracle() {
        let bm = BipartiteModelSpec::ggp(0.5, 0.5).unwrap();
        let reps = 300;
        let mut ms = Vec::new();
        for seed in 0..reps {
            let g = sample_bipartite(&bm, 15.0, 15.0, 1e-3, seed).unwrap();
            ms.push(crate::estimators::bipartite_smoothed_count(&g));
        }
        let (mean, se) = mc_mean_se(&ms);
        let oracle = expected_m(&bm, 15.0, 15.0, 1e-9).unwrap();
        assert!(
            (mean - oracle).abs() <= 4.0 * se,
            "mean {mean} vs oracle {oracle} (se {se})"
        );
    }

    #[test]
    fn bipartite_dense_edge_rate() {
        let bm = BipartiteModelSpec::dense();
        let mut rates = Vec::new();
        for seed in 0..200 {
            let g = sample_bipartite(&bm, 50.0, 50.0, 1e-3, seed).unwrap();
            rates.push(g.edge_count() as f64 / (50.0 * 50.0));
        }
        let (mean, se) = mc_mean_se(&rates);
        assert!(
            (mean - bm.mean_graphon()).abs() <= 4.0 * se.max(1e-4),
            "edge rate {mean} vs {}",
            bm.mean_graphon()
        );
    }

    #[test]
    fn p_sample_identity_and_empty_limits() {
        let g = sample_unipartite(&ModelSpec::dense(), 30.0, 1e-3, 5).unwrap();
        assert_eq!(p_sample(&g, 1.0, 99).unwrap(), g);
        assert!(p_sample(&g, 0.0, 99).unwrap().is_empty());
        assert!(p_sample(&g, 1.5, 99).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn p_sample_edges_are_a_subset(seed in 0u64..500, r in 0.0f64..1.0) {
            let g = sample_unipartite(&ModelSpec::dense(), 25.0, 1e-3, seed).unwrap();
            let sub = p_sample(&g, r, seed ^ 0xabc).unwrap();
            for (a, b) in sub.edges() {
                prop_assert!(g.has_edge(a, b));
            }
            for v in sub.vertices() {
                prop_assert_eq!(sub.latent_coord(v), g.latent_coord(v));
            }
        }

        #[test]
        fn p_sample_is_monotone_in_retention(seed in 0u64..200, r in 0.0f64..1.0) {
            // same mark uniforms, larger r: marks only switch off -> on
            let g = sample_unipartite(&ModelSpec::dense(), 25.0, 1e-3, seed).unwrap();
            let small = p_sample(&g, r * 0.5, 7).unwrap();
            let large = p_sample(&g, r, 7).unwrap();
            for (a, b) in small.edges() {
                prop_assert!(large.has_edge(a, b));
            }
        }
    }
}
