//! Unseen-edges prediction: extrapolate the edge count of a larger sample
//! from an observed snapshot and the future vertex count.

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

/// Predicted number of edges at the future size,
/// (|V_beta| / |V_alpha|)^{2/(1+sigma)} (|E_alpha| - #self-loops).
///
/// A larger tail-index predicts fewer future edges whenever the vertex
/// ratio exceeds one; sigma = 0 recovers the dense-model quadratic growth
/// that systematically overestimates sparse graphs.
pub fn predict_edges(
    graph_at_alpha: &UndirectedGraph,
    v_beta_count: u64,
    sigma_hat: f64,
) -> Result<f64> {
    if graph_at_alpha.is_empty() {
        return Err(Error::domain("prediction needs a non-empty observed graph"));
    }
    if v_beta_count < 1 {
        return Err(Error::domain("future vertex count must be positive"));
    }
    if !(sigma_hat > -1.0) {
        return Err(Error::domain(format!(
            "exponent undefined for sigma_hat <= -1, got {sigma_hat}"
        )));
    }
    let ratio = v_beta_count as f64 / graph_at_alpha.vertex_count() as f64;
    let non_self_edges = (graph_at_alpha.edge_count() - graph_at_alpha.count_self_loops()) as f64;
    Ok(ratio.powf(2.0 / (1.0 + sigma_hat)) * non_self_edges)
}

/// Square root of the mean of squared relative errors.
pub fn normalized_rmse(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::domain("normalized RMSE needs at least one pair"));
    }
    let mut acc = 0.0;
    for &(prediction, truth) in pairs {
        if !(truth > 0.0) {
            return Err(Error::domain(format!(
                "truth values must be positive, got {truth}"
            )));
        }
        let rel = (prediction - truth) / truth;
        acc += rel * rel;
    }
    Ok((acc / pairs.len() as f64).sqrt())
}
