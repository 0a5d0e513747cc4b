use serde::{Deserialize, Serialize};

use crate::estimator::{EdgeEstimate, EdgeReport};
use crate::geometry::{Angle, DirectedEdge};

/// `(λ cos ξ − λ̂ cos ξ̂)² + (λ sin ξ − λ̂ sin ξ̂)²`, minimized over the
/// direction candidates. Returns the value and the candidate used.
pub fn epsilon_sq(truth: &DirectedEdge, lambda_hat: f64, candidates: &[Angle]) -> (f64, Angle) {
    let t = truth.vector();
    candidates
        .iter()
        .map(|&c| {
            let dx = t.x - lambda_hat * c.cos();
            let dy = t.y - lambda_hat * c.sin();
            (dx * dx + dy * dy, c)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one candidate")
}

/// Per-edge squared errors of one run. Unmatched true edges get `λ²` and are
/// flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeErrors {
    pub eps_sq: Vec<f64>,
    pub unmatched: Vec<bool>,
}

/// One estimated edge instance: length and direction candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGuess {
    pub lambda: f64,
    pub candidates: [Angle; 2],
}

/// Estimates in order, each repeated by its rounded multiplicity. Estimates
/// whose count rounds to zero are absent.
pub fn expand_estimates(estimates: &[EdgeEstimate]) -> Vec<EdgeGuess> {
    expand(estimates.iter().map(|e| (e.lambda_hat, e.xi_candidates, e.n_e_rounded)))
}

pub fn expand_reports(edges: &[EdgeReport]) -> Vec<EdgeGuess> {
    expand(edges.iter().map(|e| (e.lambda, e.xi_candidates, e.n_e_rounded)))
}

fn expand(it: impl Iterator<Item = (f64, [Angle; 2], u32)>) -> Vec<EdgeGuess> {
    it.flat_map(|(lambda, candidates, n)| {
        std::iter::repeat_n(EdgeGuess { lambda, candidates }, n as usize)
    })
    .collect()
}

/// Greedy minimum-error matching between the true edges and the first
/// `min(#guesses, #edges)` guesses.
pub fn match_edges(truth: &[DirectedEdge], guesses: &[EdgeGuess]) -> EdgeErrors {
    let k = truth.len().min(guesses.len());
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(truth.len() * k);
    for (i, t) in truth.iter().enumerate() {
        for (j, g) in guesses[..k].iter().enumerate() {
            cand.push((epsilon_sq(t, g.lambda, &g.candidates).0, i, j));
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut eps: Vec<Option<f64>> = vec![None; truth.len()];
    let mut taken = vec![false; k];
    for (e2, i, j) in cand {
        if eps[i].is_none() && !taken[j] {
            eps[i] = Some(e2);
            taken[j] = true;
        }
    }
    EdgeErrors {
        unmatched: eps.iter().map(Option::is_none).collect(),
        eps_sq: eps
            .iter()
            .zip(truth)
            .map(|(e, t)| e.unwrap_or(t.length * t.length))
            .collect(),
    }
}

/// `MSE = Σ_runs Σ_edges ε² / runs`.
pub fn mse(runs: &[&[f64]]) -> f64 {
    if runs.is_empty() {
        return 0.0;
    }
    runs.iter().map(|r| r.iter().sum::<f64>()).sum::<f64>() / runs.len() as f64
}

/// `RSR-MSE_i = √(Σ_runs ε²_i / runs) / λ_i`.
pub fn rsr_mse(truth: &[DirectedEdge], runs: &[&[f64]]) -> Vec<f64> {
    truth
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if runs.is_empty() {
                return 0.0;
            }
            let s: f64 = runs.iter().map(|r| r[i]).sum();
            (s / runs.len() as f64).sqrt() / t.length
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::EstimateSource;
    use std::f64::consts::PI;

    fn est(lambda: f64, xi: [f64; 2], n: u32) -> EdgeEstimate {
        EdgeEstimate {
            lambda_hat: lambda,
            xi_candidates: [Angle::new(xi[0]), Angle::new(xi[1])],
            n_e_hat: n as f64,
            n_e_rounded: n,
            support: vec![],
            source: EstimateSource::GeneralPart,
        }
    }

    #[test]
    fn epsilon_examples() {
        let t = DirectedEdge::new(50.0, 1.5 * PI);
        let (e, c) = epsilon_sq(&t, 50.0, &[Angle::new(1.5 * PI), Angle::new(PI / 2.0)]);
        assert!(e < 1e-20);
        assert!(c.approx_eq(Angle::new(1.5 * PI), 1e-12));
        let (e, _) = epsilon_sq(&DirectedEdge::new(100.0, 0.0), 90.0, &[Angle::ZERO]);
        assert!((e - 100.0).abs() < 1e-9);
    }

    #[test]
    fn matching_and_sentinels() {
        let truth = vec![DirectedEdge::new(100.0, 0.0), DirectedEdge::new(50.0, PI / 2.0)];
        let m = match_edges(&truth, &expand_estimates(&[est(49.0, [PI / 2.0, PI / 2.0], 1)]));
        assert_eq!(m.unmatched, vec![true, false]);
        assert!((m.eps_sq[0] - 1e4).abs() < 1e-9);
        assert!((m.eps_sq[1] - 1.0).abs() < 1e-9);
        let runs: Vec<&[f64]> = vec![&m.eps_sq, &m.eps_sq];
        assert!((mse(&runs) - 10001.0).abs() < 1e-9);
        let r = rsr_mse(&truth, &runs);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 0.02).abs() < 1e-12);
    }

    #[test]
    fn multiplicity_expands() {
        let g = expand_estimates(&[est(46.0, [PI, 0.0], 2), est(10.0, [0.0, PI], 0)]);
        assert_eq!(g.len(), 2);
        let truth = vec![DirectedEdge::new(46.0, PI), DirectedEdge::new(46.0, PI)];
        let m = match_edges(&truth, &g);
        assert_eq!(m.unmatched, vec![false, false]);
        assert!(m.eps_sq.iter().all(|&e| e < 1e-18));
    }
}
