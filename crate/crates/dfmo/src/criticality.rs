//! Diagnostic Pareto-criticality measures.
//!
//! `mu` is the minimum Euclidean norm over convex combinations of the
//! objective gradients: zero exactly at Pareto-critical points and equal to
//! the gradient norm when there is a single objective. Gradients come from
//! central finite differences; nothing here feeds back into solver decisions.

use crate::directions::DirectionSet;
use crate::error::Result;
use crate::oracle::Objective;
use crate::types::{DecisionPoint, ParetoList};

/// Finite-difference gradient estimates of all objectives at one point.
#[derive(Debug, Clone)]
pub struct GradientEstimate {
    /// One length-n gradient per objective.
    grads: Vec<Vec<f64>>,
    fd_step: f64,
}

impl GradientEstimate {
    pub fn new(grads: Vec<Vec<f64>>, fd_step: f64) -> Self {
        Self { grads, fd_step }
    }

    pub fn grads(&self) -> &[Vec<f64>] {
        &self.grads
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }
}

/// Central differences `(F(x + h e_j) − F(x − h e_j)) / 2h`, costing `2n`
/// oracle calls.
pub fn fd_gradients(
    oracle: &mut dyn Objective,
    x: &DecisionPoint,
    h: f64,
) -> Result<GradientEstimate> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let n = x.dim();
    let q = oracle.q();
    let mut grads = vec![vec![0.0; n]; q];
    for j in 0..n {
        let mut fwd = x.coords().to_vec();
        fwd[j] += h;
        let mut bwd = x.coords().to_vec();
        bwd[j] -= h;
        let f_fwd = oracle.eval(&DecisionPoint::new(fwd)?)?;
        let f_bwd = oracle.eval(&DecisionPoint::new(bwd)?)?;
        for i in 0..q {
            grads[i][j] = (f_fwd.values()[i] - f_bwd.values()[i]) / (2.0 * h);
        }
    }
    Ok(GradientEstimate::new(grads, h))
}

/// `μ(x)`: the minimum over the simplex of `‖Σ λ_i ∇f_i(x)‖`.
///
/// Closed form for one and two objectives; projected-gradient descent on the
/// simplex with a Frank-Wolfe fallback for `q ≥ 3`.
pub fn mu(estimate: &GradientEstimate) -> f64 {
    mu_solve(estimate).0
}

/// Like [`mu`], also reporting whether the iterative solver met its gap
/// tolerance (always true for `q ≤ 2`).
pub fn mu_solve(estimate: &GradientEstimate) -> (f64, bool) {
    let grads = estimate.grads();
    match grads.len() {
        0 => (0.0, true),
        1 => (norm(&grads[0]), true),
        2 => (mu_two(&grads[0], &grads[1]), true),
        _ => mu_simplex(grads),
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// min over t in [0,1] of ‖t g1 + (1−t) g2‖, a one-dimensional quadratic.
fn mu_two(g1: &[f64], g2: &[f64]) -> f64 {
    let diff: Vec<f64> = g1.iter().zip(g2).map(|(a, b)| a - b).collect();
    let denom: f64 = diff.iter().map(|d| d * d).sum();
    let t = if denom == 0.0 {
        0.0
    } else {
        let num: f64 = g2.iter().zip(&diff).map(|(b, d)| -b * d).sum();
        (num / denom).clamp(0.0, 1.0)
    };
    let combo: Vec<f64> = g1
        .iter()
        .zip(g2)
        .map(|(a, b)| t * a + (1.0 - t) * b)
        .collect();
    norm(&combo)
}

const MAX_PG_ITERS: usize = 200_000;
const MAX_FW_ITERS: usize = 200_000;

/// Projected-gradient descent on `f(λ) = ½‖Gᵀλ‖²` over the simplex, stopping
/// on the Frank-Wolfe gap; falls back to Frank-Wolfe steps with exact line
/// search when the gap stagnates.
fn mu_simplex(grads: &[Vec<f64>]) -> (f64, bool) {
    let q = grads.len();
    // Gram matrix of the gradients.
    let mut gram = vec![vec![0.0; q]; q];
    for i in 0..q {
        for j in i..q {
            let dot: f64 = grads[i].iter().zip(&grads[j]).map(|(a, b)| a * b).sum();
            gram[i][j] = dot;
            gram[j][i] = dot;
        }
    }
    let lipschitz: f64 = gram
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if lipschitz == 0.0 {
        return (0.0, true);
    }
    let scale = lipschitz.max(1.0);
    let gap_tol = 1e-13 * scale;
    let step = 1.0 / lipschitz;

    let mut lambda = vec![1.0 / q as f64; q];
    let mut converged = false;
    for _ in 0..MAX_PG_ITERS {
        let grad = mat_vec(&gram, &lambda);
        if fw_gap(&lambda, &grad) <= gap_tol {
            converged = true;
            break;
        }
        for (l, g) in lambda.iter_mut().zip(&grad) {
            *l -= step * g;
        }
        project_simplex(&mut lambda);
    }
    if !converged {
        for _ in 0..MAX_FW_ITERS {
            let grad = mat_vec(&gram, &lambda);
            if fw_gap(&lambda, &grad) <= gap_tol {
                converged = true;
                break;
            }
            let j = argmin(&grad);
            // direction e_j − λ; exact line search for the quadratic
            let mut dir = lambda.iter().map(|l| -l).collect::<Vec<f64>>();
            dir[j] += 1.0;
            let g_dot_d: f64 = grad.iter().zip(&dir).map(|(a, b)| a * b).sum();
            let d_m_d: f64 = {
                let md = mat_vec(&gram, &dir);
                md.iter().zip(&dir).map(|(a, b)| a * b).sum()
            };
            if d_m_d <= 0.0 {
                break;
            }
            let t = (-g_dot_d / d_m_d).clamp(0.0, 1.0);
            if t == 0.0 {
                break;
            }
            for (l, d) in lambda.iter_mut().zip(&dir) {
                *l += t * d;
            }
        }
    }
    // Evaluate the combination in gradient space for accuracy.
    let n = grads[0].len();
    let mut combo = vec![0.0; n];
    for (l, g) in lambda.iter().zip(grads) {
        for (c, gi) in combo.iter_mut().zip(g) {
            *c += l * gi;
        }
    }
    (norm(&combo), converged)
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn fw_gap(lambda: &[f64], grad: &[f64]) -> f64 {
    let value: f64 = lambda.iter().zip(grad).map(|(l, g)| l * g).sum();
    let min_g = grad.iter().cloned().fold(f64::INFINITY, f64::min);
    value - min_g
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

/// Euclidean projection onto `{λ ≥ 0, Σλ = 1}`.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

/// `μ_D(x) = −min_{d ∈ D} max_i ∇f_i(x)ᵀd`, an exact finite min-max. The
/// value may be negative when no direction descends on every objective; it is
/// returned unclamped.
pub fn mu_d(estimate: &GradientEstimate, directions: &DirectionSet) -> f64 {
    let mut min_over_dirs = f64::INFINITY;
    for d in directions.iter() {
        let mut worst = f64::NEG_INFINITY;
        for g in estimate.grads() {
            assert_eq!(g.len(), d.len(), "gradient/direction dimension mismatch");
            let dot: f64 = g.iter().zip(d).map(|(a, b)| a * b).sum();
            worst = worst.max(dot);
        }
        min_over_dirs = min_over_dirs.min(worst);
    }
    -min_over_dirs
}

/// `Γ(X) = max_{x ∈ X} μ(x)` with finite-difference gradients.
pub fn gamma_max(list: &ParetoList, oracle: &mut dyn Objective, h: f64) -> Result<f64> {
    assert!(!list.is_empty(), "criticality of an empty list");
    let mut worst = f64::NEG_INFINITY;
    for entry in list.entries() {
        worst = worst.max(mu(&fd_gradients(oracle, &entry.point, h)?));
    }
    Ok(worst)
}

/// `Γ̄(X) = min_{x ∈ X} μ(x)` with finite-difference gradients.
pub fn gamma_min(list: &ParetoList, oracle: &mut dyn Objective, h: f64) -> Result<f64> {
    assert!(!list.is_empty(), "criticality of an empty list");
    let mut best = f64::INFINITY;
    for entry in list.entries() {
        best = best.min(mu(&fd_gradients(oracle, &entry.point, h)?));
    }
    Ok(best)
}
