//! Linear soft-margin SVM trained by SMO on the dual with second-order
//! working-set selection.

use serde::{Deserialize, Serialize};

use crate::config::SvmConfig;

use super::dataset::{Dataset, Scaler};
use super::PredictorError;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub feature_names: Vec<String>,
    /// Weights on standardized features.
    pub w: Vec<f64>,
    pub b: f64,
    pub c: f64,
    pub scaler: Scaler,
    pub iterations: usize,
    pub converged: bool,
}

impl SvmModel {
    /// w · standardize(x) + b.
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.w, &self.scaler.transform(x)) + self.b
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) >= 0.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dual solution on already-transformed inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub w: Vec<f64>,
    pub b: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves min ½αᵀQα − Σα s.t. 0 ≤ α ≤ C, yᵀα = 0 with Q_ij = y_i y_j x_i·x_j.
/// Each step updates the maximal-violating pair chosen by second-order gain;
/// ties resolve to the lowest index so results are reproducible.
pub fn solve_dual(x: &[Vec<f64>], y: &[f64], c: f64, tol: f64, max_iter: usize) -> DualSolution {
    let n = x.len();
    let p = x.first().map_or(0, Vec::len);
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = y[i] * y[j] * dot(&x[i], &x[j]);
            q[i * n + j] = v;
            q[j * n + i] = v;
        }
    }
    let qd: Vec<f64> = (0..n).map(|i| q[i * n + i]).collect();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let is_up = |a: f64, yi: f64| if yi > 0.0 { a < c } else { a > 0.0 };
    let is_low = |a: f64, yi: f64| if yi > 0.0 { a > 0.0 } else { a < c };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if is_up(alpha[t], y[t]) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i_sel = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !is_low(alpha[t], y[t]) {
                continue;
            }
            gmax2 = gmax2.max(y[t] * grad[t]);
            if i_sel == usize::MAX {
                continue;
            }
            let diff = gmax + y[t] * grad[t];
            if diff > 0.0 {
                let quad = qd[i_sel] + qd[t] - 2.0 * y[i_sel] * y[t] * q[i_sel * n + t];
                let gain = -diff * diff / quad.max(TAU);
                if gain < best {
                    best = gain;
                    j_sel = t;
                }
            }
        }
        if gmax + gmax2 < tol || j_sel == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;
        let (i, j) = (i_sel, j_sel);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q[i * n + j];
        if y[i] != y[j] {
            let quad = (qd[i] + qd[j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for k in 0..n {
            grad[k] += q[k * n + i] * di + q[k * n + j] * dj;
        }
    }

    // Bias: average over free vectors, else the midpoint of the feasible
    // interval left by the bound constraints.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
    let mut w = vec![0.0; p];
    for t in 0..n {
        if alpha[t] != 0.0 {
            for (wk, xk) in w.iter_mut().zip(&x[t]) {
                *wk += alpha[t] * y[t] * xk;
            }
        }
    }
    DualSolution {
        alpha,
        w,
        b: -rho,
        iterations,
        converged,
    }
}

/// Standardizes features on `d`, then fits the linear SVM.
pub fn train_linear_svm(d: &Dataset, cfg: &SvmConfig) -> Result<SvmModel, PredictorError> {
    if d.is_empty() {
        return Err(PredictorError::EmptyDataset);
    }
    if !(cfg.c > 0.0) {
        return Err(PredictorError::InvalidParameter(format!("C = {} must be positive", cfg.c)));
    }
    let (pos, neg) = d.class_counts();
    if pos == 0 || neg == 0 {
        return Err(PredictorError::SingleClass);
    }
    let scaler = Scaler::fit(d);
    let x: Vec<Vec<f64>> = d.rows.iter().map(|r| scaler.transform(&r.x)).collect();
    let y: Vec<f64> = d.rows.iter().map(|r| if r.y.is_success() { 1.0 } else { -1.0 }).collect();
    let sol = solve_dual(&x, &y, cfg.c, cfg.tolerance, cfg.max_iter);
    if !sol.converged {
        log::warn!("SVM stopped after {} iterations without meeting tolerance", sol.iterations);
    }
    Ok(SvmModel {
        feature_names: d.feature_names.clone(),
        w: sol.w,
        b: sol.b,
        c: cfg.c,
        scaler,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}
