//! Every cubic `ax³ + bx + c` with `(a, b, c)` on the unit sphere stays away
//! from zero on some window of length 1/8 in `[−1/2, 1/2]`.

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Sample spacing in `x`.
const STEPS: usize = 2048;
/// A window of length 1/8 spans this many steps (257 samples).
const WINDOW: usize = STEPS / 8;
/// Window starts advance by 1/512.
const START_STRIDE: usize = 4;

/// `max over windows of min over the window of |ax³ + bx + c|`.
pub fn window_floor(a: f64, b: f64, c: f64) -> f64 {
    let vals: Vec<f64> = (0..=STEPS)
        .map(|k| {
            let x = -0.5 + k as f64 / STEPS as f64;
            (a * x * x * x + b * x + c).abs()
        })
        .collect();
    // Sliding-window minimum with a monotone deque.
    let mut best = 0.0f64;
    let mut dq: VecDeque<usize> = VecDeque::new();
    for (k, &v) in vals.iter().enumerate() {
        while dq.back().is_some_and(|&j| vals[j] >= v) {
            dq.pop_back();
        }
        dq.push_back(k);
        if k >= WINDOW {
            let start = k - WINDOW;
            while dq.front().is_some_and(|&j| j < start) {
                dq.pop_front();
            }
            if start.is_multiple_of(START_STRIDE) {
                best = best.max(vals[dq[0]]);
            }
        }
    }
    best
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicLemmaResult {
    pub grid_n: usize,
    /// Smallest window floor found, after refinement.
    pub h_est: f64,
    /// Smallest window floor on the grid alone.
    pub grid_min: f64,
    /// Coefficients `(a, b, c)` of the minimizer.
    pub argmin: [f64; 3],
}

struct Floor;

impl CostFunction for Floor {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        let [a, b, c] = sphere_point(p[0], p[1]);
        Ok(window_floor(a, b, c))
    }
}

fn refine(theta: f64, phi: f64, step: f64) -> Option<(f64, Vec<f64>)> {
    let simplex = vec![vec![theta, phi], vec![theta + step, phi], vec![theta, phi + step]];
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-12).ok()?;
    let res = Executor::new(Floor, solver).configure(|s| s.max_iters(300)).run().ok()?;
    let best = res.state().best_param.clone()?;
    Some((res.state().best_cost, best))
}

/// Grid of `grid_n` polar by `2·grid_n` azimuthal angles, then Nelder–Mead
/// from the eight lowest grid points.
pub fn cubic_lemma_search(grid_n: usize) -> CubicLemmaResult {
    assert!(grid_n >= 2);
    let dt = PI / grid_n as f64;
    let dp = PI / grid_n as f64;
    let mut grid: Vec<(f64, f64, f64)> = (0..grid_n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let theta = (i as f64 + 0.5) * dt;
            (0..2 * grid_n).map(move |j| {
                let phi = j as f64 * dp;
                let [a, b, c] = sphere_point(theta, phi);
                (window_floor(a, b, c), theta, phi)
            })
        })
        .collect();
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));
    let grid_min = grid[0].0;
    let mut best = (grid[0].0, vec![grid[0].1, grid[0].2]);
    for &(_, theta, phi) in grid.iter().take(8) {
        if let Some((v, p)) = refine(theta, phi, 0.5 * dt) {
            if v < best.0 {
                best = (v, p);
            }
        }
    }
    CubicLemmaResult { grid_n, h_est: best.0, grid_min, argmin: sphere_point(best.1[0], best.1[1]) }
}

/// Positive floor at both resolutions, agreeing within 5%.
pub fn cubic_lemma_verdict(coarse: &CubicLemmaResult, fine: &CubicLemmaResult) -> bool {
    coarse.h_est > 0.0 && fine.h_est > 0.0 && (coarse.h_est - fine.h_est).abs() <= 0.05 * fine.h_est
}
