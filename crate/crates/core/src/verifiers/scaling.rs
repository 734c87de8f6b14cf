//! Small-`s` behaviour of the six first-variation integrals.

use super::local_max::{sample_admissible, Scales};
use super::report::ScalingReport;
use crate::variation::{build_omega, variation_integrals, Phi5Parameter, VariationError, VariationResolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One evaluation of `I1 … I6` at `(sample, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub sample: usize,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub t: f64,
    pub s: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i6: f64,
}

impl ScalingPoint {
    pub fn terms(&self) -> [f64; 6] {
        [self.i1, self.i2, self.i3, self.i4, self.i5, self.i6]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCampaign {
    pub points: Vec<ScalingPoint>,
    /// Fits for `I1 … I6`, then `I5/(−log 400s)`.
    pub fits: Vec<ScalingReport>,
    /// Range of `|I1|·√s` over all points.
    pub i1_sqrt_s: (f64, f64),
    pub max_abs_i2: f64,
    pub passed: bool,
}

/// The `s` grid: `count` log-spaced values from `t·1e−3` to `t`.
pub fn s_grid(t: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| t * 10f64.powf(-3.0 + 3.0 * k as f64 / (count - 1) as f64)).collect()
}

/// Explicit bound on `|I2|` used by the argument.
pub const I2_BOUND: f64 = 24.0 * 3.0 * PI;

/// Largest allowed ratio `max/min` of `|I1|·√s`.
pub const I1_RATIO_BOUND: f64 = 10.0;

/// Verdict from the fits and points alone.
pub fn scaling_verdict(fits: &[ScalingReport], points: &[ScalingPoint]) -> bool {
    let enough = fits.iter().all(|f| f.distinct_s() >= 8 && f.decades >= 2.0);
    let i1 = (-0.6..=-0.4).contains(&fits[0].slope);
    let bounded = [1, 2, 3, 5, 6].iter().all(|&k| fits[k].slope >= -0.05);
    let (lo, hi) = i1_sqrt_s_range(points);
    let i2 = points.iter().all(|p| p.i2.abs() < I2_BOUND);
    let negative = points.iter().all(|p| p.i1 < 0.0);
    enough && i1 && bounded && i2 && negative && lo > 0.0 && hi / lo < I1_RATIO_BOUND
}

fn i1_sqrt_s_range(points: &[ScalingPoint]) -> (f64, f64) {
    points.iter().map(|p| p.i1.abs() * p.s.sqrt()).fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)))
}

/// `samples` admissible configurations at `t = t_max`, each on a 10-point
/// `s` grid spanning three decades.
pub fn scaling_campaign(samples: usize, seed: u64, scales: &Scales, res: &VariationResolution) -> Result<ScalingCampaign, VariationError> {
    scales.validate().map_err(VariationError::InvalidParameter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = scales.t_max;
    let params: Vec<Phi5Parameter> = (0..samples).map(|_| sample_admissible(&mut rng, scales.eps1, (t, t * (1.0 + 1e-12)))).collect();
    let jobs: Vec<(usize, Phi5Parameter, f64)> =
        params.iter().enumerate().flat_map(|(k, p)| s_grid(p.t, 10).into_iter().map(move |s| (k, *p, s))).collect();
    let points = jobs
        .par_iter()
        .map(|&(k, p, s)| {
            let omega = build_omega(p.b1, p.b2, p.t, scales.eps1, scales.eps2)?;
            let ints = variation_integrals(&p.with_s(s), &omega, res)?;
            let [i1, i2, i3, i4, i5, i6] = ints.terms;
            Ok(ScalingPoint { sample: k, b1: p.b1, b2: p.b2, b3: p.b3, b4: p.b4, b5: p.b5, t: p.t, s, i1, i2, i3, i4, i5, i6 })
        })
        .collect::<Result<Vec<_>, VariationError>>()?;
    Ok(scaling_from_points(points, seed))
}

/// Fits and verdict from the per-point records.
pub fn scaling_from_points(points: Vec<ScalingPoint>, seed: u64) -> ScalingCampaign {
    let mut fits: Vec<ScalingReport> = (0..6)
        .map(|k| ScalingReport::fit(&format!("I{}", k + 1), points.iter().map(|p| (p.sample, p.s, p.terms()[k])).collect(), seed))
        .collect();
    let ratio = points.iter().map(|p| (p.sample, p.s, p.i5 / -(400.0 * p.s).ln())).collect();
    fits.push(ScalingReport::fit("I5/(-log 400s)", ratio, seed));
    let passed = scaling_verdict(&fits, &points);
    ScalingCampaign {
        i1_sqrt_s: i1_sqrt_s_range(&points),
        max_abs_i2: points.iter().map(|p| p.i2.abs()).fold(0.0, f64::max),
        fits,
        points,
        passed,
    }
}
