//! Report types, CSV output and log-log fits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub index: usize,
    pub value: f64,
    /// Parameters of the record, in the order of its CSV columns.
    pub params: Vec<f64>,
}

/// Campaign summary; the per-sample records live in the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub campaign: String,
    pub sample_count: usize,
    pub max: Option<Extremum>,
    pub min: Option<Extremum>,
    pub csv_path: Option<String>,
    pub passed: bool,
    /// Named margins of the verdict; positive means passing with room.
    pub margins: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl ScanReport {
    pub fn new(campaign: &str, sample_count: usize) -> Self {
        Self {
            campaign: campaign.to_string(),
            sample_count,
            max: None,
            min: None,
            csv_path: None,
            passed: false,
            margins: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn margin(mut self, name: &str, value: f64) -> Self {
        self.margins.insert(name.to_string(), value);
        self
    }
}

pub fn write_csv<T: Serialize>(path: &Path, records: &[T]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r).map_err(std::io::Error::other)?;
    }
    w.flush()
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> std::io::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(std::io::Error::other)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    std::fs::write(path, text + "\n")
}

/// Least-squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `|value|` against `s` for one quantity, pooled over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub quantity: String,
    /// `(sample, s, value)`.
    pub points: Vec<(usize, f64, f64)>,
    pub slope: f64,
    pub slope_ci: (f64, f64),
    /// Slopes fitted to each sample separately.
    pub sample_slopes: Vec<f64>,
    pub decades: f64,
}

impl ScalingReport {
    /// Log-log fit of `|value|` on `s` with a 95% bootstrap interval that
    /// resamples whole samples (or single points when there is one sample).
    pub fn fit(quantity: &str, points: Vec<(usize, f64, f64)>, seed: u64) -> Self {
        let logs: Vec<(usize, f64, f64)> = points.iter().map(|&(k, s, v)| (k, s.ln(), v.abs().max(1e-300).ln())).collect();
        let slope_of = |pts: &[(usize, f64, f64)]| {
            let x: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.2).collect();
            linear_fit(&x, &y).0
        };
        let slope = slope_of(&logs);
        let mut groups: BTreeMap<usize, Vec<(usize, f64, f64)>> = BTreeMap::new();
        for p in &logs {
            groups.entry(p.0).or_default().push(*p);
        }
        let groups: Vec<Vec<(usize, f64, f64)>> = groups.into_values().collect();
        let sample_slopes = groups.iter().map(|g| slope_of(g)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut boot: Vec<f64> = (0..1000)
            .map(|_| {
                let pts: Vec<(usize, f64, f64)> = if groups.len() > 1 {
                    (0..groups.len()).flat_map(|_| groups[rng.gen_range(0..groups.len())].clone()).collect()
                } else {
                    (0..logs.len()).map(|_| logs[rng.gen_range(0..logs.len())]).collect()
                };
                slope_of(&pts)
            })
            .filter(|v| v.is_finite())
            .collect();
        boot.sort_by(f64::total_cmp);
        let q = |p: f64| boot[((boot.len() - 1) as f64 * p).round() as usize];
        let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
        Self {
            quantity: quantity.to_string(),
            slope,
            slope_ci: (q(0.025), q(0.975)),
            sample_slopes,
            decades: (hi / lo).log10(),
            points,
        }
    }

    pub fn distinct_s(&self) -> usize {
        let mut s: Vec<f64> = self.points.iter().map(|p| p.1).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s.len()
    }
}
