//! Area scans over the quotient: the width bound and the global maximum.

use super::area::{member_area, member_mesh_area};
use super::report::{Extremum, ScanReport};
use super::sampling::{projective_distance, ParameterSampler};
use crate::family_core::{FamilyParameter, ProjectivePoint4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaRecord {
    /// Sobol index, or `None` for a fixed anchor.
    pub index: Option<usize>,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// Projective distance of `a` from the apex `[1:0:0:0:0]`.
    pub distance: f64,
    pub area: f64,
    pub error_bound: f64,
}

impl AreaRecord {
    pub fn coords(&self) -> [f64; 5] {
        [self.a0, self.a1, self.a2, self.a3, self.a4]
    }

    pub fn upper(&self) -> f64 {
        self.area + self.error_bound
    }

    fn params(&self) -> Vec<f64> {
        vec![self.a0, self.a1, self.a2, self.a3, self.a4, self.a5]
    }
}

/// Slice area against the `n`/`2n` mesh estimate for one member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshCheck {
    pub record: usize,
    pub slice_area: f64,
    pub slice_error: f64,
    pub mesh_area: f64,
    pub mesh_error: f64,
    /// `|slice − mesh| / (slice_error + mesh_error)`; at most 1 when the two agree.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaScan {
    pub report: ScanReport,
    pub records: Vec<AreaRecord>,
    pub mesh_checks: Vec<MeshCheck>,
}

pub fn area_record(param: &FamilyParameter, index: Option<usize>) -> AreaRecord {
    let a = param.proj.coords();
    let est = member_area(param);
    AreaRecord {
        index,
        a0: a[0],
        a1: a[1],
        a2: a[2],
        a3: a[3],
        a4: a[4],
        a5: param.a5,
        distance: projective_distance(&a, &ProjectivePoint4::apex().coords()),
        area: est.value,
        error_bound: est.error_bound,
    }
}

fn anchor(raw: [f64; 5], a5: f64) -> AreaRecord {
    area_record(&FamilyParameter::from_coords(raw, a5).expect("valid anchor"), None)
}

/// Anchors first, then Sobol quotient samples `0..samples`.
fn scan_records(anchors: &[[f64; 5]], a5: f64, samples: usize, seed: u64) -> Vec<AreaRecord> {
    let sampler = ParameterSampler::new(seed);
    let mut records: Vec<AreaRecord> = anchors.iter().map(|&a| anchor(a, a5)).collect();
    records.par_extend((0..samples).into_par_iter().map(|i| area_record(&sampler.quotient(i, a5), Some(i))));
    records
}

fn mesh_check(rec: &AreaRecord, k: usize, grid_n: usize) -> Option<MeshCheck> {
    let param = FamilyParameter::from_coords(rec.coords(), rec.a5).ok()?;
    let mesh = member_mesh_area(&param, grid_n).ok()?;
    let budget = rec.error_bound + mesh.error_bound;
    Some(MeshCheck {
        record: k,
        slice_area: rec.area,
        slice_error: rec.error_bound,
        mesh_area: mesh.value,
        mesh_error: mesh.error_bound,
        ratio: (rec.area - mesh.value).abs() / budget.max(f64::MIN_POSITIVE),
    })
}

/// Mesh cross-checks on `count` evenly spaced records plus the argmax.
fn mesh_checks(records: &[AreaRecord], count: usize, grid_n: usize) -> Vec<MeshCheck> {
    if records.is_empty() || count == 0 {
        return Vec::new();
    }
    let mut picks: Vec<usize> = (0..count).map(|j| j * records.len() / count).collect();
    picks.push(argmax(records));
    picks.sort_unstable();
    picks.dedup();
    picks.par_iter().filter_map(|&k| mesh_check(&records[k], k, grid_n)).collect()
}

fn argmax(records: &[AreaRecord]) -> usize {
    (0..records.len()).max_by(|&i, &j| records[i].upper().total_cmp(&records[j].upper())).unwrap_or(0)
}

fn extremum(records: &[AreaRecord], k: usize) -> Extremum {
    Extremum { index: k, value: records[k].area, params: records[k].params() }
}

fn with_extrema(mut report: ScanReport, records: &[AreaRecord]) -> ScanReport {
    if !records.is_empty() {
        report.max = Some(extremum(records, argmax(records)));
        let kmin = (0..records.len()).min_by(|&i, &j| records[i].area.total_cmp(&records[j].area)).unwrap();
        report.min = Some(extremum(records, kmin));
    }
    report
}

/// Width verdict: every `area + error` strictly below `2π` and every mesh
/// cross-check within the combined error bounds.
pub fn width_verdict(records: &[AreaRecord], checks: &[MeshCheck]) -> bool {
    records.iter().all(|r| r.upper() < TWO_PI) && checks.iter().all(|c| c.ratio <= 1.0)
}

/// Scans `samples` quotient representatives at fixed `a5`, plus the apex.
pub fn scan_width(a5: f64, samples: usize, seed: u64, mesh_checks_count: usize, grid_n: usize) -> AreaScan {
    let records = scan_records(&[[1.0, 0.0, 0.0, 0.0, 0.0]], a5, samples, seed);
    let checks = mesh_checks(&records, mesh_checks_count, grid_n);
    let max_upper = records.iter().map(AreaRecord::upper).fold(f64::NEG_INFINITY, f64::max);
    let worst_mesh = checks.iter().map(|c| c.ratio).fold(0.0, f64::max);
    let mut report = with_extrema(ScanReport::new("width", records.len()), &records)
        .margin("two_pi_minus_max_upper", TWO_PI - max_upper)
        .margin("mesh_ratio_headroom", 1.0 - worst_mesh);
    report.passed = width_verdict(&records, &checks);
    report.notes.push(format!("a5 = {a5}, {samples} Sobol samples plus the apex, {} mesh checks at n = {grid_n}", checks.len()));
    AreaScan { report, records, mesh_checks: checks }
}

/// Empirical maximum for each `a5`; reported, not asserted.
pub fn width_monotonicity(a5_list: &[f64], samples: usize, seed: u64) -> (Vec<(f64, f64)>, bool) {
    let maxima: Vec<(f64, f64)> = a5_list
        .iter()
        .map(|&a5| (a5, scan_records(&[[1.0, 0.0, 0.0, 0.0, 0.0]], a5, samples, seed).iter().map(|r| r.area).fold(0.0, f64::max)))
        .collect();
    let mut sorted = maxima.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nonincreasing = sorted.windows(2).all(|w| w[1].1 <= w[0].1);
    (maxima, nonincreasing)
}

/// Distance bins of the global-max margin table.
pub const MARGIN_EDGES: [f64; 6] = [0.05, 0.1, 0.2, 0.4, 0.8, FRAC_PI_2];

/// Piecewise-linear margin: node `k` sits at the upper edge of bin `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginTable {
    /// `(distance, margin)` nodes, distances increasing.
    pub nodes: Vec<(f64, f64)>,
}

impl MarginTable {
    /// Half the smallest gap `2π − area − error` per bin over the calibration
    /// records, replaced by the minimum over all farther bins so it never
    /// decreases with distance.
    pub fn calibrate(records: &[AreaRecord]) -> Self {
        let bins = MARGIN_EDGES.len() - 1;
        let mut half_gap = vec![f64::INFINITY; bins];
        for r in records {
            if let Some(k) = (0..bins).find(|&k| r.distance > MARGIN_EDGES[k] && r.distance <= MARGIN_EDGES[k + 1] + 1e-12) {
                half_gap[k] = half_gap[k].min(0.5 * (TWO_PI - r.upper()));
            }
        }
        for k in (0..bins - 1).rev() {
            half_gap[k] = half_gap[k].min(half_gap[k + 1]);
        }
        // Empty far bins fall back to the nearest calibrated bin.
        let fallback = half_gap.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
        let m: Vec<f64> = half_gap.iter().map(|v| if v.is_finite() { *v } else { fallback }).collect();
        let mut nodes = vec![(MARGIN_EDGES[0], m[0])];
        nodes.extend((0..bins).map(|k| (MARGIN_EDGES[k + 1], m[k])));
        Self { nodes }
    }

    pub fn margin(&self, distance: f64) -> f64 {
        let n = &self.nodes;
        if distance <= n[0].0 {
            return n[0].1;
        }
        for w in n.windows(2) {
            if distance <= w[1].0 {
                let u = (distance - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + u * (w[1].1 - w[0].1);
            }
        }
        n[n.len() - 1].1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMaxScan {
    pub report: ScanReport,
    pub records: Vec<AreaRecord>,
    pub margins: MarginTable,
    /// Records `0..calibration_count` (after the anchors) set the margins.
    pub calibration_count: usize,
}

const GLOBAL_ANCHORS: [[f64; 5]; 2] = [[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0, 0.0]];

/// Records farther than 0.05 from the apex must have area below
/// `2π − margin(distance)`.
pub fn global_max_verdict(records: &[AreaRecord], table: &MarginTable) -> bool {
    let ok = records.iter().filter(|r| r.distance > MARGIN_EDGES[0]).all(|r| r.upper() < TWO_PI - table.margin(r.distance));
    ok && table.nodes.iter().all(|n| n.1 > 0.0)
}

/// `a5 = 0` scan of the quotient. The first quarter of the samples calibrates
/// the margin table.
pub fn scan_global_max(samples: usize, seed: u64) -> GlobalMaxScan {
    let records = scan_records(&GLOBAL_ANCHORS, 0.0, samples, seed);
    let calibration_count = samples / 4;
    let start = GLOBAL_ANCHORS.len();
    let margins = MarginTable::calibrate(&records[start..start + calibration_count]);
    let away: Vec<&AreaRecord> = records.iter().filter(|r| r.distance > MARGIN_EDGES[0]).collect();
    let worst = away.iter().map(|r| TWO_PI - margins.margin(r.distance) - r.upper()).fold(f64::INFINITY, f64::min);
    let max_away = away.iter().map(|r| r.area).fold(0.0, f64::max);
    let mut report = with_extrema(ScanReport::new("global-max", records.len()), &records)
        .margin("min_gap_to_floor", worst)
        .margin("two_pi_minus_max_away", TWO_PI - max_away);
    report.passed = global_max_verdict(&records, &margins);
    report.notes.push(format!("margin nodes (distance, margin): {:?}", margins.nodes));
    GlobalMaxScan { report, records, margins, calibration_count }
}
