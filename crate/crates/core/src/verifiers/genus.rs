//! Genus of smooth members against the root-count prediction.
//!
//! In the translated form `(x − b1)² − (y − b2)² + φ(z) = 0` each horizontal
//! slice is a hyperbola that degenerates to a line pair exactly at the roots
//! of `φ`. Between two consecutive roots the hyperbola opens the other way,
//! so a handle appears only when all three crossings lie inside the ball and
//! the two branches stay connected across the opened region.

use super::area::translated_form;
use super::report::ScanReport;
use super::sampling::ParameterSampler;
use crate::family_core::{classify_cubic, singular_points, CubicKind, CubicProfile, Phi5Surface};
use crate::surface_mesh::{extract_mesh, topology, DomainSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples with a singular point within this radius are skipped.
pub const SINGULAR_RADIUS: f64 = 1.02;
/// Crossing points closer than this to the sphere make the prediction ambiguous.
pub const SPHERE_MARGIN: f64 = 0.01;
/// Roots with `|φ′|` below this are treated as nearly double.
pub const SLOPE_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenusFlag {
    /// Prediction and mesh both trusted.
    None,
    Plane,
    Singular,
    Ambiguous,
    Tangential,
    MeshFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenusRecord {
    pub index: usize,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    pub kind: Option<CubicKind>,
    /// Crossing points `(b1, b2, zᵢ)` inside the ball.
    pub inside: usize,
    pub predicted: Option<u32>,
    pub genus: Option<u32>,
    pub components: Option<usize>,
    pub flag: GenusFlag,
}

/// Counts the arcs of one hyperbola branch at height `z` inside the disk.
fn branch_arcs(b1: f64, b2: f64, kappa: f64, z: f64, sign: f64) -> usize {
    const V_MAX: f64 = 8.0;
    const STEPS: usize = 4000;
    let r2 = 1.0 - z * z;
    let root = kappa.abs().sqrt();
    let mut arcs = 0;
    let mut prev = false;
    for j in 0..=STEPS {
        let v = -V_MAX + 2.0 * V_MAX * j as f64 / STEPS as f64;
        let (x, y) = if kappa > 0.0 { (sign * root * v.cosh(), root * v.sinh()) } else { (root * v.sinh(), sign * root * v.cosh()) };
        let inside = (x + b1).powi(2) + (y + b2).powi(2) < r2;
        if inside && !prev {
            arcs += 1;
        }
        prev = inside;
    }
    arcs
}

/// Root-count prediction for a smooth member in translated form: genus 1 iff
/// `φ` has three simple roots, all crossings lie inside the ball, and between
/// the outer roots each branch meets the slice disk in a single arc.
pub fn predict_genus(surf: &Phi5Surface, prof: &CubicProfile) -> u32 {
    let [b1, b2, _, _, _] = surf.b;
    let inside = prof.roots.iter().filter(|r| b1 * b1 + b2 * b2 + r.z * r.z < 1.0).count();
    if prof.kind != CubicKind::ThreeSimple || inside != 3 {
        return 0;
    }
    let (z1, z3) = (prof.roots[0].z, prof.roots[2].z);
    let connected = (1..400).all(|k| {
        let z = z1 + (z3 - z1) * k as f64 / 400.0;
        let kappa = -surf.profile(z);
        [1.0, -1.0].iter().all(|&sg| branch_arcs(b1, b2, kappa, z, sg) == 1)
    });
    connected as u32
}

fn ambiguous(surf: &Phi5Surface, prof: &CubicProfile) -> bool {
    let [b1, b2, _, _, _] = surf.b;
    prof.roots.iter().any(|r| {
        let rho = (b1 * b1 + b2 * b2 + r.z * r.z).sqrt();
        (rho - 1.0).abs() < SPHERE_MARGIN || (rho < 1.0 && surf.profile_derivative(r.z).abs() < SLOPE_MARGIN)
    })
}

fn genus_record(sampler: &ParameterSampler, index: usize, a5: f64, grid_n: usize) -> GenusRecord {
    let param = sampler.quotient(index, a5);
    let a = param.proj.coords();
    let mut rec = GenusRecord {
        index,
        a0: a[0],
        a1: a[1],
        a2: a[2],
        a3: a[3],
        a4: a[4],
        a5,
        kind: None,
        inside: 0,
        predicted: None,
        genus: None,
        components: None,
        flag: GenusFlag::None,
    };
    let Some(surf) = translated_form(&param) else {
        rec.flag = GenusFlag::Plane;
        return rec;
    };
    let [b1, b2, b3, b4, b5] = surf.b;
    let prof = classify_cubic(b3, b4, b5);
    rec.kind = Some(prof.kind);
    rec.inside = prof.roots.iter().filter(|r| b1 * b1 + b2 * b2 + r.z * r.z < 1.0).count();
    let singular = singular_points(&param).map(|pts| pts.iter().any(|x| x.norm() < SINGULAR_RADIUS)).unwrap_or(true);
    if singular || prof.has_multiple_root() && rec.inside > 0 {
        rec.flag = GenusFlag::Singular;
        return rec;
    }
    rec.predicted = Some(predict_genus(&surf, &prof));
    if ambiguous(&surf, &prof) {
        rec.flag = GenusFlag::Ambiguous;
    }
    match extract_mesh(&param, &DomainSpec::UnitBall, grid_n).and_then(|m| Ok((m.tangential, topology(&m)?))) {
        Ok((tangential, topo)) => {
            rec.genus = Some(topo.total_genus);
            rec.components = Some(topo.components.len());
            if tangential && rec.flag == GenusFlag::None {
                rec.flag = GenusFlag::Tangential;
            }
        }
        Err(_) => rec.flag = GenusFlag::MeshFailure,
    }
    rec
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenusScan {
    pub report: ScanReport,
    pub records: Vec<GenusRecord>,
}

/// Verdict from the records: every computed genus is 0 or 1, and every
/// unflagged record agrees with its prediction.
pub fn genus_verdict(records: &[GenusRecord], required: usize) -> bool {
    let bounded = records.iter().filter_map(|r| r.genus).all(|g| g <= 1);
    let clean: Vec<&GenusRecord> = records.iter().filter(|r| r.flag == GenusFlag::None).collect();
    bounded && clean.len() >= required && clean.iter().all(|r| r.genus.is_some() && r.genus == r.predicted)
}

/// Scans quotient samples until `samples` unflagged smooth members are
/// collected (or `20·samples` indices are exhausted).
pub fn genus_scan(a5: f64, samples: usize, seed: u64, grid_n: usize) -> GenusScan {
    assert!(a5 > 0.0, "genus scan needs a5 > 0");
    let sampler = ParameterSampler::new(seed);
    let mut records = Vec::new();
    let mut next = 0;
    let limit = 20 * samples.max(1);
    while records.iter().filter(|r: &&GenusRecord| r.flag == GenusFlag::None).count() < samples && next < limit {
        let missing = samples - records.iter().filter(|r: &&GenusRecord| r.flag == GenusFlag::None).count();
        let batch = (missing + missing / 2 + 8).min(limit - next);
        records.par_extend((next..next + batch).into_par_iter().map(|i| genus_record(&sampler, i, a5, grid_n)));
        next += batch;
    }
    // Keep exactly the prefix that contains `samples` clean records.
    let mut clean = 0;
    let cut = records
        .iter()
        .position(|r| {
            clean += (r.flag == GenusFlag::None) as usize;
            clean == samples
        })
        .map_or(records.len(), |p| p + 1);
    records.truncate(cut);

    let count = |f: GenusFlag| records.iter().filter(|r| r.flag == f).count();
    let genus_one = records.iter().filter(|r| r.flag == GenusFlag::None && r.genus == Some(1)).count();
    let mismatches = records.iter().filter(|r| r.flag == GenusFlag::None && r.genus != r.predicted).count();
    let max_genus = records.iter().filter_map(|r| r.genus).max().unwrap_or(0);
    let mut report = ScanReport::new("genus", records.len())
        .margin("mismatches", -(mismatches as f64))
        .margin("max_genus_headroom", 1.0 - max_genus as f64);
    report.passed = genus_verdict(&records, samples);
    report.notes.push(format!(
        "a5 = {a5}, grid_n = {grid_n}: {} clean ({genus_one} of genus 1); skipped {} planes, {} singular, {} ambiguous, {} tangential, {} mesh failures",
        clean,
        count(GenusFlag::Plane),
        count(GenusFlag::Singular),
        count(GenusFlag::Ambiguous),
        count(GenusFlag::Tangential),
        count(GenusFlag::MeshFailure)
    ));
    GenusScan { report, records }
}
