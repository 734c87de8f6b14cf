//! Smaller campaigns: the saddle ball bound, first variation, equivariance.

use super::local_max::{sample_admissible, Scales};
use super::report::ScanReport;
use super::sampling::ParameterSampler;
use crate::family_core::{verify_equivariance, verify_equivariance_with, Perturbation, Vec3};
use crate::surface_mesh::{appendix_a_bound_check, area_estimate, saddle_surface_in_ball, AppendixAReport, DomainSpec, MeshOptions};
use crate::variation::{build_omega, first_variation, VariationBreakdown, VariationError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMeshCheck {
    pub ball: usize,
    pub quadrature: f64,
    pub quadrature_error: f64,
    /// Mesh area of the rescaled member times `R²`.
    pub mesh: f64,
    pub mesh_error: f64,
}

impl BallMeshCheck {
    pub fn agrees(&self) -> bool {
        (self.quadrature - self.mesh).abs() <= self.quadrature_error + self.mesh_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixACampaign {
    pub bound: AppendixAReport,
    pub mesh_checks: Vec<BallMeshCheck>,
    pub passed: bool,
}

/// Random balls with `R ∈ [0.05, 20]`; the first `mesh_count` are also meshed.
pub fn appendix_a_campaign(samples: usize, mesh_count: usize, seed: u64, quad_n: usize, mesh_n: usize) -> AppendixACampaign {
    let bound = appendix_a_bound_check(samples, (0.05, 20.0), 1.0, quad_n, seed);
    let mesh_checks: Vec<BallMeshCheck> = bound.samples[..mesh_count.min(bound.samples.len())]
        .par_iter()
        .enumerate()
        .filter_map(|(k, b)| {
            let c = Vec3::from(b.center);
            let fam = saddle_surface_in_ball(c, b.radius);
            let est = area_estimate(&fam, &DomainSpec::UnitBall, mesh_n, MeshOptions::default()).ok()?;
            let r2 = b.radius * b.radius;
            Some(BallMeshCheck { ball: k, quadrature: b.area, quadrature_error: b.error_bound, mesh: est.value * r2, mesh_error: est.error_bound * r2 })
        })
        .collect();
    let passed = bound.passed && mesh_checks.len() == mesh_count.min(samples) && mesh_checks.iter().all(BallMeshCheck::agrees);
    AppendixACampaign { bound, mesh_checks, passed }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstVariationCampaign {
    pub records: Vec<VariationBreakdown>,
    pub passed: bool,
}

/// `|analytic − finite difference| ≤ 5·(truncation + quadrature errors)`.
pub fn first_variation_verdict(records: &[VariationBreakdown], required: usize) -> bool {
    records.len() >= required && records.iter().all(|b| b.discrepancy() <= 5.0 * b.error_budget())
}

/// Random admissible configurations with `t ∈ [t_min/2, t_max]` and
/// `s ∈ [0.2t, t]`.
pub fn first_variation_campaign(samples: usize, seed: u64, scales: &Scales, mesh_n: usize) -> Result<FirstVariationCampaign, VariationError> {
    scales.validate().map_err(VariationError::InvalidParameter)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<_> = (0..samples)
        .map(|_| {
            let p = sample_admissible(&mut rng, scales.eps1, (0.5 * scales.t_min, scales.t_max));
            let s = p.t * rng.gen_range(0.2..1.0);
            p.with_s(s)
        })
        .collect();
    let records = params
        .par_iter()
        .map(|p| {
            let omega = build_omega(p.b1, p.b2, p.t, scales.eps1, scales.eps2)?;
            first_variation(p, &omega, mesh_n)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let passed = first_variation_verdict(&records, samples);
    Ok(FirstVariationCampaign { records, passed })
}

/// Equivariance on Sobol samples, and failure of the `z²`-perturbed control.
pub fn equivariance_campaign(samples: usize, seed: u64) -> ScanReport {
    let sampler = ParameterSampler::new(seed);
    let failures = (0..samples).into_par_iter().filter(|&i| !verify_equivariance(&sampler.raw(i, 0.5), 16)).count();
    let control = (0..samples.min(100)).filter(|&i| verify_equivariance_with(&sampler.raw(i, 0.5), 16, Perturbation::ZSquared)).count();
    let mut report = ScanReport::new("equivariance", samples).margin("failures", -(failures as f64)).margin("control_passes", -(control as f64));
    report.passed = failures == 0 && control == 0;
    report.notes.push(format!("{failures} equivariance failures; the z² control passed on {control} of {} samples", samples.min(100)));
    report
}
