//! `sweepoutlab verify <campaign> [config]`.

use crate::config::CampaignConfig;
use crate::output::OutputDir;
use crate::{CliError, CliResult};
use serde::Serialize;
use sweepoutlab::topology_checks::parity_table;
use sweepoutlab::variation::VariationResolution;
use sweepoutlab::verifiers::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Campaign {
    GlobalMax,
    Width,
    LocalMax,
    Lemma43,
    CubicLemma,
    Genus,
    AppendixA,
    ParityTable,
    FirstVariation,
    Equivariance,
}

impl Campaign {
    pub fn parse(name: &str) -> anyhow::Result<Self> {
        Ok(match name {
            "global-max" => Self::GlobalMax,
            "width" => Self::Width,
            "local-max" => Self::LocalMax,
            "lemma43" | "scaling" => Self::Lemma43,
            "cubic-lemma" => Self::CubicLemma,
            "genus" => Self::Genus,
            "appendixA" | "appendix-a" => Self::AppendixA,
            "parity-table" => Self::ParityTable,
            "first-variation" => Self::FirstVariation,
            "equivariance" => Self::Equivariance,
            other => anyhow::bail!(
                "unknown campaign {other:?}; expected one of global-max, width, local-max, lemma43, cubic-lemma, genus, appendixA, \
                 parity-table, first-variation, equivariance"
            ),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::GlobalMax => "global-max",
            Self::Width => "width",
            Self::LocalMax => "local-max",
            Self::Lemma43 => "lemma43",
            Self::CubicLemma => "cubic-lemma",
            Self::Genus => "genus",
            Self::AppendixA => "appendixA",
            Self::ParityTable => "parity-table",
            Self::FirstVariation => "first-variation",
            Self::Equivariance => "equivariance",
        }
    }
}

/// Verdict and a one-line summary.
struct Outcome {
    passed: bool,
    summary: String,
}

pub fn cmd_verify(campaign: Campaign, cfg: &CampaignConfig) -> CliResult<()> {
    let out = OutputDir::create(cfg, campaign.name())?;
    let outcome = match campaign {
        Campaign::GlobalMax => global_max(cfg, &out)?,
        Campaign::Width => width(cfg, &out)?,
        Campaign::LocalMax => local_max(cfg, &out)?,
        Campaign::Lemma43 => lemma43(cfg, &out)?,
        Campaign::CubicLemma => cubic(cfg, &out)?,
        Campaign::Genus => genus(cfg, &out)?,
        Campaign::AppendixA => appendix_a(cfg, &out)?,
        Campaign::ParityTable => parity(cfg, &out)?,
        Campaign::FirstVariation => first_variation(cfg, &out)?,
        Campaign::Equivariance => equivariance(cfg, &out)?,
    };
    out.finish(cfg, Some(outcome.passed))?;
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    println!("{}: {verdict}: {} (reports in {})", campaign.name(), outcome.summary, out.dir.display());
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::VerdictFailed(format!("{}: {}", campaign.name(), outcome.summary)))
    }
}

fn failed(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Failed(e.into())
}

fn global_max(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let mut scan = scan_global_max(cfg.samples.global_max, cfg.seed);
    scan.report.csv_path = Some("records.csv".into());
    out.csv("records.csv", &scan.records)?;
    out.json("margins.json", &scan.margins)?;
    out.json("report.json", &scan.report)?;
    Ok(Outcome {
        passed: scan.report.passed,
        summary: format!(
            "{} members, smallest gap to the margin floor {:.3e}, 2π − max area away from the apex {:.3e}",
            scan.records.len(),
            scan.report.margins["min_gap_to_floor"],
            scan.report.margins["two_pi_minus_max_away"]
        ),
    })
}

#[derive(Serialize)]
struct WidthReport {
    scans: Vec<ScanReport>,
    /// `(a5, max area)` per scan.
    maxima: Vec<(f64, f64)>,
    /// Reported, not part of the verdict.
    max_nonincreasing_in_a5: bool,
    passed: bool,
}

fn width(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let mut scans = Vec::new();
    let mut maxima = Vec::new();
    for &a5 in &cfg.a5_list {
        let mut scan = scan_width(a5, cfg.samples.width, cfg.seed, cfg.samples.width_mesh_checks, cfg.grids.check_mesh_n);
        let csv = format!("records_a5_{a5}.csv");
        scan.report.csv_path = Some(csv.clone());
        out.csv(&csv, &scan.records)?;
        out.csv(&format!("mesh_checks_a5_{a5}.csv"), &scan.mesh_checks)?;
        maxima.push((a5, scan.records.iter().map(|r| r.area).fold(0.0, f64::max)));
        scans.push(scan.report);
    }
    let mut sorted = maxima.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nonincreasing = sorted.windows(2).all(|w| w[1].1 <= w[0].1);
    let passed = scans.iter().all(|s| s.passed);
    let parts: Vec<String> = scans
        .iter()
        .zip(&maxima)
        .map(|(s, (a5, m))| format!("a5 = {a5}: max {m:.9}, 2π − max upper {:.3e} {}", s.margins["two_pi_minus_max_upper"], if s.passed { "ok" } else { "FAIL" }))
        .collect();
    out.json("report.json", &WidthReport { scans, maxima, max_nonincreasing_in_a5: nonincreasing, passed })?;
    Ok(Outcome { passed, summary: parts.join("; ") })
}

fn local_max(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let res = LocalMaxResolution { mesh_n: cfg.grids.local_max_mesh_n, ..Default::default() };
    let mut scan = local_max_campaign(cfg.samples.local_max, cfg.seed, &cfg.scales(), &res).map_err(failed)?;
    scan.report.csv_path = Some("records.csv".into());
    out.csv("records.csv", &scan.records)?;
    out.json("report.json", &scan.report)?;
    Ok(Outcome {
        passed: scan.report.passed,
        summary: format!(
            "{} configurations, 2π − (mesh + error) ≥ {:.3e}, cap + integral ≤ {:.3e}",
            scan.records.len(),
            scan.report.margins["two_pi_minus_mesh_upper"],
            -scan.report.margins["decomposition_below_zero"]
        ),
    })
}

#[derive(Serialize)]
struct ScalingSummary<'a> {
    csv_path: &'a str,
    fits: &'a [ScalingReport],
    i1_sqrt_s: (f64, f64),
    max_abs_i2: f64,
    i2_bound: f64,
    passed: bool,
}

fn lemma43(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let res = VariationResolution::from_mesh_n(cfg.grids.scaling_mesh_n);
    let c = scaling_campaign(cfg.samples.lemma43, cfg.seed, &cfg.scales(), &res).map_err(failed)?;
    out.csv("points.csv", &c.points)?;
    out.json(
        "report.json",
        &ScalingSummary {
            csv_path: "points.csv",
            fits: &c.fits,
            i1_sqrt_s: c.i1_sqrt_s,
            max_abs_i2: c.max_abs_i2,
            i2_bound: I2_BOUND,
            passed: c.passed,
        },
    )?;
    let slopes: Vec<String> = c.fits.iter().map(|f| format!("{} {:.3}", f.quantity, f.slope)).collect();
    Ok(Outcome { passed: c.passed, summary: format!("log-log slopes {}", slopes.join(", ")) })
}

#[derive(Serialize)]
struct CubicReport {
    coarse: CubicLemmaResult,
    fine: CubicLemmaResult,
    passed: bool,
}

fn cubic(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let coarse = cubic_lemma_search(cfg.grids.cubic_n);
    let fine = cubic_lemma_search(2 * cfg.grids.cubic_n);
    let passed = cubic_lemma_verdict(&coarse, &fine);
    let summary = format!("h_est {:.6} (n = {}), {:.6} (n = {})", coarse.h_est, coarse.grid_n, fine.h_est, fine.grid_n);
    out.json("report.json", &CubicReport { coarse, fine, passed })?;
    Ok(Outcome { passed, summary })
}

fn genus(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let mut scan = genus_scan(cfg.samples.genus_a5, cfg.samples.genus, cfg.seed, cfg.grids.genus_mesh_n);
    scan.report.csv_path = Some("records.csv".into());
    out.csv("records.csv", &scan.records)?;
    out.json("report.json", &scan.report)?;
    Ok(Outcome { passed: scan.report.passed, summary: scan.report.notes.join("; ") })
}

#[derive(Serialize)]
struct BallRow {
    index: usize,
    cx: f64,
    cy: f64,
    cz: f64,
    radius: f64,
    area: f64,
    error_bound: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct AppendixSummary {
    csv_path: &'static str,
    mesh_checks_csv: &'static str,
    balls: usize,
    max_ratio: f64,
    max_ratio_upper: f64,
    argmax: usize,
    mesh_checks: usize,
    mesh_agreements: usize,
    passed: bool,
}

fn appendix_a(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let c = appendix_a_campaign(cfg.samples.appendix_a, cfg.samples.appendix_a_meshes, cfg.seed, cfg.grids.appendix_a_quad_n, cfg.grids.check_mesh_n);
    let rows: Vec<BallRow> = c
        .bound
        .samples
        .iter()
        .enumerate()
        .map(|(index, b)| BallRow {
            index,
            cx: b.center[0],
            cy: b.center[1],
            cz: b.center[2],
            radius: b.radius,
            area: b.area,
            error_bound: b.error_bound,
            ratio: b.ratio,
        })
        .collect();
    out.csv("balls.csv", &rows)?;
    out.csv("mesh_checks.csv", &c.mesh_checks)?;
    let agreements = c.mesh_checks.iter().filter(|m| m.agrees()).count();
    let s = AppendixSummary {
        csv_path: "balls.csv",
        mesh_checks_csv: "mesh_checks.csv",
        balls: rows.len(),
        max_ratio: c.bound.max_ratio,
        max_ratio_upper: c.bound.max_ratio_upper,
        argmax: c.bound.argmax,
        mesh_checks: c.mesh_checks.len(),
        mesh_agreements: agreements,
        passed: c.passed,
    };
    out.json("report.json", &s)?;
    Ok(Outcome {
        passed: c.passed,
        summary: format!(
            "max area/(2πR²) {:.4} (with error {:.4}) over {} balls, {agreements}/{} mesh checks agree",
            s.max_ratio,
            s.max_ratio_upper,
            s.balls,
            s.mesh_checks
        ),
    })
}

fn parity(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let (eps0, n) = (cfg.grids.parity_eps0, cfg.grids.parity_n);
    let base = parity_table(eps0, n).map_err(failed)?;
    let doubled = parity_table(eps0, 2 * n).map_err(failed)?;
    let halved = parity_table(eps0 / 2.0, n).map_err(failed)?;
    let stable = base.parities() == doubled.parities() && base.parities() == halved.parities();
    let passed = base.matches_expected() && stable;
    out.json("report.json", &serde_json::json!({ "table": base, "refined": doubled, "halved_eps0": halved, "stable": stable, "passed": passed }))?;
    let text = base.to_text();
    out.text("parity_table.txt", &text)?;
    print!("{text}");
    Ok(Outcome {
        passed,
        summary: format!("{} against the expected table, {} under n → 2n and eps0 → eps0/2", if base.matches_expected() { "matches" } else { "differs" }, if stable { "stable" } else { "unstable" }),
    })
}

#[derive(Serialize)]
struct VariationRow {
    b1: f64,
    b2: f64,
    b3: f64,
    b4: f64,
    b5: f64,
    s: f64,
    t: f64,
    i1: f64,
    i2: f64,
    i3: f64,
    i4: f64,
    i5: f64,
    i6: f64,
    total: f64,
    fd_total: f64,
    fd_step: f64,
    total_error: f64,
    fd_area_error: f64,
    fd_truncation: f64,
    discrepancy: f64,
    error_budget: f64,
}

fn first_variation(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let c = first_variation_campaign(cfg.samples.first_variation, cfg.seed, &cfg.scales(), cfg.grids.variation_mesh_n).map_err(failed)?;
    let rows: Vec<VariationRow> = c
        .records
        .iter()
        .map(|b| VariationRow {
            b1: b.param.b1,
            b2: b.param.b2,
            b3: b.param.b3,
            b4: b.param.b4,
            b5: b.param.b5,
            s: b.param.s,
            t: b.param.t,
            i1: b.i1,
            i2: b.i2,
            i3: b.i3,
            i4: b.i4,
            i5: b.i5,
            i6: b.i6,
            total: b.total,
            fd_total: b.fd_total,
            fd_step: b.fd_step,
            total_error: b.total_error,
            fd_area_error: b.fd_area_error,
            fd_truncation: b.fd_truncation,
            discrepancy: b.discrepancy(),
            error_budget: b.error_budget(),
        })
        .collect();
    out.csv("records.csv", &rows)?;
    out.json("report.json", &c)?;
    let worst = rows.iter().map(|r| r.discrepancy / r.error_budget).fold(0.0, f64::max);
    Ok(Outcome { passed: c.passed, summary: format!("{} configurations, worst |analytic − FD| / budget {worst:.3} (limit 5)", rows.len()) })
}

fn equivariance(cfg: &CampaignConfig, out: &OutputDir) -> CliResult<Outcome> {
    let r = equivariance_campaign(cfg.samples.equivariance, cfg.seed);
    out.json("report.json", &r)?;
    Ok(Outcome { passed: r.passed, summary: r.notes.join("; ") })
}
