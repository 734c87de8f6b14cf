//! Campaign configuration (TOML).

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use sweepoutlab::verifiers::{Scales, EPS1, EPS2, T_MAX, T_MIN_MESHABLE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    /// At most `i64::MAX`, the largest TOML integer.
    pub seed: u64,
    pub eps1: f64,
    pub eps2: f64,
    /// Range of the cap scale `t` drawn by the local-max, scaling and
    /// first-variation campaigns.
    pub t_min: f64,
    pub t_max: f64,
    /// Perturbation strengths for the width campaign; the first entry is also
    /// used by `plot-data phi1-figure`.
    pub a5_list: Vec<f64>,
    pub output_dir: PathBuf,
    /// Worker threads; all cores when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub samples: SampleCounts,
    pub grids: GridSizes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleCounts {
    pub global_max: usize,
    pub width: usize,
    pub width_mesh_checks: usize,
    pub local_max: usize,
    pub lemma43: usize,
    pub genus: usize,
    /// The genus campaign runs at this `a5` (it needs `a5 > 0`).
    pub genus_a5: f64,
    pub appendix_a: usize,
    pub appendix_a_meshes: usize,
    pub first_variation: usize,
    pub equivariance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSizes {
    /// Mesh cross-checks of the width and appendix-A campaigns.
    pub check_mesh_n: usize,
    pub genus_mesh_n: usize,
    pub local_max_mesh_n: usize,
    /// Resolution of the first-variation integrals and finite differences.
    pub variation_mesh_n: usize,
    pub scaling_mesh_n: usize,
    pub appendix_a_quad_n: usize,
    /// The cubic search runs at `cubic_n` and `2·cubic_n`.
    pub cubic_n: usize,
    pub parity_eps0: f64,
    pub parity_n: usize,
    /// Meshes emitted by `plot-data`.
    pub plot_mesh_n: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            eps1: EPS1,
            eps2: EPS2,
            t_min: T_MIN_MESHABLE,
            t_max: T_MAX,
            a5_list: vec![0.01],
            output_dir: PathBuf::from("sweepoutlab-out"),
            threads: None,
            samples: SampleCounts::default(),
            grids: GridSizes::default(),
        }
    }
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self {
            global_max: 4000,
            width: 10_000,
            width_mesh_checks: 20,
            local_max: 20,
            lemma43: 5,
            genus: 1000,
            genus_a5: 0.3,
            appendix_a: 100,
            appendix_a_meshes: 20,
            first_variation: 10,
            equivariance: 1000,
        }
    }
}

impl Default for GridSizes {
    fn default() -> Self {
        Self {
            check_mesh_n: 48,
            genus_mesh_n: 64,
            local_max_mesh_n: 256,
            variation_mesh_n: 128,
            scaling_mesh_n: 96,
            appendix_a_quad_n: 64,
            cubic_n: 200,
            parity_eps0: 0.05,
            parity_n: 256,
            plot_mesh_n: 64,
        }
    }
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn scales(&self) -> Scales {
        Scales { eps1: self.eps1, eps2: self.eps2, t_min: self.t_min, t_max: self.t_max }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.seed <= i64::MAX as u64, "seed {} exceeds the TOML integer range", self.seed);
        self.scales().validate().map_err(anyhow::Error::msg)?;
        anyhow::ensure!(!self.a5_list.is_empty(), "a5_list is empty");
        for &a5 in &self.a5_list {
            anyhow::ensure!((0.0..=1.0).contains(&a5), "a5 = {a5} is outside [0, 1]");
        }
        anyhow::ensure!(
            self.samples.genus_a5 > 0.0 && self.samples.genus_a5 <= 1.0,
            "genus_a5 = {} must lie in (0, 1]",
            self.samples.genus_a5
        );
        anyhow::ensure!(self.samples.global_max >= 4, "global_max needs at least 4 samples to calibrate");
        anyhow::ensure!(self.samples.width_mesh_checks <= self.samples.width + 1, "more width mesh checks than members");
        anyhow::ensure!(self.threads != Some(0), "threads must be positive");
        let g = &self.grids;
        for (name, n) in [
            ("check_mesh_n", g.check_mesh_n),
            ("genus_mesh_n", g.genus_mesh_n),
            ("local_max_mesh_n", g.local_max_mesh_n),
            ("variation_mesh_n", g.variation_mesh_n),
            ("scaling_mesh_n", g.scaling_mesh_n),
            ("plot_mesh_n", g.plot_mesh_n),
        ] {
            anyhow::ensure!(n >= 16, "{name} = {n} is below the minimum of 16");
        }
        anyhow::ensure!(g.cubic_n >= 2 && g.appendix_a_quad_n >= 2 && g.parity_n >= 8, "grid sizes too small");
        anyhow::ensure!(g.parity_eps0 > 0.0 && g.parity_eps0 < 0.5, "parity_eps0 = {} must lie in (0, 0.5)", g.parity_eps0);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_are_valid() {
        CampaignConfig::default().validate().unwrap();
        assert_eq!(CampaignConfig::from_toml("").unwrap(), CampaignConfig::default());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(CampaignConfig::from_toml("eps2 = 1e-6").is_err());
        assert!(CampaignConfig::from_toml("a5_list = [1.5]").is_err());
        assert!(CampaignConfig::from_toml("sede = 3").is_err());
        assert!(CampaignConfig::from_toml("[grids]\ngenus_mesh_n = 8").is_err());
    }

    proptest! {
        #[test]
        fn toml_round_trip_is_lossless(
            seed in 0..=i64::MAX as u64,
            eps1 in 1e-6f64..1.0,
            t_max in 1e-7f64..3.9e-5,
            frac in 0.01f64..1.0,
            a5_list in proptest::collection::vec(0.0f64..=1.0, 1..5),
            threads in proptest::option::of(1usize..64),
            width in 1usize..100_000,
            parity_eps0 in 1e-3f64..0.49,
        ) {
            let mut cfg = CampaignConfig { seed, eps1, eps2: t_max * 1.5, t_min: t_max * frac, t_max, a5_list, threads, ..Default::default() };
            cfg.samples.width = width;
            cfg.grids.parity_eps0 = parity_eps0;
            let back = CampaignConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
