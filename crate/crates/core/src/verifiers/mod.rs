//! Verification campaigns over the family.

mod area;
mod campaigns;
mod cubic_lemma;
mod genus;
mod local_max;
mod report;
mod sampling;
mod scaling;
mod width;

pub use area::{member_area, member_mesh_area, plane_area, plane_pair_area, translated_form};
pub use campaigns::{
    appendix_a_campaign, equivariance_campaign, first_variation_campaign, first_variation_verdict, AppendixACampaign, BallMeshCheck,
    FirstVariationCampaign,
};
pub use cubic_lemma::{cubic_lemma_search, cubic_lemma_verdict, window_floor, CubicLemmaResult};
pub use genus::{genus_scan, genus_verdict, predict_genus, GenusFlag, GenusRecord, GenusScan};
pub use local_max::{
    local_max_campaign, local_max_experiment, local_max_verdict, plane_pair_area_in, sample_admissible, LocalMaxRecord, LocalMaxResolution,
    LocalMaxScan, Scales, EPS1, EPS2, T_MAX, T_MIN_MESHABLE,
};
pub use report::{linear_fit, read_csv, write_csv, write_json, Extremum, ScalingReport, ScanReport};
pub use sampling::{projective_distance, ParameterSampler};
pub use scaling::{scaling_campaign, s_grid, scaling_from_points, scaling_verdict, ScalingCampaign, ScalingPoint, I2_BOUND};
pub use width::{
    area_record, global_max_verdict, scan_global_max, scan_width, width_monotonicity, width_verdict, AreaRecord, AreaScan, GlobalMaxScan,
    MarginTable, MeshCheck, MARGIN_EDGES,
};

#[cfg(test)]
mod tests;
