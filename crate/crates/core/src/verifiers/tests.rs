use super::*;
use crate::family_core::{classify_cubic, eval, CubicKind, FamilyParameter, ImplicitSurface, Phi5Surface, Vec3};
use crate::surface_mesh::{topology, DomainSpec};
use crate::variation::{build_omega, slice_area, SliceResolution, VariationResolution};
use proptest::prelude::*;
use std::f64::consts::PI;

fn member(raw: [f64; 5], a5: f64) -> FamilyParameter {
    FamilyParameter::from_coords(raw, a5).unwrap()
}

#[test]
fn anchor_areas() {
    let apex = member_area(&member([1.0, 0.0, 0.0, 0.0, 0.0], 0.0));
    assert_eq!(apex.value, 2.0 * PI);
    assert_eq!(apex.error_bound, 0.0);
    let disk = member_area(&member([0.0, 0.0, 0.0, 1.0, 0.0], 0.0));
    assert_eq!(disk.value, PI);
    // x = 0.5 cuts a disk of radius √0.75
    assert!((plane_area(&[0.0, 1.0, 0.0, 0.0, -0.5]) - 0.75 * PI).abs() < 1e-15);
    // the pair (x − 0.2)² = y² is two planes at distance 0.2/√2
    let pair = member_area(&member([1.0, -0.4, 0.0, 0.0, 0.04], 0.0));
    assert!((pair.value - 2.0 * PI * (1.0 - 0.02)).abs() < 1e-13, "{pair:?}");
    // a0 at round-off level: the plane z = 0 with a bound of order |a0|
    let near = member_area(&member([(PI / 2.0).cos(), 0.0, 0.0, 1.0, 0.0], 0.01));
    assert!((near.value - PI).abs() <= near.error_bound && near.error_bound < 1e-14, "{near:?}");
    let tilted = member([1e-11, 0.3, 0.0, 1.0, 0.2], 0.5);
    let (s, m) = (member_area(&tilted), member_mesh_area(&tilted, 64).unwrap());
    assert!((s.value - m.value).abs() <= s.error_bound + m.error_bound, "{s:?} vs {m:?}");
}

#[test]
fn slice_areas_agree_with_meshes() {
    let sampler = ParameterSampler::new(7);
    for i in 0..6 {
        let p = sampler.quotient(i, 0.3);
        let s = member_area(&p);
        let m = member_mesh_area(&p, 48).unwrap();
        assert!((s.value - m.value).abs() <= s.error_bound + m.error_bound, "{i}: {s:?} vs {m:?}");
    }
}

#[test]
fn width_scan_passes_and_the_negative_control_fails() {
    let scan = scan_width(0.01, 200, 5, 2, 48);
    assert!(scan.report.passed, "{:?}", scan.report);
    assert_eq!(scan.records.len(), 201);
    assert!(scan.records[0].area < 2.0 * PI);
    assert!(scan.mesh_checks.iter().all(|c| c.ratio <= 1.0));

    let control = scan_width(0.0, 20, 5, 0, 48);
    assert!(!control.report.passed);
    assert_eq!(control.records[0].upper(), 2.0 * PI);
    assert!(control.report.margins["two_pi_minus_max_upper"] <= 0.0);
}

#[test]
fn verdicts_are_recomputable_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scan = scan_width(0.01, 40, 9, 0, 48);
    let path = dir.path().join("width.csv");
    write_csv(&path, &scan.records).unwrap();
    let back: Vec<AreaRecord> = read_csv(&path).unwrap();
    assert_eq!(back, scan.records);
    assert_eq!(width_verdict(&back, &scan.mesh_checks), scan.report.passed);

    let again = scan_width(0.01, 40, 9, 0, 48);
    let path2 = dir.path().join("width2.csv");
    write_csv(&path2, &again.records).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
}

#[test]
fn quotient_and_raw_scans_agree() {
    let sampler = ParameterSampler::new(13);
    let mut raw: Vec<f64> = Vec::new();
    let mut quo: Vec<f64> = Vec::new();
    let mut err: f64 = 0.0;
    for i in 0..40 {
        let a = member_area(&sampler.raw(i, 0.2));
        let b = member_area(&sampler.quotient(i, 0.2));
        raw.push(a.value);
        quo.push(b.value);
        err = err.max(a.error_bound + b.error_bound);
    }
    raw.sort_by(f64::total_cmp);
    quo.sort_by(f64::total_cmp);
    for (a, b) in raw.iter().zip(&quo) {
        assert!((a - b).abs() <= err + 1e-12, "{a} vs {b}");
    }
}

#[test]
fn global_max_scan() {
    let scan = scan_global_max(400, 3);
    assert!(scan.report.passed, "{:?}", scan.report);
    assert_eq!(scan.records[0].area, 2.0 * PI);
    assert_eq!(scan.records[0].distance, 0.0);
    assert_eq!(scan.records[1].area, PI);
    assert!((scan.records[1].distance - PI / 2.0).abs() < 1e-15);
    assert_eq!(scan.calibration_count, 100);
    assert!(scan.margins.nodes.windows(2).all(|w| w[0].1 <= w[1].1));
    assert!(global_max_verdict(&scan.records, &scan.margins));
    // a zero margin table cannot certify strictness
    let flat = MarginTable { nodes: vec![(0.05, 0.0), (PI / 2.0, 0.0)] };
    assert!(!global_max_verdict(&scan.records, &flat));
}

#[test]
fn genus_examples() {
    // one simple root: genus 0
    let one = Phi5Surface::new([0.0, 0.0, 0.5, 0.05, 0.3], 1.0);
    // three simple roots well inside the ball: genus 1
    let three = Phi5Surface::new([0.0, 0.0, -0.18, 0.03, 0.3], 1.0);
    for (surf, expected) in [(one, 0), (three, 1)] {
        let [_, _, b3, b4, b5] = surf.b;
        let prof = classify_cubic(b3, b4, b5);
        assert_eq!(predict_genus(&surf, &prof), expected);
        let mesh = crate::surface_mesh::mesh_implicit(&surf, &DomainSpec::UnitBall, 64).unwrap();
        assert_eq!(topology(&mesh).unwrap().total_genus, expected);
    }
    assert_eq!(classify_cubic(-0.18, 0.03, 0.3).kind, CubicKind::ThreeSimple);
}

#[test]
fn small_genus_scan() {
    let scan = genus_scan(0.3, 60, 11, 48);
    assert!(scan.report.passed, "{:?}", scan.report);
    assert_eq!(scan.records.iter().filter(|r| r.flag == GenusFlag::None).count(), 60);
    assert!(genus_verdict(&scan.records, 60));
    let mut broken = scan.records.clone();
    let k = broken.iter().position(|r| r.flag == GenusFlag::None).unwrap();
    broken[k].genus = Some(2);
    assert!(!genus_verdict(&broken, 60));
}

#[test]
fn plane_pair_in_omega_matches_slices() {
    let om = build_omega(0.004, -0.003, 3e-5, EPS1, EPS2).unwrap();
    let exact = plane_pair_area_in(&om);
    // a barely opened member has nearly the same area
    let surf = Phi5Surface::new([0.004, -0.003, 0.6, 0.0, 0.8], 1e-12);
    let sliced = slice_area(&surf, &DomainSpec::Omega(om.clone()), SliceResolution::default());
    assert!((exact.value - sliced.value).abs() < 1e-4, "{exact:?} vs {sliced:?}");
    // the bumps add area
    assert!(exact.value > 2.0 * PI);
    assert!(exact.value - plane_pair_area(0.004, -0.003) < 0.05);
}

#[test]
fn local_max_record_passes() {
    let res = LocalMaxResolution::default();
    let recs = local_max_experiment(0.002, 0.001, [0.5, -0.4, 0.7], &[3e-5], &Scales::default(), &res).unwrap();
    let r = &recs[0];
    assert!(r.passes(), "{r:?}");
    assert!(r.direct < r.decomposition() && r.decomposition() < 0.0);
    assert!(r.integral_i1 < 0.0);
}

#[test]
fn integral_of_i1_scales_like_root_t() {
    let res = LocalMaxResolution { s_nodes: 16, variation: VariationResolution::from_mesh_n(64), mesh_n: 32 };
    let ts = [1e-7, 1e-6, 1e-5];
    let recs = local_max_experiment(0.0, 0.0, [0.5, -0.4, 0.7], &ts, &Scales::default(), &res).unwrap();
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = recs.iter().map(|r| r.integral_i1.abs().ln()).collect();
    let (slope, _) = linear_fit(&x, &y);
    assert!((slope - 0.5).abs() < 0.1, "slope {slope}");
    let caps: Vec<f64> = recs.iter().map(|r| r.cap.ln()).collect();
    let (cap_slope, _) = linear_fit(&x, &caps);
    assert!(cap_slope >= 1.0 - 0.1, "cap slope {cap_slope}");
}

#[test]
fn scaling_single_sample() {
    let c = scaling_campaign(1, 3, &Scales::default(), &VariationResolution::from_mesh_n(64)).unwrap();
    assert!(c.passed, "{:?}", c.fits);
    assert_eq!(c.points.len(), 10);
    assert!((c.fits[0].slope + 0.5).abs() < 0.02);
    assert!(c.max_abs_i2 < I2_BOUND);
    assert_eq!(scaling_from_points(c.points.clone(), 3), c);
    let grid = s_grid(T_MAX, 10);
    assert!((grid[0] / T_MAX - 1e-3).abs() < 1e-15 && grid[9] == T_MAX);
}

#[test]
fn cubic_lemma_examples() {
    assert_eq!(window_floor(0.0, 1.0, 0.0), 0.375);
    assert_eq!(window_floor(0.0, 0.0, 1.0), 1.0);
    let r = cubic_lemma_search(40);
    assert!(r.h_est > 0.0 && r.h_est <= r.grid_min);
    let [a, b, c] = r.argmin;
    assert!(((a * a + b * b + c * c) - 1.0).abs() < 1e-12);
    assert!((window_floor(a, b, c) - r.h_est).abs() < 1e-15);
}

#[test]
fn appendix_a_small_campaign() {
    let c = appendix_a_campaign(12, 3, 4, 64, 48);
    assert!(c.passed, "{:?}", c.mesh_checks);
    assert_eq!(c.mesh_checks.len(), 3);
}

#[test]
fn first_variation_small_campaign() {
    let c = first_variation_campaign(2, 8, &Scales::default(), 96).unwrap();
    assert!(c.passed, "{:?}", c.records);
}

#[test]
fn equivariance_small_campaign() {
    let r = equivariance_campaign(100, 1);
    assert!(r.passed, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translated_form_is_a_rescaling(raw in prop::array::uniform5(-1.0f64..1.0), a5 in 0.0f64..1.0, x in prop::array::uniform3(-1.0f64..1.0)) {
        prop_assume!(raw[0].abs() > 1e-2);
        let p = member(raw, a5);
        let surf = translated_form(&p).unwrap();
        let a0 = p.proj.coords()[0];
        let x = Vec3::from(x);
        let lhs = eval(&p, &x);
        let rhs = a0 * surf.value(&x);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn window_floor_is_odd_symmetric_and_homogeneous(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, k in 0.1f64..10.0) {
        let m = window_floor(a, b, c);
        prop_assert_eq!(window_floor(-a, -b, -c), m);
        prop_assert!((window_floor(k * a, k * b, k * c) - k * m).abs() <= 1e-12 * (1.0 + k * m));
        prop_assert!(m >= 0.0);
    }

    #[test]
    fn margin_table_is_nondecreasing(gaps in prop::collection::vec((0.05f64..1.57, 0.0f64..3.0), 1..40), d1 in 0.0f64..1.6, d2 in 0.0f64..1.6) {
        let recs: Vec<AreaRecord> = gaps.iter().map(|&(d, g)| AreaRecord {
            index: Some(0), a0: 1.0, a1: 0.0, a2: 0.0, a3: 0.0, a4: 0.0, a5: 0.0,
            distance: d, area: 2.0 * PI - g, error_bound: 0.0,
        }).collect();
        let t = MarginTable::calibrate(&recs);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(t.margin(lo) <= t.margin(hi) + 1e-15);
        // calibration records clear their own margin
        for r in &recs {
            if r.distance > MARGIN_EDGES[0] && r.area < 2.0 * PI {
                prop_assert!(r.upper() <= 2.0 * PI - t.margin(r.distance) + 1e-12);
            }
        }
    }
}
