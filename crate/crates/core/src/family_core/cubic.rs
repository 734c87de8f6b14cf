//! Root structure of the profile cubic `a5·z³ + a3·z + a4`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CubicKind {
    OneSimple,
    ThreeSimple,
    SimplePlusDouble,
    Triple,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoot {
    pub z: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicProfile {
    /// Sorted ascending by `z`.
    pub roots: Vec<CubicRoot>,
    pub kind: CubicKind,
    /// `−4·a5·a3³ − 27·a5²·a4²`.
    pub discriminant: f64,
}

impl CubicProfile {
    pub fn has_multiple_root(&self) -> bool {
        matches!(self.kind, CubicKind::SimplePlusDouble | CubicKind::Triple)
    }

    pub fn multiple_roots(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().filter(|r| r.multiplicity > 1).map(|r| r.z)
    }

    pub fn simple_roots(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().filter(|r| r.multiplicity == 1).map(|r| r.z)
    }
}

/// Relative discriminant size below which a multiple root is declared.
pub const MULTIPLICITY_TOL: f64 = 1e-12;

pub fn classify_cubic(a3: f64, a4: f64, a5: f64) -> CubicProfile {
    let discriminant = -4.0 * a5 * a3 * a3 * a3 - 27.0 * a5 * a5 * a4 * a4;
    let profile = |roots: Vec<CubicRoot>, kind| CubicProfile { roots, kind, discriminant };

    if a5 == 0.0 {
        if a3 == 0.0 {
            return profile(Vec::new(), CubicKind::Degenerate);
        }
        return profile(vec![CubicRoot { z: -a4 / a3, multiplicity: 1 }], CubicKind::OneSimple);
    }

    // Depressed monic form z³ + p·z + q.
    let p = a3 / a5;
    let q = a4 / a5;
    let f = |z: f64| a5 * z * z * z + a3 * z + a4;
    let df = |z: f64| 3.0 * a5 * z * z + a3;

    if p == 0.0 && q == 0.0 {
        return profile(vec![CubicRoot { z: 0.0, multiplicity: 3 }], CubicKind::Triple);
    }

    let d = -(4.0 * p * p * p + 27.0 * q * q);
    let scale = (4.0 * p * p * p).abs().max(27.0 * q * q);

    let kind;
    let mut roots;
    if d.abs() <= MULTIPLICITY_TOL * scale {
        if p.abs() < 1e-300 {
            kind = CubicKind::Triple;
            roots = vec![CubicRoot { z: 0.0, multiplicity: 3 }];
        } else {
            // Double root r solves 3r² + p = 0 and 2r³ = q; the simple root is −2r.
            let mut r = -1.5 * q / p;
            if p < 0.0 {
                let mag = (-p / 3.0).sqrt();
                r = mag.copysign(r);
            }
            let simple = polish(-2.0 * r, f, df);
            kind = CubicKind::SimplePlusDouble;
            roots = vec![CubicRoot { z: r, multiplicity: 2 }, CubicRoot { z: simple, multiplicity: 1 }];
        }
    } else if d > 0.0 {
        // Three real roots, trigonometric form (p < 0 here).
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        kind = CubicKind::ThreeSimple;
        roots = (0..3)
            .map(|k| {
                let z = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                CubicRoot { z: polish(z, f, df), multiplicity: 1 }
            })
            .collect();
    } else {
        // One real root, Cardano with the cancellation-free branch.
        let w = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let u = -(q.abs() / 2.0 + w).cbrt().copysign(q);
        let z = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        kind = CubicKind::OneSimple;
        roots = vec![CubicRoot { z: polish(z, f, df), multiplicity: 1 }];
    }
    roots.sort_by(|a, b| a.z.total_cmp(&b.z));
    // Sturm count on the rescaled monic form (z = λw), whose coefficients are O(1).
    let lambda = p.abs().sqrt().max(q.abs().cbrt());
    debug_assert!(
        kind == CubicKind::SimplePlusDouble
            || kind == CubicKind::Triple
            || d.abs() < 1e-6 * scale
            || sturm_root_count(&[q / lambda.powi(3), p / (lambda * lambda), 0.0, 1.0], None) == roots.len(),
        "closed form and Sturm count disagree for ({a3}, {a4}, {a5})"
    );
    profile(roots, kind)
}

fn polish(mut z: f64, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    let mut fz = f(z);
    for _ in 0..8 {
        let d = df(z);
        if d == 0.0 || fz == 0.0 {
            break;
        }
        let cand = z - fz / d;
        let fc = f(cand);
        if fc.abs() >= fz.abs() {
            break;
        }
        z = cand;
        fz = fc;
    }
    z
}

/// Number of distinct real roots of `c[0] + c[1]·z + … ` in `(lo, hi]`, or on
/// the whole line when `interval` is `None`, by a Sturm sequence.
pub fn sturm_root_count(coeffs: &[f64], interval: Option<(f64, f64)>) -> usize {
    let p0 = trim(coeffs.to_vec());
    if p0.len() <= 1 {
        return 0;
    }
    let p1 = trim(derivative(&p0));
    let mut seq = vec![p0, p1];
    let scale = seq[0].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    loop {
        let n = seq.len();
        if seq[n - 1].len() <= 1 {
            break;
        }
        let r = remainder(&seq[n - 2], &seq[n - 1]);
        let r = trim_relative(r.into_iter().map(|c| -c).collect(), scale);
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    let changes = |signs: Vec<f64>| {
        let s: Vec<f64> = signs.into_iter().filter(|v| *v != 0.0).collect();
        s.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    };
    let at = |z: f64| seq.iter().map(|poly| horner(poly, z)).collect::<Vec<_>>();
    let at_inf = |sign: f64| {
        seq.iter()
            .map(|poly| {
                let lead = *poly.last().unwrap();
                let deg = poly.len() - 1;
                if deg % 2 == 1 {
                    lead * sign
                } else {
                    lead
                }
            })
            .collect::<Vec<_>>()
    };
    let (left, right) = match interval {
        Some((lo, hi)) => (at(lo), at(hi)),
        None => (at_inf(-1.0), at_inf(1.0)),
    };
    changes(left).saturating_sub(changes(right))
}

fn trim(mut p: Vec<f64>) -> Vec<f64> {
    while p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

fn trim_relative(mut p: Vec<f64>, scale: f64) -> Vec<f64> {
    while let Some(&c) = p.last() {
        if c.abs() <= 1e-13 * scale {
            p.pop();
        } else {
            break;
        }
    }
    p
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

fn horner(p: &[f64], z: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

fn remainder(num: &[f64], den: &[f64]) -> Vec<f64> {
    let mut r = num.to_vec();
    let dl = den.len();
    let lead = den[dl - 1];
    while r.len() >= dl {
        let k = r.len() - dl;
        let factor = r[r.len() - 1] / lead;
        for (i, d) in den.iter().enumerate() {
            r[k + i] -= factor * d;
        }
        r.pop();
    }
    r
}
