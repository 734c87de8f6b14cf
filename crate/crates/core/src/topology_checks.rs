//! Loops in the quotient parameter space and their mod-2 intersection numbers
//! with the subbundles `A0 … A4`.
//!
//! Everything is computed on the cover `S⁴ × S³`. A loop in the quotient is a
//! path whose end is the image of its start under a deck transformation of
//! `ℤ₂ × Q₈`: the `ℤ₂` factor is the antipodal map on `S⁴` alone, and `±i`, `±j`
//! act on `a` through `g1`, `g2` while multiplying `q` on the left.

use crate::family_core::GroupElement;
use crate::quadrature::refine_root;
use nalgebra::{Quaternion, UnitQuaternion};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("loop does not close: endpoint residual {residual:e}")]
    ClosureFailure { residual: f64 },
    #[error("non-transverse zero at s = {s} (|derivative| = {derivative:e})")]
    NonTransverse { s: f64, derivative: f64 },
    #[error("defining function vanishes at the loop start")]
    StartOnBundle,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A point of `S⁴ × S³`; `q` is `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftedState {
    pub a: [f64; 5],
    pub q: [f64; 4],
}

impl LiftedState {
    fn distance(&self, other: &LiftedState) -> f64 {
        let da: f64 = self.a.iter().zip(&other.a).map(|(x, y)| (x - y).powi(2)).sum();
        let dq: f64 = self.q.iter().zip(&other.q).map(|(x, y)| (x - y).powi(2)).sum();
        (da + dq).sqrt()
    }
}

/// `1, i, j, k`; with a sign these give the eight elements of `Q₈`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Q8 {
    One,
    I,
    J,
    K,
}

/// A deck transformation `(±antipode, ±u)` with `u ∈ {1, i, j, k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckElement {
    pub antipodal: bool,
    pub unit: Q8,
    pub negative: bool,
}

impl DeckElement {
    pub fn all() -> impl Iterator<Item = DeckElement> {
        [false, true].into_iter().flat_map(|antipodal| {
            [Q8::One, Q8::I, Q8::J, Q8::K]
                .into_iter()
                .flat_map(move |unit| [false, true].into_iter().map(move |negative| DeckElement { antipodal, unit, negative }))
        })
    }

    /// The element of `D₂` this maps to.
    pub fn group_element(&self) -> GroupElement {
        match self.unit {
            Q8::One => GroupElement::Id,
            Q8::I => GroupElement::G1,
            Q8::J => GroupElement::G2,
            Q8::K => GroupElement::G1G2,
        }
    }

    fn quaternion(&self) -> Quaternion<f64> {
        let s = if self.negative { -1.0 } else { 1.0 };
        match self.unit {
            Q8::One => Quaternion::new(s, 0.0, 0.0, 0.0),
            Q8::I => Quaternion::new(0.0, s, 0.0, 0.0),
            Q8::J => Quaternion::new(0.0, 0.0, s, 0.0),
            Q8::K => Quaternion::new(0.0, 0.0, 0.0, s),
        }
    }

    pub fn apply(&self, x: &LiftedState) -> LiftedState {
        let mut a = self.group_element().act_on_coords(x.a);
        if self.antipodal {
            a = a.map(|v| -v);
        }
        let q = self.quaternion() * Quaternion::new(x.q[0], x.q[1], x.q[2], x.q[3]);
        LiftedState { a, q: [q.w, q.i, q.j, q.k] }
    }
}

/// Where the `S³` part of a loop ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Turn {
    None,
    /// geodesic from 1 to `i`, over `g1`
    I,
    /// geodesic from 1 to `j`, over `g2`
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LoopKind {
    /// `((cos πs, 0, 0, sin πs, 0), 1)` from `(e0, 1)` to `(−e0, 1)`.
    C1,
    /// `(e0, d₂(s))`.
    C2,
    /// `(e0, d₃(s))`.
    C3,
    /// `([1 : ε0 : −ε0 : 0 : 0], d₂(s))`.
    C2Tilde,
    /// `([1 : ε(s) : −ε(s) : 0 : 0], d₃(s))`.
    C3Tilde,
    /// Half great circle `cos(πs) e_from + sin(πs) e_via` over the identity;
    /// homotopic to `c1` inside one fiber.
    FiberHalfCircle { from: usize, via: usize },
    /// `([1 : ε·d1 : ε·d2 : ε·d3 : ε·d4], d(s))` with `ε` constant `ε0` or
    /// decreasing `ε(s)`.
    Perturbed { turn: Turn, direction: [f64; 4], decreasing: bool },
}

impl LoopKind {
    pub fn label(&self) -> String {
        match self {
            LoopKind::C1 => "c1".into(),
            LoopKind::C2 => "c2".into(),
            LoopKind::C3 => "c3".into(),
            LoopKind::C2Tilde => "c2~".into(),
            LoopKind::C3Tilde => "c3~".into(),
            LoopKind::FiberHalfCircle { from, via } => format!("c1[e{from}->e{via}]"),
            LoopKind::Perturbed { turn, direction, decreasing } => {
                let base = match turn {
                    Turn::None => "c1",
                    Turn::I => "c2",
                    Turn::J => "c3",
                };
                let e = if *decreasing { "eps(s)" } else { "eps0" };
                let d: Vec<String> = direction.iter().map(|v| format!("{v}")).collect();
                format!("{base}[1:{e}*({})]", d.join(","))
            }
        }
    }

    fn resolved(&self) -> LoopKind {
        match self {
            LoopKind::C2 => LoopKind::Perturbed { turn: Turn::I, direction: [0.0; 4], decreasing: false },
            LoopKind::C3 => LoopKind::Perturbed { turn: Turn::J, direction: [0.0; 4], decreasing: false },
            LoopKind::C2Tilde => LoopKind::Perturbed { turn: Turn::I, direction: [1.0, -1.0, 0.0, 0.0], decreasing: false },
            LoopKind::C3Tilde => LoopKind::Perturbed { turn: Turn::J, direction: [1.0, -1.0, 0.0, 0.0], decreasing: true },
            other => *other,
        }
    }

    /// The state at `s ∈ [0, 1]`.
    pub fn state(&self, eps0: f64, s: f64) -> LiftedState {
        let one = [1.0, 0.0, 0.0, 0.0];
        match self.resolved() {
            LoopKind::C1 => LiftedState { a: [(PI * s).cos(), 0.0, 0.0, (PI * s).sin(), 0.0], q: one },
            LoopKind::FiberHalfCircle { from, via } => {
                let mut a = [0.0; 5];
                a[from] += (PI * s).cos();
                a[via] += (PI * s).sin();
                LiftedState { a, q: one }
            }
            LoopKind::Perturbed { turn, direction, decreasing } => {
                let eps = if decreasing { eps0 * (1.0 - 2.0 * s) } else { eps0 };
                let raw = [1.0, eps * direction[0], eps * direction[1], eps * direction[2], eps * direction[3]];
                let n = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
                let q = match turn {
                    Turn::None => UnitQuaternion::identity(),
                    Turn::I => UnitQuaternion::from_quaternion(Quaternion::new((0.5 * PI * s).cos(), (0.5 * PI * s).sin(), 0.0, 0.0)),
                    Turn::J => UnitQuaternion::from_quaternion(Quaternion::new((0.5 * PI * s).cos(), 0.0, (0.5 * PI * s).sin(), 0.0)),
                };
                LiftedState { a: raw.map(|v| v / n), q: [q.w, q.i, q.j, q.k] }
            }
            _ => unreachable!("resolved"),
        }
    }
}

/// A sampled lifted loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub kind: LoopKind,
    pub eps0: f64,
    pub n: usize,
    pub points: Vec<LiftedState>,
    pub closure_element: DeckElement,
}

impl LoopSample {
    /// Largest chord between consecutive samples.
    pub fn max_chord(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).fold(0.0, f64::max)
    }
}

pub fn build_loop(kind: LoopKind, eps0: f64, n: usize) -> Result<LoopSample, TopologyError> {
    if n < 64 {
        return Err(TopologyError::InvalidInput(format!("n = {n} must be at least 64")));
    }
    if !(eps0 > 0.0 && eps0 <= 0.1) {
        return Err(TopologyError::InvalidInput(format!("eps0 = {eps0} is not in (0, 0.1]")));
    }
    if let LoopKind::FiberHalfCircle { from, via } = kind {
        if from >= 5 || via >= 5 || from == via {
            return Err(TopologyError::InvalidInput(format!("bad fiber axes ({from}, {via})")));
        }
    }
    let points: Vec<LiftedState> = (0..=n).map(|k| kind.state(eps0, k as f64 / n as f64)).collect();
    let (start, end) = (points[0], points[n]);
    let (closure_element, residual) = DeckElement::all()
        .map(|g| (g, g.apply(&start).distance(&end)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    if residual > 1e-8 {
        return Err(TopologyError::ClosureFailure { residual });
    }
    Ok(LoopSample { kind, eps0, n, points, closure_element })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BundleTag {
    A0,
    A1,
    A2,
    A3,
    A4,
}

impl BundleTag {
    pub const ALL: [BundleTag; 5] = [BundleTag::A0, BundleTag::A1, BundleTag::A2, BundleTag::A3, BundleTag::A4];
}

impl fmt::Display for BundleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A subbundle given by the zero set of a linear function of `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundleSpec {
    pub tag: BundleTag,
    pub coeffs: [f64; 5],
}

impl BundleSpec {
    pub fn new(tag: BundleTag) -> Self {
        let coeffs = match tag {
            BundleTag::A0 => [1.0, 0.0, 0.0, 0.0, 0.0],
            BundleTag::A1 => [0.0, 1.0, -1.0, 0.0, 0.0],
            BundleTag::A2 => [0.0, 1.0, 1.0, 0.0, 0.0],
            BundleTag::A3 => [0.0, 0.0, 0.0, 1.0, 0.0],
            BundleTag::A4 => [0.0, 0.0, 0.0, 0.0, 1.0],
        };
        Self { tag, coeffs }
    }

    pub fn eval(&self, x: &LiftedState) -> f64 {
        self.coeffs.iter().zip(&x.a).map(|(c, a)| c * a).sum()
    }
}

/// Number of zeros of the defining function along the loop, mod 2.
pub fn intersection_parity(lp: &LoopSample, bundle: &BundleSpec) -> Result<u8, TopologyError> {
    zero_parity(|s| bundle.eval(&lp.kind.state(lp.eps0, s)), lp.n)
}

/// Zeros of `f` on `(0, 1]` mod 2, from `n + 1` samples refined near zeros.
pub fn zero_parity(f: impl Fn(f64) -> f64, n: usize) -> Result<u8, TopologyError> {
    let f = &f;
    let vals: Vec<f64> = (0..=n).map(|k| f(k as f64 / n as f64)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if vals[0].abs() <= 1e-12 * scale.max(1.0) {
        return Err(TopologyError::StartOnBundle);
    }
    let h = 1e-6;
    let transverse = |s: f64| {
        let d = (f((s + h).min(1.0)) - f((s - h).max(0.0))) / ((s + h).min(1.0) - (s - h).max(0.0));
        if d.abs() < 1e-8 {
            Err(TopologyError::NonTransverse { s, derivative: d.abs() })
        } else {
            Ok(())
        }
    };
    let mut zeros = 0usize;
    let mut last = (0.0, vals[0]);
    let mut pending_zero = false;
    for k in 1..=n {
        let s = k as f64 / n as f64;
        let v = vals[k];
        if v == 0.0 {
            transverse(s)?;
            zeros += 1;
            pending_zero = true;
            continue;
        }
        if pending_zero {
            // the zero sample must separate opposite signs
            if v.signum() == last.1.signum() {
                return Err(TopologyError::NonTransverse { s, derivative: 0.0 });
            }
            pending_zero = false;
        } else if v.signum() != last.1.signum() {
            let root = refine_root(last.0, s, last.1, v, f, 1e-12);
            transverse(root)?;
            zeros += 1;
        } else if k < n && vals[k + 1].signum() == v.signum() && v.abs() < vals[k - 1].abs() && v.abs() <= vals[k + 1].abs() {
            // a dip may hide a pair of zeros or a double zero: resolve it to 1e−6
            let g = |t: f64| v.signum() * f(t);
            let (s0, s1) = ((k - 1) as f64 / n as f64, (k + 1) as f64 / n as f64);
            let (mut lo, mut hi) = (s0, s1);
            while hi - lo > 1e-6 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if g(m1) < g(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let m = 0.5 * (lo + hi);
            let gm = g(m);
            if gm < 0.0 {
                for (x0, x1) in [(s0, m), (m, s1)] {
                    let root = refine_root(x0, x1, f(x0), f(x1), f, 1e-12);
                    transverse(root)?;
                }
                zeros += 2;
            } else if gm < 1e-12 * scale + {
                // what a touching zero within 1e−6 of m would leave behind
                let d = 1e-3;
                ((g(m + d) + g(m - d) - 2.0 * gm) / (d * d)).abs() * 1e-12
            } {
                return Err(TopologyError::NonTransverse { s: m, derivative: 0.0 });
            }
        }
        last = (s, v);
    }
    Ok((zeros % 2) as u8)
}

/// The loop used for each cell: the loop itself where the bundle's function
/// is not identically zero on it, otherwise a homotopic variant that meets
/// it transversally.
pub fn loop_for(tag: BundleTag, column: usize) -> LoopKind {
    use BundleTag::*;
    let (i, j) = (Turn::I, Turn::J);
    let pert = |turn, direction, decreasing| LoopKind::Perturbed { turn, direction, decreasing };
    match (tag, column) {
        (A0, 0) => LoopKind::C1,
        (A1 | A2, 0) => LoopKind::FiberHalfCircle { from: 1, via: 4 },
        (A3, 0) => LoopKind::FiberHalfCircle { from: 3, via: 4 },
        (A4, 0) => LoopKind::FiberHalfCircle { from: 4, via: 3 },
        (A0, 1) => LoopKind::C2,
        (A0, _) => LoopKind::C3,
        (A1, 1) => LoopKind::C2Tilde,
        (A1, _) => LoopKind::C3Tilde,
        (A2, 1) => pert(i, [1.0, 1.0, 0.0, 0.0], true),
        (A2, _) => pert(j, [1.0, 1.0, 0.0, 0.0], false),
        (A3, 1) => pert(i, [0.0, 0.0, 1.0, 0.0], false),
        (A3, _) => pert(j, [0.0, 0.0, 1.0, 0.0], false),
        (A4, 1) => pert(i, [0.0, 0.0, 0.0, 1.0], true),
        (A4, _) => pert(j, [0.0, 0.0, 0.0, 1.0], true),
    }
}

/// Parities stated for `c1, c2, c3`: `A1 = A0 + X|b3`, `A2 = A0 + X|b2`,
/// `A3 = A0`, `A4 = A0 + X|b`, with `A0` dual to `c1`.
pub fn expected_parities(tag: BundleTag) -> [u8; 3] {
    match tag {
        BundleTag::A0 | BundleTag::A3 => [1, 0, 0],
        BundleTag::A1 => [1, 0, 1],
        BundleTag::A2 => [1, 1, 0],
        BundleTag::A4 => [1, 1, 1],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityCell {
    pub loop_label: String,
    pub parity: u8,
    pub expected: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityRow {
    pub bundle: BundleTag,
    pub cells: Vec<ParityCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityTable {
    pub eps0: f64,
    pub n: usize,
    pub rows: Vec<ParityRow>,
}

impl ParityTable {
    pub fn matches_expected(&self) -> bool {
        self.rows.iter().all(|r| r.cells.iter().all(|c| c.parity == c.expected))
    }

    pub fn parities(&self) -> Vec<[u8; 3]> {
        self.rows.iter().map(|r| [r.cells[0].parity, r.cells[1].parity, r.cells[2].parity]).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("intersection parities (eps0 = {}, n = {})\n", self.eps0, self.n);
        let _ = writeln!(out, "{:<6}{:>6}{:>6}{:>6}   expected", "", "c1", "c2", "c3");
        for r in &self.rows {
            let got: Vec<String> = r.cells.iter().map(|c| format!("{:>6}", c.parity)).collect();
            let exp: Vec<String> = r.cells.iter().map(|c| c.expected.to_string()).collect();
            let mark = if r.cells.iter().all(|c| c.parity == c.expected) { "ok" } else { "MISMATCH" };
            let _ = writeln!(out, "{:<6}{}   {}  {mark}", r.bundle, got.concat(), exp.join(" "));
        }
        out
    }
}

/// All five bundles against `c1, c2, c3`, rows in parallel.
pub fn parity_table(eps0: f64, n: usize) -> Result<ParityTable, TopologyError> {
    let rows = BundleTag::ALL
        .par_iter()
        .map(|&tag| {
            let expected = expected_parities(tag);
            let cells = (0..3)
                .map(|col| {
                    let kind = loop_for(tag, col);
                    let lp = build_loop(kind, eps0, n)?;
                    let parity = intersection_parity(&lp, &BundleSpec::new(tag))?;
                    Ok(ParityCell { loop_label: kind.label(), parity, expected: expected[col] })
                })
                .collect::<Result<Vec<_>, TopologyError>>()?;
            Ok(ParityRow { bundle: tag, cells })
        })
        .collect::<Result<Vec<_>, TopologyError>>()?;
    Ok(ParityTable { eps0, n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn named_loops_close() {
        let c1 = build_loop(LoopKind::C1, 0.05, 64).unwrap();
        assert_eq!(c1.closure_element, DeckElement { antipodal: true, unit: Q8::One, negative: false });
        let c2 = build_loop(LoopKind::C2Tilde, 0.05, 64).unwrap();
        assert_eq!(c2.closure_element.group_element(), GroupElement::G1);
        let c3 = build_loop(LoopKind::C3Tilde, 0.05, 64).unwrap();
        assert_eq!(c3.closure_element.group_element(), GroupElement::G2);
    }

    #[test]
    fn open_path_is_rejected() {
        // ε decreasing over the g1 turn with direction (1, −1) does not close
        let kind = LoopKind::Perturbed { turn: Turn::I, direction: [1.0, -1.0, 0.0, 0.0], decreasing: true };
        assert!(matches!(build_loop(kind, 0.05, 64), Err(TopologyError::ClosureFailure { .. })));
        assert!(matches!(build_loop(LoopKind::C1, 0.05, 10), Err(TopologyError::InvalidInput(_))));
        assert!(matches!(build_loop(LoopKind::C1, 0.2, 64), Err(TopologyError::InvalidInput(_))));
    }

    #[test]
    fn stated_parities() {
        let p = |kind, tag| intersection_parity(&build_loop(kind, 0.05, 128).unwrap(), &BundleSpec::new(tag)).unwrap();
        assert_eq!(p(LoopKind::C1, BundleTag::A0), 1);
        assert_eq!(p(LoopKind::C2Tilde, BundleTag::A1), 0);
        assert_eq!(p(LoopKind::C3Tilde, BundleTag::A1), 1);
    }

    #[test]
    fn table_matches_and_is_stable() {
        let base = parity_table(0.05, 128).unwrap();
        assert!(base.matches_expected(), "{}", base.to_text());
        assert_eq!(base.parities()[3], base.parities()[0]);
        for (eps0, n) in [(0.05, 256), (0.025, 128), (0.0125, 512), (0.1, 64)] {
            assert_eq!(parity_table(eps0, n).unwrap().parities(), base.parities());
        }
        let json = serde_json::to_string(&base).unwrap();
        let back: ParityTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, base);
    }

    #[test]
    fn zero_on_a_sample_is_counted_once() {
        // n even puts ε(s) = 0 exactly on a sample
        let lp = build_loop(LoopKind::C3Tilde, 0.05, 64).unwrap();
        assert_eq!(lp.points[32].a[1], 0.0);
        assert_eq!(intersection_parity(&lp, &BundleSpec::new(BundleTag::A1)).unwrap(), 1);
    }

    #[test]
    fn tangential_zero_is_reported() {
        // double zero on a sample and between samples
        for n in [128, 129] {
            let r = zero_parity(|s| (s - 0.5).powi(2), n);
            assert!(matches!(r, Err(TopologyError::NonTransverse { .. })), "{n}: {r:?}");
        }
        assert_eq!(zero_parity(|s| s - 0.3, 64), Ok(1));
        assert_eq!(zero_parity(|s| (s - 0.3) * (s - 0.6), 64), Ok(0));
        let lp = build_loop(LoopKind::FiberHalfCircle { from: 0, via: 3 }, 0.05, 128).unwrap();
        let flat = BundleSpec { tag: BundleTag::A4, coeffs: [0.0, 0.0, 0.0, 0.0, 1.0] };
        assert_eq!(intersection_parity(&lp, &flat), Err(TopologyError::StartOnBundle));
    }

    #[test]
    fn bundles_are_equivariant_up_to_sign() {
        let x = LiftedState { a: [0.3, -0.5, 0.2, 0.7, -0.1], q: [1.0, 0.0, 0.0, 0.0] };
        for tag in BundleTag::ALL {
            let b = BundleSpec::new(tag);
            for g in DeckElement::all() {
                assert!((b.eval(&g.apply(&x)).abs() - b.eval(&x).abs()).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn loops_close_and_are_continuous(eps0 in 1e-3f64..=0.1, n in 64usize..600, tag in 0usize..5, col in 0usize..3) {
            let lp = build_loop(loop_for(BundleTag::ALL[tag], col), eps0, n).unwrap();
            prop_assert!(lp.max_chord() <= 10.0 / n as f64);
            prop_assert!(lp.closure_element.apply(&lp.points[0]).distance(&lp.points[n]) < 1e-8);
        }

        #[test]
        fn c1_a0_parity_survives_small_perturbations(delta in -1e-3f64..1e-3) {
            let lp = build_loop(LoopKind::C1, 0.05, 128).unwrap();
            let b = BundleSpec { tag: BundleTag::A0, coeffs: [1.0, 0.0, 0.0, delta, 0.0] };
            prop_assert_eq!(intersection_parity(&lp, &b).unwrap(), 1);
        }
    }
}
