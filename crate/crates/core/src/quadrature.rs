//! Fixed-node quadrature rules on `[a, b]`.
//!
//! The node sets never adapt to the integrand, so an integral evaluated for a
//! smoothly varying parameter is itself smooth in that parameter. Finite
//! differences of such integrals rely on this.

use gauss_quad::GaussLegendre;

#[derive(Debug, Clone)]
pub struct GaussRule {
    /// Nodes on `[−1, 1]` with weights.
    pairs: Vec<(f64, f64)>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(n.max(2)).expect("degree >= 2");
        let mut pairs = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Tanh-sinh (double exponential) rule. Handles integrable endpoint
/// singularities such as logarithms, square roots and cube roots.
#[derive(Debug, Clone)]
pub struct TanhSinhRule {
    /// `(δ, w)` where the node sits at distance `δ·(b − a)/2` from an endpoint;
    /// the sign of the entry's first field selects the endpoint.
    nodes: Vec<(f64, f64, bool)>,
}

impl TanhSinhRule {
    /// `n` nodes per half line, truncated at `t = 3.2` (endpoint distance ~1e−17).
    pub fn new(n: usize) -> Self {
        let t_max: f64 = 3.2;
        let n = n.max(2);
        let h = t_max / n as f64;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut nodes = Vec::with_capacity(2 * n + 1);
        for k in 0..=n {
            let t = k as f64 * h;
            let u = half_pi * t.sinh();
            // distance of tanh(u) from 1, computed without cancellation
            let e = (-2.0 * u).exp();
            let delta = 2.0 * e / (1.0 + e);
            let w = h * half_pi * t.cosh() / u.cosh().powi(2);
            if k == 0 {
                nodes.push((1.0, w, true));
            } else {
                nodes.push((delta, w, true));
                nodes.push((delta, w, false));
            }
        }
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        self.nodes.iter().map(move |&(delta, w, upper)| {
            let x = if upper { b - half * delta } else { a + half * delta };
            (x, half * w)
        })
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Bracketed root refinement by bisection with a secant guess (Illinois).
pub fn refine_root(mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(fa * fb < 0.0);
    let mut side = 0i32;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
            b = c;
            fb = fc;
            side = 0;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_for_polynomials() {
        let g = GaussRule::new(5);
        let v = g.integrate(-1.0, 2.0, |x| x.powi(9) - 3.0 * x.powi(4));
        let exact = (2f64.powi(10) - 1.0) / 10.0 - 3.0 * (2f64.powi(5) + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        let r = TanhSinhRule::new(40);
        let log = r.integrate(0.0, 1.0, |x| x.ln());
        assert!((log + 1.0).abs() < 1e-12, "{log}");
        let cbrt = r.integrate(0.0, 1.0, |x| 1.0 / x.cbrt());
        assert!((cbrt - 1.5).abs() < 1e-9, "{cbrt}");
        let smooth = r.integrate(-1.0, 3.0, |x| x.exp());
        assert!((smooth - (3f64.exp() - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn root_refinement() {
        let f = |x: f64| x * x * x - 2.0;
        let r = refine_root(0.0, 2.0, f(0.0), f(2.0), f, 1e-15);
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }
}
