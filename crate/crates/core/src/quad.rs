//! Gauss-Legendre quadrature.

use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// Integrates `f` over consecutive intervals of the sorted breakpoints,
    /// using `panels` equal sub-panels per interval.
    pub fn integrate_pieces<F: FnMut(f64) -> f64>(
        &self,
        breaks: &[f64],
        panels: usize,
        mut f: F,
    ) -> f64 {
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let dh = (b - a) / panels as f64;
            for p in 0..panels {
                let lo = a + dh * p as f64;
                total += self.integrate(lo, lo + dh, &mut f);
            }
        }
        total
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Shared 20-point rule used for all smooth panel integrals.
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Sorts breakpoints, clips them to [a, b] and removes near-duplicates.
pub fn breakpoints(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = std::iter::once(a)
        .chain(extra.into_iter().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    v.sort_by(f64::total_cmp);
    let tol = 1e-14 * (b - a).abs().max(f64::MIN_POSITIVE);
    v.dedup_by(|x, y| (*x - *y).abs() <= tol);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 20, 33] {
            let s: f64 = GaussLegendre::new(n).weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let r = GaussLegendre::new(6);
        for p in 0..12 {
            let got = r.integrate(0.0, 1.0, |x| x.powi(p));
            assert!((got - 1.0 / (p + 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn exp_integral() {
        let got = gl20().integrate_pieces(&[0.0, 1.0, 3.0], 2, |x| (-x).exp());
        assert!((got - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
    }
}
