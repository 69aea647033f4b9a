//! Exact fields assembled from the exponential kernel.

use super::{solve_t, BoundaryData, ScalarField, XiCoefficients};
use crate::density::Params;
use crate::lattice::ChainConfig;

/// `sum_{n in Z} int delta_eps(z - y0 - n P) e^{-(m/eps)|x - z|} dz` and its
/// x-derivative.
///
/// Far images are summed as two geometric series; bumps whose support contains
/// `x` are integrated by quadrature.
pub fn lattice_sum(x: f64, y0: f64, period: f64, params: &Params, eps: f64) -> (f64, f64) {
    let alpha = params.alpha(eps);
    let mu = params.mu();
    let r = eps * params.profile().half_width();
    let d = (x - y0).rem_euclid(period);
    let q = (-alpha * period).exp();
    let scale = 1.0 / (1.0 - q);
    let el = (-alpha * d).exp();
    let er = (-alpha * (period - d)).exp();
    let mut v = mu * (el + er) * scale;
    let mut g = mu * alpha * (er - el) * scale;
    if d < r {
        let (b, db) = params.bump_kernel(d, 0.0, eps);
        v += b - mu * el;
        g += db + mu * alpha * el;
    }
    if period - d < r {
        let (b, db) = params.bump_kernel(d - period, 0.0, eps);
        v += b - mu * er;
        g += db - mu * alpha * er;
    }
    (v, g)
}

/// The exact periodic field of a chain configuration.
#[derive(Debug, Clone)]
pub struct PeriodicGreenField {
    atoms: Vec<f64>,
    period: f64,
    eps: f64,
    params: Params,
}

impl PeriodicGreenField {
    pub fn new(cfg: &ChainConfig, params: &Params) -> Self {
        Self {
            atoms: cfg.base_positions(),
            period: cfg.period(),
            eps: cfg.eps(),
            params: *params,
        }
    }
}

impl ScalarField for PeriodicGreenField {
    fn eval(&self, x: f64) -> (f64, f64) {
        let (v, g) = self.atoms.iter().fold((0.0, 0.0), |(v, g), &y| {
            let (a, b) = lattice_sum(x, y, self.period, &self.params, self.eps);
            (v + a, g + b)
        });
        let c = 0.5 / self.params.m();
        (c * v, c * g)
    }
}

/// `(phi(x), phi'(x))` of the exact periodic field.
pub fn eval_green_periodic(cfg: &ChainConfig, params: &Params, x: f64) -> (f64, f64) {
    PeriodicGreenField::new(cfg, params).eval(x)
}

/// The exact Dirichlet field on `(a_L, a_R)` for a finite atom set.
///
/// `phi = (1/2m) sum_k b_k + C_L e^{-(m/eps)(x-a_L)} + C_R e^{-(m/eps)(a_R-x)}`
/// where the first two terms of `C` come from `phi_0` and the rest from `xi`.
#[derive(Debug, Clone)]
pub struct DirichletGreenField {
    atoms: Vec<f64>,
    bd: BoundaryData,
    eps: f64,
    params: Params,
    tau: f64,
    a_l_sum: f64,
    a_r_sum: f64,
    xi: XiCoefficients,
    phi0: XiCoefficients,
}

impl DirichletGreenField {
    pub fn new(atoms: Vec<f64>, bd: BoundaryData, params: &Params, eps: f64) -> Self {
        let m = params.m();
        let alpha = params.alpha(eps);
        let mu = params.mu();
        let tau = bd.tau(m, eps);
        let a_l_sum = mu * atoms.iter().map(|&y| (-alpha * (y - bd.a_l)).exp()).sum::<f64>();
        let a_r_sum = mu * atoms.iter().map(|&y| (-alpha * (bd.a_r - y)).exp()).sum::<f64>();
        let (c_l, c_r) = solve_t(tau, bd.g_l, bd.g_r);
        let (p_l, p_r) = solve_t(tau, a_l_sum, a_r_sum);
        Self {
            atoms,
            bd,
            eps,
            params: *params,
            tau,
            a_l_sum,
            a_r_sum,
            xi: XiCoefficients { c_l, c_r },
            phi0: XiCoefficients { c_l: -p_l / (2.0 * m), c_r: -p_r / (2.0 * m) },
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.bd
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `A_L = mu sum_k e^{-(m/eps)(y_k - a_L)}`, `A_R` likewise.
    pub fn boundary_sums(&self) -> (f64, f64) {
        (self.a_l_sum, self.a_r_sum)
    }

    /// Coefficients of `xi_{a,g}`.
    pub fn xi_coeffs(&self) -> XiCoefficients {
        self.xi
    }

    /// Boundary-layer coefficients of `phi_0`.
    pub fn phi0_coeffs(&self) -> XiCoefficients {
        self.phi0
    }

    /// Total coefficients of `e^{-(m/eps)(x-a_L)}` and `e^{-(m/eps)(a_R-x)}`.
    pub fn total_coeffs(&self) -> XiCoefficients {
        XiCoefficients { c_l: self.phi0.c_l + self.xi.c_l, c_r: self.phi0.c_r + self.xi.c_r }
    }

    /// Evaluates `phi_0` alone.
    pub fn eval_phi0(&self, x: f64) -> (f64, f64) {
        self.eval_with(x, self.phi0)
    }

    fn eval_with(&self, x: f64, c: XiCoefficients) -> (f64, f64) {
        let alpha = self.params.alpha(self.eps);
        let (mut v, mut g) = self.atoms.iter().fold((0.0, 0.0), |(v, g), &y| {
            let (a, b) = self.params.bump_kernel(x, y, self.eps);
            (v + a, g + b)
        });
        let s = 0.5 / self.params.m();
        v *= s;
        g *= s;
        let el = (-alpha * (x - self.bd.a_l)).exp();
        let er = (-alpha * (self.bd.a_r - x)).exp();
        (v + c.c_l * el + c.c_r * er, g + alpha * (c.c_r * er - c.c_l * el))
    }
}

impl ScalarField for DirichletGreenField {
    fn eval(&self, x: f64) -> (f64, f64) {
        self.eval_with(x, self.total_coeffs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_field_matches_boundary_values() {
        let params = Params::standard();
        let eps = 0.05;
        let bd = BoundaryData::new(0.0, 1.0, 0.3, -0.2);
        let f = DirichletGreenField::new(vec![0.3, 0.45, 0.6], bd, &params, eps);
        assert!((f.value(0.0) - 0.3).abs() < 1e-14);
        assert!((f.value(1.0) + 0.2).abs() < 1e-14);
        assert!(f.eval_phi0(0.0).0.abs() < 1e-14);
    }
}
