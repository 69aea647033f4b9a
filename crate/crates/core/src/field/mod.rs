//! Screened Poisson fields `-eps^2 phi'' + m^2 phi = rho`.
//!
//! [`green`] holds exact lattice-sum and Dirichlet fields built from the
//! exponential kernel; [`fem`] holds the P1 finite-element solvers.

pub mod fem;
pub mod green;

pub use fem::{solve_dirichlet, solve_periodic, Field, FemOptions, Source};
pub use green::{eval_green_periodic, lattice_sum, DirichletGreenField, PeriodicGreenField};

use crate::density::Params;

/// A field that can be evaluated pointwise.
pub trait ScalarField {
    /// `(phi(x), phi'(x))`.
    fn eval(&self, x: f64) -> (f64, f64);

    fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    fn gradient(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    /// Points in `(a, b)` where the gradient may jump.
    fn kinks(&self, _a: f64, _b: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Interval `[a_L, a_R]` and Dirichlet values `g = (g_L, g_R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub a_l: f64,
    pub a_r: f64,
    pub g_l: f64,
    pub g_r: f64,
}

impl BoundaryData {
    pub fn new(a_l: f64, a_r: f64, g_l: f64, g_r: f64) -> Self {
        debug_assert!(a_r > a_l);
        Self { a_l, a_r, g_l, g_r }
    }

    pub fn with_g(self, g_l: f64, g_r: f64) -> Self {
        Self { g_l, g_r, ..self }
    }

    pub fn delta_a(&self) -> f64 {
        self.a_r - self.a_l
    }

    /// `tau = exp(-(m/eps) Delta a)`.
    pub fn tau(&self, m: f64, eps: f64) -> f64 {
        (-(m / eps) * self.delta_a()).exp()
    }

    /// Distance to the nearer end of the interval.
    pub fn dist(&self, x: f64) -> f64 {
        (x - self.a_l).min(self.a_r - x)
    }
}

/// Coefficients of the boundary layer `xi = c_L e^{-(m/eps)(x-a_L)} + c_R e^{-(m/eps)(a_R-x)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiCoefficients {
    pub c_l: f64,
    pub c_r: f64,
}

/// Solves `[[1, tau], [tau, 1]] c = v`.
pub fn solve_t(tau: f64, v_l: f64, v_r: f64) -> (f64, f64) {
    let det = 1.0 - tau * tau;
    ((v_l - tau * v_r) / det, (v_r - tau * v_l) / det)
}

/// The exact boundary layer for given boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Xi {
    pub bd: BoundaryData,
    pub coeffs: XiCoefficients,
    alpha: f64,
}

impl ScalarField for Xi {
    fn eval(&self, x: f64) -> (f64, f64) {
        let el = (-self.alpha * (x - self.bd.a_l)).exp();
        let er = (-self.alpha * (self.bd.a_r - x)).exp();
        let XiCoefficients { c_l, c_r } = self.coeffs;
        (c_l * el + c_r * er, self.alpha * (c_r * er - c_l * el))
    }
}

/// `c = T_a^{-1} g` and the evaluable `xi_{a,g}`.
pub fn xi_closed_form(bd: &BoundaryData, m: f64, eps: f64) -> (XiCoefficients, Xi) {
    let tau = bd.tau(m, eps);
    let (c_l, c_r) = solve_t(tau, bd.g_l, bd.g_r);
    let coeffs = XiCoefficients { c_l, c_r };
    (coeffs, Xi { bd: *bd, coeffs, alpha: m / eps })
}

/// Free-space kernel `G_eps(x) = e^{-(m/eps)|x|} / (2 eps m)`.
pub fn eval_green_free(m: f64, eps: f64, x: f64) -> f64 {
    (-(m / eps) * x.abs()).exp() / (2.0 * eps * m)
}

/// Green's function of `-eps^2 d^2 + m^2` on `(a_L, a_R)` with zero boundary values.
pub fn green_dirichlet(bd: &BoundaryData, m: f64, eps: f64, x: f64, z: f64) -> f64 {
    let al = m / eps;
    let tau = bd.tau(m, eps);
    let da = bd.delta_a();
    let e = |t: f64| (-al * t).exp();
    let refl_l = e(x + z - 2.0 * bd.a_l);
    let refl_r = e(2.0 * bd.a_r - x - z);
    let g1 = e((x - z).abs()) - refl_l - refl_r;
    let g2 = -(tau * refl_l + tau * refl_r - e(x - z + da) - e(z - x + da)) / (1.0 - tau * tau);
    (g1 + tau * g2) / (2.0 * m * eps)
}

/// Outcome of comparing two Dirichlet fields against the Lipschitz bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    /// Largest `|phi_1 - phi_2| / bound` over the samples.
    pub value_ratio: f64,
    /// Largest `eps |phi_1' - phi_2'| / bound` over the samples.
    pub gradient_ratio: f64,
    pub samples: usize,
}

impl LipschitzReport {
    pub fn holds(&self) -> bool {
        self.value_ratio <= 1.0 + 1e-12 && self.gradient_ratio <= 1.0 + 1e-12
    }
}

/// Samples `x` in `(a_L, a_R)` and compares the exact fields for boundary data
/// `g1` and `g2` with `sqrt(2) |T^{-1}(g1 - g2)| e^{-(m/eps) d_a(x)}` (times
/// `m` for the gradient).
pub fn field_lipschitz_check(
    atoms: &[f64],
    bd1: &BoundaryData,
    bd2: &BoundaryData,
    params: &Params,
    eps: f64,
    samples: usize,
) -> LipschitzReport {
    let m = params.m();
    let f1 = DirichletGreenField::new(atoms.to_vec(), *bd1, params, eps);
    let f2 = DirichletGreenField::new(atoms.to_vec(), *bd2, params, eps);
    let tau = bd1.tau(m, eps);
    let (dl, dr) = solve_t(tau, bd1.g_l - bd2.g_l, bd1.g_r - bd2.g_r);
    let amp = std::f64::consts::SQRT_2 * dl.hypot(dr);
    let mut value_ratio: f64 = 0.0;
    let mut gradient_ratio: f64 = 0.0;
    for i in 0..=samples {
        let x = bd1.a_l + bd1.delta_a() * i as f64 / samples as f64;
        let decay = (-(m / eps) * bd1.dist(x)).exp();
        let (v1, d1) = f1.eval(x);
        let (v2, d2) = f2.eval(x);
        let ratio = |diff: f64, bound: f64| {
            if diff == 0.0 {
                0.0
            } else {
                diff / bound
            }
        };
        value_ratio = value_ratio.max(ratio((v1 - v2).abs(), amp * decay));
        gradient_ratio = gradient_ratio.max(ratio(eps * (d1 - d2).abs(), m * amp * decay));
    }
    LipschitzReport { value_ratio, gradient_ratio, samples: samples + 1 }
}
