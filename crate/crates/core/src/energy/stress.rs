//! Stress functions and weak forms.

use crate::density::{check_separation, Params};
use crate::error::Result;
use crate::field::{PeriodicGreenField, ScalarField};
use crate::lattice::ChainConfig;
use crate::quad::{breakpoints, gl20};

/// `sigma = 1/2 eps^2 phi'^2 - 1/2 m^2 phi^2 + rho phi + eps sum_j phi grad delta_eps(x-y_j)(x-y_j)`.
#[derive(Debug, Clone)]
pub struct StressFunction<'a, F: ScalarField> {
    field: &'a F,
    atoms: Vec<f64>,
    eps: f64,
    params: Params,
}

impl<'a, F: ScalarField> StressFunction<'a, F> {
    /// `atoms` must be sorted and cover every bump that reaches the region of interest.
    pub fn new(field: &'a F, mut atoms: Vec<f64>, eps: f64, params: &Params) -> Self {
        atoms.sort_by(f64::total_cmp);
        Self { field, atoms, eps, params: *params }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn field(&self) -> &F {
        self.field
    }

    fn near(&self, x: f64) -> impl Iterator<Item = f64> + '_ {
        let r = self.eps * self.params.profile().half_width();
        let lo = self.atoms.partition_point(|&y| y <= x - r);
        self.atoms[lo..].iter().copied().take_while(move |&y| y < x + r)
    }

    fn rho_terms(&self, x: f64) -> (f64, f64) {
        let p = self.params.profile();
        let eps = self.eps;
        self.near(x).fold((0.0, 0.0), |(r, s), y| {
            (r + eps * p.delta_eps(x - y, eps), s + eps * p.grad_delta_eps(x - y, eps) * (x - y))
        })
    }

    pub fn sigma1(&self, x: f64) -> f64 {
        let (phi, dphi) = self.field.eval(x);
        let m = self.params.m();
        let (rho, _) = self.rho_terms(x);
        0.5 * self.eps * self.eps * dphi * dphi - 0.5 * m * m * phi * phi + rho * phi
    }

    pub fn sigma2(&self, x: f64) -> f64 {
        let (_, s) = self.rho_terms(x);
        self.field.value(x) * s
    }

    pub fn sigma(&self, x: f64) -> f64 {
        let (phi, dphi) = self.field.eval(x);
        let m = self.params.m();
        let (rho, s) = self.rho_terms(x);
        0.5 * self.eps * self.eps * dphi * dphi - 0.5 * m * m * phi * phi + rho * phi + phi * s
    }

    /// Points in `(a, b)` where the integrand loses smoothness.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let r = self.eps * self.params.profile().half_width();
        let lo = self.atoms.partition_point(|&y| y <= a - r);
        let hi = self.atoms.partition_point(|&y| y < b + r);
        let extra = self.atoms[lo..hi]
            .iter()
            .flat_map(|&y| [y - r, y, y + r])
            .chain(self.field.kinks(a, b));
        breakpoints(a, b, extra)
    }
}

/// `int_a^b sigma dx` with panels split at bump edges, atoms and field kinks.
pub fn integrate_stress<F: ScalarField>(stress: &StressFunction<'_, F>, a: f64, b: f64) -> f64 {
    let pts = stress.breakpoints(a, b);
    gl20().integrate_pieces(&pts, 2, |x| stress.sigma(x))
}

/// `int sigma grad u` over one period for the piecewise-linear interpolant of `u`.
pub fn weak_form_periodic(cfg: &ChainConfig, params: &Params, u: &[f64]) -> Result<f64> {
    check_separation(cfg, params.profile())?;
    let n = cfg.n() as i64;
    let field = PeriodicGreenField::new(cfg, params);
    let stress = StressFunction::new(&field, cfg.positions(-n - 2, n + 1), cfg.eps(), params);
    let p = cfg.size();
    Ok(cfg
        .indices()
        .enumerate()
        .map(|(i, j)| {
            let (a, b) = (cfg.position(j - 1), cfg.position(j));
            let du = u[i] - u[(i + p - 1) % p];
            du / (b - a) * integrate_stress(&stress, a, b)
        })
        .sum())
}
