//! Cauchy-Born cell energies, cell fields and the continuum stress.
//!
//! Each cell `Q_j = (y_{j-1}, y_j)` is treated as part of the infinite
//! equidistant chain with spacing `eps y'_j`. Its field `psi^(j)` is a lattice
//! sum and its energy per atom is a geometric series.

use crate::density::{check_separation, Params};
use crate::energy::stress::{integrate_stress, StressFunction};
use crate::error::Result;
use crate::field::{lattice_sum, PeriodicGreenField, ScalarField};
use crate::lattice::{periodic_diff, ChainConfig};

/// `E^cb(s) = (mu^2 eps / 2m) e^{-ms} / (1 - e^{-ms}) + E_self`.
pub fn cb_cell_energy(strain: f64, params: &Params, eps: f64) -> f64 {
    cb_cell_derivatives(strain, params, eps).0
}

/// `(E^cb(s), dE^cb/ds, d^2E^cb/ds^2)`.
pub fn cb_cell_derivatives(strain: f64, params: &Params, eps: f64) -> (f64, f64, f64) {
    debug_assert!(strain > 0.0);
    let m = params.m();
    let mu2 = params.mu() * params.mu();
    let q = (-m * strain).exp();
    let w = 1.0 - q;
    let e = mu2 * eps / (2.0 * m) * q / w + params.e_self(eps);
    let d1 = -0.5 * mu2 * eps * q / (w * w);
    let d2 = 0.5 * mu2 * eps * m * q * (1.0 + q) / (w * w * w);
    (e, d1, d2)
}

/// One cell together with its equidistant extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellState {
    pub j: i64,
    pub y_left: f64,
    pub y_right: f64,
    eps: f64,
    params: Params,
}

impl CellState {
    pub fn new(cfg: &ChainConfig, j: i64, params: &Params) -> Self {
        Self {
            j,
            y_left: cfg.position(j - 1),
            y_right: cfg.position(j),
            eps: cfg.eps(),
            params: *params,
        }
    }

    /// `y'_j`.
    pub fn strain(&self) -> f64 {
        (self.y_right - self.y_left) / self.eps
    }

    pub fn energy(&self) -> f64 {
        cb_cell_energy(self.strain(), &self.params, self.eps)
    }

    /// Atoms `y^(j)_k` of the extension within two spacings of the cell.
    pub fn local_atoms(&self) -> Vec<f64> {
        let d = self.y_right - self.y_left;
        (-2..=3).map(|k| self.y_left + d * k as f64).collect()
    }

    /// `int_{Q_j} sigma^cb dx`.
    pub fn stress_integral(&self) -> f64 {
        let s = StressFunction::new(self, self.local_atoms(), self.eps, &self.params);
        integrate_stress(&s, self.y_left, self.y_right)
    }

    /// `sigma^cb_j(x)`.
    pub fn stress(&self, x: f64) -> f64 {
        cb_stress(self, x)
    }
}

impl ScalarField for CellState {
    fn eval(&self, x: f64) -> (f64, f64) {
        let (v, g) = lattice_sum(x, self.y_right, self.y_right - self.y_left, &self.params, self.eps);
        let c = 0.5 / self.params.m();
        (c * v, c * g)
    }
}

/// `psi^(j)(x)` and its gradient.
pub fn cb_cell_field(cell: &CellState, x: f64) -> (f64, f64) {
    cell.eval(x)
}

/// Continuum stress of a cell, the atomistic stress formula with `psi^(j)`.
pub fn cb_stress(cell: &CellState, x: f64) -> f64 {
    StressFunction::new(cell, cell.local_atoms(), cell.eps, &cell.params).sigma(x)
}

/// `sum_j E^cb(y'_j)`.
pub fn cb_total_energy(cfg: &ChainConfig, params: &Params) -> Result<f64> {
    check_separation(cfg, params.profile())?;
    let eps = cfg.eps();
    Ok(cfg.first_diff().into_iter().map(|s| cb_cell_energy(s, params, eps)).sum())
}

/// `D_{y_j} E^cb = (E'(y'_j) - E'(y'_{j+1})) / eps`.
pub fn cb_forces(cfg: &ChainConfig, params: &Params) -> Result<Vec<f64>> {
    check_separation(cfg, params.profile())?;
    let eps = cfg.eps();
    let d: Vec<f64> = cfg
        .first_diff()
        .into_iter()
        .map(|s| cb_cell_derivatives(s, params, eps).1)
        .collect();
    let p = d.len();
    Ok((0..p).map(|i| (d[i] - d[(i + 1) % p]) / eps).collect())
}

/// Per-cell comparison of `D^2 E^cb_j [u, u]` with its lower bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianBoundReport {
    /// Smallest ratio against `(m mu^2 / 2) e^{-m max y'} eps |u'_j|^2`.
    pub proof_ratio: f64,
    /// Smallest ratio against `(m^2 mu^2 / 2) e^{-m max y'} eps |u'_j|^2`.
    pub statement_ratio: f64,
    /// Ratio for the most strained cell of the nearest-neighbour term alone
    /// to the full series; tends to 1 as the strain grows.
    pub nearest_share: f64,
}

impl HessianBoundReport {
    pub fn proof_bound_holds(&self) -> bool {
        self.proof_ratio >= 1.0
    }

    pub fn statement_bound_holds(&self) -> bool {
        self.statement_ratio >= 1.0
    }
}

/// Checks the per-cell stability bound of the Cauchy-Born energy along `u`.
pub fn cb_hessian_lower_bound_check(
    cfg: &ChainConfig,
    params: &Params,
    u: &[f64],
) -> Result<HessianBoundReport> {
    check_separation(cfg, params.profile())?;
    let eps = cfg.eps();
    let m = params.m();
    let mu2 = params.mu() * params.mu();
    let strains = cfg.first_diff();
    let smax = strains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let du = periodic_diff(u, eps);
    let base = 0.5 * mu2 * (-m * smax).exp() * eps;
    let mut proof_ratio = f64::INFINITY;
    let mut statement_ratio = f64::INFINITY;
    for (s, d) in strains.iter().zip(&du) {
        if *d == 0.0 {
            continue;
        }
        let exact = cb_cell_derivatives(*s, params, eps).2 * d * d;
        proof_ratio = proof_ratio.min(exact / (m * base * d * d));
        statement_ratio = statement_ratio.min(exact / (m * m * base * d * d));
    }
    let q = (-m * smax).exp();
    let nearest_share = q * (1.0 - q).powi(3) / (q * (1.0 + q));
    Ok(HessianBoundReport { proof_ratio, statement_ratio, nearest_share })
}

/// `(mu eps sum_n ||y''||_{l1[j-n, j+n-1]} n e^{-mn min y'}, m * same)`.
pub fn field_convergence_bound(cfg: &ChainConfig, params: &Params, j: i64) -> (f64, f64) {
    let y2 = cfg.second_diff();
    let p = y2.len() as i64;
    let n0 = cfg.n() as i64;
    let abs_at = |k: i64| y2[(k + n0).rem_euclid(p) as usize].abs();
    let m = params.m();
    let smin = cfg.min_strain();
    let mut l1 = 0.0;
    let mut sum = 0.0;
    let ymax = y2.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    for n in 1.. {
        l1 += abs_at(j - n) + abs_at(j + n - 1);
        let decay = (-m * n as f64 * smin).exp();
        sum += l1 * n as f64 * decay;
        // remaining terms are bounded by 2 n' ymax n' e^{-m n' smin}
        let nf = (n + 1) as f64;
        if 2.0 * ymax * nf * nf * (-m * nf * smin).exp() / (1.0 - (-m * smin).exp()).powi(3)
            <= 1e-17 * sum
            || decay == 0.0
        {
            break;
        }
    }
    let v = params.mu() * cfg.eps() * sum;
    (v, m * v)
}

/// Measured `max_{Q_j} |phi - psi^(j)|` and `max_{Q_j} eps |phi' - psi^(j)'|`
/// over `samples + 1` equispaced points.
pub fn field_convergence_measured(
    cfg: &ChainConfig,
    params: &Params,
    field: &PeriodicGreenField,
    j: i64,
    samples: usize,
) -> (f64, f64) {
    let cell = CellState::new(cfg, j, params);
    let eps = cfg.eps();
    (0..=samples).fold((0.0_f64, 0.0_f64), |(a, b), i| {
        let x = cell.y_left + (cell.y_right - cell.y_left) * i as f64 / samples as f64;
        let (p, dp) = field.eval(x);
        let (q, dq) = cell.eval(x);
        (a.max((p - q).abs()), b.max(eps * (dp - dq).abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let params = Params::standard();
        let eps = 0.05;
        let s = 1.3;
        let h = 1e-5;
        let (_, d1, d2) = cb_cell_derivatives(s, &params, eps);
        let e = |t| cb_cell_energy(t, &params, eps);
        let fd1 = (e(s + h) - e(s - h)) / (2.0 * h);
        let fd2 = (cb_cell_derivatives(s + h, &params, eps).1 - cb_cell_derivatives(s - h, &params, eps).1)
            / (2.0 * h);
        assert!((d1 - fd1).abs() < 1e-8 * d1.abs());
        assert!((d2 - fd2).abs() < 1e-8 * d2.abs());
    }
}
