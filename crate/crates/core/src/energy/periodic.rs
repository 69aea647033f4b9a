//! Periodic chain energy and forces.

use super::PAIR_CUTOFF;
use crate::density::{check_separation, Params};
use crate::error::Result;
use crate::field::{fem, FemOptions, ScalarField, Source};
use crate::lattice::ChainConfig;
use crate::quad::{breakpoints, gl20};

/// Positions of the periodic extension with a cheap index map.
struct Extended {
    base: Vec<f64>,
    n: i64,
    p: i64,
    period: f64,
}

impl Extended {
    fn new(cfg: &ChainConfig) -> Self {
        Self {
            base: cfg.base_positions(),
            n: cfg.n() as i64,
            p: cfg.size() as i64,
            period: cfg.period(),
        }
    }

    fn y(&self, k: i64) -> f64 {
        let s = k + self.n;
        let q = s.div_euclid(self.p);
        self.base[s.rem_euclid(self.p) as usize] + q as f64 * self.period
    }
}

/// `E(y) = 1/2 int rho phi` evaluated through exponential pair sums.
pub fn energy_periodic(cfg: &ChainConfig, params: &Params) -> Result<f64> {
    check_separation(cfg, params.profile())?;
    let eps = cfg.eps();
    let alpha = params.alpha(eps);
    let ext = Extended::new(cfg);
    let mut pairs = 0.0;
    for j in cfg.indices() {
        let yj = ext.y(j);
        let mut k = j + 1;
        loop {
            let t = alpha * (ext.y(k) - yj);
            if t > PAIR_CUTOFF {
                break;
            }
            pairs += (-t).exp();
            k += 1;
        }
    }
    let mu = params.mu();
    let m = params.m();
    Ok(cfg.size() as f64 * params.e_self(eps) + eps * mu * mu * pairs / (2.0 * m))
}

/// `D_y E(y)` for `j = -N..=N`, skipping interactions of an atom with its own images.
pub fn forces_periodic(cfg: &ChainConfig, params: &Params) -> Result<Vec<f64>> {
    check_separation(cfg, params.profile())?;
    let alpha = params.alpha(cfg.eps());
    let ext = Extended::new(cfg);
    let p = ext.p;
    let c = 0.5 * params.mu() * params.mu();
    Ok(cfg
        .indices()
        .map(|j| {
            let yj = ext.y(j);
            let mut s = 0.0;
            let mut k = j + 1;
            loop {
                let t = alpha * (ext.y(k) - yj);
                if t > PAIR_CUTOFF {
                    break;
                }
                if (k - j) % p != 0 {
                    s += (-t).exp();
                }
                k += 1;
            }
            let mut k = j - 1;
            loop {
                let t = alpha * (yj - ext.y(k));
                if t > PAIR_CUTOFF {
                    break;
                }
                if (j - k) % p != 0 {
                    s -= (-t).exp();
                }
                k -= 1;
            }
            c * s
        })
        .collect())
}

/// `1/2 int rho phi` for an arbitrary field, by quadrature over each bump.
pub fn energy_from_field<F: ScalarField>(cfg: &ChainConfig, params: &Params, field: &F) -> f64 {
    let eps = cfg.eps();
    let profile = params.profile();
    let r = eps * profile.half_width();
    cfg.base_positions()
        .into_iter()
        .map(|y| {
            let pts = breakpoints(y - r, y + r, field.kinks(y - r, y + r).into_iter().chain([y]));
            0.5 * eps * gl20().integrate_pieces(&pts, 1, |x| profile.delta_eps(x - y, eps) * field.value(x))
        })
        .sum()
}

/// `-eps int grad delta_eps(x - y_j) phi(x) dx` for every atom.
///
/// The integral runs over the whole support, so for `j = N` the part of the
/// bump that wraps to the image of `y_{-N-1}` is included.
pub fn forces_from_field<F: ScalarField>(cfg: &ChainConfig, params: &Params, field: &F) -> Vec<f64> {
    let eps = cfg.eps();
    let profile = params.profile();
    let r = eps * profile.half_width();
    cfg.base_positions()
        .into_iter()
        .map(|y| {
            let pts = breakpoints(y - r, y + r, field.kinks(y - r, y + r).into_iter().chain([y]));
            -eps * gl20()
                .integrate_pieces(&pts, 1, |x| profile.grad_delta_eps(x - y, eps) * field.value(x))
        })
        .collect()
}

/// Energy `-I(phi_h) = 1/2 b . phi_h` of the finite-element field.
pub fn energy_periodic_fem(cfg: &ChainConfig, params: &Params, opts: &FemOptions) -> Result<f64> {
    check_separation(cfg, params.profile())?;
    let atoms = cfg.base_positions();
    let field = fem::solve_periodic(cfg, params, Source::Atoms(&atoms), opts)?;
    Ok(-field.functional())
}

/// Forces from the finite-element field.
pub fn forces_periodic_fem(
    cfg: &ChainConfig,
    params: &Params,
    opts: &FemOptions,
) -> Result<Vec<f64>> {
    check_separation(cfg, params.profile())?;
    let atoms = cfg.base_positions();
    let field = fem::solve_periodic(cfg, params, Source::Atoms(&atoms), opts)?;
    Ok(forces_from_field(cfg, params, &field))
}
