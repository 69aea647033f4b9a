//! Regularised atomic densities and their exponential moments.

use crate::error::{Error, Result};
use crate::lattice::ChainConfig;
use crate::quad::{gl20, GaussLegendre};

/// Polynomial shape of the unit-mass bump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpShape {
    /// `C (1 - t^2)^2`, C^1 at the support edge.
    Quartic,
    /// `C (1 - t^2)^3`, C^2 at the support edge.
    Sextic,
}

/// The reference bump `delta_1` supported on `[-sigma0/2, sigma0/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    shape: BumpShape,
    sigma0: f64,
    norm: f64,
}

impl BumpProfile {
    pub fn new(shape: BumpShape, sigma0: f64) -> Result<Self> {
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::Param(format!("sigma0 must be positive, got {sigma0}")));
        }
        let h = 0.5 * sigma0;
        // integral of (1-t^2)^k over [-1, 1]
        let mass = match shape {
            BumpShape::Quartic => 16.0 / 15.0,
            BumpShape::Sextic => 32.0 / 35.0,
        };
        Ok(Self { shape, sigma0, norm: 1.0 / (h * mass) })
    }

    pub fn quartic(sigma0: f64) -> Result<Self> {
        Self::new(BumpShape::Quartic, sigma0)
    }

    pub fn shape(&self) -> BumpShape {
        self.shape
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Normalisation constant `C`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.sigma0
    }

    pub fn delta1(&self, x: f64) -> f64 {
        let t = x / self.half_width();
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - t * t;
        self.norm
            * match self.shape {
                BumpShape::Quartic => w * w,
                BumpShape::Sextic => w * w * w,
            }
    }

    pub fn grad_delta1(&self, x: f64) -> f64 {
        let h = self.half_width();
        let t = x / h;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - t * t;
        let dw = -2.0 * t / h;
        self.norm
            * match self.shape {
                BumpShape::Quartic => 2.0 * w * dw,
                BumpShape::Sextic => 3.0 * w * w * dw,
            }
    }

    /// `delta_eps(x) = delta_1(x / eps) / eps`.
    pub fn delta_eps(&self, x: f64, eps: f64) -> f64 {
        self.delta1(x / eps) / eps
    }

    pub fn grad_delta_eps(&self, x: f64, eps: f64) -> f64 {
        self.grad_delta1(x / eps) / (eps * eps)
    }

    /// `mu(m) = int delta_1(x) e^{m x} dx`.
    pub fn mu(&self, m: f64) -> MuMoment {
        let h = self.half_width();
        let mu = gl20().integrate_pieces(&[-h, 0.0, h], 2, |x| self.delta1(x) * (m * x).exp());
        MuMoment { m, mu }
    }

    /// Potential of one bump in reference units:
    /// `B(s) = int delta_1(t) e^{-m|s - t|} dt` and `B'(s)`.
    pub fn bump_potential(&self, s: f64, m: f64, mu: f64) -> (f64, f64) {
        let h = self.half_width();
        if s >= h {
            let v = mu * (-m * s).exp();
            return (v, -m * v);
        }
        if s <= -h {
            let v = mu * (m * s).exp();
            return (v, m * v);
        }
        let rule = gl20();
        let left = rule.integrate(-h, s, |t| self.delta1(t) * (-m * (s - t)).exp());
        let right = rule.integrate(s, h, |t| self.delta1(t) * (-m * (t - s)).exp());
        (left + right, m * (right - left))
    }

    /// Self-interaction `S = int int delta_1(s) delta_1(t) e^{-m|s-t|} ds dt`.
    pub fn self_coupling(&self, m: f64, mu: f64) -> f64 {
        let h = self.half_width();
        let pts: Vec<f64> = (0..=8).map(|i| -h + 2.0 * h * i as f64 / 8.0).collect();
        gl20().integrate_pieces(&pts, 1, |s| self.delta1(s) * self.bump_potential(s, m, mu).0)
    }
}

/// `mu = int delta_1(x) e^{m x} dx` together with its mass parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuMoment {
    pub m: f64,
    pub mu: f64,
}

/// Screening mass, bump profile and the cached bump integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    m: f64,
    profile: BumpProfile,
    mu: f64,
    self_coupling: f64,
}

impl Params {
    pub fn new(m: f64, profile: BumpProfile) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Param(format!("m must be positive, got {m}")));
        }
        let mu = profile.mu(m).mu;
        let self_coupling = profile.self_coupling(m, mu);
        Ok(Self { m, profile, mu, self_coupling })
    }

    /// `m = 1`, quartic bump with `sigma0 = 0.5`.
    pub fn standard() -> Self {
        Self::new(1.0, BumpProfile::quartic(0.5).expect("valid sigma0")).expect("valid m")
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    pub fn sigma0(&self) -> f64 {
        self.profile.sigma0
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn self_coupling(&self) -> f64 {
        self.self_coupling
    }

    /// Per-atom self-energy `eps S / (4m)`.
    pub fn e_self(&self, eps: f64) -> f64 {
        eps * self.self_coupling / (4.0 * self.m)
    }

    /// Decay rate `m / eps` of the scaled kernel.
    pub fn alpha(&self, eps: f64) -> f64 {
        self.m / eps
    }

    /// `int delta_eps(z - y) e^{-(m/eps)|x - z|} dz` and its x-derivative.
    pub fn bump_kernel(&self, x: f64, y: f64, eps: f64) -> (f64, f64) {
        let (b, db) = self.profile.bump_potential((x - y) / eps, self.m, self.mu);
        (b, db / eps)
    }
}

/// Errors with the offending bond if any strain is at most `sigma0`.
pub fn check_separation(cfg: &ChainConfig, profile: &BumpProfile) -> Result<()> {
    for (j, s) in cfg.indices().zip(cfg.first_diff()) {
        if s <= profile.sigma0() {
            return Err(Error::Overlap { bond: j, strain: s, sigma0: profile.sigma0() });
        }
    }
    Ok(())
}

/// Calls `f(j, y_j)` for every atom (periodic images included) within
/// distance `r` of `x`.
pub fn for_each_atom_near(cfg: &ChainConfig, x: f64, r: f64, mut f: impl FnMut(i64, f64)) {
    let n = cfg.n() as i64;
    let l = cfg.period();
    let x0 = cfg.position(-n);
    let q = ((x - x0) / l).floor();
    let xr = x - q * l;
    let shift = q as i64 * cfg.size() as i64;
    let base = cfg.base_positions();
    let i = base.partition_point(|&y| y < xr) as i64 - n;
    let mut k = i - 1;
    while cfg.position(k) > xr - r {
        f(k + shift, cfg.position(k) + q * l);
        k -= 1;
    }
    let mut k = i;
    while cfg.position(k) < xr + r {
        f(k + shift, cfg.position(k) + q * l);
        k += 1;
    }
}

/// `rho_y(x) = eps sum_j delta_eps(x - y_j)` over all periodic images.
pub fn rho(cfg: &ChainConfig, profile: &BumpProfile, x: f64) -> f64 {
    let eps = cfg.eps();
    let mut s = 0.0;
    for_each_atom_near(cfg, x, eps * profile.half_width(), |_, y| {
        s += profile.delta_eps(x - y, eps)
    });
    eps * s
}

pub fn grad_rho(cfg: &ChainConfig, profile: &BumpProfile, x: f64) -> f64 {
    let eps = cfg.eps();
    let mut s = 0.0;
    for_each_atom_near(cfg, x, eps * profile.half_width(), |_, y| {
        s += profile.grad_delta_eps(x - y, eps)
    });
    eps * s
}

/// As [`rho`], after asserting that no two supports overlap.
pub fn rho_separated(cfg: &ChainConfig, profile: &BumpProfile, x: f64) -> Result<f64> {
    check_separation(cfg, profile)?;
    Ok(rho(cfg, profile, x))
}

/// Density of a finite atom set (no periodic images).
pub fn rho_atoms(atoms: &[f64], profile: &BumpProfile, eps: f64, x: f64) -> f64 {
    eps * atoms.iter().map(|&y| profile.delta_eps(x - y, eps)).sum::<f64>()
}

/// A higher-order rule, for tests that want an independent integrator.
pub fn reference_rule() -> GaussLegendre {
    GaussLegendre::new(40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation() {
        for shape in [BumpShape::Quartic, BumpShape::Sextic] {
            let p = BumpProfile::new(shape, 0.7).unwrap();
            let h = p.half_width();
            let mass = reference_rule().integrate(-h, h, |x| p.delta1(x));
            assert!((mass - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn bump_potential_outside_matches_mu() {
        let p = BumpProfile::quartic(0.5).unwrap();
        let mu = p.mu(1.3).mu;
        let (b, _) = p.bump_potential(0.25 - 1e-13, 1.3, mu);
        assert!((b - mu * (-1.3f64 * 0.25).exp()).abs() < 1e-12);
    }
}
