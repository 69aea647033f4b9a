//! Periodic chain configurations, finite differences and discrete norms.
//!
//! Public indices follow the centred convention `j = -N..=N`; storage uses
//! `j + N`.

use rand::Rng;

use crate::error::{Error, Result};

/// A periodic deformation `y_j = F eps j + u_j` with mean-zero `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    n: usize,
    strain: f64,
    u: Vec<f64>,
}

impl ChainConfig {
    /// Builds a configuration, rejecting wrong lengths, non-zero mean and
    /// non-monotone positions.
    pub fn new(n: usize, strain: f64, u: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("N must be positive".into()));
        }
        if !(strain > 0.0) {
            return Err(Error::Param(format!("strain must be positive, got {strain}")));
        }
        let p = 2 * n + 1;
        if u.len() != p {
            return Err(Error::Length { expected: p, got: u.len() });
        }
        let mean = u.iter().sum::<f64>() / p as f64;
        let scale = u.iter().fold(1.0_f64, |a, &b| a.max(b.abs()));
        if mean.abs() > 1e-10 * scale {
            return Err(Error::NotMeanZero { mean });
        }
        let cfg = Self { n, strain, u };
        for (j, s) in cfg.bond_indices().zip(cfg.first_diff()) {
            if !(s > 0.0) {
                return Err(Error::NonMonotone { bond: j, strain: s });
            }
        }
        Ok(cfg)
    }

    /// The homogeneous chain `y = F X`.
    pub fn homogeneous(n: usize, strain: f64) -> Result<Self> {
        Self::new(n, strain, vec![0.0; 2 * n + 1])
    }

    /// Builds a configuration from arbitrary displacements after removing
    /// their mean.
    pub fn from_displacement(n: usize, strain: f64, mut u: Vec<f64>) -> Result<Self> {
        project_mean_zero(&mut u);
        Self::new(n, strain, u)
    }

    /// Recovers `F` and `u` from base-period positions `y_{-N..=N}`.
    pub fn from_positions(n: usize, strain: f64, y: &[f64]) -> Result<Self> {
        let eps = eps_of(n);
        let u = y
            .iter()
            .enumerate()
            .map(|(i, &yi)| yi - strain * eps * (i as f64 - n as f64))
            .collect();
        Self::from_displacement(n, strain, u)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of atoms per period, `2N + 1`.
    pub fn size(&self) -> usize {
        2 * self.n + 1
    }

    pub fn strain(&self) -> f64 {
        self.strain
    }

    pub fn eps(&self) -> f64 {
        eps_of(self.n)
    }

    /// Period length `L = (2N+1) eps F`.
    pub fn period(&self) -> f64 {
        self.size() as f64 * self.eps() * self.strain
    }

    pub fn displacement(&self) -> &[f64] {
        &self.u
    }

    /// Indices `-N..=N`.
    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let n = self.n as i64;
        -n..=n
    }

    fn bond_indices(&self) -> impl Iterator<Item = i64> {
        self.indices()
    }

    /// `y_j` for any integer `j`, using `y_{j+2N+1} = y_j + L`.
    pub fn position(&self, j: i64) -> f64 {
        let p = self.size() as i64;
        let r = (j + self.n as i64).rem_euclid(p) as usize;
        self.strain * self.eps() * j as f64 + self.u[r]
    }

    /// `y_j` for `j` in `[j_lo, j_hi]`.
    pub fn positions(&self, j_lo: i64, j_hi: i64) -> Vec<f64> {
        (j_lo..=j_hi).map(|j| self.position(j)).collect()
    }

    /// Base-period positions `y_{-N..=N}`.
    pub fn base_positions(&self) -> Vec<f64> {
        let n = self.n as i64;
        self.positions(-n, n)
    }

    /// `y'_j = (y_j - y_{j-1}) / eps` for `j = -N..=N`.
    pub fn first_diff(&self) -> Vec<f64> {
        let eps = self.eps();
        self.indices()
            .map(|j| (self.position(j) - self.position(j - 1)) / eps)
            .collect()
    }

    /// `y''_j = (y_{j+1} - 2 y_j + y_{j-1}) / eps^2` for `j = -N..=N`.
    pub fn second_diff(&self) -> Vec<f64> {
        let e2 = self.eps() * self.eps();
        self.indices()
            .map(|j| {
                (self.position(j + 1) - 2.0 * self.position(j) + self.position(j - 1)) / e2
            })
            .collect()
    }

    /// `y'_j` for a single bond.
    pub fn bond_strain(&self, j: i64) -> f64 {
        (self.position(j) - self.position(j - 1)) / self.eps()
    }

    pub fn min_strain(&self) -> f64 {
        self.first_diff().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_strain(&self) -> f64 {
        self.first_diff().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bond with the smallest strain, as `(j, y'_j)`.
    pub fn weakest_bond(&self) -> (i64, f64) {
        self.indices()
            .zip(self.first_diff())
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// Returns a copy with displacement `u + t v` (`v` is mean-adjusted).
    pub fn perturbed(&self, v: &[f64], t: f64) -> Result<Self> {
        let u = self.u.iter().zip(v).map(|(a, b)| a + t * b).collect();
        Self::from_displacement(self.n, self.strain, u)
    }
}

/// `eps = 2 / (2N + 1)`.
pub fn eps_of(n: usize) -> f64 {
    2.0 / (2 * n + 1) as f64
}

/// Subtracts the mean in place.
pub fn project_mean_zero(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// `(eps sum v^2)^{1/2}`.
pub fn norm_l2eps(v: &[f64], eps: f64) -> f64 {
    (eps * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

pub fn norm_linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Periodic first difference `(v_j - v_{j-1}) / eps`.
pub fn periodic_diff(v: &[f64], eps: f64) -> Vec<f64> {
    let p = v.len();
    (0..p).map(|i| (v[i] - v[(i + p - 1) % p]) / eps).collect()
}

/// `||v'||_{l2_eps}` with periodic wrap.
pub fn seminorm_u12(v: &[f64], eps: f64) -> f64 {
    norm_l2eps(&periodic_diff(v, eps), eps)
}

/// Parameters of the weighted second-difference norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteNormParams {
    pub s0: f64,
    pub m: f64,
    pub k: usize,
    /// Use `w_j = max(1, exp(-m s0 dist))` literally, which is identically 1.
    pub literal_max: bool,
}

impl DiscreteNormParams {
    pub fn new(s0: f64, m: f64, k: usize) -> Self {
        Self { s0, m, k, literal_max: false }
    }

    /// Weight of index `j`: 1 outside `(-K, K)`, `exp(-m s0 dist(j, {-K, K}))` inside.
    pub fn weight(&self, j: i64) -> f64 {
        let k = self.k as i64;
        if self.literal_max || j <= -k || j >= k {
            return 1.0;
        }
        let d = (j + k).min(k - j) as f64;
        (-self.m * self.s0 * d).exp()
    }
}

/// `(eps sum_j w_j |y''_j|^2)^{1/2}` with `y2` indexed `-N..=N`.
pub fn norm_weighted(y2: &[f64], eps: f64, params: &DiscreteNormParams) -> f64 {
    let n = (y2.len() / 2) as i64;
    let s: f64 = y2
        .iter()
        .zip(-n..=n)
        .map(|(v, j)| params.weight(j) * v * v)
        .sum();
    (eps * s).sqrt()
}

/// Random admissible configuration: bond strains `F + d_j` with `d_j` uniform
/// in `(-amp, amp)` and mean zero.
pub fn random_config<R: Rng>(n: usize, strain: f64, amp: f64, rng: &mut R) -> Result<ChainConfig> {
    let p = 2 * n + 1;
    let mut d: Vec<f64> = (0..p).map(|_| rng.gen_range(-amp..amp)).collect();
    project_mean_zero(&mut d);
    let eps = eps_of(n);
    // bond j = -N..=N joins y_{j-1} and y_j; d[0] is the wrap-around bond
    let mut u = vec![0.0; p];
    for i in 1..p {
        u[i] = u[i - 1] + eps * d[i];
    }
    ChainConfig::from_displacement(n, strain, u)
}

/// `u_j = amp sin(2 pi (j + N) / (2N + 1))`.
pub fn sine_config(n: usize, strain: f64, amp: f64) -> Result<ChainConfig> {
    let p = 2 * n + 1;
    let u = (0..p)
        .map(|i| amp * (std::f64::consts::TAU * i as f64 / p as f64).sin())
        .collect();
    ChainConfig::from_displacement(n, strain, u)
}

/// Strain `hi` on the bonds `top - width < j <= top` and `lo` on all others,
/// so that `y''` is nonzero only at the two kinks.
pub fn band_config(n: usize, lo: f64, hi: f64, top: i64, width: usize) -> Result<ChainConfig> {
    let ni = n as i64;
    let s: Vec<f64> = (-ni..=ni)
        .map(|j| if j <= top && j > top - width as i64 { hi } else { lo })
        .collect();
    let strain = s.iter().sum::<f64>() / s.len() as f64;
    let eps = eps_of(n);
    let mut u = vec![0.0; s.len()];
    for i in 1..s.len() {
        u[i] = u[i - 1] + eps * (s[i] - strain);
    }
    ChainConfig::from_displacement(n, strain, u)
}

/// Smooth random mean-zero vector: a few low Fourier modes with random
/// amplitudes and phases.
pub fn random_smooth_mode<R: Rng>(n: usize, modes: usize, rng: &mut R) -> Vec<f64> {
    let p = 2 * n + 1;
    let coef: Vec<(f64, f64)> = (1..=modes)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    (0..p)
        .map(|i| {
            let x = i as f64 / p as f64;
            coef.iter()
                .enumerate()
                .map(|(k, (a, ph))| a * (std::f64::consts::TAU * (k + 1) as f64 * x + ph).sin() / (k + 1) as f64)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ChainConfig::new(2, 1.0, vec![0.0; 4]), Err(Error::Length { .. })));
        assert!(matches!(
            ChainConfig::new(1, 1.0, vec![0.1, 0.0, 0.0]),
            Err(Error::NotMeanZero { .. })
        ));
        assert!(matches!(
            ChainConfig::new(1, 1.0, vec![0.0, 0.8, -0.8]),
            Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn weights() {
        let p = DiscreteNormParams::new(1.0, 1.0, 4);
        assert_eq!(p.weight(-4), 1.0);
        assert_eq!(p.weight(7), 1.0);
        assert!((p.weight(0) - (-4.0f64).exp()).abs() < 1e-16);
        assert!((p.weight(3) - (-1.0f64).exp()).abs() < 1e-16);
    }
}
