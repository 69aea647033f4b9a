//! Atomistic-to-continuum coupled energies.
//!
//! Atoms `-K..=K` are treated atomistically on `(a_L, a_R)`, where the
//! interfaces sit at the midpoints of the cells `-K` and `K+1`. All other
//! cells use the Cauchy-Born energy, and the two interface cells count half.
//! The field in the atomistic block gets Dirichlet data either from the
//! optimal values `g*` or from the cell fields of the interface cells.

use nalgebra::{DMatrix, DVector};

use crate::cauchy_born::{cb_cell_derivatives, cb_cell_energy, CellState};
use crate::density::{check_separation, Params};
use crate::energy::dirichlet::{
    d_energy_dirichlet_a, d_energy_dirichlet_g, d_energy_dirichlet_y, energy_dirichlet, g_star,
    DirichletChain,
};
use crate::energy::forces_periodic;
use crate::energy::stress::{integrate_stress, StressFunction};
use crate::error::{Error, Result};
use crate::field::{BoundaryData, DirichletGreenField};
use crate::lattice::{norm_weighted, ChainConfig, DiscreteNormParams};
use crate::model::{fd_hessian, Coupled};

/// Source of the Dirichlet data of the atomistic block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcVariant {
    /// `g = g*(y, a)`, the stationary point of the block energy in `g`.
    OptimalData,
    /// `g_L = psi^(-K)(a_L)`, `g_R = psi^(K+1)(a_R)`.
    CellData,
}

impl AcVariant {
    pub fn label(&self) -> &'static str {
        match self {
            AcVariant::OptimalData => "method1",
            AcVariant::CellData => "method2",
        }
    }
}

/// Half-width `K` of the atomistic block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcPartition {
    pub k: usize,
}

impl AcPartition {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k >= n {
            return Err(Error::Partition { k: self.k, n });
        }
        Ok(())
    }

    /// `(a_L, a_R)` at the midpoints of the interface cells.
    pub fn interfaces(&self, cfg: &ChainConfig) -> (f64, f64) {
        let k = self.k as i64;
        (
            0.5 * (cfg.position(-k - 1) + cfg.position(-k)),
            0.5 * (cfg.position(k) + cfg.position(k + 1)),
        )
    }

    /// Weight of cell `j` in the Cauchy-Born part.
    pub fn cb_weight(&self, j: i64) -> f64 {
        let k = self.k as i64;
        if j == -k || j == k + 1 {
            0.5
        } else if j < -k || j > k + 1 {
            1.0
        } else {
            0.0
        }
    }
}

/// A coupling method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcMethod {
    pub variant: AcVariant,
    pub partition: AcPartition,
    /// Largest admissible `tau`.
    pub tau_max: f64,
}

impl AcMethod {
    pub fn new(variant: AcVariant, k: usize) -> Self {
        Self { variant, partition: AcPartition::new(k), tau_max: 1e-8 }
    }

    pub fn with_tau_max(self, tau_max: f64) -> Self {
        Self { tau_max, ..self }
    }

    pub fn model(self, params: &Params) -> Coupled {
        Coupled { params: *params, method: self }
    }
}

/// `g(s) = (mu/m) e^{-ms/2} / (1 - e^{-ms})`, the cell field at a cell midpoint,
/// and `dg/ds`.
pub fn midpoint_field(strain: f64, params: &Params) -> (f64, f64) {
    let m = params.m();
    let mu = params.mu();
    let q = (-m * strain).exp();
    let r = (-0.5 * m * strain).exp();
    let g = mu / m * r / (1.0 - q);
    let dg = -0.5 * mu * r * (1.0 + q) / ((1.0 - q) * (1.0 - q));
    (g, dg)
}

/// Cell-field Dirichlet data `(g_L, g_R)`.
pub fn g_method2(cfg: &ChainConfig, partition: &AcPartition, params: &Params) -> (f64, f64) {
    let k = partition.k as i64;
    (
        midpoint_field(cfg.bond_strain(-k), params).0,
        midpoint_field(cfg.bond_strain(k + 1), params).0,
    )
}

/// `(D_y g_L . u, D_y g_R . u)` for `u` indexed `-N..=N`.
pub fn d_g_method2(cfg: &ChainConfig, partition: &AcPartition, params: &Params, u: &[f64]) -> (f64, f64) {
    let k = partition.k as i64;
    let eps = cfg.eps();
    let at = |j: i64| u[(j + cfg.n() as i64).rem_euclid(cfg.size() as i64) as usize];
    let dl = midpoint_field(cfg.bond_strain(-k), params).1 * (at(-k) - at(-k - 1)) / eps;
    let dr = midpoint_field(cfg.bond_strain(k + 1), params).1 * (at(k + 1) - at(k)) / eps;
    (dl, dr)
}

/// The atomistic block of a configuration with the method's boundary data.
pub fn atomistic_block(cfg: &ChainConfig, method: &AcMethod, params: &Params) -> Result<DirichletChain> {
    method.partition.validate(cfg.n())?;
    check_separation(cfg, params.profile())?;
    let k = method.partition.k as i64;
    let (a_l, a_r) = method.partition.interfaces(cfg);
    let chain = DirichletChain::new(
        cfg.positions(-k, k),
        BoundaryData::new(a_l, a_r, 0.0, 0.0),
        cfg.eps(),
        params,
    )?;
    let tau = chain.tau(params);
    if tau > method.tau_max {
        return Err(Error::TauTooLarge { tau, max: method.tau_max });
    }
    let (g_l, g_r) = match method.variant {
        AcVariant::OptimalData => g_star(&chain, params),
        AcVariant::CellData => g_method2(cfg, &method.partition, params),
    };
    Ok(chain.with_g(g_l, g_r))
}

/// `E^ac(y)`.
pub fn ac_energy(cfg: &ChainConfig, method: &AcMethod, params: &Params) -> Result<f64> {
    let chain = atomistic_block(cfg, method, params)?;
    let eps = cfg.eps();
    let cb: f64 = cfg
        .indices()
        .zip(cfg.first_diff())
        .map(|(j, s)| {
            let w = method.partition.cb_weight(j);
            if w == 0.0 {
                0.0
            } else {
                w * cb_cell_energy(s, params, eps)
            }
        })
        .sum();
    Ok(cb + energy_dirichlet(&chain, params))
}

/// `D E^ac(y)` indexed `-N..=N`.
pub fn ac_forces(cfg: &ChainConfig, method: &AcMethod, params: &Params) -> Result<Vec<f64>> {
    let chain = atomistic_block(cfg, method, params)?;
    let eps = cfg.eps();
    let n = cfg.n() as i64;
    let p = cfg.size() as i64;
    let idx = |j: i64| (j + n).rem_euclid(p) as usize;
    let mut f = vec![0.0; cfg.size()];
    for (j, s) in cfg.indices().zip(cfg.first_diff()) {
        let w = method.partition.cb_weight(j);
        if w != 0.0 {
            let d = w * cb_cell_derivatives(s, params, eps).1 / eps;
            f[idx(j)] += d;
            f[idx(j - 1)] -= d;
        }
    }
    let k = method.partition.k as i64;
    for (j, d) in (-k..=k).zip(d_energy_dirichlet_y(&chain, params)) {
        f[idx(j)] += d;
    }
    let (da_l, da_r) = d_energy_dirichlet_a(&chain, params);
    f[idx(-k - 1)] += 0.5 * da_l;
    f[idx(-k)] += 0.5 * da_l;
    f[idx(k)] += 0.5 * da_r;
    f[idx(k + 1)] += 0.5 * da_r;
    if method.variant == AcVariant::CellData {
        let (dg_l, dg_r) = d_energy_dirichlet_g(&chain, params);
        let gl = dg_l * midpoint_field(cfg.bond_strain(-k), params).1 / eps;
        let gr = dg_r * midpoint_field(cfg.bond_strain(k + 1), params).1 / eps;
        f[idx(-k)] += gl;
        f[idx(-k - 1)] -= gl;
        f[idx(k + 1)] += gr;
        f[idx(k)] -= gr;
    }
    Ok(f)
}

/// Piecewise stress of the coupled energy with optimal boundary data.
pub struct QcStress {
    cfg: ChainConfig,
    params: Params,
    field: DirichletGreenField,
    interfaces: (f64, f64),
}

impl QcStress {
    pub fn new(cfg: &ChainConfig, method: &AcMethod, params: &Params) -> Result<Self> {
        if method.variant != AcVariant::OptimalData {
            return Err(Error::Param(
                "the coupled stress is defined for optimal boundary data only".into(),
            ));
        }
        let chain = atomistic_block(cfg, method, params)?;
        Ok(Self {
            cfg: cfg.clone(),
            params: *params,
            field: chain.field(params),
            interfaces: (chain.bd.a_l, chain.bd.a_r),
        })
    }

    /// `sigma^qc(x)` for `x` in `[y_{-N-1}, y_N]`.
    pub fn sigma(&self, x: f64) -> Result<f64> {
        let n = self.cfg.n() as i64;
        let (lo, hi) = (self.cfg.position(-n - 1), self.cfg.position(n));
        if !(x >= lo && x <= hi) {
            return Err(Error::Param(format!("x = {x} outside [{lo}, {hi}]")));
        }
        let (a_l, a_r) = self.interfaces;
        if x > a_l && x < a_r {
            let s = StressFunction::new(&self.field, self.field.atoms().to_vec(), self.cfg.eps(), &self.params);
            return Ok(s.sigma(x));
        }
        let base = self.cfg.base_positions();
        let j = (base.partition_point(|&y| y < x) as i64 - n).min(n);
        Ok(CellState::new(&self.cfg, j, &self.params).stress(x))
    }

    /// `int sigma^qc grad u` for the interpolant of `u` indexed `-N..=N`.
    pub fn weak_form(&self, u: &[f64]) -> f64 {
        let cfg = &self.cfg;
        let eps = cfg.eps();
        let p = cfg.size();
        let (a_l, a_r) = self.interfaces;
        let stress = StressFunction::new(&self.field, self.field.atoms().to_vec(), eps, &self.params);
        let mut total = 0.0;
        for (i, j) in cfg.indices().enumerate() {
            let (ya, yb) = (cfg.position(j - 1), cfg.position(j));
            let slope = (u[i] - u[(i + p - 1) % p]) / (yb - ya);
            let cell = CellState::new(cfg, j, &self.params);
            let cb = |a: f64, b: f64| {
                let s = StressFunction::new(&cell, cell.local_atoms(), eps, &self.params);
                integrate_stress(&s, a, b)
            };
            let integral = if yb <= a_l || ya >= a_r {
                cb(ya, yb)
            } else if ya < a_l {
                cb(ya, a_l) + integrate_stress(&stress, a_l, yb)
            } else if yb > a_r {
                integrate_stress(&stress, ya, a_r) + cb(a_r, yb)
            } else {
                integrate_stress(&stress, ya, yb)
            };
            total += slope * integral;
        }
        total
    }
}

/// `sigma^qc(x)`.
pub fn sigma_qc(cfg: &ChainConfig, method: &AcMethod, params: &Params, x: f64) -> Result<f64> {
    QcStress::new(cfg, method, params)?.sigma(x)
}

/// Consistency of the coupled gradient with the atomistic one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// `max_u |(DE - DE^ac) . u| / ||grad u||_{L2}` over the probes.
    pub probe_sup: f64,
    /// The same supremum over all of `U`.
    pub dual_norm: f64,
    /// `eps ||y''||_{w, s0}`.
    pub weighted_y2: f64,
    pub tau: f64,
}

impl ConsistencyReport {
    /// `eps ||y''||_w + tau`.
    pub fn rhs(&self) -> f64 {
        self.weighted_y2 + self.tau
    }
}

/// Stiffness of `||grad u||^2_{L2}` for the interpolant on the deformed mesh.
fn deformed_stiffness(cfg: &ChainConfig) -> DMatrix<f64> {
    let p = cfg.size();
    let mut a = DMatrix::zeros(p, p);
    for (i, j) in cfg.indices().enumerate() {
        let w = 1.0 / (cfg.position(j) - cfg.position(j - 1));
        let im = (i + p - 1) % p;
        a[(i, i)] += w;
        a[(im, im)] += w;
        a[(i, im)] -= w;
        a[(im, i)] -= w;
    }
    a
}

/// Consistency error against the probes `u` (each indexed `-N..=N`).
pub fn consistency_error(
    cfg: &ChainConfig,
    method: &AcMethod,
    params: &Params,
    probes: &[Vec<f64>],
) -> Result<ConsistencyReport> {
    let at = forces_periodic(cfg, params)?;
    let qc = ac_forces(cfg, method, params)?;
    let r: Vec<f64> = at.iter().zip(&qc).map(|(a, b)| a - b).collect();
    let a = deformed_stiffness(cfg);
    let energy = |u: &[f64]| {
        let v = DVector::from_column_slice(u);
        (v.transpose() * &a * &v)[(0, 0)]
    };
    let mut probe_sup: f64 = 0.0;
    for u in probes {
        let num: f64 = r.iter().zip(u).map(|(x, y)| x * y).sum();
        let den = energy(u).sqrt();
        if den > 0.0 {
            probe_sup = probe_sup.max(num.abs() / den);
        }
    }
    let p = cfg.size();
    let shift = a.diagonal().mean();
    let reg = &a + DMatrix::from_element(p, p, shift / p as f64);
    let chol = reg
        .cholesky()
        .ok_or_else(|| Error::LinAlg("stiffness factorisation failed".into()))?;
    let rv = DVector::from_column_slice(&r);
    let mean = rv.mean();
    let rv = rv.add_scalar(-mean);
    let x = chol.solve(&rv);
    let dual_norm = rv.dot(&x).max(0.0).sqrt();
    let eps = cfg.eps();
    let norm = DiscreteNormParams::new(cfg.min_strain(), params.m(), method.partition.k);
    let weighted_y2 = eps * norm_weighted(&cfg.second_diff(), eps, &norm);
    let (a_l, a_r) = method.partition.interfaces(cfg);
    let tau = (-(params.m() / eps) * (a_r - a_l)).exp();
    Ok(ConsistencyReport { probe_sup, dual_norm, weighted_y2, tau })
}

/// Hat displacements plus `smooth` random smooth modes, all mean-adjusted.
pub fn probe_set<R: rand::Rng>(n: usize, smooth: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let p = 2 * n + 1;
    let mut out = Vec::with_capacity(p + smooth);
    for i in 0..p {
        let mut e = vec![-1.0 / p as f64; p];
        e[i] += 1.0;
        out.push(e);
    }
    for _ in 0..smooth {
        let mut v = crate::lattice::random_smooth_mode(n, 6, rng);
        crate::lattice::project_mean_zero(&mut v);
        out.push(v);
    }
    out
}

/// Smallest generalised eigenvalue of the Hessian against `||u'||^2_{l2_eps}` on `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub lambda_min: f64,
    /// `(m mu^2 / 2) e^{-m max y'}`.
    pub bound: f64,
    pub asymmetry: f64,
}

/// Generalised eigenvalues on the mean-zero subspace of a symmetric Hessian
/// relative to `||u'||^2_{l2_eps}`, ascending.
pub fn generalized_spectrum(hess: &[Vec<f64>], eps: f64) -> Result<Vec<f64>> {
    let p = hess.len();
    let h = DMatrix::from_fn(p, p, |i, j| hess[i][j]);
    let mut b = DMatrix::zeros(p, p);
    for i in 0..p {
        let im = (i + p - 1) % p;
        b[(i, i)] += 1.0 / eps;
        b[(im, im)] += 1.0 / eps;
        b[(i, im)] -= 1.0 / eps;
        b[(im, i)] -= 1.0 / eps;
    }
    // Householder reflection exchanging e_0 and the normalised ones vector;
    // its remaining columns span the mean-zero subspace.
    let s = 1.0 / (p as f64).sqrt();
    let mut w = DVector::from_element(p, s);
    w[0] -= 1.0;
    let ww = w.dot(&w);
    let refl = DMatrix::identity(p, p) - (&w * w.transpose()) * (2.0 / ww);
    let q = refl.columns(1, p - 1).into_owned();
    let hu = q.transpose() * &h * &q;
    let bu = q.transpose() * &b * &q;
    let l = bu
        .cholesky()
        .ok_or_else(|| Error::LinAlg("strain form not positive definite".into()))?
        .l();
    let linv = l
        .try_inverse()
        .ok_or_else(|| Error::LinAlg("singular Cholesky factor".into()))?;
    let c = &linv * hu * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Stability of the coupled energy at `cfg`.
pub fn stability_spectrum(cfg: &ChainConfig, method: &AcMethod, params: &Params) -> Result<StabilityReport> {
    let model = method.model(params);
    let (hess, asymmetry) = fd_hessian(&model, cfg)?;
    let tol = 1e-5;
    if asymmetry > tol {
        return Err(Error::HessianAsymmetry { rel: asymmetry, tol });
    }
    let ev = generalized_spectrum(&hess, cfg.eps())?;
    let m = params.m();
    let bound = 0.5 * m * params.mu() * params.mu() * (-m * cfg.max_strain()).exp();
    Ok(StabilityReport { lambda_min: ev[0], bound, asymmetry })
}
