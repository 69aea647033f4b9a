//! P1 finite elements on uniform meshes.

use std::sync::OnceLock;

use super::{BoundaryData, ScalarField};
use crate::density::{check_separation, Params};
use crate::error::{Error, Result};
use crate::lattice::ChainConfig;
use crate::quad::GaussLegendre;

/// Mesh resolution controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemOptions {
    /// Target number of mesh nodes per bump support `eps sigma0`.
    pub points_per_bump: usize,
    /// Smallest accepted resolution.
    pub min_points_per_bump: usize,
    /// Explicit element count overriding `points_per_bump`.
    pub elements: Option<usize>,
}

impl Default for FemOptions {
    fn default() -> Self {
        Self { points_per_bump: 16, min_points_per_bump: 16, elements: None }
    }
}

impl FemOptions {
    pub fn with_points(points_per_bump: usize) -> Self {
        Self { points_per_bump, ..Self::default() }
    }

    pub fn with_elements(elements: usize) -> Self {
        Self { elements: Some(elements), ..Self::default() }
    }
}

/// Right-hand side of the field equation.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    /// `eps sum_j delta_eps(x - y_j)` for the given centres.
    Atoms(&'a [f64]),
    /// A constant density.
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Periodic,
    Dirichlet { g_l: f64, g_r: f64 },
}

/// A piecewise-linear field on a uniform mesh together with its linear system.
#[derive(Debug, Clone)]
pub struct Field {
    x0: f64,
    h: f64,
    elements: usize,
    values: Vec<f64>,
    load: Vec<f64>,
    diag: f64,
    off: f64,
    kind: BoundaryKind,
}

impl Field {
    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn mesh_width(&self) -> f64 {
        self.h
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    /// Left end of the mesh.
    pub fn origin(&self) -> f64 {
        self.x0
    }

    /// Length of the meshed interval.
    pub fn length(&self) -> f64 {
        self.h * self.elements as f64
    }

    /// Node coordinates (the periodic mesh omits the duplicated right end).
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.x0 + self.h * i as f64).collect()
    }

    /// Nodal values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Load vector `b_i = int rho theta_i`.
    pub fn load(&self) -> &[f64] {
        &self.load
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let len = self.length();
        let t = match self.kind {
            BoundaryKind::Periodic => (x - self.x0).rem_euclid(len),
            BoundaryKind::Dirichlet { .. } => (x - self.x0).clamp(0.0, len),
        };
        let e = ((t / self.h).floor() as usize).min(self.elements - 1);
        (e, t / self.h - e as f64)
    }

    fn node_value(&self, i: usize) -> f64 {
        match self.kind {
            BoundaryKind::Periodic => self.values[i % self.elements],
            BoundaryKind::Dirichlet { .. } => self.values[i],
        }
    }

    /// `sum_ij phi_i A_ij phi_j` over all nodes.
    fn quadratic_form(&self) -> f64 {
        let n = self.values.len();
        let v = &self.values;
        let mut s = self.diag * v.iter().map(|x| x * x).sum::<f64>();
        let edges = match self.kind {
            BoundaryKind::Periodic => n,
            BoundaryKind::Dirichlet { .. } => n - 1,
        };
        for i in 0..edges {
            s += 2.0 * self.off * v[i] * v[(i + 1) % n];
        }
        // Dirichlet end nodes carry half the interior diagonal.
        if let BoundaryKind::Dirichlet { .. } = self.kind {
            s -= 0.5 * self.diag * (v[0] * v[0] + v[n - 1] * v[n - 1]);
        }
        s
    }

    /// `int rho phi_h`, exact because the load is assembled exactly.
    pub fn rho_dot_phi(&self) -> f64 {
        self.load.iter().zip(&self.values).map(|(b, v)| b * v).sum()
    }

    /// `I(phi_h) = 1/2 a(phi_h, phi_h) - int rho phi_h`.
    pub fn functional(&self) -> f64 {
        0.5 * self.quadratic_form() - self.rho_dot_phi()
    }

    /// Largest residual of the discrete equations at free nodes, relative to the load.
    pub fn residual(&self) -> f64 {
        let n = self.values.len();
        let v = &self.values;
        let (lo, hi) = match self.kind {
            BoundaryKind::Periodic => (0, n),
            BoundaryKind::Dirichlet { .. } => (1, n - 1),
        };
        let scale = self.load.iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        (lo..hi)
            .map(|i| {
                let r = self.diag * v[i] + self.off * (v[(i + n - 1) % n] + v[(i + 1) % n])
                    - self.load[i];
                r.abs()
            })
            .fold(0.0, f64::max)
            / scale
    }
}

impl ScalarField for Field {
    fn eval(&self, x: f64) -> (f64, f64) {
        let (e, t) = self.locate(x);
        let a = self.node_value(e);
        let b = self.node_value(e + 1);
        (a + t * (b - a), (b - a) / self.h)
    }

    fn kinks(&self, a: f64, b: f64) -> Vec<f64> {
        let lo = ((a - self.x0) / self.h).ceil() as i64;
        let hi = ((b - self.x0) / self.h).floor() as i64;
        (lo..=hi).map(|i| self.x0 + self.h * i as f64).collect()
    }
}

fn load_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(6))
}

/// Adds `int eps delta_eps(x - c) theta_i(x) dx` to `load`, wrapping node
/// indices when `periodic`.
fn assemble_bump(
    load: &mut [f64],
    x0: f64,
    h: f64,
    elements: usize,
    periodic: bool,
    c: f64,
    params: &Params,
    eps: f64,
) {
    let profile = params.profile();
    let r = eps * profile.half_width();
    let e_lo = ((c - r - x0) / h).floor() as i64;
    let e_hi = ((c + r - x0) / h).floor() as i64;
    let n = elements as i64;
    for e in e_lo..=e_hi {
        let xl = x0 + h * e as f64;
        let a = xl.max(c - r);
        let b = (xl + h).min(c + r);
        if b <= a {
            continue;
        }
        let mut left = 0.0;
        let mut right = 0.0;
        let rule = load_rule();
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
            let x = mid + half * t;
            let rho = eps * profile.delta_eps(x - c, eps) * w * half;
            let s = (x - xl) / h;
            left += rho * (1.0 - s);
            right += rho * s;
        }
        let (il, ir) = if periodic {
            (e.rem_euclid(n) as usize, (e + 1).rem_euclid(n) as usize)
        } else {
            if e < 0 || e >= n {
                continue;
            }
            (e as usize, e as usize + 1)
        };
        load[il] += left;
        load[ir] += right;
    }
}

fn check_resolution(h: f64, params: &Params, eps: f64, opts: &FemOptions) -> Result<()> {
    let points = (eps * params.sigma0() / h * (1.0 + 1e-12)).floor() as usize;
    if points < opts.min_points_per_bump {
        return Err(Error::UnderResolved { points, required: opts.min_points_per_bump });
    }
    Ok(())
}

fn stiffness(h: f64, m: f64, eps: f64) -> (f64, f64) {
    let e2 = eps * eps;
    (2.0 * e2 / h + 2.0 * m * m * h / 3.0, -e2 / h + m * m * h / 6.0)
}

/// Periodic P1 solution on `[y_{-N-1}, y_{-N-1} + L)`.
///
/// The default mesh places `ceil(F M / sigma0)` elements in each reference cell.
pub fn solve_periodic(
    cfg: &ChainConfig,
    params: &Params,
    source: Source<'_>,
    opts: &FemOptions,
) -> Result<Field> {
    let eps = cfg.eps();
    let len = cfg.period();
    let elements = opts.elements.unwrap_or_else(|| {
        let per_cell = (cfg.strain() * opts.points_per_bump as f64 / params.sigma0()).ceil();
        cfg.size() * per_cell as usize
    });
    let h = len / elements as f64;
    check_resolution(h, params, eps, opts)?;
    let x0 = cfg.position(-(cfg.n() as i64) - 1);
    let mut load = vec![0.0; elements];
    match source {
        Source::Atoms(centres) => {
            for &c in centres {
                assemble_bump(&mut load, x0, h, elements, true, c, params, eps);
            }
        }
        Source::Constant(c) => load.iter_mut().for_each(|b| *b = c * h),
    }
    let (diag, off) = stiffness(h, params.m(), eps);
    let values = solve_cyclic(diag, off, &load);
    Ok(Field { x0, h, elements, values, load, diag, off, kind: BoundaryKind::Periodic })
}

/// Dirichlet P1 solution on `[a_L, a_R]` with strongly imposed boundary values.
pub fn solve_dirichlet(
    atoms: &[f64],
    bd: &BoundaryData,
    params: &Params,
    eps: f64,
    opts: &FemOptions,
) -> Result<Field> {
    check_dirichlet_separation(atoms, bd, params, eps)?;
    solve_dirichlet_source(Source::Atoms(atoms), bd, params, eps, opts)
}

/// As [`solve_dirichlet`] for an arbitrary source.
pub fn solve_dirichlet_source(
    source: Source<'_>,
    bd: &BoundaryData,
    params: &Params,
    eps: f64,
    opts: &FemOptions,
) -> Result<Field> {
    let len = bd.delta_a();
    let elements = opts.elements.unwrap_or_else(|| {
        ((len / eps) * opts.points_per_bump as f64 / params.sigma0()).ceil() as usize
    });
    if elements < 2 {
        return Err(Error::Param("Dirichlet mesh needs at least two elements".into()));
    }
    let h = len / elements as f64;
    check_resolution(h, params, eps, opts)?;
    let mut load = vec![0.0; elements + 1];
    match source {
        Source::Atoms(centres) => {
            for &c in centres {
                assemble_bump(&mut load, bd.a_l, h, elements, false, c, params, eps);
            }
        }
        Source::Constant(c) => {
            load.iter_mut().for_each(|b| *b = c * h);
            load[0] *= 0.5;
            load[elements] *= 0.5;
        }
    }
    let (diag, off) = stiffness(h, params.m(), eps);
    let free = elements - 1;
    let mut rhs = load[1..elements].to_vec();
    rhs[0] -= off * bd.g_l;
    rhs[free - 1] -= off * bd.g_r;
    let inner = solve_tridiagonal(&vec![off; free], &vec![diag; free], &vec![off; free], &rhs);
    let mut values = Vec::with_capacity(elements + 1);
    values.push(bd.g_l);
    values.extend(inner);
    values.push(bd.g_r);
    Ok(Field {
        x0: bd.a_l,
        h,
        elements,
        values,
        load,
        diag,
        off,
        kind: BoundaryKind::Dirichlet { g_l: bd.g_l, g_r: bd.g_r },
    })
}

/// Checks strain and boundary clearance of a Dirichlet atom set.
pub fn check_dirichlet_separation(
    atoms: &[f64],
    bd: &BoundaryData,
    params: &Params,
    eps: f64,
) -> Result<()> {
    let sigma0 = params.sigma0();
    let r = eps * params.profile().half_width();
    for (i, w) in atoms.windows(2).enumerate() {
        if (w[1] - w[0]) / eps < sigma0 {
            return Err(Error::Separation(format!(
                "atoms {i} and {} closer than eps sigma0",
                i + 1
            )));
        }
    }
    if let (Some(&first), Some(&last)) = (atoms.first(), atoms.last()) {
        if first - bd.a_l <= r || bd.a_r - last <= r {
            return Err(Error::Separation(
                "outermost bump support reaches the boundary".into(),
            ));
        }
    }
    Ok(())
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / den } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// Solves the constant-coefficient cyclic tridiagonal system by Sherman-Morrison.
pub fn solve_cyclic(diag: f64, off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    assert!(n >= 3, "cyclic system needs at least three unknowns");
    let gamma = -diag;
    let mut d = vec![diag; n];
    d[0] -= gamma;
    d[n - 1] -= off * off / gamma;
    let sub = vec![off; n];
    let sup = vec![off; n];
    let x = solve_tridiagonal(&sub, &d, &sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = off;
    let z = solve_tridiagonal(&sub, &d, &sup, &u);
    let fact = (x[0] + off * x[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(a, b)| a - fact * b).collect()
}

/// Periodic centres covering the mesh: base atoms plus one image on each side.
pub fn periodic_centres(cfg: &ChainConfig) -> Vec<f64> {
    let n = cfg.n() as i64;
    cfg.positions(-n, n)
}

/// Separation check used before periodic solves that assume it.
pub fn check_periodic_separation(cfg: &ChainConfig, params: &Params) -> Result<()> {
    check_separation(cfg, params.profile())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_solver() {
        let n = 7;
        let (d, o) = (4.0, -1.0);
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = solve_cyclic(d, o, &rhs);
        for i in 0..n {
            let r = d * x[i] + o * (x[(i + n - 1) % n] + x[(i + 1) % n]) - rhs[i];
            assert!(r.abs() < 1e-14);
        }
    }
}
