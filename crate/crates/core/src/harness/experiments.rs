//! The canned experiments, one per [`ExperimentKind`].

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentKind, ExperimentSpec, ForceShape};
use super::output::ResultRow;
use crate::ac::{
    ac_energy, ac_forces, atomistic_block, consistency_error, probe_set, stability_spectrum, AcMethod,
    AcVariant,
};
use crate::cauchy_born::{
    cb_cell_energy, cb_forces, cb_total_energy, field_convergence_bound, field_convergence_measured,
    CellState,
};
use crate::density::Params;
use crate::energy::{
    d_energy_dirichlet_a, d_energy_dirichlet_g, d_energy_dirichlet_y, energy_dirichlet, energy_periodic,
    forces_periodic, g_star, mirror_energy, DirichletChain,
};
use crate::error::Result;
use crate::field::{
    green_dirichlet, solve_dirichlet, solve_periodic, BoundaryData, FemOptions, PeriodicGreenField,
    ScalarField, Source,
};
use crate::lattice::{
    band_config, norm_weighted, random_config, sine_config, ChainConfig, DiscreteNormParams,
};
use crate::minimize::{compare_to_reference, minimize, ExternalForce, MinimizeOptions};
use crate::model::Atomistic;
use crate::quad::{breakpoints, gl20};

/// Runs the experiment named in the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let params = spec.params()?;
    match spec.kind {
        ExperimentKind::GradientAudit => gradient_audit(spec, &params),
        ExperimentKind::SolverConvergence => solver_convergence(spec, &params),
        ExperimentKind::OptimalBc => optimal_bc(spec, &params),
        ExperimentKind::GhostForce => ghost_force(spec, &params),
        ExperimentKind::CbClosedForm => cb_closed_form(spec, &params),
        ExperimentKind::FieldBound => field_bound(spec, &params),
        ExperimentKind::Stability => stability(spec, &params),
        ExperimentKind::ErrorConvergence => error_convergence(spec, &params),
        ExperimentKind::BcGap => bc_gap(spec, &params),
        ExperimentKind::ConsistencySweep => consistency_sweep(spec, &params),
    }
}

fn rng_for(spec: &ExperimentSpec, n: usize, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(spec.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

fn methods(spec: &ExperimentSpec, k: usize) -> [AcMethod; 2] {
    [AcVariant::OptimalData, AcVariant::CellData].map(|v| AcMethod::new(v, k).with_tau_max(spec.tau_max))
}

/// Amplitude of random strain perturbations that keeps bumps well apart.
fn random_amp(spec: &ExperimentSpec) -> f64 {
    0.3_f64.min(0.5 * (spec.strain - spec.sigma0))
}

/// Amplitude of the smooth sine displacement used by the field and solver checks.
fn smooth_amp(spec: &ExperimentSpec) -> f64 {
    0.05_f64.min(0.25 * (spec.strain - spec.sigma0) / std::f64::consts::PI)
}

/// `max |a - b| / max |b|`.
pub fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let s = b.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Central differences of `f` at `x` with step `h`.
pub fn central_diff<F>(x: &[f64], h: f64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut p = x.to_vec();
            p[i] += h;
            let ep = f(&p)?;
            p[i] = x[i] - h;
            let em = f(&p)?;
            Ok((ep - em) / (2.0 * h))
        })
        .collect()
}

/// Central differences along coordinate directions of a configuration.
pub fn config_fd<F>(cfg: &ChainConfig, f: F) -> Result<Vec<f64>>
where
    F: Fn(&ChainConfig) -> Result<f64> + Sync,
{
    let h = 1e-5 * cfg.eps();
    (0..cfg.size())
        .into_par_iter()
        .map(|i| {
            let mut e = vec![0.0; cfg.size()];
            e[i] = 1.0;
            Ok((f(&cfg.perturbed(&e, h)?)? - f(&cfg.perturbed(&e, -h)?)?) / (2.0 * h))
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_slope(&lx, &ly)
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn gradient_audit(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    const TOL: f64 = 1e-5;
    let kind = spec.kind;
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let t0 = Instant::now();
        let k = spec.k(n);
        let [m1, m2] = methods(spec, k);
        let mut rng = rng_for(spec, n, 1);
        let mut worst = [
            ("periodic_forces", 0.0),
            ("dirichlet_dy", 0.0),
            ("dirichlet_da", 0.0),
            ("dirichlet_dg", 0.0),
            ("cb_forces", 0.0),
            ("ac_forces_method1", 0.0),
            ("ac_forces_method2", 0.0),
        ];
        let mut tau: f64 = 0.0;
        for _ in 0..spec.configurations {
            let cfg = random_config(n, spec.strain, random_amp(spec), &mut rng)?;
            let eps = cfg.eps();
            let h = 1e-5 * eps;
            let mut errs = [0.0; 7];
            errs[0] = max_rel_error(&forces_periodic(&cfg, params)?, &config_fd(&cfg, |c| energy_periodic(c, params))?);
            let block = atomistic_block(&cfg, &m1, params)?;
            tau = tau.max(block.tau(params));
            let (gl, gr) = (block.bd.g_l, block.bd.g_r);
            let block = block.with_g(1.1 * gl, 0.9 * gr);
            let with_atoms = |a: &[f64]| DirichletChain { atoms: a.to_vec(), ..block.clone() };
            let fd_y = central_diff(&block.atoms, h, |a| Ok(energy_dirichlet(&with_atoms(a), params)))?;
            errs[1] = max_rel_error(&d_energy_dirichlet_y(&block, params), &fd_y);
            let bd = block.bd;
            let fd_a = central_diff(&[bd.a_l, bd.a_r], h, |a| {
                let b = BoundaryData::new(a[0], a[1], bd.g_l, bd.g_r);
                Ok(energy_dirichlet(&DirichletChain { bd: b, ..block.clone() }, params))
            })?;
            let (da_l, da_r) = d_energy_dirichlet_a(&block, params);
            errs[2] = max_rel_error(&[da_l, da_r], &fd_a);
            let hg = 1e-5 * bd.g_l.abs().max(bd.g_r.abs());
            let fd_g = central_diff(&[bd.g_l, bd.g_r], hg, |g| Ok(energy_dirichlet(&block.with_g(g[0], g[1]), params)))?;
            let (dg_l, dg_r) = d_energy_dirichlet_g(&block, params);
            errs[3] = max_rel_error(&[dg_l, dg_r], &fd_g);
            errs[4] = max_rel_error(&cb_forces(&cfg, params)?, &config_fd(&cfg, |c| cb_total_energy(c, params))?);
            for (slot, m) in [(5, &m1), (6, &m2)] {
                errs[slot] = max_rel_error(&ac_forces(&cfg, m, params)?, &config_fd(&cfg, |c| ac_energy(c, m, params))?);
            }
            for (w, e) in worst.iter_mut().zip(errs) {
                w.1 = f64::max(w.1, e);
            }
        }
        let t = secs(t0);
        rows.extend(worst.iter().map(|&(q, v)| {
            ResultRow::new(kind, q, v).chain(n, Some(k)).tau(tau).bound(TOL).pass(v <= TOL).timed(t)
        }));
    }
    Ok(rows)
}

/// `int G(x, z) eps sum_k delta_eps(z - y_k) dz` by quadrature of the kernel.
pub fn dirichlet_kernel_field(atoms: &[f64], bd: &BoundaryData, params: &Params, eps: f64, x: f64) -> f64 {
    let profile = params.profile();
    let r = eps * profile.half_width();
    atoms
        .iter()
        .filter(|&&y| (-(params.m() / eps) * ((x - y).abs() - r).max(0.0)).exp() > 1e-18)
        .map(|&y| {
            let pts = breakpoints(y - r, y + r, [y, x]);
            eps * gl20().integrate_pieces(&pts, 1, |z| {
                green_dirichlet(bd, params.m(), eps, x, z) * profile.delta_eps(z - y, eps)
            })
        })
        .sum()
}

fn convergence_rows(
    spec: &ExperimentSpec,
    label: &str,
    n: usize,
    k: Option<usize>,
    err: &[f64],
    t: f64,
) -> Vec<ResultRow> {
    let kind = spec.kind;
    let mut rows: Vec<ResultRow> = err
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            ResultRow::new(kind, format!("{label}_max_nodal_error_refine{}", 1 << i), e).chain(n, k).timed(t)
        })
        .collect();
    let rate = err.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    rows.push(ResultRow::new(kind, format!("{label}_min_rate"), rate).chain(n, k).bound(1.8).pass(rate >= 1.8).timed(t));
    rows
}

fn solver_convergence(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let t0 = Instant::now();
        let cfg = sine_config(n, spec.strain, smooth_amp(spec))?;
        let eps = cfg.eps();
        let opts = FemOptions::with_points(spec.mesh_points);
        let atoms = cfg.base_positions();
        let exact = PeriodicGreenField::new(&cfg, params);
        let base = solve_periodic(&cfg, params, Source::Atoms(&atoms), &opts)?.elements();
        let err = [1, 2, 4]
            .iter()
            .map(|&s| {
                let f = solve_periodic(&cfg, params, Source::Atoms(&atoms), &FemOptions { elements: Some(s * base), ..opts })?;
                Ok(max_nodal_error(&f.nodes(), f.values(), |x| exact.value(x)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(convergence_rows(spec, "periodic", n, None, &err, secs(t0)));

        let t0 = Instant::now();
        let k = spec.k(n);
        let ki = k as i64;
        let block = cfg.positions(-ki, ki);
        let bd = BoundaryData::new(
            0.5 * (cfg.position(-ki - 1) + cfg.position(-ki)),
            0.5 * (cfg.position(ki) + cfg.position(ki + 1)),
            0.0,
            0.0,
        );
        let base = solve_dirichlet(&block, &bd, params, eps, &opts)?.elements();
        let err = [1, 2, 4]
            .iter()
            .map(|&s| {
                let f = solve_dirichlet(&block, &bd, params, eps, &FemOptions { elements: Some(s * base), ..opts })?;
                Ok(max_nodal_error(&f.nodes(), f.values(), |x| dirichlet_kernel_field(&block, &bd, params, eps, x)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(convergence_rows(spec, "dirichlet", n, Some(k), &err, secs(t0)));
    }
    Ok(rows)
}

fn max_nodal_error<F: Fn(f64) -> f64 + Sync>(nodes: &[f64], values: &[f64], exact: F) -> f64 {
    nodes
        .par_iter()
        .zip(values)
        .map(|(&x, v)| (exact(x) - v).abs())
        .reduce(|| 0.0, f64::max)
}

fn optimal_bc(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let kind = spec.kind;
    let m = params.m();
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let t0 = Instant::now();
        let k = spec.k(n);
        let [m1, _] = methods(spec, k);
        let mut rng = rng_for(spec, n, 3);
        let (mut closed, mut fd, mut mirror, mut tau): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..spec.configurations {
            let cfg = random_config(n, spec.strain, random_amp(spec), &mut rng)?;
            let eps = cfg.eps();
            let block = atomistic_block(&cfg, &m1, params)?;
            tau = tau.max(block.tau(params));
            let (dl, dr) = d_energy_dirichlet_g(&block, params);
            closed = closed.max(dl.abs().max(dr.abs()) / (m * eps));
            let (gl, gr) = g_star(&block, params);
            let h = 1e-3 * gl.abs().max(gr.abs()).max(1.0);
            let d = central_diff(&[gl, gr], h, |g| Ok(energy_dirichlet(&block.with_g(g[0], g[1]), params)))?;
            fd = fd.max(d[0].abs().max(d[1].abs()) / (m * eps));
            let e = energy_dirichlet(&block, params);
            mirror = mirror.max((mirror_energy(&block, params) - e).abs() / e.abs());
        }
        let t = secs(t0);
        let row = |q: &str, v: f64, b: f64| {
            ResultRow::new(kind, q, v).chain(n, Some(k)).tau(tau).bound(b).pass(v <= b).timed(t)
        };
        rows.push(row("dg_at_gstar_closed_over_m_eps", closed, 1e-10));
        rows.push(row("dg_at_gstar_fd_over_m_eps", fd, 1e-6));
        rows.push(row("mirror_rel_difference", mirror, 1e-6 + 10.0 * tau));
    }
    Ok(rows)
}

fn ghost_force(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let kind = spec.kind;
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let k = spec.k(n);
        for &f in &spec.strains {
            let cfg = ChainConfig::homogeneous(n, f)?;
            for m in methods(spec, k) {
                let t0 = Instant::now();
                let tau = atomistic_block(&cfg, &m, params)?.tau(params);
                let force = ac_forces(&cfg, &m, params)?.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
                let bound = 1e-8 + 10.0 * tau;
                rows.push(
                    ResultRow::new(kind, format!("max_force_{}_F{f}", m.variant.label()), force)
                        .chain(n, Some(k))
                        .tau(tau)
                        .bound(bound)
                        .pass(force <= bound)
                        .timed(secs(t0)),
                );
            }
        }
    }
    Ok(rows)
}

/// `(eps/2) int delta_eps(x - y) psi(x) dx` over one bump of the cell's chain.
pub fn half_rho_psi(cell: &CellState, params: &Params, eps: f64) -> f64 {
    let profile = params.profile();
    let r = eps * profile.half_width();
    let y = cell.y_right;
    let pts = breakpoints(y - r, y + r, [y]);
    0.5 * eps * gl20().integrate_pieces(&pts, 4, |x| profile.delta_eps(x - y, eps) * cell.value(x))
}

fn cb_closed_form(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    const TOL: f64 = 1e-9;
    let kind = spec.kind;
    let (lo, hi) = (spec.sigma0 + 0.2, 3.0_f64.max(spec.sigma0 + 0.4));
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        for i in 0..5 {
            let t0 = Instant::now();
            let s = lo + (hi - lo) * i as f64 / 4.0;
            let cfg = ChainConfig::homogeneous(n, s)?;
            let eps = cfg.eps();
            let cell = CellState::new(&cfg, 0, params);
            let exact = cb_cell_energy(s, params, eps);
            let err = (half_rho_psi(&cell, params, eps) - exact).abs() / exact.abs();
            rows.push(
                ResultRow::new(kind, format!("rel_error_strain{s:.3}"), err)
                    .chain(n, None)
                    .bound(TOL)
                    .pass(err <= TOL)
                    .timed(secs(t0)),
            );
        }
    }
    Ok(rows)
}

fn field_bound(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let kind = spec.kind;
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        for &amp in &spec.amplitudes {
            let t0 = Instant::now();
            let cfg = sine_config(n, spec.strain, amp)?;
            let phi = PeriodicGreenField::new(&cfg, params);
            let idx: Vec<i64> = cfg.indices().collect();
            let ratios: Vec<(f64, f64)> = idx
                .par_iter()
                .map(|&j| {
                    let (bv, bg) = field_convergence_bound(&cfg, params, j);
                    let (mv, mg) = field_convergence_measured(&cfg, params, &phi, j, 16);
                    let r = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a / b };
                    (r(mv, bv), r(mg, bg))
                })
                .collect();
            let (rv, rg) = ratios.iter().fold((0.0_f64, 0.0_f64), |(a, b), (c, d)| (a.max(*c), b.max(*d)));
            let t = secs(t0);
            for (q, v) in [("value", rv), ("gradient", rg)] {
                rows.push(
                    ResultRow::new(kind, format!("max_{q}_ratio_amp{amp}"), v)
                        .chain(n, None)
                        .bound(1.0)
                        .pass(v <= 1.0)
                        .timed(t),
                );
            }
        }
    }
    Ok(rows)
}

/// Kinked state: strain `F + 0.2` from beyond the left interface up to bond
/// `K + 1 - d`, `F - 0.1` elsewhere, so that the only kink inside the
/// atomistic block lies `d` cells from the right interface.
pub fn kinked(spec: &ExperimentSpec, n: usize, k: usize, d: usize) -> Result<ChainConfig> {
    let top = k as i64 + 1 - d as i64;
    let bottom = -(k as i64) - 4;
    let width = (top - bottom).max(0) as usize;
    band_config(n, spec.strain - 0.1, spec.strain + 0.2, top, width)
}

fn stability(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    const SLACK: f64 = 1e-6;
    let kind = spec.kind;
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let k = spec.k(n);
        let [m1, m2] = methods(spec, k);
        let t0 = Instant::now();
        let hom = ChainConfig::homogeneous(n, spec.strain)?;
        let r = stability_spectrum(&hom, &m1, params)?;
        rows.push(
            ResultRow::new(kind, "method1_lambda_min_homogeneous", r.lambda_min)
                .chain(n, Some(k))
                .bound(r.bound - SLACK)
                .pass(r.lambda_min >= r.bound - SLACK)
                .timed(secs(t0)),
        );
        let per_offset = spec
            .offsets
            .par_iter()
            .map(|&d| {
                let t0 = Instant::now();
                let cfg = kinked(spec, n, k, d)?;
                let r1 = stability_spectrum(&cfg, &m1, params)?;
                let r2 = stability_spectrum(&cfg, &m2, params)?;
                Ok((d, r1, r2, secs(t0)))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut deficits = Vec::new();
        for (d, r1, r2, t) in per_offset {
            rows.push(
                ResultRow::new(kind, format!("method1_lambda_min_kink{d}"), r1.lambda_min)
                    .chain(n, Some(k))
                    .bound(r1.bound - SLACK)
                    .pass(r1.lambda_min >= r1.bound - SLACK)
                    .timed(t),
            );
            rows.push(ResultRow::new(kind, format!("method2_lambda_min_kink{d}"), r2.lambda_min).chain(n, Some(k)).timed(t));
            let deficit = r1.lambda_min - r2.lambda_min;
            rows.push(ResultRow::new(kind, format!("method2_deficit_kink{d}"), deficit).chain(n, Some(k)).timed(t));
            deficits.push(deficit);
        }
        let monotone = deficits.windows(2).all(|w| w[1] < w[0]);
        rows.push(
            ResultRow::new(kind, "method2_deficit_decreasing_offsets", deficits.len() as f64)
                .chain(n, Some(k))
                .pass(monotone),
        );
    }
    Ok(rows)
}

/// `C = max_i err_i / bound_i`, the smallest constant valid across a sweep.
pub fn fit_constant(err: &[f64], bound: &[f64]) -> f64 {
    err.iter().zip(bound).map(|(e, b)| e / b).fold(0.0, f64::max)
}

fn error_convergence(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let kind = spec.kind;
    let opts = MinimizeOptions::default();
    let per_n = spec
        .n_list
        .par_iter()
        .map(|&n| {
            let t0 = Instant::now();
            let k = spec.k(n);
            let f = match spec.force_shape {
                ForceShape::Sine => ExternalForce::sine(n, spec.force_amplitude, spec.force_mode),
                ForceShape::None => ExternalForce::zero(n),
            };
            let y0 = ChainConfig::homogeneous(n, spec.strain)?;
            let reference = minimize(&Atomistic { params: *params }, &f, &y0, &opts)?;
            let out = methods(spec, k)
                .iter()
                .map(|m| {
                    let c = compare_to_reference(reference.clone(), &m.model(params), &f, &opts)?;
                    Ok((c.error, c.bound(), c.tau))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((n, k, out, secs(t0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (mi, label) in ["method1", "method2"].iter().enumerate() {
        let mut eps = Vec::new();
        let mut err = Vec::new();
        let mut bound = Vec::new();
        for (n, k, out, t) in &per_n {
            let (e, b, tau) = out[mi];
            rows.push(ResultRow::new(kind, format!("{label}_error"), e).chain(*n, Some(*k)).tau(tau).bound(b).timed(*t));
            eps.push(crate::lattice::eps_of(*n));
            err.push(e);
            bound.push(b);
        }
        if eps.len() >= 2 {
            let slope = loglog_slope(&eps, &err);
            let c = fit_constant(&err, &bound);
            rows.push(
                ResultRow::new(kind, format!("{label}_slope"), slope)
                    .fitted(c)
                    .pass((0.8..=1.2).contains(&slope)),
            );
        }
    }
    Ok(rows)
}

fn bc_gap(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let kind = spec.kind;
    let m = params.m();
    let mut rows = Vec::new();
    for &n in &spec.n_list {
        let k = spec.k(n);
        let [_, m2] = methods(spec, k);
        let mut gaps = Vec::new();
        let mut bounds = Vec::new();
        let mut s0 = f64::INFINITY;
        for &d in &spec.offsets {
            let t0 = Instant::now();
            let cfg = kinked(spec, n, k, d)?;
            let eps = cfg.eps();
            let block = atomistic_block(&cfg, &m2, params)?;
            let (gl, gr) = g_star(&block, params);
            let gap = (block.bd.g_l - gl).abs().max((block.bd.g_r - gr).abs());
            s0 = s0.min(cfg.min_strain());
            let norm = DiscreteNormParams::new(cfg.min_strain(), m, k);
            let tau = block.tau(params);
            let bound = eps.sqrt() * norm_weighted(&cfg.second_diff(), eps, &norm) + tau;
            rows.push(
                ResultRow::new(kind, format!("gap_kink{d}"), gap).chain(n, Some(k)).tau(tau).bound(bound).timed(secs(t0)),
            );
            gaps.push(gap);
            bounds.push(bound);
        }
        let c = fit_constant(&gaps, &bounds);
        rows.push(ResultRow::new(kind, "gap_constant", c).chain(n, Some(k)).fitted(c).pass(c.is_finite()));
        if gaps.len() >= 2 {
            let ds: Vec<f64> = spec.offsets.iter().map(|&d| d as f64).collect();
            let lg: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
            let rate = -linear_slope(&ds, &lg);
            let target = m * s0;
            rows.push(
                ResultRow::new(kind, "gap_decay_rate", rate)
                    .chain(n, Some(k))
                    .bound(target)
                    .pass((rate - target).abs() <= 0.3 * target),
            );
        }
    }
    Ok(rows)
}

fn consistency_sweep(spec: &ExperimentSpec, params: &Params) -> Result<Vec<ResultRow>> {
    let kind = spec.kind;
    let per_n = spec
        .n_list
        .par_iter()
        .map(|&n| {
            let t0 = Instant::now();
            let k = spec.k(n);
            let cfg = sine_config(n, spec.strain, smooth_amp(spec))?;
            let probes = probe_set(n, 8, &mut rng_for(spec, n, 10));
            let out = methods(spec, k)
                .iter()
                .map(|m| consistency_error(&cfg, m, params, &probes))
                .collect::<Result<Vec<_>>>()?;
            Ok((n, k, out, secs(t0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (mi, label) in ["method1", "method2"].iter().enumerate() {
        let mut eps = Vec::new();
        let mut dual = Vec::new();
        let mut rhs = Vec::new();
        for (n, k, out, t) in &per_n {
            let r = &out[mi];
            rows.push(
                ResultRow::new(kind, format!("{label}_dual_norm"), r.dual_norm)
                    .chain(*n, Some(*k))
                    .tau(r.tau)
                    .bound(r.rhs())
                    .pass(r.probe_sup <= r.dual_norm * (1.0 + 1e-9))
                    .timed(*t),
            );
            eps.push(crate::lattice::eps_of(*n));
            dual.push(r.dual_norm);
            rhs.push(r.rhs());
        }
        if eps.len() >= 2 {
            let c = fit_constant(&dual, &rhs);
            rows.push(ResultRow::new(kind, format!("{label}_slope"), loglog_slope(&eps, &dual)).fitted(c));
        }
    }
    Ok(rows)
}
