//! Minimisation of `E_f(y) = E(y) + (f, y)_eps` over periodic configurations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{eps_of, norm_l2eps, norm_weighted, project_mean_zero, ChainConfig, DiscreteNormParams};
use crate::model::{fd_hessian, EnergyModel};

/// Mean-zero external force indexed `-N..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalForce {
    f: Vec<f64>,
}

impl ExternalForce {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        let scale = f.iter().fold(1.0_f64, |a, b| a.max(b.abs()));
        let mean = f.iter().sum::<f64>() / f.len().max(1) as f64;
        if mean.abs() > 1e-12 * scale {
            return Err(Error::NotMeanZero { mean });
        }
        Ok(Self { f })
    }

    pub fn zero(n: usize) -> Self {
        Self { f: vec![0.0; 2 * n + 1] }
    }

    /// `f_j = amp sin(mode pi eps j)`, which is mean-zero on `-N..=N`.
    pub fn sine(n: usize, amp: f64, mode: u32) -> Self {
        let eps = eps_of(n);
        let n = n as i64;
        let f = (-n..=n)
            .map(|j| amp * (mode as f64 * std::f64::consts::PI * eps * j as f64).sin())
            .collect();
        Self { f }
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    /// `(f, y)_eps = eps sum_j f_j y_j`.
    pub fn pairing(&self, cfg: &ChainConfig) -> f64 {
        cfg.eps() * self.f.iter().zip(cfg.base_positions()).map(|(a, b)| a * b).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Gradient tolerance; `None` means `1e-10 m eps`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Iterates keep `min y' >= sigma0 + guard_margin`.
    pub guard_margin: f64,
    /// Return an unconverged result instead of `MaxIterations`.
    pub allow_unconverged: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: None, max_iter: 60, guard_margin: 0.05, allow_unconverged: false }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub y_final: ChainConfig,
    /// `||r||_{l2_eps}` of the projected gradient `r`.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub min_strain: f64,
    pub max_strain: f64,
    /// `E_f` at every iterate, starting with `y0`.
    pub energies: Vec<f64>,
    /// Steps accepted because the energy change was at rounding level while
    /// the gradient decreased.
    pub noise_steps: usize,
}

fn total_energy<M: EnergyModel + ?Sized>(model: &M, f: &ExternalForce, cfg: &ChainConfig) -> Result<f64> {
    Ok(model.energy(cfg)? + f.pairing(cfg))
}

/// Projected gradient of `E_f` and its norm.
pub fn projected_gradient<M: EnergyModel + ?Sized>(
    model: &M,
    f: &ExternalForce,
    cfg: &ChainConfig,
) -> Result<(Vec<f64>, f64)> {
    let eps = cfg.eps();
    let mut r: Vec<f64> = model
        .gradient(cfg)?
        .into_iter()
        .zip(f.values())
        .map(|(g, fj)| g + eps * fj)
        .collect();
    project_mean_zero(&mut r);
    let norm = norm_l2eps(&r, eps);
    Ok((r, norm))
}

fn newton_direction<M: EnergyModel + ?Sized>(model: &M, cfg: &ChainConfig, r: &[f64]) -> Result<Vec<f64>> {
    let (h, _) = fd_hessian(model, cfg)?;
    let p = r.len();
    let diag = (0..p).map(|i| h[i][i]).sum::<f64>() / p as f64;
    let a = DMatrix::from_fn(p, p, |i, j| h[i][j] + diag / p as f64);
    let dmax = (0..p).map(|i| a[(i, i)]).fold(f64::MIN_POSITIVE, f64::max);
    let rv = DVector::from_column_slice(r);
    let step = match a.cholesky() {
        Some(ch) => {
            let mut s: Vec<f64> = (-ch.solve(&rv)).iter().copied().collect();
            project_mean_zero(&mut s);
            let dot: f64 = s.iter().zip(r).map(|(a, b)| a * b).sum();
            (dot < 0.0).then_some(s)
        }
        None => None,
    };
    // steepest descent when the Hessian is indefinite on U
    Ok(step.unwrap_or_else(|| r.iter().map(|v| -v / dmax).collect()))
}

/// Damped Newton with a finite-difference Hessian and backtracking.
pub fn minimize<M: EnergyModel + ?Sized>(
    model: &M,
    f: &ExternalForce,
    y0: &ChainConfig,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let params = model.params();
    let guard = params.sigma0() + opts.guard_margin;
    let (bond, strain) = y0.weakest_bond();
    if strain < guard {
        return Err(Error::StrainGuard { bond, strain, guard });
    }
    if f.values().len() != y0.size() {
        return Err(Error::Length { expected: y0.size(), got: f.values().len() });
    }
    let tol = opts.tol.unwrap_or(1e-10 * params.m() * y0.eps());
    let mut y = y0.clone();
    let mut e = total_energy(model, f, &y)?;
    let (mut r, mut gnorm) = projected_gradient(model, f, &y)?;
    let mut energies = vec![e];
    let mut noise_steps = 0;
    let mut iterations = 0;
    while gnorm > tol {
        if iterations == opts.max_iter {
            if opts.allow_unconverged {
                break;
            }
            return Err(Error::MaxIterations { iters: iterations, grad_norm: gnorm });
        }
        iterations += 1;
        let d = newton_direction(model, &y, &r)?;
        let slope: f64 = d.iter().zip(&r).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut guard_hit = None;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = match y.perturbed(&d, t) {
                Ok(c) => c,
                Err(_) => {
                    t *= 0.5;
                    continue;
                }
            };
            let (b, s) = trial.weakest_bond();
            if s < guard {
                guard_hit = Some((b, s));
                t *= 0.5;
                continue;
            }
            let et = match total_energy(model, f, &trial) {
                Ok(v) => v,
                Err(Error::Overlap { .. }) | Err(Error::NonMonotone { .. }) => {
                    t *= 0.5;
                    continue;
                }
                Err(err) => return Err(err),
            };
            if et <= e + 1e-4 * t * slope {
                accepted = Some((trial, et, false));
                break;
            }
            if (et - e).abs() <= 1e-13 * (1.0 + e.abs()) {
                let (_, gt) = projected_gradient(model, f, &trial)?;
                if gt < gnorm {
                    accepted = Some((trial, et, true));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, et, noise)) = accepted else {
            return Err(match guard_hit {
                Some((bond, strain)) => Error::StrainGuard { bond, strain, guard },
                None => Error::LineSearch { iter: iterations, grad_norm: gnorm },
            });
        };
        noise_steps += noise as usize;
        y = trial;
        e = et;
        energies.push(e);
        (r, gnorm) = projected_gradient(model, f, &y)?;
    }
    Ok(MinimizeResult {
        min_strain: y.min_strain(),
        max_strain: y.max_strain(),
        converged: gnorm <= tol,
        y_final: y,
        gradient_norm: gnorm,
        iterations,
        energies,
        noise_steps,
    })
}

/// Error between two minimisers and the first-order bound.
#[derive(Debug, Clone)]
pub struct Comparison {
    /// `||y_a' - y_b'||_{l2_eps}`.
    pub error: f64,
    /// `eps ||y_a''||_{w, s0}` with `s0 = min y_a'`.
    pub weighted_y2: f64,
    pub tau: f64,
    pub a: MinimizeResult,
    pub b: MinimizeResult,
}

impl Comparison {
    pub fn bound(&self) -> f64 {
        self.weighted_y2 + self.tau
    }
}

/// Minimises both models, the second starting from the first's minimiser.
pub fn compare_minimizers<A, B>(
    model_a: &A,
    model_b: &B,
    f: &ExternalForce,
    y0: &ChainConfig,
    opts: &MinimizeOptions,
) -> Result<Comparison>
where
    A: EnergyModel + ?Sized,
    B: EnergyModel + ?Sized,
{
    let a = minimize(model_a, f, y0, opts)?;
    compare_to_reference(a, model_b, f, opts)
}

/// As [`compare_minimizers`] with the reference minimiser already computed.
pub fn compare_to_reference<B: EnergyModel + ?Sized>(
    a: MinimizeResult,
    model_b: &B,
    f: &ExternalForce,
    opts: &MinimizeOptions,
) -> Result<Comparison> {
    let b = minimize(model_b, f, &a.y_final, opts)?;
    let ya = &a.y_final;
    let yb = &b.y_final;
    let eps = ya.eps();
    let diff: Vec<f64> = ya.first_diff().iter().zip(yb.first_diff()).map(|(p, q)| p - q).collect();
    let error = norm_l2eps(&diff, eps);
    let m = model_b.params().m();
    let k = model_b.coupling().map_or(0, |c| c.partition.k);
    let norm = DiscreteNormParams::new(ya.min_strain(), m, k);
    let weighted_y2 = eps * norm_weighted(&ya.second_diff(), eps, &norm);
    let tau = match model_b.coupling() {
        Some(c) => {
            let (a_l, a_r) = c.partition.interfaces(yb);
            (-(m / eps) * (a_r - a_l)).exp()
        }
        None => 0.0,
    };
    Ok(Comparison { error, weighted_y2, tau, a, b })
}
