//! Energy of a finite atom block with Dirichlet data for the field.

use super::stress::{integrate_stress, StressFunction};
use super::PAIR_CUTOFF;
use crate::density::Params;
use crate::error::{Error, Result};
use crate::field::fem::{check_dirichlet_separation, solve_dirichlet};
use crate::field::{solve_t, BoundaryData, DirichletGreenField, FemOptions};

/// Sorted atoms `y_{-K..=K}` inside `(a_L, a_R)` with boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletChain {
    pub atoms: Vec<f64>,
    pub bd: BoundaryData,
    pub eps: f64,
}

impl DirichletChain {
    /// Validates strains and the clearance of the outer bumps from the boundary.
    pub fn new(atoms: Vec<f64>, bd: BoundaryData, eps: f64, params: &Params) -> Result<Self> {
        if !(bd.a_r > bd.a_l) {
            return Err(Error::Separation("a_R must exceed a_L".into()));
        }
        check_dirichlet_separation(&atoms, &bd, params, eps)?;
        Ok(Self { atoms, bd, eps })
    }

    pub fn with_g(&self, g_l: f64, g_r: f64) -> Self {
        Self { bd: self.bd.with_g(g_l, g_r), ..self.clone() }
    }

    pub fn tau(&self, params: &Params) -> f64 {
        self.bd.tau(params.m(), self.eps)
    }

    pub fn field(&self, params: &Params) -> DirichletGreenField {
        DirichletGreenField::new(self.atoms.clone(), self.bd, params, self.eps)
    }

    /// Ordered pair sum `sum_{i != j} e^{-(m/eps)|y_i - y_j|}`.
    fn pair_sum(&self, params: &Params) -> f64 {
        let alpha = params.alpha(self.eps);
        let a = &self.atoms;
        let mut s = 0.0;
        for i in 0..a.len() {
            for &yk in &a[i + 1..] {
                let t = alpha * (yk - a[i]);
                if t > PAIR_CUTOFF {
                    break;
                }
                s += (-t).exp();
            }
        }
        2.0 * s
    }

    /// `(eps/4m)(mu^2 P + n S)`: direct interactions including self-energies.
    fn direct_energy(&self, params: &Params) -> f64 {
        let mu = params.mu();
        self.eps / (4.0 * params.m())
            * (mu * mu * self.pair_sum(params) + self.atoms.len() as f64 * params.self_coupling())
    }
}

/// `gamma_L = (mu/m) sum_j e^{-(m/eps)(y_j - a_L)}` and `gamma_R` likewise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub gamma_l: f64,
    pub gamma_r: f64,
}

pub fn gamma_pair(chain: &DirichletChain, params: &Params) -> GammaPair {
    let alpha = params.alpha(chain.eps);
    let c = params.mu() / params.m();
    let bd = &chain.bd;
    GammaPair {
        gamma_l: c * chain.atoms.iter().map(|&y| (-alpha * (y - bd.a_l)).exp()).sum::<f64>(),
        gamma_r: c * chain.atoms.iter().map(|&y| (-alpha * (bd.a_r - y)).exp()).sum::<f64>(),
    }
}

/// Boundary data at which the energy is stationary in `g`.
pub fn g_star(chain: &DirichletChain, params: &Params) -> (f64, f64) {
    let tau = chain.tau(params);
    let GammaPair { gamma_l, gamma_r } = gamma_pair(chain, params);
    let d = (1.0 - tau) * (1.0 + tau);
    ((gamma_l + tau * gamma_r) / d, (gamma_r + tau * gamma_l) / d)
}

/// `E_{a,g}(y) = -I_a(phi_0) - I_a(xi_{a,g})`, both in closed form.
pub fn energy_dirichlet(chain: &DirichletChain, params: &Params) -> f64 {
    let m = params.m();
    let eps = chain.eps;
    let tau = chain.tau(params);
    let GammaPair { gamma_l, gamma_r } = gamma_pair(chain, params);
    let phi0 = chain.direct_energy(params)
        - m * eps / 4.0 * (gamma_l * gamma_l + gamma_r * gamma_r - 2.0 * tau * gamma_l * gamma_r)
            / (1.0 - tau * tau);
    let (c_l, c_r) = solve_t(tau, chain.bd.g_l, chain.bd.g_r);
    let xi = -m * eps
        * (0.5 * (c_l * c_l + c_r * c_r) * (1.0 - tau * tau) - (c_l * gamma_l + c_r * gamma_r));
    phi0 + xi
}

/// `-I_a(phi_h)` for the finite-element field.
pub fn energy_dirichlet_fem(chain: &DirichletChain, params: &Params, opts: &FemOptions) -> Result<f64> {
    let f = solve_dirichlet(&chain.atoms, &chain.bd, params, chain.eps, opts)?;
    Ok(-f.functional())
}

/// Energy at `g = g*` read as direct plus mirror-atom interactions.
///
/// The reflected double integrals reduce to `(mu^2 eps / 4m) sum_ij
/// e^{-(m/eps)(y_i + y_j - 2 a_L)}` (and the mirror image at `a_R`); the
/// remaining term is `(m eps / 4) tau / (1 - tau^2) (tau g_L^2 + 2 g_L g_R + tau g_R^2)`
/// in terms of the gammas.
pub fn mirror_energy(chain: &DirichletChain, params: &Params) -> f64 {
    let m = params.m();
    let mu = params.mu();
    let eps = chain.eps;
    let alpha = params.alpha(eps);
    let bd = &chain.bd;
    let a = &chain.atoms;
    let mut refl_l = 0.0;
    let mut refl_r = 0.0;
    for &yi in a {
        for &yk in a {
            refl_l += (-alpha * (yi + yk - 2.0 * bd.a_l)).exp();
            refl_r += (-alpha * (2.0 * bd.a_r - yi - yk)).exp();
        }
    }
    let refl = mu * mu * eps / (4.0 * m) * (refl_l + refl_r);
    let tau = chain.tau(params);
    let GammaPair { gamma_l, gamma_r } = gamma_pair(chain, params);
    let m_tau = m * eps / 4.0 / (1.0 - tau * tau)
        * (tau * gamma_l * gamma_l + 2.0 * gamma_l * gamma_r + tau * gamma_r * gamma_r);
    chain.direct_energy(params) + refl + tau * m_tau
}

/// `D_{y_j} E_{a,g}` for every atom of the block.
pub fn d_energy_dirichlet_y(chain: &DirichletChain, params: &Params) -> Vec<f64> {
    let mu = params.mu();
    let m = params.m();
    let alpha = params.alpha(chain.eps);
    let c = chain.field(params).total_coeffs();
    let a = &chain.atoms;
    let bd = &chain.bd;
    let half = 0.5 * mu * mu;
    (0..a.len())
        .map(|j| {
            let yj = a[j];
            let mut s = 0.0;
            for &yk in &a[j + 1..] {
                let t = alpha * (yk - yj);
                if t > PAIR_CUTOFF {
                    break;
                }
                s += (-t).exp();
            }
            for &yk in a[..j].iter().rev() {
                let t = alpha * (yj - yk);
                if t > PAIR_CUTOFF {
                    break;
                }
                s -= (-t).exp();
            }
            let el = (-alpha * (yj - bd.a_l)).exp();
            let er = (-alpha * (bd.a_r - yj)).exp();
            half * s - m * mu * c.c_l * el + m * mu * c.c_r * er
        })
        .collect()
}

/// `(D_{a_L} E, D_{a_R} E)` from the stress on the two outer intervals.
pub fn d_energy_dirichlet_a(chain: &DirichletChain, params: &Params) -> (f64, f64) {
    let field = chain.field(params);
    let stress = StressFunction::new(&field, chain.atoms.clone(), chain.eps, params);
    let bd = &chain.bd;
    let first = chain.atoms.first().copied().unwrap_or(bd.a_r);
    let last = chain.atoms.last().copied().unwrap_or(bd.a_l);
    if chain.atoms.is_empty() {
        let s = integrate_stress(&stress, bd.a_l, bd.a_r) / bd.delta_a();
        return (-s, s);
    }
    let left = -integrate_stress(&stress, bd.a_l, first) / (first - bd.a_l);
    let right = integrate_stress(&stress, last, bd.a_r) / (bd.a_r - last);
    (left, right)
}

/// `D_g E = -m eps ((1 - tau^2) c - gamma)^T T_a^{-1}`.
pub fn d_energy_dirichlet_g(chain: &DirichletChain, params: &Params) -> (f64, f64) {
    let m = params.m();
    let tau = chain.tau(params);
    let GammaPair { gamma_l, gamma_r } = gamma_pair(chain, params);
    let (c_l, c_r) = solve_t(tau, chain.bd.g_l, chain.bd.g_r);
    let w = 1.0 - tau * tau;
    let (v_l, v_r) = solve_t(tau, w * c_l - gamma_l, w * c_r - gamma_r);
    (-m * chain.eps * v_l, -m * chain.eps * v_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_block_with_zero_data_has_no_energy() {
        let params = Params::standard();
        let chain = DirichletChain::new(vec![], BoundaryData::new(0.0, 1.0, 0.0, 0.0), 0.1, &params)
            .unwrap();
        assert_eq!(energy_dirichlet(&chain, &params), 0.0);
    }
}
