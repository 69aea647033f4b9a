//! Common interface of the atomistic, Cauchy-Born and coupled energies.

use rayon::prelude::*;

use crate::ac::{ac_energy, ac_forces, AcMethod};
use crate::cauchy_born::{cb_forces, cb_total_energy};
use crate::density::Params;
use crate::energy::{energy_periodic, forces_periodic};
use crate::error::{Error, Result};
use crate::lattice::ChainConfig;

/// An energy on periodic configurations with an analytic gradient.
pub trait EnergyModel: Sync {
    fn name(&self) -> String;

    fn energy(&self, cfg: &ChainConfig) -> Result<f64>;

    /// `D_y E` indexed `-N..=N`.
    fn gradient(&self, cfg: &ChainConfig) -> Result<Vec<f64>>;

    fn params(&self) -> &Params;

    /// The coupling method, for coupled energies.
    fn coupling(&self) -> Option<&AcMethod> {
        None
    }
}

/// The fully atomistic periodic energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atomistic {
    pub params: Params,
}

impl EnergyModel for Atomistic {
    fn name(&self) -> String {
        "atomistic".into()
    }

    fn energy(&self, cfg: &ChainConfig) -> Result<f64> {
        energy_periodic(cfg, &self.params)
    }

    fn gradient(&self, cfg: &ChainConfig) -> Result<Vec<f64>> {
        forces_periodic(cfg, &self.params)
    }

    fn params(&self) -> &Params {
        &self.params
    }
}

/// The Cauchy-Born energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyBorn {
    pub params: Params,
}

impl EnergyModel for CauchyBorn {
    fn name(&self) -> String {
        "cauchy-born".into()
    }

    fn energy(&self, cfg: &ChainConfig) -> Result<f64> {
        cb_total_energy(cfg, &self.params)
    }

    fn gradient(&self, cfg: &ChainConfig) -> Result<Vec<f64>> {
        cb_forces(cfg, &self.params)
    }

    fn params(&self) -> &Params {
        &self.params
    }
}

/// A coupled energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupled {
    pub params: Params,
    pub method: AcMethod,
}

impl EnergyModel for Coupled {
    fn name(&self) -> String {
        self.method.variant.label().into()
    }

    fn energy(&self, cfg: &ChainConfig) -> Result<f64> {
        ac_energy(cfg, &self.method, &self.params)
    }

    fn gradient(&self, cfg: &ChainConfig) -> Result<Vec<f64>> {
        ac_forces(cfg, &self.method, &self.params)
    }

    fn params(&self) -> &Params {
        &self.params
    }

    fn coupling(&self) -> Option<&AcMethod> {
        Some(&self.method)
    }
}

/// Dense Hessian from central differences of the analytic gradient, with
/// step `1e-5 eps`, symmetrised. Returns the matrix and its relative asymmetry
/// before symmetrisation.
pub fn fd_hessian<M: EnergyModel + ?Sized>(model: &M, cfg: &ChainConfig) -> Result<(Vec<Vec<f64>>, f64)> {
    let p = cfg.size();
    let h = 1e-5 * cfg.eps();
    let cols: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            let gp = model.gradient(&cfg.perturbed(&e, h)?)?;
            let gm = model.gradient(&cfg.perturbed(&e, -h)?)?;
            Ok(gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        })
        .collect::<Result<_>>()?;
    let mut asym: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut hmat = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            asym = asym.max((cols[i][j] - cols[j][i]).abs());
            scale = scale.max(cols[i][j].abs());
            hmat[i][j] = 0.5 * (cols[i][j] + cols[j][i]);
        }
    }
    if !(scale > 0.0) {
        return Err(Error::LinAlg("Hessian vanishes".into()));
    }
    Ok((hmat, asym / scale))
}
