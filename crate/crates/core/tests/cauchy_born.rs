use acfield::cauchy_born::*;
use acfield::density::Params;
use acfield::energy::stress::{integrate_stress, StressFunction};
use acfield::field::{PeriodicGreenField, ScalarField};
use acfield::lattice::{random_config, ChainConfig};
use acfield::quad::{breakpoints, gl20, GaussLegendre};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent cell field: truncated direct sum of bump convolutions.
fn psi_direct(x: f64, cell: &CellState, params: &Params, eps: f64) -> f64 {
    let d = cell.y_right - cell.y_left;
    let m = params.m();
    let profile = params.profile();
    let r = eps * profile.half_width();
    let gl = GaussLegendre::new(30);
    let kmax = (40.0 * eps / (m * d)).ceil() as i64 + 2;
    (-kmax..=kmax)
        .map(|k| {
            let y = cell.y_right + d * k as f64;
            let f = |z: f64| profile.delta_eps(z - y, eps) * (-(m / eps) * (x - z).abs()).exp();
            if x > y - r && x < y + r {
                gl.integrate(y - r, x, f) + gl.integrate(x, y + r, f)
            } else {
                gl.integrate(y - r, y + r, f)
            }
        })
        .sum::<f64>()
        / (2.0 * m)
}

fn half_rho_psi<F: Fn(f64) -> f64>(y: f64, params: &Params, eps: f64, psi: F) -> f64 {
    let profile = params.profile();
    let r = eps * profile.half_width();
    let pts = breakpoints(y - r, y + r, [y]);
    0.5 * eps * gl20().integrate_pieces(&pts, 4, |x| profile.delta_eps(x - y, eps) * psi(x))
}

fn sine(n: usize, strain: f64, amp: f64) -> ChainConfig {
    let p = 2 * n + 1;
    let u = (0..p)
        .map(|i| amp * (std::f64::consts::TAU * i as f64 / p as f64).sin())
        .collect();
    ChainConfig::from_displacement(n, strain, u).unwrap()
}

#[test]
fn closed_form_matches_field_quadrature() {
    let params = Params::standard();
    let n = 20;
    for &s in &[0.7, 1.0, 1.5, 2.2, 3.0] {
        let cfg = ChainConfig::homogeneous(n, s).unwrap();
        let eps = cfg.eps();
        let cell = CellState::new(&cfg, 3, &params);
        let exact = cb_cell_energy(s, &params, eps);
        let via_lattice = half_rho_psi(cell.y_right, &params, eps, |x| cell.value(x));
        let via_direct = half_rho_psi(cell.y_right, &params, eps, |x| psi_direct(x, &cell, &params, eps));
        assert!((via_lattice - exact).abs() <= 1e-9 * exact, "s={s}: {via_lattice} {exact}");
        assert!((via_direct - exact).abs() <= 1e-9 * exact, "s={s}: {via_direct} {exact}");
    }
}

#[test]
fn isolated_atom_limit_and_monotonicity() {
    let params = Params::standard();
    let eps = 0.02;
    let far = cb_cell_energy(60.0, &params, eps);
    assert!((far - params.e_self(eps)).abs() < 1e-14 * far);
    for i in 0..40 {
        let s = 0.55 + 0.1 * i as f64;
        let (_, d1, d2) = cb_cell_derivatives(s, &params, eps);
        assert!(d1 < 0.0 && d2 > 0.0);
    }
}

#[test]
fn cell_field_matches_periodic_field_on_homogeneous_chain() {
    let params = Params::standard();
    let cfg = ChainConfig::homogeneous(15, 1.2).unwrap();
    let phi = PeriodicGreenField::new(&cfg, &params);
    let cell = CellState::new(&cfg, 4, &params);
    let d = cell.y_right - cell.y_left;
    for i in 0..=20 {
        let x = cell.y_left + d * i as f64 / 20.0;
        let (a, da) = phi.eval(x);
        let (b, db) = cell.eval(x);
        assert!((a - b).abs() < 1e-12 * a.abs());
        assert!((da - db).abs() < 1e-10 * (1.0 + da.abs()));
        let (c, _) = cell.eval(x + d);
        assert!((b - c).abs() < 1e-12 * b.abs());
        let sa = StressFunction::new(&phi, cfg.positions(-2, 8), cfg.eps(), &params).sigma(x);
        assert!((sa - cell.stress(x)).abs() < 1e-9 * (1.0 + sa.abs()));
    }
}

#[test]
fn stress_weak_form_equals_cell_energy_derivative() {
    let params = Params::standard();
    let cfg = random_config(10, 1.2, 0.3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let eps = cfg.eps();
    for j in [-3, 0, 5] {
        let cell = CellState::new(&cfg, j, &params);
        let (_, d1, _) = cb_cell_derivatives(cell.strain(), &params, eps);
        let w = cell.y_right - cell.y_left;
        // u_j - u_{j-1} = 1 changes y'_j by 1/eps
        let lhs = d1 / eps;
        let rhs = cell.stress_integral() / w;
        assert!((lhs - rhs).abs() < 1e-8 * lhs.abs(), "j={j}: {lhs} {rhs}");
        let direct = integrate_stress(
            &StressFunction::new(&cell, cell.local_atoms(), eps, &params),
            cell.y_left,
            cell.y_right,
        );
        assert_eq!(direct, cell.stress_integral());
    }
}

#[test]
fn forces_match_finite_differences_and_jensen() {
    let params = Params::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let cfg = random_config(12, 1.1, 0.3, &mut rng).unwrap();
        let f = cb_forces(&cfg, &params).unwrap();
        let h = 1e-5 * cfg.eps();
        for i in 0..cfg.size() {
            let mut e = vec![0.0; cfg.size()];
            e[i] = 1.0;
            let fd = (cb_total_energy(&cfg.perturbed(&e, h).unwrap(), &params).unwrap()
                - cb_total_energy(&cfg.perturbed(&e, -h).unwrap(), &params).unwrap())
                / (2.0 * h);
            assert!((fd - f[i]).abs() <= 1e-8 * (1.0 + f[i].abs()), "{fd} {}", f[i]);
        }
        let total = cb_total_energy(&cfg, &params).unwrap();
        let jensen = cfg.size() as f64 * cb_cell_energy(cfg.strain(), &params, cfg.eps());
        assert!(total >= jensen);
    }
    let hom = ChainConfig::homogeneous(12, 1.3).unwrap();
    assert!(cb_forces(&hom, &params).unwrap().iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn hessian_lower_bound() {
    let params = Params::standard();
    let cfg = ChainConfig::homogeneous(20, 1.1).unwrap();
    let p = cfg.size();
    let u: Vec<f64> = (0..p)
        .map(|i| (std::f64::consts::TAU * i as f64 / p as f64).sin())
        .collect();
    let r = cb_hessian_lower_bound_check(&cfg, &params, &u).unwrap();
    assert!(r.proof_bound_holds(), "{r:?}");
    assert!(r.nearest_share > 0.0 && r.nearest_share < 1.0);
    let stretched = ChainConfig::homogeneous(20, 8.0).unwrap();
    let t = cb_hessian_lower_bound_check(&stretched, &params, &u).unwrap();
    assert!(t.nearest_share > 0.99 && t.proof_ratio < 1.01, "{t:?}");
    let zero = cb_hessian_lower_bound_check(&cfg, &params, &vec![0.0; p]).unwrap();
    assert!(zero.proof_ratio.is_infinite());
}

#[test]
fn field_convergence_bound_holds_for_smooth_chains() {
    let params = Params::standard();
    for &amp in &[0.01, 0.05] {
        let cfg = sine(40, 1.1, amp);
        let phi = PeriodicGreenField::new(&cfg, &params);
        for j in cfg.indices() {
            let (bv, bg) = field_convergence_bound(&cfg, &params, j);
            let (mv, mg) = field_convergence_measured(&cfg, &params, &phi, j, 16);
            assert!(mv <= bv, "j={j}: {mv} > {bv}");
            assert!(mg <= bg, "j={j}: {mg} > {bg}");
        }
    }
}
