use acfield::density::Params;
use acfield::field::*;
use acfield::lattice::ChainConfig;
use acfield::quad::{breakpoints, gl20};

fn sine(n: usize, strain: f64, amp: f64) -> ChainConfig {
    let p = 2 * n + 1;
    let u = (0..p)
        .map(|i| amp * (std::f64::consts::TAU * i as f64 / p as f64).sin())
        .collect();
    ChainConfig::from_displacement(n, strain, u).unwrap()
}

/// `int G(x, z) eps sum_k delta_eps(z - y_k) dz` by quadrature of the kernel.
fn kernel_field(atoms: &[f64], bd: &BoundaryData, params: &Params, eps: f64, x: f64) -> f64 {
    let profile = params.profile();
    let r = eps * profile.half_width();
    atoms
        .iter()
        .map(|&y| {
            let pts = breakpoints(y - r, y + r, [y, x]);
            eps * gl20().integrate_pieces(&pts, 1, |z| {
                green_dirichlet(bd, params.m(), eps, x, z) * profile.delta_eps(z - y, eps)
            })
        })
        .sum()
}

fn rates(err: &[f64]) -> Vec<f64> {
    err.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn periodic_fem_converges_to_image_sum() {
    let params = Params::standard();
    let cfg = sine(10, 1.1, 0.05);
    let exact = PeriodicGreenField::new(&cfg, &params);
    let base = solve_periodic(&cfg, &params, Source::Atoms(&cfg.base_positions()), &FemOptions::default())
        .unwrap()
        .elements();
    let err: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&s| {
            let f = solve_periodic(
                &cfg,
                &params,
                Source::Atoms(&cfg.base_positions()),
                &FemOptions::with_elements(s * base),
            )
            .unwrap();
            f.nodes()
                .iter()
                .zip(f.values())
                .map(|(&x, v)| (exact.value(x) - v).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(rates(&err).iter().all(|&r| r >= 1.8), "{err:?}");
}

#[test]
fn dirichlet_fem_converges_to_kernel() {
    let params = Params::standard();
    let cfg = sine(12, 1.1, 0.05);
    let eps = cfg.eps();
    let atoms = cfg.positions(-4, 4);
    let bd = BoundaryData::new(
        0.5 * (cfg.position(-5) + cfg.position(-4)),
        0.5 * (cfg.position(4) + cfg.position(5)),
        0.0,
        0.0,
    );
    let closed = DirichletGreenField::new(atoms.clone(), bd, &params, eps);
    for i in 0..=10 {
        let x = bd.a_l + bd.delta_a() * i as f64 / 10.0;
        let k = kernel_field(&atoms, &bd, &params, eps, x);
        assert!((k - closed.value(x)).abs() < 1e-12 * (1.0 + k.abs()), "{k} {}", closed.value(x));
    }
    let base = solve_dirichlet(&atoms, &bd, &params, eps, &FemOptions::default()).unwrap().elements();
    let err: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&s| {
            let f = solve_dirichlet(&atoms, &bd, &params, eps, &FemOptions::with_elements(s * base)).unwrap();
            f.nodes()
                .iter()
                .zip(f.values())
                .map(|(&x, v)| (kernel_field(&atoms, &bd, &params, eps, x) - v).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(rates(&err).iter().all(|&r| r >= 1.8), "{err:?}");
}

#[test]
fn dirichlet_field_is_phi0_plus_xi() {
    let params = Params::standard();
    let cfg = sine(12, 1.2, 0.05);
    let eps = cfg.eps();
    let atoms = cfg.positions(-3, 3);
    let bd = BoundaryData::new(cfg.position(-4) + 0.01, cfg.position(4) - 0.01, 0.3, -0.2);
    let full = DirichletGreenField::new(atoms.clone(), bd, &params, eps);
    let (_, xi) = xi_closed_form(&bd, params.m(), eps);
    assert!((full.value(bd.a_l) - 0.3).abs() < 1e-13);
    assert!((full.value(bd.a_r) + 0.2).abs() < 1e-13);
    for i in 1..10 {
        let x = bd.a_l + bd.delta_a() * i as f64 / 10.0;
        let sum = full.eval_phi0(x).0 + xi.value(x);
        assert!((sum - full.value(x)).abs() < 1e-13);
        // the homogeneous part solves the equation without source
        let h = 1e-4 * eps;
        let lap = (xi.value(x + h) - 2.0 * xi.value(x) + xi.value(x - h)) / (h * h);
        assert!((-eps * eps * lap + params.m().powi(2) * xi.value(x)).abs() < 1e-5);
    }
}

#[test]
fn lipschitz_bound_on_boundary_data() {
    let params = Params::standard();
    let cfg = sine(20, 1.1, 0.05);
    let atoms = cfg.positions(-6, 6);
    let a_l = 0.5 * (cfg.position(-7) + cfg.position(-6));
    let a_r = 0.5 * (cfg.position(6) + cfg.position(7));
    let r = field_lipschitz_check(
        &atoms,
        &BoundaryData::new(a_l, a_r, 0.4, 0.4),
        &BoundaryData::new(a_l, a_r, 0.1, 0.5),
        &params,
        cfg.eps(),
        200,
    );
    assert!(r.holds(), "{r:?}");
}

#[test]
fn green_kernels() {
    let params = Params::standard();
    let eps = 0.05;
    let bd = BoundaryData::new(-0.3, 0.4, 0.0, 0.0);
    for &z in &[-0.2, 0.0, 0.35] {
        assert!(green_dirichlet(&bd, 1.0, eps, bd.a_l, z).abs() < 1e-14);
        assert!(green_dirichlet(&bd, 1.0, eps, bd.a_r, z).abs() < 1e-14);
        let g = green_dirichlet(&bd, 1.0, eps, 0.1, z);
        assert!((g - green_dirichlet(&bd, 1.0, eps, z, 0.1)).abs() < 1e-12 * g.abs());
        assert!(g <= eval_green_free(1.0, eps, 0.1 - z));
    }
    let cfg = ChainConfig::homogeneous(6, 1.3).unwrap();
    let x = cfg.position(2) + 0.2 * cfg.eps();
    let (v, _) = eval_green_periodic(&cfg, &params, x);
    let (w, _) = eval_green_periodic(&cfg, &params, x + cfg.period());
    assert!((v - w).abs() < 1e-13 * v);
}
