use acfield::ac::{AcMethod, AcVariant};
use acfield::lattice::{project_mean_zero, random_smooth_mode, seminorm_u12};
use acfield::minimize::*;
use acfield::model::{Atomistic, EnergyModel};
use acfield::{ChainConfig, Error, Params};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn equilibrium_needs_no_iterations() {
    let params = Params::standard();
    let y0 = ChainConfig::homogeneous(20, 1.1).unwrap();
    let r = minimize(&Atomistic { params }, &ExternalForce::zero(20), &y0, &MinimizeOptions::default()).unwrap();
    assert!(r.converged && r.iterations <= 1);
    assert_eq!(r.energies.len(), r.iterations + 1);
}

#[test]
fn sine_force_atomistic_minimiser() {
    let params = Params::standard();
    let n = 30;
    let model = Atomistic { params };
    let f = ExternalForce::sine(n, 0.5, 1);
    let y0 = ChainConfig::homogeneous(n, 1.1).unwrap();
    let r = minimize(&model, &f, &y0, &MinimizeOptions::default()).unwrap();
    assert!(r.converged);
    let tol = 1e-10 * params.m() * y0.eps();
    assert!(r.gradient_norm <= tol);
    let y = &r.y_final;
    assert!(y.second_diff().iter().any(|v| v.abs() > 1e-3));
    let mean = y.displacement().iter().sum::<f64>() / y.size() as f64;
    assert!(mean.abs() < 1e-15);
    for w in r.energies.windows(2).take(r.iterations - r.noise_steps) {
        assert!(w[1] < w[0]);
    }
    let (g, _) = projected_gradient(&model, &f, y).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let mut u = random_smooth_mode(n, 5, &mut rng);
        project_mean_zero(&mut u);
        let pair: f64 = g.iter().zip(&u).map(|(a, b)| a * b).sum();
        assert!(pair.abs() <= tol * seminorm_u12(&u, y.eps()), "{pair}");
    }
    // the gradient at the solution still agrees with finite differences
    let h = 1e-5 * y.eps();
    let grad = model.gradient(y).unwrap();
    for i in [0, 17, 44] {
        let mut e = vec![0.0; y.size()];
        e[i] = 1.0;
        let fd = (model.energy(&y.perturbed(&e, h).unwrap()).unwrap()
            - model.energy(&y.perturbed(&e, -h).unwrap()).unwrap())
            / (2.0 * h);
        assert!((fd - grad[i]).abs() < 1e-6 * grad.iter().fold(0.0_f64, |a, b| a.max(b.abs())));
    }
}

#[test]
fn coupled_minimisers_compare() {
    let params = Params::standard();
    let n = 40;
    let at = Atomistic { params };
    let y0 = ChainConfig::homogeneous(n, 1.1).unwrap();
    let opts = MinimizeOptions::default();
    for v in [AcVariant::OptimalData, AcVariant::CellData] {
        let qc = AcMethod::new(v, n / 4).model(&params);
        let zero = compare_minimizers(&at, &qc, &ExternalForce::zero(n), &y0, &opts).unwrap();
        assert!(zero.error <= zero.tau + 1e-10, "{}", zero.error);
        let c = compare_minimizers(&at, &qc, &ExternalForce::sine(n, 0.5, 1), &y0, &opts).unwrap();
        assert!(c.error.is_finite() && c.error > 0.0);
        assert!(c.b.converged && c.b.min_strain > params.sigma0());
        assert!(c.bound() > c.weighted_y2 && c.tau < 1e-8);
    }
}

#[test]
fn guard_and_force_validation() {
    let params = Params::standard();
    let y0 = ChainConfig::homogeneous(10, 0.52).unwrap();
    let err = minimize(&Atomistic { params }, &ExternalForce::zero(10), &y0, &MinimizeOptions::default()).unwrap_err();
    assert!(matches!(err, Error::StrainGuard { .. }));
    assert!(matches!(ExternalForce::new(vec![1.0, 0.0, 0.0]), Err(Error::NotMeanZero { .. })));
    assert!(ExternalForce::new(vec![1.0, -0.5, -0.5]).is_ok());
}

#[test]
fn iteration_cap_is_reported() {
    let params = Params::standard();
    let y0 = ChainConfig::homogeneous(20, 1.1).unwrap();
    let f = ExternalForce::sine(20, 0.5, 1);
    let opts = MinimizeOptions { max_iter: 1, ..Default::default() };
    let err = minimize(&Atomistic { params }, &f, &y0, &opts).unwrap_err();
    assert!(matches!(err, Error::MaxIterations { iters: 1, .. }));
    let opts = MinimizeOptions { allow_unconverged: true, ..opts };
    let r = minimize(&Atomistic { params }, &f, &y0, &opts).unwrap();
    assert!(!r.converged && r.iterations == 1);
}
