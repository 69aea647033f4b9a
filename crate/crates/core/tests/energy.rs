use acfield::energy::*;
use acfield::field::{fem, BoundaryData, FemOptions, PeriodicGreenField, Source};
use acfield::lattice::{random_config, random_smooth_mode, ChainConfig};
use acfield::Params;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let s = b.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    d / s
}

fn fd_gradient(cfg: &ChainConfig, f: impl Fn(&ChainConfig) -> f64) -> Vec<f64> {
    // Moves a single atom; from_displacement re-centres, which is a rigid
    // translation and leaves the energy unchanged.
    let h = 1e-5 * cfg.eps();
    (0..cfg.size())
        .map(|i| {
            let mut e = vec![0.0; cfg.size()];
            e[i] = 1.0;
            let p = cfg.perturbed(&e, h).unwrap();
            let m = cfg.perturbed(&e, -h).unwrap();
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn homogeneous_energy_per_atom_matches_geometric_series() {
    let params = Params::standard();
    for &f in &[1.0, 1.1, 1.7] {
        let cfg = ChainConfig::homogeneous(20, f).unwrap();
        let eps = cfg.eps();
        let e = energy_periodic(&cfg, &params).unwrap() / cfg.size() as f64;
        let q = (-params.m() * f).exp();
        let mu = params.mu();
        let want = mu * mu * eps / (2.0 * params.m()) * q / (1.0 - q) + params.e_self(eps);
        assert!((e - want).abs() < 1e-13 * want, "{e} vs {want}");
    }
}

#[test]
fn periodic_forces_match_finite_differences() {
    let params = Params::standard();
    for seed in 0..3 {
        let cfg = random_config(12, 1.1, 0.3, &mut rng(seed)).unwrap();
        let f = forces_periodic(&cfg, &params).unwrap();
        let fd = fd_gradient(&cfg, |c| energy_periodic(c, &params).unwrap());
        assert!(rel(&f, &fd) < 1e-6, "seed {seed}: {}", rel(&f, &fd));
    }
}

#[test]
fn homogeneous_forces_vanish() {
    let params = Params::standard();
    let cfg = ChainConfig::homogeneous(15, 1.2).unwrap();
    let f = forces_periodic(&cfg, &params).unwrap();
    assert!(f.iter().all(|x| x.abs() < 1e-14));
}

#[test]
fn small_chain_wraps_many_periods() {
    // N = 1: the pair sum must reach across many periods
    let params = Params::standard();
    let cfg = ChainConfig::from_displacement(1, 1.0, vec![0.0, 0.05, -0.05]).unwrap();
    let f = forces_periodic(&cfg, &params).unwrap();
    let fd = fd_gradient(&cfg, |c| energy_periodic(c, &params).unwrap());
    assert!(rel(&f, &fd) < 1e-6);
}

#[test]
fn exact_and_fem_energies_agree() {
    let params = Params::standard();
    let cfg = random_config(10, 1.1, 0.2, &mut rng(7)).unwrap();
    let exact = energy_periodic(&cfg, &params).unwrap();
    let mut errs = Vec::new();
    for pts in [16, 32, 64] {
        let e = energy_periodic_fem(&cfg, &params, &FemOptions::with_points(pts)).unwrap();
        errs.push((e - exact).abs() / exact);
    }
    assert!(errs[2] < 1e-4, "{errs:?}");
    assert!(errs[0] / errs[1] > 3.0 && errs[1] / errs[2] > 3.0, "{errs:?}");
}

#[test]
fn field_quadrature_energy_matches_pair_sum() {
    let params = Params::standard();
    let cfg = random_config(8, 1.1, 0.2, &mut rng(3)).unwrap();
    let field = PeriodicGreenField::new(&cfg, &params);
    let e = energy_from_field(&cfg, &params, &field);
    let exact = energy_periodic(&cfg, &params).unwrap();
    assert!((e - exact).abs() < 1e-12 * exact);
    let f = forces_from_field(&cfg, &params, &field);
    let fx = forces_periodic(&cfg, &params).unwrap();
    assert!(rel(&f, &fx) < 1e-10);
}

#[test]
fn fem_forces_converge_to_exact() {
    let params = Params::standard();
    let cfg = random_config(8, 1.1, 0.2, &mut rng(4)).unwrap();
    let exact = forces_periodic(&cfg, &params).unwrap();
    let e1 = rel(&forces_periodic_fem(&cfg, &params, &FemOptions::with_points(16)).unwrap(), &exact);
    let e2 = rel(&forces_periodic_fem(&cfg, &params, &FemOptions::with_points(32)).unwrap(), &exact);
    assert!(e2 < e1 / 3.0, "{e1} {e2}");
}

#[test]
fn energy_equals_minus_functional_at_fem_solution() {
    let params = Params::standard();
    let cfg = random_config(6, 1.1, 0.2, &mut rng(5)).unwrap();
    let atoms = cfg.base_positions();
    let f = fem::solve_periodic(&cfg, &params, Source::Atoms(&atoms), &FemOptions::default()).unwrap();
    let half = 0.5 * f.rho_dot_phi();
    assert!((f.functional() + half).abs() < 1e-10 * half);
}

#[test]
fn periodic_weak_form_matches_forces() {
    let params = Params::standard();
    let cfg = random_config(10, 1.1, 0.25, &mut rng(11)).unwrap();
    let forces = forces_periodic(&cfg, &params).unwrap();
    let mut r = rng(12);
    for _ in 0..4 {
        let u = random_smooth_mode(10, 5, &mut r);
        let lhs: f64 = forces.iter().zip(&u).map(|(a, b)| a * b).sum();
        let rhs = weak_form_periodic(&cfg, &params, &u).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }
}

fn block(params: &Params, seed: u64, g: (f64, f64)) -> DirichletChain {
    let cfg = random_config(12, 1.1, 0.25, &mut rng(seed)).unwrap();
    let atoms = cfg.positions(-5, 5);
    let a_l = 0.5 * (cfg.position(-6) + cfg.position(-5));
    let a_r = 0.5 * (cfg.position(5) + cfg.position(6));
    DirichletChain::new(atoms, BoundaryData::new(a_l, a_r, g.0, g.1), cfg.eps(), params).unwrap()
}

#[test]
fn dirichlet_energy_matches_fem() {
    let params = Params::standard();
    let chain = block(&params, 1, (0.4, 0.7));
    let exact = energy_dirichlet(&chain, &params);
    let e16 = energy_dirichlet_fem(&chain, &params, &FemOptions::with_points(16)).unwrap();
    let e64 = energy_dirichlet_fem(&chain, &params, &FemOptions::with_points(64)).unwrap();
    let (r16, r64) = ((e16 - exact).abs(), (e64 - exact).abs());
    assert!(r64 < 1e-4 * exact.abs() && r64 < r16 / 8.0, "{exact} {e16} {e64}");
}

#[test]
fn dirichlet_derivatives_match_finite_differences() {
    let params = Params::standard();
    let chain = block(&params, 2, (0.3, 0.9));
    let eps = chain.eps;
    let e = |c: &DirichletChain| energy_dirichlet(c, &params);

    let dy = d_energy_dirichlet_y(&chain, &params);
    let h = 1e-5 * eps;
    let fd: Vec<f64> = (0..chain.atoms.len())
        .map(|i| {
            let mut p = chain.clone();
            p.atoms[i] += h;
            let mut m = chain.clone();
            m.atoms[i] -= h;
            (e(&p) - e(&m)) / (2.0 * h)
        })
        .collect();
    assert!(rel(&dy, &fd) < 1e-6, "{}", rel(&dy, &fd));

    let (da_l, da_r) = d_energy_dirichlet_a(&chain, &params);
    let mut p = chain.clone();
    p.bd.a_r += h;
    let mut m = chain.clone();
    m.bd.a_r -= h;
    let fd_r = (e(&p) - e(&m)) / (2.0 * h);
    let mut p = chain.clone();
    p.bd.a_l += h;
    let mut m = chain.clone();
    m.bd.a_l -= h;
    let fd_l = (e(&p) - e(&m)) / (2.0 * h);
    assert!((da_r - fd_r).abs() < 1e-6 * fd_r.abs(), "{da_r} {fd_r}");
    assert!((da_l - fd_l).abs() < 1e-6 * fd_l.abs(), "{da_l} {fd_l}");

    let (dg_l, dg_r) = d_energy_dirichlet_g(&chain, &params);
    let hg = 1e-6;
    let g = chain.bd;
    let fd_gl = (e(&chain.with_g(g.g_l + hg, g.g_r)) - e(&chain.with_g(g.g_l - hg, g.g_r))) / (2.0 * hg);
    let fd_gr = (e(&chain.with_g(g.g_l, g.g_r + hg)) - e(&chain.with_g(g.g_l, g.g_r - hg))) / (2.0 * hg);
    assert!((dg_l - fd_gl).abs() < 1e-6 * fd_gl.abs(), "{dg_l} {fd_gl}");
    assert!((dg_r - fd_gr).abs() < 1e-6 * fd_gr.abs(), "{dg_r} {fd_gr}");
}

#[test]
fn optimal_data_make_g_derivative_vanish_and_match_mirror_energy() {
    let params = Params::standard();
    let chain = block(&params, 3, (0.0, 0.0));
    let (gl, gr) = g_star(&chain, &params);
    let opt = chain.with_g(gl, gr);
    let (a, b) = d_energy_dirichlet_g(&opt, &params);
    assert!(a.abs().max(b.abs()) < 1e-12 * params.m() * chain.eps);
    let e = energy_dirichlet(&opt, &params);
    let mirror = mirror_energy(&opt, &params);
    assert!((e - mirror).abs() < 1e-12 * e.abs(), "{e} {mirror}");
}
