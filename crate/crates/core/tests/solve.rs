use mixlap_core::fields::{Constant, Radial, Shifted};
use mixlap_core::kernel::mixed_apply;
use mixlap_core::solve::SOLVER_TOLERANCE;
use mixlap_core::{
    build_mesh, lift_nonhomogeneous, solve_dirichlet, OperatorParams, OperatorParts,
    QuadratureSpec, StiffnessSystem,
};

fn system(n: usize, s: f64) -> StiffnessSystem {
    let mesh = build_mesh(-1.0, 1.0, n).unwrap();
    let p = OperatorParams::mixed_1d(s).unwrap();
    StiffnessSystem::assemble(&mesh, &p, &QuadratureSpec::default()).unwrap()
}

#[test]
fn zero_load_gives_zero_solution() {
    let r = solve_dirichlet(&system(31, 0.5), &Constant::new(0.0, 1)).unwrap();
    assert!(r.solution.coeffs.iter().all(|v| *v == 0.0));
    assert_eq!(r.energy, 0.0);
    assert!(r.ratio_energy.is_infinite());
}

#[test]
fn constant_load_is_nonnegative_and_symmetric() {
    let r = solve_dirichlet(&system(255, 0.5), &Constant::new(1.0, 1)).unwrap();
    assert!(r.solution.min() >= -1e-10);
    let u = &r.solution.coeffs;
    for i in 0..u.len() {
        assert!((u[i] - u[u.len() - 1 - i]).abs() < 1e-10);
    }
    assert!(r.residual_norm <= SOLVER_TOLERANCE);
    assert!(r.energy >= r.x_norm * r.x_norm * (1.0 - 1e-12));
}

#[test]
fn nonlocal_term_lowers_the_maximum() {
    let sys = system(255, 0.25);
    let f = Constant::new(1.0, 1);
    let mixed = solve_dirichlet(&sys, &f).unwrap().solution.max();
    let local = solve_dirichlet(&sys.clone().with_parts(OperatorParts::LocalOnly), &f)
        .unwrap()
        .solution
        .max();
    assert!(mixed <= local + 1e-12);
}

#[test]
fn energy_identity_and_determinism() {
    let sys = system(127, 0.6);
    let f = Shifted {
        inner: Radial::bump(1, 0.5, 2.0),
        shift: 0.2,
    };
    let a = solve_dirichlet(&sys, &f).unwrap();
    let b = solve_dirichlet(&sys, &f).unwrap();
    assert!(a.energy_identity_error() < 1e-9);
    assert_eq!(a.solution.coeffs, b.solution.coeffs);
}

#[test]
fn energy_ratio_is_stable_under_refinement() {
    let f = Constant::new(1.0, 1);
    let ratios: Vec<f64> = [63, 127, 255, 511]
        .iter()
        .map(|&n| solve_dirichlet(&system(n, 0.5), &f).unwrap().ratio_energy)
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    assert!(hi / lo - 1.0 < 0.1, "{ratios:?}");
}

#[test]
fn zero_exterior_data_matches_plain_solve() {
    let sys = system(63, 0.4);
    let f = Constant::new(1.0, 1);
    let plain = solve_dirichlet(&sys, &f).unwrap();
    let lifted =
        lift_nonhomogeneous(&sys, &f, &Constant::new(0.0, 1), &QuadratureSpec::default()).unwrap();
    for (p, q) in plain.solution.coeffs.iter().zip(&lifted.solution.coeffs) {
        assert!((p - q).abs() < 1e-14);
    }
}

#[test]
fn nonnegative_exterior_bump_gives_nonnegative_solution() {
    let sys = system(63, 0.5);
    let g = Shifted {
        inner: Radial::bump(1, 0.5, 4.0),
        shift: 2.0,
    };
    let r =
        lift_nonhomogeneous(&sys, &Constant::new(0.0, 1), &g, &QuadratureSpec::default()).unwrap();
    assert!(r.solution.min() >= -1e-10);
    assert!(r.solution.max() > 0.0);
}

#[test]
fn truncated_constant_exterior_data() {
    let s = 0.5;
    let sys = system(63, s);
    let quad = QuadratureSpec::default();
    let g = Radial::plateau(1, 40.0, 80.0, 1.0);
    let r = lift_nonhomogeneous(&sys, &Constant::new(0.0, 1), &g, &quad).unwrap();
    // |u - 1| is at most sup|ℒg| times the torsion bound 1/2 on (-1, 1)
    let lg = (0..=20)
        .map(|k| -1.0 + 0.1 * k as f64)
        .map(|x| mixed_apply(&g, &[x], &sys.params, &quad).unwrap().abs())
        .fold(0.0, f64::max);
    assert!(lg > 0.0 && lg < 0.05);
    for v in &r.solution.coeffs {
        assert!((v - 1.0).abs() <= 0.5 * lg + 1e-6, "{v} vs bound {lg}");
    }
}

#[test]
fn exterior_data_with_kinks_inside_is_rejected() {
    let sys = system(15, 0.5);
    let g = Radial::bump(1, 0.5, 1.0);
    assert!(
        lift_nonhomogeneous(&sys, &Constant::new(0.0, 1), &g, &QuadratureSpec::default()).is_err()
    );
}
