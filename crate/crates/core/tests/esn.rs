mod common;

use echoverse::esn::{
    check_esp_condition, esn_product, esn_step, esn_sum, spectral_radius, CouplingScale,
    EsnBuilder, EsnSystem, Squash,
};
use echoverse::poly::Polynomial;
use echoverse::rng;
use echoverse::signals::Orbit;
use nalgebra::DMatrix;
use rand::Rng as _;

fn random_readout(r: &mut rng::Rng, n: usize) -> Polynomial {
    let terms = (0..4).map(|_| {
        let e = (0..n).map(|_| r.random_range(0..3u32)).collect();
        (r.random_range(-1.0..1.0), e)
    });
    Polynomial::from_terms(n, terms).unwrap()
}

fn random_system(seed: u64, n: usize, radius: f64) -> EsnSystem {
    let mut r = rng::stream(seed, 0, 0);
    let sys = EsnBuilder {
        state_dim: n,
        input_dim: 1,
        scale: CouplingScale::SpectralRadius(radius),
        input_scale: 0.7,
        bias_scale: 0.2,
        squash: Squash::Tanh,
    }
    .build(&mut r)
    .unwrap();
    let p = random_readout(&mut r, n);
    sys.with_readout(p).unwrap()
}

fn input(seed: u64, len: usize) -> Orbit {
    Orbit::random_uniform(&mut rng::stream(seed, 1, 0), len, 1, 1.0).unwrap()
}

#[test]
fn spectral_radius_matches_characteristic_polynomial_roots() {
    let mut r = rng::stream(1, 2, 0);
    for n in [2usize, 3, 5] {
        for _ in 0..10 {
            let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
            let want = common::spectral_radius_oracle(&a);
            assert!((spectral_radius(&a).unwrap() - want).abs() < 1e-8);
        }
    }
    assert!((spectral_radius(&DMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-14);
    let d = DMatrix::from_diagonal(&nalgebra::dvector![0.2, -0.9]);
    assert!((spectral_radius(&d).unwrap() - 0.9).abs() < 1e-14);
}

#[test]
#[allow(clippy::needless_range_loop)]
fn step_matches_naive_loops() {
    let sys = random_system(3, 6, 0.9);
    let mut r = rng::stream(3, 3, 0);
    let x: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..1.0)).collect();
    let u = [0.37];
    let got = esn_step(&x, &u, &sys).unwrap();
    for i in 0..6 {
        let mut acc = sys.bias()[i] + sys.input_weights()[(i, 0)] * u[0];
        for j in 0..6 {
            acc += sys.coupling()[(i, j)] * x[j];
        }
        assert!((got[i] - acc.tanh()).abs() < 1e-12);
    }
}

#[test]
fn direct_sums_realize_sums_and_products() {
    for case in 0..10u64 {
        let s1 = random_system(10 + case, 3, 0.8);
        let s2 = random_system(50 + case, 2, 0.6);
        let lambda = rng::stream(case, 4, 0).random_range(-3.0..3.0);
        let u = input(case, 80);
        let y1 = s1.run(&u, 10, &[0.0; 3]).unwrap().outputs;
        let y2 = s2.run(&u, 10, &[0.0; 2]).unwrap().outputs;
        let sum = esn_sum(&s1, &s2, lambda)
            .unwrap()
            .run(&u, 10, &[0.0; 5])
            .unwrap()
            .outputs;
        let prod = esn_product(&s1, &s2)
            .unwrap()
            .run(&u, 10, &[0.0; 5])
            .unwrap()
            .outputs;
        for k in 0..y1.len() {
            assert!((sum.value(k) - (y1.value(k) + lambda * y2.value(k))).abs() < 1e-12);
            assert!((prod.value(k) - y1.value(k) * y2.value(k)).abs() < 1e-12);
        }
    }
}

#[test]
fn algebra_identities() {
    let s1 = random_system(1, 3, 0.5);
    let u = input(2, 40);
    let y1 = s1.run(&u, 0, &[0.0; 3]).unwrap().outputs;
    let zero = random_system(2, 2, 0.5)
        .with_readout(Polynomial::zero(2))
        .unwrap();
    let one = random_system(3, 2, 0.5)
        .with_readout(Polynomial::constant(2, 1.0))
        .unwrap();
    for combined in [
        esn_sum(&s1, &zero, 4.0).unwrap(),
        esn_sum(&s1, &random_system(4, 2, 0.5), 0.0).unwrap(),
        esn_product(&s1, &one).unwrap(),
    ] {
        let y = combined.run(&u, 0, &[0.0; 5]).unwrap().outputs;
        assert_eq!(y.as_flat(), y1.as_flat());
    }
}

#[test]
fn esp_is_preserved_by_direct_sums() {
    for (r1, r2) in [(0.3, 0.8), (0.9, 1.2), (1.1, 0.5), (0.95, 0.95)] {
        let s1 = random_system(5, 4, r1);
        let s2 = random_system(6, 3, r2);
        let both = check_esp_condition(&s1).unwrap() && check_esp_condition(&s2).unwrap();
        let sum = esn_sum(&s1, &s2, 1.0).unwrap();
        assert_eq!(check_esp_condition(&sum).unwrap(), both);
        let rho = spectral_radius(sum.coupling()).unwrap();
        assert!((rho - f64::max(r1, r2)).abs() < 1e-10);
        assert_eq!(
            check_esp_condition(&esn_product(&s1, &s2).unwrap()).unwrap(),
            both
        );
    }
}

#[test]
fn states_stay_in_the_squashing_range() {
    let sys = random_system(7, 8, 1.5);
    let run = sys.run(&input(7, 200), 0, &[0.0; 8]).unwrap();
    assert!(run.states.as_flat().iter().all(|x| x.abs() <= 1.0));
}

#[test]
fn contractive_trajectories_converge_monotonically() {
    let mut r = rng::stream(8, 0, 0);
    let sys = EsnBuilder {
        state_dim: 6,
        scale: CouplingScale::OperatorNorm(0.7),
        ..EsnBuilder::default()
    }
    .build(&mut r)
    .unwrap();
    let xa: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..1.0)).collect();
    let xb: Vec<f64> = (0..6).map(|_| r.random_range(-1.0..1.0)).collect();
    let trace = sys.convergence_trace(&input(8, 120), &xa, &xb).unwrap();
    assert!(trace[1..].windows(2).all(|w| w[1] <= w[0]));
    assert!(*trace.last().unwrap() < 1e-15);
    let a = sys.run(&input(9, 200), 100, &xa).unwrap().outputs;
    let b = sys.run(&input(9, 200), 100, &xb).unwrap().outputs;
    for k in 0..a.len() {
        assert!((a.value(k) - b.value(k)).abs() < 1e-8);
    }
}

#[test]
fn json_files_round_trip() {
    let sys = random_system(12, 3, 0.9);
    let back = EsnSystem::from_json(&sys.to_json().unwrap()).unwrap();
    assert_eq!(back, sys);
    assert!(EsnSystem::from_json(r#"{"coupling": [[0.5]]}"#).is_err());
}
