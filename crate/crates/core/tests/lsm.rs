use echoverse::lsm::{
    decay_filter_eval, separation_witness, spike_distance, DecayFilter, Kernel, SpikeTrain,
};
use echoverse::rng;
use echoverse::signals::FadingFunction;
use rand::Rng as _;

const DELTA: f64 = 0.5;
const HORIZON: f64 = 50.0;

/// Spike times on the grid `k/64` inside `[-span, 0]`, one per slot of
/// width `1.25`, so every difference and shift below is exact in binary.
fn dyadic_train(r: &mut rng::Rng, span: f64) -> SpikeTrain {
    let slots = (span / 1.25) as i64;
    let mut times = Vec::new();
    for j in (0..slots).rev() {
        if r.random::<f64>() < 0.6 {
            let start = -(j as f64 + 1.0) * 80.0;
            let k = r.random_range(20..60) as f64;
            times.push((start + k) / 64.0);
        }
    }
    SpikeTrain::new(times, DELTA, HORIZON).unwrap()
}

fn kernels() -> Vec<DecayFilter> {
    vec![
        DecayFilter::constant(1.0),
        DecayFilter::cosine(1.3, 0.4),
        DecayFilter::new(Kernel::Table {
            knots: vec![(-10.0, 0.5), (-2.0, -1.0), (0.0, 2.0)],
        })
        .unwrap(),
    ]
}

#[test]
fn decay_filters_are_time_invariant() {
    let mut r = rng::stream(1, 0, 0);
    for _ in 0..100 {
        let u = dyadic_train(&mut r, 20.0);
        let shift = -(r.random_range(1..1280) as f64) / 64.0;
        let v = u.shifted(shift).unwrap();
        let t = -(r.random_range(0..640) as f64) / 64.0;
        for b in kernels() {
            assert_eq!(b.eval(&v, t + shift), b.eval(&u, t));
        }
    }
}

#[test]
fn decay_filters_are_causal() {
    let mut r = rng::stream(2, 0, 0);
    for _ in 0..100 {
        let u = dyadic_train(&mut r, 40.0);
        let t = -20.0;
        let kept: Vec<f64> = u.times().iter().copied().filter(|&s| s <= t).collect();
        let truncated = SpikeTrain::new(kept, DELTA, HORIZON).unwrap();
        for b in kernels() {
            assert_eq!(
                decay_filter_eval(&truncated, &b, t),
                decay_filter_eval(&u, &b, t)
            );
        }
    }
}

#[test]
fn distant_past_fades() {
    let mut r = rng::stream(3, 0, 0);
    for t_cut in [5.0, 10.0, 20.0] {
        for _ in 0..50 {
            let u = dyadic_train(&mut r, HORIZON);
            let v = dyadic_train(&mut r, HORIZON);
            let mut spliced: Vec<f64> = v.times().iter().copied().filter(|&s| s < -t_cut).collect();
            spliced.extend(u.times().iter().copied().filter(|&s| s >= -t_cut));
            let w = SpikeTrain::new(spliced, DELTA, HORIZON).unwrap();
            for b in kernels() {
                let bound = b.sup_norm() * (-t_cut).exp() * (HORIZON / DELTA + 1.0);
                assert!((b.eval(&u, 0.0) - b.eval(&w, 0.0)).abs() <= bound);
            }
        }
    }
}

#[test]
fn witnesses_separate_distinct_trains() {
    let mut r = rng::stream(4, 0, 0);
    for _ in 0..50 {
        let u = dyadic_train(&mut r, 10.0);
        let v = dyadic_train(&mut r, 10.0);
        match separation_witness(&u, &v) {
            Some((b, gap)) => {
                assert!(gap > 0.0);
                assert_eq!(gap, (b.eval(&u, 0.0) - b.eval(&v, 0.0)).abs());
            }
            None => assert_eq!(u, v),
        }
    }
}

#[test]
fn continuous_distance_is_a_metric() {
    let mut r = rng::stream(5, 0, 0);
    let omega = FadingFunction::default();
    for _ in 0..50 {
        let (a, b, c) = (
            dyadic_train(&mut r, 20.0),
            dyadic_train(&mut r, 20.0),
            dyadic_train(&mut r, 20.0),
        );
        let d = |x: &SpikeTrain, y: &SpikeTrain| spike_distance(x, y, &omega).unwrap();
        assert_eq!(d(&a, &a), 0.0);
        assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9);
        assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        if a != b {
            assert!(d(&a, &b) > 0.0);
        }
    }
}
