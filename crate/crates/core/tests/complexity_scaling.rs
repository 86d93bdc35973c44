use std::time::Instant;

use shallownet::{complexity_estimate, sample_ball, Activation, ComplexityClass, Multiplier, SearchConfig};

fn light() -> SearchConfig {
    SearchConfig { restarts: 4, steps: 60, step_size: 0.05 }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn estimates_grow_with_radius() {
    let x = sample_ball(40, 3, 5).unwrap();
    let class = ComplexityClass::PathNormBall { m: 1.0, k: 8, activation: Activation::Relu };
    let mut prev = 0.0;
    for m in [0.5, 1.0, 3.0] {
        let est = complexity_estimate(&class.with_radius(m), x.view(), 40, Multiplier::Gaussian, &light(), 9).unwrap();
        assert!(prev <= est.value + 2.0 * est.std_err);
        prev = est.value;
    }
}

#[test]
fn sigmoid_l1_ball_is_homogeneous() {
    let x = sample_ball(30, 2, 6).unwrap();
    let class = ComplexityClass::L1OuterBall { m: 1.0, k: 4, activation: Activation::Sigmoid };
    let one = complexity_estimate(&class, x.view(), 20, Multiplier::Rademacher, &light(), 3).unwrap();
    let three = complexity_estimate(&class.with_radius(3.0), x.view(), 20, Multiplier::Rademacher, &light(), 3).unwrap();
    assert!((three.value / one.value - 3.0).abs() < 1e-9);
}

#[test]
fn path_norm_ball_decays_like_inverse_root_n() {
    let ns = [64usize, 256, 1024];
    let class = ComplexityClass::PathNormBall { m: 1.0, k: 16, activation: Activation::Relu };
    let mut logs = Vec::new();
    let start = Instant::now();
    for &n in &ns {
        let x = sample_ball(n, 4, 17).unwrap();
        let est = complexity_estimate(&class, x.view(), 40, Multiplier::Rademacher, &light(), 23).unwrap();
        logs.push(est.value.ln());
    }
    eprintln!("n-scaling took {:?}", start.elapsed());
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let s = slope(&lx, &logs);
    assert!((-0.65..=-0.35).contains(&s), "slope {s}");
}

#[test]
#[ignore]
fn time_default_search() {
    let class = ComplexityClass::PathNormBall { m: 1.0, k: 64, activation: Activation::Relu };
    let x = sample_ball(1024, 4, 1).unwrap();
    let start = Instant::now();
    complexity_estimate(&class, x.view(), 5, Multiplier::Rademacher, &SearchConfig::default(), 1).unwrap();
    eprintln!("5 draws default at n=1024,k=64: {:?}", start.elapsed());
}
