use proptest::prelude::*;
use shallownet::theory::{breakpoints, classify_shape, mise_bound, Shape};

const N: f64 = 1e6;

fn curve(alpha: f64, beta: f64, k_max: u64) -> Vec<f64> {
    (1..=k_max).map(|k| mise_bound(alpha, beta, N, k as f64, 1.0).unwrap().0).collect()
}

fn shape_threshold(beta: f64) -> f64 {
    if beta == 0.0 { 1.0 } else { (1.0 - 2.0 * beta) / (3.0 + 2.0 * beta) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Non-increasing up to 3 k_second needs alpha n^((1-alpha)/2) >= ln n,
    // which holds at n = 1e6 for alpha <= 0.5.
    #[test]
    fn rough_targets_give_monotone_curves(alpha in 0.1..0.5f64) {
        prop_assert_eq!(classify_shape(alpha, 0.0).unwrap(), Shape::Monotone);
        let (_, k2) = breakpoints(alpha, 0.0, N).unwrap();
        let v = curve(alpha, 0.0, (3.0 * k2).ceil() as u64);
        prop_assert!(v.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn smooth_targets_dip_before_second_breakpoint(beta in prop::sample::select(vec![0.0, 0.1, 0.25, 0.4]), extra in 0.5..2.0f64) {
        let alpha = shape_threshold(beta) + extra;
        prop_assert_eq!(classify_shape(alpha, beta).unwrap(), Shape::DoubleDescent);
        let (_, k2) = breakpoints(alpha, beta, N).unwrap();
        let v = curve(alpha, beta, k2.floor() as u64);
        let interior = v.windows(3).any(|w| w[1] < w[0] && w[1] < w[2]);
        prop_assert!(interior);
    }

    #[test]
    fn bound_is_positive_and_linear_in_c(alpha in 0.1..3.0f64, k in 1.0..500.0f64, c in 0.1..10.0f64) {
        let (one, r1) = mise_bound(alpha, 0.0, 1e4, k, 1.0).unwrap();
        let (scaled, r2) = mise_bound(alpha, 0.0, 1e4, k, c).unwrap();
        prop_assert!(one > 0.0);
        prop_assert_eq!(r1, r2);
        prop_assert!((scaled - c * one).abs() <= 1e-12 * scaled);
    }
}
