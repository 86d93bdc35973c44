use ndarray::{Array1, Array2};
use proptest::prelude::*;
use shallownet::fit::{normal_equation_residual, ridge_solve};
use shallownet::metrics::prediction_error_mc;
use shallownet::{
    build_relu_interpolant_1d, empirical_error, truncate, Activation, ModelId, PenaltyKind, ShallowNet,
};

fn relu_net(k: usize, d: usize) -> impl Strategy<Value = ShallowNet> {
    (
        prop::collection::vec(-3.0..3.0f64, k),
        prop::collection::vec(-3.0..3.0f64, k * d),
        prop::collection::vec(-3.0..3.0f64, k),
    )
        .prop_map(move |(a, t, b)| {
            ShallowNet::new(
                Array1::from(a),
                Array2::from_shape_vec((k, d), t).unwrap(),
                Array1::from(b),
                Activation::Relu,
            )
            .unwrap()
        })
}

fn points(n: usize, d: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * d).prop_map(move |v| Array2::from_shape_vec((n, d), v).unwrap())
}

proptest! {
    #[test]
    fn relu_rescaling_leaves_function_and_path_norm(net in relu_net(5, 3), x in points(8, 3), c in 0.1..10.0f64) {
        let scaled = ShallowNet::new(net.a() / c, net.theta() * c, net.b() * c, Activation::Relu).unwrap();
        let f0 = net.eval(x.view()).unwrap();
        let f1 = scaled.eval(x.view()).unwrap();
        for (u, v) in f0.iter().zip(f1.iter()) {
            prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()));
        }
        let (p0, p1) = (net.penalty(PenaltyKind::PathNorm), scaled.penalty(PenaltyKind::PathNorm));
        prop_assert!((p0 - p1).abs() <= 1e-12 * (1.0 + p0));
    }

    #[test]
    fn outputs_bounded_by_path_norm_on_unit_ball(net in relu_net(6, 2), x in points(16, 2)) {
        let bound = 2.0 * net.penalty(PenaltyKind::PathNorm);
        for row in x.rows() {
            let norm = row.dot(&row).sqrt();
            let p = if norm > 1.0 { &row / norm } else { row.to_owned() };
            prop_assert!(net.eval_point(p.view()).unwrap().abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn interpolant_is_exact(mut xs in prop::collection::vec(-5.0..5.0f64, 2..30), seed in any::<u64>()) {
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        prop_assume!(xs.len() >= 2);
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| ((seed >> (i % 60)) & 7) as f64 - 3.5 + x).collect();
        let net = build_relu_interpolant_1d(Array1::from(xs.clone()).view(), Array1::from(ys.clone()).view()).unwrap();
        prop_assert_eq!(net.k(), xs.len() + 1);
        for (x, y) in xs.iter().zip(&ys) {
            let f = net.eval_point(Array1::from(vec![*x]).view()).unwrap();
            prop_assert!((f - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn truncation_is_idempotent_and_lipschitz(
        u in prop::collection::vec(-100.0..100.0f64, 1..20),
        shift in -5.0..5.0f64,
        t in 0.01..50.0f64,
    ) {
        let u = Array1::from(u);
        let v = &u + shift;
        let tu = truncate(u.view(), t).unwrap();
        prop_assert_eq!(&truncate(tu.view(), t).unwrap(), &tu);
        let tv = truncate(v.view(), t).unwrap();
        for (a, b) in tu.iter().zip(tv.iter()) {
            prop_assert!((a - b).abs() <= shift.abs() + 1e-12);
            prop_assert!(a.abs() <= t);
        }
    }

    #[test]
    fn empirical_error_ignores_joint_order(
        pairs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..40),
        rot in 0usize..40,
    ) {
        let (p, m): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        let base = empirical_error(Array1::from(p.clone()).view(), Array1::from(m.clone()).view()).unwrap();
        let r = rot % p.len();
        let mut pr = p.clone();
        let mut mr = m.clone();
        pr.rotate_left(r);
        mr.rotate_left(r);
        pr.reverse();
        mr.reverse();
        let perm = empirical_error(Array1::from(pr).view(), Array1::from(mr).view()).unwrap();
        prop_assert!((base - perm).abs() <= 1e-12 * (1.0 + base));
    }

    #[test]
    fn prediction_error_repeats_under_seed(net in relu_net(3, 4), seed in any::<u64>()) {
        let a = prediction_error_mc(&net, ModelId::Fig2, 64, seed).unwrap();
        let b = prediction_error_mc(&net, ModelId::Fig2, 64, seed).unwrap();
        prop_assert_eq!(a.0.to_bits(), b.0.to_bits());
        prop_assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ridge_satisfies_normal_equations(
        (n, p, g, y) in (1usize..=20, 1usize..=20).prop_flat_map(|(n, p)| {
            (Just(n), Just(p), prop::collection::vec(-5.0..5.0f64, n * p), prop::collection::vec(-5.0..5.0f64, n))
        }),
        lambda in prop_oneof![Just(0.0), 1e-6..10.0f64],
    ) {
        let g = Array2::from_shape_vec((n, p), g).unwrap();
        let y = Array1::from(y);
        let w = ridge_solve(g.view(), y.view(), lambda, n).unwrap();
        let r = normal_equation_residual(g.view(), y.view(), w.view(), lambda, n);
        prop_assert!(r <= 1e-8, "residual {r} (n={n}, p={p}, lambda={lambda})");
    }
}
