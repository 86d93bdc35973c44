use ndarray::array;
use shallownet::{prediction_error_mc, Activation, ModelId, ShallowNet};

#[test]
fn doubling_test_size_shrinks_se_by_root_two() {
    let net = ShallowNet::new(
        array![1.0, -0.5],
        array![[1.0, -1.0, 0.5, 0.2], [0.3, 0.3, -0.7, 1.0]],
        array![0.1, -0.2],
        Activation::Relu,
    )
    .unwrap();
    let trials = 50u64;
    let (mut small, mut large) = (0.0, 0.0);
    for t in 0..trials {
        small += prediction_error_mc(&net, ModelId::Fig2, 500, t).unwrap().1;
        large += prediction_error_mc(&net, ModelId::Fig2, 1000, t).unwrap().1;
    }
    let ratio = large / small;
    let target = 0.5f64.sqrt();
    assert!((ratio / target - 1.0).abs() < 0.2, "ratio {ratio}");
}
