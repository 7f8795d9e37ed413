use cac_core::rrbfn::{gradient_check, init_model, rbf_eval, read_model, rrbfn_step, sigmoid, write_model, RrbfnConfig, Sample, TrainingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(inputs: usize, n: usize, seed: u64) -> TrainingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TrainingSet::new(
        (0..n)
            .map(|_| Sample {
                inputs: (0..3).map(|_| (0..inputs).map(|_| rng.random_range(-1.0..1.0)).collect()).collect(),
                target: rng.random_range(0.0..1.0),
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn desk_model_gradient_matches_finite_differences() {
    let model = init_model(&RrbfnConfig::desk(), 21).unwrap();
    let err = gradient_check(&model, &random_set(16, 12, 4), 1e-5).unwrap();
    assert!(err < 1e-4, "relative error {err}");
}

#[test]
fn sigmoid_recurrence_by_hand() {
    let mut m = init_model(&RrbfnConfig::new(1, vec![1]), 0).unwrap();
    m.recurrent[0] = 1.0;
    rrbfn_step(&mut m, &[0.0]).unwrap();
    assert_eq!(m.input_state()[0], 0.5);
    rrbfn_step(&mut m, &[0.0]).unwrap();
    assert!((m.input_state()[0] - 0.622459).abs() < 1e-6);
}

#[test]
fn single_layer_without_recurrence_is_a_plain_rbf() {
    let mut m = init_model(&RrbfnConfig::new(5, vec![4]), 8).unwrap();
    m.recurrent.iter_mut().for_each(|r| *r = 0.0);
    m.output_bias = 0.0;
    let layer = &m.layers[0];
    let centers: Vec<Vec<f64>> = (0..layer.units()).map(|i| layer.center(i).to_vec()).collect();
    // exp(-d²/σ) equals exp(-d²/(2·σ/2)).
    let halved: Vec<f64> = layer.widths.iter().map(|s| s / 2.0).collect();
    let weights = m.output_weights.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let u: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x: Vec<f64> = u.iter().map(|&v| sigmoid(v)).collect();
        let expected = rbf_eval(&centers, &halved, &weights, &x).unwrap();
        assert!((rrbfn_step(&mut m, &u).unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn saved_model_reads_back_exactly() {
    let m = init_model(&RrbfnConfig::new(6, vec![5, 3]), 77).unwrap();
    let mut buf = Vec::new();
    write_model(&m, &mut buf).unwrap();
    assert_eq!(read_model(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
}
