use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use typexp_core::{
    build_robust_model, classical_bound, dgl_decide, enumerate_types, map_decide,
    min_pairwise_chernoff, nn_decide, positivity_check, quantization_radius, quantize_all,
    robust_bound, robust_decide, robust_log_bound, run_experiment, sample_sequence,
    sequence_log_prob, type_of, write_summaries_csv, DistributionF32, DistributionF64,
    ExperimentPlan, HypothesisSetF32, HypothesisSetF64, QuantizerSpec, RobustModelF64, Rule,
};

fn sources() -> Vec<DistributionF64> {
    [
        [0.1, 0.8, 0.1],
        [0.3, 0.2, 0.5],
        [0.6, 0.1, 0.3],
        [0.4, 0.4, 0.2],
        [0.3, 0.6, 0.1],
    ]
    .iter()
    .map(|p| DistributionF64::from_f64s(p).unwrap())
    .collect()
}

fn quantized_model(bits: u32) -> RobustModelF64 {
    let truth = sources();
    let nominals = quantize_all(&truth, QuantizerSpec::new(bits).unwrap()).unwrap();
    let radius = quantization_radius(&truth, &nominals).unwrap();
    build_robust_model(nominals, radius.per_hypothesis).unwrap()
}

#[test]
fn scalar_types_agree() {
    let h64 = HypothesisSetF64::uniform(sources()).unwrap();
    let h32 = HypothesisSetF32::uniform(
        sources()
            .iter()
            .map(|p| p.cast::<f32>().unwrap())
            .collect::<Vec<DistributionF32>>(),
    )
    .unwrap();
    let c64 = min_pairwise_chernoff(h64.distributions()).unwrap();
    let c32 = min_pairwise_chernoff(h32.distributions()).unwrap();
    assert_eq!(c64.pair, c32.pair);
    assert!((c64.value - c32.value as f64).abs() < 1e-5);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = sample_sequence(&h64.distributions()[1], 40, &mut rng);
        let t = type_of(&x).unwrap();
        let a = nn_decide(&h64, &t).unwrap();
        let b = nn_decide(&h32, &t).unwrap();
        let sorted: Vec<f64> = {
            let mut s = a.scores.clone();
            s.sort_by(f64::total_cmp);
            s
        };
        // Only near-ties may flip between precisions.
        assert!(a.index == b.index || sorted[1] - sorted[0] < 1e-5);
    }
}

#[test]
fn exact_nominals_reduce_to_the_classical_analysis() {
    let h = HypothesisSetF64::uniform(sources()).unwrap();
    let rm = build_robust_model(sources(), vec![0.0; 5]).unwrap();
    for n in [10u64, 100, 1000] {
        assert!(
            (robust_bound(&rm, n).unwrap().exponent - classical_bound(&h, n).unwrap().exponent)
                .abs()
                < 1e-12
        );
    }
    for t in enumerate_types(12, 3).unwrap() {
        assert_eq!(
            robust_decide(&rm, &t).unwrap().index,
            nn_decide(&h, &t).unwrap().index
        );
        for j in 0..5 {
            let exact = sequence_log_prob(&t, &sources()[j]).unwrap();
            let bound = robust_log_bound(&t, &rm, j).unwrap();
            assert!(
                (exact - bound).abs() <= 1e-9 * exact.abs().max(1.0)
                    || (exact.is_infinite() && bound.is_infinite())
            );
        }
    }
}

#[test]
fn finer_quantization_tightens_the_model() {
    let eps: Vec<f64> = [2, 4, 6, 8, 10]
        .iter()
        .map(|&q| quantized_model(q).epsilon_max())
        .collect();
    assert!(eps.windows(2).all(|w| w[1] < w[0]), "{eps:?}");
    assert!(!positivity_check(&quantized_model(6)).unwrap().holds);
    assert!(positivity_check(&quantized_model(8)).unwrap().holds);
}

#[test]
fn rules_agree_on_long_sequences() {
    let h = HypothesisSetF64::uniform(sources()).unwrap();
    let rm = quantized_model(10);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for truth in 0..5 {
        let x = sample_sequence(&sources()[truth], 4000, &mut rng);
        let t = type_of(&x).unwrap();
        assert_eq!(nn_decide(&h, &t).unwrap().index, truth);
        assert_eq!(map_decide(&h, &x).unwrap().index, truth);
        assert_eq!(robust_decide(&rm, &t).unwrap().index, truth);
        assert_eq!(dgl_decide(rm.nominals(), &x).unwrap().index, truth);
    }
}

#[test]
fn experiment_end_to_end() {
    let h = HypothesisSetF64::uniform(sources()).unwrap();
    let plan = ExperimentPlan::new(
        h,
        Some(quantized_model(8)),
        Rule::ALL.to_vec(),
        vec![20, 80],
        4000,
        42,
    )
    .unwrap();
    let summaries = run_experiment(&plan).unwrap();
    assert_eq!(summaries.len(), 8);
    for pair in summaries.chunks(2) {
        // Longer sequences do not hurt any rule.
        assert!(pair[1].pe_hat <= pair[0].pe_hat + pair[0].ci95_halfwidth);
    }
    let mut csv = Vec::new();
    write_summaries_csv(&summaries, &mut csv).unwrap();
    let again = run_experiment(&plan).unwrap();
    let mut csv2 = Vec::new();
    write_summaries_csv(&again, &mut csv2).unwrap();
    assert_eq!(csv, csv2);
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 9);
}
