use fpf::adversary::{round_robin, second_sum_value};
use fpf::bounds::type_class_check;
use fpf::harness::{best_fixed_loss, monte_carlo_regret, quadrature_expected_regret};
use fpf::predict::clairvoyant_step;
use fpf::{
    AdversarySpec, Alphabet, CountVector, DitherSchedule, LossSpec, MonteCarloOptions,
    PredictorConfig, RandomStream, StateSequence,
};

/// Every sequence over `m` states of length `n`, in lexicographic order.
fn all_sequences(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = m.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut s = vec![0; n];
        for x in s.iter_mut().rev() {
            *x = code % m;
            code /= m;
        }
        s
    })
}

#[test]
fn round_robin_maximizes_the_second_sum() {
    let schedules = [
        DitherSchedule::constant(1.0).unwrap(),
        DitherSchedule::power_law(1.0, 0.5).unwrap(),
    ];
    for (m, n) in [(2usize, 8usize), (3, 6)] {
        let rr = round_robin(m, n).unwrap();
        let alphabet = Alphabet::new(m).unwrap();
        for sched in &schedules {
            let top: f64 = second_sum_value(&rr, sched);
            let mut checked = 0;
            for s in all_sequences(m, n) {
                let seq = StateSequence::new(s, alphabet).unwrap();
                let v: f64 = second_sum_value(&seq, sched);
                assert!(
                    v <= top + 1e-12,
                    "m={m} n={n} {:?}: {v} > {top}",
                    seq.states()
                );
                checked += 1;
            }
            assert_eq!(checked, m.pow(n as u32));
        }
    }
}

#[test]
fn shared_dither_clairvoyant_telescopes() {
    let mut rng = RandomStream::new(4242);
    for m in [2usize, 3] {
        let loss = LossSpec::<f64>::zero_one(m).unwrap();
        let sched = DitherSchedule::sqrt_optimal(m);
        let n = 256;
        let slack = 2.0 * m as f64 * sched.eval(n);
        for _ in 0..50 {
            let states: Vec<usize> = (0..n).map(|_| rng.below(m)).collect();
            let seq = StateSequence::new(states, Alphabet::new(m).unwrap()).unwrap();
            let u: Vec<f64> = rng.draw_dither(m);
            let mut counts = CountVector::zeros(seq.alphabet());
            let mut cum = 0.0;
            for (i, &x) in seq.states().iter().enumerate() {
                counts.push(x);
                let b = clairvoyant_step(&sched, &counts, i + 1, &loss, &u).unwrap();
                cum += loss.eval(&b, x).unwrap();
            }
            let (_, lstar) = best_fixed_loss(&seq, &loss).unwrap();
            assert!(cum <= lstar + slack, "m={m}: {cum} > {lstar} + {slack}");
        }
    }
}

#[test]
fn type_class_inequality_is_exhaustive_for_small_counts() {
    let mut checked = 0;
    for m in 2..=3usize {
        for n in 0..=12usize {
            for s in all_sequences(n + 1, m) {
                if s.iter().sum::<usize>() != n {
                    continue;
                }
                let counts =
                    CountVector::from_counts(s.iter().map(|&c| c as u64).collect()).unwrap();
                let (lhs, rhs): (f64, f64) = type_class_check(&counts).unwrap();
                assert!(lhs <= rhs + 1e-9, "{s:?}: {lhs} > {rhs}");
                checked += 1;
            }
        }
    }
    // compositions of n into m parts: sum_n C(n + m - 1, m - 1)
    assert_eq!(checked, 91 + 455);
}

#[test]
fn perturbed_leader_matches_fpf_on_binary_zero_one() {
    // For binary 0-1 loss both rules pick the state with the largest
    // dithered count, so their expected regrets coincide.
    let loss = LossSpec::<f64>::zero_one(2).unwrap();
    let seq = StateSequence::new(vec![0, 1, 1, 0], Alphabet::binary()).unwrap();
    let h = 1.5;
    let exact = quadrature_expected_regret(
        &PredictorConfig::fpf(DitherSchedule::constant(h).unwrap()),
        &seq,
        &loss,
        1000,
    )
    .unwrap();
    let report = monte_carlo_regret(
        &PredictorConfig::Fpl {
            scale: DitherSchedule::constant(h).unwrap(),
        },
        &AdversarySpec::Fixed(seq),
        &loss,
        MonteCarloOptions::new(100_000, 99),
    )
    .unwrap();
    let tol = 3.0 * report.ci95_halfwidth + 1e-3;
    assert!(
        (report.mean_regret - exact).abs() <= tol,
        "{} vs {exact}",
        report.mean_regret
    );
}

#[test]
fn report_is_independent_of_worker_count() {
    let loss = LossSpec::<f64>::zero_one(2).unwrap();
    let pred = PredictorConfig::fpf(DitherSchedule::sqrt_optimal(2));
    let src = AdversarySpec::Iid {
        probs: vec![0.4, 0.6],
        n: 300,
        seed: 5,
    };
    let a =
        monte_carlo_regret(&pred, &src, &loss, MonteCarloOptions::new(64, 1).threads(1)).unwrap();
    let b =
        monte_carlo_regret(&pred, &src, &loss, MonteCarloOptions::new(64, 1).threads(8)).unwrap();
    assert_eq!(a, b);
}
