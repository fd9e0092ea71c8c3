mod common;

use common::*;
use levy_rare_core::crude::{crude_estimate, CrudeEvent};
use levy_rare_core::engine::replicate;
use levy_rare_core::estimators::hat_y;
use levy_rare_core::kernels::{sample_tau, stick_lengths_from};
use levy_rare_core::skeleton::{BigJumpSkeleton, MixtureBranch};
use levy_rare_core::stick_breaking::IntervalRecord;
use levy_rare_core::{debiased_z, validate_params, Event, Mode, Model, OneSidedEstimator, Params, Real, RngHandle};
use num_rational::Ratio;
use proptest::prelude::*;

fn event() -> Event {
    Event::new(2.0, 1.15).unwrap()
}

#[test]
fn exact_debiasing_arithmetic() {
    let rho = Ratio::new(97i64, 100);
    assert_eq!(debiased_z(&[false, false, true], rho).unwrap(), Ratio::new(10_000, 9409));
    assert_eq!(debiased_z(&[true], rho).unwrap(), Ratio::from_integer(1));
    assert_eq!(debiased_z(&[true; 6], rho).unwrap(), Ratio::from_integer(1));
    assert_eq!(debiased_z(&[false; 6], rho).unwrap(), Ratio::from_integer(0));
    // a switch back and forth leaves two weighted terms
    let z = debiased_z(&[false, true, false], rho).unwrap();
    assert_eq!(z, Ratio::new(100, 97) - Ratio::new(10_000, 9409));
    assert!(debiased_z::<Ratio<i64>>(&[], rho).is_err());
}

/// `Ŷ^m = I(U < p_m)` with `p_m → limit`, so `E Z = limit`.
fn synthetic_z(rho: f64, p: impl Fn(usize) -> f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = RngHandle::new(seed, 0);
    let zs: Vec<f64> = (0..draws)
        .map(|_| {
            let u = f64::uniform(&mut rng);
            let tau = sample_tau(rho, &mut rng).unwrap();
            let bits: Vec<bool> = (1..=tau).map(|m| u < p(m)).collect();
            debiased_z(&bits, rho).unwrap()
        })
        .collect();
    mean_and_se(&zs)
}

#[test]
fn debiased_mean_hits_the_limit() {
    let (m, se) = synthetic_z(0.97, |m| 0.7 - 0.4 * 0.5f64.powi(m as i32), 1_000_000, 61);
    assert_within_se("monotone limit", m, se, 0.7, 3.0);
    // first levels far from the limit, coarse ρ
    let (m, se) = synthetic_z(0.8, |m| 0.2 + 0.6 * 0.3f64.powi(m as i32 - 1), 1_000_000, 62);
    assert_within_se("decreasing limit", m, se, 0.2, 3.0);
}

fn zero_record(tau: usize) -> IntervalRecord<f64> {
    let base = 1;
    let sticks = stick_lengths_from(1.0, &vec![0.5; base + tau]);
    IntervalRecord::from_parts(0, sticks, vec![0.0; base + tau + 1], base, tau).unwrap()
}

#[test]
fn hat_y_cases() {
    let tau = 3;
    // k = 0 with no positive increments
    assert!(!hat_y(&[zero_record(tau)], &[], 1, 200.0).unwrap());
    // two big jumps reach the barrier on their own
    let records = vec![zero_record(tau), zero_record(tau), zero_record(tau)];
    for m in 1..=tau {
        assert!(hat_y(&records, &[110.0, 110.0], m, 200.0).unwrap());
    }
    assert!(!hat_y(&records, &[110.0, 80.0], 2, 200.0).unwrap());
    assert!(hat_y(&records[..2], &[110.0, 110.0], 1, 200.0).is_err());
}

#[test]
fn jump_cap_short_circuits() {
    let params = Params::experiment(100, Mode::ExactSba);
    let model = Model::heavy_tail_experiment(1.6).unwrap();
    let est = OneSidedEstimator::new(params, &model, event()).unwrap();
    let mut rng = RngHandle::new(63, 0);
    // scaled sizes 1.2 > b and exactly b
    for size in [120.0, 115.0] {
        let skel = BigJumpSkeleton::new(vec![10.0, 20.0], vec![size, 90.0], MixtureBranch::Conditioned, 100.0).unwrap();
        let d = est.draw_given(&skel, &mut rng).unwrap();
        assert!(d.capped);
        assert_eq!(d.value, 0.0);
        assert_eq!(d.tau, 0);
    }
    let skel = BigJumpSkeleton::new(vec![10.0, 20.0], vec![114.0, 110.0], MixtureBranch::Conditioned, 100.0).unwrap();
    let d = est.draw_given(&skel, &mut rng).unwrap();
    assert!(!d.capped);
    assert!(d.hat_y.iter().all(|&b| b));
    assert_eq!(d.z, 1.0);
    assert_eq!(d.value, 1.0 / est.weights().likelihood_denominator(true));
}

#[test]
fn empty_nominal_skeleton_gives_zero() {
    let model = Model::heavy_tail_experiment(1.6).unwrap();
    let mut rng = RngHandle::new(64, 0);
    for mode in [Mode::ExactSba, Mode::Ara] {
        let est = OneSidedEstimator::new(Params::experiment(100, mode), &model, event()).unwrap();
        let skel = BigJumpSkeleton::new(vec![], vec![], MixtureBranch::Nominal, 100.0).unwrap();
        for _ in 0..200 {
            let d = est.draw_given(&skel, &mut rng).unwrap();
            assert_eq!(d.value, 0.0);
            assert!(d.hat_y.iter().all(|&b| !b));
        }
    }
}

#[test]
fn validator_reports() {
    let model = Model::heavy_tail_experiment(1.6).unwrap();
    for mode in [Mode::ExactSba, Mode::Ara] {
        let report = validate_params(&Params::experiment(200, mode), &event(), &model);
        assert!(report.all_hold(), "{report}");
    }
    let loose = Params { d: 1.0, ..Params::experiment(200, Mode::ExactSba) };
    let report = validate_params(&loose, &event(), &model);
    assert_eq!(report.get("stick_budget").unwrap().holds, Some(false));
    let no_ara = Params { kappa: 0.0, ..Params::experiment(200, Mode::Ara) };
    let report = validate_params(&no_ara, &event(), &model);
    for name in ["ara_kappa", "ara_truncation_rate", "ara_stick_budget"] {
        assert_eq!(report.get(name).unwrap().holds, None, "{name}");
    }
}

#[test]
fn same_seed_same_draws() {
    let model = Model::heavy_tail_experiment(1.45).unwrap();
    for mode in [Mode::ExactSba, Mode::Ara] {
        let est = OneSidedEstimator::new(Params::experiment(200, mode), &model, event()).unwrap();
        let run = |seed| {
            (0..50)
                .map(|i| est.draw(&mut RngHandle::new(seed, i)).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }
}

#[test]
fn single_precision_estimator_runs() {
    let model = levy_rare_core::LevyModel::<f32, _>::heavy_tail_experiment(1.6f32).unwrap();
    let event = levy_rare_core::EventSpec::new(2.0f32, 1.15).unwrap();
    let params = levy_rare_core::AlgoParams::<f32>::experiment(100, Mode::ExactSba);
    let est = OneSidedEstimator::new(params, &model, event).unwrap();
    let mut rng = RngHandle::new(65, 0);
    let mean = (0..2000).map(|_| est.draw(&mut rng).unwrap().value as f64).sum::<f64>() / 2000.0;
    assert!(mean.is_finite() && mean >= 0.0 && mean < 1e-3);
}

#[test]
fn unbiased_against_crude_at_n50() {
    let n = 50;
    let model = Model::heavy_tail_experiment(1.6).unwrap();
    let crude = crude_estimate(&model, &CrudeEvent::OneSided(event()), n, 2_000_000, 66).unwrap();
    assert!(crude.nonzero > 100);
    for (mode, seed) in [(Mode::ExactSba, 67), (Mode::Ara, 68)] {
        let est = OneSidedEstimator::new(Params::experiment(n, mode), &model, event()).unwrap();
        let is = replicate(seed, 10_000, |rng| Ok(est.draw(rng)?.value)).unwrap();
        let se = (is.std_error().powi(2) + crude.std_error().powi(2)).sqrt();
        assert_within_se(&format!("{mode:?} vs crude"), is.mean, se, crude.mean, 3.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn value_is_bounded_by_z_over_w(seed in any::<u64>(), n in 20usize..400, alpha in 1.3f64..2.2, ara in any::<bool>()) {
        let mode = if ara { Mode::Ara } else { Mode::ExactSba };
        let params = Params::experiment(n, mode);
        let model = Model::heavy_tail_experiment(alpha).unwrap();
        let est = OneSidedEstimator::new(params, &model, event()).unwrap();
        let mut rng = RngHandle::new(seed, 0);
        for _ in 0..5 {
            let d = est.draw(&mut rng).unwrap();
            prop_assert!(d.value.abs() <= d.z.abs() / params.w * (1.0 + 1e-12));
            prop_assert_eq!(d.hat_y.len(), d.tau);
            if d.capped {
                prop_assert_eq!(d.value, 0.0);
            }
        }
    }
}
