//! `Ŷ^m`, the debiased `Z_n` and the importance-sampling draw
//! `L_n = Z_n / (w + (1−w)/p_n · I_B)`.

use num_traits::Num;
use rand::Rng;

use crate::ara::{build_ara_records, TruncationLadder};
use crate::error::{Error, Result};
use crate::kernels::sample_tau;
use crate::model::{JumpMeasure, LevyModel, Truncation};
use crate::params::{AlgoParams, EventSpec, Mode};
use crate::real::Real;
use crate::skeleton::{sample_skeleton_defensive, BigJumpSkeleton, MixtureBranch, MixtureWeights};
use crate::stick_breaking::{build_interval_records, LevelPath};

/// `max_i I(Σ_{q<i} (endpoint_q + z_q) + M̂^{(i),m} ≥ threshold)`.
///
/// `paths` holds one entry per interval, so it must be one longer than
/// `sizes`.
pub fn hat_y<F: Real, P: LevelPath<F>>(paths: &[P], sizes: &[F], m: usize, threshold: F) -> Result<bool> {
    if paths.len() != sizes.len() + 1 {
        return Err(Error::Structure(format!(
            "{} interval records for {} big jumps",
            paths.len(),
            sizes.len()
        )));
    }
    let mut level = F::zero();
    for (i, path) in paths.iter().enumerate() {
        if level + path.supremum(m)? >= threshold {
            return Ok(true);
        }
        if i < sizes.len() {
            level = level + path.endpoint(m) + sizes[i];
        }
    }
    Ok(false)
}

/// Total endpoint `Σ_i endpoint_i(m) + Σ z_i`.
pub fn path_endpoint<F: Real, P: LevelPath<F>>(paths: &[P], sizes: &[F], m: usize) -> F {
    paths.iter().map(|p| p.endpoint(m)).sum::<F>() + sizes.iter().copied().sum::<F>()
}

/// `Ŷ¹ + Σ_{m=2}^{τ} (Ŷ^m − Ŷ^{m−1}) / ρ^{m−1}`, where `τ = hat_y.len()`.
pub fn debiased_z<T: Num + Copy>(hat_y: &[bool], rho: T) -> Result<T> {
    let Some(&first) = hat_y.first() else {
        return Err(crate::error::domain("debiased_z", "tau must be at least 1"));
    };
    let bit = |b: bool| if b { T::one() } else { T::zero() };
    let mut z = bit(first);
    let mut survival = T::one();
    for pair in hat_y.windows(2) {
        survival = survival * rho;
        if pair[0] != pair[1] {
            z = z + (bit(pair[1]) - bit(pair[0])) / survival;
        }
    }
    Ok(z)
}

/// One importance-sampled value with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorDraw<F> {
    /// `L_n`.
    pub value: F,
    /// `Z_n`.
    pub z: F,
    /// 0 when the draw short-circuited on the jump cap.
    pub tau: usize,
    pub k: usize,
    pub branch: MixtureBranch,
    /// `Ŷ¹ .. Ŷ^τ`.
    pub hat_y: Vec<bool>,
    pub in_conditioning_set: bool,
    pub capped: bool,
}

/// Draws `L_n` for `A = {sup X̄_n ≥ a, every upward jump < b}`.
///
/// Holds the quantities that do not change between replications.
#[derive(Debug, Clone)]
pub struct OneSidedEstimator<'a, F, M> {
    params: AlgoParams<F>,
    model: &'a LevyModel<F, M>,
    event: EventSpec<F>,
    weights: MixtureWeights<F>,
    base_sticks: usize,
}

impl<'a, F: Real, M: JumpMeasure<F>> OneSidedEstimator<'a, F, M> {
    pub fn new(params: AlgoParams<F>, model: &'a LevyModel<F, M>, event: EventSpec<F>) -> Result<Self> {
        params.validate(Some(event.b()))?;
        if params.mode == Mode::ExactSba && !model.has_exact_increments() {
            return Err(Error::Unsupported(
                "exact SBA needs exact truncated increments; use the ARA mode".into(),
            ));
        }
        let weights = MixtureWeights::for_params(&params, model, event.l_star());
        Ok(Self {
            params,
            model,
            event,
            weights,
            base_sticks: params.base_sticks(),
        })
    }

    pub fn weights(&self) -> &MixtureWeights<F> {
        &self.weights
    }

    pub fn params(&self) -> &AlgoParams<F> {
        &self.params
    }

    pub fn event(&self) -> &EventSpec<F> {
        &self.event
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<EstimatorDraw<F>> {
        let skeleton = sample_skeleton_defensive(&self.params, self.model, self.event.l_star(), rng)?;
        self.draw_given(&skeleton, rng)
    }

    /// Completes a draw for a fixed skeleton; `τ` and the sticks are sampled.
    pub fn draw_given<R: Rng + ?Sized>(&self, skeleton: &BigJumpSkeleton<F>, rng: &mut R) -> Result<EstimatorDraw<F>> {
        let n = self.params.horizon();
        let in_set = skeleton.in_conditioning_set(self.event.l_star());
        let mut draw = EstimatorDraw {
            value: F::zero(),
            z: F::zero(),
            tau: 0,
            k: skeleton.k(),
            branch: skeleton.branch,
            hat_y: Vec::new(),
            in_conditioning_set: in_set,
            capped: false,
        };
        if skeleton.violates_cap(n * self.event.b()) {
            draw.capped = true;
            return Ok(draw);
        }
        let tau = sample_tau(self.params.rho.as_f64(), rng)?;
        let lengths = skeleton.interval_lengths();
        let threshold = n * self.event.a();
        let truncation = Truncation::Upper(self.params.big_jump_floor());
        let hat = match self.params.mode {
            Mode::ExactSba => {
                let records = build_interval_records(&lengths, self.base_sticks, tau, self.model, truncation, rng)?;
                level_bits(&records, &skeleton.sizes, tau, threshold)?
            }
            Mode::Ara => {
                let ladder = TruncationLadder::new(
                    self.model.measure(),
                    self.params.n,
                    tau,
                    self.params.kappa,
                    self.params.r,
                )?;
                let records = build_ara_records(&lengths, self.base_sticks, &ladder, self.model, truncation, rng)?;
                level_bits(&records, &skeleton.sizes, tau, threshold)?
            }
        };
        draw.tau = tau;
        draw.z = debiased_z(&hat, self.params.rho)?;
        draw.value = draw.z / self.weights.likelihood_denominator(in_set);
        draw.hat_y = hat;
        Ok(draw)
    }
}

fn level_bits<F: Real, P: LevelPath<F>>(paths: &[P], sizes: &[F], tau: usize, threshold: F) -> Result<Vec<bool>> {
    (1..=tau).map(|m| hat_y(paths, sizes, m, threshold)).collect()
}

/// One draw of `L_n` (builds an [`OneSidedEstimator`] each call).
pub fn estimator_draw<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
    event: &EventSpec<F>,
    rng: &mut R,
) -> Result<EstimatorDraw<F>> {
    OneSidedEstimator::new(*params, model, *event)?.draw(rng)
}

/// One constraint of the parameter regime; `holds = None` when it does not
/// apply (for instance ARA constraints with `κ = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCheck {
    pub name: &'static str,
    pub holds: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<RegimeCheck>,
}

impl ValidationReport {
    pub fn get(&self, name: &str) -> Option<&RegimeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn violations(&self) -> impl Iterator<Item = &RegimeCheck> {
        self.checks.iter().filter(|c| c.holds == Some(false))
    }

    pub fn all_hold(&self) -> bool {
        self.violations().next().is_none()
    }

    fn push(&mut self, name: &'static str, holds: Option<bool>, detail: String) {
        self.checks.push(RegimeCheck { name, holds, detail });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            let state = match c.holds {
                Some(true) => "ok",
                Some(false) => "VIOLATED",
                None => "n/a",
            };
            writeln!(f, "{:<22} {:<8} {}", c.name, state, c.detail)?;
        }
        Ok(())
    }
}

/// `β₊` used by the ARA constraints; any value in `(β, 2)` is admissible and
/// the built-in model has `β = 0`.
pub const BETA_PLUS: f64 = 0.01;
/// Slack added to the lower bound on `μ`.
pub const MU_SLACK: f64 = 0.05;

/// ARA constraints `κ^{2−β₊} < 1/2`, `r(2−β₊) > max{2, μ−1}`,
/// `d > max{2, 2μ−1}` and the floor `nγ > 1`.
fn ara_checks<F: Real>(report: &mut ValidationReport, params: &AlgoParams<F>, mu: Option<f64>) {
    let active = params.mode == Mode::Ara && params.kappa > F::zero();
    let kappa = params.kappa.as_f64();
    let r = params.r.as_f64();
    let d = params.d.as_f64();
    let exponent = 2.0 - BETA_PLUS;
    let kp = kappa.powf(exponent);
    report.push(
        "ara_kappa",
        active.then_some(kp < 0.5),
        format!("kappa^(2-beta+) = {kp:.4} < 0.5"),
    );
    match mu {
        Some(mu) => {
            let lhs = r * exponent;
            let rhs = 2f64.max(mu - 1.0);
            report.push(
                "ara_truncation_rate",
                active.then_some(lhs > rhs),
                format!("r(2-beta+) = {lhs:.3} > {rhs:.3} (mu = {mu:.3})"),
            );
            let rhs = 2f64.max(2.0 * mu - 1.0);
            report.push(
                "ara_stick_budget",
                active.then_some(d > rhs),
                format!("d = {d} > {rhs:.3}"),
            );
        }
        None => {
            report.push("ara_truncation_rate", None, "tail index unknown".into());
            report.push("ara_stick_budget", None, "tail index unknown".into());
        }
    }
    let floor = params.big_jump_floor().as_f64();
    report.push(
        "ara_floor",
        (params.mode == Mode::Ara).then_some(floor > 1.0),
        format!("n*gamma = {floor} > 1"),
    );
}

/// Checks the parameter regime under which the estimator is unbiased and
/// strongly efficient. Violations are reported, not rejected.
pub fn validate_params<F: Real, M: JumpMeasure<F>>(
    params: &AlgoParams<F>,
    event: &EventSpec<F>,
    model: &LevyModel<F, M>,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (a, b, gamma) = (event.a().as_f64(), event.b().as_f64(), params.gamma.as_f64());
    let l_star = event.l_star() as f64;
    let d = params.d.as_f64();

    report.push("gamma_below_cap", Some(gamma > 0.0 && gamma < b), format!("0 < gamma = {gamma} < b = {b}"));

    let alpha = model.measure().tail_index().map(|(up, _)| up.as_f64());
    match alpha {
        Some(alpha) => {
            let rhs = 2f64.max(2.0 * l_star * (alpha - 1.0));
            report.push("stick_budget", Some(d > rhs), format!("d = {d} > {rhs:.3}"));
        }
        None => report.push("stick_budget", None, "tail index unknown".into()),
    }

    let lhs = (a - (l_star - 1.0) * b) / gamma + l_star - 1.0;
    report.push(
        "gamma_recipe",
        Some(lhs > 2.0 * l_star),
        format!("(a-(l*-1)b)/gamma + l* - 1 = {lhs:.3} > {}", 2.0 * l_star),
    );

    let mu = alpha.map(|alpha| 2.0 * l_star * (alpha - 1.0) + MU_SLACK);
    ara_checks(&mut report, params, mu);
    report
}

/// Regime checks for the down-and-in variant, where `μ > α + α′ − 2`.
pub fn validate_barrier_params<F: Real, M: JumpMeasure<F>>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = params.d.as_f64();
    let mu = model
        .measure()
        .tail_index()
        .map(|(up, down)| up.as_f64() + down.as_f64() - 2.0 + MU_SLACK);
    match mu {
        Some(mu) => {
            let rhs = 2f64.max(2.0 * mu - 1.0);
            report.push("stick_budget", Some(d > rhs), format!("d = {d} > {rhs:.3} (mu = {mu:.3})"));
        }
        None => report.push("stick_budget", None, "tail index unknown".into()),
    }
    ara_checks(&mut report, params, mu);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RngHandle;
    use crate::stick_breaking::IntervalRecord;
    use crate::kernels::stick_lengths_from;

    fn record(increments: Vec<f64>) -> IntervalRecord<f64> {
        let sticks = stick_lengths_from(1.0, &vec![0.5; increments.len() - 1]);
        IntervalRecord::from_parts(0, sticks, increments, 1, 1).unwrap()
    }

    #[test]
    fn debiasing_arithmetic() {
        assert_eq!(debiased_z(&[true], 0.97).unwrap(), 1.0);
        assert_eq!(debiased_z(&[true, true, true, true], 0.5).unwrap(), 1.0);
        let z = debiased_z(&[false, false, true], 0.97f64).unwrap();
        assert!((z - 1.0 / 0.9409).abs() < 1e-12);
        let z = debiased_z(&[true, false], 0.5).unwrap();
        assert_eq!(z, -1.0);
        assert!(debiased_z::<f64>(&[], 0.5).is_err());
    }

    #[test]
    fn hat_y_cases() {
        let quiet = vec![record(vec![-1.0, -1.0, -1.0])];
        assert!(!hat_y(&quiet, &[], 1, 10.0).unwrap());
        let two = vec![
            record(vec![0.0, 0.0, 0.0]),
            record(vec![0.0, 0.0, 0.0]),
            record(vec![-1.0, -1.0, 0.0]),
        ];
        assert!(hat_y(&two, &[6.0, 5.0], 1, 10.0).unwrap());
        assert!(!hat_y(&two, &[6.0, 3.0], 1, 10.0).unwrap());
        assert!(matches!(hat_y(&two, &[6.0], 1, 10.0), Err(Error::Structure(_))));
    }

    #[test]
    fn capped_skeleton_short_circuits() {
        let model = LevyModel::heavy_tail_experiment(1.6f64).unwrap();
        let params = AlgoParams::experiment(100, Mode::ExactSba);
        let event = EventSpec::new(2.0, 1.15).unwrap();
        let est = OneSidedEstimator::new(params, &model, event).unwrap();
        let skeleton = BigJumpSkeleton::new(vec![10.0, 60.0], vec![120.0, 90.0], MixtureBranch::Conditioned, 100.0).unwrap();
        let mut rng = RngHandle::new(0, 0);
        let d = est.draw_given(&skeleton, &mut rng).unwrap();
        assert!(d.capped);
        assert_eq!(d.value, 0.0);
        let tie = BigJumpSkeleton::new(vec![10.0], vec![115.0], MixtureBranch::Nominal, 100.0).unwrap();
        assert!(est.draw_given(&tie, &mut rng).unwrap().capped);
    }

    #[test]
    fn empty_nominal_skeleton_is_zero() {
        let model = LevyModel::heavy_tail_experiment(1.6f64).unwrap();
        let event = EventSpec::new(2.0, 1.15).unwrap();
        let skeleton = BigJumpSkeleton::new(vec![], vec![], MixtureBranch::Nominal, 100.0).unwrap();
        for mode in [Mode::ExactSba, Mode::Ara] {
            let est = OneSidedEstimator::new(AlgoParams::experiment(100, mode), &model, event).unwrap();
            let mut rng = RngHandle::new(4, 0);
            for _ in 0..50 {
                let d = est.draw_given(&skeleton, &mut rng).unwrap();
                assert!(d.hat_y.iter().all(|&b| !b));
                assert_eq!(d.value, 0.0);
                assert_eq!(d.hat_y.len(), d.tau);
            }
        }
    }

    #[test]
    fn two_big_jumps_cross_at_every_level() {
        let model = LevyModel::heavy_tail_experiment(1.6f64).unwrap();
        let event = EventSpec::new(2.0, 1.15).unwrap();
        let est = OneSidedEstimator::new(AlgoParams::experiment(100, Mode::ExactSba), &model, event).unwrap();
        let skeleton =
            BigJumpSkeleton::new(vec![0.0, 1e-9], vec![110.0, 110.0], MixtureBranch::Conditioned, 100.0).unwrap();
        let mut rng = RngHandle::new(8, 0);
        let d = est.draw_given(&skeleton, &mut rng).unwrap();
        assert!(d.hat_y.iter().all(|&b| b));
        assert_eq!(d.z, 1.0);
        let expected = 1.0 / est.weights().likelihood_denominator(true);
        assert!((d.value - expected).abs() < 1e-12);
    }

    #[test]
    fn value_bounded_by_z_over_w() {
        let model = LevyModel::heavy_tail_experiment(1.45f64).unwrap();
        let event = EventSpec::new(2.0, 1.15).unwrap();
        let est = OneSidedEstimator::new(AlgoParams::experiment(50, Mode::ExactSba), &model, event).unwrap();
        let mut rng = RngHandle::new(21, 0);
        for _ in 0..2000 {
            let d = est.draw(&mut rng).unwrap();
            assert!(d.value.abs() <= d.z.abs() / 0.05 + 1e-12);
        }
    }

    #[test]
    fn experiment_regime() {
        let model = LevyModel::heavy_tail_experiment(1.6f64).unwrap();
        let event = EventSpec::new(2.0, 1.15).unwrap();
        let report = validate_params(&AlgoParams::experiment(200, Mode::Ara), &event, &model);
        assert!(report.all_hold(), "{report}");
        let exact = validate_params(&AlgoParams::experiment(200, Mode::ExactSba), &event, &model);
        assert_eq!(exact.get("ara_kappa").unwrap().holds, None);
        let mut low_d = AlgoParams::experiment(200, Mode::ExactSba);
        low_d.d = 1.0;
        let report = validate_params(&low_d, &event, &model);
        assert_eq!(report.get("stick_budget").unwrap().holds, Some(false));
        let mut no_kappa = AlgoParams::experiment(200, Mode::Ara);
        no_kappa.kappa = 0.0;
        let report = validate_params(&no_kappa, &event, &model);
        for name in ["ara_kappa", "ara_truncation_rate", "ara_stick_budget"] {
            assert_eq!(report.get(name).unwrap().holds, None);
        }
    }
}
