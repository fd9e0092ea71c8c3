//! Down-and-in variant:
//! `A = {X̄_n(1) ≤ −b, sup_t X̄_n(t) + ct ≥ a}` with no jump cap.
//!
//! Big jumps are two-sided (`|z| ≥ nγ`), the conditioning set asks for at
//! least one of each sign, and the small-jump process carries the extra
//! drift `c` with symmetric truncation `ν|_(−nγ, nγ)`.

use rand::Rng;

use crate::ara::{build_ara_records, TruncationLadder};
use crate::error::{Error, Result};
use crate::estimators::{debiased_z, hat_y, path_endpoint, EstimatorDraw};
use crate::kernels::{sample_conditioned_poisson, sample_order_statistics, sample_tau};
use crate::model::{JumpMeasure, LevyModel, Truncation};
use crate::params::{AlgoParams, BarrierEventSpec, Mode};
use crate::real::Real;
use crate::skeleton::{MixtureBranch, MixtureWeights};
use crate::stick_breaking::{build_interval_records, LevelPath};

/// Big-jump skeleton with signed sizes, `|z_i| ≥ nγ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedSkeleton<F> {
    pub times: Vec<F>,
    pub sizes: Vec<F>,
    pub branch: MixtureBranch,
    pub horizon: F,
}

impl<F: Real> TwoSidedSkeleton<F> {
    /// Merges signed jumps given in any order into time order.
    pub fn from_jumps(mut jumps: Vec<(F, F)>, branch: MixtureBranch, horizon: F) -> Result<Self> {
        if jumps.iter().any(|&(t, z)| !(t >= F::zero() && t <= horizon) || z == F::zero()) {
            return Err(Error::Structure("jumps must be nonzero and timed inside [0, n]".into()));
        }
        jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite jump times"));
        let (times, sizes) = jumps.into_iter().unzip();
        Ok(Self {
            times,
            sizes,
            branch,
            horizon,
        })
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn k_up(&self) -> usize {
        self.sizes.iter().filter(|&&z| z > F::zero()).count()
    }

    pub fn k_down(&self) -> usize {
        self.sizes.iter().filter(|&&z| z < F::zero()).count()
    }

    /// At least one upward and one downward big jump.
    pub fn in_conditioning_set(&self) -> bool {
        self.k_up() >= 1 && self.k_down() >= 1
    }

    pub fn interval_lengths(&self) -> Vec<F> {
        let mut prev = F::zero();
        let mut out = Vec::with_capacity(self.k() + 1);
        for &t in self.times.iter().chain(std::iter::once(&self.horizon)) {
            out.push((t - prev).max(F::zero()));
            prev = t;
        }
        out
    }
}

/// `(λ⁺, λ⁻) = (n ν[nγ,∞), n ν(−∞,−nγ])`.
pub fn two_sided_rates<F: Real, M: JumpMeasure<F>>(params: &AlgoParams<F>, model: &LevyModel<F, M>) -> (F, F) {
    let floor = params.big_jump_floor();
    let n = params.horizon();
    (n * model.measure().upper_tail(floor), n * model.measure().lower_tail(floor))
}

/// `p_n = (1 − e^{−λ⁺})(1 − e^{−λ⁻})`.
pub fn two_sided_weights<F: Real>(w: F, lambda_up: F, lambda_down: F) -> MixtureWeights<F> {
    let ln_p = (-(-lambda_up.as_f64()).exp_m1()).ln() + (-(-lambda_down.as_f64()).exp_m1()).ln();
    MixtureWeights {
        w,
        lambda: lambda_up + lambda_down,
        p: F::lit(ln_p.exp()),
        ln_p: F::lit(ln_p),
    }
}

fn signed_jumps<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    measure: &M,
    k_up: usize,
    k_down: usize,
    floor: F,
    horizon: F,
    rng: &mut R,
) -> Result<Vec<(F, F)>> {
    let mut jumps = Vec::with_capacity(k_up + k_down);
    let up_mass = measure.upper_tail(floor);
    for t in sample_order_statistics(k_up, horizon, rng) {
        let y = (F::one() - F::uniform(rng)) * up_mass;
        jumps.push((t, measure.inverse_upper_tail_restricted(y, floor)?));
    }
    let down_mass = measure.lower_tail(floor);
    for t in sample_order_statistics(k_down, horizon, rng) {
        let y = (F::one() - F::uniform(rng)) * down_mass;
        jumps.push((t, -measure.inverse_lower_tail_restricted(y, floor)?));
    }
    Ok(jumps)
}

/// Nominal branch with probability `w`, otherwise independent sign-wise
/// counts `k⁺ ~ Poisson(λ⁺) | k⁺ ≥ 1` and `k⁻ ~ Poisson(λ⁻) | k⁻ ≥ 1`.
pub fn sample_two_sided_skeleton_defensive<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
    rng: &mut R,
) -> Result<TwoSidedSkeleton<F>> {
    let (lambda_up, lambda_down) = two_sided_rates(params, model);
    if !(lambda_up > F::zero() && lambda_down > F::zero()) {
        return Err(Error::Unsupported(
            "down-and-in sampling needs both jump tails to carry mass".into(),
        ));
    }
    let floor = params.big_jump_floor();
    let (k_up, k_down, branch) = if F::uniform(rng) < params.w {
        (
            F::poisson(lambda_up, rng) as usize,
            F::poisson(lambda_down, rng) as usize,
            MixtureBranch::Nominal,
        )
    } else {
        (
            sample_conditioned_poisson(lambda_up.as_f64(), 1, rng)? as usize,
            sample_conditioned_poisson(lambda_down.as_f64(), 1, rng)? as usize,
            MixtureBranch::Conditioned,
        )
    };
    let jumps = signed_jumps(model.measure(), k_up, k_down, floor, params.horizon(), rng)?;
    TwoSidedSkeleton::from_jumps(jumps, branch, params.horizon())
}

/// Crossing of `na` by the drifted path times `X(n) ≤ −nb`, where the
/// level-`m` records already include the drift `c`.
pub fn barrier_hat_y<F: Real, P: LevelPath<F>>(
    paths: &[P],
    sizes: &[F],
    m: usize,
    spec: &BarrierEventSpec<F>,
    n: F,
) -> Result<bool> {
    let crossed = hat_y(paths, sizes, m, n * spec.a)?;
    let terminal = path_endpoint(paths, sizes, m) - spec.c * n <= -(n * spec.b);
    Ok(crossed && terminal)
}

/// Draws `L_n` for the down-and-in event.
#[derive(Debug, Clone)]
pub struct BarrierEstimator<F, M> {
    params: AlgoParams<F>,
    drifted: LevyModel<F, M>,
    spec: BarrierEventSpec<F>,
    weights: MixtureWeights<F>,
    base_sticks: usize,
}

impl<F: Real, M: JumpMeasure<F> + Clone> BarrierEstimator<F, M> {
    pub fn new(params: AlgoParams<F>, model: &LevyModel<F, M>, spec: BarrierEventSpec<F>) -> Result<Self> {
        params.validate(None)?;
        if params.mode == Mode::ExactSba && !model.has_exact_increments() {
            return Err(Error::Unsupported(
                "exact SBA needs exact truncated increments; use the ARA mode".into(),
            ));
        }
        if !(params.big_jump_floor() > F::one()) {
            return Err(crate::error::invalid("gamma", "n*gamma must exceed 1"));
        }
        let (up, down) = two_sided_rates(&params, model);
        Ok(Self {
            weights: two_sided_weights(params.w, up, down),
            drifted: model.with_extra_drift(spec.c),
            base_sticks: params.base_sticks(),
            params,
            spec,
        })
    }

    pub fn weights(&self) -> &MixtureWeights<F> {
        &self.weights
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<EstimatorDraw<F>> {
        let skeleton = sample_two_sided_skeleton_defensive(&self.params, &self.drifted, rng)?;
        self.draw_given(&skeleton, rng)
    }

    pub fn draw_given<R: Rng + ?Sized>(&self, skeleton: &TwoSidedSkeleton<F>, rng: &mut R) -> Result<EstimatorDraw<F>> {
        let n = self.params.horizon();
        let tau = sample_tau(self.params.rho.as_f64(), rng)?;
        let lengths = skeleton.interval_lengths();
        let truncation = Truncation::Symmetric(self.params.big_jump_floor());
        let bits = |paths: &dyn Fn(usize) -> Result<bool>| (1..=tau).map(paths).collect::<Result<Vec<bool>>>();
        let hat = match self.params.mode {
            Mode::ExactSba => {
                let records = build_interval_records(&lengths, self.base_sticks, tau, &self.drifted, truncation, rng)?;
                bits(&|m| barrier_hat_y(&records, &skeleton.sizes, m, &self.spec, n))?
            }
            Mode::Ara => {
                let ladder = TruncationLadder::new(
                    self.drifted.measure(),
                    self.params.n,
                    tau,
                    self.params.kappa,
                    self.params.r,
                )?;
                let records = build_ara_records(&lengths, self.base_sticks, &ladder, &self.drifted, truncation, rng)?;
                bits(&|m| barrier_hat_y(&records, &skeleton.sizes, m, &self.spec, n))?
            }
        };
        let in_set = skeleton.in_conditioning_set();
        let z = debiased_z(&hat, self.params.rho)?;
        Ok(EstimatorDraw {
            value: z / self.weights.likelihood_denominator(in_set),
            z,
            tau,
            k: skeleton.k(),
            branch: skeleton.branch,
            hat_y: hat,
            in_conditioning_set: in_set,
            capped: false,
        })
    }
}

/// One draw of the down-and-in `L_n`.
pub fn barrier_estimator_draw<F: Real, M: JumpMeasure<F> + Clone, R: Rng + ?Sized>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
    spec: &BarrierEventSpec<F>,
    rng: &mut R,
) -> Result<EstimatorDraw<F>> {
    BarrierEstimator::new(*params, model, *spec)?.draw(rng)
}
