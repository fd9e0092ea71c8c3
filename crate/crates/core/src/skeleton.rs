//! Big-jump skeletons `J_n` under `P`, under `P(·|B^γ_n)` and under the
//! defensive mixture `Q_n = wP + (1−w)P(·|B^γ_n)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::{poisson_tail, sample_conditioned_poisson, sample_order_statistics};
use crate::model::{JumpMeasure, LevyModel};
use crate::params::AlgoParams;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixtureBranch {
    /// Drawn from the nominal law `P`.
    Nominal,
    /// Drawn from `P(·|B^γ_n)`.
    Conditioned,
}

/// `ζ_k = Σ z_i 1[u_i, n]`: arrival times and sizes of the large jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct BigJumpSkeleton<F> {
    pub times: Vec<F>,
    pub sizes: Vec<F>,
    pub branch: MixtureBranch,
    pub horizon: F,
}

impl<F: Real> BigJumpSkeleton<F> {
    pub fn new(times: Vec<F>, sizes: Vec<F>, branch: MixtureBranch, horizon: F) -> Result<Self> {
        if times.len() != sizes.len() {
            return Err(Error::Structure(format!(
                "{} arrival times for {} jump sizes",
                times.len(),
                sizes.len()
            )));
        }
        if times.windows(2).any(|w| w[0] > w[1]) || times.iter().any(|&t| t < F::zero() || t > horizon) {
            return Err(Error::Structure("arrival times must be sorted inside [0, n]".into()));
        }
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

    /// Membership in `B^γ_n` for the one-sided event: at least `l*` jumps.
    pub fn in_conditioning_set(&self, l_star: usize) -> bool {
        self.k() >= l_star
    }

    /// Whether some jump reaches `n·b` (the scaled path leaves `E`).
    pub fn violates_cap(&self, cap: F) -> bool {
        self.sizes.iter().any(|&z| z >= cap)
    }

    /// Interval lengths `u_i − u_{i−1}` for `i = 1..k+1` with `u_0 = 0`,
    /// `u_{k+1} = n`.
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

/// Mixture weight, `λ_n = n·ν[nγ,∞)` and `p_n = P(B^γ_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeights<F> {
    pub w: F,
    pub lambda: F,
    pub p: F,
    pub ln_p: F,
}

impl<F: Real> MixtureWeights<F> {
    /// `p_n = 1 − Σ_{l<l*} e^{−λ} λ^l / l!`, evaluated in log space when small.
    pub fn one_sided(w: F, lambda: F, l_star: usize) -> Self {
        let tail = poisson_tail(lambda.as_f64(), l_star as u64);
        Self {
            w,
            lambda,
            p: F::lit(tail.prob),
            ln_p: F::lit(tail.ln_prob),
        }
    }

    pub fn for_params<M: JumpMeasure<F>>(params: &AlgoParams<F>, model: &LevyModel<F, M>, l_star: usize) -> Self {
        let lambda = params.horizon() * model.measure().upper_tail(params.big_jump_floor());
        Self::one_sided(params.w, lambda, l_star)
    }

    /// `w + (1−w)/p_n · I_B`; always `≥ w`.
    pub fn likelihood_denominator(&self, in_set: bool) -> F {
        if in_set {
            self.w + (F::one() - self.w) * (-self.ln_p).exp()
        } else {
            self.w
        }
    }
}

/// `w + ((1−w)/p_n)·I_B(skeleton)`.
pub fn likelihood_denominator<F: Real>(
    skeleton: &BigJumpSkeleton<F>,
    weights: &MixtureWeights<F>,
    l_star: usize,
) -> F {
    weights.likelihood_denominator(skeleton.in_conditioning_set(l_star))
}

fn upward_sizes<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    measure: &M,
    k: usize,
    floor: F,
    rng: &mut R,
) -> Result<Vec<F>> {
    let mass = measure.upper_tail(floor);
    (0..k)
        .map(|_| {
            let y = (F::one() - F::uniform(rng)) * mass;
            measure.inverse_upper_tail_restricted(y, floor)
        })
        .collect()
}

fn require_tail<F: Real>(mass: F) -> Result<()> {
    if mass > F::zero() && mass.is_finite() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "large-jump tail mass {mass} cannot drive the conditioned sampler"
        )))
    }
}

/// Skeleton under the nominal law: `Poisson(λ_n)` jumps of size `≥ nγ`.
pub fn sample_skeleton_nominal<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
    rng: &mut R,
) -> Result<BigJumpSkeleton<F>> {
    let floor = params.big_jump_floor();
    let measure = model.measure();
    let lambda = params.horizon() * measure.upper_tail(floor);
    let k = F::poisson(lambda, rng) as usize;
    let times = sample_order_statistics(k, params.horizon(), rng);
    let sizes = if k > 0 { upward_sizes(measure, k, floor, rng)? } else { Vec::new() };
    Ok(BigJumpSkeleton {
        times,
        sizes,
        branch: MixtureBranch::Nominal,
        horizon: params.horizon(),
    })
}

/// Skeleton from `P(·|B^γ_n)`: `k ~ Poisson(λ_n) | k ≥ l*`, uniform order
/// statistics for the times, sizes by inverting the restricted tail.
pub fn sample_skeleton_conditioned<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
    l_star: usize,
    rng: &mut R,
) -> Result<BigJumpSkeleton<F>> {
    let floor = params.big_jump_floor();
    let measure = model.measure();
    let mass = measure.upper_tail(floor);
    require_tail(mass)?;
    let lambda = params.horizon() * mass;
    let k = sample_conditioned_poisson(lambda.as_f64(), l_star as u64, rng)? as usize;
    let sizes = upward_sizes(measure, k, floor, rng)?;
    let times = sample_order_statistics(k, params.horizon(), rng);
    Ok(BigJumpSkeleton {
        times,
        sizes,
        branch: MixtureBranch::Conditioned,
        horizon: params.horizon(),
    })
}

/// One draw from `Q_n`: nominal with probability `w`, conditioned otherwise.
pub fn sample_skeleton_defensive<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    params: &AlgoParams<F>,
    model: &LevyModel<F, M>,
    l_star: usize,
    rng: &mut R,
) -> Result<BigJumpSkeleton<F>> {
    if F::uniform(rng) < params.w {
        sample_skeleton_nominal(params, model, rng)
    } else {
        sample_skeleton_conditioned(params, model, l_star, rng)
    }
}
