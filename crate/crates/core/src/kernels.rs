//! Seedable sampling primitives shared by every estimator.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::real::Real;

/// Deterministic generator for one replication.
///
/// Same `(master_seed, stream)` gives a bitwise-identical draw sequence;
/// distinct streams are independent ChaCha8 streams under the same key.
#[derive(Debug, Clone)]
pub struct RngHandle(ChaCha8Rng);

impl RngHandle {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream);
        Self(inner)
    }
}

impl RngCore for RngHandle {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// SplitMix64 finalizer; used to derive per-cell master seeds from a root
/// seed and a tag.
pub fn derive_seed(root: u64, tag: u64) -> u64 {
    let mut z = root ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `P(K ≥ k)` for `K ~ Poisson(λ)`, together with its logarithm.
///
/// The head sum is used when the tail is large; otherwise the tail series is
/// summed directly in log space so tiny tails keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonTail {
    pub prob: f64,
    pub ln_prob: f64,
}

pub fn poisson_tail(lambda: f64, k: u64) -> PoissonTail {
    if k == 0 {
        return PoissonTail {
            prob: 1.0,
            ln_prob: 0.0,
        };
    }
    if !(lambda > 0.0) {
        return PoissonTail {
            prob: 0.0,
            ln_prob: f64::NEG_INFINITY,
        };
    }
    let ln_lambda = lambda.ln();
    let head: f64 = (0..k)
        .map(|j| (-lambda + j as f64 * ln_lambda - ln_factorial(j)).exp())
        .sum();
    if head <= 0.5 {
        let prob = 1.0 - head;
        return PoissonTail {
            prob,
            ln_prob: prob.ln(),
        };
    }
    let (ln_first, rel) = tail_series(lambda, k);
    let ln_prob = ln_first + rel.ln();
    PoissonTail {
        prob: ln_prob.exp(),
        ln_prob,
    }
}

/// Log of the first tail term `ln P(K = k)` and `Σ_{j≥k} P(K=j)/P(K=k)`.
fn tail_series(lambda: f64, k: u64) -> (f64, f64) {
    let ln_first = -lambda + k as f64 * lambda.ln() - ln_factorial(k);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = k;
    for _ in 0..100_000 {
        j += 1;
        term *= lambda / j as f64;
        sum += term;
        if term < 1e-17 * sum && j as f64 > lambda {
            break;
        }
    }
    (ln_first, sum)
}

/// `K ~ Poisson(λ)` conditioned on `K ≥ k_min`.
///
/// Rejection is used while the acceptance probability is at least 1/2;
/// below that the renormalized tail pmf is inverted directly.
pub fn sample_conditioned_poisson<R: Rng + ?Sized>(lambda: f64, k_min: u64, rng: &mut R) -> Result<u64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("Poisson rate must be positive, got {lambda}")));
    }
    if k_min == 0 {
        return Ok(f64::poisson(lambda, rng));
    }
    let tail = poisson_tail(lambda, k_min);
    if tail.prob >= 0.5 {
        for _ in 0..1_000_000_000u64 {
            let k = f64::poisson(lambda, rng);
            if k >= k_min {
                return Ok(k);
            }
        }
    }
    let (_, total) = tail_series(lambda, k_min);
    let target = (1.0 - f64::uniform(rng)) * total;
    let mut k = k_min;
    let mut term = 1.0;
    let mut acc = 1.0;
    while acc < target {
        k += 1;
        term *= lambda / k as f64;
        if term == 0.0 {
            break;
        }
        acc += term;
    }
    Ok(k)
}

/// `k` iid `Unif(0, horizon)` draws, sorted ascending.
pub fn sample_order_statistics<F: Real, R: Rng + ?Sized>(k: usize, horizon: F, rng: &mut R) -> Vec<F> {
    let mut times: Vec<F> = (0..k).map(|_| F::open01(rng) * horizon).collect();
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite arrival times"));
    times
}

/// Truncation index `τ ~ Geom(ρ)` on `{1, 2, …}` with `P(τ ≥ m) = ρ^{m-1}`.
pub fn sample_tau<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> Result<usize> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("rho", format!("must lie in (0, 1), got {rho}")));
    }
    let u = 1.0 - f64::uniform(rng);
    let extra = (u.ln() / rho.ln()).floor();
    Ok(1 + extra.min(1e9) as usize)
}

/// Stick lengths `l_1 .. l_J` of a uniform stick-breaking of `[0, total]`,
/// plus the unbroken remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct StickSet<F> {
    pub lengths: Vec<F>,
    pub residual: F,
}

impl<F: Real> StickSet<F> {
    pub fn total(&self) -> F {
        self.lengths.iter().copied().sum::<F>() + self.residual
    }
}

/// `l_1 = V_1·total`, `l_j = V_j·(total − l_1 − … − l_{j−1})`.
pub fn stick_lengths<F: Real, R: Rng + ?Sized>(total: F, count: usize, rng: &mut R) -> StickSet<F> {
    let mut remaining = total;
    let mut lengths = Vec::with_capacity(count);
    for _ in 0..count {
        let l = F::uniform(rng) * remaining;
        lengths.push(l);
        remaining = remaining - l;
    }
    StickSet {
        lengths,
        residual: remaining.max(F::zero()),
    }
}

/// Deterministic recursion with given breaking fractions.
pub fn stick_lengths_from<F: Real>(total: F, fractions: &[F]) -> StickSet<F> {
    let mut remaining = total;
    let lengths = fractions
        .iter()
        .map(|&v| {
            let l = v * remaining;
            remaining = remaining - l;
            l
        })
        .collect();
    StickSet {
        lengths,
        residual: remaining,
    }
}
