//! Lévy models described by their generating triplet `(drift, σ, ν)`.
//!
//! The jump measure is exposed through capabilities: tail functions and their
//! generalized inverses, the small-jump variance `σ̄²(c) = ∫_{(-c,c)} x² ν(dx)`,
//! and samplers for jumps falling in a magnitude window. Exact increments of a
//! truncated process are only available when the window carries finite mass.

use rand::Rng;

use crate::error::{domain, invalid, Error, Result};
use crate::real::Real;

/// Magnitude ranges `[lo, hi)` for upward and downward jumps.
///
/// `hi` may be `+∞`. A downward jump `x < 0` falls in the window when
/// `|x| ∈ [down.0, down.1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpWindow<F> {
    pub up: (F, F),
    pub down: (F, F),
}

impl<F: Real> JumpWindow<F> {
    pub fn full() -> Self {
        Self {
            up: (F::zero(), F::infinity()),
            down: (F::zero(), F::infinity()),
        }
    }

    /// Same magnitude band on both sides.
    pub fn band(lo: F, hi: F) -> Self {
        Self {
            up: (lo, hi),
            down: (lo, hi),
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.up.0 < self.up.1) && !(self.down.0 < self.down.1)
    }
}

/// Which big jumps are removed from the process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation<F> {
    None,
    /// `ν|_(-∞, z)`: upward jumps of size `≥ z` removed.
    Upper(F),
    /// `ν|_(-z, z)`: jumps with `|x| ≥ z` removed.
    Symmetric(F),
}

impl<F: Real> Truncation<F> {
    pub fn window(&self) -> JumpWindow<F> {
        let z0 = F::zero();
        let inf = F::infinity();
        match *self {
            Truncation::None => JumpWindow::full(),
            Truncation::Upper(z) => JumpWindow {
                up: (z0, z),
                down: (z0, inf),
            },
            Truncation::Symmetric(z) => JumpWindow::band(z0, z),
        }
    }

    fn cutoff(&self) -> Option<F> {
        match *self {
            Truncation::None => None,
            Truncation::Upper(z) | Truncation::Symmetric(z) => Some(z),
        }
    }
}

/// Capability set of a Lévy measure `ν`.
pub trait JumpMeasure<F: Real>: Send + Sync {
    /// `ν[x, ∞)` for `x > 0`.
    fn upper_tail(&self, x: F) -> F;

    /// `ν(-∞, -x]` for `x > 0`.
    fn lower_tail(&self, x: F) -> F;

    /// `inf{s > 0 : ν[s, ∞) < y}`.
    fn upper_tail_inverse(&self, y: F) -> F;

    /// `inf{s > 0 : ν(-∞, -s] < y}`, returned as a magnitude.
    fn lower_tail_inverse(&self, y: F) -> F;

    /// `σ̄²(c) = ∫_{(-c,c)} x² ν(dx)` for `c ∈ (0, 1]`.
    fn small_jump_variance(&self, c: F) -> Result<F>;

    /// `∫ x ν(dx)` over `{x : |x| ∈ [lo, hi)}`; compensator rate of a band.
    fn band_first_moment(&self, lo: F, hi: F) -> F;

    /// Tail indices `(α, α′)` of `ν[x,∞)` and `ν(-∞,-x]` when they are known.
    fn tail_index(&self) -> Option<(F, F)> {
        None
    }

    /// Whether `ν` has finite total mass, i.e. whether every window can be
    /// sampled exactly.
    fn has_finite_mass(&self) -> bool {
        self.upper_tail(F::zero()).is_finite() && self.lower_tail(F::zero()).is_finite()
    }

    /// Generalized inverse of `s ↦ ν([s, ∞) ∩ [z_floor, ∞))`.
    ///
    /// Feeding `y ~ Unif(0, ν[z_floor, ∞))` yields a draw from `ν` normalized
    /// on `[z_floor, ∞)`.
    fn inverse_upper_tail_restricted(&self, y: F, z_floor: F) -> Result<F> {
        let top = self.upper_tail(z_floor);
        if !(y > F::zero()) || y > top {
            return Err(domain(
                "inverse_upper_tail_restricted",
                format!("y = {y} outside (0, {top}]"),
            ));
        }
        if y == top {
            return Ok(z_floor);
        }
        Ok(self.upper_tail_inverse(y).max(z_floor))
    }

    /// Mirror of [`JumpMeasure::inverse_upper_tail_restricted`] for the lower
    /// tail; returns the jump magnitude.
    fn inverse_lower_tail_restricted(&self, y: F, z_floor: F) -> Result<F> {
        let top = self.lower_tail(z_floor);
        if !(y > F::zero()) || y > top {
            return Err(domain(
                "inverse_lower_tail_restricted",
                format!("y = {y} outside (0, {top}]"),
            ));
        }
        if y == top {
            return Ok(z_floor);
        }
        Ok(self.lower_tail_inverse(y).max(z_floor))
    }

    /// Mass of the up and down parts of a window.
    fn window_mass(&self, window: &JumpWindow<F>) -> (F, F) {
        let part = |(lo, hi): (F, F), tail: &dyn Fn(F) -> F| {
            if lo < hi {
                tail(lo) - tail(hi)
            } else {
                F::zero()
            }
        };
        (
            part(window.up, &|x| self.upper_tail(x)),
            part(window.down, &|x| self.lower_tail(x)),
        )
    }

    /// Calls `f` with every (signed) jump of a compound Poisson sample over a
    /// time span `t`, restricted to `window`.
    fn for_each_window_jump<R: Rng + ?Sized, G: FnMut(F)>(
        &self,
        t: F,
        window: &JumpWindow<F>,
        rng: &mut R,
        f: G,
    ) -> Result<()>
    where
        Self: Sized,
    {
        WindowSampler::new(self, *window)?.for_each(self, t, rng, f);
        Ok(())
    }

    /// Uncompensated sum of the jumps in `window` over time `t`.
    fn sample_window_sum<R: Rng + ?Sized>(
        &self,
        t: F,
        window: &JumpWindow<F>,
        rng: &mut R,
    ) -> Result<F>
    where
        Self: Sized,
    {
        let mut total = F::zero();
        self.for_each_window_jump(t, window, rng, |x| total = total + x)?;
        Ok(total)
    }

    /// Compensated band martingale `J(t)`: jumps with `|x| ∈ [lo, hi)` minus
    /// `t · ∫_band x ν(dx)`.
    fn sample_band_increment<R: Rng + ?Sized>(
        &self,
        t: F,
        lo: F,
        hi: F,
        rng: &mut R,
    ) -> Result<F>
    where
        Self: Sized,
    {
        if !(lo >= F::zero()) || lo > hi {
            return Err(domain("sample_band_increment", format!("band [{lo}, {hi})")));
        }
        if !(t > F::zero()) || lo == hi {
            return Ok(F::zero());
        }
        let jumps = self.sample_window_sum(t, &JumpWindow::band(lo, hi), rng)?;
        Ok(jumps - t * self.band_first_moment(lo, hi))
    }
}

/// Tail values of a window, computed once and reused across draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSampler<F> {
    window: JumpWindow<F>,
    up_floor: F,
    up_mass: F,
    down_floor: F,
    down_mass: F,
}

impl<F: Real> WindowSampler<F> {
    pub fn new<M: JumpMeasure<F>>(measure: &M, window: JumpWindow<F>) -> Result<Self> {
        let (up_mass, down_mass) = measure.window_mass(&window);
        if !up_mass.is_finite() || !down_mass.is_finite() {
            return Err(Error::Unsupported(
                "window with infinite jump mass cannot be sampled exactly".into(),
            ));
        }
        Ok(Self {
            window,
            up_floor: measure.upper_tail(window.up.1),
            up_mass,
            down_floor: measure.lower_tail(window.down.1),
            down_mass,
        })
    }

    /// Jump intensity of the window.
    pub fn mass(&self) -> F {
        self.up_mass + self.down_mass
    }

    pub fn for_each<M: JumpMeasure<F>, R: Rng + ?Sized, G: FnMut(F)>(&self, measure: &M, t: F, rng: &mut R, mut f: G) {
        if !(t > F::zero()) {
            return;
        }
        if self.up_mass > F::zero() {
            for _ in 0..F::poisson(t * self.up_mass, rng) {
                // (1 - U) ∈ (0, 1] keeps y inside (ν[hi,∞), ν[lo,∞)]
                let y = self.up_floor + (F::one() - F::uniform(rng)) * self.up_mass;
                f(measure.upper_tail_inverse(y).max(self.window.up.0));
            }
        }
        if self.down_mass > F::zero() {
            for _ in 0..F::poisson(t * self.down_mass, rng) {
                let y = self.down_floor + (F::one() - F::uniform(rng)) * self.down_mass;
                f(-measure.lower_tail_inverse(y).max(self.window.down.0));
            }
        }
    }

    pub fn sum<M: JumpMeasure<F>, R: Rng + ?Sized>(&self, measure: &M, t: F, rng: &mut R) -> F {
        let mut total = F::zero();
        self.for_each(measure, t, rng, |x| total = total + x);
        total
    }
}

/// Jumps arriving at `rate` with symmetric sizes `P(W > x) = P(−W > x) =
/// 0.5/(1 + x)^α`, i.e. `ν[x, ∞) = ν(-∞, -x] = (rate/2) / (1 + x)^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedPareto<F> {
    alpha: F,
    rate: F,
    side: F,
}

impl<F: Real> TwoSidedPareto<F> {
    pub fn new(alpha: F, rate: F) -> Result<Self> {
        if !(alpha > F::one()) || !alpha.is_finite() {
            return Err(invalid("alpha", format!("tail index must exceed 1, got {alpha}")));
        }
        if !(rate >= F::zero()) || !rate.is_finite() {
            return Err(invalid("rate", format!("must be finite and >= 0, got {rate}")));
        }
        Ok(Self {
            alpha,
            rate,
            side: rate * F::lit(0.5),
        })
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    /// Total jump arrival rate, the mass of `ν`.
    pub fn rate(&self) -> F {
        self.rate
    }

    fn tail(&self, x: F) -> F {
        if x <= F::zero() {
            self.side
        } else {
            self.side * (F::one() + x).powf(-self.alpha)
        }
    }

    fn tail_inverse(&self, y: F) -> F {
        if !(y > F::zero()) {
            F::infinity()
        } else if y >= self.side {
            F::zero()
        } else {
            (self.side / y).powf(self.alpha.recip()) - F::one()
        }
    }

    /// `∫_0^c x² α (1+x)^{-α-1} dx`.
    fn one_sided_second_moment(&self, c: F) -> F {
        let alpha = self.alpha;
        if c < F::lit(0.05) {
            // binomial series; the closed form cancels to O(c³) from O(c)
            let mut coef = F::one();
            let mut power = c * c * c;
            let mut acc = power / F::lit(3.0);
            for k in 1..60 {
                let kf = F::from_count(k);
                coef = -coef * (alpha + kf) / kf;
                power = power * c;
                let term = coef * power / (kf + F::lit(3.0));
                acc = acc + term;
                if term.abs() <= F::epsilon() * acc.abs() {
                    break;
                }
            }
            return alpha * acc;
        }
        let ln_u = c.ln_1p();
        let d = |p: F| ln_u * exprel(p * ln_u);
        alpha * (d(F::lit(2.0) - alpha) - F::lit(2.0) * d(F::one() - alpha) + d(-alpha))
    }
}

/// `(e^z - 1) / z`, continuous at 0.
fn exprel<F: Real>(z: F) -> F {
    if z.abs() < F::lit(1e-8) {
        F::one() + z / F::lit(2.0)
    } else {
        z.exp_m1() / z
    }
}

impl<F: Real> JumpMeasure<F> for TwoSidedPareto<F> {
    fn upper_tail(&self, x: F) -> F {
        self.tail(x)
    }

    fn lower_tail(&self, x: F) -> F {
        self.tail(x)
    }

    fn upper_tail_inverse(&self, y: F) -> F {
        self.tail_inverse(y)
    }

    fn lower_tail_inverse(&self, y: F) -> F {
        self.tail_inverse(y)
    }

    fn small_jump_variance(&self, c: F) -> Result<F> {
        if !(c > F::zero()) || c > F::one() {
            return Err(domain("small_jump_variance", format!("c = {c} outside (0, 1]")));
        }
        Ok(self.rate * self.one_sided_second_moment(c))
    }

    fn band_first_moment(&self, _lo: F, _hi: F) -> F {
        // symmetric measure
        F::zero()
    }

    fn tail_index(&self) -> Option<(F, F)> {
        Some((self.alpha, self.alpha))
    }

    fn has_finite_mass(&self) -> bool {
        true
    }
}

/// Generating triplet `(drift, σ, ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel<F, M> {
    drift: F,
    brownian_scale: F,
    measure: M,
}

impl<F: Real, M: JumpMeasure<F>> LevyModel<F, M> {
    /// Rejects models that are not of infinite activity: either `σ > 0` or
    /// `ν` must have infinite mass.
    pub fn new(drift: F, brownian_scale: F, measure: M) -> Result<Self> {
        if !drift.is_finite() {
            return Err(invalid("drift", "must be finite"));
        }
        if !(brownian_scale >= F::zero()) || !brownian_scale.is_finite() {
            return Err(invalid("sigma", format!("must be finite and >= 0, got {brownian_scale}")));
        }
        if brownian_scale == F::zero() && measure.has_finite_mass() {
            return Err(invalid(
                "sigma",
                "model must have infinite activity (sigma > 0 or infinite jump mass)",
            ));
        }
        Ok(Self {
            drift,
            brownian_scale,
            measure,
        })
    }

    pub fn drift(&self) -> F {
        self.drift
    }

    pub fn brownian_scale(&self) -> F {
        self.brownian_scale
    }

    pub fn measure(&self) -> &M {
        &self.measure
    }

    /// Same model with `c` added to the drift (the process `X(t) + ct`).
    pub fn with_extra_drift(&self, c: F) -> Self
    where
        M: Clone,
    {
        Self {
            drift: self.drift + c,
            brownian_scale: self.brownian_scale,
            measure: self.measure.clone(),
        }
    }

    pub fn has_exact_increments(&self) -> bool {
        self.measure.has_finite_mass()
    }

    /// Exact draw of the (possibly truncated) process increment over `t`.
    pub fn sample_increment<R: Rng + ?Sized>(
        &self,
        t: F,
        truncation: Truncation<F>,
        rng: &mut R,
    ) -> Result<F> {
        self.increment_sampler(truncation)?.sample(t, rng)
    }

    /// Sampler of truncated increments with the window tails precomputed.
    pub fn increment_sampler(&self, truncation: Truncation<F>) -> Result<IncrementSampler<'_, F, M>> {
        if let Some(z) = truncation.cutoff() {
            if !(z > F::one()) {
                return Err(domain("sample_increment", format!("cutoff {z} must exceed 1")));
            }
        }
        if !self.has_exact_increments() {
            return Err(Error::Unsupported(
                "exact truncated increments need a finite jump measure; use the ARA mode".into(),
            ));
        }
        Ok(IncrementSampler {
            model: self,
            jumps: WindowSampler::new(&self.measure, truncation.window())?,
        })
    }

    /// `X^{<z}(t)`: increment with upward jumps of size `≥ z` removed.
    pub fn sample_truncated_increment<R: Rng + ?Sized>(
        &self,
        t: F,
        upper_cutoff: F,
        rng: &mut R,
    ) -> Result<F> {
        self.sample_increment(t, Truncation::Upper(upper_cutoff), rng)
    }
}

/// Draws `X^{window}(t)` for one fixed truncation.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler<'a, F, M> {
    model: &'a LevyModel<F, M>,
    jumps: WindowSampler<F>,
}

impl<F: Real, M: JumpMeasure<F>> IncrementSampler<'_, F, M> {
    pub fn sample<R: Rng + ?Sized>(&self, t: F, rng: &mut R) -> Result<F> {
        if !(t >= F::zero()) {
            return Err(domain("sample_increment", format!("negative duration {t}")));
        }
        if t == F::zero() {
            return Ok(F::zero());
        }
        let m = self.model;
        let gaussian = m.brownian_scale * t.sqrt() * F::standard_normal(rng);
        Ok(m.drift * t + gaussian + self.jumps.sum(&m.measure, t, rng))
    }
}

/// Brownian motion plus symmetric two-sided Pareto jumps.
pub type HeavyTailExperimentModel<F> = LevyModel<F, TwoSidedPareto<F>>;

impl<F: Real> LevyModel<F, TwoSidedPareto<F>> {
    /// Jump arrival rate of the experiment model.
    pub const EXPERIMENT_RATE: f64 = 0.5;

    /// Standard Brownian motion plus jumps at rate 0.5 with
    /// `P(W > x) = P(−W > x) = 0.5/(1+x)^α`, zero drift.
    /// Each side of `ν` thus carries mass 0.25.
    pub fn heavy_tail_experiment(alpha: F) -> Result<Self> {
        Self::bm_plus_two_sided_pareto(alpha, F::lit(Self::EXPERIMENT_RATE), F::one())
    }

    pub fn bm_plus_two_sided_pareto(alpha: F, rate: F, sigma: F) -> Result<Self> {
        Self::new(F::zero(), sigma, TwoSidedPareto::new(alpha, rate)?)
    }

    pub fn alpha(&self) -> F {
        self.measure.alpha()
    }
}
