//! Exact crude Monte Carlo for Brownian motion plus compound Poisson jumps.
//!
//! Jump epochs are exponential gaps; between epochs the path is a Brownian
//! motion with drift, whose maximum given both endpoints has the bridge law
//! `P(max ≥ m) = exp(−2(m − y₀)(m − y₁)/(σ²Δt))`. No time grid is involved.

use rand::Rng;

use crate::engine::{replicate, replicate_until};
use crate::error::{Error, Result};
use crate::model::{JumpMeasure, LevyModel};
use crate::params::{BarrierEventSpec, EventSpec};
use crate::real::Real;
use crate::stats::Summary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrudeEvent<F> {
    /// `sup X̄_n ≥ a` with every upward jump `< n b`.
    OneSided(EventSpec<F>),
    /// `sup_t X̄_n(t) + ct ≥ a` and `X̄_n(1) ≤ −b`.
    DownAndIn(BarrierEventSpec<F>),
}

impl<F: Real> CrudeEvent<F> {
    fn drift(&self) -> F {
        match self {
            CrudeEvent::OneSided(_) => F::zero(),
            CrudeEvent::DownAndIn(s) => s.c,
        }
    }

    fn barrier(&self) -> F {
        match self {
            CrudeEvent::OneSided(e) => e.a(),
            CrudeEvent::DownAndIn(s) => s.a,
        }
    }
}

/// `P(max of a Brownian bridge from y0 to y1 over dt reaches level)`.
pub fn bridge_exceedance<F: Real>(y0: F, y1: F, dt: F, sigma: F, level: F) -> F {
    if y0 >= level || y1 >= level {
        return F::one();
    }
    let var = sigma * sigma * dt;
    if !(var > F::zero()) {
        return F::zero();
    }
    (-F::lit(2.0) * (level - y0) * (level - y1) / var).exp()
}

/// Exact draw of the bridge maximum by inverting its conditional law.
pub fn sample_bridge_maximum<F: Real, R: Rng + ?Sized>(y0: F, y1: F, dt: F, sigma: F, rng: &mut R) -> F {
    let u = F::open01(rng);
    let gap = y1 - y0;
    let spread = (gap * gap - F::lit(2.0) * sigma * sigma * dt * u.ln()).sqrt();
    (y0 + y1 + spread) * F::lit(0.5)
}

fn require_exact<F: Real, M: JumpMeasure<F>>(model: &LevyModel<F, M>) -> Result<(F, F)> {
    let up = model.measure().upper_tail(F::zero());
    let down = model.measure().lower_tail(F::zero());
    if !(up.is_finite() && down.is_finite()) {
        return Err(Error::Unsupported(
            "crude sampling needs a finite jump measure".into(),
        ));
    }
    Ok((up, down))
}

/// Signed jump drawn from `ν` normalized to total mass `up + down`.
#[inline]
fn draw_jump<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(measure: &M, up: F, down: F, rng: &mut R) -> F {
    let y = (F::one() - F::uniform(rng)) * (up + down);
    if y <= up {
        measure.upper_tail_inverse(y)
    } else {
        -measure.lower_tail_inverse(y - up)
    }
}

/// Exact draw of `I{X̄_n ∈ A}`.
pub fn crude_indicator<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    model: &LevyModel<F, M>,
    event: &CrudeEvent<F>,
    n: usize,
    rng: &mut R,
) -> Result<bool> {
    let (up, down) = require_exact(model)?;
    let measure = model.measure();
    let horizon = F::from_count(n);
    let level = horizon * event.barrier();
    let drift = model.drift() + event.drift();
    let sigma = model.brownian_scale();
    let rate = up + down;
    let cap = match event {
        CrudeEvent::OneSided(e) => Some(horizon * e.b()),
        CrudeEvent::DownAndIn(_) => None,
    };

    let mut t = F::zero();
    let mut x = F::zero();
    let mut crossed = false;
    loop {
        let gap = if rate > F::zero() { F::exp1(rng) / rate } else { F::infinity() };
        let last = gap >= horizon - t;
        let dt = if last { horizon - t } else { gap };
        let y1 = x + drift * dt + sigma * dt.sqrt() * F::standard_normal(rng);
        if !crossed {
            let p = bridge_exceedance(x, y1, dt, sigma, level);
            crossed = p >= F::one() || (p > F::zero() && F::uniform(rng) < p);
        }
        t = t + dt;
        x = y1;
        if last {
            break;
        }
        let z = draw_jump(measure, up, down, rng);
        if let Some(cap) = cap {
            if z >= cap {
                return Ok(false);
            }
        }
        x = x + z;
        if crossed {
            if let Some(cap) = cap {
                // no further path detail matters, only later capped jumps
                let capped_rate = measure.upper_tail(cap);
                return Ok(F::uniform(rng) < (-(horizon - t) * capped_rate).exp());
            }
        } else if x >= level {
            crossed = true;
        }
    }
    match event {
        CrudeEvent::OneSided(_) => Ok(crossed),
        CrudeEvent::DownAndIn(s) => Ok(crossed && x - s.c * horizon <= -(horizon * s.b)),
    }
}

/// A fully recorded crude path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<F> {
    pub epochs: Vec<F>,
    pub sizes: Vec<F>,
    /// Path value at the left end of every segment (just after a jump).
    pub starts: Vec<F>,
    /// Path value at the right end of every segment (just before a jump).
    pub ends: Vec<F>,
    /// Exact maximum over each segment.
    pub bridge_maxima: Vec<F>,
    pub indicator: bool,
}

impl<F: Real> PathSample<F> {
    pub fn supremum(&self) -> F {
        self.bridge_maxima.iter().copied().fold(F::zero(), F::max)
    }

    pub fn endpoint(&self) -> F {
        self.ends.last().copied().unwrap_or(F::zero())
    }
}

/// Simulates a whole path on `[0, n]` with exact bridge maxima per segment.
pub fn sample_path<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    model: &LevyModel<F, M>,
    event: &CrudeEvent<F>,
    n: usize,
    rng: &mut R,
) -> Result<PathSample<F>> {
    let (up, down) = require_exact(model)?;
    let measure = model.measure();
    let horizon = F::from_count(n);
    let drift = model.drift() + event.drift();
    let sigma = model.brownian_scale();
    let rate = up + down;
    let mut path = PathSample {
        epochs: Vec::new(),
        sizes: Vec::new(),
        starts: Vec::new(),
        ends: Vec::new(),
        bridge_maxima: Vec::new(),
        indicator: false,
    };
    let mut t = F::zero();
    let mut x = F::zero();
    loop {
        let gap = if rate > F::zero() { F::exp1(rng) / rate } else { F::infinity() };
        let last = gap >= horizon - t;
        let dt = if last { horizon - t } else { gap };
        let y1 = x + drift * dt + sigma * dt.sqrt() * F::standard_normal(rng);
        path.starts.push(x);
        path.ends.push(y1);
        path.bridge_maxima.push(sample_bridge_maximum(x, y1, dt, sigma, rng));
        t = t + dt;
        x = y1;
        if last {
            break;
        }
        let z = draw_jump(measure, up, down, rng);
        path.epochs.push(t);
        path.sizes.push(z);
        x = x + z;
    }
    let sup = path.supremum().max(path.starts.iter().copied().fold(F::zero(), F::max));
    path.indicator = match event {
        CrudeEvent::OneSided(e) => {
            sup >= horizon * e.a() && path.sizes.iter().all(|&z| z < horizon * e.b())
        }
        CrudeEvent::DownAndIn(s) => sup >= horizon * s.a && x - s.c * horizon <= -(horizon * s.b),
    };
    Ok(path)
}

/// Crude estimate with a fixed number of samples.
pub fn crude_estimate<F: Real, M: JumpMeasure<F>>(
    model: &LevyModel<F, M>,
    event: &CrudeEvent<F>,
    n: usize,
    sample_count: u64,
    seed: u64,
) -> Result<Summary> {
    if sample_count == 0 {
        return Err(crate::error::invalid("sample_count", "at least one sample is needed"));
    }
    require_exact(model)?;
    replicate(seed, sample_count, |rng| {
        Ok(if crude_indicator(model, event, n, rng)? { 1.0 } else { 0.0 })
    })
}

/// Crude estimate following the `N ≥ hits/p̂` rule: sampling stops once
/// `target_hits` successes are seen, within `[min_count, max_count]`.
/// The flag reports whether `max_count` was reached first.
pub fn crude_estimate_adaptive<F: Real, M: JumpMeasure<F>>(
    model: &LevyModel<F, M>,
    event: &CrudeEvent<F>,
    n: usize,
    min_count: u64,
    max_count: u64,
    target_hits: u64,
    seed: u64,
) -> Result<(Summary, bool)> {
    require_exact(model)?;
    replicate_until(seed, min_count.max(1), max_count, target_hits, |rng| {
        Ok(if crude_indicator(model, event, n, rng)? { 1.0 } else { 0.0 })
    })
}
