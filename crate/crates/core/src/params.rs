//! Rare-event descriptions and algorithm parameters.

use crate::error::{invalid, Result};
use crate::real::Real;

/// `A = {ξ : sup ξ ≥ a, every upward jump < b}` on the scaled path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventSpec<F> {
    a: F,
    b: F,
    l_star: usize,
}

impl<F: Real> EventSpec<F> {
    pub fn new(a: F, b: F) -> Result<Self> {
        if !(a > F::zero()) || !(b > F::zero()) || !a.is_finite() || !b.is_finite() {
            return Err(invalid("a/b", format!("barrier a = {a} and jump cap b = {b} must be positive")));
        }
        let ratio = a / b;
        if (ratio - ratio.round()).abs() <= F::lit(1e-12) * ratio.max(F::one()) {
            return Err(invalid("a/b", format!("a/b = {ratio} must not be an integer")));
        }
        let l_star = ratio.ceil().to_usize().unwrap_or(usize::MAX);
        Ok(Self { a, b, l_star })
    }

    pub fn a(&self) -> F {
        self.a
    }

    pub fn b(&self) -> F {
        self.b
    }

    /// Minimum number of capped jumps needed to reach the barrier: `⌈a/b⌉`.
    pub fn l_star(&self) -> usize {
        self.l_star
    }
}

/// Down-and-in event `{ξ(1) ≤ −b, sup_t ξ(t) + ct ≥ a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierEventSpec<F> {
    pub a: F,
    pub b: F,
    pub c: F,
}

impl<F: Real> BarrierEventSpec<F> {
    pub fn new(a: F, b: F, c: F) -> Result<Self> {
        if !(a > F::zero()) || !(b > F::zero()) {
            return Err(invalid("a/b", "barrier levels must be positive"));
        }
        if !(c < a) || !c.is_finite() {
            return Err(invalid("c", format!("drift c = {c} must be finite and below a = {a}")));
        }
        Ok(Self { a, b, c })
    }
}

/// How increments of the small-jump process are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exact truncated increments on every stick.
    ExactSba,
    /// Asmussen–Rosiński substitution of the small-jump martingale.
    Ara,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgoParams<F> {
    /// Scale factor; the path lives on `[0, n]`.
    pub n: usize,
    /// Large-jump threshold, relative to `n`.
    pub gamma: F,
    /// Weight of the nominal law in the defensive mixture.
    pub w: F,
    /// Geometric rate of the truncation index.
    pub rho: F,
    /// Extra `⌈d·log₂ n⌉` sticks in every supremum estimate.
    pub d: F,
    pub kappa: F,
    pub r: F,
    pub mode: Mode,
}

impl<F: Real> AlgoParams<F> {
    /// Defaults used by the reinsurance experiment:
    /// `γ = 0.25, w = 0.05, ρ = 0.97, d = 4, κ = 0.5, r = 1.5`.
    pub fn experiment(n: usize, mode: Mode) -> Self {
        Self {
            n,
            gamma: F::lit(0.25),
            w: F::lit(0.05),
            rho: F::lit(0.97),
            d: F::lit(4.0),
            kappa: F::lit(0.5),
            r: F::lit(1.5),
            mode,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Hard checks; `jump_cap` is the event's `b` (`γ` must lie below it).
    pub fn validate(&self, jump_cap: Option<F>) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "scale factor must be at least 1"));
        }
        if !(self.gamma > F::zero()) {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if let Some(b) = jump_cap {
            if !(self.gamma < b) {
                return Err(invalid("gamma", format!("gamma = {} must lie below b = {b}", self.gamma)));
            }
        }
        if !(self.w > F::zero() && self.w <= F::one()) {
            return Err(invalid("w", format!("mixture weight must lie in (0, 1], got {}", self.w)));
        }
        if !(self.rho > F::zero() && self.rho < F::one()) {
            return Err(invalid("rho", format!("must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.d > F::zero()) {
            return Err(invalid("d", format!("must be positive, got {}", self.d)));
        }
        if !(self.kappa >= F::zero() && self.kappa < F::one()) {
            return Err(invalid("kappa", format!("must lie in [0, 1), got {}", self.kappa)));
        }
        if !(self.r > F::zero()) {
            return Err(invalid("r", format!("must be positive, got {}", self.r)));
        }
        if self.mode == Mode::Ara && !(self.big_jump_floor() > F::one()) {
            return Err(invalid("gamma", "ARA needs n·gamma > 1"));
        }
        Ok(())
    }

    pub fn horizon(&self) -> F {
        F::from_count(self.n)
    }

    /// `n·γ`, the size above which a jump belongs to the skeleton.
    pub fn big_jump_floor(&self) -> F {
        self.horizon() * self.gamma
    }

    /// `t_n = ⌈d·log₂ n⌉`.
    pub fn base_sticks(&self) -> usize {
        base_sticks(self.n, self.d.as_f64())
    }
}

/// `⌈d·log₂ n⌉`, snapping values within 1e-9 of an integer to it.
pub fn base_sticks(n: usize, d: f64) -> usize {
    let x = d * (n as f64).log2();
    let nearest = x.round();
    let c = if (x - nearest).abs() < 1e-9 { nearest } else { x.ceil() };
    c.max(0.0) as usize
}
