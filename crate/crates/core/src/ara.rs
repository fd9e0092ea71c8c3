//! Asmussen–Rosiński substitution of the small-jump martingale.
//!
//! Jumps with `|x| < 1` are split into bands `[κ_{n,q}, κ_{n,q−1})` with
//! `κ_{n,q} = κ^q/n^r` and `κ_{n,−1} = 1`. The level-`m` process keeps the
//! compensated jumps of bands `0..=m` and replaces every finer band by a
//! Brownian motion with the same variance, so consecutive levels differ in
//! exactly one band.

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::kernels::{stick_lengths, StickSet};
use crate::model::{JumpMeasure, JumpWindow, LevyModel, Truncation, WindowSampler};
use crate::real::Real;
use crate::stick_breaking::LevelPath;

/// `κ_{n,m} = κ^m / n^r` for `m ≥ 0` and `1` for `m = −1`.
pub fn kappa_threshold<F: Real>(n: usize, m: isize, kappa: F, r: F) -> Result<F> {
    if n == 0 {
        return Err(domain("kappa_threshold", "n must be at least 1"));
    }
    match m {
        -1 => Ok(F::one()),
        m if m >= 0 => Ok(kappa.powi(m as i32) / F::from_count(n).powf(r)),
        _ => Err(domain("kappa_threshold", format!("level {m} below -1"))),
    }
}

/// Thresholds and band variances for levels `−1..=τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationLadder<F> {
    /// `κ_{n,q}` stored at index `q + 1`, `q = −1..=τ`.
    pub thresholds: Vec<F>,
    /// `σ̄²(κ_{n,q−1}) − σ̄²(κ_{n,q})` for `q = 0..=τ`.
    pub band_variances: Vec<F>,
    /// `σ̄²(κ_{n,τ})`, carried by the last substitute.
    pub tail_variance: F,
    /// `∫ x ν(dx)` over band `q`, for `q = 0..=τ`.
    pub band_means: Vec<F>,
}

impl<F: Real> TruncationLadder<F> {
    pub fn new<M: JumpMeasure<F>>(measure: &M, n: usize, tau: usize, kappa: F, r: F) -> Result<Self> {
        let thresholds = (-1..=tau as isize)
            .map(|q| kappa_threshold(n, q, kappa, r))
            .collect::<Result<Vec<F>>>()?;
        if thresholds[1] > F::one() {
            return Err(domain("TruncationLadder", "n^r must be at least 1"));
        }
        let sigma2 = |c: F| -> Result<F> {
            if c > F::zero() {
                measure.small_jump_variance(c)
            } else {
                Ok(F::zero())
            }
        };
        let levels = thresholds.iter().map(|&c| sigma2(c)).collect::<Result<Vec<F>>>()?;
        let band_variances = levels.windows(2).map(|w| (w[0] - w[1]).max(F::zero())).collect();
        let band_means = thresholds
            .windows(2)
            .map(|w| measure.band_first_moment(w[1], w[0]))
            .collect();
        Ok(Self {
            tail_variance: levels[tau + 1],
            thresholds,
            band_variances,
            band_means,
        })
    }

    pub fn tau(&self) -> usize {
        self.band_variances.len() - 1
    }

    /// `κ_{n,q}` for `q ≥ −1`.
    pub fn threshold(&self, q: isize) -> F {
        self.thresholds[(q + 1) as usize]
    }

    /// Band `q ∈ 0..=τ` containing magnitude `x`, if any.
    fn band_of(&self, x: F) -> Option<usize> {
        let above = self.thresholds.partition_point(|&t| t > x);
        (1..=self.thresholds.len() - 1).contains(&above).then(|| above - 1)
    }
}

/// Components of one stick at every ladder level.
#[derive(Debug, Clone, PartialEq)]
pub struct AraLadder<F> {
    pub length: F,
    /// `c_X · l`.
    pub drift: F,
    /// `x ~ N(0, σ² l)`.
    pub base: F,
    /// `y^q` at index `q + 1`, `q = −1..=τ`.
    pub y: Vec<F>,
    /// `w^q` at index `q`, `q = 0..=τ+1`.
    pub w: Vec<F>,
    y_prefix: Vec<F>,
    w_suffix: Vec<F>,
}

impl<F: Real> AraLadder<F> {
    pub fn from_parts(length: F, drift: F, base: F, y: Vec<F>, w: Vec<F>) -> Result<Self> {
        if y.len() < 2 || w.len() != y.len() {
            return Err(Error::Structure(format!(
                "ladder with {} jump parts and {} substitutes",
                y.len(),
                w.len()
            )));
        }
        let mut y_prefix = Vec::with_capacity(y.len());
        let mut acc = F::zero();
        for &v in &y {
            acc = acc + v;
            y_prefix.push(acc);
        }
        // w_suffix[m] = Σ_{q=m+1}^{τ+1} w^q, m = 0..=τ
        let tau = y.len() - 2;
        let mut w_suffix = vec![F::zero(); tau + 1];
        let mut acc = F::zero();
        for m in (0..=tau).rev() {
            acc = acc + w[m + 1];
            w_suffix[m] = acc;
        }
        Ok(Self {
            length,
            drift,
            base,
            y,
            w,
            y_prefix,
            w_suffix,
        })
    }

    pub fn tau(&self) -> usize {
        self.y.len() - 2
    }
}

/// `ξ^m = c_X l + x + Σ_{q=−1}^{m} y^q + Σ_{q=m+1}^{τ+1} w^q` for `0 ≤ m ≤ τ`.
pub fn assemble_level<F: Real>(ladder: &AraLadder<F>, m: usize) -> Result<F> {
    if m > ladder.tau() {
        return Err(Error::Index {
            op: "assemble_level",
            index: m,
            max: ladder.tau(),
        });
    }
    Ok(ladder.drift + ladder.base + ladder.y_prefix[m + 1] + ladder.w_suffix[m])
}

/// Draws every component of a stick of length `l`.
///
/// `truncation` sets the large-jump window of `y^{−1}`: `Upper(z)` keeps
/// `(−∞,−1] ∪ [1,z)`, `Symmetric(z)` keeps `(−z,−1] ∪ [1,z)`.
pub fn sample_ara_ladder<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    length: F,
    ladder: &TruncationLadder<F>,
    model: &LevyModel<F, M>,
    truncation: Truncation<F>,
    rng: &mut R,
) -> Result<AraLadder<F>> {
    AraSampler::new(ladder, model, truncation)?.sample(length, rng)
}

/// Stick-ladder sampler with the jump windows of one truncation precomputed.
#[derive(Debug, Clone, Copy)]
pub struct AraSampler<'a, F, M> {
    ladder: &'a TruncationLadder<F>,
    model: &'a LevyModel<F, M>,
    large: WindowSampler<F>,
    band: WindowSampler<F>,
}

impl<'a, F: Real, M: JumpMeasure<F>> AraSampler<'a, F, M> {
    pub fn new(ladder: &'a TruncationLadder<F>, model: &'a LevyModel<F, M>, truncation: Truncation<F>) -> Result<Self> {
        let measure = model.measure();
        let mut large = truncation.window();
        large.up.0 = large.up.0.max(F::one());
        large.down.0 = large.down.0.max(F::one());
        let floor = ladder.threshold(ladder.tau() as isize);
        Ok(Self {
            ladder,
            model,
            large: WindowSampler::new(measure, large)?,
            band: WindowSampler::new(measure, JumpWindow::band(floor, F::one()))?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, length: F, rng: &mut R) -> Result<AraLadder<F>> {
        let ladder = self.ladder;
        let tau = ladder.tau();
        let zero = F::zero();
        if !(length > zero) {
            return AraLadder::from_parts(zero, zero, zero, vec![zero; tau + 2], vec![zero; tau + 2]);
        }
        let measure = self.model.measure();
        let base = self.model.brownian_scale() * length.sqrt() * F::standard_normal(rng);

        let mut y = vec![zero; tau + 2];
        y[0] = self.large.sum(measure, length, rng);
        self.band.for_each(measure, length, rng, |x| {
            if let Some(q) = ladder.band_of(x.abs()) {
                y[q + 1] = y[q + 1] + x;
            }
        });
        for (q, &mean) in ladder.band_means.iter().enumerate() {
            y[q + 1] = y[q + 1] - length * mean;
        }

        let mut w = Vec::with_capacity(tau + 2);
        for &v in ladder.band_variances.iter().chain(std::iter::once(&ladder.tail_variance)) {
            w.push((v * length).sqrt() * F::standard_normal(rng));
        }
        AraLadder::from_parts(length, self.model.drift() * length, base, y, w)
    }
}

/// Ladders of every stick in one interval, with level-wise endpoints and
/// supremum estimates cached for `m = 1..=τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AraIntervalRecord<F> {
    pub index: usize,
    pub sticks: StickSet<F>,
    pub ladders: Vec<AraLadder<F>>,
    pub base_sticks: usize,
    pub tau: usize,
    endpoints: Vec<F>,
    suprema: Vec<F>,
}

impl<F: Real> AraIntervalRecord<F> {
    pub fn from_parts(index: usize, sticks: StickSet<F>, ladders: Vec<AraLadder<F>>, base_sticks: usize) -> Result<Self> {
        let tau = ladders.first().map(|l| l.tau()).unwrap_or(0);
        if ladders.len() != base_sticks + tau + 1 || ladders.iter().any(|l| l.tau() != tau) {
            return Err(Error::Structure(format!(
                "interval {index}: {} ladders for {base_sticks} base sticks and tau {tau}",
                ladders.len()
            )));
        }
        let mut endpoints = vec![F::zero(); tau + 1];
        let mut suprema = vec![F::zero(); tau + 1];
        for m in 1..=tau {
            let mut end = F::zero();
            let mut sup = F::zero();
            for (j, ladder) in ladders.iter().enumerate() {
                let v = assemble_level(ladder, m)?;
                end = end + v;
                if j < base_sticks + m {
                    sup = sup + v.max(F::zero());
                }
            }
            endpoints[m] = end;
            suprema[m] = sup;
        }
        Ok(Self {
            index,
            sticks,
            ladders,
            base_sticks,
            tau,
            endpoints,
            suprema,
        })
    }
}

impl<F: Real> LevelPath<F> for AraIntervalRecord<F> {
    fn tau(&self) -> usize {
        self.tau
    }

    fn endpoint(&self, m: usize) -> F {
        self.endpoints[m.min(self.tau)]
    }

    fn supremum(&self, m: usize) -> Result<F> {
        if m == 0 || m > self.tau {
            return Err(Error::Index {
                op: "ara supremum",
                index: m,
                max: self.tau,
            });
        }
        Ok(self.suprema[m])
    }
}

/// ARA counterpart of
/// [`build_interval_records`](crate::stick_breaking::build_interval_records).
pub fn build_ara_records<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    interval_lengths: &[F],
    base_sticks: usize,
    ladder: &TruncationLadder<F>,
    model: &LevyModel<F, M>,
    truncation: Truncation<F>,
    rng: &mut R,
) -> Result<Vec<AraIntervalRecord<F>>> {
    let tau = ladder.tau();
    let sampler = AraSampler::new(ladder, model, truncation)?;
    interval_lengths
        .iter()
        .enumerate()
        .map(|(index, &len)| {
            let sticks = stick_lengths(len, base_sticks + tau, rng);
            let ladders = sticks
                .lengths
                .iter()
                .chain(std::iter::once(&sticks.residual))
                .map(|&l| sampler.sample(l, rng))
                .collect::<Result<Vec<_>>>()?;
            AraIntervalRecord::from_parts(index, sticks, ladders, base_sticks)
        })
        .collect()
}
