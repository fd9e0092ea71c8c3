//! Stick-breaking approximation of interval suprema and endpoints.
//!
//! An interval of length `T` is broken into sticks `l_1, l_2, …` with
//! `E l_j = T/2^j`. With `ξ_j` independent increments over the sticks,
//! `(X(T), sup_{t≤T} X(t)) = (Σ ξ_j, Σ ξ_j⁺)` in law. Keeping the first few
//! sticks plus one residual stick gives an exact endpoint and a supremum
//! that is biased low by a geometrically small amount.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::{stick_lengths, StickSet};
use crate::model::{JumpMeasure, LevyModel, Truncation};
use crate::real::Real;

/// Endpoint and level-`m` supremum of one inter-jump interval.
pub trait LevelPath<F> {
    fn tau(&self) -> usize;

    /// Increment of the level-`m` process over the whole interval,
    /// residual stick included.
    fn endpoint(&self, m: usize) -> F;

    /// `M̂^{(i),m}`: positive parts of the first `t_n + m` sticks.
    fn supremum(&self, m: usize) -> Result<F>;
}

/// Sticks and exact increments of one interval.
///
/// `increments` holds `t_n + τ + 1` entries; the last one belongs to the
/// residual stick.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRecord<F> {
    pub index: usize,
    pub sticks: StickSet<F>,
    pub increments: Vec<F>,
    pub base_sticks: usize,
    pub tau: usize,
    positive_prefix: Vec<F>,
    endpoint: F,
}

impl<F: Real> IntervalRecord<F> {
    /// Builds a record from given sticks and increments.
    pub fn from_parts(
        index: usize,
        sticks: StickSet<F>,
        increments: Vec<F>,
        base_sticks: usize,
        tau: usize,
    ) -> Result<Self> {
        let expected = base_sticks + tau + 1;
        if increments.len() != expected || sticks.lengths.len() + 1 != expected {
            return Err(Error::Structure(format!(
                "interval {index}: {} increments and {} sticks, expected {expected} increments",
                increments.len(),
                sticks.lengths.len() + 1
            )));
        }
        let mut positive_prefix = Vec::with_capacity(expected);
        let mut acc = F::zero();
        positive_prefix.push(acc);
        for &x in &increments[..expected - 1] {
            acc = acc + x.max(F::zero());
            positive_prefix.push(acc);
        }
        let endpoint = increments.iter().copied().sum();
        Ok(Self {
            index,
            sticks,
            increments,
            base_sticks,
            tau,
            positive_prefix,
            endpoint,
        })
    }

    pub fn length(&self) -> F {
        self.sticks.total()
    }
}

impl<F: Real> LevelPath<F> for IntervalRecord<F> {
    fn tau(&self) -> usize {
        self.tau
    }

    fn endpoint(&self, _m: usize) -> F {
        self.endpoint
    }

    fn supremum(&self, m: usize) -> Result<F> {
        sba_supremum_estimate(self, m)
    }
}

/// `Σ_{j ≤ t_n + m} (ξ_j)⁺` for `1 ≤ m ≤ τ`.
pub fn sba_supremum_estimate<F: Real>(record: &IntervalRecord<F>, m: usize) -> Result<F> {
    if m == 0 || m > record.tau {
        return Err(Error::Index {
            op: "sba_supremum_estimate",
            index: m,
            max: record.tau,
        });
    }
    Ok(record.positive_prefix[record.base_sticks + m])
}

fn require_exact<F: Real, M: JumpMeasure<F>>(model: &LevyModel<F, M>) -> Result<()> {
    if model.has_exact_increments() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "exact truncated increments are unavailable for this model; use the ARA mode".into(),
        ))
    }
}

/// One record per interval `[u_{i−1}, u_i]`: `t_n + τ` broken sticks plus the
/// residual, each carrying an exact draw of the truncated process.
pub fn build_interval_records<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    interval_lengths: &[F],
    base_sticks: usize,
    tau: usize,
    model: &LevyModel<F, M>,
    truncation: Truncation<F>,
    rng: &mut R,
) -> Result<Vec<IntervalRecord<F>>> {
    require_exact(model)?;
    let sampler = model.increment_sampler(truncation)?;
    interval_lengths
        .iter()
        .enumerate()
        .map(|(index, &len)| {
            let sticks = stick_lengths(len, base_sticks + tau, rng);
            let mut increments = Vec::with_capacity(base_sticks + tau + 1);
            for &l in sticks.lengths.iter().chain(std::iter::once(&sticks.residual)) {
                increments.push(sampler.sample(l, rng)?);
            }
            IntervalRecord::from_parts(index, sticks, increments, base_sticks, tau)
        })
        .collect()
}

/// `(X̂(T), M̂(T))` with `stick_count` broken sticks; the endpoint includes the
/// residual stick and is exact, the supremum omits it.
pub fn joint_endpoint_supremum<F: Real, M: JumpMeasure<F>, R: Rng + ?Sized>(
    horizon: F,
    model: &LevyModel<F, M>,
    stick_count: usize,
    rng: &mut R,
) -> Result<(F, F)> {
    require_exact(model)?;
    if stick_count == 0 {
        return Err(crate::error::invalid("stick_count", "at least one stick is needed"));
    }
    let sampler = model.increment_sampler(Truncation::None)?;
    let sticks = stick_lengths(horizon, stick_count, rng);
    let mut endpoint = F::zero();
    let mut sup = F::zero();
    for &l in &sticks.lengths {
        let x = sampler.sample(l, rng)?;
        endpoint = endpoint + x;
        sup = sup + x.max(F::zero());
    }
    endpoint = endpoint + sampler.sample(sticks.residual, rng)?;
    Ok((endpoint, sup))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{stick_lengths_from, RngHandle};

    fn forced(increments: Vec<f64>, base: usize, tau: usize) -> IntervalRecord<f64> {
        let fractions = vec![0.5; base + tau];
        let sticks = stick_lengths_from(1.0, &fractions);
        IntervalRecord::from_parts(0, sticks, increments, base, tau).unwrap()
    }

    #[test]
    fn negative_increments_give_zero_supremum() {
        let r = forced(vec![-1.0, -0.5, -0.2, -0.1, -3.0], 2, 2);
        assert_eq!(sba_supremum_estimate(&r, 1).unwrap(), 0.0);
        assert_eq!(sba_supremum_estimate(&r, 2).unwrap(), 0.0);
        assert!((r.endpoint(1) + 4.8).abs() < 1e-12);
    }

    #[test]
    fn top_level_skips_only_the_residual() {
        let r = forced(vec![1.0, -0.5, 2.0, 0.25, 10.0], 2, 2);
        assert_eq!(sba_supremum_estimate(&r, 1).unwrap(), 3.0);
        assert_eq!(sba_supremum_estimate(&r, 2).unwrap(), 3.25);
        assert_eq!(r.endpoint(2), 12.75);
    }

    #[test]
    fn level_out_of_range() {
        let r = forced(vec![1.0, 1.0, 1.0], 1, 1);
        assert!(matches!(sba_supremum_estimate(&r, 0), Err(Error::Index { .. })));
        assert!(matches!(sba_supremum_estimate(&r, 2), Err(Error::Index { .. })));
    }

    #[test]
    fn misaligned_parts_rejected() {
        let sticks = stick_lengths_from(1.0, &[0.5, 0.5]);
        assert!(IntervalRecord::from_parts(0, sticks, vec![0.0; 4], 1, 1).is_err());
    }

    #[test]
    fn records_cover_each_interval() {
        let model = LevyModel::heavy_tail_experiment(1.6f64).unwrap();
        let mut rng = RngHandle::new(5, 1);
        let lengths = [3.0, 0.0, 7.5];
        let records = build_interval_records(&lengths, 6, 3, &model, Truncation::Upper(50.0), &mut rng).unwrap();
        assert_eq!(records.len(), 3);
        for (r, &len) in records.iter().zip(&lengths) {
            assert_eq!(r.increments.len(), 10);
            assert!((r.length() - len).abs() < 1e-12);
        }
        assert!(records[1].increments.iter().all(|&x| x == 0.0));
        let single = build_interval_records(&[100.0], 6, 3, &model, Truncation::Upper(50.0), &mut rng).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn supremum_bounds() {
        let model = LevyModel::heavy_tail_experiment(1.6f64).unwrap();
        let mut rng = RngHandle::new(9, 0);
        for _ in 0..1000 {
            let (x, m) = joint_endpoint_supremum(2.0, &model, 5, &mut rng).unwrap();
            assert!(m >= 0.0);
            assert!(x.is_finite());
        }
    }
}
