//! Scalar abstraction shared by every sampler in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::distr::{Distribution, Open01, StandardUniform};
use rand::Rng;
use rand_distr::{Exp1, Poisson, StandardNormal};

/// Floating point scalar: `f32` or `f64`.
///
/// The random-variate hooks live on the trait because `Distribution<Self>`
/// bounds on foreign types are not implied by a supertrait.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    /// Uniform on `[0, 1)`.
    fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform on the open interval `(0, 1)`.
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Exponential with unit rate.
    fn exp1<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Poisson count with mean `lambda`; `lambda <= 0` gives 0.
    fn poisson<R: Rng + ?Sized>(lambda: Self, rng: &mut R) -> u64;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_count(k: usize) -> Self {
        Self::lit(k as f64)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardUniform.sample(rng)
            }

            #[inline]
            fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn exp1<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }

            fn poisson<R: Rng + ?Sized>(lambda: Self, rng: &mut R) -> u64 {
                if !(lambda > 0.0) {
                    return 0;
                }
                match Poisson::new(lambda) {
                    Ok(dist) => {
                        let k: $t = dist.sample(rng);
                        k as u64
                    }
                    // only reachable for lambda beyond ~1e19
                    Err(_) => u64::MAX,
                }
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
