//! Scalar abstraction: every numeric kernel in this crate is generic over
//! [`Real`], which `f32` and `f64` both satisfy.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + NumAssign
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("f64 constant not representable in scalar type")
}

/// Converts the working scalar into `f64` for reporting.
#[inline]
pub fn to_f64<F: Real>(v: F) -> f64 {
    v.to_f64().expect("scalar not representable as f64")
}
