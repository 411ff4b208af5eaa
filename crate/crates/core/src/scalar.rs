use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

/// Floating-point scalar used by the geometric and closed-form parts of the crate.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
