//! Computation in finite abstract convexity spaces: convex hulls, Tverberg
//! partitions and Radon numbers, nerves of hull families, and the tools used
//! to verify that Radon's property alone does not force Tverberg numbers to
//! grow linearly with slope `r_2 - 1`.

pub mod bounds;
pub mod counterexample;
pub mod error;
pub mod jamison;
pub mod mask;
pub mod nerve;
pub mod radon;
pub mod space;

pub use error::{Error, Limits, Result};
pub use mask::SubsetMask;
pub use space::{ConvexitySpace, ExampleKind, HullOracle};
