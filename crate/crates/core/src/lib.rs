#![no_std]
#![doc = include_str!("../README.md")]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod assumptions;
pub mod coupling;
pub mod domains;
pub mod geometry;
pub mod hinges;
pub mod lyapunov;
pub mod math;
pub mod ode;
pub mod par;
pub mod spectral;
pub mod vec2;

pub use geometry::{BoundaryCurve, BoundaryPiece, GeometryError, LineRepr};
pub use vec2::Vec2;
