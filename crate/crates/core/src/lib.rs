//! S-curves in polynomial external fields: quadratic differentials, critical
//! trajectories, equilibrium measures and zeros of non-Hermitian orthogonal
//! polynomials.

pub mod cubic;
pub mod equilibrium;
pub mod family;
pub mod mp;
pub mod orthopoly;
pub mod error;
pub mod poly;
pub mod potential;
pub mod quadrature;
pub mod quaddiff;
pub mod quintic;
pub mod resultant;
pub mod roots;

pub use error::{Error, Result};
pub use poly::C64;
