//! Numerical kernels shared by the geometric modules.

pub mod ode;
pub mod quad;
pub mod roots;
