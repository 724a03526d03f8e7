//! Geodesic flows of Liouville surfaces, their quadratic integrals and the
//! associated webs, integrable billiards, and the projective-dual picture of
//! caustics and Poncelet-type porisms.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod billiard;
pub mod cli;
pub mod config;
pub mod dual;
pub mod experiments;
pub mod expr;
pub mod integrals;
pub mod io;
pub mod numeric;
pub mod render;
pub mod surface;
pub mod svg;
pub mod webs;
