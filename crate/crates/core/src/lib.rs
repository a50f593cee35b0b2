#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod cli;
pub mod config;
pub mod elastic;
pub mod linalg;
pub mod medium;
pub mod oracles;
pub mod quadrature;
pub mod spectral;
pub mod transform;
pub mod verify;
