#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod constants;
pub mod error;
pub mod families;
pub mod norms;
pub mod numeric;
pub mod operators;
pub mod parameters;
pub mod quadrature;
pub mod radial;
pub mod verification;
pub mod weights;
