//! Lie-Scheffers-Brockett optimal control on SO(3), SU(2), SL(2,R) and SO(2,1).

// `!(a <= b)` is used on purpose so that NaN takes the failing branch
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod lie;
pub mod actions;
pub mod dynamics;
pub mod verify;
pub mod scenario;
pub mod output;
pub mod cli;
