//! Planar linked-conic model of multiple-gravity-assist trajectories and an
//! ant-colony search over discrete trajectory plans.

// `!(x > 0.0)` is used on purpose to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cli;
pub mod config;
pub mod conic;
pub mod ephem;
pub mod legs;
pub mod planner;
pub mod plot;
pub mod problem;
pub mod report;
pub mod roots;
