#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod debias;
pub mod embedding;
pub mod geometry;
pub mod lexicons;
pub mod metrics;
pub mod numerics;
pub mod report;
pub mod viz;
