//! Brute-force oracles shared by the integration tests of this crate and the
//! acceptance suite of the CLI. None of them calls the code under test.

#![allow(dead_code)]

pub mod blocks;
pub mod curvature;
