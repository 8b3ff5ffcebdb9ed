//! Patterson-Sullivan measures for discrete groups of isometries of the
//! hyperbolic plane, computed on finite orbit balls.
//!
//! [`geometry`] has the disk model, [`group`] the Möbius generators and
//! presets, [`orbit`] enumerates orbit balls, [`series`] estimates the critical
//! exponent, [`measure`] builds histograms and audits them, and [`flow`] samples
//! the BMS measure and classifies the geodesic flow. [`report`] and [`config`]
//! back the `psbench` binary.

// comparisons like `!(x > 0.0)` are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod group;
pub mod measure;
pub mod orbit;
pub mod report;
pub mod series;
pub mod sum;
