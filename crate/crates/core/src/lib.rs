//! Exact calculus of jets on the line, formal flows, and holonomy invariants of
//! transverse order-k singular foliations.

pub mod error;
pub mod exact_series;
pub mod flows;
pub mod foliations;
pub mod groupoid_model;
pub mod holonomy;
pub mod jet_groups;
pub mod linalg;

pub use error::{Error, Result};
