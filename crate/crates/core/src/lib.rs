//! Clustering of functional data by low-rank representation on the elastic
//! shape space of open curves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod clustering;
pub mod curve;
pub mod datagen;
pub mod error;
pub mod io;
pub mod kmeans;
pub mod manifold;
pub mod solver;

pub use error::{Error, Result};
