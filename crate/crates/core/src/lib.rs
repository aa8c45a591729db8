//! Laplace–Beltrami analysis of surface Gauss maps.

pub mod beltrami;
pub mod cli;
pub mod exactpoly;
pub mod finitetype;
pub mod jets;
pub mod surfaces;
