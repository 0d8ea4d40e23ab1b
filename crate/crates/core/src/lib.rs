//! Grasp-dataset synthesis for parallel-jaw grippers: quality-diversity
//! optimization over 6-DoF poses on triangle meshes, mesh augmentation with
//! grasp transfer, and a reproducible dataset format.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod geom;
pub mod grasp;
pub mod mesh;
pub mod qd;
pub mod rng;
pub mod stats;
pub mod transfer;
pub mod util;
