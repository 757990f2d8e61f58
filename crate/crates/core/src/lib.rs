//! Random perturbation of point nets into δ-generic position, with
//! Delaunay certification and independent verification tools.

pub mod cli;
pub mod delaunay;
pub mod geom;
pub mod io;
pub mod net;
pub mod perturb;
pub mod testgen;
pub mod verify;
