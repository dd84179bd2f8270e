//! Finite Coxeter groups, their Bruhat graphs, and Bakry–Émery curvature.

pub mod checks;
pub mod coxeter;
pub mod dihedral;
pub mod error;
pub mod estimates;
pub mod gamma;
pub mod graph;
pub mod group;
pub mod iso;
pub mod linalg;
pub mod roots;
pub mod spectral;

pub use coxeter::{parse_input, parse_spec, Bond, CoxeterMatrix};
pub use error::{Error, Result};
pub use graph::Graph;
pub use group::Group;
pub use roots::RootSystem;
