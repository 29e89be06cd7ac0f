//! Jordan–Lie geometry of finite-dimensional C*-algebras: orbits of positive
//! functionals and states, their Riemannian metrics, curvature, the GNS
//! picture and geodesics.

pub mod algebra;
pub mod curvature;
pub mod error;
pub mod geodesic;
pub mod gns;
pub mod io;
pub mod metric;
pub mod orbits;
pub mod sample;
pub mod verify;

pub use algebra::{AlgebraShape, Element};
pub use error::{Error, Result};
pub use orbits::{Functional, PositiveFunctional, StateFunctional, TangentVector};
