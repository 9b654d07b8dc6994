//! Exact filtered section rings on toric models.
//!
//! A big line bundle is encoded by its moment polytope `P`, sections of `mL` by the lattice
//! points of `mP`, and a multiplicative filtration by a concave piecewise-linear weight on
//! exponent vectors. From there everything is computed exactly over the rationals: vanishing
//! numbers, the atomic measures `ν_m`, the concave transform on the Okounkov body, the
//! limit measure `ν`, filtered Okounkov body volumes, and restricted volume functions.

pub mod error;
pub mod filtrations;
pub mod formats;
pub mod lattice;
pub mod measures;
pub mod models;
pub mod okounkov;
pub mod polynomial;
pub mod restricted;

pub use error::{Error, Result};
pub use filtrations::{AffinePiece, VanishingNumbers, WeightFiltration};
pub use lattice::{LatticePoint, Rational, RationalPolytope};
pub use measures::{DiscreteMeasure, Measure, PiecewisePolyMeasure};
pub use models::{FlagMap, GradedPiece, ToricModel};
pub use okounkov::{ConcaveTransform, FilteredBody, SliceVolumeFunction};
pub use polynomial::Polynomial;
pub use restricted::{DivisorData, VolumePolynomialFunction};
