//! Exact rational substrate: scalars, linear algebra, polytopes, lattice enumeration and volume.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

mod enumerate;
pub mod hull;
pub mod linalg;
pub mod polytope;
pub mod rational;
mod volume;

pub use hull::convex_hull;
pub use polytope::{Halfspace, RationalPolytope};
pub use rational::Rational;

/// Integer point of `ℤ^d`; ordering is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<BigInt>);

impl LatticePoint {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Self(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![BigInt::from(0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        self.0.iter().map(rational::from_big).collect()
    }

    /// Coordinate as `i64`; panics if it does not fit.
    pub fn coord_i64(&self, i: usize) -> i64 {
        self.0[i].to_i64().expect("coordinate fits in i64")
    }
}

impl Add for &LatticePoint {
    type Output = LatticePoint;

    fn add(self, rhs: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}
