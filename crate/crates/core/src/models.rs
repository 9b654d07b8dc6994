//! Toric realizations of pairs `(X, L)`.
//!
//! A model is a full-dimensional lattice polytope `P`; the sections of `mL` are the monomials
//! whose exponent vectors are the lattice points of `mP`. The admissible flag is torus
//! invariant and recorded as a unimodular affine map on exponent vectors, so the Okounkov
//! body of `L` is exactly the image of `P`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::polytope::format_point;
use crate::lattice::rational::{factorial, from_big, int, Rational};
use crate::lattice::{linalg, Halfspace, LatticePoint, RationalPolytope};

/// Unimodular affine map `u ↦ M u + m·c` applied to exponent vectors at level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagMap {
    matrix: Vec<Vec<BigInt>>,
    translation: Vec<BigInt>,
}

impl FlagMap {
    pub fn identity(dim: usize) -> Self {
        let matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            matrix,
            translation: vec![BigInt::zero(); dim],
        }
    }

    pub fn new(matrix: Vec<Vec<BigInt>>, translation: Vec<BigInt>) -> Result<Self> {
        let d = matrix.len();
        if let Some(row) = matrix.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension {
                context: "flag_map matrix row".into(),
                expected: d,
                got: row.len(),
            });
        }
        if translation.len() != d {
            return Err(Error::Dimension {
                context: "flag_map translation".into(),
                expected: d,
                got: translation.len(),
            });
        }
        let det = linalg::determinant(&to_rational_matrix(&matrix));
        if det.abs() != Rational::one() {
            return Err(Error::NotUnimodular {
                det: det.to_string(),
            });
        }
        Ok(Self {
            matrix,
            translation,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn translation(&self) -> &[BigInt] {
        &self.translation
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    /// Valuation vector of the monomial with exponent `u` in degree `m`.
    pub fn apply(&self, u: &LatticePoint, m: u64) -> LatticePoint {
        let m = BigInt::from(m);
        LatticePoint::new(
            self.matrix
                .iter()
                .zip(&self.translation)
                .map(|(row, c)| {
                    row.iter()
                        .zip(u.coords())
                        .fold(c * &m, |acc, (a, x)| acc + a * x)
                })
                .collect(),
        )
    }

    pub fn rational_matrix(&self) -> Vec<Vec<Rational>> {
        to_rational_matrix(&self.matrix)
    }

    pub fn rational_translation(&self) -> Vec<Rational> {
        self.translation.iter().map(from_big).collect()
    }

    /// Pulls a linear form on exponent space back to the flag coordinates: returns `(a', c')`
    /// with `⟨a, u⟩ = ⟨a', M u + c⟩ - c'`.
    pub fn pull_form(&self, a: &[Rational]) -> (Vec<Rational>, Rational) {
        let inv = linalg::inverse(&self.rational_matrix()).expect("unimodular");
        let a_prime = linalg::mat_vec(&linalg::transpose(&inv), a);
        let shift = crate::lattice::rational::dot(&a_prime, &self.rational_translation());
        (a_prime, shift)
    }
}

fn to_rational_matrix(m: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(from_big).collect()).collect()
}

/// A big line bundle on a projective toric variety, with a torus-invariant admissible flag.
#[derive(Clone, Debug)]
pub struct ToricModel {
    polytope: RationalPolytope,
    flag: FlagMap,
}

/// The degree-`m` piece `R_m = H⁰(X, mL)` as its monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece {
    pub m: u64,
    pub basis: Vec<LatticePoint>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl ToricModel {
    /// `(ℙ^d, O(k))`: the `k`-dilated standard simplex.
    pub fn projective_space(d: usize, k: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::OutOfRange {
                what: "d".into(),
                constraint: ">= 1".into(),
                value: "0".into(),
            });
        }
        if k == 0 {
            return Err(Error::OutOfRange {
                what: "k".into(),
                constraint: ">= 1".into(),
                value: "0".into(),
            });
        }
        let p = RationalPolytope::simplex(d, &Rational::from_integer(BigInt::from(k)));
        Self::from_polytope(p, FlagMap::identity(d))
    }

    /// Validates a user-supplied moment polytope and flag.
    pub fn from_polytope(polytope: RationalPolytope, flag: FlagMap) -> Result<Self> {
        let d = polytope.dim();
        if flag.dim() != d {
            return Err(Error::Dimension {
                context: "flag_map".into(),
                expected: d,
                got: flag.dim(),
            });
        }
        if let Some(v) = polytope
            .vertices()
            .iter()
            .find(|v| v.iter().any(|c| !c.is_integer()))
        {
            return Err(Error::NonIntegralVertex {
                vertex: format_point(v),
            });
        }
        let got = polytope.affine_dim();
        if got != Some(d) {
            if got.is_none() {
                return Err(Error::EmptyPolytope);
            }
            return Err(Error::NotFullDimensional {
                expected: d,
                got: got.unwrap_or(0),
            });
        }
        Ok(Self { polytope, flag })
    }

    pub fn from_hrep(dim: usize, hrep: Vec<Halfspace>, flag: FlagMap) -> Result<Self> {
        Self::from_polytope(RationalPolytope::from_hrep(dim, hrep)?, flag)
    }

    pub fn from_vertices(dim: usize, vertices: &[Vec<Rational>], flag: FlagMap) -> Result<Self> {
        Self::from_polytope(RationalPolytope::from_vertices(dim, vertices)?, flag)
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn polytope(&self) -> &RationalPolytope {
        &self.polytope
    }

    pub fn flag_map(&self) -> &FlagMap {
        &self.flag
    }

    /// Same polytope, different flag.
    pub fn with_flag(&self, flag: FlagMap) -> Result<Self> {
        Self::from_polytope(self.polytope.clone(), flag)
    }

    pub fn graded_piece(&self, m: u64) -> GradedPiece {
        let basis = if m == 0 {
            vec![LatticePoint::origin(self.dim())]
        } else {
            self.polytope
                .lattice_points(m)
                .expect("m >= 1 on a bounded polytope")
        };
        GradedPiece { m, basis }
    }

    /// `h⁰(X, mL)`.
    pub fn h0(&self, m: u64) -> usize {
        self.graded_piece(m).dim()
    }

    /// `Vol(L) = d! · vol(P)`.
    pub fn volume_of_l(&self) -> Rational {
        from_big(&factorial(self.dim())) * self.polytope.volume()
    }

    /// Whether `u` is an exponent vector of a section of `mL`.
    pub fn contains(&self, u: &LatticePoint, m: u64) -> bool {
        u.dim() == self.dim() && self.polytope.contains_dilated(u, &int(m as i64))
    }
}

/// Named models used throughout the tests and examples.
pub mod builtin {
    use super::*;
    use crate::lattice::rational::int;

    pub fn p1() -> ToricModel {
        ToricModel::projective_space(1, 1).expect("valid")
    }

    pub fn p2() -> ToricModel {
        ToricModel::projective_space(2, 1).expect("valid")
    }

    pub fn p2_o2() -> ToricModel {
        ToricModel::projective_space(2, 2).expect("valid")
    }

    pub fn unit_square() -> ToricModel {
        ToricModel::from_polytope(
            RationalPolytope::cube(&[int(0), int(0)], &[int(1), int(1)]),
            FlagMap::identity(2),
        )
        .expect("valid")
    }

    /// The Hirzebruch surface `F_1` with the trapezoid `conv{(0,0),(2,0),(0,1),(1,1)}`.
    pub fn hirzebruch() -> ToricModel {
        let v = |a: i64, b: i64| vec![int(a), int(b)];
        ToricModel::from_vertices(
            2,
            &[v(0, 0), v(2, 0), v(0, 1), v(1, 1)],
            FlagMap::identity(2),
        )
        .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::builtin::*;
    use super::*;
    use crate::lattice::rational::rat;

    fn fm(m: &[&[i64]], c: &[i64]) -> Result<FlagMap> {
        FlagMap::new(
            m.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            c.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    #[test]
    fn projective_line_counts() {
        let p1 = p1();
        for m in 0..6 {
            assert_eq!(p1.h0(m), m as usize + 1);
        }
        assert_eq!(p1.graded_piece(0).basis, vec![LatticePoint::from_i64(&[0])]);
        assert_eq!(p1.volume_of_l(), int(1));
    }

    #[test]
    fn projective_plane() {
        assert_eq!(p2().graded_piece(3).dim(), 10);
        assert_eq!(p2().volume_of_l(), int(1));
        assert_eq!(p2_o2().polytope().volume(), int(2));
        assert_eq!(p2_o2().volume_of_l(), int(4));
    }

    #[test]
    fn polytope_models() {
        let sq = unit_square();
        assert_eq!(sq.graded_piece(2).dim(), 9);
        for m in 1..5u64 {
            assert_eq!(sq.h0(m), ((m + 1) * (m + 1)) as usize);
        }
        assert_eq!(hirzebruch().h0(1), 5);
        assert_eq!(hirzebruch().volume_of_l(), int(3));
    }

    #[test]
    fn rejects_bad_input() {
        let half = RationalPolytope::cube(&[int(0)], &[rat(1, 2)]);
        assert!(matches!(
            ToricModel::from_polytope(half, FlagMap::identity(1)),
            Err(Error::NonIntegralVertex { .. })
        ));
        let flat = RationalPolytope::cube(&[int(0), int(0)], &[int(1), int(0)]);
        assert!(matches!(
            ToricModel::from_polytope(flat, FlagMap::identity(2)),
            Err(Error::NotFullDimensional { .. })
        ));
        assert!(matches!(
            fm(&[&[2, 0], &[0, 1]], &[0, 0]),
            Err(Error::NotUnimodular { .. })
        ));
        assert!(ToricModel::projective_space(0, 1).is_err());
        assert!(ToricModel::projective_space(2, 0).is_err());
    }

    #[test]
    fn rotated_flag_keeps_counts() {
        let rot = fm(&[&[0, -1], &[1, 0]], &[1, 0]).unwrap();
        let model = p2().with_flag(rot.clone()).unwrap();
        for m in 1..6 {
            assert_eq!(model.h0(m), p2().h0(m));
        }
        let u = LatticePoint::from_i64(&[2, 1]);
        assert_eq!(rot.apply(&u, 3), LatticePoint::from_i64(&[2, 2]));
    }

    #[test]
    fn pulled_forms_agree() {
        let flag = fm(&[&[1, 1], &[0, 1]], &[2, -1]).unwrap();
        let a = vec![rat(3, 2), int(-1)];
        let (ap, shift) = flag.pull_form(&a);
        let u = LatticePoint::from_i64(&[4, 7]);
        let m = 5;
        let image = flag.apply(&u, m).to_rational();
        let lhs = crate::lattice::rational::dot_int(&a, u.coords());
        // ⟨a, u⟩ = ⟨a', M u + m c⟩ - m c'
        let rhs = crate::lattice::rational::dot(&ap, &image) - shift * int(m as i64);
        assert_eq!(lhs, rhs);
    }
}
