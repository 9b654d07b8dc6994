//! Multiplicative filtrations of the section ring given by concave piecewise-linear weights.
//!
//! A filtration is `F^t R_m = span{ x^u : u ∈ mP, w(u, m) >= t }` with
//! `w(u, m) = min_i (⟨a_i, u⟩ + b_i m)`. Such weights are superadditive, so the filtration is
//! multiplicative; they are non-negative on `P` (checked at the vertices), so `F⁰R_m = R_m`;
//! and they are bounded by `C·m` where `C` is the maximum of the homogenized weight on `P`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::polytope::format_point;
use crate::lattice::rational::{dot, dot_int, from_big, Rational};
use crate::lattice::{Halfspace, LatticePoint, RationalPolytope};
use crate::models::ToricModel;

/// The affine form `(u, m) ↦ ⟨a, u⟩ + b·m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePiece {
    pub a: Vec<Rational>,
    pub b: Rational,
}

impl AffinePiece {
    pub fn new(a: Vec<Rational>, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn eval(&self, u: &LatticePoint, m: u64) -> Rational {
        dot_int(&self.a, u.coords()) + &self.b * from_big(&BigInt::from(m))
    }

    /// Value of the homogenized form at a point of `P`.
    pub fn eval_at(&self, x: &[Rational]) -> Rational {
        dot(&self.a, x) + &self.b
    }

    pub fn is_constant(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }
}

/// `{(x, t) : x ∈ base, 0 <= t <= min_i ℓ_i(x)}` in `ℝ^{d+1}`.
pub(crate) fn lifted_body(base: &RationalPolytope, pieces: &[AffinePiece]) -> RationalPolytope {
    let d = base.dim();
    let mut hrep: Vec<Halfspace> = base
        .hrep()
        .iter()
        .map(|h| {
            let mut n = h.normal.clone();
            n.push(Rational::zero());
            Halfspace::new(n, h.offset.clone())
        })
        .collect();
    let mut up = vec![Rational::zero(); d];
    up.push(Rational::from_integer(1.into()));
    hrep.push(Halfspace::new(up, Rational::zero()));
    for p in pieces {
        // ⟨a, x⟩ - t >= -b
        let mut n = p.a.clone();
        n.push(Rational::from_integer((-1).into()));
        hrep.push(Halfspace::new(n, -p.b.clone()));
    }
    RationalPolytope::from_hrep(d + 1, hrep).expect("lifted body over a bounded base is bounded")
}

/// A linearly-bounded-above multiplicative filtration of `R(X, L)` given by a concave weight.
#[derive(Clone, Debug)]
pub struct WeightFiltration {
    pieces: Vec<AffinePiece>,
    model: Arc<ToricModel>,
    limit: OnceLock<Rational>,
}

/// Sorted jumping numbers `a_0(m) <= … <= a_{n_m}(m)` of `t ↦ dim F^t R_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingNumbers {
    pub m: u64,
    pub values: Vec<Rational>,
}

impl VanishingNumbers {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn a_min(&self) -> Rational {
        self.values.first().cloned().unwrap_or_default()
    }

    pub fn a_max(&self) -> Rational {
        self.values.last().cloned().unwrap_or_default()
    }

    /// Sum of the strictly positive vanishing numbers.
    pub fn mass_plus(&self) -> Rational {
        self.values
            .iter()
            .filter(|v| v.is_positive())
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// `dim F^t R_m`: the number of values `>= t`.
    pub fn dim_at(&self, t: &Rational) -> usize {
        self.values.len() - self.values.partition_point(|v| v < t)
    }
}

fn check_level(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "level m".into(),
            constraint: ">= 1".into(),
            value: "0".into(),
        });
    }
    Ok(())
}

impl WeightFiltration {
    /// Validates dimensions and non-negativity of the weight on `P`.
    pub fn new(model: Arc<ToricModel>, pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidFiltration(
                "at least one piece is required".into(),
            ));
        }
        let d = model.dim();
        if let Some(p) = pieces.iter().find(|p| p.a.len() != d) {
            return Err(Error::Dimension {
                context: "filtration piece".into(),
                expected: d,
                got: p.a.len(),
            });
        }
        // a concave function on P attains its minimum at a vertex
        for v in model.polytope().vertices() {
            let value = pieces.iter().map(|p| p.eval_at(v)).min().expect("nonempty");
            if value.is_negative() {
                return Err(Error::NegativeWeight {
                    vertex: format_point(v),
                    value: value.to_string(),
                });
            }
        }
        Ok(Self {
            pieces,
            model,
            limit: OnceLock::new(),
        })
    }

    /// The trivial filtration `F^t R_m = R_m` for `t <= 0`, `0` otherwise.
    pub fn zero(model: Arc<ToricModel>) -> Self {
        let d = model.dim();
        Self::new(
            model,
            vec![AffinePiece::new(
                vec![Rational::zero(); d],
                Rational::zero(),
            )],
        )
        .expect("zero weight is valid")
    }

    /// Single-piece weight `⟨a, u⟩ + b m`.
    pub fn linear(model: Arc<ToricModel>, a: Vec<Rational>, b: Rational) -> Result<Self> {
        Self::new(model, vec![AffinePiece::new(a, b)])
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn model(&self) -> &ToricModel {
        &self.model
    }

    pub fn model_arc(&self) -> &Arc<ToricModel> {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `w(u, m)`; errors if `u ∉ mP`.
    pub fn weight(&self, u: &LatticePoint, m: u64) -> Result<Rational> {
        if !self.model.contains(u, m) {
            return Err(Error::PointOutside {
                point: u.to_string(),
                m: m.to_string(),
            });
        }
        Ok(self.weight_unchecked(u, m))
    }

    pub(crate) fn weight_unchecked(&self, u: &LatticePoint, m: u64) -> Rational {
        self.pieces
            .iter()
            .map(|p| p.eval(u, m))
            .min()
            .expect("nonempty")
    }

    /// The homogenized weight `min_i(⟨a_i, x⟩ + b_i)` at a point of `P`.
    pub fn weight_at(&self, x: &[Rational]) -> Rational {
        self.pieces
            .iter()
            .map(|p| p.eval_at(x))
            .min()
            .expect("nonempty")
    }

    /// `dim F^t R_m`.
    pub fn filtered_dim(&self, m: u64, t: &Rational) -> Result<usize> {
        check_level(m)?;
        let piece = self.model.graded_piece(m);
        Ok(piece
            .basis
            .iter()
            .filter(|u| self.weight_unchecked(u, m) >= *t)
            .count())
    }

    /// Sorted multiset of weights of the monomial basis of `R_m`.
    pub fn vanishing_numbers(&self, m: u64) -> Result<VanishingNumbers> {
        check_level(m)?;
        let piece = self.model.graded_piece(m);
        let mut values: Vec<Rational> = piece
            .basis
            .iter()
            .map(|u| self.weight_unchecked(u, m))
            .collect();
        values.sort();
        Ok(VanishingNumbers { m, values })
    }

    pub fn a_max(&self, m: u64) -> Result<Rational> {
        Ok(self.vanishing_numbers(m)?.a_max())
    }

    pub fn a_min(&self, m: u64) -> Result<Rational> {
        Ok(self.vanishing_numbers(m)?.a_min())
    }

    pub fn mass_plus(&self, m: u64) -> Result<Rational> {
        Ok(self.vanishing_numbers(m)?.mass_plus())
    }

    /// `lim a_max(m)/m`: the maximum of the homogenized weight over `P`.
    ///
    /// The weight is concave, so its maximum need not sit at a vertex of `P`; it is read off
    /// the top vertex of the region under its graph.
    pub fn a_max_limit(&self) -> Rational {
        self.limit
            .get_or_init(|| {
                let d = self.dim();
                lifted_body(self.model.polytope(), &self.pieces)
                    .vertices()
                    .iter()
                    .map(|v| v[d].clone())
                    .max()
                    .unwrap_or_default()
            })
            .clone()
    }

    /// Linear bound `C` with `a_max(m) <= C m` for all `m`.
    pub fn linear_bound(&self) -> Rational {
        self.a_max_limit()
    }
}

/// Named filtrations paired with the builtin models.
pub mod builtin {
    use super::*;
    use crate::lattice::rational::int;
    use crate::models::builtin as models;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    /// Order of vanishing at the point `x_1 = 0` of `ℙ¹`.
    pub fn p1_point() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::p1()), ints(&[1]), int(0)).expect("valid")
    }

    /// Order of vanishing along the coordinate line `x_1 = 0` of `ℙ²`.
    pub fn p2_line() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::p2()), ints(&[1, 0]), int(0)).expect("valid")
    }

    /// Same line on `(ℙ², O(2))`.
    pub fn p2_o2_line() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::p2_o2()), ints(&[1, 0]), int(0)).expect("valid")
    }

    /// Monomial valuation `x_1 + x_2` on `ℙ²`.
    pub fn p2_sum() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::p2()), ints(&[1, 1]), int(0)).expect("valid")
    }

    /// `min(x_1, x_2)` on `ℙ²`.
    pub fn p2_min() -> WeightFiltration {
        WeightFiltration::new(
            Arc::new(models::p2()),
            vec![
                AffinePiece::new(ints(&[1, 0]), int(0)),
                AffinePiece::new(ints(&[0, 1]), int(0)),
            ],
        )
        .expect("valid")
    }

    /// Order of vanishing along the torus-invariant curve of the ray `(1, 0)` on `F_1`.
    pub fn hirzebruch_ray() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::hirzebruch()), ints(&[1, 0]), int(0))
            .expect("valid")
    }

    /// Order of vanishing along the edge `x_1 + x_2 = 2` of the `F_1` trapezoid.
    pub fn hirzebruch_diagonal() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::hirzebruch()), ints(&[-1, -1]), int(2))
            .expect("valid")
    }

    /// Vanishing along `x_2 = 0` on the square `ℙ¹ × ℙ¹`.
    pub fn square_edge() -> WeightFiltration {
        WeightFiltration::linear(Arc::new(models::unit_square()), ints(&[0, 1]), int(0))
            .expect("valid")
    }

    pub fn p2_zero() -> WeightFiltration {
        WeightFiltration::zero(Arc::new(models::p2()))
    }

    /// Every named filtration except the zero one, with display names.
    pub fn all() -> Vec<(&'static str, WeightFiltration)> {
        vec![
            ("P1/point", p1_point()),
            ("P2/line", p2_line()),
            ("P2(O(2))/line", p2_o2_line()),
            ("P2/x1+x2", p2_sum()),
            ("P2/min(x1,x2)", p2_min()),
            ("F1/ray", hirzebruch_ray()),
            ("F1/diagonal", hirzebruch_diagonal()),
            ("P1xP1/edge", square_edge()),
        ]
    }
}
