use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::linalg::{self, Matrix};
use super::rational::{dot, format_rational, Rational};
use super::LatticePoint;
use crate::error::{Error, Result};

/// The closed halfspace `normal · x >= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        Self { normal, offset }
    }

    /// `normal · x - offset`; non-negative exactly on the halfspace.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) - &self.offset
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        self.slack(x).is_zero()
    }

    /// Positive rescaling so that the first nonzero normal entry is ±1.
    pub fn normalized(&self) -> Self {
        match self.normal.iter().find(|c| !c.is_zero()) {
            Some(lead) => {
                let s = lead.abs().recip();
                Self {
                    normal: self.normal.iter().map(|c| c * &s).collect(),
                    offset: &self.offset * &s,
                }
            }
            None => self.clone(),
        }
    }
}

impl fmt::Display for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.normal.iter().map(format_rational).collect();
        write!(
            f,
            "[{}]·x >= {}",
            coeffs.join(", "),
            format_rational(&self.offset)
        )
    }
}

pub(crate) fn format_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// A bounded rational polytope in `ℝ^dim`, stored by inequalities with a lazily computed,
/// write-once vertex list.
#[derive(Clone, Debug)]
pub struct RationalPolytope {
    dim: usize,
    hrep: Vec<Halfspace>,
    vertices: OnceLock<Vec<Vec<Rational>>>,
    projections: OnceLock<Vec<Vec<Halfspace>>>,
}

impl PartialEq for RationalPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices() == other.vertices()
    }
}

impl RationalPolytope {
    /// Builds a polytope from inequalities, rejecting any description with a recession direction.
    pub fn from_hrep(dim: usize, hrep: Vec<Halfspace>) -> Result<Self> {
        for h in &hrep {
            if h.normal.len() != dim {
                return Err(Error::Dimension {
                    context: "halfspace normal".into(),
                    expected: dim,
                    got: h.normal.len(),
                });
            }
        }
        if let Some(direction) = recession_direction(dim, &hrep) {
            return Err(Error::Unbounded {
                direction: format_point(&direction),
            });
        }
        Ok(Self::from_parts(dim, hrep, None))
    }

    /// Convex hull of a point set.
    pub fn from_vertices(dim: usize, points: &[Vec<Rational>]) -> Result<Self> {
        super::hull::convex_hull(dim, points)
    }

    pub(crate) fn from_parts(
        dim: usize,
        hrep: Vec<Halfspace>,
        vertices: Option<Vec<Vec<Rational>>>,
    ) -> Self {
        let cache = OnceLock::new();
        if let Some(v) = vertices {
            let _ = cache.set(v);
        }
        Self {
            dim,
            hrep,
            vertices: cache,
            projections: OnceLock::new(),
        }
    }

    /// Axis-aligned box `∏ [lo_i, hi_i]`.
    pub fn cube(lo: &[Rational], hi: &[Rational]) -> Self {
        let dim = lo.len();
        let mut hrep = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            hrep.push(Halfspace::new(e.clone(), lo[i].clone()));
            e[i] = -Rational::one();
            hrep.push(Halfspace::new(e, -hi[i].clone()));
        }
        Self::from_parts(dim, hrep, None)
    }

    /// `{x >= 0, Σ x_i <= scale}`.
    pub fn simplex(dim: usize, scale: &Rational) -> Self {
        let mut hrep = Vec::with_capacity(dim + 1);
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            hrep.push(Halfspace::new(e, Rational::zero()));
        }
        hrep.push(Halfspace::new(vec![-Rational::one(); dim], -scale.clone()));
        Self::from_parts(dim, hrep, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hrep(&self) -> &[Halfspace] {
        &self.hrep
    }

    /// Extreme points in lexicographic order.
    pub fn vertices(&self) -> &[Vec<Rational>] {
        self.vertices
            .get_or_init(|| enumerate_vertices(self.dim, &self.hrep))
    }

    pub fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    /// Dimension of the affine hull; `None` when empty.
    pub fn affine_dim(&self) -> Option<usize> {
        linalg::affine_dim(self.vertices())
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == Some(self.dim)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.hrep.iter().all(|h| h.contains(x))
    }

    /// Whether the lattice point `u` lies in the dilate `m·P`.
    pub fn contains_dilated(&self, u: &LatticePoint, m: &Rational) -> bool {
        let x = u.to_rational();
        self.hrep
            .iter()
            .all(|h| dot(&h.normal, &x) >= &h.offset * m)
    }

    /// `factor · P` for `factor >= 0`.
    pub fn dilate(&self, factor: &Rational) -> Self {
        assert!(
            !factor.is_negative(),
            "dilation factor must be non-negative"
        );
        let hrep = self
            .hrep
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), &h.offset * factor))
            .collect();
        let vertices = self
            .vertices()
            .iter()
            .map(|v| v.iter().map(|c| c * factor).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        let mut vertices = vertices;
        vertices.dedup();
        Self::from_parts(self.dim, hrep, Some(vertices))
    }

    /// Image under the invertible affine map `x ↦ M x + c`.
    pub fn affine_image(&self, matrix: &[Vec<Rational>], translation: &[Rational]) -> Result<Self> {
        let inv =
            linalg::inverse(matrix).ok_or_else(|| Error::NotUnimodular { det: "0".into() })?;
        // a·u >= b with u = M^{-1}(x - c)  <=>  (a M^{-1})·x >= b + (a M^{-1})·c
        let inv_t = linalg::transpose(&inv);
        let hrep = self
            .hrep
            .iter()
            .map(|h| {
                let normal = linalg::mat_vec(&inv_t, &h.normal);
                let offset = &h.offset + dot(&normal, translation);
                Halfspace::new(normal, offset)
            })
            .collect();
        let mut vertices: Vec<Vec<Rational>> = self
            .vertices()
            .iter()
            .map(|v| {
                linalg::mat_vec(matrix, v)
                    .into_iter()
                    .zip(translation)
                    .map(|(a, b)| a + b)
                    .collect()
            })
            .collect();
        vertices.sort();
        Ok(Self::from_parts(self.dim, hrep, Some(vertices)))
    }

    /// `P ∩ {extra}`; stays bounded because `P` is.
    pub fn intersect(&self, extra: impl IntoIterator<Item = Halfspace>) -> Self {
        let mut hrep = self.hrep.clone();
        hrep.extend(extra);
        Self::from_parts(self.dim, hrep, None)
    }

    /// Exact `dim`-dimensional volume; zero for lower-dimensional or empty polytopes.
    pub fn volume(&self) -> Rational {
        super::volume::volume(self, None)
    }

    /// Volume using a pulling triangulation that prefers apexes in the given vertex order.
    pub fn volume_with_order(&self, order: &[usize]) -> Rational {
        super::volume::volume(self, Some(order))
    }

    /// Lattice points of `m·P` in lexicographic order.
    pub fn lattice_points(&self, m: u64) -> Result<Vec<LatticePoint>> {
        if m == 0 {
            return Err(Error::OutOfRange {
                what: "dilation level m".into(),
                constraint: ">= 1".into(),
                value: "0".into(),
            });
        }
        let systems = self
            .projections
            .get_or_init(|| super::enumerate::projections(self.dim, &self.hrep));
        Ok(super::enumerate::enumerate(
            self.dim,
            systems,
            &BigInt::from(m),
        ))
    }

    /// Inequalities whose boundary meets the polytope in a facet.
    pub fn facets(&self) -> Vec<Halfspace> {
        let verts = self.vertices();
        let Some(k) = linalg::affine_dim(verts) else {
            return Vec::new();
        };
        if k == 0 {
            return Vec::new();
        }
        let mut out: Vec<Halfspace> = Vec::new();
        for h in &self.hrep {
            let tight: Vec<Vec<Rational>> =
                verts.iter().filter(|v| h.is_tight(v)).cloned().collect();
            if tight.len() == verts.len() || tight.is_empty() {
                continue;
            }
            if linalg::affine_dim(&tight) == Some(k - 1) {
                let n = h.normalized();
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }
}

/// Nonzero `r` with `a_i · r >= 0` for all rows, if one exists.
fn recession_direction(dim: usize, hrep: &[Halfspace]) -> Option<Vec<Rational>> {
    if dim == 0 {
        return None;
    }
    let rows: Matrix = hrep.iter().map(|h| h.normal.clone()).collect();
    if linalg::rank(&rows) < dim {
        // lineality space is nontrivial
        return linalg::nullspace(&rows, dim).into_iter().next();
    }
    let mut found = None;
    for_each_subset(rows.len(), dim - 1, &mut |subset| {
        let sub: Matrix = subset.iter().map(|&i| rows[i].clone()).collect();
        let ns = linalg::nullspace(&sub, dim);
        if ns.len() != 1 {
            return true;
        }
        let r = &ns[0];
        for sign in [1i64, -1] {
            let s = Rational::from_integer(BigInt::from(sign));
            let dir: Vec<Rational> = r.iter().map(|x| x * &s).collect();
            if rows.iter().all(|row| !dot(row, &dir).is_negative()) {
                found = Some(dir);
                return false;
            }
        }
        true
    });
    found
}

fn enumerate_vertices(dim: usize, hrep: &[Halfspace]) -> Vec<Vec<Rational>> {
    if dim == 0 {
        return if hrep.iter().all(|h| !h.offset.is_positive()) {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for_each_subset(hrep.len(), dim, &mut |subset| {
        let a: Matrix = subset.iter().map(|&i| hrep[i].normal.clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| hrep[i].offset.clone()).collect();
        if let Some(x) = linalg::solve(&a, &b) {
            if hrep.iter().all(|h| h.contains(&x)) {
                out.push(x);
            }
        }
        true
    });
    out.sort();
    out.dedup();
    out
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order; `f` returns `false` to stop.
pub(crate) fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        let need = k - cur.len();
        if n < need {
            return true;
        }
        for i in start..=(n - need) {
            cur.push(i);
            let go = rec(i + 1, n, k, cur, f);
            cur.pop();
            if !go {
                return false;
            }
        }
        true
    }
    if k > n {
        return;
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}
