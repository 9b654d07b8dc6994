//! Convex hulls of finite rational point sets.
//!
//! Points are projected injectively onto coordinates spanning their affine hull, the hull is
//! computed there (monotone chain in the plane, facet enumeration above), and the facets are
//! lifted back together with the equations of the affine hull.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::linalg::{self, Matrix};
use super::polytope::{for_each_subset, Halfspace, RationalPolytope};
use super::rational::{dot, Rational};
use crate::error::{Error, Result};

pub fn convex_hull(dim: usize, points: &[Vec<Rational>]) -> Result<RationalPolytope> {
    if points.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::Dimension {
                context: "hull input point".into(),
                expected: dim,
                got: p.len(),
            });
        }
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();

    let base = pts[0].clone();
    let mut diffs: Matrix = pts[1..]
        .iter()
        .map(|p| p.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    let pivots = linalg::rref(&mut diffs);
    let k = pivots.len();

    let mut hrep = Vec::new();
    // equations of the affine hull, as opposite halfspace pairs
    let spanning: Matrix = diffs.into_iter().take(k).collect();
    for n in linalg::nullspace(&spanning, dim) {
        let off = dot(&n, &base);
        let h = Halfspace::new(n, off).normalized();
        let neg = Halfspace::new(h.normal.iter().map(|c| -c).collect(), -h.offset.clone());
        hrep.push(h);
        hrep.push(neg);
    }

    let projected: Vec<Vec<Rational>> = pts
        .iter()
        .map(|p| pivots.iter().map(|&c| p[c].clone()).collect())
        .collect();
    let (facets, extreme) = match k {
        0 => (Vec::new(), vec![0]),
        1 => hull_1d(&projected),
        2 => hull_2d(&projected),
        _ => hull_nd(k, &projected),
    };
    for f in facets {
        let mut normal = vec![Rational::zero(); dim];
        for (j, &c) in pivots.iter().enumerate() {
            normal[c] = f.normal[j].clone();
        }
        hrep.push(Halfspace::new(normal, f.offset).normalized());
    }
    hrep.sort();
    hrep.dedup();
    let mut vertices: Vec<Vec<Rational>> = extreme.into_iter().map(|i| pts[i].clone()).collect();
    vertices.sort();
    Ok(RationalPolytope::from_parts(dim, hrep, Some(vertices)))
}

fn hull_1d(pts: &[Vec<Rational>]) -> (Vec<Halfspace>, Vec<usize>) {
    let (imin, min) = pts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1[0].cmp(&b.1[0]))
        .unwrap();
    let (imax, max) = pts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1[0].cmp(&b.1[0]))
        .unwrap();
    (
        vec![
            Halfspace::new(vec![Rational::one()], min[0].clone()),
            Halfspace::new(vec![-Rational::one()], -max[0].clone()),
        ],
        vec![imin, imax],
    )
}

fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Andrew's monotone chain; collinear boundary points are dropped.
fn hull_2d(pts: &[Vec<Rational>]) -> (Vec<Halfspace>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && !cross(
                &pts[lower[lower.len() - 2]],
                &pts[lower[lower.len() - 1]],
                &pts[i],
            )
            .is_positive()
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && !cross(
                &pts[upper[upper.len() - 2]],
                &pts[upper[upper.len() - 1]],
                &pts[i],
            )
            .is_positive()
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    let ring: Vec<usize> = lower.into_iter().chain(upper).collect();
    let n = ring.len();
    let facets = (0..n)
        .map(|i| {
            let p = &pts[ring[i]];
            let q = &pts[ring[(i + 1) % n]];
            // counter-clockwise ring: interior lies to the left of p -> q
            let normal = vec![-(&q[1] - &p[1]), &q[0] - &p[0]];
            let offset = dot(&normal, p);
            Halfspace::new(normal, offset)
        })
        .collect();
    (facets, ring)
}

/// Facet enumeration over affinely independent `k`-subsets. Quadratic-or-worse in the input
/// size, meant for the small point sets that arise in dimension three and up.
fn hull_nd(k: usize, pts: &[Vec<Rational>]) -> (Vec<Halfspace>, Vec<usize>) {
    let mut facets: Vec<Halfspace> = Vec::new();
    for_each_subset(pts.len(), k, &mut |subset| {
        let p0 = &pts[subset[0]];
        let rows: Matrix = subset[1..]
            .iter()
            .map(|&i| pts[i].iter().zip(p0).map(|(a, b)| a - b).collect())
            .collect();
        let ns = linalg::nullspace(&rows, k);
        if ns.len() != 1 {
            return true;
        }
        let n = &ns[0];
        let off = dot(n, p0);
        let mut side = Ordering::Equal;
        for q in pts {
            let s = dot(n, q).cmp(&off);
            if s == Ordering::Equal {
                continue;
            }
            if side == Ordering::Equal {
                side = s;
            } else if side != s {
                return true;
            }
        }
        let h = if side == Ordering::Less {
            Halfspace::new(n.iter().map(|c| -c).collect(), -off)
        } else {
            Halfspace::new(n.clone(), off)
        }
        .normalized();
        if !facets.contains(&h) {
            facets.push(h);
        }
        true
    });
    let extreme = (0..pts.len())
        .filter(|&i| {
            let normals: Matrix = facets
                .iter()
                .filter(|f| f.is_tight(&pts[i]))
                .map(|f| f.normal.clone())
                .collect();
            linalg::rank(&normals) == k
        })
        .collect();
    (facets, extreme)
}
