//! Exact volume through a recursive pulling triangulation: every face is coned from its
//! highest-priority vertex over the facets that avoid it, down to points.

use num_traits::{Signed, Zero};

use super::linalg;
use super::polytope::RationalPolytope;
use super::rational::{factorial, from_big, Rational};

pub(crate) fn volume(p: &RationalPolytope, order: Option<&[usize]>) -> Rational {
    let verts = p.vertices();
    let d = p.dim();
    if d == 0 || linalg::affine_dim(verts) != Some(d) {
        return Rational::zero();
    }
    let rank: Vec<usize> = match order {
        Some(o) => {
            let mut r = vec![usize::MAX; verts.len()];
            for (pos, &v) in o.iter().enumerate() {
                if v < r.len() {
                    r[v] = pos;
                }
            }
            r
        }
        None => (0..verts.len()).collect(),
    };
    let tight: Vec<Vec<bool>> = p
        .hrep()
        .iter()
        .map(|h| verts.iter().map(|v| h.is_tight(v)).collect())
        .collect();
    let tri = Triangulator {
        verts,
        tight: &tight,
        rank: &rank,
    };
    let all: Vec<usize> = (0..verts.len()).collect();
    let simplices = tri.triangulate(&all, d);
    let total = simplices.iter().fold(Rational::zero(), |acc, s| {
        let base = &verts[s[0]];
        let rows: Vec<Vec<Rational>> = s[1..]
            .iter()
            .map(|&i| verts[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        acc + linalg::determinant(&rows).abs()
    });
    total / from_big(&factorial(d))
}

struct Triangulator<'a> {
    verts: &'a [Vec<Rational>],
    tight: &'a [Vec<bool>],
    rank: &'a [usize],
}

impl Triangulator<'_> {
    /// Simplices (as vertex index lists) triangulating the `k`-dimensional face `face`.
    fn triangulate(&self, face: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![face[0]]];
        }
        let apex = *face
            .iter()
            .min_by_key(|&&v| (self.rank[v], v))
            .expect("faces are nonempty");
        let mut out = Vec::new();
        for facet in self.facets(face, k) {
            if facet.contains(&apex) {
                continue;
            }
            for mut s in self.triangulate(&facet, k - 1) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }

    fn facets(&self, face: &[usize], k: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for row in self.tight {
            let sub: Vec<usize> = face.iter().copied().filter(|&v| row[v]).collect();
            if sub.len() == face.len() || sub.len() < k || out.contains(&sub) {
                continue;
            }
            let pts: Vec<Vec<Rational>> = sub.iter().map(|&v| self.verts[v].clone()).collect();
            if linalg::affine_dim(&pts) == Some(k - 1) {
                out.push(sub);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::polytope::Halfspace;
    use crate::lattice::rational::{int, rat};

    #[test]
    fn unit_cubes() {
        for d in 1..=4 {
            let p = RationalPolytope::cube(&vec![int(0); d], &vec![int(1); d]);
            assert_eq!(p.volume(), int(1), "d = {d}");
        }
    }

    #[test]
    fn standard_simplex() {
        assert_eq!(RationalPolytope::simplex(2, &int(1)).volume(), rat(1, 2));
        assert_eq!(RationalPolytope::simplex(3, &int(1)).volume(), rat(1, 6));
        assert_eq!(RationalPolytope::simplex(1, &int(3)).volume(), int(3));
    }

    #[test]
    fn truncated_simplex() {
        // {x in Δ2 : x1 + x2 <= 1/2} is the simplex scaled by 1/2
        let p = RationalPolytope::simplex(2, &int(1))
            .intersect([Halfspace::new(vec![int(-1), int(-1)], rat(-1, 2))]);
        assert_eq!(p.volume(), rat(1, 8));
    }

    #[test]
    fn order_independent() {
        let p = RationalPolytope::from_vertices(
            3,
            &[
                vec![int(0), int(0), int(0)],
                vec![int(2), int(0), int(0)],
                vec![int(0), int(3), int(0)],
                vec![int(1), int(1), int(2)],
                vec![int(2), int(2), int(1)],
                vec![rat(1, 2), int(0), int(1)],
            ],
        )
        .unwrap();
        let n = p.vertices().len();
        let forward: Vec<usize> = (0..n).collect();
        let backward: Vec<usize> = (0..n).rev().collect();
        let v = p.volume();
        assert!(v > int(0));
        assert_eq!(p.volume_with_order(&forward), v);
        assert_eq!(p.volume_with_order(&backward), v);
    }
}
