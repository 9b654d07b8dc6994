//! Lattice points of dilated polytopes by coordinate-wise interval bounds.
//!
//! Fourier-Motzkin elimination projects `P` onto each coordinate prefix once. Projection
//! commutes with dilation, so for a fixed prefix the admissible range of the next coordinate
//! is read off exactly from the projected system scaled by `m`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::polytope::Halfspace;
use super::rational::{ceil, floor, from_big, Rational};
use super::LatticePoint;

/// `systems[k]` constrains coordinates `0..=k`; `systems[dim-1]` is the input itself.
pub(crate) fn projections(dim: usize, hrep: &[Halfspace]) -> Vec<Vec<Halfspace>> {
    let mut systems = vec![Vec::new(); dim];
    if dim == 0 {
        return systems;
    }
    systems[dim - 1] = dedup(hrep.to_vec());
    for k in (1..dim).rev() {
        let cur = &systems[k];
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::new();
        for h in cur {
            let c = &h.normal[k];
            if c.is_positive() {
                pos.push(h);
            } else if c.is_negative() {
                neg.push(h);
            } else {
                next.push(truncate(h, k));
            }
        }
        for p in &pos {
            for n in &neg {
                let cp = &p.normal[k];
                let cn = -&n.normal[k];
                let normal = (0..k)
                    .map(|j| &p.normal[j] * &cn + &n.normal[j] * cp)
                    .collect();
                let offset = &p.offset * &cn + &n.offset * cp;
                next.push(Halfspace::new(normal, offset));
            }
        }
        systems[k - 1] = dedup(next);
    }
    systems
}

fn truncate(h: &Halfspace, k: usize) -> Halfspace {
    Halfspace::new(h.normal[..k].to_vec(), h.offset.clone())
}

fn dedup(rows: Vec<Halfspace>) -> Vec<Halfspace> {
    let mut rows: Vec<Halfspace> = rows.iter().map(Halfspace::normalized).collect();
    rows.sort();
    rows.dedup();
    rows
}

pub(crate) fn enumerate(dim: usize, systems: &[Vec<Halfspace>], m: &BigInt) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    let scale = from_big(m);
    let mut prefix = Vec::with_capacity(dim);
    walk(systems, &scale, &mut prefix, &mut out);
    out
}

fn walk(
    systems: &[Vec<Halfspace>],
    scale: &Rational,
    prefix: &mut Vec<BigInt>,
    out: &mut Vec<LatticePoint>,
) {
    let k = prefix.len();
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for h in &systems[k] {
        // c x_k >= m·b - Σ_{j<k} a_j x_j
        let mut rhs = &h.offset * scale;
        for (a, x) in h.normal[..k].iter().zip(prefix.iter()) {
            if !a.is_zero() {
                rhs -= a * from_big(x);
            }
        }
        let c = &h.normal[k];
        if c.is_positive() {
            let b = ceil(&(rhs / c));
            if lo.as_ref().is_none_or(|l| b > *l) {
                lo = Some(b);
            }
        } else if c.is_negative() {
            let b = floor(&(rhs / c));
            if hi.as_ref().is_none_or(|u| b < *u) {
                hi = Some(b);
            }
        } else if rhs.is_positive() {
            // constant row violated: nothing here
            return;
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return;
    };
    let mut x = lo;
    while x <= hi {
        prefix.push(x.clone());
        if prefix.len() == systems.len() {
            out.push(LatticePoint::new(prefix.clone()));
        } else {
            walk(systems, scale, prefix, out);
        }
        prefix.pop();
        x += 1;
    }
}

#[cfg(test)]
mod tests {
    use crate::lattice::polytope::{Halfspace, RationalPolytope};
    use crate::lattice::rational::{int, rat};

    #[test]
    fn unit_segment() {
        let p = RationalPolytope::cube(&[int(0)], &[int(1)]);
        let pts = p.lattice_points(3).unwrap();
        let xs: Vec<i64> = pts.iter().map(|u| u.coord_i64(0)).collect();
        assert_eq!(xs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn simplex_counts() {
        let p = RationalPolytope::simplex(2, &int(1));
        let pts = p.lattice_points(1).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(p.lattice_points(4).unwrap().len(), 15);
        assert!(p.lattice_points(0).is_err());
    }

    #[test]
    fn rational_polytope_counts() {
        // x in [1/3, 7/3] dilated by 3 -> [1, 7]
        let p = RationalPolytope::cube(&[rat(1, 3)], &[rat(7, 3)]);
        assert_eq!(p.lattice_points(3).unwrap().len(), 7);
        assert_eq!(p.lattice_points(1).unwrap().len(), 2);
        let empty = RationalPolytope::simplex(2, &int(1))
            .intersect([Halfspace::new(vec![int(1), int(1)], int(2))]);
        assert!(empty.lattice_points(5).unwrap().is_empty());
    }
}
