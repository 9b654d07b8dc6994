//! Okounkov bodies, the concave transform and the filtered Okounkov body.
//!
//! With a torus-invariant flag the Okounkov body of `L` is `Δ(L) = M·P + c`, and the weight
//! pulled back to flag coordinates is the concave transform `G`. The body of the graded
//! subalgebra `R^t_•` is taken to be the superlevel set `{G >= t}`; [`semigroup_oracle`]
//! rebuilds it from the valuation semigroup so the two can be compared.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtrations::{lifted_body, AffinePiece, WeightFiltration};
use crate::lattice::polytope::format_point;
use crate::lattice::rational::{from_big, int, Rational};
use crate::lattice::{Halfspace, RationalPolytope};
use crate::models::ToricModel;
use crate::polynomial::Polynomial;

/// `Δ(L)`: the image of the moment polytope under the flag map.
pub fn okounkov_body(model: &ToricModel) -> RationalPolytope {
    let flag = model.flag_map();
    model
        .polytope()
        .affine_image(&flag.rational_matrix(), &flag.rational_translation())
        .expect("flag maps are unimodular")
}

/// `G(x) = min_i(⟨a_i', x⟩ + b_i')` on `Δ(L)`.
#[derive(Clone, Debug)]
pub struct ConcaveTransform {
    pieces: Vec<AffinePiece>,
    domain: RationalPolytope,
}

impl ConcaveTransform {
    pub fn new(filt: &WeightFiltration) -> Self {
        let model = filt.model();
        let flag = model.flag_map();
        let pieces = filt
            .pieces()
            .iter()
            .map(|p| {
                let (a, shift) = flag.pull_form(&p.a);
                AffinePiece::new(a, &p.b - shift)
            })
            .collect();
        Self {
            pieces,
            domain: okounkov_body(model),
        }
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &RationalPolytope {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `G(x)`; errors outside `Δ(L)`.
    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                context: "concave transform argument".into(),
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.domain.contains(x) {
            return Err(Error::PointOutside {
                point: format_point(x),
                m: "1".into(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        self.pieces
            .iter()
            .map(|p| p.eval_at(x))
            .min()
            .expect("nonempty")
    }

    /// `{x ∈ Δ(L) : G(x) >= t}`.
    pub fn superlevel_set(&self, t: &Rational) -> RationalPolytope {
        self.domain.intersect(self.pieces.iter().map(|p| {
            // ⟨a, x⟩ >= t - b
            Halfspace::new(p.a.clone(), t - &p.b)
        }))
    }
}

/// `Δ(F^•) = {(x, t) : x ∈ Δ(L), 0 <= t <= G(x)}`.
#[derive(Clone, Debug)]
pub struct FilteredBody {
    body: RationalPolytope,
}

impl FilteredBody {
    pub fn new(filt: &WeightFiltration) -> Self {
        let g = ConcaveTransform::new(filt);
        Self {
            body: lifted_body(g.domain(), g.pieces()),
        }
    }

    pub fn body(&self) -> &RationalPolytope {
        &self.body
    }

    /// Exact `(d+1)`-volume by triangulating the body.
    pub fn volume(&self) -> Rational {
        self.body.volume()
    }

    /// Distinct heights of the vertices, ascending.
    pub fn vertex_heights(&self) -> Vec<Rational> {
        let d = self.body.dim() - 1;
        let mut hs: Vec<Rational> = self.body.vertices().iter().map(|v| v[d].clone()).collect();
        hs.sort();
        hs.dedup();
        hs
    }
}

/// The superlevel set `{G >= t}`, standing in for the Okounkov body of `R^t_•`.
pub fn slice_body(filt: &WeightFiltration, t: &Rational) -> RationalPolytope {
    ConcaveTransform::new(filt).superlevel_set(t)
}

/// `h(t) = λ({G >= t})` as an exact piecewise polynomial on `[0, a_max]`.
///
/// `values[j]` is `h` at `breakpoints[j]`; `pieces[j]` agrees with `h` on the open interval
/// `(breakpoints[j], breakpoints[j+1])`. `h` is left-continuous and may drop at a breakpoint
/// where `G` is constant on a set of positive measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceVolumeFunction {
    pub breakpoints: Vec<Rational>,
    pub pieces: Vec<Polynomial>,
    pub values: Vec<Rational>,
}

impl SliceVolumeFunction {
    pub fn eval(&self, t: &Rational) -> Rational {
        let first = &self.breakpoints[0];
        if t <= first {
            return self.values[0].clone();
        }
        let last = self.breakpoints.last().unwrap();
        if t > last {
            return Rational::zero();
        }
        match self.breakpoints.binary_search(t) {
            Ok(j) => self.values[j].clone(),
            Err(j) => self.pieces[j - 1].eval(t),
        }
    }

    /// Right limit `h(t⁺)`.
    pub fn eval_right(&self, t: &Rational) -> Rational {
        if t < &self.breakpoints[0] {
            return self.values[0].clone();
        }
        match self.breakpoints.binary_search(t) {
            Ok(j) if j + 1 < self.breakpoints.len() => self.pieces[j].eval(t),
            Ok(_) => Rational::zero(),
            Err(j) if j < self.breakpoints.len() => self.pieces[j - 1].eval(t),
            Err(_) => Rational::zero(),
        }
    }

    /// Breakpoints where `h` drops, with the size of the drop.
    pub fn jumps(&self) -> Vec<(Rational, Rational)> {
        self.breakpoints
            .iter()
            .filter_map(|t| {
                let drop = self.eval(t) - self.eval_right(t);
                (!drop.is_zero()).then(|| (t.clone(), drop))
            })
            .collect()
    }

    /// `∫_0^∞ h(t) dt`.
    pub fn integral(&self) -> Rational {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .fold(Rational::zero(), |acc, (p, w)| {
                acc + p.integrate(&w[0], &w[1])
            })
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(s)).collect(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Supremum of the support: the last point where `h` is positive just to the left.
    pub fn support_end(&self) -> Rational {
        for j in (0..self.pieces.len()).rev() {
            if !self.pieces[j].is_zero() {
                return self.breakpoints[j + 1].clone();
            }
        }
        self.breakpoints[0].clone()
    }
}

/// Builds `h` from slice volumes: breakpoints are the vertex heights of the filtered body,
/// and each interval's polynomial is interpolated from `d + 1` interior samples and checked
/// against one more.
pub fn slice_volume_function(filt: &WeightFiltration) -> Result<SliceVolumeFunction> {
    let g = ConcaveTransform::new(filt);
    let d = g.dim();
    let heights = FilteredBody::new(filt).vertex_heights();
    let volume_at = |t: &Rational| g.superlevel_set(t).volume();
    let values: Vec<Rational> = heights.par_iter().map(volume_at).collect();
    let pieces: Vec<Polynomial> = heights
        .par_windows(2)
        .map(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            let step = (hi - lo) / int(d as i64 + 3);
            let samples: Vec<(Rational, Rational)> = (1..=(d as i64 + 2))
                .map(|k| {
                    let t = lo + &step * int(k);
                    let v = volume_at(&t);
                    (t, v)
                })
                .collect();
            let p = Polynomial::interpolate(&samples[..=d]);
            let (t_check, v_check) = &samples[d + 1];
            if p.eval(t_check) != *v_check {
                return Err(Error::Invariant(format!(
                    "slice volume is not polynomial on ({lo}, {hi})"
                )));
            }
            Ok(p)
        })
        .collect::<Result<_>>()?;
    for (j, p) in pieces.iter().enumerate() {
        if p.eval(&heights[j + 1]) != values[j + 1] {
            return Err(Error::Invariant(format!(
                "slice volume is not left-continuous at {}",
                heights[j + 1]
            )));
        }
    }
    Ok(SliceVolumeFunction {
        breakpoints: heights,
        pieces,
        values,
    })
}

/// `G(x)` for `x ∈ Δ(L)`.
pub fn concave_transform_eval(filt: &WeightFiltration, x: &[Rational]) -> Result<Rational> {
    ConcaveTransform::new(filt).eval(x)
}

/// `vol(Δ(F^•))`, computed by triangulating the lifted body and by integrating `h`; the two
/// must agree exactly.
pub fn filtered_body_volume(filt: &WeightFiltration) -> Result<Rational> {
    let by_triangulation = FilteredBody::new(filt).volume();
    let by_layers = slice_volume_function(filt)?.integral();
    if by_triangulation != by_layers {
        return Err(Error::Invariant(format!(
            "filtered body volume {by_triangulation} differs from ∫h = {by_layers}"
        )));
    }
    Ok(by_triangulation)
}

/// Valuation vectors `(m, flag(u))` of monomials in `R^t_m = F^{tm} R_m`, `1 <= m <= m_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupSample {
    pub points: Vec<(u64, crate::lattice::LatticePoint)>,
}

impl SemigroupSample {
    pub fn collect(filt: &WeightFiltration, t: &Rational, m_max: u64) -> Self {
        let model = filt.model();
        let flag = model.flag_map();
        let per_level: Vec<Vec<(u64, crate::lattice::LatticePoint)>> = (1..=m_max)
            .into_par_iter()
            .map(|m| {
                let level = t * int(m as i64);
                model
                    .graded_piece(m)
                    .basis
                    .iter()
                    .filter(|u| filt.weight_unchecked(u, m) >= level)
                    .map(|u| (m, flag.apply(u, m)))
                    .collect()
            })
            .collect();
        Self {
            points: per_level.into_iter().flatten().collect(),
        }
    }

    pub fn contains(&self, m: u64, v: &crate::lattice::LatticePoint) -> bool {
        self.points.iter().any(|(k, p)| *k == m && p == v)
    }

    /// Points of `Δ` obtained by normalizing each sample by its degree.
    pub fn normalized(&self) -> Vec<Vec<Rational>> {
        let mut pts: Vec<Vec<Rational>> = self
            .points
            .iter()
            .map(|(m, v)| {
                let s = int(*m as i64);
                v.coords().iter().map(|c| from_big(c) / &s).collect()
            })
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

/// Inner approximation of `Δ(R^t_•)`: the hull of normalized semigroup points up to `m_max`.
/// `None` when no monomial of degree `<= m_max` reaches weight `t m`.
pub fn semigroup_oracle(
    filt: &WeightFiltration,
    t: &Rational,
    m_max: u64,
) -> Option<RationalPolytope> {
    let pts = SemigroupSample::collect(filt, t, m_max).normalized();
    if pts.is_empty() {
        return None;
    }
    Some(
        RationalPolytope::from_vertices(filt.dim(), &pts)
            .expect("nonempty points of matching dimension"),
    )
}

/// Checks the ample-series requirement operationally: slices below `a_max` must be full
/// dimensional. Returns the offending level, if any, among `ts`.
pub fn degenerate_slice(filt: &WeightFiltration, ts: &[Rational]) -> Option<Rational> {
    let g = ConcaveTransform::new(filt);
    let top = filt.a_max_limit();
    ts.iter()
        .filter(|t| *t < &top && !t.is_negative())
        .find(|t| !g.superlevel_set(t).is_full_dimensional())
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtrations::builtin::*;
    use crate::lattice::rational::rat;
    use crate::lattice::LatticePoint;
    use crate::models::{builtin as models, FlagMap};
    use std::sync::Arc;

    fn poly(c: &[Rational]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn bodies() {
        let b = okounkov_body(&models::p2());
        assert_eq!(b.vertices().len(), 3);
        assert_eq!(b.volume(), rat(1, 2));
        let p1_o3 = ToricModel::projective_space(1, 3).unwrap();
        assert_eq!(
            okounkov_body(&p1_o3).vertices(),
            &[vec![int(0)], vec![int(3)]]
        );
        assert_eq!(okounkov_body(&models::unit_square()).volume(), int(1));
    }

    #[test]
    fn slices() {
        let f = p2_line();
        assert_eq!(slice_body(&f, &int(0)).volume(), rat(1, 2));
        assert_eq!(slice_body(&f, &rat(1, 2)).volume(), rat(1, 8));
        assert!(slice_body(&f, &rat(3, 2)).is_empty());
        assert!(slice_body(&p2_min(), &rat(3, 4)).is_empty());
    }

    #[test]
    fn slice_volume_examples() {
        let h = slice_volume_function(&p1_point()).unwrap();
        assert_eq!(h.breakpoints, vec![int(0), int(1)]);
        assert_eq!(h.pieces, vec![poly(&[int(1), int(-1)])]);
        let h = slice_volume_function(&p2_line()).unwrap();
        assert_eq!(h.pieces, vec![poly(&[rat(1, 2), int(-1), rat(1, 2)])]);
        assert_eq!(h.eval(&rat(1, 2)), rat(1, 8));
        let h = slice_volume_function(&p2_zero()).unwrap();
        assert_eq!(h.breakpoints, vec![int(0)]);
        assert!(h.pieces.is_empty());
        assert_eq!(h.eval(&int(0)), rat(1, 2));
        assert_eq!(h.eval(&rat(1, 10)), int(0));
        assert_eq!(h.jumps(), vec![(int(0), rat(1, 2))]);
    }

    #[test]
    fn hirzebruch_slices_have_a_breakpoint() {
        let h = slice_volume_function(&hirzebruch_ray()).unwrap();
        assert_eq!(h.breakpoints, vec![int(0), int(1), int(2)]);
        assert_eq!(h.pieces[0], poly(&[rat(3, 2), int(-1)]));
        assert_eq!(h.pieces[1], poly(&[int(2), int(-2), rat(1, 2)]));
        assert!(h.jumps().is_empty());
    }

    #[test]
    fn flat_top_gives_a_jump() {
        // G = min(x, 1/2) on [0, 1] is constant on [1/2, 1]
        let f = WeightFiltration::new(
            Arc::new(models::p1()),
            vec![
                AffinePiece::new(vec![int(1)], int(0)),
                AffinePiece::new(vec![int(0)], rat(1, 2)),
            ],
        )
        .unwrap();
        let h = slice_volume_function(&f).unwrap();
        assert_eq!(h.jumps(), vec![(rat(1, 2), rat(1, 2))]);
        assert_eq!(filtered_body_volume(&f).unwrap(), rat(3, 8));
    }

    #[test]
    fn transform_examples() {
        assert_eq!(
            concave_transform_eval(&p2_line(), &[rat(1, 2), rat(1, 4)]).unwrap(),
            rat(1, 2)
        );
        assert_eq!(
            concave_transform_eval(&p2_min(), &[rat(1, 2), rat(1, 4)]).unwrap(),
            rat(1, 4)
        );
        assert!(concave_transform_eval(&p2_line(), &[int(1), int(1)]).is_err());
        for (_, f) in all() {
            let g = ConcaveTransform::new(&f);
            let top = g
                .domain()
                .vertices()
                .iter()
                .map(|v| g.eval(v).unwrap())
                .max()
                .unwrap();
            assert!(top <= f.a_max_limit());
        }
    }

    #[test]
    fn filtered_volumes() {
        assert_eq!(filtered_body_volume(&p1_point()).unwrap(), rat(1, 2));
        assert_eq!(filtered_body_volume(&p2_line()).unwrap(), rat(1, 6));
        assert_eq!(filtered_body_volume(&p2_zero()).unwrap(), int(0));
    }

    #[test]
    fn oracle_examples() {
        let f = p2_line();
        let hull = semigroup_oracle(&f, &rat(1, 2), 2).unwrap();
        assert_eq!(
            hull.vertices(),
            &[
                vec![rat(1, 2), int(0)],
                vec![rat(1, 2), rat(1, 2)],
                vec![int(1), int(0)]
            ]
        );
        assert_eq!(hull.volume(), rat(1, 8));
        assert!(semigroup_oracle(&f, &rat(3, 2), 8).is_none());
        let full = semigroup_oracle(&f, &int(0), 1).unwrap();
        assert_eq!(full.volume(), rat(1, 2));
    }

    #[test]
    fn semigroup_is_closed_under_addition() {
        let f = p2_min();
        let t = rat(1, 4);
        let sample = SemigroupSample::collect(&f, &t, 8);
        let pts = &sample.points;
        for (i, (m, u)) in pts.iter().enumerate().step_by(7) {
            for (n, v) in pts.iter().skip(i).step_by(11) {
                if m + n <= 8 {
                    assert!(sample.contains(m + n, &(u + v)));
                }
            }
        }
    }

    #[test]
    fn flag_changes_preserve_volumes() {
        let flag = FlagMap::new(
            vec![vec![0.into(), (-1).into()], vec![1.into(), 1.into()]],
            vec![3.into(), 0.into()],
        )
        .unwrap();
        let base = p2_min();
        let model = Arc::new(base.model().with_flag(flag).unwrap());
        let moved = WeightFiltration::new(model, base.pieces().to_vec()).unwrap();
        assert_eq!(
            filtered_body_volume(&moved).unwrap(),
            filtered_body_volume(&base).unwrap()
        );
        assert_eq!(
            slice_volume_function(&moved).unwrap(),
            slice_volume_function(&base).unwrap()
        );
        let u = LatticePoint::from_i64(&[1, 2]);
        let x = moved.model().flag_map().apply(&u, 3).to_rational();
        let x: Vec<Rational> = x.iter().map(|c| c / int(3)).collect();
        assert_eq!(
            concave_transform_eval(&moved, &x).unwrap() * int(3),
            base.weight(&u, 3).unwrap()
        );
    }

    #[test]
    fn ample_series_check() {
        let grid: Vec<Rational> = (0..10).map(|k| rat(k, 10)).collect();
        for (_, f) in all() {
            assert_eq!(degenerate_slice(&f, &grid), None);
        }
    }
}
