//! Checks against independent brute-force computations.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use okdh_core::filtrations::builtin as filts;
use okdh_core::lattice::rational::{factorial, int, pow, rat};
use okdh_core::measures::{limit_measure_nu, nu_m};
use okdh_core::models::builtin as models;
use okdh_core::okounkov::{slice_volume_function, ConcaveTransform};
use okdh_core::{LatticePoint, Polynomial, Rational, RationalPolytope, ToricModel};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn point(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rational(), d)
}

/// Lattice points of `m P` by scanning the bounding box of the vertices.
fn box_scan(p: &RationalPolytope, m: u64) -> Vec<LatticePoint> {
    let d = p.dim();
    let mm = int(m as i64);
    let (mut lo, mut hi) = (vec![i64::MAX; d], vec![i64::MIN; d]);
    for v in p.vertices() {
        for i in 0..d {
            let x = &v[i] * &mm;
            lo[i] = lo[i].min(i64::try_from(x.floor().to_integer()).unwrap());
            hi[i] = hi[i].max(i64::try_from(x.ceil().to_integer()).unwrap());
        }
    }
    let mut out = Vec::new();
    let mut cur = lo.clone();
    if p.vertices().is_empty() {
        return out;
    }
    loop {
        let x: Vec<Rational> = cur.iter().map(|&c| rat(c, 1) / &mm).collect();
        if p.contains(&x) {
            out.push(LatticePoint::from_i64(&cur));
        }
        let mut i = d;
        loop {
            if i == 0 {
                out.sort_by(|a, b| a.coords().cmp(b.coords()));
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

/// Shoelace area of a polygon given by its vertices in any order.
fn shoelace(vs: &[Vec<Rational>]) -> Rational {
    if vs.len() < 3 {
        return Rational::zero();
    }
    let n = vs.len() as i64;
    let cx = vs.iter().map(|v| v[0].clone()).sum::<Rational>() / int(n);
    let cy = vs.iter().map(|v| v[1].clone()).sum::<Rational>() / int(n);
    let mut sorted = vs.to_vec();
    sorted.sort_by(|a, b| {
        let angle = |v: &Vec<Rational>| {
            okdh_core::lattice::rational::to_f64(&(&v[1] - &cy))
                .atan2(okdh_core::lattice::rational::to_f64(&(&v[0] - &cx)))
        };
        angle(a).partial_cmp(&angle(b)).unwrap()
    });
    let mut twice = Rational::zero();
    for i in 0..sorted.len() {
        let (p, q) = (&sorted[i], &sorted[(i + 1) % sorted.len()]);
        twice += &p[0] * &q[1] - &q[0] * &p[1];
    }
    twice.abs() / int(2)
}

fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

fn in_triangle(p: &[Rational], a: &[Rational], b: &[Rational], c: &[Rational]) -> bool {
    let (x, y, z) = (cross(a, b, p), cross(b, c, p), cross(c, a, p));
    let nonneg = !x.is_negative() && !y.is_negative() && !z.is_negative();
    let nonpos = !x.is_positive() && !y.is_positive() && !z.is_positive();
    nonneg || nonpos
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn simplex_counts_are_binomial() {
    for d in 1..=3usize {
        let p = RationalPolytope::simplex(d, &int(1));
        for m in 1..=8u64 {
            let n = p.lattice_points(m).unwrap().len() as u64;
            assert_eq!(n, binomial(m + d as u64, d as u64), "d={d} m={m}");
        }
    }
}

#[test]
fn box_scan_agrees_on_builtin_models() {
    for model in [
        models::p1(),
        models::p2(),
        models::p2_o2(),
        models::hirzebruch(),
        models::unit_square(),
    ] {
        for m in 1..=6 {
            assert_eq!(
                model.polytope().lattice_points(m).unwrap(),
                box_scan(model.polytope(), m)
            );
        }
    }
}

#[test]
fn volume_growth_from_counts() {
    // d!/m^d h0(m) approaches Vol(L) with error O(1/m)
    for model in [models::p2(), models::p2_o2(), models::hirzebruch()] {
        let d = model.dim();
        let vol = model.volume_of_l();
        let mut prev: Option<Rational> = None;
        for m in [10u64, 20, 40, 80] {
            let est = Rational::from_integer(factorial(d))
                * Rational::from_integer(model.h0(m).into())
                / pow(&int(m as i64), d);
            let err = (est - &vol).abs();
            if let Some(p) = prev {
                assert!(err < p, "error did not shrink at m={m}");
            }
            prev = Some(err);
        }
    }
}

#[test]
fn measure_examples() {
    let nu = nu_m(&filts::p1_point(), 2).unwrap();
    assert_eq!(
        nu.atoms(),
        &[
            (int(0), rat(1, 3)),
            (rat(1, 2), rat(1, 3)),
            (int(1), rat(1, 3))
        ]
    );
    let nu = nu_m(&filts::p2_line(), 2).unwrap();
    assert_eq!(
        nu.atoms(),
        &[
            (int(0), rat(1, 2)),
            (rat(1, 2), rat(1, 3)),
            (int(1), rat(1, 6))
        ]
    );
    let nu = nu_m(&filts::p2_zero(), 5).unwrap();
    assert_eq!(nu.atoms(), &[(int(0), int(1))]);

    let lim = limit_measure_nu(&filts::p1_point()).unwrap();
    assert_eq!(lim.densities, vec![Polynomial::constant(int(1))]);
    let lim = limit_measure_nu(&filts::p2_line()).unwrap();
    assert_eq!(lim.densities, vec![Polynomial::new(vec![int(2), int(-2)])]);
    let lim = limit_measure_nu(&filts::p2_zero()).unwrap();
    assert_eq!(lim.atoms, vec![(int(0), int(1))]);
}

/// Expected slice volume of `min(x_1, x_2)` on the standard triangle: `(1 - 2t)^2 / 2`.
#[test]
fn two_piece_slice_closed_form() {
    let h = slice_volume_function(&filts::p2_min()).unwrap();
    for k in 0..=10 {
        let t = rat(k, 20);
        let s = int(1) - int(2) * &t;
        assert_eq!(h.eval(&t), &s * &s / int(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lattice_points_match_box_scan(pts in prop::collection::vec(point(2), 3..7), m in 1u64..=4) {
        let p = RationalPolytope::from_vertices(2, &pts).unwrap();
        prop_assert_eq!(p.lattice_points(m).unwrap(), box_scan(&p, m));
    }

    #[test]
    fn polygon_volume_matches_shoelace(pts in prop::collection::vec(point(2), 3..9)) {
        let p = RationalPolytope::from_vertices(2, &pts).unwrap();
        prop_assert_eq!(p.volume(), shoelace(p.vertices()));
    }

    #[test]
    fn dilation_homogeneity(pts in prop::collection::vec(point(3), 4..7), d in 1usize..=3, m in 1i64..=5) {
        let pts: Vec<Vec<Rational>> = pts.into_iter().map(|v| v[..d].to_vec()).collect();
        let p = RationalPolytope::from_vertices(d, &pts).unwrap();
        prop_assert_eq!(p.dilate(&int(m)).volume(), pow(&int(m), d) * p.volume());
    }

    #[test]
    fn hull_is_idempotent(pts in prop::collection::vec(point(3), 4..9)) {
        let p = RationalPolytope::from_vertices(3, &pts).unwrap();
        let q = RationalPolytope::from_vertices(3, p.vertices()).unwrap();
        prop_assert_eq!(p.vertices(), q.vertices());
        prop_assert_eq!(p.volume(), q.volume());
    }

    #[test]
    fn weight_is_superadditive(
        (xu, yu, m) in (0i64..=6, 0i64..=6, 1u64..=6),
        (xv, yv, n) in (0i64..=6, 0i64..=6, 1u64..=6),
    ) {
        let model = models::p2();
        let inside = |x: i64, y: i64, m: u64| x + y <= m as i64;
        prop_assume!(inside(xu, yu, m) && inside(xv, yv, n));
        let (u, v) = (LatticePoint::from_i64(&[xu, yu]), LatticePoint::from_i64(&[xv, yv]));
        prop_assert!(model.contains(&u, m) && model.contains(&v, n));
        for (_, filt) in filts::all().into_iter().filter(|(name, _)| name.starts_with("P2/")) {
            let lhs = filt.weight(&(&u + &v), m + n).unwrap();
            prop_assert!(lhs >= filt.weight(&u, m).unwrap() + filt.weight(&v, n).unwrap());
        }
    }

    #[test]
    fn concave_transform_is_concave(
        a in (0i64..=8, 0i64..=8), b in (0i64..=8, 0i64..=8), l in 0i64..=6,
    ) {
        let filt = filts::p2_min();
        let g = ConcaveTransform::new(&filt);
        let to = |(x, y): (i64, i64)| {
            let (x, y) = if x + y > 8 { (8 - y, 8 - x) } else { (x, y) };
            vec![rat(x, 8), rat(y, 8)]
        };
        let (p, q) = (to(a), to(b));
        let lam = rat(l, 6);
        let mix: Vec<Rational> = p.iter().zip(&q).map(|(x, y)| &lam * x + (int(1) - &lam) * y).collect();
        let lhs = g.eval(&mix).unwrap();
        let rhs = &lam * g.eval(&p).unwrap() + (int(1) - &lam) * g.eval(&q).unwrap();
        prop_assert!(lhs >= rhs);
    }

    #[test]
    fn flag_change_preserves_counts_and_volume(
        (s, t) in (-3i64..=3, -3i64..=3), (c0, c1) in (-2i64..=2, -2i64..=2),
    ) {
        let model = models::hirzebruch();
        // unimodular: [[1, s], [0, 1]] · [[1, 0], [t, 1]]
        let mat = vec![
            vec![BigInt::from(1 + s * t), BigInt::from(s)],
            vec![BigInt::from(t), BigInt::from(1)],
        ];
        let flag = okdh_core::FlagMap::new(mat, vec![BigInt::from(c0), BigInt::from(c1)]).unwrap();
        let moved = model.with_flag(flag).unwrap();
        let filt = filts::hirzebruch_ray();
        let moved_filt = okdh_core::WeightFiltration::new(Arc::new(moved.clone()), filt.pieces().to_vec()).unwrap();
        prop_assert_eq!(
            okdh_core::okounkov::filtered_body_volume(&filt).unwrap(),
            okdh_core::okounkov::filtered_body_volume(&moved_filt).unwrap()
        );
        for m in 1..=4 {
            prop_assert_eq!(model.h0(m), moved.h0(m));
        }
        let _: &ToricModel = &moved;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lattice_points_match_box_scan_3d(pts in prop::collection::vec(point(3), 4..7), m in 1u64..=2) {
        let p = RationalPolytope::from_vertices(3, &pts).unwrap();
        prop_assert_eq!(p.lattice_points(m).unwrap(), box_scan(&p, m));
    }

    #[test]
    fn hull_of_random_square_points(pts in prop::collection::vec((0i64..=60, 0i64..=60), 100)) {
        let pts: Vec<Vec<Rational>> = pts.iter().map(|&(x, y)| vec![rat(x, 60), rat(y, 60)]).collect();
        let p = RationalPolytope::from_vertices(2, &pts).unwrap();
        let square = RationalPolytope::cube(&[int(0), int(0)], &[int(1), int(1)]);
        for v in p.vertices() {
            prop_assert!(square.contains(v));
        }
        for x in &pts {
            prop_assert!(p.hrep().iter().all(|h| h.contains(x)));
        }
        // a vertex is not inside any triangle of other input points
        let sample: Vec<&Vec<Rational>> = pts.iter().take(12).collect();
        for v in p.vertices() {
            let others: Vec<&&Vec<Rational>> = sample.iter().filter(|q| **q != v).collect();
            for i in 0..others.len() {
                for j in i + 1..others.len() {
                    for k in j + 1..others.len() {
                        prop_assert!(!in_triangle(v, others[i], others[j], others[k]) || cross(others[i], others[j], others[k]).is_zero());
                    }
                }
            }
        }
    }
}
