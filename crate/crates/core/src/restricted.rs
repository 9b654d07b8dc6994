//! Restricted volumes along a torus-invariant divisor and the description of `ν` through them.
//!
//! The divisor `E` enters only through its order of vanishing on monomials,
//! `ord_E(x^u) = ⟨a, u⟩ + b m`, so that `F^t R_m = H⁰(Y, mπ*L - tE)` is the filtration by
//! this weight. The volume function `t ↦ Vol(L - tE)` is computed here directly from the
//! moment polytope, independently of the concave-transform machinery in `okounkov`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtrations::{AffinePiece, WeightFiltration};
use crate::lattice::rational::{ceil, factorial, from_big, int, pow, Rational};
use crate::lattice::{Halfspace, LatticePoint};
use crate::measures::limit_measure_nu;
use crate::models::ToricModel;
use crate::polynomial::Polynomial;

/// A reduced irreducible torus-invariant divisor, as an integral order-of-vanishing weight.
#[derive(Clone, Debug)]
pub struct DivisorData {
    a: Vec<BigInt>,
    b: BigInt,
    filtration: WeightFiltration,
}

impl DivisorData {
    pub fn new(model: Arc<ToricModel>, a: Vec<BigInt>, b: BigInt) -> Result<Self> {
        if a.iter().all(Zero::is_zero) {
            return Err(Error::InvalidDivisor(
                "weight vector is zero, so the weight is constant".into(),
            ));
        }
        let piece = AffinePiece::new(a.iter().map(from_big).collect(), from_big(&b));
        let filtration = WeightFiltration::new(model, vec![piece])?;
        Ok(Self { a, b, filtration })
    }

    /// Accepts a single-piece filtration with integral coefficients.
    pub fn from_filtration(filt: &WeightFiltration) -> Result<Self> {
        let [piece] = filt.pieces() else {
            return Err(Error::InvalidDivisor(format!(
                "expected a single affine piece, got {}",
                filt.pieces().len()
            )));
        };
        let integral = |r: &Rational, what: &str| {
            if r.is_integer() {
                Ok(r.to_integer())
            } else {
                Err(Error::InvalidDivisor(format!(
                    "{what} = {r} is not an integer, so orders of vanishing would not be integral"
                )))
            }
        };
        let a = piece
            .a
            .iter()
            .map(|c| integral(c, "weight coefficient"))
            .collect::<Result<Vec<_>>>()?;
        let b = integral(&piece.b, "weight constant")?;
        Self::new(filt.model_arc().clone(), a, b)
    }

    pub fn filtration(&self) -> &WeightFiltration {
        &self.filtration
    }

    pub fn model(&self) -> &ToricModel {
        self.filtration.model()
    }

    pub fn dim(&self) -> usize {
        self.filtration.dim()
    }

    /// `ord_E` of the monomial `x^u` in degree `m`.
    pub fn order(&self, u: &LatticePoint, m: u64) -> BigInt {
        self.a
            .iter()
            .zip(u.coords())
            .fold(&self.b * BigInt::from(m), |acc, (a, x)| acc + a * x)
    }

    fn form_at(&self, x: &[Rational]) -> Rational {
        self.a
            .iter()
            .zip(x)
            .fold(from_big(&self.b), |acc, (a, x)| acc + from_big(a) * x)
    }
}

/// Rank of the restriction map at level `m`, with the order of vanishing actually used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedCount {
    /// `⌈m t⌉`, the smallest achievable order at or above `m t`.
    pub level: BigInt,
    pub count: usize,
}

/// `h⁰(X|E, mL - ⌈mt⌉E)`: the monomials of `R_m` vanishing to order exactly `⌈mt⌉` along `E`.
pub fn restricted_h0(div: &DivisorData, m: u64, t: &Rational) -> Result<RestrictedCount> {
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "level m".into(),
            constraint: ">= 1".into(),
            value: "0".into(),
        });
    }
    if t.is_negative() {
        return Err(Error::OutOfRange {
            what: "t".into(),
            constraint: ">= 0".into(),
            value: t.to_string(),
        });
    }
    let level = ceil(&(t * int(m as i64)));
    let count = div
        .model()
        .graded_piece(m)
        .basis
        .iter()
        .filter(|u| div.order(u, m) == level)
        .count();
    Ok(RestrictedCount { level, count })
}

/// `(d-1)!/m^{d-1} · h⁰(X|E, mL - ⌈mt⌉E)`.
pub fn restricted_volume_estimate(div: &DivisorData, m: u64, t: &Rational) -> Result<Rational> {
    let d = div.dim();
    let c = restricted_h0(div, m, t)?;
    Ok(
        from_big(&factorial(d - 1)) * Rational::from_integer(c.count.into())
            / pow(&int(m as i64), d - 1),
    )
}

/// Running maximum of the finite-level estimates over `m_list`, honouring the limsup.
pub fn restricted_volume_limsup(
    div: &DivisorData,
    t: &Rational,
    m_list: &[u64],
) -> Result<Vec<Rational>> {
    let estimates = m_list
        .par_iter()
        .map(|&m| restricted_volume_estimate(div, m, t))
        .collect::<Result<Vec<_>>>()?;
    let mut running = Vec::with_capacity(estimates.len());
    let mut best: Option<Rational> = None;
    for e in estimates {
        let next = match best {
            Some(b) if b >= e => b,
            _ => e,
        };
        running.push(next.clone());
        best = Some(next);
    }
    Ok(running)
}

/// `t ↦ Vol(L - tE)` on `[0, a_max]` as an exact piecewise polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePolynomialFunction {
    pub breakpoints: Vec<Rational>,
    pub pieces: Vec<Polynomial>,
    pub dim: usize,
}

impl VolumePolynomialFunction {
    pub fn eval(&self, t: &Rational) -> Rational {
        if self.pieces.is_empty() {
            return Rational::zero();
        }
        if t <= &self.breakpoints[0] {
            return self.pieces[0].eval(&self.breakpoints[0]);
        }
        match self.interval_of(t) {
            Some(j) => self.pieces[j].eval(t),
            None => Rational::zero(),
        }
    }

    /// Index of the interval `[t_j, t_{j+1})` containing `t`.
    fn interval_of(&self, t: &Rational) -> Option<usize> {
        self.breakpoints
            .windows(2)
            .position(|w| w[0] <= *t && *t < w[1])
    }

    /// `Vol_{X|E}(L - tE) = -(1/d) d/dt Vol(L - tE)` on each interval.
    pub fn restricted_pieces(&self) -> Vec<Polynomial> {
        let s = Rational::new((-1).into(), self.dim.into());
        self.pieces
            .iter()
            .map(|p| p.derivative().scale(&s))
            .collect()
    }

    /// `sup{t : Vol(L - tE) > 0}`.
    pub fn big_threshold(&self) -> Rational {
        for j in (0..self.pieces.len()).rev() {
            if !self.pieces[j].is_zero() {
                return self.breakpoints[j + 1].clone();
            }
        }
        self.breakpoints.first().cloned().unwrap_or_default()
    }

    /// Whether the one-sided derivatives agree at every interior breakpoint.
    pub fn is_c1(&self) -> bool {
        (1..self.pieces.len()).all(|j| {
            let t = &self.breakpoints[j];
            self.pieces[j - 1].derivative().eval(t) == self.pieces[j].derivative().eval(t)
        })
    }
}

/// `Vol(L - tE) = d! · vol{u ∈ P : ord_E(u) >= t}`. The slice only changes shape where the
/// cutting hyperplane passes a vertex of `P`, so breakpoints are the divisor's values at the
/// vertices; each piece is interpolated from `d + 1` samples and checked against one more.
pub fn volume_function(div: &DivisorData) -> Result<VolumePolynomialFunction> {
    let d = div.dim();
    let p = div.model().polytope();
    let fact = from_big(&factorial(d));
    let mut breaks: Vec<Rational> = p
        .vertices()
        .iter()
        .map(|v| div.form_at(v))
        .chain(std::iter::once(Rational::zero()))
        .collect();
    breaks.sort();
    breaks.dedup();
    let top = breaks.last().cloned().unwrap_or_default();
    breaks.retain(|t| !t.is_negative());
    let normal: Vec<Rational> = div.a.iter().map(from_big).collect();
    let vol_at = |t: &Rational| {
        let cut = Halfspace::new(normal.clone(), t - from_big(&div.b));
        &fact * p.intersect([cut]).volume()
    };
    let pieces = breaks
        .par_windows(2)
        .map(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            let step = (hi - lo) / int(d as i64 + 3);
            let samples: Vec<(Rational, Rational)> = (1..=(d as i64 + 2))
                .map(|k| {
                    let t = lo + &step * int(k);
                    let v = vol_at(&t);
                    (t, v)
                })
                .collect();
            let poly = Polynomial::interpolate(&samples[..=d]);
            let (tc, vc) = &samples[d + 1];
            if poly.eval(tc) != *vc {
                return Err(Error::Invariant(format!(
                    "Vol(L - tE) is not polynomial on ({lo}, {hi})"
                )));
            }
            Ok(poly)
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(breaks.last(), Some(&top));
    Ok(VolumePolynomialFunction {
        breakpoints: breaks,
        pieces,
        dim: d,
    })
}

/// `Vol_{X|E}(L - tE)` for `0 <= t < a_max`.
pub fn restricted_volume(div: &DivisorData, t: &Rational) -> Result<Rational> {
    let top = div.filtration().a_max_limit();
    if t.is_negative() || *t >= top {
        return Err(Error::OutOfRange {
            what: "t".into(),
            constraint: format!("in [0, {top})"),
            value: t.to_string(),
        });
    }
    let vol = volume_function(div)?;
    let j = vol
        .interval_of(t)
        .ok_or_else(|| Error::Invariant(format!("no volume piece covers t = {t}")))?;
    Ok(vol.restricted_pieces()[j].eval(t))
}

/// Per-interval comparison of the limit-measure density with `d·Vol_{X|E}(L - tE)/Vol(L)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalCheck {
    pub lo: Rational,
    pub hi: Rational,
    pub nu_density: Polynomial,
    pub restricted_density: Polynomial,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub intervals: Vec<IntervalCheck>,
    /// `ν` carries no atoms.
    pub absolutely_continuous: bool,
    /// The volume function is `C¹` across its breakpoints.
    pub differentiable: bool,
    pub a_max_limit: Rational,
    pub big_threshold: Rational,
}

impl DensityReport {
    pub fn threshold_pass(&self) -> bool {
        self.a_max_limit == self.big_threshold
    }

    pub fn pass(&self) -> bool {
        !self.intervals.is_empty()
            && self.intervals.iter().all(|c| c.pass)
            && self.absolutely_continuous
            && self.differentiable
            && self.threshold_pass()
    }
}

impl fmt::Display for DensityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        for c in &self.intervals {
            writeln!(
                f,
                "[{}, {}]  nu = {}  d*Vol_X|E/Vol(L) = {}  {}",
                c.lo,
                c.hi,
                c.nu_density,
                c.restricted_density,
                verdict(c.pass)
            )?;
        }
        writeln!(
            f,
            "absolutely continuous: {}",
            verdict(self.absolutely_continuous)
        )?;
        writeln!(f, "volume function C1: {}", verdict(self.differentiable))?;
        write!(
            f,
            "a_max = {}  sup{{t : Vol(L - tE) > 0}} = {}  {}",
            self.a_max_limit,
            self.big_threshold,
            verdict(self.threshold_pass())
        )
    }
}

/// Compares `ν` with `d·Vol_{X|E}(π*L - tE)/Vol(L) dt` interval by interval, and `a_max`
/// with the bigness threshold of `π*L - tE`. Mismatches are reported, not raised.
pub fn verify_theorem_5(div: &DivisorData) -> Result<DensityReport> {
    let nu = limit_measure_nu(div.filtration())?;
    let vol = volume_function(div)?;
    let d = Rational::from_integer(div.dim().into());
    let vol_l = div.model().volume_of_l();
    let restricted = vol.restricted_pieces();

    let mut cuts: Vec<Rational> = nu
        .breakpoints
        .iter()
        .chain(&vol.breakpoints)
        .cloned()
        .collect();
    cuts.sort();
    cuts.dedup();
    let intervals = cuts
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0].clone(), w[1].clone());
            let nu_density = nu.density_on(&lo, &hi);
            let restricted_density = vol
                .breakpoints
                .windows(2)
                .zip(&restricted)
                .find(|(b, _)| b[0] <= lo && hi <= b[1])
                .map(|(_, p)| p.scale(&(&d / &vol_l)))
                .unwrap_or_default();
            let pass = nu_density == restricted_density;
            IntervalCheck {
                lo,
                hi,
                nu_density,
                restricted_density,
                pass,
            }
        })
        .collect();
    Ok(DensityReport {
        intervals,
        absolutely_continuous: nu.atoms.is_empty(),
        differentiable: vol.is_c1(),
        a_max_limit: div.filtration().a_max_limit(),
        big_threshold: vol.big_threshold(),
    })
}

/// Named divisors on the builtin models.
pub mod builtin {
    use super::*;
    use crate::models::builtin as models;

    fn div(model: ToricModel, a: &[i64], b: i64) -> DivisorData {
        DivisorData::new(
            Arc::new(model),
            a.iter().map(|&x| BigInt::from(x)).collect(),
            BigInt::from(b),
        )
        .expect("valid")
    }

    pub fn p1_point() -> DivisorData {
        div(models::p1(), &[1], 0)
    }

    pub fn p2_line() -> DivisorData {
        div(models::p2(), &[1, 0], 0)
    }

    pub fn p2_o2_line() -> DivisorData {
        div(models::p2_o2(), &[1, 0], 0)
    }

    /// The curve of the ray `(1, 0)` on `F_1`.
    pub fn hirzebruch_ray() -> DivisorData {
        div(models::hirzebruch(), &[1, 0], 0)
    }

    /// The curve of the ray `(-1, -1)` on `F_1`.
    pub fn hirzebruch_diagonal() -> DivisorData {
        div(models::hirzebruch(), &[-1, -1], 2)
    }

    pub fn all() -> Vec<(&'static str, DivisorData)> {
        vec![
            ("P1/point", p1_point()),
            ("P2/line", p2_line()),
            ("P2(O(2))/line", p2_o2_line()),
            ("F1/ray", hirzebruch_ray()),
            ("F1/diagonal", hirzebruch_diagonal()),
        ]
    }
}
