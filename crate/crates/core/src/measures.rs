//! The atomic measures `ν_m`, `μ_m` and their limits `ν`, `μ = (G)_*λ`, held exactly.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtrations::WeightFiltration;
use crate::lattice::rational::{from_big, int, pow, Rational};
use crate::okounkov::{slice_volume_function, SliceVolumeFunction};
use crate::polynomial::Polynomial;

/// Finitely many atoms at strictly increasing locations with positive masses.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiscreteMeasure {
    atoms: Vec<(Rational, Rational)>,
}

impl DiscreteMeasure {
    /// Sorts and merges atoms at equal locations; zero masses are dropped.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut raw: Vec<(Rational, Rational)> = atoms.into_iter().collect();
        if let Some((loc, mass)) = raw.iter().find(|(_, w)| w.is_negative()) {
            return Err(Error::OutOfRange {
                what: format!("mass of the atom at {loc}"),
                constraint: ">= 0".into(),
                value: mass.to_string(),
            });
        }
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (loc, mass) in raw {
            match merged.last_mut() {
                Some((l, w)) if *l == loc => *w += mass,
                _ => merged.push((loc, mass)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        Ok(Self { atoms: merged })
    }

    pub fn dirac(at: Rational) -> Self {
        Self {
            atoms: vec![(at, Rational::one())],
        }
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms
            .iter()
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn expectation(&self) -> Rational {
        self.atoms
            .iter()
            .fold(Rational::zero(), |acc, (t, w)| acc + t * w)
    }

    /// `mass((-∞, t])`.
    pub fn cdf(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .take_while(|(l, _)| l <= t)
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    /// `mass((-∞, t))`.
    pub fn cdf_left(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .take_while(|(l, _)| l < t)
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self::from_atoms(self.atoms.iter().map(|(l, w)| (l.clone(), w * s))).expect("s >= 0")
    }
}

/// Piecewise-polynomial density on `[t_0, t_k]` plus finitely many atoms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PiecewisePolyMeasure {
    pub breakpoints: Vec<Rational>,
    pub densities: Vec<Polynomial>,
    pub atoms: Vec<(Rational, Rational)>,
}

impl PiecewisePolyMeasure {
    pub fn total_mass(&self) -> Rational {
        let continuous = self
            .densities
            .iter()
            .zip(self.breakpoints.windows(2))
            .fold(Rational::zero(), |acc, (p, w)| {
                acc + p.integrate(&w[0], &w[1])
            });
        self.atoms.iter().fold(continuous, |acc, (_, w)| acc + w)
    }

    pub fn expectation(&self) -> Rational {
        let continuous = self
            .densities
            .iter()
            .zip(self.breakpoints.windows(2))
            .fold(Rational::zero(), |acc, (p, w)| {
                acc + p.times_t().integrate(&w[0], &w[1])
            });
        self.atoms
            .iter()
            .fold(continuous, |acc, (t, w)| acc + t * w)
    }

    fn continuous_cdf(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (p, w) in self.densities.iter().zip(self.breakpoints.windows(2)) {
            if *t <= w[0] {
                break;
            }
            let hi = if *t < w[1] { t } else { &w[1] };
            acc += p.integrate(&w[0], hi);
        }
        acc
    }

    pub fn cdf(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .filter(|(l, _)| l <= t)
            .fold(self.continuous_cdf(t), |acc, (_, w)| acc + w)
    }

    pub fn cdf_left(&self, t: &Rational) -> Rational {
        self.atoms
            .iter()
            .filter(|(l, _)| l < t)
            .fold(self.continuous_cdf(t), |acc, (_, w)| acc + w)
    }

    /// Density on the interval containing the open interval `(lo, hi)`; zero outside.
    pub fn density_on(&self, lo: &Rational, hi: &Rational) -> Polynomial {
        self.breakpoints
            .windows(2)
            .zip(&self.densities)
            .find(|(w, _)| w[0] <= *lo && *hi <= w[1])
            .map(|(_, p)| p.clone())
            .unwrap_or_default()
    }

    pub fn density_at(&self, t: &Rational) -> Rational {
        self.breakpoints
            .windows(2)
            .zip(&self.densities)
            .find(|(w, _)| w[0] <= *t && *t < w[1])
            .map(|(_, p)| p.eval(t))
            .unwrap_or_default()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            densities: self.densities.iter().map(|p| p.scale(s)).collect(),
            atoms: self.atoms.iter().map(|(l, w)| (l.clone(), w * s)).collect(),
        }
    }

    /// Whether every density is non-negative on its interval, checked at the endpoints and at
    /// the critical points of the polynomial.
    pub fn densities_nonnegative(&self) -> bool {
        self.densities
            .iter()
            .zip(self.breakpoints.windows(2))
            .all(|(p, w)| {
                let (lo, hi) = (&w[0], &w[1]);
                if p.eval(lo).is_negative() || p.eval(hi).is_negative() {
                    return false;
                }
                let dp = p.derivative();
                let critical: Vec<Rational> = dp
                    .rational_roots()
                    .into_iter()
                    .filter(|r| lo < r && r < hi)
                    .collect();
                if critical.iter().any(|r| p.eval(r).is_negative()) {
                    return false;
                }
                if dp.count_roots_in(lo, hi) == critical.len() {
                    return true;
                }
                // irrational critical points: require no sign change inside
                let mid = (lo + hi) / int(2);
                p.count_roots_in(lo, hi) == 0 && !p.eval(&mid).is_negative()
            })
    }

    /// Smallest closed interval carrying all the mass.
    pub fn support(&self) -> Option<(Rational, Rational)> {
        let mut pts: Vec<Rational> = self.atoms.iter().map(|(l, _)| l.clone()).collect();
        for (p, w) in self.densities.iter().zip(self.breakpoints.windows(2)) {
            if !p.is_zero() {
                pts.push(w[0].clone());
                pts.push(w[1].clone());
            }
        }
        let lo = pts.iter().min()?.clone();
        let hi = pts.iter().max()?.clone();
        Some((lo, hi))
    }
}

/// Either kind of measure, for operations that accept both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Piecewise(PiecewisePolyMeasure),
}

impl Measure {
    pub fn total_mass(&self) -> Rational {
        match self {
            Measure::Discrete(m) => m.total_mass(),
            Measure::Piecewise(m) => m.total_mass(),
        }
    }

    pub fn expectation(&self) -> Rational {
        match self {
            Measure::Discrete(m) => m.expectation(),
            Measure::Piecewise(m) => m.expectation(),
        }
    }

    pub fn cdf(&self, t: &Rational) -> Rational {
        match self {
            Measure::Discrete(m) => m.cdf(t),
            Measure::Piecewise(m) => m.cdf(t),
        }
    }

    pub fn cdf_left(&self, t: &Rational) -> Rational {
        match self {
            Measure::Discrete(m) => m.cdf_left(t),
            Measure::Piecewise(m) => m.cdf_left(t),
        }
    }

    /// Atom locations and density breakpoints.
    fn landmarks(&self) -> Vec<Rational> {
        match self {
            Measure::Discrete(m) => m.atoms().iter().map(|(l, _)| l.clone()).collect(),
            Measure::Piecewise(m) => m
                .atoms
                .iter()
                .map(|(l, _)| l.clone())
                .chain(m.breakpoints.iter().cloned())
                .collect(),
        }
    }

    fn density_on(&self, lo: &Rational, hi: &Rational) -> Option<Polynomial> {
        match self {
            Measure::Discrete(_) => None,
            Measure::Piecewise(m) => Some(m.density_on(lo, hi)),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Measure::Discrete(m) => m.atoms().is_empty(),
            Measure::Piecewise(m) => {
                m.atoms.is_empty() && m.densities.iter().all(Polynomial::is_zero)
            }
        }
    }
}

impl From<DiscreteMeasure> for Measure {
    fn from(m: DiscreteMeasure) -> Self {
        Measure::Discrete(m)
    }
}

impl From<PiecewisePolyMeasure> for Measure {
    fn from(m: PiecewisePolyMeasure) -> Self {
        Measure::Piecewise(m)
    }
}

/// `ν_m = (1/h⁰(mL)) Σ_j δ_{a_j(m)/m}`.
pub fn nu_m(filt: &WeightFiltration, m: u64) -> Result<DiscreteMeasure> {
    let v = filt.vanishing_numbers(m)?;
    let mass = Rational::new(1.into(), v.len().into());
    let scale = int(m as i64);
    DiscreteMeasure::from_atoms(v.values.iter().map(|a| (a / &scale, mass.clone())))
}

/// `μ_m = (h⁰(mL)/m^d) ν_m`.
pub fn mu_m(filt: &WeightFiltration, m: u64) -> Result<DiscreteMeasure> {
    let nu = nu_m(filt, m)?;
    let h0 = filt.model().h0(m);
    let factor = Rational::from_integer(h0.into()) / pow(&int(m as i64), filt.dim());
    Ok(nu.scaled(&factor))
}

fn measure_from_slices(h: &SliceVolumeFunction) -> PiecewisePolyMeasure {
    PiecewisePolyMeasure {
        breakpoints: h.breakpoints.clone(),
        densities: h.pieces.iter().map(|p| -&p.derivative()).collect(),
        atoms: h.jumps(),
    }
}

/// `μ = (G)_*λ`: density `-h'` on each interval of `h`, atoms where `h` drops.
pub fn limit_measure_mu(filt: &WeightFiltration) -> Result<PiecewisePolyMeasure> {
    Ok(measure_from_slices(&slice_volume_function(filt)?))
}

/// `ν = (d!/Vol(L)) μ`, a probability measure.
pub fn limit_measure_nu(filt: &WeightFiltration) -> Result<PiecewisePolyMeasure> {
    let h = slice_volume_function(filt)?;
    // d!/Vol(L) = 1/vol(Δ(L))
    let factor =
        from_big(&crate::lattice::rational::factorial(filt.dim())) / filt.model().volume_of_l();
    let nu = measure_from_slices(&h).scaled(&factor);
    if nu.total_mass() != Rational::one() {
        return Err(Error::Invariant(format!(
            "limit measure has mass {}",
            nu.total_mass()
        )));
    }
    Ok(nu)
}

pub fn expectation(measure: &Measure) -> Rational {
    measure.expectation()
}

/// `sup_t |F_A(t) - F_B(t)|` for probability measures, exactly.
pub fn kolmogorov_distance(a: &Measure, b: &Measure) -> Result<Rational> {
    for m in [a, b] {
        let mass = m.total_mass();
        if mass != Rational::one() {
            return Err(Error::MassMismatch {
                mass: mass.to_string(),
            });
        }
    }
    let mut marks = a.landmarks();
    marks.extend(b.landmarks());
    marks.sort();
    marks.dedup();
    let gap = |t: &Rational| (a.cdf(t) - b.cdf(t)).abs();
    let gap_left = |t: &Rational| (a.cdf_left(t) - b.cdf_left(t)).abs();
    let mut best = Rational::zero();
    for t in &marks {
        best = best.max(gap(t)).max(gap_left(t));
    }
    // with at most one continuous side the gap is monotone between landmarks
    for w in marks.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let (Some(pa), Some(pb)) = (a.density_on(lo, hi), b.density_on(lo, hi)) else {
            continue;
        };
        let q = &pa - &pb;
        if q.is_zero() || q.count_roots_in(lo, hi) == 0 {
            continue;
        }
        let inner: Vec<Rational> = q
            .rational_roots()
            .into_iter()
            .filter(|r| lo < r && r < hi)
            .collect();
        if inner.len() != q.count_roots_in(lo, hi) {
            return Err(Error::IrrationalSupremum {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        for r in &inner {
            best = best.max(gap(r));
        }
    }
    Ok(best)
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: u64,
    #[serde(with = "crate::formats::rational_string")]
    pub expectation: Rational,
    #[serde(with = "crate::formats::rational_string")]
    pub kolmogorov: Rational,
}

/// `(m, E(ν_m), d_K(ν_m, ν))` for each `m`; rows are computed independently and returned in
/// input order.
pub fn convergence_sweep(filt: &WeightFiltration, m_list: &[u64]) -> Result<Vec<SweepRow>> {
    if m_list.is_empty() {
        return Err(Error::OutOfRange {
            what: "m_list".into(),
            constraint: "nonempty".into(),
            value: "[]".into(),
        });
    }
    if m_list[0] == 0 || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange {
            what: "m_list".into(),
            constraint: "strictly increasing positive levels".into(),
            value: format!("{m_list:?}"),
        });
    }
    let limit: Measure = limit_measure_nu(filt)?.into();
    m_list
        .par_iter()
        .map(|&m| {
            let nu: Measure = nu_m(filt, m)?.into();
            Ok(SweepRow {
                m,
                expectation: nu.expectation(),
                kolmogorov: kolmogorov_distance(&nu, &limit)?,
            })
        })
        .collect()
}
