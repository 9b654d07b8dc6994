//! Univariate polynomials in `t` with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::rational::{format_rational, Rational};

/// Coefficients in ascending order of degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn identity() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![Rational::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / Rational::from_integer(BigInt::from(i + 1))),
        );
        Self::new(out)
    }

    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Rational {
        let a = self.antiderivative();
        a.eval(hi) - a.eval(lo)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `t · p(t)`.
    pub fn times_t(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero()];
        out.extend(self.coeffs.iter().cloned());
        Self::new(out)
    }

    /// Lagrange interpolation through `(t_i, y_i)` with distinct `t_i`.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Self {
        let mut acc = Self::zero();
        for (i, (ti, yi)) in points.iter().enumerate() {
            let mut basis = Self::constant(Rational::one());
            let mut denom = Rational::one();
            for (j, (tj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = &basis * &Self::new(vec![-tj.clone(), Rational::one()]);
                denom *= ti - tj;
            }
            acc = &acc + &basis.scale(&(yi / denom));
        }
        acc
    }

    /// Remainder of Euclidean division by a nonzero polynomial.
    fn rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[i + shift] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`, by Sturm's theorem.
    pub fn count_roots_in(&self, lo: &Rational, hi: &Rational) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            seq.push(-&r);
        }
        seq.pop();
        let changes = |t: &Rational| {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| crate::lattice::rational::sign(&p.eval(t)))
                .filter(|&s| s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        // the sign-change difference counts roots in (lo, hi]
        let half_open = changes(lo).saturating_sub(changes(hi));
        half_open - usize::from(self.eval(hi).is_zero()).min(half_open)
    }

    /// All rational roots, found through the rational root theorem on the primitive integer
    /// multiple.
    pub fn rational_roots(&self) -> Vec<Rational> {
        let Some(_) = self.degree() else {
            return Vec::new();
        };
        let mut coeffs = self.coeffs.clone();
        let mut roots = Vec::new();
        // strip the root at zero
        while coeffs.first().is_some_and(|c| c.is_zero()) {
            coeffs.remove(0);
            if !roots.contains(&Rational::zero()) {
                roots.push(Rational::zero());
            }
        }
        if coeffs.len() <= 1 {
            return roots;
        }
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let p = Self::new(coeffs);
        let c0 = ints[0].abs();
        let cn = ints.last().unwrap().abs();
        for a in divisors(&c0) {
            for b in divisors(&cn) {
                for s in [1i64, -1] {
                    let r = Rational::new(&a * BigInt::from(s), b.clone());
                    if p.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

/// Positive divisors of a nonzero integer; intended for the small coefficients seen here.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Rational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{}", format_rational(&mag))?;
            }
            match i {
                0 => {}
                1 if show_coeff => write!(f, "*t")?,
                1 => write!(f, "t")?,
                _ if show_coeff => write!(f, "*t^{i}")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}
