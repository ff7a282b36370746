//! Univariate polynomials in `t` over the complex rationals, used to test
//! the complementing condition of boundary operators: the boundary symbols
//! `B_j(t)` must be linearly independent modulo `(t − i)^m`.

use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::polynomial::rational;
use crate::error::{Error, Result};

pub type ComplexRational = Complex<BigRational>;

pub fn complex(re: i64, im: i64) -> ComplexRational {
    Complex::new(rational(re), rational(im))
}

/// Coefficients in ascending powers; the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComplexPolynomial {
    coefficients: Vec<ComplexRational>,
}

impl ComplexPolynomial {
    pub fn new(mut coefficients: Vec<ComplexRational>) -> Self {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        ComplexPolynomial { coefficients }
    }

    /// From integer `(re, im)` pairs in ascending powers.
    pub fn from_ints(coefficients: &[(i64, i64)]) -> Self {
        Self::new(coefficients.iter().map(|&(re, im)| complex(re, im)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[ComplexRational] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> ComplexRational {
        self.coefficients.get(k).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::new((0..n).map(|k| self.coefficient(k) + other.coefficient(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        Self::new((0..n).map(|k| self.coefficient(k) - other.coefficient(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex::zero(); self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        Self::new(self.coefficients.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::new(vec![Complex::one()]), |acc, _| acc.mul(self))
    }
}

/// Euclidean division: `p = q·quotient + remainder` with
/// `deg(remainder) < deg(q)`.
pub fn poly_divmod(p: &ComplexPolynomial, q: &ComplexPolynomial) -> Result<(ComplexPolynomial, ComplexPolynomial)> {
    let dq = q.degree().ok_or_else(|| Error::invalid("division by the zero polynomial"))?;
    let lead = &q.coefficients[dq];
    let mut rem = p.coefficients.clone();
    let Some(dp) = p.degree().filter(|&d| d >= dq) else {
        return Ok((ComplexPolynomial::zero(), p.clone()));
    };
    let mut quot = vec![Complex::zero(); dp - dq + 1];
    for k in (0..=dp - dq).rev() {
        let c = &rem[k + dq] / lead;
        if !c.is_zero() {
            for (j, qc) in q.coefficients.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &c * qc;
            }
        }
        quot[k] = c;
    }
    rem.truncate(dq);
    Ok((ComplexPolynomial::new(quot), ComplexPolynomial::new(rem)))
}

/// Rank of a set of coefficient vectors over the complex rationals.
fn rank(mut rows: Vec<Vec<ComplexRational>>) -> usize {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut rows {
        r.resize(cols, Complex::zero());
    }
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &rows[rank][c];
                for k in c..cols {
                    let v = &f * &rows[rank][k];
                    rows[r][k] = &rows[r][k] - v;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplementingReport {
    pub symbols: Vec<ComplexPolynomial>,
    /// `(t − i)^m`
    pub modulus: ComplexPolynomial,
    pub remainders: Vec<ComplexPolynomial>,
    pub linearly_dependent: bool,
    /// For two symbols with `r₂ = c·r₁`, the factor `c`.
    pub factor: Option<ComplexRational>,
}

impl ComplementingReport {
    /// The complementing condition holds iff the remainders are independent.
    pub fn condition_holds(&self) -> bool {
        !self.linearly_dependent
    }
}

/// Reduces each boundary symbol modulo `(t − i)^multiplicity` and checks the
/// remainders for linear dependence, exactly.
pub fn complementing_condition(symbols: &[ComplexPolynomial], multiplicity: u32) -> Result<ComplementingReport> {
    if multiplicity == 0 {
        return Err(Error::invalid("multiplicity must be at least 1"));
    }
    let modulus = ComplexPolynomial::from_ints(&[(0, -1), (1, 0)]).pow(multiplicity);
    let remainders = symbols.iter().map(|s| poly_divmod(s, &modulus).map(|(_, r)| r)).collect::<Result<Vec<_>>>()?;
    let r = rank(remainders.iter().map(|p| p.coefficients.clone()).collect());
    let linearly_dependent = r < remainders.len();

    let factor = match remainders.as_slice() {
        [r1, r2] if !r1.is_zero() => {
            let k = r1.degree().expect("nonzero");
            let c = &r2.coefficient(k) / &r1.coefficients[k];
            (r1.scale(&c) == *r2).then_some(c)
        }
        _ => None,
    };
    Ok(ComplementingReport { symbols: symbols.to_vec(), modulus, remainders, linearly_dependent, factor })
}

/// Neumann conditions `Δu`, `∇Δu·n` for `Δ²`: symbols `1 + t²` and `t + t³`
/// modulo `(t − i)²`.
pub fn complementing_check() -> ComplementingReport {
    let b1 = ComplexPolynomial::from_ints(&[(1, 0), (0, 0), (1, 0)]);
    let b2 = ComplexPolynomial::from_ints(&[(0, 0), (1, 0), (0, 0), (1, 0)]);
    complementing_condition(&[b1, b2], 2).expect("nonzero modulus")
}

/// Neumann condition `∇φ·n` for `−Δ`: symbol `t` modulo `t − i`.
pub fn laplace_neumann_control() -> ComplementingReport {
    let b = ComplexPolynomial::from_ints(&[(0, 0), (1, 0)]);
    complementing_condition(&[b], 1).expect("nonzero modulus")
}

pub fn format_complex(c: &ComplexRational) -> String {
    let (re, im) = (&c.re, &c.im);
    let imag = |v: &BigRational| {
        if v.is_one() {
            "i".to_string()
        } else if (-v).is_one() {
            "-i".to_string()
        } else {
            format!("{v}i")
        }
    };
    match (re.is_zero(), im.is_zero()) {
        (_, true) => re.to_string(),
        (true, false) => imag(im),
        (false, false) => {
            let sign = if im.is_negative() { "-" } else { "+" };
            format!("({re} {sign} {})", imag(&im.abs()))
        }
    }
}

impl fmt::Display for ComplexPolynomial {
    /// Ascending powers, e.g. `2 + 2i t` or `2i - 2 t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // pull a leading minus out of purely real or purely imaginary terms
            let negative = (c.im.is_zero() && c.re.is_negative()) || (c.re.is_zero() && c.im.is_negative());
            let mag = if negative { -c.clone() } else { c.clone() };
            let coef = format_complex(&mag);
            let power = match k {
                0 => String::new(),
                1 => "t".into(),
                _ => format!("t^{k}"),
            };
            let body = match (k, mag.is_one()) {
                (0, _) => coef,
                (_, true) => power,
                _ => format!("{coef} {power}"),
            };
            match (first, negative) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_division() {
        let t2 = ComplexPolynomial::from_ints(&[(0, 0), (0, 0), (1, 0)]);
        let t = ComplexPolynomial::from_ints(&[(0, 0), (1, 0)]);
        let (q, r) = poly_divmod(&t2, &t).unwrap();
        assert_eq!(q, t);
        assert!(r.is_zero());
        assert!(poly_divmod(&t, &ComplexPolynomial::zero()).is_err());
    }

    #[test]
    fn neumann_biharmonic_remainders() {
        let rep = complementing_check();
        // 2(1 + i t) and 2(-t + i)
        assert_eq!(rep.remainders[0], ComplexPolynomial::from_ints(&[(2, 0), (0, 2)]));
        assert_eq!(rep.remainders[1], ComplexPolynomial::from_ints(&[(0, 2), (-2, 0)]));
        assert!(rep.linearly_dependent);
        assert_eq!(rep.factor, Some(complex(0, 1)));
        assert_eq!(rep.remainders[0].to_string(), "2 + 2i t");
        assert_eq!(rep.remainders[1].to_string(), "2i - 2 t");
        assert_eq!(rep.modulus.to_string(), "-1 - 2i t + t^2");
    }

    #[test]
    fn quotients_match_the_hand_division() {
        let b1 = ComplexPolynomial::from_ints(&[(1, 0), (0, 0), (1, 0)]);
        let b2 = ComplexPolynomial::from_ints(&[(0, 0), (1, 0), (0, 0), (1, 0)]);
        let m = ComplexPolynomial::from_ints(&[(0, -1), (1, 0)]).pow(2);
        assert_eq!(poly_divmod(&b1, &m).unwrap().0, ComplexPolynomial::from_ints(&[(1, 0)]));
        // t + 2i
        assert_eq!(poly_divmod(&b2, &m).unwrap().0, ComplexPolynomial::from_ints(&[(0, 2), (1, 0)]));
    }

    #[test]
    fn laplace_control_passes() {
        let rep = laplace_neumann_control();
        assert_eq!(rep.remainders[0], ComplexPolynomial::from_ints(&[(0, 1)]));
        assert!(rep.condition_holds());
    }

    fn poly_strategy(max_len: usize) -> impl Strategy<Value = ComplexPolynomial> {
        prop::collection::vec(((-6i64..6), (-6i64..6)), 0..max_len).prop_map(|c| ComplexPolynomial::from_ints(&c))
    }

    proptest! {
        #[test]
        fn divmod_round_trip(p in poly_strategy(7), q in poly_strategy(4)) {
            prop_assume!(!q.is_zero());
            let (quot, rem) = poly_divmod(&p, &q).unwrap();
            prop_assert_eq!(q.mul(&quot).add(&rem), p);
            if let Some(dr) = rem.degree() {
                prop_assert!(dr < q.degree().unwrap());
            }
        }
    }
}
