use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bivariate polynomial `Σ c_ij x^i y^j` with exact rational coefficients.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), BigRational>,
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: BigRational, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((i, j), c);
        }
        p
    }

    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn coefficient(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigRational)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = Self::zero();
        for (i, j, v) in self.terms() {
            p.add_term(i, j, v * c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }

    pub fn dx(&self) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in self.terms().filter(|t| t.0 > 0) {
            p.add_term(i - 1, j, c * rational(i as i64));
        }
        p
    }

    pub fn dy(&self) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in self.terms().filter(|t| t.1 > 0) {
            p.add_term(i, j - 1, c * rational(j as i64));
        }
        p
    }

    pub fn laplacian(&self) -> Self {
        &self.dx().dx() + &self.dy().dy()
    }

    /// Restriction to the line `p0 + t·d`, as univariate coefficients in `t`
    /// (ascending powers, trailing zeros removed).
    pub fn restrict_to_line(&self, p0: [&BigRational; 2], d: [&BigRational; 2]) -> Vec<BigRational> {
        let deg = self.degree() as usize;
        let xt = vec![p0[0].clone(), d[0].clone()];
        let yt = vec![p0[1].clone(), d[1].clone()];
        let mut x_pows = vec![vec![BigRational::one()]];
        let mut y_pows = vec![vec![BigRational::one()]];
        for k in 0..deg {
            x_pows.push(poly1_mul(&x_pows[k], &xt));
            y_pows.push(poly1_mul(&y_pows[k], &yt));
        }
        let mut out = vec![BigRational::zero(); deg + 1];
        for (i, j, c) in self.terms() {
            let prod = poly1_mul(&x_pows[i as usize], &y_pows[j as usize]);
            for (k, v) in prod.into_iter().enumerate() {
                out[k] += c * v;
            }
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    /// Floating-point evaluator with coefficients converted once.
    pub fn evaluator(&self) -> Evaluator {
        Evaluator {
            terms: self
                .terms()
                .map(|(i, j, c)| (i as i32, j as i32, c.to_f64().expect("finite coefficient")))
                .collect(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.evaluator().eval(x, y)
    }
}

fn poly1_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, u) in a.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            out[i + j] += u * v;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Evaluator {
    terms: Vec<(i32, i32, f64)>,
}

impl Evaluator {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * x.powi(i) * y.powi(j)).sum()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (i, j, c) in rhs.terms() {
            p.add_term(i, j, c.clone());
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (i, j, c) in rhs.terms() {
            p.add_term(i, j, -c.clone());
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero();
        for (i, j, a) in self.terms() {
            for (k, l, b) in rhs.terms() {
                p.add_term(i + k, j + l, a * b);
            }
        }
        p
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl fmt::Display for Polynomial {
    /// Terms in graded-lexicographic order, highest degree first,
    /// e.g. `x^3 - 3*x*y^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<(u32, u32)> = self.terms.keys().copied().collect();
        keys.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.0.cmp(&a.0)));
        for (n, (i, j)) in keys.into_iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let neg = c.is_negative();
            let mag = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                factors.push(mag.to_string());
            }
            for (v, e) in [("x", i), ("y", j)] {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_and_laplacian() {
        let x = Polynomial::x();
        let y = Polynomial::y();
        let p = &x.pow(3) - &(&x * &y.pow(2)).scale(&rational(3));
        assert!(p.laplacian().is_zero());
        assert_eq!(p.dx(), &x.pow(2).scale(&rational(3)) - &y.pow(2).scale(&rational(3)));
        assert_eq!(p.to_string(), "x^3 - 3*x*y^2");
    }

    #[test]
    fn restriction_to_side() {
        // x(1-x) on y = 0 from (0,0) in direction (1,0) is t - t^2
        let x = Polynomial::x();
        let p = &x * &(&Polynomial::constant(rational(1)) - &x);
        let zero = rational(0);
        let one = rational(1);
        let r = p.restrict_to_line([&zero, &zero], [&one, &zero]);
        assert_eq!(r, vec![rational(0), rational(1), rational(-1)]);
        // vanishes on x = 0
        let r = p.restrict_to_line([&zero, &zero], [&zero, &one]);
        assert!(r.is_empty());
    }

    #[test]
    fn evaluation() {
        let p = &(&Polynomial::x() * &Polynomial::y()).scale(&ratio(1, 2)) + &Polynomial::constant(rational(2));
        assert!((p.eval(3.0, 4.0) - 8.0).abs() < 1e-15);
    }
}
