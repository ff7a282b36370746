use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Polynomial with identically zero Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPolynomial {
    label: String,
    poly: Polynomial,
}

impl HarmonicPolynomial {
    pub fn new(label: impl Into<String>, poly: Polynomial) -> Result<Self> {
        if !poly.laplacian().is_zero() {
            return Err(Error::invalid(format!("{poly} is not harmonic")));
        }
        Ok(HarmonicPolynomial { label: label.into(), poly })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }
}

/// `{1} ∪ {Re (x+iy)^k, Im (x+iy)^k : 1 ≤ k ≤ kmax}`, in that order.
pub fn harmonic_basis(kmax: u32) -> Vec<HarmonicPolynomial> {
    let one = Polynomial::constant(super::rational(1));
    let mut basis = vec![HarmonicPolynomial::new("1", one.clone()).expect("constant")];
    let (mut re, mut im) = (one, Polynomial::zero());
    let (x, y) = (Polynomial::x(), Polynomial::y());
    for k in 1..=kmax {
        // (re + i im)(x + i y)
        let next_re = &(&re * &x) - &(&im * &y);
        let next_im = &(&re * &y) + &(&im * &x);
        re = next_re;
        im = next_im;
        basis.push(HarmonicPolynomial::new(format!("Re(x+iy)^{k}"), re.clone()).expect("harmonic by construction"));
        basis.push(HarmonicPolynomial::new(format!("Im(x+iy)^{k}"), im.clone()).expect("harmonic by construction"));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::rational;

    #[test]
    fn low_degree_basis() {
        let b = harmonic_basis(1);
        let polys: Vec<String> = b.iter().map(|h| h.polynomial().to_string()).collect();
        assert_eq!(polys, vec!["1", "x", "y"]);
        let b = harmonic_basis(2);
        assert_eq!(b.len(), 5);
        assert_eq!(b[3].polynomial().to_string(), "x^2 - y^2");
        assert_eq!(b[4].polynomial().to_string(), "2*x*y");
        assert_eq!(harmonic_basis(0).len(), 1);
    }

    #[test]
    fn every_element_is_harmonic() {
        for h in harmonic_basis(6) {
            assert!(h.polynomial().laplacian().is_zero(), "{}", h.label());
        }
        let cubic = harmonic_basis(3)[5].polynomial().clone();
        assert_eq!(cubic.to_string(), "x^3 - 3*x*y^2");
    }

    #[test]
    fn rejects_non_harmonic() {
        let p = Polynomial::x().pow(2);
        assert!(HarmonicPolynomial::new("x^2", p).is_err());
        assert!(HarmonicPolynomial::new("c", Polynomial::constant(rational(4))).is_ok());
    }
}
