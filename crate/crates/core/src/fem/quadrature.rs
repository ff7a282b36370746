//! Symmetric quadrature on the reference triangle and Gauss–Legendre rules on
//! the unit segment. Points are barycentric; weights are reference-measure
//! weights (they sum to 1/2 on the triangle and to 1 on the segment).

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

pub type TriangleRule = QuadratureRule<3>;
pub type SegmentRule = QuadratureRule<2>;

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::invalid(format!("quadrature order {order} not supported (1..={MAX_ORDER})")));
    }
    Ok(())
}

struct TriangleBuilder {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl TriangleBuilder {
    fn new() -> Self {
        Self { points: Vec::new(), weights: Vec::new() }
    }

    /// `w` is the weight relative to the triangle area.
    fn centroid(mut self, w: f64) -> Self {
        let third = 1.0 / 3.0;
        self.points.push([third, third, third]);
        self.weights.push(0.5 * w);
        self
    }

    fn orbit3(mut self, a: f64, w: f64) -> Self {
        let b = 1.0 - 2.0 * a;
        for p in [[a, a, b], [a, b, a], [b, a, a]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
        self
    }

    fn orbit6(mut self, a: f64, b: f64, w: f64) -> Self {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [b, a, c], [a, c, b], [c, a, b], [b, c, a], [c, b, a]] {
            self.points.push(p);
            self.weights.push(0.5 * w);
        }
        self
    }

    fn build(self) -> TriangleRule {
        QuadratureRule { points: self.points, weights: self.weights }
    }
}

/// Rule exact for polynomials of total degree `order` on the reference
/// triangle. All weights are positive.
pub fn triangle_quadrature(order: usize) -> Result<TriangleRule> {
    check_order(order)?;
    let rule = match order {
        1 => TriangleBuilder::new().centroid(1.0),
        2 => TriangleBuilder::new().orbit3(1.0 / 6.0, 1.0 / 3.0),
        // 7-point degree-5 rule in closed form
        3..=5 => {
            let s15 = 15f64.sqrt();
            TriangleBuilder::new()
                .centroid(9.0 / 40.0)
                .orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0)
                .orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0)
        }
        // 12-point degree-6 rule
        _ => TriangleBuilder::new()
            .orbit3(0.063_089_014_491_502_23, 0.050_844_906_370_206_82)
            .orbit3(0.249_286_745_170_910_43, 0.116_786_275_726_379_37)
            .orbit6(0.053_145_049_844_816_945, 0.310_352_451_033_784_4, 0.082_851_075_618_373_57),
    };
    Ok(rule.build())
}

/// Gauss–Legendre rule on `[0,1]` exact to degree `order`.
pub fn segment_quadrature(order: usize) -> Result<SegmentRule> {
    check_order(order)?;
    // nodes and weights on [-1, 1]
    let (nodes, weights): (Vec<f64>, Vec<f64>) = match order / 2 + 1 {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let x = 1.0 / 3f64.sqrt();
            (vec![-x, x], vec![1.0, 1.0])
        }
        3 => {
            let x = (3.0f64 / 5.0).sqrt();
            (vec![-x, 0.0, x], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        _ => {
            let r = 2.0 / 7.0 * (6.0f64 / 5.0).sqrt();
            let inner = (3.0 / 7.0 - r).sqrt();
            let outer = (3.0 / 7.0 + r).sqrt();
            let s30 = 30f64.sqrt();
            let wi = (18.0 + s30) / 36.0;
            let wo = (18.0 - s30) / 36.0;
            (vec![-outer, -inner, inner, outer], vec![wo, wi, wi, wo])
        }
    };
    Ok(QuadratureRule {
        points: nodes
            .iter()
            .map(|&x| {
                let t = 0.5 * (x + 1.0);
                [1.0 - t, t]
            })
            .collect(),
        weights: weights.iter().map(|w| 0.5 * w).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!
    fn monomial_exact(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn integrate(rule: &TriangleRule, a: i32, b: i32) -> f64 {
        rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[1].powi(a) * p[2].powi(b)).sum()
    }

    #[test]
    fn triangle_rules_exact_to_order() {
        for order in 1..=MAX_ORDER {
            let rule = triangle_quadrature(order).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for p in &rule.points {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
                assert!(p.iter().all(|&l| l > 0.0));
            }
            for deg in 0..=order as u32 {
                for a in 0..=deg {
                    let b = deg - a;
                    let err = integrate(&rule, a as i32, b as i32) - monomial_exact(a, b);
                    assert!(err.abs() < 1e-15, "order {order} x^{a} y^{b}: {err:e}");
                }
            }
        }
    }

    #[test]
    fn reference_values() {
        let rule = triangle_quadrature(1).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
        let rule = triangle_quadrature(4).unwrap();
        assert!((integrate(&rule, 2, 2) - 1.0 / 180.0).abs() < 1e-14);
        let seg = segment_quadrature(5).unwrap();
        let v: f64 = seg.points.iter().zip(&seg.weights).map(|(p, w)| w * p[1].powi(5)).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn segment_rules_exact_to_order() {
        for order in 1..=MAX_ORDER {
            let rule = segment_quadrature(order).unwrap();
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            for k in 0..=order as i32 {
                let v: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[1].powi(k)).sum();
                assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-15, "order {order} t^{k}");
            }
        }
    }

    #[test]
    fn unsupported_orders() {
        assert!(triangle_quadrature(0).is_err());
        assert!(triangle_quadrature(7).is_err());
        assert!(segment_quadrature(0).is_err());
        assert!(segment_quadrature(7).is_err());
    }
}
