//! Manufactured solutions on the unit square and error norms against them.
//!
//! Each case starts from a zero-trace `u` and derives `σ = Δu`, `f = Δσ`,
//! `g = σ|∂D` and `h = ∇σ·n`, so the data satisfy the compatibility
//! conditions by construction and the cascade should reproduce `σ` and `u`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::biharmonic::{BoundaryFn, DomainFn, NeumannProblem};
use crate::error::{Error, Result};
use crate::fem::{quadrature::MAX_ORDER, triangle_quadrature, visit_quadrature, FeSpace};
use crate::mesh::DomainTag;
use crate::poisson::ScalarField;
use crate::symbolic::{rational, Polynomial};

pub type GradientFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub domain: DomainTag,
    pub u: DomainFn,
    pub u_grad: GradientFn,
    pub sigma: DomainFn,
    pub sigma_grad: GradientFn,
    pub f: DomainFn,
    pub g: DomainFn,
    pub h: BoundaryFn,
}

impl ManufacturedCase {
    pub fn problem(&self) -> NeumannProblem {
        NeumannProblem { f: self.f.clone(), g: self.g.clone(), h: self.h.clone() }
    }
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).field("domain", &self.domain).finish()
    }
}

pub const CASE_NAMES: [&str; 2] = ["sine", "bubble"];

pub fn case_by_name(name: &str) -> Result<ManufacturedCase> {
    match name {
        "sine" => Ok(case_sine()),
        "bubble" => Ok(case_bubble()),
        _ => Err(Error::invalid(format!("unknown case '{name}' (expected one of {})", CASE_NAMES.join(", ")))),
    }
}

/// `u = sin πx sin πy`: `σ = −2π²u`, `f = 4π⁴u`, `g = 0`.
pub fn case_sine() -> ManufacturedCase {
    let pi2 = PI * PI;
    let u = |x: f64, y: f64| (PI * x).sin() * (PI * y).sin();
    let u_grad = |x: f64, y: f64| [PI * (PI * x).cos() * (PI * y).sin(), PI * (PI * x).sin() * (PI * y).cos()];
    ManufacturedCase {
        name: "sine",
        domain: DomainTag::UnitSquare,
        u: Arc::new(u),
        u_grad: Arc::new(u_grad),
        sigma: Arc::new(move |x, y| -2.0 * pi2 * u(x, y)),
        sigma_grad: Arc::new(move |x, y| {
            let g = u_grad(x, y);
            [-2.0 * pi2 * g[0], -2.0 * pi2 * g[1]]
        }),
        f: Arc::new(move |x, y| 4.0 * pi2 * pi2 * u(x, y)),
        g: Arc::new(|_, _| 0.0),
        h: Arc::new(move |x, y, n| {
            let g = u_grad(x, y);
            -2.0 * pi2 * (g[0] * n[0] + g[1] * n[1])
        }),
    }
}

/// `(x(1−x) y(1−y))²`, which vanishes with its gradient on the square's boundary.
pub fn squared_bubble() -> Polynomial {
    let one = Polynomial::constant(rational(1));
    let x = Polynomial::x();
    let y = Polynomial::y();
    (&(&x * &(&one - &x)) * &(&y * &(&one - &y))).pow(2)
}

fn gradient(p: &Polynomial) -> GradientFn {
    let (px, py) = (p.dx().evaluator(), p.dy().evaluator());
    Arc::new(move |x, y| [px.eval(x, y), py.eval(x, y)])
}

fn scalar(p: &Polynomial) -> DomainFn {
    let e = p.evaluator();
    Arc::new(move |x, y| e.eval(x, y))
}

/// `u = (x(1−x) y(1−y))²` with all derived data computed symbolically.
pub fn case_bubble() -> ManufacturedCase {
    let u = squared_bubble();
    let sigma = u.laplacian();
    let f = sigma.laplacian();
    let sigma_grad = gradient(&sigma);
    let sg = sigma_grad.clone();
    ManufacturedCase {
        name: "bubble",
        domain: DomainTag::UnitSquare,
        u: scalar(&u),
        u_grad: gradient(&u),
        sigma: scalar(&sigma),
        sigma_grad,
        f: scalar(&f),
        g: scalar(&sigma),
        h: Arc::new(move |x, y, n| {
            let g = sg(x, y);
            g[0] * n[0] + g[1] * n[1]
        }),
    }
}

/// `‖w_h − w‖_{L²(D)}`.
pub fn l2_error(field: &ScalarField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let rule = triangle_quadrature(MAX_ORDER).expect("supported order");
    let c = field.coefficients();
    let mut sum = 0.0;
    visit_quadrature(field.space(), &rule, |qp| {
        let wh: f64 = qp.dofs.iter().zip(qp.phi).map(|(&d, &p)| c[d] * p).sum();
        let diff = wh - exact(qp.x[0], qp.x[1]);
        sum += qp.weight * diff * diff;
    });
    sum.sqrt()
}

/// `|w_h − w|_{H¹(D)}`, the gradient part of the H¹ error.
pub fn h1_seminorm_error(field: &ScalarField, exact_grad: impl Fn(f64, f64) -> [f64; 2]) -> f64 {
    let rule = triangle_quadrature(MAX_ORDER).expect("supported order");
    let c = field.coefficients();
    let mut sum = 0.0;
    visit_quadrature(field.space(), &rule, |qp| {
        let mut g = [0.0; 2];
        for (&d, gr) in qp.dofs.iter().zip(qp.grad) {
            g[0] += c[d] * gr[0];
            g[1] += c[d] * gr[1];
        }
        let e = exact_grad(qp.x[0], qp.x[1]);
        sum += qp.weight * ((g[0] - e[0]).powi(2) + (g[1] - e[1]).powi(2));
    });
    sum.sqrt()
}

/// Full `‖w_h − w‖_{H¹(D)}`.
pub fn h1_error(
    field: &ScalarField,
    exact: impl Fn(f64, f64) -> f64,
    exact_grad: impl Fn(f64, f64) -> [f64; 2],
) -> f64 {
    l2_error(field, exact).hypot(h1_seminorm_error(field, exact_grad))
}

/// Interpolates `exact` on `space`; handy as a reference field.
pub fn interpolant<'a>(space: &'a FeSpace, exact: impl Fn(f64, f64) -> f64) -> ScalarField<'a> {
    ScalarField::interpolate(space, exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{integrate_boundary, integrate_domain, segment_quadrature, BOUNDARY_QUADRATURE_ORDER};
    use crate::mesh::unit_square_mesh;

    #[test]
    fn sine_data() {
        let c = case_sine();
        assert!(((c.f)(0.5, 0.5) - 4.0 * PI.powi(4)).abs() < 1e-10);
        assert_eq!((c.g)(0.3, 0.0), 0.0);
        // h = 2π³ (sin πx + sin πy) on every side
        for (x, y, n) in
            [(0.3, 0.0, [0.0, -1.0]), (1.0, 0.7, [1.0, 0.0]), (0.2, 1.0, [0.0, 1.0]), (0.0, 0.4, [-1.0, 0.0])]
        {
            let want = 2.0 * PI.powi(3) * ((PI * x).sin() + (PI * y).sin());
            assert!(((c.h)(x, y, n) - want).abs() < 1e-9, "{x} {y}");
        }
    }

    #[test]
    fn sine_integrals() {
        let mesh = unit_square_mesh(32).unwrap();
        let c = case_sine();
        let vol = triangle_quadrature(MAX_ORDER).unwrap();
        let seg = segment_quadrature(BOUNDARY_QUADRATURE_ORDER).unwrap();
        let f_total = integrate_domain(&mesh, &vol, |x, y| (c.f)(x, y));
        let h_total = integrate_boundary(&mesh, &seg, |x, y, n| (c.h)(x, y, n));
        let want = 16.0 * PI * PI;
        assert!((f_total - want).abs() < 1e-5 * want, "{f_total}");
        assert!((h_total - want).abs() < 1e-5 * want, "{h_total}");
    }

    #[test]
    fn bubble_data() {
        let c = case_bubble();
        assert!(((c.g)(0.5, 0.0) - 0.125).abs() < 1e-15);
        assert!((c.u)(0.5, 0.5) - 1.0 / 256.0 < 1e-15);
        let u = squared_bubble();
        let sigma = u.laplacian();
        // Δu = [2(1−2x)² − 4a]b² + a²[2(1−2y)² − 4b], a = x(1−x), b = y(1−y)
        for (x, y) in [(0.1f64, 0.7f64), (0.5, 0.5), (0.9, 0.2)] {
            let (a, b) = (x * (1.0 - x), y * (1.0 - y));
            let want =
                (2.0 * (1.0 - 2.0 * x).powi(2) - 4.0 * a) * b * b + a * a * (2.0 * (1.0 - 2.0 * y).powi(2) - 4.0 * b);
            assert!((sigma.eval(x, y) - want).abs() < 1e-14);
            assert!(((c.sigma)(x, y) - want).abs() < 1e-14);
        }
        assert_eq!(sigma.laplacian().degree(), 4);
    }

    #[test]
    fn interpolation_error_is_small() {
        let space = FeSpace::new(unit_square_mesh(16).unwrap(), 2).unwrap();
        let c = case_sine();
        let w = interpolant(&space, |x, y| (c.u)(x, y));
        assert!(l2_error(&w, |x, y| (c.u)(x, y)) < 1e-3);
        assert!(h1_seminorm_error(&w, |x, y| (c.u_grad)(x, y)) < 2e-2);
        let zero = ScalarField::zero(&space);
        assert!((l2_error(&zero, |x, y| (c.u)(x, y)) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn unknown_case() {
        assert!(case_by_name("sine").is_ok());
        assert!(matches!(case_by_name("cone"), Err(Error::InvalidArgument(_))));
    }
}
