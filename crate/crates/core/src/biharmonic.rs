//! Neumann problem for the biharmonic operator,
//!
//! ```text
//! Δ²u = f in D,   Δu = g on ∂D,   ∇Δu·n = h on ∂D,
//! ```
//!
//! solved as the triangular cascade
//!
//! ```text
//! Δσ = f,  σ|∂D = g        (first Dirichlet solve)
//! Δs = σ,  s|∂D = 0        (second Dirichlet solve)
//! ```
//!
//! which returns the zero-trace member `s` of the solution family
//! `u + harmonic`. The datum `h` never enters the two solves: it is
//! determined by `(f, g)` through the compatibility conditions
//! `∫ f η + ∮ g ∂ₙη − ∮ h η = 0` for all harmonic `η`, and the diagnostics
//! here check exactly that, plus the recovered flux `∂ₙσ_h ≈ h` and the
//! residual of the weak form tested with `ω = Δr`, `r ∈ H²₀`.

use std::collections::HashSet;
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fem::{
    integrate_boundary, integrate_domain, quadrature::MAX_ORDER, segment_quadrature, triangle_quadrature,
    visit_quadrature, FeSpace, BOUNDARY_QUADRATURE_ORDER,
};
use crate::poisson::{DirichletSolver, ScalarField, Source};
use crate::sparse::CgOptions;
use crate::symbolic::{harmonic_basis, HarmonicPolynomial, Polynomial};

pub type DomainFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Boundary datum evaluated at `(x, y)` with the outward unit normal.
pub type BoundaryFn = Arc<dyn Fn(f64, f64, [f64; 2]) -> f64 + Send + Sync>;

/// Absolute compatibility residual above which a strict solve fails.
pub const DEFAULT_COMPAT_THRESHOLD: f64 = 1e-3;
/// Harmonics up to this degree are used as compatibility test functions.
pub const DEFAULT_HARMONIC_DEGREE: u32 = 3;

#[derive(Clone)]
pub struct NeumannProblem {
    pub f: DomainFn,
    pub g: DomainFn,
    pub h: BoundaryFn,
}

impl NeumannProblem {
    pub fn new(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        h: impl Fn(f64, f64, [f64; 2]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        NeumannProblem { f: Arc::new(f), g: Arc::new(g), h: Arc::new(h) }
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0, |_, _| 0.0, |_, _, _| 0.0)
    }

    /// Same `(f, g)` with `h` replaced by `h + c`.
    pub fn with_h_offset(&self, c: f64) -> Self {
        let h = self.h.clone();
        NeumannProblem { f: self.f.clone(), g: self.g.clone(), h: Arc::new(move |x, y, n| h(x, y, n) + c) }
    }
}

impl std::fmt::Debug for NeumannProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("NeumannProblem { f, g, h }")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeOptions {
    pub cg: CgOptions,
    pub harmonic_degree: u32,
    /// Fail with [`Error::Compatibility`] when some `|r(η)|` exceeds this.
    pub strict_threshold: Option<f64>,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        CascadeOptions { cg: CgOptions::default(), harmonic_degree: DEFAULT_HARMONIC_DEGREE, strict_threshold: None }
    }
}

#[derive(Debug, Clone)]
pub struct CompatResidual {
    pub label: String,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct CascadeDiagnostics {
    pub compat_residuals: Vec<CompatResidual>,
    /// `‖∂ₙσ_h − h‖_{L²(∂D)}` with the consistent flux of `σ_h`.
    pub flux_mismatch: f64,
    /// CG iterations of the two solves.
    pub cg_iterations: [usize; 2],
}

impl CascadeDiagnostics {
    pub fn compat_max(&self) -> f64 {
        self.compat_residuals.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct CascadeSolution<'a> {
    /// Approximates `σ = Δu`; boundary coefficients interpolate `g`.
    pub sigma_h: ScalarField<'a>,
    /// Zero-trace solution; boundary coefficients are exactly 0.
    pub s_h: ScalarField<'a>,
    pub diagnostics: CascadeDiagnostics,
}

pub fn solve_neumann<'a>(
    space: &'a FeSpace,
    problem: &NeumannProblem,
    options: &CascadeOptions,
) -> Result<CascadeSolution<'a>> {
    let basis = harmonic_basis(options.harmonic_degree);
    let residuals = compatibility_residual(space, problem, &basis)?;
    let compat_residuals: Vec<CompatResidual> = basis
        .iter()
        .zip(residuals)
        .map(|(eta, residual)| CompatResidual { label: eta.label().to_string(), residual })
        .collect();
    if let Some(threshold) = options.strict_threshold {
        let max_residual = compat_residuals.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
        if max_residual > threshold {
            return Err(Error::Compatibility { max_residual, threshold });
        }
    }

    let solver = DirichletSolver::new(space, options.cg);
    let f = problem.f.as_ref();
    let sigma = solver.solve(Source::Function(f), problem.g.as_ref())?;
    let s = solver.solve(Source::Field(&sigma.field), |_, _| 0.0)?;
    let flux = solver.normal_flux(&sigma.field, Source::Function(f))?;
    let flux_mismatch = flux.l2_distance(problem.h.as_ref());

    Ok(CascadeSolution {
        diagnostics: CascadeDiagnostics {
            compat_residuals,
            flux_mismatch,
            cg_iterations: [sigma.cg_iterations, s.cg_iterations],
        },
        sigma_h: sigma.field,
        s_h: s.field,
    })
}

/// `r(η) = ∫_D f η + ∮ g ∂ₙη − ∮ h η` for each harmonic `η`, by quadrature
/// on the mesh with `∂ₙη` from the exact gradient.
pub fn compatibility_residual(
    space: &FeSpace,
    problem: &NeumannProblem,
    basis: &[HarmonicPolynomial],
) -> Result<Vec<f64>> {
    let mesh = space.mesh();
    let vol = triangle_quadrature(MAX_ORDER)?;
    let seg = segment_quadrature(BOUNDARY_QUADRATURE_ORDER)?;
    Ok(basis
        .iter()
        .map(|eta| {
            let p = eta.polynomial();
            let (e, ex, ey) = (p.evaluator(), p.dx().evaluator(), p.dy().evaluator());
            let volume = integrate_domain(mesh, &vol, |x, y| (problem.f)(x, y) * e.eval(x, y));
            let boundary = integrate_boundary(mesh, &seg, |x, y, n| {
                let dn_eta = n[0] * ex.eval(x, y) + n[1] * ey.eval(x, y);
                (problem.g)(x, y) * dn_eta - (problem.h)(x, y, n) * e.eval(x, y)
            });
            volume + boundary
        })
        .collect())
}

/// `‖∂ₙσ_h − h‖_{L²(∂D)}` where `∂ₙσ_h` is the consistent flux of `σ_h`
/// as a solution of `Δσ = f`.
pub fn flux_mismatch(space: &FeSpace, solution: &CascadeSolution, problem: &NeumannProblem) -> Result<f64> {
    let solver = DirichletSolver::new(space, CgOptions::default());
    let flux = solver.normal_flux(&solution.sigma_h, Source::Function(problem.f.as_ref()))?;
    Ok(flux.l2_distance(problem.h.as_ref()))
}

/// Checks exactly that `r` and `∂ₙr` vanish identically on every boundary
/// edge line of the mesh.
pub fn check_h20(space: &FeSpace, r: &Polynomial) -> Result<()> {
    let mesh = space.mesh();
    let (rx, ry) = (r.dx(), r.dy());
    let mut lines = HashSet::new();
    for be in mesh.boundary_edges() {
        let a = mesh.vertices()[be.vertices[0]];
        let b = mesh.vertices()[be.vertices[1]];
        let n = mesh.outward_normal(be);
        let c = n[0] * a[0] + n[1] * a[1];
        if !lines.insert((n[0].to_bits(), n[1].to_bits(), c.to_bits())) {
            continue;
        }
        let exact = |v: f64| BigRational::from_float(v).expect("finite coordinate");
        let p0 = [exact(a[0]), exact(a[1])];
        let d = [exact(b[0] - a[0]), exact(b[1] - a[1])];
        if !r.restrict_to_line([&p0[0], &p0[1]], [&d[0], &d[1]]).is_empty() {
            return Err(Error::invalid(format!(
                "test polynomial {r} does not vanish on the boundary line through {a:?}, {b:?}"
            )));
        }
        // ∂ₙr up to a positive factor: (dy, −dx)·∇r
        let dn = &rx.scale(&d[1]) - &ry.scale(&d[0]);
        if !dn.is_zero() && !dn.restrict_to_line([&p0[0], &p0[1]], [&d[0], &d[1]]).is_empty() {
            return Err(Error::invalid(format!(
                "normal derivative of test polynomial {r} does not vanish on the boundary line through {a:?}, {b:?}"
            )));
        }
    }
    Ok(())
}

/// `|∫ σ_h Δ²r − ∫ f Δr − ∮ g ∂ₙ(Δr) + ∮ h Δr|` for a polynomial `r` with
/// zero trace and zero normal derivative.
pub fn weak_form_residual(
    space: &FeSpace,
    solution: &CascadeSolution,
    problem: &NeumannProblem,
    r: &Polynomial,
) -> Result<f64> {
    check_h20(space, r)?;
    let omega = r.laplacian();
    let omega_lap = omega.laplacian().evaluator();
    let (w, wx, wy) = (omega.evaluator(), omega.dx().evaluator(), omega.dy().evaluator());
    let vol = triangle_quadrature(MAX_ORDER)?;
    let seg = segment_quadrature(BOUNDARY_QUADRATURE_ORDER)?;

    let sigma = solution.sigma_h.coefficients();
    let mut bilinear = 0.0;
    visit_quadrature(space, &vol, |qp| {
        let s: f64 = qp.dofs.iter().zip(qp.phi).map(|(&d, &p)| sigma[d] * p).sum();
        bilinear += qp.weight * s * omega_lap.eval(qp.x[0], qp.x[1]);
    });
    let load = integrate_domain(space.mesh(), &vol, |x, y| (problem.f)(x, y) * w.eval(x, y));
    let boundary = integrate_boundary(space.mesh(), &seg, |x, y, n| {
        let dn = n[0] * wx.eval(x, y) + n[1] * wy.eval(x, y);
        (problem.g)(x, y) * dn - (problem.h)(x, y, n) * w.eval(x, y)
    });
    Ok((bilinear - load - boundary).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_square_mesh;
    use crate::symbolic::rational;

    fn space(n: usize) -> FeSpace {
        FeSpace::new(unit_square_mesh(n).unwrap(), 1).unwrap()
    }

    fn bubble() -> Polynomial {
        let x = Polynomial::x();
        let y = Polynomial::y();
        let one = Polynomial::constant(rational(1));
        let b = &(&x * &(&one - &x)) * &(&y * &(&one - &y));
        b.pow(2)
    }

    #[test]
    fn zero_problem_gives_zero_solution() {
        let s = space(6);
        let sol = solve_neumann(&s, &NeumannProblem::zero(), &CascadeOptions::default()).unwrap();
        assert!(sol.sigma_h.coefficients().iter().all(|&c| c == 0.0));
        assert!(sol.s_h.coefficients().iter().all(|&c| c == 0.0));
        assert_eq!(sol.diagnostics.flux_mismatch, 0.0);
        assert_eq!(sol.diagnostics.compat_max(), 0.0);
        assert_eq!(sol.diagnostics.compat_residuals.len(), 7);
        let r = weak_form_residual(&s, &sol, &NeumannProblem::zero(), &bubble()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn h20_check() {
        let s = space(4);
        assert!(check_h20(&s, &bubble()).is_ok());
        // x(1-x)y(1-y) has zero trace but nonzero normal derivative
        let x = Polynomial::x();
        let y = Polynomial::y();
        let one = Polynomial::constant(rational(1));
        let single = &(&x * &(&one - &x)) * &(&y * &(&one - &y));
        let err = check_h20(&s, &single).unwrap_err();
        assert!(err.to_string().contains("normal derivative"), "{err}");
        assert!(check_h20(&s, &x).is_err());
        let sol = solve_neumann(&s, &NeumannProblem::zero(), &CascadeOptions::default()).unwrap();
        assert!(matches!(
            weak_form_residual(&s, &sol, &NeumannProblem::zero(), &single),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn strict_mode_rejects_incompatible_data() {
        let s = space(4);
        // f = 1 with g = h = 0 violates the condition for η = 1 by |D|
        let p = NeumannProblem::new(|_, _| 1.0, |_, _| 0.0, |_, _, _| 0.0);
        let opts = CascadeOptions { strict_threshold: Some(DEFAULT_COMPAT_THRESHOLD), ..Default::default() };
        match solve_neumann(&s, &p, &opts) {
            Err(Error::Compatibility { max_residual, .. }) => assert!((max_residual - 1.0).abs() < 1e-12),
            other => panic!("expected compatibility error, got {other:?}"),
        }
        assert!(solve_neumann(&s, &p, &CascadeOptions::default()).is_ok());
    }

    #[test]
    fn boundary_coefficients() {
        let s = space(5);
        let p = NeumannProblem::new(|x, y| x + y, |x, y| 1.0 + x * y, |_, _, _| 0.0);
        let sol = solve_neumann(&s, &p, &CascadeOptions::default()).unwrap();
        for bd in s.boundary_dofs() {
            let [x, y] = s.dof_coordinates()[bd.dof];
            assert_eq!(sol.s_h.coefficients()[bd.dof], 0.0);
            assert_eq!(sol.sigma_h.coefficients()[bd.dof], 1.0 + x * y);
        }
    }
}
