//! Dirichlet Poisson solves `Δw = q, w = gb on ∂D`, variational recovery of
//! the normal flux `∂ₙw`, and the overdetermined Poisson diagnostics.
//!
//! Dirichlet data are imposed by eliminating the boundary dofs: the boundary
//! coefficients are set to the nodal interpolant of `gb` and the interior
//! block `K_II w_I = −b_I − K_IB w_B` is solved by conjugate gradients.

use std::cell::OnceCell;

use crate::error::{Error, Result};
use crate::fem::{
    assemble_boundary_mass, assemble_load, assemble_mass, assemble_stiffness, basis, segment_quadrature,
    visit_boundary_quadrature, FeSpace, BOUNDARY_QUADRATURE_ORDER,
};
use crate::mesh::{signed_area, Point};
use crate::sparse::{cg_solve, CgOptions, CsrMatrix, Preconditioner};

/// Finite-element function: a coefficient per dof of `space`.
#[derive(Debug, Clone)]
pub struct ScalarField<'a> {
    space: &'a FeSpace,
    coefficients: Vec<f64>,
}

impl<'a> ScalarField<'a> {
    pub fn new(space: &'a FeSpace, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != space.dof_count() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", space.dof_count()),
                actual: format!("{}", coefficients.len()),
            });
        }
        Ok(ScalarField { space, coefficients })
    }

    pub fn zero(space: &'a FeSpace) -> Self {
        ScalarField { space, coefficients: vec![0.0; space.dof_count()] }
    }

    pub fn interpolate(space: &'a FeSpace, f: impl Fn(f64, f64) -> f64) -> Self {
        ScalarField { space, coefficients: space.interpolate(f) }
    }

    pub fn space(&self) -> &'a FeSpace {
        self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Point evaluation; `None` outside the mesh.
    pub fn evaluate(&self, p: Point) -> Option<f64> {
        let mesh = self.space.mesh();
        let t = mesh.locate(p)?;
        let [a, b, c] = mesh.triangle_points(t);
        let area = signed_area(a, b, c);
        let l = [signed_area(p, b, c) / area, signed_area(a, p, c) / area, signed_area(a, b, p) / area];
        let phi = basis::values(self.space.degree(), l);
        Some(self.space.element_dofs(t).iter().zip(&phi).map(|(&d, &v)| self.coefficients[d] * v).sum())
    }
}

/// Right-hand side `q` of `Δw = q`.
#[derive(Clone, Copy)]
pub enum Source<'s> {
    Zero,
    Function(&'s dyn Fn(f64, f64) -> f64),
    /// A finite-element function on the same space as the solve.
    Field(&'s ScalarField<'s>),
}

/// Consistent normal flux on the boundary dofs.
///
/// `functional[k] = ⟨∂ₙw, φ_k⟩ = ∫∇w_h·∇φ_k + ∫ q φ_k` for the `k`-th
/// boundary dof; `projected` is its L²(∂D) projection onto the boundary trace
/// space, i.e. the solution of `M_∂ θ = functional`.
#[derive(Debug, Clone)]
pub struct BoundaryFlux<'a> {
    space: &'a FeSpace,
    functional: Vec<f64>,
    projected: Vec<f64>,
}

impl<'a> BoundaryFlux<'a> {
    pub fn functional(&self) -> &[f64] {
        &self.functional
    }

    pub fn projected(&self) -> &[f64] {
        &self.projected
    }

    /// `∮ ∂ₙw`, i.e. the functional tested against the constant 1.
    pub fn total(&self) -> f64 {
        self.functional.iter().sum()
    }

    /// Boundary L² norm of the projected flux.
    pub fn l2_norm(&self) -> f64 {
        self.l2_distance(|_, _, _| 0.0)
    }

    /// `‖θ_h − h‖_{L²(∂D)}` for a boundary function `h(x, y, n)`.
    pub fn l2_distance(&self, h: impl Fn(f64, f64, [f64; 2]) -> f64) -> f64 {
        let rule = segment_quadrature(BOUNDARY_QUADRATURE_ORDER).expect("supported order");
        let mut sum = 0.0;
        visit_boundary_quadrature(self.space, &rule, |bq| {
            let theta: f64 = bq
                .dofs
                .iter()
                .zip(bq.phi)
                .map(|(&d, &p)| self.projected[self.space.boundary_slot(d).expect("boundary dof")] * p)
                .sum();
            let diff = theta - h(bq.x[0], bq.x[1], bq.normal);
            sum += bq.weight * diff * diff;
        });
        sum.sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct DirichletSolution<'a> {
    pub field: ScalarField<'a>,
    pub cg_iterations: usize,
}

/// Reusable Dirichlet solver for one space: assembles the stiffness matrix and
/// its interior block once.
pub struct DirichletSolver<'a> {
    space: &'a FeSpace,
    stiffness: CsrMatrix,
    interior_block: CsrMatrix,
    interior_slot: Vec<Option<usize>>,
    interior_dofs: Vec<usize>,
    mass: OnceCell<CsrMatrix>,
    boundary_mass: OnceCell<CsrMatrix>,
    options: CgOptions,
}

impl<'a> DirichletSolver<'a> {
    pub fn new(space: &'a FeSpace, options: CgOptions) -> Self {
        let stiffness = assemble_stiffness(space);
        let interior_dofs: Vec<usize> = (0..space.dof_count()).filter(|&d| !space.is_boundary(d)).collect();
        let mut interior_slot = vec![None; space.dof_count()];
        for (k, &d) in interior_dofs.iter().enumerate() {
            interior_slot[d] = Some(k);
        }
        let interior_block = stiffness.restrict(&interior_slot, interior_dofs.len());
        DirichletSolver {
            space,
            stiffness,
            interior_block,
            interior_slot,
            interior_dofs,
            mass: OnceCell::new(),
            boundary_mass: OnceCell::new(),
            options,
        }
    }

    pub fn space(&self) -> &'a FeSpace {
        self.space
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &CsrMatrix {
        self.mass.get_or_init(|| assemble_mass(self.space))
    }

    /// `b_i = ∫ q φ_i`
    pub fn load(&self, source: Source) -> Result<Vec<f64>> {
        match source {
            Source::Zero => Ok(vec![0.0; self.space.dof_count()]),
            Source::Function(q) => Ok(assemble_load(self.space, q)),
            Source::Field(field) => {
                if !std::ptr::eq(field.space(), self.space) {
                    return Err(Error::invalid("source field lives on a different space"));
                }
                self.mass().matvec(field.coefficients())
            }
        }
    }

    /// Solves `Δw = q` with `w = trace` at the boundary dofs.
    pub fn solve(&self, source: Source, trace: impl Fn(f64, f64) -> f64) -> Result<DirichletSolution<'a>> {
        let load = self.load(source)?;
        let mut w = vec![0.0; self.space.dof_count()];
        for bd in self.space.boundary_dofs() {
            let [x, y] = self.space.dof_coordinates()[bd.dof];
            w[bd.dof] = trace(x, y);
        }
        let lifted = self.stiffness.matvec(&w)?;
        // ∫∇w·∇v = −∫ q v  on interior test functions
        let rhs: Vec<f64> = self.interior_dofs.iter().map(|&d| -load[d] - lifted[d]).collect();
        let mut iterations = 0;
        if !rhs.is_empty() {
            let (wi, report) = cg_solve(&self.interior_block, &rhs, &self.options)?;
            iterations = report.iterations;
            for (&d, v) in self.interior_dofs.iter().zip(wi) {
                w[d] = v;
            }
        }
        Ok(DirichletSolution { field: ScalarField { space: self.space, coefficients: w }, cg_iterations: iterations })
    }

    /// Residual `∫∇w·∇φ_i + ∫ q φ_i` for every dof. Interior entries vanish
    /// up to solver tolerance for a solution of `Δw = q`.
    pub fn residual(&self, field: &ScalarField, source: Source) -> Result<Vec<f64>> {
        let mut r = self.stiffness.matvec(field.coefficients())?;
        for (ri, bi) in r.iter_mut().zip(self.load(source)?) {
            *ri += bi;
        }
        Ok(r)
    }

    /// Interior entries of [`DirichletSolver::residual`].
    pub fn interior_residual(&self, field: &ScalarField, source: Source) -> Result<Vec<f64>> {
        let r = self.residual(field, source)?;
        Ok(self.interior_dofs.iter().map(|&d| r[d]).collect())
    }

    /// Consistent normal flux of `field`, a solution of `Δw = q`.
    pub fn normal_flux(&self, field: &ScalarField, source: Source) -> Result<BoundaryFlux<'a>> {
        let r = self.residual(field, source)?;
        let functional: Vec<f64> = self.space.boundary_dofs().iter().map(|bd| r[bd.dof]).collect();
        let mb = self.boundary_mass.get_or_init(|| assemble_boundary_mass(self.space));
        let opts = CgOptions { rel_tol: 1e-13, max_iter: None, preconditioner: Preconditioner::Jacobi };
        let (projected, _) = cg_solve(mb, &functional, &opts)?;
        Ok(BoundaryFlux { space: self.space, functional, projected })
    }

    pub fn is_interior(&self, dof: usize) -> bool {
        self.interior_slot[dof].is_some()
    }
}

pub fn solve_dirichlet<'a>(
    space: &'a FeSpace,
    source: Source,
    trace: impl Fn(f64, f64) -> f64,
    options: &CgOptions,
) -> Result<DirichletSolution<'a>> {
    DirichletSolver::new(space, *options).solve(source, trace)
}

pub fn normal_flux<'a>(space: &'a FeSpace, field: &ScalarField, source: Source) -> Result<BoundaryFlux<'a>> {
    DirichletSolver::new(space, CgOptions::default()).normal_flux(field, source)
}

/// Result of the solve-then-check route for `ΔU = p, U = 0, ∂ₙU = 0`.
#[derive(Debug, Clone)]
pub struct OverdeterminedReport<'a> {
    pub u: ScalarField<'a>,
    /// `‖∂ₙU_h‖_{L²(∂D)}` of the projected flux; small when `p ⊥ harmonics`.
    pub flux_l2: f64,
    /// `∮ ∂ₙU_h = ∫ p` up to solver tolerance.
    pub total_flux: f64,
    pub cg_iterations: usize,
}

/// Solves `ΔU = p, U|∂D = 0` and measures how far the second boundary
/// condition `∂ₙU = 0` is from holding.
pub fn overdetermined_check<'a>(
    space: &'a FeSpace,
    p: &dyn Fn(f64, f64) -> f64,
    options: &CgOptions,
) -> Result<OverdeterminedReport<'a>> {
    let solver = DirichletSolver::new(space, *options);
    overdetermined_with(&solver, p)
}

fn overdetermined_with<'a>(
    solver: &DirichletSolver<'a>,
    p: &dyn Fn(f64, f64) -> f64,
) -> Result<OverdeterminedReport<'a>> {
    let sol = solver.solve(Source::Function(p), |_, _| 0.0)?;
    let flux = solver.normal_flux(&sol.field, Source::Function(p))?;
    Ok(OverdeterminedReport {
        flux_l2: flux.l2_norm(),
        total_flux: flux.total(),
        u: sol.field,
        cg_iterations: sol.cg_iterations,
    })
}

#[derive(Debug, Clone)]
pub struct FourthOrderReport<'a> {
    pub u: ScalarField<'a>,
    pub v: ScalarField<'a>,
    /// `‖U_h‖_{L²(∂D)}`, the trace of `ΔV ≈ U`; zero by construction.
    pub laplacian_trace_l2: f64,
    /// `‖∂ₙU_h‖_{L²(∂D)}`, approximating `∇ΔV·n` on ∂D.
    pub flux_l2: f64,
    pub total_flux: f64,
    pub cg_iterations: usize,
}

/// Cascade for `Δ²V = p, V = ΔV = ∇ΔV·n = 0` on ∂D: `U_h` from
/// [`overdetermined_check`], then `ΔV = U_h, V|∂D = 0`.
pub fn overdetermined_fourth<'a>(
    space: &'a FeSpace,
    p: &dyn Fn(f64, f64) -> f64,
    options: &CgOptions,
) -> Result<FourthOrderReport<'a>> {
    let solver = DirichletSolver::new(space, *options);
    let first = overdetermined_with(&solver, p)?;
    let second = solver.solve(Source::Field(&first.u), |_, _| 0.0)?;
    let rule = segment_quadrature(BOUNDARY_QUADRATURE_ORDER)?;
    let mut trace = 0.0;
    visit_boundary_quadrature(space, &rule, |bq| {
        let u: f64 = bq.dofs.iter().zip(bq.phi).map(|(&d, &p)| first.u.coefficients()[d] * p).sum();
        trace += bq.weight * u * u;
    });
    Ok(FourthOrderReport {
        laplacian_trace_l2: trace.sqrt(),
        flux_l2: first.flux_l2,
        total_flux: first.total_flux,
        cg_iterations: first.cg_iterations + second.cg_iterations,
        v: second.field,
        u: first.u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{unit_disk_mesh, unit_square_mesh};

    fn square(n: usize, degree: usize) -> FeSpace {
        FeSpace::new(unit_square_mesh(n).unwrap(), degree).unwrap()
    }

    #[test]
    fn constants_are_reproduced() {
        for degree in [1, 2] {
            let s = square(6, degree);
            let sol = solve_dirichlet(&s, Source::Zero, |_, _| 1.0, &CgOptions::default()).unwrap();
            assert!(sol.field.coefficients().iter().all(|&c| (c - 1.0).abs() < 1e-12));
            let flux = normal_flux(&s, &sol.field, Source::Zero).unwrap();
            assert!(flux.functional().iter().all(|t| t.abs() < 1e-12));
            assert!(flux.l2_norm() < 1e-11);
        }
    }

    #[test]
    fn linear_functions_are_exact_and_flux_is_normal_derivative() {
        // w = 2x - y + 3 is discretely harmonic; ∂ₙw = (2, -1)·n
        let s = square(5, 1);
        let w = |x: f64, y: f64| 2.0 * x - y + 3.0;
        let solver = DirichletSolver::new(&s, CgOptions::default());
        let sol = solver.solve(Source::Zero, w).unwrap();
        for (c, p) in sol.field.coefficients().iter().zip(s.dof_coordinates()) {
            assert!((c - w(p[0], p[1])).abs() < 1e-9);
        }
        let flux = solver.normal_flux(&sol.field, Source::Zero).unwrap();
        // corner dofs see two normals, so the projection is only close in L²
        let err = flux.l2_distance(|_, _, n| 2.0 * n[0] - n[1]);
        assert!(err < 1.0, "{err}");
        assert!(flux.total().abs() < 1e-9);
    }

    #[test]
    fn total_flux_equals_source_integral() {
        for mesh in [unit_square_mesh(8).unwrap(), unit_disk_mesh(5).unwrap()] {
            let area = mesh.area();
            let s = FeSpace::new(mesh, 1).unwrap();
            let rep = overdetermined_check(&s, &|_, _| 1.0, &CgOptions::default()).unwrap();
            assert!((rep.total_flux - area).abs() < 1e-9, "{}", rep.total_flux);
        }
    }

    #[test]
    fn galerkin_orthogonality() {
        let s = square(10, 2);
        let q = |x: f64, y: f64| (x * y).exp();
        let solver = DirichletSolver::new(&s, CgOptions::default());
        let sol = solver.solve(Source::Function(&q), |x, _| x * x).unwrap();
        let r = solver.interior_residual(&sol.field, Source::Function(&q)).unwrap();
        let b = solver.load(Source::Function(&q)).unwrap();
        let rn = crate::sparse::norm2(&r);
        assert!(rn <= 1e-9 * crate::sparse::norm2(&b).max(1.0), "{rn:e}");
    }

    #[test]
    fn field_source_must_share_space() {
        let a = square(2, 1);
        let b = square(2, 1);
        let f = ScalarField::zero(&a);
        let solver = DirichletSolver::new(&b, CgOptions::default());
        assert!(solver.load(Source::Field(&f)).is_err());
    }

    #[test]
    fn zero_data_fourth_order() {
        let s = square(4, 1);
        let rep = overdetermined_fourth(&s, &|_, _| 0.0, &CgOptions::default()).unwrap();
        assert!(rep.v.coefficients().iter().all(|&c| c == 0.0));
        assert_eq!(rep.flux_l2, 0.0);
    }

    #[test]
    fn evaluate_matches_interpolated_quadratic() {
        let s = square(3, 2);
        let f = |x: f64, y: f64| 1.0 + x - 2.0 * y + x * y + 3.0 * y * y;
        let field = ScalarField::interpolate(&s, f);
        for p in [[0.1, 0.2], [0.5, 0.5], [0.93, 0.41], [1.0, 1.0]] {
            assert!((field.evaluate(p).unwrap() - f(p[0], p[1])).abs() < 1e-13);
        }
        assert!(field.evaluate([2.0, 0.0]).is_none());
    }
}
