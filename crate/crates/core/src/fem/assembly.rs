use super::basis;
use super::quadrature::{SegmentRule, TriangleRule};
use super::FeSpace;
use crate::mesh::{Mesh, Point};
use crate::sparse::CsrMatrix;

/// One volume quadrature point with physical basis data of its element.
pub struct QuadPoint<'a> {
    pub element: usize,
    pub x: Point,
    /// Physical weight (reference weight times |det J|).
    pub weight: f64,
    pub dofs: &'a [usize],
    pub phi: &'a [f64],
    pub grad: &'a [[f64; 2]],
}

/// One boundary quadrature point with the edge trace of the basis.
pub struct BoundaryQuadPoint<'a> {
    /// Index into `mesh.boundary_edges()`.
    pub edge: usize,
    pub marker: u32,
    pub x: Point,
    pub normal: [f64; 2],
    pub weight: f64,
    pub dofs: &'a [usize],
    pub phi: &'a [f64],
}

fn map_point(p: &[Point; 3], l: [f64; 3]) -> Point {
    [l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0], l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1]]
}

pub fn visit_quadrature(space: &FeSpace, rule: &TriangleRule, mut f: impl FnMut(&QuadPoint)) {
    let degree = space.degree();
    let ref_values: Vec<Vec<f64>> = rule.points.iter().map(|&l| basis::values(degree, l)).collect();
    let ref_grads: Vec<Vec<[f64; 2]>> = rule.points.iter().map(|&l| basis::gradients(degree, l)).collect();
    let mut grad = vec![[0.0; 2]; space.local_dofs()];

    for t in 0..space.mesh().triangles().len() {
        let p = space.mesh().triangle_points(t);
        // J = [p1 - p0 | p2 - p0]
        let j00 = p[1][0] - p[0][0];
        let j01 = p[2][0] - p[0][0];
        let j10 = p[1][1] - p[0][1];
        let j11 = p[2][1] - p[0][1];
        let det = j00 * j11 - j01 * j10;
        let dofs = space.element_dofs(t);
        for (q, &l) in rule.points.iter().enumerate() {
            for (g, rg) in grad.iter_mut().zip(&ref_grads[q]) {
                *g = [(j11 * rg[0] - j10 * rg[1]) / det, (-j01 * rg[0] + j00 * rg[1]) / det];
            }
            f(&QuadPoint {
                element: t,
                x: map_point(&p, l),
                weight: rule.weights[q] * det,
                dofs,
                phi: &ref_values[q],
                grad: &grad,
            });
        }
    }
}

pub fn visit_boundary_quadrature(space: &FeSpace, rule: &SegmentRule, mut f: impl FnMut(&BoundaryQuadPoint)) {
    let mesh = space.mesh();
    let traces: Vec<Vec<f64>> = rule.points.iter().map(|l| basis::edge_values(space.degree(), l[1])).collect();
    for (k, be) in mesh.boundary_edges().iter().enumerate() {
        let a = mesh.vertices()[be.vertices[0]];
        let b = mesh.vertices()[be.vertices[1]];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let normal = mesh.outward_normal(be);
        let dofs = space.boundary_edge_dofs(k);
        for (q, l) in rule.points.iter().enumerate() {
            f(&BoundaryQuadPoint {
                edge: k,
                marker: be.marker,
                x: [l[0] * a[0] + l[1] * b[0], l[0] * a[1] + l[1] * b[1]],
                normal,
                weight: rule.weights[q] * len,
                dofs,
                phi: &traces[q],
            });
        }
    }
}

/// `∫_D f` by the given rule on each triangle.
pub fn integrate_domain(mesh: &Mesh, rule: &TriangleRule, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for t in 0..mesh.triangles().len() {
        let p = mesh.triangle_points(t);
        let det = 2.0 * mesh.triangle_area(t);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let x = map_point(&p, *l);
            total += w * det * f(x[0], x[1]);
        }
    }
    total
}

/// `∮_∂D f(x, y, n)` over all boundary edges.
pub fn integrate_boundary(mesh: &Mesh, rule: &SegmentRule, f: impl Fn(f64, f64, [f64; 2]) -> f64) -> f64 {
    let mut total = 0.0;
    for be in mesh.boundary_edges() {
        let a = mesh.vertices()[be.vertices[0]];
        let b = mesh.vertices()[be.vertices[1]];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let n = mesh.outward_normal(be);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            total += w * len * f(l[0] * a[0] + l[1] * b[0], l[0] * a[1] + l[1] * b[1], n);
        }
    }
    total
}

fn volume_rule(space: &FeSpace) -> TriangleRule {
    super::triangle_quadrature(space.volume_quadrature_order()).expect("supported order")
}

fn boundary_rule() -> SegmentRule {
    super::segment_quadrature(super::BOUNDARY_QUADRATURE_ORDER).expect("supported order")
}

/// Assembles element matrices given as an upper-triangular kernel, mirrored
/// so each local matrix is exactly symmetric.
fn assemble_symmetric(space: &FeSpace, kernel: impl Fn(&QuadPoint, usize, usize) -> f64) -> CsrMatrix {
    let n = space.local_dofs();
    let rule = volume_rule(space);
    let mut local = vec![0.0; n * n];
    let mut current = usize::MAX;
    let mut triplets = Vec::with_capacity(space.mesh().triangles().len() * n * n);

    let flush = |local: &mut [f64], dofs: &[usize], triplets: &mut Vec<(usize, usize, f64)>| {
        for i in 0..n {
            for j in 0..n {
                let v = if j >= i { local[i * n + j] } else { local[j * n + i] };
                triplets.push((dofs[i], dofs[j], v));
            }
        }
        local.fill(0.0);
    };

    visit_quadrature(space, &rule, |qp| {
        if qp.element != current {
            if current != usize::MAX {
                flush(&mut local, space.element_dofs(current), &mut triplets);
            }
            current = qp.element;
        }
        for i in 0..n {
            for j in i..n {
                local[i * n + j] += qp.weight * kernel(qp, i, j);
            }
        }
    });
    if current != usize::MAX {
        flush(&mut local, space.element_dofs(current), &mut triplets);
    }
    let nd = space.dof_count();
    CsrMatrix::from_triplets(nd, nd, &triplets).expect("element dofs in range")
}

/// `A_ij = ∫_D ∇φ_i·∇φ_j`
pub fn assemble_stiffness(space: &FeSpace) -> CsrMatrix {
    assemble_symmetric(space, |qp, i, j| qp.grad[i][0] * qp.grad[j][0] + qp.grad[i][1] * qp.grad[j][1])
}

/// `M_ij = ∫_D φ_i φ_j`
pub fn assemble_mass(space: &FeSpace) -> CsrMatrix {
    assemble_symmetric(space, |qp, i, j| qp.phi[i] * qp.phi[j])
}

/// `b_i = ∫_D q φ_i`
pub fn assemble_load(space: &FeSpace, q: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; space.dof_count()];
    visit_quadrature(space, &volume_rule(space), |qp| {
        let wq = qp.weight * q(qp.x[0], qp.x[1]);
        for (&d, &phi) in qp.dofs.iter().zip(qp.phi) {
            b[d] += wq * phi;
        }
    });
    b
}

/// `b_i = ∮ μ φ_i` over the boundary edges whose marker is in `markers`
/// (all edges when `markers` is `None`). `μ` receives the point and the
/// outward unit normal.
pub fn assemble_boundary_load(
    space: &FeSpace,
    mu: impl Fn(f64, f64, [f64; 2]) -> f64,
    markers: Option<&[u32]>,
) -> Vec<f64> {
    let mut b = vec![0.0; space.dof_count()];
    visit_boundary_quadrature(space, &boundary_rule(), |bq| {
        if markers.is_none_or(|m| m.contains(&bq.marker)) {
            let wm = bq.weight * mu(bq.x[0], bq.x[1], bq.normal);
            for (&d, &phi) in bq.dofs.iter().zip(bq.phi) {
                b[d] += wm * phi;
            }
        }
    });
    b
}

/// Boundary mass matrix `∮ φ_i φ_j`, indexed by boundary slot
/// (position in [`FeSpace::boundary_dofs`]).
pub fn assemble_boundary_mass(space: &FeSpace) -> CsrMatrix {
    let mut triplets = Vec::new();
    visit_boundary_quadrature(space, &boundary_rule(), |bq| {
        for (&di, &pi) in bq.dofs.iter().zip(bq.phi) {
            let si = space.boundary_slot(di).expect("boundary dof");
            for (&dj, &pj) in bq.dofs.iter().zip(bq.phi) {
                let sj = space.boundary_slot(dj).expect("boundary dof");
                triplets.push((si, sj, bq.weight * (pi * pj)));
            }
        }
    });
    let nb = space.boundary_dofs().len();
    CsrMatrix::from_triplets(nb, nb, &triplets).expect("slots in range")
}
