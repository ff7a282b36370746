//! Conforming triangulations of the unit square and of a polygonal unit disk.
//!
//! A [`Mesh`] is validated on construction and immutable afterwards. Besides
//! the vertex/triangle/boundary lists it carries the derived edge numbering
//! used by the P2 space and by uniform refinement.

mod io;

pub use io::{read_mesh, write_mesh, MESH_HEADER};

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Relative tolerance for the area invariant.
const AREA_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    UnitSquare,
    UnitDiskPolygon,
}

/// Directed boundary edge, oriented so that the domain lies on its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub marker: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryEdge>,
    domain: DomainTag,
    // derived
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    boundary_edge_ids: Vec<usize>,
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    /// Builds a mesh and checks every invariant: positive orientation,
    /// edge multiplicities, a single closed boundary loop, the Euler relation
    /// and the area identity against the boundary polygon.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
        domain: DomainTag,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(p) = vertices.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite vertex {p:?}")));
        }

        let mut edges = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_count: Vec<usize> = Vec::new();
        // directed edge -> owning triangle, used for boundary orientation
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();

        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a vertex out of range")));
            }
            let [a, b, c] = *tri;
            if a == b || b == c || a == c {
                return Err(Error::InvalidMesh(format!("triangle {t} is degenerate")));
            }
            let area = signed_area(vertices[a], vertices[b], vertices[c]);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!("triangle {t} is not counterclockwise (signed area {area:e})")));
            }
            let mut local = [0usize; 3];
            for (k, (p, q)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
                if directed.insert((p, q), t).is_some() {
                    return Err(Error::InvalidMesh(format!("directed edge ({p}, {q}) appears twice")));
                }
                let id = *edge_ids.entry(edge_key(p, q)).or_insert_with(|| {
                    edges.push([p.min(q), p.max(q)]);
                    edge_count.push(0);
                    edges.len() - 1
                });
                edge_count[id] += 1;
                local[k] = id;
            }
            triangle_edges.push(local);
        }

        if let Some(id) = edge_count.iter().position(|&c| c > 2) {
            return Err(Error::InvalidMesh(format!("edge {:?} shared by more than two triangles", edges[id])));
        }

        let mut boundary_edge_ids = Vec::with_capacity(boundary.len());
        let mut seen = vec![false; edges.len()];
        for be in &boundary {
            let [p, q] = be.vertices;
            let id = *edge_ids
                .get(&edge_key(p, q))
                .ok_or_else(|| Error::InvalidMesh(format!("boundary edge ({p}, {q}) is not a mesh edge")))?;
            if edge_count[id] != 1 {
                return Err(Error::InvalidMesh(format!("boundary edge ({p}, {q}) is an interior edge")));
            }
            if !directed.contains_key(&(p, q)) {
                return Err(Error::InvalidMesh(format!(
                    "boundary edge ({p}, {q}) is not oriented with the domain on its left"
                )));
            }
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::InvalidMesh(format!("boundary edge ({p}, {q}) listed twice")));
            }
            boundary_edge_ids.push(id);
        }
        let unlisted = edge_count.iter().zip(&seen).filter(|(&c, &s)| c == 1 && !s).count();
        if unlisted > 0 {
            return Err(Error::InvalidMesh(format!(
                "{unlisted} edges of a single triangle are missing from the boundary list"
            )));
        }

        // one closed loop
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (k, be) in boundary.iter().enumerate() {
            if next.insert(be.vertices[0], k).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "boundary vertex {} starts two boundary edges",
                    be.vertices[0]
                )));
            }
        }
        let mut steps = 0;
        let mut cur = 0;
        loop {
            let end = boundary[cur].vertices[1];
            steps += 1;
            match next.get(&end) {
                Some(&0) => break,
                Some(&k) if steps < boundary.len() => cur = k,
                _ => return Err(Error::InvalidMesh("boundary edges do not form one closed loop".into())),
            }
        }
        if steps != boundary.len() {
            return Err(Error::InvalidMesh("boundary edges do not form one closed loop".into()));
        }

        let euler = nv as i64 - edges.len() as i64 + triangles.len() as i64;
        if euler != 1 {
            return Err(Error::InvalidMesh(format!("Euler characteristic V - E + F = {euler}, expected 1")));
        }

        let mesh = Mesh { vertices, triangles, boundary, domain, edges, triangle_edges, boundary_edge_ids };
        let area = mesh.area();
        let polygon = mesh.boundary_polygon_area();
        if (area - polygon).abs() > AREA_RTOL * polygon.abs() {
            return Err(Error::InvalidMesh(format!(
                "triangle areas sum to {area}, boundary polygon encloses {polygon}"
            )));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    /// Distinct undirected edges, numbered by first appearance.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Edge ids of each triangle in local order (v0v1, v1v2, v2v0).
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    /// Edge id of each boundary edge, parallel to [`Mesh::boundary_edges`].
    pub fn boundary_edge_ids(&self) -> &[usize] {
        &self.boundary_edge_ids
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Shoelace area of the boundary loop.
    pub fn boundary_polygon_area(&self) -> f64 {
        0.5 * self
            .boundary
            .iter()
            .map(|e| {
                let p = self.vertices[e.vertices[0]];
                let q = self.vertices[e.vertices[1]];
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary.iter().map(|e| self.edge_length(e.vertices[0], e.vertices[1])).sum()
    }

    fn edge_length(&self, a: usize, b: usize) -> f64 {
        let p = self.vertices[a];
        let q = self.vertices[b];
        (q[0] - p[0]).hypot(q[1] - p[1])
    }

    /// Longest edge length.
    pub fn h_max(&self) -> f64 {
        self.edges.iter().map(|e| self.edge_length(e[0], e[1])).fold(0.0, f64::max)
    }

    /// Unit outward normal of a boundary edge.
    pub fn outward_normal(&self, edge: &BoundaryEdge) -> [f64; 2] {
        let p = self.vertices[edge.vertices[0]];
        let q = self.vertices[edge.vertices[1]];
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    }

    /// Index of a triangle containing `p` (closed triangles, small slack).
    pub fn locate(&self, p: Point) -> Option<usize> {
        const SLACK: f64 = 1e-12;
        (0..self.triangles.len()).find(|&t| {
            let [a, b, c] = self.triangle_points(t);
            let area = signed_area(a, b, c);
            let tol = -SLACK * area.max(1.0);
            signed_area(p, b, c) >= tol && signed_area(a, p, c) >= tol && signed_area(a, b, p) >= tol
        })
    }
}

/// Structured triangulation of `[0,1]²` with `n` cells per side, every cell
/// cut by its bottom-left to top-right diagonal.
///
/// Side markers: 0 on y=0, 1 on x=1, 2 on y=1, 3 on x=0.
pub fn unit_square_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::invalid("unit_square_mesh requires n >= 1"));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let coord = |i: usize| i as f64 / n as f64;

    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([coord(i), coord(j)]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut boundary = Vec::with_capacity(4 * n);
    let mut push = |a, b, marker| boundary.push(BoundaryEdge { vertices: [a, b], marker });
    for i in 0..n {
        push(idx(i, 0), idx(i + 1, 0), 0);
    }
    for j in 0..n {
        push(idx(n, j), idx(n, j + 1), 1);
    }
    for i in (0..n).rev() {
        push(idx(i + 1, n), idx(i, n), 2);
    }
    for j in (0..n).rev() {
        push(idx(0, j + 1), idx(0, j), 3);
    }
    Mesh::new(vertices, triangles, boundary, DomainTag::UnitSquare)
}

/// Concentric-ring triangulation of the regular `6·rings`-gon inscribed in
/// the unit circle. Ring `k` carries `6k` equally spaced vertices at radius
/// `k/rings`; all boundary edges get marker 0.
pub fn unit_disk_mesh(rings: usize) -> Result<Mesh> {
    if rings == 0 {
        return Err(Error::invalid("unit_disk_mesh requires rings >= 1"));
    }
    let start = |k: usize| if k == 0 { 0 } else { 1 + 3 * k * (k - 1) };
    let count = |k: usize| if k == 0 { 1 } else { 6 * k };

    let mut vertices = vec![[0.0, 0.0]];
    for k in 1..=rings {
        let r = k as f64 / rings as f64;
        for m in 0..count(k) {
            let theta = 2.0 * PI * m as f64 / count(k) as f64;
            vertices.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for m in 0..6 {
        triangles.push([0, 1 + m, 1 + (m + 1) % 6]);
    }
    for k in 2..=rings {
        let (ni, no) = (count(k - 1), count(k));
        let inner = |i: usize| start(k - 1) + i % ni;
        let outer = |o: usize| start(k) + o % no;
        let (mut i, mut o) = (0, 0);
        while i < ni || o < no {
            // compare angles (o+1)/no and (i+1)/ni exactly
            let advance_outer = o < no && (i == ni || (o + 1) * ni <= (i + 1) * no);
            if advance_outer {
                triangles.push([inner(i), outer(o), outer(o + 1)]);
                o += 1;
            } else {
                triangles.push([inner(i), outer(o), inner(i + 1)]);
                i += 1;
            }
        }
    }

    let no = count(rings);
    let s = start(rings);
    let boundary = (0..no).map(|m| BoundaryEdge { vertices: [s + m, s + (m + 1) % no], marker: 0 }).collect();
    Mesh::new(vertices, triangles, boundary, DomainTag::UnitDiskPolygon)
}

/// Splits every triangle into four through its edge midpoints. Midpoint
/// vertices are appended in edge order; boundary markers are inherited.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let nv = mesh.vertices.len();
    let mut vertices = mesh.vertices.clone();
    vertices.extend(mesh.edges.iter().map(|&[a, b]| {
        let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
        [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
    }));

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for (tri, te) in mesh.triangles.iter().zip(&mesh.triangle_edges) {
        let [a, b, c] = *tri;
        let [m0, m1, m2] = te.map(|e| nv + e);
        triangles.push([a, m0, m2]);
        triangles.push([m0, b, m1]);
        triangles.push([m2, m1, c]);
        triangles.push([m0, m1, m2]);
    }

    let mut boundary = Vec::with_capacity(2 * mesh.boundary.len());
    for (be, &e) in mesh.boundary.iter().zip(&mesh.boundary_edge_ids) {
        let m = nv + e;
        let [a, b] = be.vertices;
        boundary.push(BoundaryEdge { vertices: [a, m], marker: be.marker });
        boundary.push(BoundaryEdge { vertices: [m, b], marker: be.marker });
    }
    Mesh::new(vertices, triangles, boundary, mesh.domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(m: &Mesh) -> (usize, usize, usize) {
        (m.vertices().len(), m.triangles().len(), m.boundary_edges().len())
    }

    #[test]
    fn square_counts() {
        assert_eq!(counts(&unit_square_mesh(1).unwrap()), (4, 2, 4));
        assert_eq!(counts(&unit_square_mesh(2).unwrap()), (9, 8, 8));
        assert_eq!(counts(&unit_square_mesh(8).unwrap()), (81, 128, 32));
        assert!(matches!(unit_square_mesh(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn square_side_markers() {
        let m = unit_square_mesh(3).unwrap();
        for be in m.boundary_edges() {
            let [p, q] = be.vertices.map(|v| m.vertices()[v]);
            let on_side = |side: u32, pt: Point| match side {
                0 => pt[1] == 0.0,
                1 => pt[0] == 1.0,
                2 => pt[1] == 1.0,
                3 => pt[0] == 0.0,
                _ => false,
            };
            assert!(on_side(be.marker, p) && on_side(be.marker, q), "{be:?}");
        }
    }

    #[test]
    fn disk_counts() {
        assert_eq!(counts(&unit_disk_mesh(1).unwrap()), (7, 6, 6));
        let m = unit_disk_mesh(2).unwrap();
        assert_eq!(m.boundary_edges().len(), 12);
        assert!(matches!(unit_disk_mesh(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn disk_area_matches_inscribed_polygon() {
        for rings in 1..=12 {
            let m = unit_disk_mesh(rings).unwrap();
            let n = 6 * rings;
            let polygon = 0.5 * n as f64 * (2.0 * PI / n as f64).sin();
            assert!((m.area() - polygon).abs() < 1e-12 * polygon, "rings={rings}");
            assert_eq!(m.triangles().len(), 6 * rings * rings);
        }
        let hexagon = 1.5 * 3f64.sqrt();
        assert!((unit_disk_mesh(1).unwrap().area() - hexagon).abs() < 1e-14);
    }

    #[test]
    fn refinement_multiplies_counts() {
        let m = unit_square_mesh(1).unwrap();
        let r = refine_uniform(&m).unwrap();
        assert_eq!(r.triangles().len(), 8);
        assert_eq!(r.boundary_edges().len(), 8);
        let d = unit_disk_mesh(3).unwrap();
        let rd = refine_uniform(&d).unwrap();
        assert_eq!(rd.triangles().len(), 4 * d.triangles().len());
        assert_eq!(rd.boundary_edges().len(), 2 * d.boundary_edges().len());
        assert!((rd.area() - d.area()).abs() < 1e-12);
    }

    #[test]
    fn rejects_clockwise_triangle() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let b = vec![
            BoundaryEdge { vertices: [0, 1], marker: 0 },
            BoundaryEdge { vertices: [1, 2], marker: 0 },
            BoundaryEdge { vertices: [2, 0], marker: 0 },
        ];
        assert!(Mesh::new(v.clone(), vec![[0, 1, 2]], b, DomainTag::UnitSquare).is_ok());
        let b_rev = vec![
            BoundaryEdge { vertices: [0, 2], marker: 0 },
            BoundaryEdge { vertices: [2, 1], marker: 0 },
            BoundaryEdge { vertices: [1, 0], marker: 0 },
        ];
        let err = Mesh::new(v, vec![[0, 2, 1]], b_rev, DomainTag::UnitSquare).unwrap_err();
        assert!(err.to_string().contains("counterclockwise"), "{err}");
    }

    #[test]
    fn rejects_missing_boundary_edge() {
        let m = unit_square_mesh(2).unwrap();
        let mut b = m.boundary_edges().to_vec();
        b.pop();
        let err = Mesh::new(m.vertices().to_vec(), m.triangles().to_vec(), b, m.domain());
        assert!(err.is_err());
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let m = unit_square_mesh(4).unwrap();
        let t = m.locate([0.3, 0.6]).unwrap();
        let [a, b, c] = m.triangle_points(t);
        assert!(signed_area([0.3, 0.6], b, c) >= 0.0);
        assert!(signed_area(a, [0.3, 0.6], c) >= 0.0);
        assert!(signed_area(a, b, [0.3, 0.6]) >= 0.0);
        assert!(m.locate([1.5, 0.5]).is_none());
    }

    #[test]
    fn outward_normals_on_square() {
        let m = unit_square_mesh(2).unwrap();
        for be in m.boundary_edges() {
            let n = m.outward_normal(be);
            let expected = match be.marker {
                0 => [0.0, -1.0],
                1 => [1.0, 0.0],
                2 => [0.0, 1.0],
                _ => [-1.0, 0.0],
            };
            assert!((n[0] - expected[0]).abs() < 1e-15 && (n[1] - expected[1]).abs() < 1e-15);
        }
    }
}
