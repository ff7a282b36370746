//! Plain-text mesh format.
//!
//! ```text
//! biharm-mesh v1
//! vertices N
//! x y            (N lines)
//! triangles M
//! i j k          (M lines, 0-based, counterclockwise)
//! boundary K
//! i j marker     (K lines)
//! ```
//!
//! Coordinates are written in shortest round-trip decimal form, so a
//! write/read cycle reproduces every coordinate bit for bit. The file does not
//! record the domain tag; it is recovered from the geometry on read.

use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{BoundaryEdge, DomainTag, Mesh, Point};
use crate::error::{Error, Result};

pub const MESH_HEADER: &str = "biharm-mesh v1";

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> Result<()> {
    writeln!(out, "{MESH_HEADER}")?;
    writeln!(out, "vertices {}", mesh.vertices().len())?;
    for p in mesh.vertices() {
        writeln!(out, "{:?} {:?}", p[0], p[1])?;
    }
    writeln!(out, "triangles {}", mesh.triangles().len())?;
    for [a, b, c] in mesh.triangles() {
        writeln!(out, "{a} {b} {c}")?;
    }
    writeln!(out, "boundary {}", mesh.boundary_edges().len())?;
    for be in mesh.boundary_edges() {
        writeln!(out, "{} {} {}", be.vertices[0], be.vertices[1], be.marker)?;
    }
    out.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self, what: &str) -> Result<String> {
        loop {
            self.number += 1;
            match self.inner.next() {
                Some(line) => {
                    let line = line?;
                    let trimmed = line.trim();
                    if !trimmed.is_empty() {
                        return Ok(trimmed.to_string());
                    }
                }
                None => return Err(self.error(format!("unexpected end of file, expected {what}"))),
            }
        }
    }

    fn error(&self, message: String) -> Error {
        Error::Parse { line: self.number, message }
    }

    fn section(&mut self, keyword: &str) -> Result<usize> {
        let line = self.next_line(&format!("`{keyword} <count>`"))?;
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(n), None) if k == keyword => {
                n.parse().map_err(|_| self.error(format!("invalid {keyword} count `{n}`")))
            }
            _ => Err(self.error(format!("expected `{keyword} <count>`, found `{line}`"))),
        }
    }

    fn fields<T: FromStr, const N: usize>(&mut self, what: &str) -> Result<[T; N]> {
        let line = self.next_line(what)?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != N {
            return Err(self.error(format!("expected {N} fields for {what}, found {}", parts.len())));
        }
        let mut values = Vec::with_capacity(N);
        for p in parts {
            values.push(p.parse::<T>().map_err(|_| self.error(format!("invalid value `{p}` in {what}")))?);
        }
        values.try_into().map_err(|_| self.error(format!("expected {N} fields for {what}")))
    }
}

pub fn read_mesh<R: BufRead>(source: R) -> Result<Mesh> {
    let mut lines = Lines { inner: source.lines(), number: 0 };
    let header = lines.next_line("header")?;
    if header != MESH_HEADER {
        return Err(lines.error(format!("expected header `{MESH_HEADER}`, found `{header}`")));
    }

    let nv = lines.section("vertices")?;
    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(lines.fields::<f64, 2>("vertex")?);
    }

    let nt = lines.section("triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let tri = lines.fields::<usize, 3>("triangle")?;
        if let Some(&v) = tri.iter().find(|&&v| v >= nv) {
            return Err(lines.error(format!("vertex index {v} out of range (0..{nv})")));
        }
        let [a, b, c] = tri.map(|v| vertices[v]);
        if !(super::signed_area(a, b, c) > 0.0) {
            return Err(lines.error(format!("triangle {tri:?} is not counterclockwise")));
        }
        triangles.push(tri);
    }

    let nb = lines.section("boundary")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let [a, b, marker] = lines.fields::<u64, 3>("boundary edge")?;
        let (a, b) = (a as usize, b as usize);
        if a >= nv || b >= nv {
            return Err(lines.error(format!("boundary vertex index out of range (0..{nv})")));
        }
        let marker =
            u32::try_from(marker).map_err(|_| lines.error(format!("boundary marker {marker} out of range")))?;
        boundary.push(BoundaryEdge { vertices: [a, b], marker });
    }

    while let Some(line) = lines.inner.next() {
        lines.number += 1;
        if !line?.trim().is_empty() {
            return Err(lines.error("trailing content after boundary section".into()));
        }
    }

    let domain = infer_domain(&vertices, &boundary);
    Mesh::new(vertices, triangles, boundary, domain)
}

/// A mesh whose vertices all lie in `[0,1]²` with every boundary vertex on
/// the square's sides is a unit-square mesh; anything else is treated as a
/// polygonal disk.
fn infer_domain(vertices: &[Point], boundary: &[BoundaryEdge]) -> DomainTag {
    let inside = vertices.iter().all(|p| (0.0..=1.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1]));
    let on_sides = boundary.iter().flat_map(|b| b.vertices).all(|v| {
        let [x, y] = vertices[v];
        x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0
    });
    if inside && on_sides && !boundary.is_empty() {
        DomainTag::UnitSquare
    } else {
        DomainTag::UnitDiskPolygon
    }
}
