//! Lagrange shape functions on the reference triangle `(0,0), (1,0), (0,1)`.
//!
//! Local ordering: vertices `v0 v1 v2`, then (P2 only) the edge midpoints of
//! `v0v1`, `v1v2`, `v2v0`. Gradients are with respect to the reference
//! coordinates `(ξ, η) = (λ1, λ2)`.

use super::Degree;

const DLAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

pub fn local_dofs(degree: Degree) -> usize {
    match degree {
        Degree::P1 => 3,
        Degree::P2 => 6,
    }
}

/// Shape function values at barycentric point `l`.
pub fn values(degree: Degree, l: [f64; 3]) -> Vec<f64> {
    match degree {
        Degree::P1 => l.to_vec(),
        Degree::P2 => {
            let mut v: Vec<f64> = l.iter().map(|&li| li * (2.0 * li - 1.0)).collect();
            v.extend(EDGES.iter().map(|&(i, j)| 4.0 * l[i] * l[j]));
            v
        }
    }
}

/// Reference gradients at barycentric point `l`.
pub fn gradients(degree: Degree, l: [f64; 3]) -> Vec<[f64; 2]> {
    match degree {
        Degree::P1 => DLAMBDA.to_vec(),
        Degree::P2 => {
            let mut g: Vec<[f64; 2]> = (0..3)
                .map(|i| {
                    let s = 4.0 * l[i] - 1.0;
                    [s * DLAMBDA[i][0], s * DLAMBDA[i][1]]
                })
                .collect();
            g.extend(EDGES.iter().map(|&(i, j)| {
                [
                    4.0 * (l[j] * DLAMBDA[i][0] + l[i] * DLAMBDA[j][0]),
                    4.0 * (l[j] * DLAMBDA[i][1] + l[i] * DLAMBDA[j][1]),
                ]
            }));
            g
        }
    }
}

/// Trace of the basis on an edge parametrized by `t ∈ [0,1]`, local order
/// `start, end, (midpoint)`.
pub fn edge_values(degree: Degree, t: f64) -> Vec<f64> {
    match degree {
        Degree::P1 => vec![1.0 - t, t],
        Degree::P2 => vec![(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
    }
}

/// Barycentric coordinates of the local nodes.
pub fn nodes(degree: Degree) -> Vec<[f64; 3]> {
    let mut n = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    if degree == Degree::P2 {
        n.extend([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodal_property_and_partition_of_unity() {
        for degree in [Degree::P1, Degree::P2] {
            let nodes = nodes(degree);
            for (i, &node) in nodes.iter().enumerate() {
                let v = values(degree, node);
                for (j, &vj) in v.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((vj - expected).abs() < 1e-15);
                }
            }
            let l = [0.2, 0.3, 0.5];
            assert!((values(degree, l).iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let g = gradients(degree, l);
            assert!(g.iter().map(|d| d[0]).sum::<f64>().abs() < 1e-14);
            assert!(g.iter().map(|d| d[1]).sum::<f64>().abs() < 1e-14);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let eps = 1e-6;
        let at = |xi: f64, eta: f64| [1.0 - xi - eta, xi, eta];
        let (xi, eta) = (0.21, 0.37);
        for degree in [Degree::P1, Degree::P2] {
            let g = gradients(degree, at(xi, eta));
            let vxp = values(degree, at(xi + eps, eta));
            let vxm = values(degree, at(xi - eps, eta));
            let vyp = values(degree, at(xi, eta + eps));
            let vym = values(degree, at(xi, eta - eps));
            for k in 0..g.len() {
                assert!((g[k][0] - (vxp[k] - vxm[k]) / (2.0 * eps)).abs() < 1e-8);
                assert!((g[k][1] - (vyp[k] - vym[k]) / (2.0 * eps)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn edge_trace_matches_volume_basis() {
        // edge v0 -> v1 of the reference triangle: local dofs 0, 1, 3
        for t in [0.0, 0.3, 0.75, 1.0] {
            let vol = values(Degree::P2, [1.0 - t, t, 0.0]);
            let edge = edge_values(Degree::P2, t);
            assert!((vol[0] - edge[0]).abs() < 1e-15);
            assert!((vol[1] - edge[1]).abs() < 1e-15);
            assert!((vol[3] - edge[2]).abs() < 1e-15);
        }
    }
}
