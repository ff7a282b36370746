//! Preconditioned conjugate gradients for SPD systems.

use super::{dot, norm2, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// `M = diag(A)`
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Stop once `‖b − Ax‖₂ ≤ rel_tol·‖b‖₂`.
    pub rel_tol: f64,
    /// Iteration cap; `None` means `10·n`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { rel_tol: 1e-10, max_iter: None, preconditioner: Preconditioner::Jacobi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// Final true relative residual `‖b − Ax‖₂ / ‖b‖₂`.
    pub relative_residual: f64,
}

pub fn cg_solve(a: &CsrMatrix, b: &[f64], options: &CgOptions) -> Result<(Vec<f64>, CgReport)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    if b.len() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("right-hand side of length {n}"),
            actual: format!("length {}", b.len()),
        });
    }
    if !(options.rel_tol > 0.0) {
        return Err(Error::invalid("rel_tol must be positive"));
    }
    let max_iter = options.max_iter.unwrap_or(10 * n);

    let inv_diag: Option<Vec<f64>> = match options.preconditioner {
        Preconditioner::None => None,
        Preconditioner::Jacobi => {
            let d = a.diagonal();
            if let Some(i) = d.iter().position(|&v| !(v > 0.0)) {
                return Err(Error::NotPositiveDefinite { iteration: 0, curvature: d[i] });
            }
            Some(d.iter().map(|v| 1.0 / v).collect())
        }
    };
    let precondition = |r: &[f64], z: &mut [f64]| match &inv_diag {
        Some(inv) => z.iter_mut().zip(r.iter().zip(inv)).for_each(|(z, (r, d))| *z = r * d),
        None => z.copy_from_slice(r),
    };

    let mut x = vec![0.0; n];
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok((x, CgReport { iterations: 0, relative_residual: 0.0 }));
    }
    let target = options.rel_tol * b_norm;

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut ap = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;

    while iterations < max_iter {
        a.matvec_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::NotPositiveDefinite { iteration: iterations, curvature });
        }
        let alpha = rz / curvature;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&ap).for_each(|(r, ap)| *r -= alpha * ap);
        iterations += 1;

        if norm2(&r) <= target {
            // confirm against the true residual; restart from it otherwise
            a.matvec_into(&x, &mut ap);
            r.iter_mut().zip(b.iter().zip(&ap)).for_each(|(r, (b, ax))| *r = b - ax);
            let true_norm = norm2(&r);
            if true_norm <= target {
                return Ok((x, CgReport { iterations, relative_residual: true_norm / b_norm }));
            }
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }

    a.matvec_into(&x, &mut ap);
    let residual = norm2(&b.iter().zip(&ap).map(|(b, ax)| b - ax).collect::<Vec<_>>()) / b_norm;
    Err(Error::NonConvergence { iterations, residual })
}
