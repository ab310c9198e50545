use std::time::Instant;

use super::assembly::LinearSystem;
use super::sparse::{dot, CsrMatrix};
use super::{SolveMethod, SolveStats, SolverError};

pub const DEFAULT_PCG_TOL: f64 = 1e-10;
const SHIFT_FRACTION: f64 = 1e-3;
const SHIFT_DOUBLINGS: usize = 3;

/// Zero-fill incomplete Cholesky `K ≈ L Lᵀ`; `L` keeps the pattern of the
/// lower triangle of `K`, stored by rows with the diagonal last.
#[derive(Debug, Clone)]
pub struct IncompleteCholesky {
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
    /// Diagonal shift that was needed, 0 if none.
    pub shift: f64,
}

impl IncompleteCholesky {
    /// Factor, retrying with a diagonal shift `σ = 1e-3·mean(diag)` doubled
    /// up to three times when a pivot is not positive.
    pub fn new(k: &CsrMatrix) -> Result<Self, SolverError> {
        if let Some(f) = Self::factor(k, 0.0) {
            return Ok(f);
        }
        let n = k.n().max(1);
        let mut shift = SHIFT_FRACTION * k.diagonal().iter().sum::<f64>() / n as f64;
        for _ in 0..=SHIFT_DOUBLINGS {
            if let Some(f) = Self::factor(k, shift) {
                return Ok(f);
            }
            shift *= 2.0;
        }
        Err(SolverError::PreconditionerBreakdown { shift: shift / 2.0 })
    }

    fn factor(k: &CsrMatrix, shift: f64) -> Option<Self> {
        let n = k.n();
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        for i in 0..n {
            for (j, v) in k.row(i) {
                if j < i {
                    col.push(j);
                    val.push(v);
                } else if j == i {
                    col.push(j);
                    val.push(v + shift);
                }
            }
            if col.last() != Some(&i) {
                // structurally zero diagonal
                return None;
            }
            row_ptr.push(col.len());
        }

        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            for p in lo..hi - 1 {
                let j = col[p];
                // L_ij = (A_ij - Σ_{m<j} L_im L_jm) / L_jj
                let (jlo, jhi) = (row_ptr[j], row_ptr[j + 1]);
                let mut s = val[p];
                let (mut a, mut b) = (lo, jlo);
                while a < p && b < jhi - 1 {
                    match col[a].cmp(&col[b]) {
                        std::cmp::Ordering::Less => a += 1,
                        std::cmp::Ordering::Greater => b += 1,
                        std::cmp::Ordering::Equal => {
                            s -= val[a] * val[b];
                            a += 1;
                            b += 1;
                        }
                    }
                }
                val[p] = s / val[jhi - 1];
            }
            let mut d = val[hi - 1];
            for p in lo..hi - 1 {
                d -= val[p] * val[p];
            }
            if !(d > 0.0 && d.is_finite()) {
                return None;
            }
            val[hi - 1] = d.sqrt();
        }
        Some(IncompleteCholesky {
            row_ptr,
            col,
            val,
            shift,
        })
    }

    /// `z = (L Lᵀ)⁻¹ r`
    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        for i in 0..n {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut s = r[i];
            for p in lo..hi - 1 {
                s -= self.val[p] * z[self.col[p]];
            }
            z[i] = s / self.val[hi - 1];
        }
        for i in (0..n).rev() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            z[i] /= self.val[hi - 1];
            let zi = z[i];
            for p in lo..hi - 1 {
                z[self.col[p]] -= self.val[p] * zi;
            }
        }
    }
}

/// Conjugate gradients preconditioned by IC(0). Converged when the
/// preconditioned residual norm `√(rᵀz)` falls to `tol` times its initial
/// value; `max_iter` defaults to `10·n_eq`.
pub fn solve_pcg_ichol(
    system: &LinearSystem,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<(Vec<f64>, SolveStats), SolverError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(SolverError::BadTolerance(tol));
    }
    let clock = Instant::now();
    let k = &system.k;
    let n = system.n_eq();
    let max_iter = max_iter.unwrap_or(10 * n);
    let precond = IncompleteCholesky::new(k)?;

    let mut u = vec![0.0; n];
    let mut r = system.f.clone();
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut rz = dot(&r, &z);
    let initial = rz.sqrt();
    let stats = |iterations, residual: f64, clock: Instant| SolveStats {
        method: SolveMethod::PcgIchol,
        iterations,
        relative_residual: residual,
        wall_time: clock.elapsed().as_secs_f64(),
    };
    if initial == 0.0 {
        return Ok((u, stats(0, 0.0, clock)));
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut residual = 1.0;
    for it in 1..=max_iter {
        for (i, qi) in q.iter_mut().enumerate() {
            *qi = k.row(i).map(|(j, v)| v * p[j]).sum();
        }
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(SolverError::NotPositiveDefinite { iterations: it });
        }
        let alpha = rz / pq;
        for i in 0..n {
            u[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        precond.apply(&r, &mut z);
        let rz_next = dot(&r, &z);
        residual = rz_next.max(0.0).sqrt() / initial;
        if residual <= tol {
            return Ok((u, stats(it, residual, clock)));
        }
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::NotConverged {
        iterations: max_iter,
        residual,
    })
}
