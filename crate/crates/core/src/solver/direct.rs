use std::time::Instant;

use super::assembly::LinearSystem;
use super::sparse::{norm, reverse_cuthill_mckee, CsrMatrix};
use super::{SolveMethod, SolveStats, SolverError};

/// A pivot this small relative to its original diagonal signals a mechanism.
const PIVOT_TOL: f64 = 1e-12;
const REFINE_TARGET: f64 = 1e-10;
const MAX_REFINE: usize = 3;

/// Sparse `L D Lᵀ` factor of `P K Pᵀ`, `L` unit lower triangular, stored by
/// columns.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row: Vec<usize>,
    val: Vec<f64>,
    d: Vec<f64>,
}

/// Pivot failure at permuted step `k` (original equation `perm[k]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotFailure {
    pub equation: usize,
    pub pivot: f64,
}

impl LdlFactor {
    pub fn new(k: &CsrMatrix) -> Result<Self, PivotFailure> {
        let perm = reverse_cuthill_mckee(k);
        let a = k.permuted(&perm);
        let n = a.n();

        // elimination tree and column counts
        let mut parent = vec![usize::MAX; n];
        let mut flag = vec![usize::MAX; n];
        let mut count = vec![0usize; n];
        for j in 0..n {
            flag[j] = j;
            for (i, _) in a.row(j) {
                if i >= j {
                    break;
                }
                let mut i = i;
                while flag[i] != j {
                    if parent[i] == usize::MAX {
                        parent[i] = j;
                    }
                    count[i] += 1;
                    flag[i] = j;
                    i = parent[i];
                }
            }
        }
        let mut col_ptr = vec![0; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + count[j];
        }
        let nnz = col_ptr[n];
        let mut row = vec![0; nnz];
        let mut val = vec![0.0; nnz];
        let mut d = vec![0.0; n];

        // up-looking numeric factorization, one row of L per step
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        let mut filled = vec![0usize; n];
        for j in 0..n {
            let mut top = n;
            flag[j] = j;
            let mut diag = 0.0;
            for (i, v) in a.row(j) {
                if i > j {
                    break;
                }
                if i == j {
                    diag = v;
                }
                y[i] += v;
                let mut len = 0;
                let mut i = i;
                while flag[i] != j {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = j;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let mut dj = y[j];
            y[j] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let start = col_ptr[i];
                for p in start..start + filled[i] {
                    y[row[p]] -= val[p] * yi;
                }
                let l = yi / d[i];
                dj -= l * yi;
                let p = start + filled[i];
                row[p] = j;
                val[p] = l;
                filled[i] += 1;
            }
            if !(dj > PIVOT_TOL * diag.abs()) || !dj.is_finite() {
                return Err(PivotFailure {
                    equation: perm[j],
                    pivot: dj,
                });
            }
            d[j] = dj;
        }
        Ok(LdlFactor {
            perm,
            col_ptr,
            row,
            val,
            d,
        })
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for j in 0..n {
            let xj = x[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                x[self.row[p]] -= self.val[p] * xj;
            }
        }
        for j in 0..n {
            x[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                s -= self.val[p] * x[self.row[p]];
            }
            x[j] = s;
        }
        let mut out = vec![0.0; n];
        for (k, &i) in self.perm.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }
}

pub(crate) fn relative_residual(k: &CsrMatrix, u: &[f64], f: &[f64]) -> f64 {
    let fnorm = norm(f);
    let ku = k.mul_vec(u);
    let r: Vec<f64> = f.iter().zip(&ku).map(|(a, b)| a - b).collect();
    if fnorm == 0.0 {
        norm(&r)
    } else {
        norm(&r) / fnorm
    }
}

/// Factor and solve, with a few steps of iterative refinement if needed.
pub fn solve_direct(system: &LinearSystem) -> Result<(Vec<f64>, SolveStats), SolverError> {
    let clock = Instant::now();
    let k = &system.k;
    let factor = LdlFactor::new(k).map_err(|p| SolverError::Mechanism {
        equation: p.equation,
        label: system.labels.get(p.equation).copied(),
        pivot: p.pivot,
    })?;
    let mut u = factor.solve(&system.f);
    let mut residual = relative_residual(k, &u, &system.f);
    for _ in 0..MAX_REFINE {
        if residual <= REFINE_TARGET {
            break;
        }
        let ku = k.mul_vec(&u);
        let r: Vec<f64> = system.f.iter().zip(&ku).map(|(a, b)| a - b).collect();
        let du = factor.solve(&r);
        for (x, d) in u.iter_mut().zip(&du) {
            *x += d;
        }
        residual = relative_residual(k, &u, &system.f);
    }
    Ok((
        u,
        SolveStats {
            method: SolveMethod::Direct,
            iterations: 0,
            relative_residual: residual,
            wall_time: clock.elapsed().as_secs_f64(),
        },
    ))
}
