/// Square sparse matrix in compressed row form. Symmetric matrices are stored
/// with both triangles so that products and row access need no special cases.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl CsrMatrix {
    /// Sum duplicate `(row, col, value)` entries. Duplicates are added in the
    /// order they appear, so equal input gives bit-equal output.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; n + 1];
        let mut col = Vec::with_capacity(triplets.len());
        let mut val: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "entry ({i}, {j}) outside a {n}x{n} matrix");
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, col, val }
    }

    /// Build a symmetric matrix from upper-triangle entries (`row <= col`);
    /// each off-diagonal sum is mirrored, so the result is exactly symmetric.
    pub fn from_upper_triplets(n: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        let upper = Self::from_triplets(n, triplets);
        let mut full = Vec::with_capacity(2 * upper.nnz());
        for i in 0..n {
            for (j, v) in upper.row(i) {
                assert!(i <= j, "entry ({i}, {j}) is below the diagonal");
                full.push((i, j, v));
                if i != j {
                    full.push((j, i, v));
                }
            }
        }
        Self::from_triplets(n, full)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut t = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub(crate) fn row_slices(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col[r.clone()], &self.val[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row_slices(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max|A - Aᵀ| / max|A|`, zero for an empty or zero matrix.
    pub fn symmetry_error(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    /// `B = P A Pᵀ` where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> CsrMatrix {
        let mut inverse = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                t.push((inverse[i], inverse[j], v));
            }
        }
        CsrMatrix::from_triplets(self.n, t)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Reverse Cuthill–McKee ordering of the matrix graph, component by
/// component, each started from a pseudo-peripheral node. `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row_slices(i).0.len()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));

    let mut level = vec![usize::MAX; n];
    for &seed in &by_degree {
        if placed[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree, &mut level);
        let head = order.len();
        placed[start] = true;
        order.push(start);
        let mut k = head;
        let mut nbrs = Vec::new();
        while k < order.len() {
            let i = order[k];
            k += 1;
            nbrs.clear();
            nbrs.extend(a.row_slices(i).0.iter().copied().filter(|&j| !placed[j]));
            nbrs.sort_by_key(|&j| (degree[j], j));
            for &j in &nbrs {
                placed[j] = true;
                order.push(j);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, degree: &[usize], level: &mut [usize]) -> usize {
    let mut start = seed;
    let mut depth = 0;
    for _ in 0..4 {
        let (reached, last_level, d) = bfs_levels(a, start, level);
        let candidate = last_level
            .iter()
            .copied()
            .min_by_key(|&j| (degree[j], j))
            .unwrap_or(start);
        for &i in &reached {
            level[i] = usize::MAX;
        }
        if d <= depth {
            break;
        }
        depth = d;
        start = candidate;
    }
    start
}

fn bfs_levels(a: &CsrMatrix, start: usize, level: &mut [usize]) -> (Vec<usize>, Vec<usize>, usize) {
    let mut reached = vec![start];
    level[start] = 0;
    let mut k = 0;
    while k < reached.len() {
        let i = reached[k];
        k += 1;
        for &j in a.row_slices(i).0 {
            if level[j] == usize::MAX {
                level[j] = level[i] + 1;
                reached.push(j);
            }
        }
    }
    let depth = level[*reached.last().unwrap()];
    let last = reached.iter().copied().filter(|&i| level[i] == depth).collect();
    (reached, last, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = CsrMatrix::from_triplets(2, vec![(1, 1, 1.0), (0, 1, 2.0), (1, 1, 3.0)]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 1), 4.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![2.0, 4.0]);
    }

    #[test]
    fn upper_triplets_mirror_exactly() {
        let a = CsrMatrix::from_upper_triplets(3, vec![(0, 0, 2.0), (0, 2, 0.1), (0, 2, 0.2), (1, 1, 1.0)]);
        assert_eq!(a.get(2, 0), a.get(0, 2));
        assert_eq!(a.symmetry_error(), 0.0);
    }

    #[test]
    fn rcm_is_a_permutation_and_narrows_a_shuffled_band() {
        // path graph with scrambled labels
        let n = 40;
        let label: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let mut t = Vec::new();
        for i in 0..n {
            t.push((label[i], label[i], 2.0));
            if i + 1 < n {
                t.push((label[i], label[i + 1], -1.0));
                t.push((label[i + 1], label[i], -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let perm = reverse_cuthill_mckee(&a);
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let b = a.permuted(&perm);
        for i in 0..n {
            for (j, _) in b.row(i) {
                assert!(i.abs_diff(j) <= 1);
            }
        }
    }
}
