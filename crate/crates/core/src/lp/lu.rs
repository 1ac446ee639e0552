//! Sparse LU factorization of simplex bases plus a product-form eta file.
//!
//! The factorization is left-looking (Gilbert–Peierls): each basis column is
//! solved against the part of `L` built so far using a depth-first reach, and
//! the pivot is picked by threshold partial pivoting with a row-count
//! tie-break. Basis changes between refactorizations are appended as eta
//! columns.

/// Pivots smaller than this (relative to the column max) mark a column as
/// dependent.
const SINGULAR_TOL: f64 = 1e-11;
/// Threshold for partial pivoting: candidates within this fraction of the
/// largest entry may be chosen for sparsity.
const PIVOT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone)]
pub(crate) struct LuFactors {
    m: usize,
    /// Original row -> elimination step.
    row_to_step: Vec<usize>,
    /// Elimination step -> basis position.
    step_to_pos: Vec<usize>,
    l_start: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<f64>,
    u_start: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<f64>,
    u_diag: Vec<f64>,
}

/// Result of factorizing a (possibly singular) basis.
#[derive(Debug, Clone)]
pub(crate) struct Factorized {
    pub lu: LuFactors,
    /// Basis positions whose column was dependent, with the row whose logical
    /// took its place.
    pub replaced: Vec<(usize, usize)>,
}

/// Factorizes the `m x m` basis given column-wise by `(row indices, values)`.
/// Dependent columns are swapped for unit columns `-e_row` on unpivoted rows.
pub(crate) fn factorize(m: usize, cols: &[(&[usize], &[f64])]) -> Factorized {
    assert_eq!(cols.len(), m);
    let mut row_count = vec![0usize; m];
    for (idx, _) in cols {
        for &i in idx.iter() {
            row_count[i] += 1;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&p| cols[p].0.len());

    const UNSET: usize = usize::MAX;
    let mut row_to_step = vec![UNSET; m];
    let mut step_to_pos = Vec::with_capacity(m);
    let mut l_start = vec![0usize];
    let mut l_idx: Vec<usize> = Vec::new();
    let mut l_val: Vec<f64> = Vec::new();
    let mut u_start = vec![0usize];
    let mut u_idx: Vec<usize> = Vec::new();
    let mut u_val: Vec<f64> = Vec::new();
    let mut u_diag = Vec::with_capacity(m);

    let mut work = vec![0.0f64; m];
    let mut in_pattern = vec![false; m];
    let mut pattern: Vec<usize> = Vec::new();
    let mut visited = vec![usize::MAX; m];
    let mut topo: Vec<usize> = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut dependent: Vec<usize> = Vec::new();

    for (k_col, &pos) in order.iter().enumerate() {
        let (idx, val) = cols[pos];
        pattern.clear();
        let mut col_max = 0.0f64;
        for (&i, &v) in idx.iter().zip(val.iter()) {
            if !in_pattern[i] {
                in_pattern[i] = true;
                pattern.push(i);
            }
            work[i] += v;
            col_max = col_max.max(v.abs());
        }

        // Reach of the pattern through the pivoted part of L, in topological order.
        topo.clear();
        for p in 0..pattern.len() {
            let start = pattern[p];
            if row_to_step[start] == UNSET || visited[start] == k_col {
                continue;
            }
            visited[start] = k_col;
            stack.push((start, 0));
            while let Some(top) = stack.len().checked_sub(1) {
                let (row, child) = stack[top];
                let s = row_to_step[row];
                let (lo, hi) = (l_start[s], l_start[s + 1]);
                let mut next = lo + child;
                let mut found = None;
                while next < hi {
                    let r = l_idx[next];
                    next += 1;
                    if row_to_step[r] != UNSET && visited[r] != k_col {
                        found = Some(r);
                        break;
                    }
                }
                stack[top].1 = next - lo;
                match found {
                    Some(r) => {
                        visited[r] = k_col;
                        stack.push((r, 0));
                    }
                    None => {
                        topo.push(row);
                        stack.pop();
                    }
                }
            }
        }

        for &row in topo.iter().rev() {
            let xr = work[row];
            if xr == 0.0 {
                continue;
            }
            let s = row_to_step[row];
            for e in l_start[s]..l_start[s + 1] {
                let r = l_idx[e];
                if !in_pattern[r] {
                    in_pattern[r] = true;
                    pattern.push(r);
                }
                work[r] -= l_val[e] * xr;
            }
        }

        let mut best_abs = 0.0f64;
        for &r in &pattern {
            if row_to_step[r] == UNSET {
                best_abs = best_abs.max(work[r].abs());
            }
        }

        if best_abs <= SINGULAR_TOL * col_max.max(1.0) {
            dependent.push(pos);
            for &r in &pattern {
                work[r] = 0.0;
                in_pattern[r] = false;
            }
            continue;
        }

        let mut pivot_row = usize::MAX;
        let mut pivot_count = usize::MAX;
        let mut pivot_abs = 0.0;
        for &r in &pattern {
            if row_to_step[r] != UNSET {
                continue;
            }
            let a = work[r].abs();
            if a >= PIVOT_THRESHOLD * best_abs
                && (row_count[r] < pivot_count
                    || (row_count[r] == pivot_count && a > pivot_abs)
                    || (row_count[r] == pivot_count && a == pivot_abs && r < pivot_row))
            {
                pivot_row = r;
                pivot_count = row_count[r];
                pivot_abs = a;
            }
        }
        let pivot = work[pivot_row];
        let step = step_to_pos.len();

        for &r in &pattern {
            let v = work[r];
            if r == pivot_row || v == 0.0 {
                continue;
            }
            let rs = row_to_step[r];
            if rs != UNSET {
                u_idx.push(rs);
                u_val.push(v);
            } else {
                l_idx.push(r);
                l_val.push(v / pivot);
            }
        }
        for &r in &pattern {
            work[r] = 0.0;
            in_pattern[r] = false;
        }
        u_diag.push(pivot);
        u_start.push(u_idx.len());
        l_start.push(l_idx.len());
        row_to_step[pivot_row] = step;
        step_to_pos.push(pos);
    }

    let mut replaced = Vec::new();
    if !dependent.is_empty() {
        let free_rows: Vec<usize> = (0..m).filter(|&r| row_to_step[r] == UNSET).collect();
        debug_assert_eq!(free_rows.len(), dependent.len());
        for (&pos, &row) in dependent.iter().zip(free_rows.iter()) {
            let step = step_to_pos.len();
            u_diag.push(-1.0);
            u_start.push(u_idx.len());
            l_start.push(l_idx.len());
            row_to_step[row] = step;
            step_to_pos.push(pos);
            replaced.push((pos, row));
        }
    }

    for r in l_idx.iter_mut() {
        *r = row_to_step[*r];
    }

    Factorized {
        lu: LuFactors {
            m,
            row_to_step,
            step_to_pos,
            l_start,
            l_idx,
            l_val,
            u_start,
            u_idx,
            u_val,
            u_diag,
        },
        replaced,
    }
}

impl LuFactors {
    /// Solves `B x = rhs`. `rhs` is indexed by row, the result by basis position.
    pub(crate) fn ftran(&self, rhs: &mut [f64], scratch: &mut Vec<f64>) {
        let m = self.m;
        scratch.clear();
        scratch.resize(m, 0.0);
        for i in 0..m {
            scratch[self.row_to_step[i]] = rhs[i];
        }
        let z = scratch;
        for k in 0..m {
            let zk = z[k];
            if zk != 0.0 {
                for e in self.l_start[k]..self.l_start[k + 1] {
                    z[self.l_idx[e]] -= self.l_val[e] * zk;
                }
            }
        }
        for k in (0..m).rev() {
            let wk = z[k] / self.u_diag[k];
            z[k] = wk;
            if wk != 0.0 {
                for e in self.u_start[k]..self.u_start[k + 1] {
                    z[self.u_idx[e]] -= self.u_val[e] * wk;
                }
            }
        }
        for k in 0..m {
            rhs[self.step_to_pos[k]] = z[k];
        }
    }

    /// Solves `B^T y = rhs`. `rhs` is indexed by basis position, the result by row.
    pub(crate) fn btran(&self, rhs: &mut [f64], scratch: &mut Vec<f64>) {
        let m = self.m;
        scratch.clear();
        scratch.resize(m, 0.0);
        for k in 0..m {
            scratch[k] = rhs[self.step_to_pos[k]];
        }
        let v = scratch;
        for k in 0..m {
            let mut acc = v[k];
            for e in self.u_start[k]..self.u_start[k + 1] {
                acc -= self.u_val[e] * v[self.u_idx[e]];
            }
            v[k] = acc / self.u_diag[k];
        }
        for k in (0..m).rev() {
            let mut acc = v[k];
            for e in self.l_start[k]..self.l_start[k + 1] {
                acc -= self.l_val[e] * v[self.l_idx[e]];
            }
            v[k] = acc;
        }
        for i in 0..m {
            rhs[i] = v[self.row_to_step[i]];
        }
    }
}

/// `B^-1` represented as `E_k ... E_1 (LU)^-1`.
#[derive(Debug, Clone)]
pub(crate) struct BasisInverse {
    lu: LuFactors,
    eta_pos: Vec<usize>,
    eta_pivot: Vec<f64>,
    eta_start: Vec<usize>,
    eta_idx: Vec<usize>,
    eta_val: Vec<f64>,
    scratch: Vec<f64>,
}

impl BasisInverse {
    pub(crate) fn new(lu: LuFactors) -> Self {
        Self {
            lu,
            eta_pos: Vec::new(),
            eta_pivot: Vec::new(),
            eta_start: vec![0],
            eta_idx: Vec::new(),
            eta_val: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub(crate) fn n_updates(&self) -> usize {
        self.eta_pos.len()
    }

    /// In place: row-indexed `rhs` becomes position-indexed `B^-1 rhs`.
    pub(crate) fn ftran(&mut self, rhs: &mut [f64]) {
        self.lu.ftran(rhs, &mut self.scratch);
        for k in 0..self.eta_pos.len() {
            let p = self.eta_pos[k];
            let xp = rhs[p] / self.eta_pivot[k];
            rhs[p] = xp;
            if xp != 0.0 {
                for e in self.eta_start[k]..self.eta_start[k + 1] {
                    rhs[self.eta_idx[e]] -= self.eta_val[e] * xp;
                }
            }
        }
    }

    /// In place: position-indexed `rhs` becomes row-indexed `B^-T rhs`.
    pub(crate) fn btran(&mut self, rhs: &mut [f64]) {
        for k in (0..self.eta_pos.len()).rev() {
            let p = self.eta_pos[k];
            let mut acc = rhs[p];
            for e in self.eta_start[k]..self.eta_start[k + 1] {
                acc -= self.eta_val[e] * rhs[self.eta_idx[e]];
            }
            rhs[p] = acc / self.eta_pivot[k];
        }
        self.lu.btran(rhs, &mut self.scratch);
    }

    /// Records the replacement of the column at position `pos` by a column
    /// whose FTRAN image is `alpha`.
    pub(crate) fn update(&mut self, pos: usize, alpha: &[f64]) {
        self.eta_pos.push(pos);
        self.eta_pivot.push(alpha[pos]);
        for (i, &a) in alpha.iter().enumerate() {
            if i != pos && a != 0.0 {
                self.eta_idx.push(i);
                self.eta_val.push(a);
            }
        }
        self.eta_start.push(self.eta_idx.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(a: &[Vec<f64>]) -> Vec<(Vec<usize>, Vec<f64>)> {
        let m = a.len();
        (0..m)
            .map(|j| {
                let mut idx = Vec::new();
                let mut val = Vec::new();
                for (i, row) in a.iter().enumerate() {
                    if row[j] != 0.0 {
                        idx.push(i);
                        val.push(row[j]);
                    }
                }
                (idx, val)
            })
            .collect()
    }

    fn factor(a: &[Vec<f64>]) -> Factorized {
        let cols = dense_cols(a);
        let refs: Vec<(&[usize], &[f64])> =
            cols.iter().map(|(i, v)| (i.as_slice(), v.as_slice())).collect();
        factorize(a.len(), &refs)
    }

    fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let m = a.len();
        (0..m).map(|j| (0..m).map(|i| a[i][j]).collect()).collect()
    }

    #[test]
    fn solves_small_nonsymmetric_system() {
        let a = vec![
            vec![2.0, 0.0, 1.0, 0.0],
            vec![1.0, 3.0, 0.0, 0.0],
            vec![0.0, 1.0, 4.0, 1.0],
            vec![0.0, 0.0, 1.0, -1.0],
        ];
        let f = factor(&a);
        assert!(f.replaced.is_empty());
        let x_true = vec![1.0, -2.0, 0.5, 3.0];
        let mut b = matvec(&a, &x_true);
        let mut s = Vec::new();
        f.lu.ftran(&mut b, &mut s);
        for (u, v) in b.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
        let mut c = matvec(&transpose(&a), &x_true);
        f.lu.btran(&mut c, &mut s);
        for (u, v) in c.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn dependent_column_is_replaced_by_unit_column() {
        let a = vec![
            vec![1.0, 2.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let f = factor(&a);
        assert_eq!(f.replaced.len(), 1);
    }

    #[test]
    fn eta_updates_track_column_replacement() {
        let a = vec![
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let f = factor(&a);
        let mut inv = BasisInverse::new(f.lu);
        // Replace column 1 by (1, 0, 5).
        let new_col = vec![1.0, 0.0, 5.0];
        let mut alpha = new_col.clone();
        inv.ftran(&mut alpha);
        inv.update(1, &alpha);
        let mut b2 = a.clone();
        for i in 0..3 {
            b2[i][1] = new_col[i];
        }
        let x_true = vec![0.3, -1.0, 2.0];
        let mut rhs = matvec(&b2, &x_true);
        inv.ftran(&mut rhs);
        for (u, v) in rhs.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12, "{rhs:?}");
        }
        let mut rhs = matvec(&transpose(&b2), &x_true);
        inv.btran(&mut rhs);
        for (u, v) in rhs.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12, "{rhs:?}");
        }
    }
}
