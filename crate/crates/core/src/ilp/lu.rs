//! Sparse LU factorization of a simplex basis.
//!
//! Left-looking Gilbert-Peierls elimination with partial pivoting by
//! magnitude. Columns are processed singleton-first (sorted by count), which
//! keeps fill near zero for the slack-heavy bases that scheduling LPs
//! produce. Solves are exposed as FTRAN (`B z = v`) and BTRAN (`Bᵀ y = c`);
//! the simplex layers product-form eta updates on top between
//! refactorizations.

/// The basis matrix is numerically singular: no usable pivot was found for
/// some column.
#[derive(Debug, Clone)]
pub(crate) struct SingularBasis {
    pub column: usize,
    pub best_pivot: f64,
}

pub(crate) struct LuFactors {
    m: usize,
    /// Row pivoted at elimination step `k`.
    pivot_row: Vec<u32>,
    /// Step at which each row was pivoted.
    step_of_row: Vec<u32>,
    /// Basis slot whose column was processed at step `k`.
    slot_of_step: Vec<u32>,
    /// Multiplier columns: `(row, value)` with rows unpivoted at step time.
    l_cols: Vec<Vec<(u32, f64)>>,
    /// Above-diagonal entries of each factored column: `(step, value)`.
    u_cols: Vec<Vec<(u32, f64)>>,
    u_diag: Vec<f64>,
}

impl LuFactors {
    /// Factorizes the basis given as one sparse column per slot.
    pub fn factorize(
        m: usize,
        basis_cols: &[Vec<(u32, f64)>],
        pivot_tol: f64,
    ) -> Result<Self, SingularBasis> {
        assert_eq!(basis_cols.len(), m);

        // Singleton and near-singleton columns first.
        let mut order: Vec<u32> = (0..m as u32).collect();
        order.sort_by_key(|&s| (basis_cols[s as usize].len(), s));

        let mut lu = LuFactors {
            m,
            pivot_row: Vec::with_capacity(m),
            step_of_row: vec![u32::MAX; m],
            slot_of_step: Vec::with_capacity(m),
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
        };

        let mut work = vec![0.0f64; m];
        let mut visited = vec![u32::MAX; m];
        let mut postorder: Vec<u32> = Vec::with_capacity(64);
        let mut stack: Vec<(u32, usize)> = Vec::with_capacity(64);

        for (k, &slot) in order.iter().enumerate() {
            let col = &basis_cols[slot as usize];
            let stamp = k as u32;

            // Symbolic: rows reachable from the column pattern through the
            // multiplier structure, in reverse topological order.
            postorder.clear();
            for &(r, _) in col {
                if visited[r as usize] == stamp {
                    continue;
                }
                visited[r as usize] = stamp;
                stack.push((r, 0));
                while let Some(&mut (row, ref mut next)) = stack.last_mut() {
                    let step = lu.step_of_row[row as usize];
                    let children: &[(u32, f64)] = if step == u32::MAX {
                        &[]
                    } else {
                        &lu.l_cols[step as usize]
                    };
                    if *next < children.len() {
                        let child = children[*next].0;
                        *next += 1;
                        if visited[child as usize] != stamp {
                            visited[child as usize] = stamp;
                            stack.push((child, 0));
                        }
                    } else {
                        postorder.push(row);
                        stack.pop();
                    }
                }
            }

            // Numeric: scatter the column, then eliminate in dependency order.
            for &(r, v) in col {
                work[r as usize] = v;
            }
            for &r in postorder.iter().rev() {
                let step = lu.step_of_row[r as usize];
                if step == u32::MAX {
                    continue;
                }
                let alpha = work[r as usize];
                if alpha != 0.0 {
                    for &(child, lv) in &lu.l_cols[step as usize] {
                        work[child as usize] -= alpha * lv;
                    }
                }
            }

            // Partial pivoting: largest magnitude among unpivoted rows,
            // lowest row index on ties.
            let mut pivot_r = u32::MAX;
            let mut pivot_abs = 0.0f64;
            for &r in &postorder {
                if lu.step_of_row[r as usize] == u32::MAX {
                    let a = work[r as usize].abs();
                    if a > pivot_abs || (a == pivot_abs && a > 0.0 && r < pivot_r) {
                        pivot_abs = a;
                        pivot_r = r;
                    }
                }
            }
            if pivot_abs < pivot_tol {
                return Err(SingularBasis {
                    column: slot as usize,
                    best_pivot: pivot_abs,
                });
            }
            let diag = work[pivot_r as usize];

            let mut l_col = Vec::new();
            let mut u_col = Vec::new();
            for &r in &postorder {
                let v = work[r as usize];
                work[r as usize] = 0.0;
                if v == 0.0 {
                    continue;
                }
                let step = lu.step_of_row[r as usize];
                if step != u32::MAX {
                    u_col.push((step, v));
                } else if r != pivot_r {
                    l_col.push((r, v / diag));
                }
            }

            lu.step_of_row[pivot_r as usize] = k as u32;
            lu.pivot_row.push(pivot_r);
            lu.slot_of_step.push(slot);
            lu.l_cols.push(l_col);
            lu.u_cols.push(u_col);
            lu.u_diag.push(diag);
        }

        Ok(lu)
    }

    /// Solves `B z = v`. `v_rows` (indexed by row) is consumed as scratch;
    /// the solution indexed by basis slot is written to `z_slots`.
    pub fn ftran(&self, v_rows: &mut [f64], z_slots: &mut [f64]) {
        for k in 0..self.m {
            let alpha = v_rows[self.pivot_row[k] as usize];
            if alpha != 0.0 {
                for &(r, lv) in &self.l_cols[k] {
                    v_rows[r as usize] -= alpha * lv;
                }
            }
        }
        for k in (0..self.m).rev() {
            let pr = self.pivot_row[k] as usize;
            let y = v_rows[pr] / self.u_diag[k];
            v_rows[pr] = 0.0;
            z_slots[self.slot_of_step[k] as usize] = y;
            if y != 0.0 {
                for &(s, uv) in &self.u_cols[k] {
                    v_rows[self.pivot_row[s as usize] as usize] -= uv * y;
                }
            }
        }
    }

    /// Solves `Bᵀ y = c`. `c_slots` (indexed by basis slot) is consumed as
    /// scratch; the solution indexed by row is written to `y_rows`.
    pub fn btran(&self, c_slots: &mut [f64], y_rows: &mut [f64], g_steps: &mut [f64]) {
        for k in 0..self.m {
            let mut acc = c_slots[self.slot_of_step[k] as usize];
            for &(s, uv) in &self.u_cols[k] {
                acc -= uv * g_steps[s as usize];
            }
            g_steps[k] = acc / self.u_diag[k];
        }
        for k in 0..self.m {
            c_slots[self.slot_of_step[k] as usize] = 0.0;
            y_rows[self.pivot_row[k] as usize] = g_steps[k];
        }
        for k in (0..self.m).rev() {
            let pr = self.pivot_row[k] as usize;
            let mut acc = y_rows[pr];
            for &(r, lv) in &self.l_cols[k] {
                acc -= lv * y_rows[r as usize];
            }
            y_rows[pr] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
        let mut x = b.to_vec();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
            if m[piv][col].abs() < 1e-12 {
                return None;
            }
            m.swap(col, piv);
            x.swap(col, piv);
            for r in 0..n {
                if r != col && m[r][col] != 0.0 {
                    let f = m[r][col] / m[col][col];
                    for c in col..n {
                        m[r][c] -= f * m[col][c];
                    }
                    x[r] -= f * x[col];
                }
            }
        }
        Some((0..n).map(|i| x[i] / m[i][i]).collect())
    }

    fn to_cols(a: &[Vec<f64>]) -> Vec<Vec<(u32, f64)>> {
        let n = a.len();
        (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&i| a[i][j] != 0.0)
                    .map(|i| (i as u32, a[i][j]))
                    .collect()
            })
            .collect()
    }

    fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| a[j][i]).collect())
            .collect()
    }

    // Deterministic xorshift so the test needs no RNG dependency here.
    struct Xs(u64);
    impl Xs {
        fn next(&mut self) -> u64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            self.0
        }
        fn f(&mut self) -> f64 {
            (self.next() % 2001) as f64 / 1000.0 - 1.0
        }
    }

    #[test]
    fn matches_dense_solver_on_random_matrices() {
        let mut rng = Xs(0x5eed);
        let mut tested = 0;
        for n in [1usize, 2, 3, 5, 8, 13, 21] {
            for _ in 0..20 {
                let mut a = vec![vec![0.0; n]; n];
                for (i, row) in a.iter_mut().enumerate() {
                    for (j, cell) in row.iter_mut().enumerate() {
                        if rng.next() % 100 < 40 || i == j {
                            *cell = rng.f();
                        }
                    }
                    // keep it comfortably nonsingular
                    row[i] += 3.0;
                }
                let b: Vec<f64> = (0..n).map(|_| rng.f()).collect();
                let expect = dense_solve(&a, &b).unwrap();

                let lu = LuFactors::factorize(n, &to_cols(&a), 1e-11).unwrap();
                let mut v = b.clone();
                let mut z = vec![0.0; n];
                lu.ftran(&mut v, &mut z);
                for i in 0..n {
                    assert!((z[i] - expect[i]).abs() < 1e-8, "ftran n={n} i={i}");
                    assert!(v[i].abs() < 1e-12, "scratch not cleared");
                }

                let expect_t = dense_solve(&transpose(&a), &b).unwrap();
                let mut c = b.clone();
                let mut y = vec![0.0; n];
                let mut g = vec![0.0; n];
                lu.btran(&mut c, &mut y, &mut g);
                for i in 0..n {
                    assert!((y[i] - expect_t[i]).abs() < 1e-8, "btran n={n} i={i}");
                    assert!(c[i].abs() < 1e-12, "scratch not cleared");
                }
                tested += 1;
            }
        }
        assert!(tested > 100);
    }

    #[test]
    fn reports_singular_basis() {
        // Two identical columns.
        let cols = vec![vec![(0u32, 1.0), (1u32, 2.0)], vec![(0u32, 1.0), (1u32, 2.0)]];
        assert!(LuFactors::factorize(2, &cols, 1e-11).is_err());
    }
}
