//! Dense two-phase simplex for the small equality-constrained linear
//! programs arising in the hidden-model searches (tens of variables).

use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
}

const EPS: f64 = 1e-11;
const PIVOT_EPS: f64 = 1e-9;

/// Minimize cᵀx subject to A x = b, x ≥ 0.
pub fn minimize(c: &[f64], a: &DMatrix<f64>, b: &[f64]) -> LpResult {
    let m = a.nrows();
    let n = a.ncols();
    debug_assert_eq!(c.len(), n);
    debug_assert_eq!(b.len(), m);

    // Tableau over real + artificial variables, RHS in the last column.
    let cols = n + m + 1;
    let mut t = DMatrix::<f64>::zeros(m, cols);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = flip * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, cols - 1)] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials.
    let mut z = vec![0.0; cols];
    for j in 0..cols {
        let mut s = 0.0;
        for i in 0..m {
            s += t[(i, j)];
        }
        z[j] = -s;
    }
    for j in n..n + m {
        z[j] += 1.0;
    }
    if !pivot_loop(&mut t, &mut z, &mut basis, n + m) {
        return LpResult {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            x: vec![0.0; n],
        };
    }
    let phase1_obj = -z[cols - 1];
    if phase1_obj > 1e-7 {
        return LpResult {
            status: LpStatus::Infeasible,
            objective: phase1_obj,
            x: vec![0.0; n],
        };
    }

    // Drive leftover artificials out of the basis.
    for i in 0..m {
        if basis[i] >= n {
            let mut pivot_col = None;
            for j in 0..n {
                if t[(i, j)].abs() > PIVOT_EPS {
                    pivot_col = Some(j);
                    break;
                }
            }
            // A row with no real pivot is a redundant constraint; the
            // artificial stays basic at value zero, which is harmless.
            if let Some(j) = pivot_col {
                pivot(&mut t, &mut z, &mut basis, i, j);
            }
        }
    }

    // Phase 2 objective row in terms of the current basis.
    let mut z2 = vec![0.0; cols];
    for (j, &cj) in c.iter().enumerate() {
        z2[j] = cj;
    }
    for j in n..n + m {
        z2[j] = f64::INFINITY; // artificials blocked
    }
    for i in 0..m {
        if basis[i] < n {
            let cb = c[basis[i]];
            if cb != 0.0 {
                for j in 0..cols {
                    if z2[j].is_finite() {
                        z2[j] -= cb * t[(i, j)];
                    }
                }
            }
        }
    }
    for j in n..n + m {
        z2[j] = f64::INFINITY;
    }
    if !pivot_loop(&mut t, &mut z2, &mut basis, n) {
        return LpResult {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            x: vec![0.0; n],
        };
    }

    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[(i, cols - 1)];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpResult {
        status: LpStatus::Optimal,
        objective,
        x,
    }
}

fn pivot(t: &mut DMatrix<f64>, z: &mut [f64], basis: &mut [usize], row: usize, col: usize) {
    let cols = t.ncols();
    let pv = t[(row, col)];
    for j in 0..cols {
        t[(row, j)] /= pv;
    }
    for i in 0..t.nrows() {
        if i != row {
            let f = t[(i, col)];
            if f.abs() > EPS {
                for j in 0..cols {
                    t[(i, j)] -= f * t[(row, j)];
                }
            }
        }
    }
    let zf = z[col];
    if zf.abs() > EPS {
        for j in 0..cols {
            if z[j].is_finite() {
                z[j] -= zf * t[(row, j)];
            }
        }
    }
    basis[row] = col;
}

/// Returns false on unboundedness. `eligible` limits entering columns.
fn pivot_loop(t: &mut DMatrix<f64>, z: &mut [f64], basis: &mut [usize], eligible: usize) -> bool {
    let m = t.nrows();
    let cols = t.ncols();
    let max_iters = 200 * (m + eligible);
    for iter in 0..max_iters {
        // Dantzig pricing early, Bland's rule later to exclude cycling.
        let bland = iter > 50 * (m + 1);
        let mut enter = None;
        let mut best = -EPS;
        for j in 0..eligible {
            if !z[j].is_finite() {
                continue;
            }
            if bland {
                if z[j] < -EPS {
                    enter = Some(j);
                    break;
                }
            } else if z[j] < best {
                best = z[j];
                enter = Some(j);
            }
        }
        let Some(col) = enter else {
            return true;
        };
        let mut leave = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let aij = t[(i, col)];
            if aij > PIVOT_EPS {
                let ratio = t[(i, cols - 1)] / aij;
                if ratio < best_ratio - EPS
                    || (ratio < best_ratio + EPS
                        && leave.is_some_and(|l: usize| basis[i] < basis[l]))
                {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return false;
        };
        pivot(t, z, basis, row, col);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_small_equality_lp() {
        // min x0 + 2 x1 s.t. x0 + x1 = 1, x >= 0 -> x = (1, 0).
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let r = minimize(&[1.0, 2.0], &a, &[1.0]);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_relative_eq!(r.objective, 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        // x0 = 1 and x0 = 2 cannot both hold.
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let r = minimize(&[0.0], &a, &[1.0, 2.0]);
        assert_eq!(r.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        // min -x0 with x0 - x1 = 0: slide both to infinity.
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let r = minimize(&[-1.0, 0.0], &a, &[0.0]);
        assert_eq!(r.status, LpStatus::Unbounded);
    }

    #[test]
    fn handles_redundant_rows() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let r = minimize(&[1.0, 3.0], &a, &[1.0, 2.0]);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_relative_eq!(r.objective, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn minimax_style_lp() {
        // min t s.t. x - t <= 0.4 and x + t >= 0.4 via slacks, x + s = 1:
        // choose x freely in [0,1]; optimum t = 0 at x = 0.4.
        // Encoded: x - t + s1 = 0.4; x + t - s2 = 0.4; x + s3 = 1.
        let a = DMatrix::from_row_slice(
            3,
            5,
            &[
                1.0, -1.0, 1.0, 0.0, 0.0, //
                1.0, 1.0, 0.0, -1.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, 1.0,
            ],
        );
        let r = minimize(&[0.0, 1.0, 0.0, 0.0, 0.0], &a, &[0.4, 0.4, 1.0]);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.objective.abs() < 1e-9);
    }
}
