//! Phase-one simplex for `A x = b, x ≥ 0` on a dense tableau with Bland's
//! pivoting rule.

use crate::linalg::{RMat, RVec};

const PIVOT_EPS: f64 = 1e-11;

/// A nonnegative solution of `A x = b`, or `None` when the artificial
/// objective cannot be driven below `feas_tol · max(1, ‖b‖₁)`.
pub fn phase_one(a: &RMat, b: &RVec, feas_tol: f64) -> Option<RVec> {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m, "rhs length does not match constraint rows");
    // Columns: n structural, m artificial, then rhs.
    let cols = n + m + 1;
    let mut t = RMat::zeros(m + 1, cols);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, cols - 1)] = sign * b[i];
    }
    // Objective row holds reduced costs of minimizing the artificial sum.
    for j in 0..cols {
        let s: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = if (n..n + m).contains(&j) { 0.0 } else { -s };
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let scale = 1.0f64.max(b.iter().map(|x| x.abs()).sum());

    let max_pivots = 50 * (n + m).max(1);
    for _ in 0..max_pivots {
        // Bland: lowest-index column with negative reduced cost.
        let Some(enter) = (0..n + m).find(|&j| t[(m, j)] < -PIVOT_EPS * scale) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let aij = t[(i, enter)];
            if aij > PIVOT_EPS {
                let ratio = t[(i, cols - 1)] / aij;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            // Unbounded direction; cannot happen for a phase-one objective
            // bounded below by zero.
            break;
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
    }

    let infeasibility = -t[(m, cols - 1)];
    if infeasibility.abs() > feas_tol * scale {
        return None;
    }
    let mut x = RVec::zeros(n);
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[(i, cols - 1)].max(0.0);
        }
    }
    Some(x)
}

fn pivot(t: &mut RMat, row: usize, col: usize) {
    let p = t[(row, col)];
    let cols = t.ncols();
    for j in 0..cols {
        t[(row, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i == row {
            continue;
        }
        let f = t[(i, col)];
        if f != 0.0 {
            for j in 0..cols {
                let v = t[(row, j)];
                t[(i, j)] -= f * v;
            }
        }
    }
}

/// Weights `α ∈ [0,1]^m` with `Σα = total` and `Σ αₖ vₖ = 0`.
pub fn box_weights(vs: &[RVec], total: f64, feas_tol: f64) -> Option<Vec<f64>> {
    let m = vs.len();
    if m == 0 {
        return None;
    }
    let k = vs[0].len();
    // Variables: α (m), slack s (m) with α + s = 1.
    let rows = 1 + k + m;
    let mut a = RMat::zeros(rows, 2 * m);
    let mut b = RVec::zeros(rows);
    for w in 0..m {
        a[(0, w)] = 1.0;
        for c in 0..k {
            a[(1 + c, w)] = vs[w][c];
        }
        a[(1 + k + w, w)] = 1.0;
        a[(1 + k + w, m + w)] = 1.0;
        b[1 + k + w] = 1.0;
    }
    b[0] = total;
    let x = phase_one(&a, &b, feas_tol)?;
    Some((0..m).map(|w| x[w].clamp(0.0, 1.0)).collect())
}
