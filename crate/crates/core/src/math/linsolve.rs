use crate::scalar::Scalar;

/// Solves the dense system `A x = b` in place via Gaussian elimination with
/// partial pivoting. `a` is row-major `n × n`; `b` becomes the solution.
///
/// Returns `false` when the matrix is numerically singular. Sized for the
/// small systems of the IK solver (at most 6 rows per end effector).
pub fn solve_in_place<S: Scalar>(a: &mut [S], b: &mut [S], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < S::of(1e-300) || !pivot_val.is_finite() {
            return false;
        }
        if pivot_row != col {
            for k in col..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == S::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] = a[row * n + k] - factor * v;
            }
            b[row] = b[row] - factor * b[col];
        }
    }

    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    true
}
