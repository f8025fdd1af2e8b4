//! Small dense linear solvers shared by the nodal analysis, the
//! load-modulation solve, and the fitting routine.

use alloc::vec::Vec;
use num_complex::Complex64;

/// Solves `a * x = b` in place by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the matrix is singular to working precision (the best
/// available pivot is below `1e-14` times the largest initial entry).
pub(crate) fn solve_complex(
    mut a: Vec<Vec<Complex64>>,
    mut b: Vec<Complex64>,
) -> Option<Vec<Complex64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));

    let mut scale = 0.0f64;
    for row in &a {
        for entry in row {
            scale = scale.max(entry.norm_sqr());
        }
    }
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let floor = scale * 1e-28;

    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col][col].norm_sqr();
        for row in (col + 1)..n {
            let mag = a[row][col].norm_sqr();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if !(best > floor) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);

        let diag = a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] / diag;
            if factor == Complex64::ZERO {
                continue;
            }
            a[row][col] = Complex64::ZERO;
            for k in (col + 1)..n {
                let sub = factor * a[col][k];
                a[row][k] -= sub;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }

    let mut x = b;
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Solves the real system `a * x = b`, used for the fitter's normal equations.
pub(crate) fn solve_real(a: Vec<Vec<f64>>, b: Vec<f64>) -> Option<Vec<f64>> {
    let ac = a
        .into_iter()
        .map(|row| row.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        .collect();
    let bc = b.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    solve_complex(ac, bc).map(|x| x.into_iter().map(|v| v.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn solves_small_complex_system() {
        let j = Complex64::i();
        let a = vec![
            vec![Complex64::new(2.0, 0.0), j],
            vec![-j, Complex64::new(1.0, 0.0)],
        ];
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let x = solve_complex(a, b).unwrap();
        // Verify by substitution.
        let r0 = Complex64::new(2.0, 0.0) * x[0] + j * x[1] - Complex64::new(1.0, 0.0);
        let r1 = -j * x[0] + x[1];
        assert!(r0.norm() < 1e-12 && r1.norm() < 1e-12);
    }

    #[test]
    fn rejects_singular_matrix() {
        let one = Complex64::new(1.0, 0.0);
        let a = vec![vec![one, one], vec![one, one]];
        let b = vec![one, one];
        assert!(solve_complex(a, b).is_none());
    }

    #[test]
    fn solves_real_system() {
        let a = vec![vec![3.0, 1.0], vec![1.0, 2.0]];
        let b = vec![5.0, 5.0];
        let x = solve_real(a, b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
