//! Small exact linear-algebra helpers over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Solves `M x = b` for several right-hand sides at once, exactly.
/// Returns `None` when `M` is singular.
#[allow(clippy::needless_range_loop)] // index style matches the matrix math
pub fn solve_exact(matrix: &[Vec<BigInt>], rhs: &[Vec<BigInt>]) -> Option<Vec<Vec<BigRational>>> {
    let n = matrix.len();
    let m = rhs.len();
    debug_assert!(matrix.iter().all(|row| row.len() == n));
    debug_assert!(rhs.iter().all(|col| col.len() == n));

    // augmented: n x (n + m), columns n.. are the right-hand sides
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            matrix[i]
                .iter()
                .cloned()
                .chain(rhs.iter().map(|col| col[i].clone()))
                .map(BigRational::from_integer)
                .collect()
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..n + m {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }

    let mut out = vec![Vec::with_capacity(n); m];
    for (k, col) in out.iter_mut().enumerate() {
        for r in 0..n {
            col.push(&a[r][n + k] / &a[r][r]);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn solves_two_by_two() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3)],
        ];
        let b = vec![vec![BigInt::from(5), BigInt::from(10)]];
        let x = solve_exact(&m, &b).unwrap();
        assert_eq!(x[0][0], BigRational::one());
        assert_eq!(x[0][1], BigRational::from_integer(BigInt::from(3)));
    }

    #[test]
    fn singular_matrix_is_none() {
        let m = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        let b = vec![vec![BigInt::one(), BigInt::one()]];
        assert!(solve_exact(&m, &b).is_none());
    }
}
