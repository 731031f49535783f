//! Multiprecision helpers: dense Gaussian elimination on MPFR floats.

use rug::Float;

pub(crate) fn fl(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub(crate) fn factorial(prec: u32, n: u32) -> Float {
    Float::with_val(prec, Float::factorial(n))
}

pub(crate) fn powi(x: &Float, e: u32) -> Float {
    use rug::ops::Pow;
    x.clone().pow(e)
}

/// LU with partial pivoting, returning the row permutation and determinant.
struct Lu {
    a: Vec<Vec<Float>>,
    perm: Vec<usize>,
    det: Float,
}

fn lu(mut a: Vec<Vec<Float>>, prec: u32) -> Option<Lu> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = fl(prec, 1.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].cmp_abs(&a[j][col]).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[pivot][col].is_zero() {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            perm.swap(pivot, col);
            det = -det;
        }
        det *= &a[col][col];
        let (head, tail) = a.split_at_mut(col + 1);
        let prow = &head[col];
        for row in tail.iter_mut() {
            let factor = Float::with_val(prec, &row[col] / &prow[col]);
            for c in col + 1..n {
                let t = Float::with_val(prec, &factor * &prow[c]);
                row[c] -= t;
            }
            row[col] = factor;
        }
    }
    Some(Lu { a, perm, det })
}

fn lu_solve(lu: &Lu, b: &[Float], prec: u32) -> Vec<Float> {
    let n = lu.a.len();
    let mut y: Vec<Float> = lu.perm.iter().map(|&p| b[p].clone()).collect();
    for i in 0..n {
        for j in 0..i {
            let t = Float::with_val(prec, &lu.a[i][j] * &y[j]);
            y[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let t = Float::with_val(prec, &lu.a[i][j] * &y[j]);
            y[i] -= t;
        }
        y[i] /= &lu.a[i][i];
    }
    y
}

/// Solves `a x = b`; returns `(x, det a)`.
pub(crate) fn solve_with_det(a: Vec<Vec<Float>>, b: &[Float], prec: u32) -> Option<(Vec<Float>, Float)> {
    let f = lu(a, prec)?;
    let x = lu_solve(&f, b, prec);
    Some((x, f.det))
}

/// Inverse and determinant of a small dense matrix.
pub(crate) fn inverse_with_det(a: Vec<Vec<Float>>, prec: u32) -> Option<(Vec<Vec<Float>>, Float)> {
    let n = a.len();
    let f = lu(a, prec)?;
    let mut inv = vec![vec![fl(prec, 0.0); n]; n];
    for c in 0..n {
        let mut e = vec![fl(prec, 0.0); n];
        e[c] = fl(prec, 1.0);
        let col = lu_solve(&f, &e, prec);
        for (r, v) in col.into_iter().enumerate() {
            inv[r][c] = v;
        }
    }
    Some((inv, f.det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let p = 128;
        let a = vec![
            vec![fl(p, 2.0), fl(p, 1.0), fl(p, 0.0)],
            vec![fl(p, 1.0), fl(p, 3.0), fl(p, 1.0)],
            vec![fl(p, 0.0), fl(p, 1.0), fl(p, 4.0)],
        ];
        let b = vec![fl(p, 1.0), fl(p, 2.0), fl(p, 3.0)];
        let (x, det) = solve_with_det(a.clone(), &b, p).unwrap();
        assert!((det.to_f64() - 18.0).abs() < 1e-30);
        for i in 0..3 {
            let mut s = fl(p, 0.0);
            for j in 0..3 {
                s += Float::with_val(p, &a[i][j] * &x[j]);
            }
            assert!((s.to_f64() - b[i].to_f64()).abs() < 1e-30);
        }
        let (inv, d2) = inverse_with_det(a.clone(), p).unwrap();
        assert_eq!(det, d2);
        assert!((inv[0][0].to_f64() - 11.0 / 18.0).abs() < 1e-30);
    }

    #[test]
    fn singular_is_none() {
        let p = 64;
        let a = vec![vec![fl(p, 1.0), fl(p, 2.0)], vec![fl(p, 2.0), fl(p, 4.0)]];
        assert!(inverse_with_det(a, p).is_none());
    }
}
