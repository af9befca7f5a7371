//! Small dense complex linear algebra: LU with partial pivoting,
//! Householder least squares, Kronecker products and a one-sided Jacobi
//! SVD. Everything here targets matrices of dimension at most a few dozen.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};

type C = Complex64;

pub fn max_abs(a: &Array2<C>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.norm()))
}

pub fn one_norm(a: &Array2<C>) -> f64 {
    let (_, n) = a.dim();
    (0..n)
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting; returns (LU, perm, sign count).
fn lu_factor(a: &Array2<C>) -> Result<(Array2<C>, Vec<usize>, usize)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "lu_factor needs a square matrix");
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0usize;
    for col in 0..n {
        let mut pivot = col;
        let mut best = lu[[col, col]].norm();
        for r in (col + 1)..n {
            let v = lu[[r, col]].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best < 1e-300 {
            return Err(CoreError::Singular { cond: f64::INFINITY });
        }
        if pivot != col {
            for j in 0..n {
                lu.swap([col, j], [pivot, j]);
            }
            perm.swap(col, pivot);
            swaps += 1;
        }
        let d = lu[[col, col]];
        for r in (col + 1)..n {
            let f = lu[[r, col]] / d;
            lu[[r, col]] = f;
            for j in (col + 1)..n {
                let s = lu[[col, j]];
                lu[[r, j]] -= f * s;
            }
        }
    }
    Ok((lu, perm, swaps))
}

fn lu_solve_one(lu: &Array2<C>, perm: &[usize], b: &Array1<C>) -> Array1<C> {
    let n = lu.nrows();
    let mut y = Array1::<C>::zeros(n);
    for i in 0..n {
        let mut s = b[perm[i]];
        for j in 0..i {
            s -= lu[[i, j]] * y[j];
        }
        y[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= lu[[i, j]] * y[j];
        }
        y[i] = s / lu[[i, i]];
    }
    y
}

/// Solve the square system a x = b.
pub fn solve(a: &Array2<C>, b: &Array1<C>) -> Result<Array1<C>> {
    let (lu, perm, _) = lu_factor(a)?;
    Ok(lu_solve_one(&lu, &perm, b))
}

/// Matrix inverse by partial-pivot elimination.
pub fn inverse(a: &Array2<C>) -> Result<Array2<C>> {
    let n = a.nrows();
    let (lu, perm, _) = lu_factor(a)?;
    let mut inv = Array2::<C>::zeros((n, n));
    for j in 0..n {
        let mut e = Array1::<C>::zeros(n);
        e[j] = C::new(1.0, 0.0);
        let x = lu_solve_one(&lu, &perm, &e);
        inv.column_mut(j).assign(&x);
    }
    Ok(inv)
}

/// Determinant from the LU factorization.
pub fn determinant(a: &Array2<C>) -> Result<C> {
    let (lu, _, swaps) = lu_factor(a)?;
    let mut d = C::new(if swaps % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    for i in 0..lu.nrows() {
        d *= lu[[i, i]];
    }
    Ok(d)
}

/// One-norm condition estimate ||A|| ||A^-1||.
pub fn cond_one(a: &Array2<C>) -> f64 {
    match inverse(a) {
        Ok(inv) => one_norm(a) * one_norm(&inv),
        Err(_) => f64::INFINITY,
    }
}

/// Householder QR least squares: minimizes ||a x - b|| for a tall m x n
/// system. Returns the solution and a condition estimate of the R factor.
pub fn least_squares(a: &Array2<C>, b: &Array1<C>) -> Result<(Array1<C>, f64)> {
    let (m, n) = a.dim();
    assert!(m >= n, "least_squares needs m >= n");
    let mut r = a.clone();
    let mut y = b.clone();
    for col in 0..n {
        // Householder vector for column col below the diagonal.
        let mut norm2 = 0.0;
        for i in col..m {
            norm2 += r[[i, col]].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm < 1e-300 {
            return Err(CoreError::Singular { cond: f64::INFINITY });
        }
        let x0 = r[[col, col]];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C::new(1.0, 0.0) };
        let alpha = -phase * norm;
        // v = x - alpha e1, applied as H = I - 2 v v^H / ||v||^2
        let mut v: Vec<C> = (col..m).map(|i| r[[i, col]]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 > 1e-300 {
            for j in col..n {
                let mut dot = C::new(0.0, 0.0);
                for i in col..m {
                    dot += v[i - col].conj() * r[[i, j]];
                }
                let f = dot * 2.0 / vnorm2;
                for i in col..m {
                    let vi = v[i - col];
                    r[[i, j]] -= f * vi;
                }
            }
            let mut dot = C::new(0.0, 0.0);
            for i in col..m {
                dot += v[i - col].conj() * y[i];
            }
            let f = dot * 2.0 / vnorm2;
            for i in col..m {
                let vi = v[i - col];
                y[i] -= f * vi;
            }
        }
    }
    // Back substitution on the top n x n triangle.
    let mut x = Array1::<C>::zeros(n);
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= r[[i, j]] * x[j];
        }
        if r[[i, i]].norm() < 1e-300 {
            return Err(CoreError::Singular { cond: f64::INFINITY });
        }
        x[i] = s / r[[i, i]];
    }
    // cond(R) as ||R|| ||R^-1|| on the triangle.
    let mut rt = Array2::<C>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            rt[[i, j]] = r[[i, j]];
        }
    }
    let cond = cond_one(&rt);
    Ok((x, cond))
}

/// Kronecker product with row-major pair labels (i1*n2 + i2).
pub fn kron(a: &Array2<C>, b: &Array2<C>) -> Array2<C> {
    let (m1, n1) = a.dim();
    let (m2, n2) = b.dim();
    let mut out = Array2::<C>::zeros((m1 * m2, n1 * n2));
    for i1 in 0..m1 {
        for j1 in 0..n1 {
            let aij = a[[i1, j1]];
            for i2 in 0..m2 {
                for j2 in 0..n2 {
                    out[[i1 * m2 + i2, j1 * n2 + j2]] = aij * b[[i2, j2]];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Array2<C> {
    Array2::<C>::eye(n)
}

/// Singular values by one-sided Jacobi on the columns (descending order).
/// Works directly on A, so tiny trailing singular values are not lost to
/// the squaring of a normal-equations approach.
pub fn singular_values(a: &Array2<C>) -> Vec<f64> {
    let (m, n) = a.dim();
    let mut w = if m >= n { a.clone() } else { conj_transpose(a) };
    let (m, n) = w.dim();
    for _sweep in 0..40 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = C::new(0.0, 0.0);
                for i in 0..m {
                    app += w[[i, p]].norm_sqr();
                    aqq += w[[i, q]].norm_sqr();
                    apq += w[[i, p]].conj() * w[[i, q]];
                }
                let g = apq.norm();
                if g <= 1e-15 * (app * aqq).sqrt().max(1e-300) {
                    continue;
                }
                rotated = true;
                let phi = apq / g;
                let zeta = (aqq - app) / (2.0 * g);
                // smaller-magnitude root of t^2 - 2 zeta t - 1 = 0
                let t = if zeta >= 0.0 {
                    -1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phi.conj() * (t * c);
                for i in 0..m {
                    let wp = w[[i, p]];
                    let wq = w[[i, q]];
                    w[[i, p]] = wp * c + wq * s;
                    w[[i, q]] = -wp * s.conj() + wq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| w.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub fn conj_transpose(a: &Array2<C>) -> Array2<C> {
    let (m, n) = a.dim();
    let mut out = Array2::<C>::zeros((n, m));
    for i in 0..m {
        for j in 0..n {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Draws;

    fn random_matrix(d: &mut Draws, m: usize, n: usize) -> Array2<C> {
        Array2::from_shape_fn((m, n), |_| C::new(d.in_range(-1.0, 1.0), d.in_range(-1.0, 1.0)))
    }

    #[test]
    fn solve_and_inverse_roundtrip() {
        let mut d = Draws::new(5);
        let a = random_matrix(&mut d, 5, 5);
        let b = Array1::from_shape_fn(5, |_| C::new(d.in_range(-1.0, 1.0), d.in_range(-1.0, 1.0)));
        let x = solve(&a, &b).unwrap();
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.norm() < 1e-12));
        let inv = inverse(&a).unwrap();
        let id = a.dot(&inv);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[[i, j]] - C::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn determinant_of_triangular() {
        let mut a = Array2::<C>::zeros((3, 3));
        a[[0, 0]] = C::new(2.0, 0.0);
        a[[1, 1]] = C::new(0.0, 1.0);
        a[[2, 2]] = C::new(-1.0, 0.0);
        a[[0, 2]] = C::new(5.0, 3.0);
        let d = determinant(&a).unwrap();
        assert!((d - C::new(0.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_exact_solution() {
        let mut d = Draws::new(9);
        let a = random_matrix(&mut d, 8, 4);
        let x_true = Array1::from_shape_fn(4, |_| C::new(d.in_range(-1.0, 1.0), d.in_range(-1.0, 1.0)));
        let b = a.dot(&x_true);
        let (x, cond) = least_squares(&a, &b).unwrap();
        assert!(cond.is_finite());
        for i in 0..4 {
            assert!((x[i] - x_true[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn kron_matches_hand_example() {
        let a = Array2::from_shape_vec((2, 2), vec![
            C::new(1.0, 0.0), C::new(2.0, 0.0),
            C::new(0.0, 0.0), C::new(1.0, 0.0),
        ]).unwrap();
        let b = Array2::from_shape_vec((2, 2), vec![
            C::new(0.0, 1.0), C::new(0.0, 0.0),
            C::new(0.0, 0.0), C::new(0.0, 1.0),
        ]).unwrap();
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert!((k[[0, 0]] - C::new(0.0, 1.0)).norm() < 1e-15);
        assert!((k[[0, 2]] - C::new(0.0, 2.0)).norm() < 1e-15);
        assert!((k[[2, 0]] - C::new(0.0, 0.0)).norm() < 1e-15);
        assert!((k[[2, 2]] - C::new(0.0, 1.0)).norm() < 1e-15);
        assert!((k[[3, 3]] - C::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_values_of_rank_one() {
        let mut d = Draws::new(21);
        let u = Array1::from_shape_fn(5, |_| C::new(d.in_range(-1.0, 1.0), d.in_range(-1.0, 1.0)));
        let v = Array1::from_shape_fn(5, |_| C::new(d.in_range(-1.0, 1.0), d.in_range(-1.0, 1.0)));
        let a = Array2::from_shape_fn((5, 5), |(i, j)| u[i] * v[j]);
        let sv = singular_values(&a);
        assert!(sv[0] > 0.1);
        assert!(sv[1] < 1e-13 * sv[0], "sv {:?}", sv);
    }

    #[test]
    fn singular_values_frobenius_and_det_consistency() {
        let mut d = Draws::new(23);
        let a = random_matrix(&mut d, 4, 4);
        let sv = singular_values(&a);
        let fro: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let sv2: f64 = sv.iter().map(|s| s * s).sum();
        assert!((fro - sv2).abs() < 1e-10 * fro);
        let det = determinant(&a).unwrap().norm();
        let prod: f64 = sv.iter().product();
        assert!((det - prod).abs() < 1e-10 * det.max(prod));
    }
}
