//! Small dense linear algebra: Gaussian elimination and eigenvalues of real
//! matrices via the characteristic polynomial.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    if !a.is_square() || b.len() != n {
        return Err(Error::InvalidParameter(format!(
            "solve needs a square system, got {}x{} with rhs of length {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        if m[(pivot, col)].abs() <= 1e-14 * scale {
            return Err(Error::Singular(format!(
                "matrix is singular at column {col}"
            )));
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
            }
            x.swap(pivot, col);
        }
        let d = m[(col, col)];
        for i in col + 1..n {
            let factor = m[(i, col)] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[(i, j)] -= factor * m[(col, j)];
            }
            x[i] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (x[i] - s) / m[(i, i)];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("solution is not finite".into()));
    }
    Ok(x)
}

/// Determinant by elimination (zero for singular input).
pub fn determinant(a: &Matrix) -> f64 {
    assert!(a.is_square());
    let n = a.rows;
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        if m[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for i in col + 1..n {
            let factor = m[(i, col)] / d;
            for j in col..n {
                m[(i, j)] -= factor * m[(col, j)];
            }
        }
    }
    det
}

/// Coefficients `[1, c1, …, cn]` of `det(λI − A) = λⁿ + c1 λⁿ⁻¹ + … + cn`
/// by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(a: &Matrix) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows;
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = a.mul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[k - 1];
        }
        coeffs[k] = -a.mul(&next).trace() / k as f64;
        m = next;
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a monic real polynomial `[1, c1, …, cn]` by the
/// Aberth–Ehrlich iteration followed by Newton polishing.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let c: Vec<f64> = coeffs.iter().map(|v| v / lead).collect();
    let bound = 1.0 + c[1..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let radius = bound.min(
        // Fujiwara-style bound is often much tighter
        2.0 * c[1..]
            .iter()
            .enumerate()
            .map(|(k, v)| v.abs().powf(1.0 / (k + 1) as f64))
            .fold(0.0, f64::max)
            + 1e-3,
    );
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            let candidate = *zi - step;
            if horner(&c, candidate).0.norm() <= p.norm() {
                *zi = candidate;
            } else {
                break;
            }
        }
    }
    z
}

/// Eigenvalue ordering: real part descending, ties by imaginary part descending.
pub fn sort_eigenvalues(ev: &mut [Complex64]) {
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Eigenvalues of a small real square matrix: closed form for 2×2,
/// characteristic-polynomial roots otherwise.
pub fn eigenvalues(a: &Matrix) -> Vec<Complex64> {
    assert!(a.is_square(), "eigenvalues need a square matrix");
    let n = a.rows;
    let mut ev = match n {
        0 => Vec::new(),
        1 => vec![Complex64::new(a[(0, 0)], 0.0)],
        2 => eigenvalues_2x2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]).to_vec(),
        _ => {
            let mut roots = polynomial_roots(&characteristic_polynomial(a));
            let scale = 1.0 + a.max_abs();
            for r in roots.iter_mut() {
                if r.im.abs() < 1e-12 * scale {
                    r.im = 0.0;
                }
            }
            symmetrize_pairs(&mut roots);
            roots
        }
    };
    sort_eigenvalues(&mut ev);
    ev
}

/// Replaces near-conjugate root pairs by exact conjugates.
fn symmetrize_pairs(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].im <= 0.0 {
            continue;
        }
        let partner = (0..n)
            .filter(|&j| !used[j] && j != i && roots[j].im < 0.0)
            .min_by(|&j, &k| {
                (roots[j] - roots[i].conj())
                    .norm()
                    .total_cmp(&(roots[k] - roots[i].conj()).norm())
            });
        if let Some(j) = partner {
            let re = 0.5 * (roots[i].re + roots[j].re);
            let im = 0.5 * (roots[i].im - roots[j].im);
            roots[i] = Complex64::new(re, im);
            roots[j] = Complex64::new(re, -im);
            used[i] = true;
            used[j] = true;
        }
    }
}

fn eigenvalues_2x2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let half_tr = 0.5 * (a + d);
    let det = a * d - b * c;
    // discriminant written to avoid cancellation in tr²/4 − det
    let disc = 0.25 * (a - d) * (a - d) + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let big = if half_tr >= 0.0 {
            half_tr + s
        } else {
            half_tr - s
        };
        let small = if big != 0.0 { det / big } else { 0.0 };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half_tr, s), Complex64::new(half_tr, -s)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn diagonal_and_rotation() {
        let ev = eigenvalues(&Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]));
        assert_eq!(ev, vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);
        let ev = eigenvalues(&Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]));
        assert!(close(ev[0], Complex64::new(0.0, 1.0), 1e-15));
        assert!(close(ev[1], Complex64::new(0.0, -1.0), 1e-15));
    }

    #[test]
    fn solve_small_system() {
        let a = Matrix::from_rows(&[
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![3.0, 0.0, 1.0],
        ]);
        let expected = [1.0, 2.0, 3.0];
        let b: Vec<f64> = (0..3)
            .map(|i| (0..3).map(|j| a[(i, j)] * expected[j]).sum())
            .collect();
        assert_eq!(b, vec![7.0, 3.0, 6.0]);
        let x = solve(&a, &b).unwrap();
        for (xi, e) in x.iter().zip(expected) {
            assert!((xi - e).abs() < 1e-14);
        }
        let sing = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&sing, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn characteristic_polynomial_of_companion() {
        // companion of λ⁴ − 10λ³ + 35λ² − 50λ + 24 = (λ−1)(λ−2)(λ−3)(λ−4)
        let a = Matrix::from_rows(&[
            vec![10.0, -35.0, 50.0, -24.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ]);
        let c = characteristic_polynomial(&a);
        for (ci, e) in c.iter().zip([1.0, -10.0, 35.0, -50.0, 24.0]) {
            assert!((ci - e).abs() < 1e-10);
        }
        let ev = eigenvalues(&a);
        for (e, want) in ev.iter().zip([4.0, 3.0, 2.0, 1.0]) {
            assert!(close(*e, Complex64::new(want, 0.0), 1e-10));
        }
    }

    #[test]
    fn determinant_matches_product_of_eigenvalues() {
        let a = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.0, 0.5],
            vec![-1.0, 3.0, 1.0, 0.0],
            vec![0.0, 0.2, -1.0, 1.0],
            vec![0.3, 0.0, 0.0, 1.5],
        ]);
        let prod: Complex64 = eigenvalues(&a).iter().product();
        assert!((prod.re - determinant(&a)).abs() < 1e-9);
        assert!(prod.im.abs() < 1e-9);
    }

    /// `A = S D S⁻¹` with `D` block diagonal, built from a random `S`.
    fn similar_to(blocks: &[(f64, f64)], s: &Matrix) -> Matrix {
        let n = s.rows();
        let mut d = Matrix::zeros(n, n);
        let mut i = 0;
        for &(re, im) in blocks {
            if im == 0.0 {
                d[(i, i)] = re;
                i += 1;
            } else {
                d[(i, i)] = re;
                d[(i + 1, i + 1)] = re;
                d[(i, i + 1)] = im;
                d[(i + 1, i)] = -im;
                i += 2;
            }
        }
        let mut s_inv = Matrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = solve(s, &e).unwrap();
            for (r, v) in col.into_iter().enumerate() {
                s_inv[(r, j)] = v;
            }
        }
        s.mul(&d).mul(&s_inv)
    }

    proptest! {
        #[test]
        fn recovers_constructed_spectrum(
            s_entries in proptest::collection::vec(-1.0f64..1.0, 16),
            re in proptest::collection::vec(-3.0f64..3.0, 4),
            im in 0.2f64..2.0,
            complex_pair in any::<bool>(),
        ) {
            let mut s = Matrix::identity(4);
            for (k, v) in s_entries.iter().enumerate() {
                s[(k / 4, k % 4)] += 0.3 * v;
            }
            prop_assume!(determinant(&s).abs() > 0.2);
            let mut wanted: Vec<Complex64>;
            let blocks: Vec<(f64, f64)> = if complex_pair {
                prop_assume!((re[1] - re[2]).abs() > 0.1);
                wanted = vec![
                    Complex64::new(re[0], im),
                    Complex64::new(re[0], -im),
                    Complex64::new(re[1], 0.0),
                    Complex64::new(re[2], 0.0),
                ];
                vec![(re[0], im), (re[1], 0.0), (re[2], 0.0)]
            } else {
                for i in 0..4 {
                    for j in 0..i {
                        prop_assume!((re[i] - re[j]).abs() > 0.1);
                    }
                }
                wanted = re.iter().map(|&r| Complex64::new(r, 0.0)).collect();
                re.iter().map(|&r| (r, 0.0)).collect()
            };
            let a = similar_to(&blocks, &s);
            sort_eigenvalues(&mut wanted);
            let got = eigenvalues(&a);
            for (g, w) in got.iter().zip(&wanted) {
                prop_assert!((g - w).norm() < 1e-8, "got {:?} want {:?}", got, wanted);
            }
        }

        #[test]
        fn two_by_two_matches_trace_and_determinant(
            a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0,
        ) {
            let m = Matrix::from_rows(&[vec![a, b], vec![c, d]]);
            let ev = eigenvalues(&m);
            let sum = ev[0] + ev[1];
            let prod = ev[0] * ev[1];
            prop_assert!((sum.re - (a + d)).abs() < 1e-10 && sum.im.abs() < 1e-10);
            prop_assert!((prod.re - (a * d - b * c)).abs() < 1e-8 && prod.im.abs() < 1e-8);
        }
    }
}
