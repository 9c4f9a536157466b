use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use super::{AlgebraError, GaussianRational};

/// Dense rectangular matrix over Q(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GaussianRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, GaussianRational::one());
        }
        m
    }

    pub fn diagonal(entries: &[GaussianRational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (k, e) in entries.iter().enumerate() {
            m.set(k, k, e.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::RaggedMatrix);
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Convenience for integer test matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| GaussianRational::from_int(v)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
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

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[GaussianRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(GaussianRational::is_real)
    }

    pub fn is_diagonal(&self) -> bool {
        self.off_diagonal_nonzeros().is_empty()
    }

    pub fn off_diagonal_nonzeros(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c && !self.get(r, c).is_zero() {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn diag(&self) -> Vec<GaussianRational> {
        (0..self.rows.min(self.cols)).map(|k| self.get(k, k).clone()).collect()
    }

    pub fn trace(&self) -> GaussianRational {
        let mut t = GaussianRational::zero();
        for k in 0..self.rows.min(self.cols) {
            t += self.get(k, k);
        }
        t
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    /// Conjugate transpose `A^+`.
    pub fn adjoint(&self) -> Self {
        let mut m = self.transpose();
        for v in &mut m.data {
            *v = v.conj();
        }
        m
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = GaussianRational::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// `[self, other] = self*other - other*self`
    pub fn commutator(&self, other: &ExactMatrix) -> ExactMatrix {
        &(self * other) - &(other * self)
    }

    pub fn commutes_with(&self, other: &ExactMatrix) -> bool {
        self.commutator(other).is_zero()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inv().unwrap();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let sub = &factor * m.get(row, c);
                    if !sub.is_zero() {
                        let v = m.get(r, c) - &sub;
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column, in
    /// increasing free-column order.
    pub fn nullspace(&self) -> Vec<Vec<GaussianRational>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[free] = GaussianRational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// A particular solution of `self * x = b` (free variables set to zero),
    /// or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = ExactMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = red.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = ExactMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, GaussianRational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = ExactMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c).clone());
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> GaussianRational {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = GaussianRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return GaussianRational::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for r in col + 1..n {
                let factor = m.get(r, col) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.get(r, c) - &(&factor * m.get(col, c));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// Coefficients `[1, c_1, ..., c_n]` of `det(I - z A)` as a polynomial in
    /// `z`, via the Faddeev-LeVerrier recursion.
    pub fn det_one_minus_z(&self) -> Vec<GaussianRational> {
        assert!(self.is_square());
        let n = self.rows;
        // char poly det(tI - A) = t^n + a_{n-1} t^{n-1} + ... + a_0
        // det(I - zA) = 1 + a_{n-1} z + ... + a_0 z^n
        let mut coeffs = vec![GaussianRational::one()];
        let mut m = ExactMatrix::zeros(n, n);
        let id = ExactMatrix::identity(n);
        let mut prev = GaussianRational::one();
        for k in 1..=n {
            m = &(self * &m) + &id.scale(&prev);
            let am = self * &m;
            let ck = -(am.trace() / GaussianRational::from_int(k as i64));
            coeffs.push(ck.clone());
            prev = ck;
        }
        coeffs
    }

    pub fn pow(&self, e: u32) -> ExactMatrix {
        let mut acc = ExactMatrix::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<'b> Mul<&'b ExactMatrix> for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &'b ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + &(a * b);
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }
}

impl<'b> Add<&'b ExactMatrix> for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &'b ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'b> Sub<&'b ExactMatrix> for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &'b ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix shape mismatch");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let a = ExactMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.determinant(), GaussianRational::one());
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, ExactMatrix::identity(2));
        assert!(ExactMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = ExactMatrix::from_i64(&[&[1, 2, 3]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = ExactMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        let b = [GaussianRational::one(), GaussianRational::one()];
        assert!(a.solve(&b).is_none());
        let b = [GaussianRational::one(), GaussianRational::from_int(2)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b.to_vec());
    }

    #[test]
    fn faddeev_leverrier_matches_rotation() {
        // det(I - zJ) = 1 + z^2 for the rotation generator.
        let j = ExactMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let c = j.det_one_minus_z();
        assert_eq!(c, vec![GaussianRational::one(), GaussianRational::zero(), GaussianRational::one()]);
        // det(I - z diag(2,3)) = (1-2z)(1-3z) = 1 - 5z + 6z^2
        let d = ExactMatrix::diagonal(&[GaussianRational::from_int(2), GaussianRational::from_int(3)]);
        assert_eq!(
            d.det_one_minus_z(),
            vec![GaussianRational::one(), GaussianRational::from_int(-5), GaussianRational::from_int(6)]
        );
    }
}
