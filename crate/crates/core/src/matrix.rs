//! Dense matrices over a finite field.
//!
//! Everything in this crate uses the *row-vector* convention: vectors are
//! rows, a subspace is the row space of its basis matrix, and linear maps
//! act by right multiplication `x ↦ x·A`. Sizes here are tiny (ambient
//! dimensions rarely exceed a dozen), so the implementation favours clarity
//! over blocking tricks.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, Involution};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?} [", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|&e| self.field.format_element(e))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(field: Arc<Field>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Arc<Field>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(field: Arc<Field>, rows: Vec<Vec<FieldElement>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "from_rows: ragged rows",
                left: cols,
                right: bad.len(),
            });
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from integer entries (each reduced into the prime subfield).
    pub fn from_ints(field: Arc<Field>, rows: &[&[i64]]) -> Result<Matrix> {
        let data = rows
            .iter()
            .map(|r| r.iter().map(|&n| field.from_int(n)).collect())
            .collect();
        Matrix::from_rows(field, data)
    }

    pub fn from_fn(
        field: Arc<Field>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<FieldElement> {
        self.row(r).to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    fn check_same_field(&self, other: &Matrix) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                left: self.cols,
                right: other.rows,
            });
        }
        let f = &self.field;
        let mut out = Matrix::zeros(self.field.clone(), self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = f.mul(a, other.get(k, c));
                    out.set(r, c, f.add(out.get(r, c), add));
                }
            }
        }
        Ok(out)
    }

    /// `x · self` for a row vector `x`.
    pub fn mul_row(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "row-vector product",
                left: x.len(),
                right: self.rows,
            });
        }
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (k, &a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                out[c] = f.add(out[c], f.mul(a, self.get(k, c)));
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field.clone(), self.cols, self.rows, |r, c| {
            self.get(c, r)
        })
    }

    /// Apply an involution entrywise.
    pub fn apply_sigma(&self, sigma: Involution) -> Result<Matrix> {
        let mut out = self.clone();
        for e in &mut out.data {
            *e = self.field.apply(sigma, *e)?;
        }
        Ok(out)
    }

    /// `σ(self)ᵀ`.
    pub fn sigma_transpose(&self, sigma: Involution) -> Result<Matrix> {
        Ok(self.apply_sigma(sigma)?.transpose())
    }

    pub fn scale(&self, a: FieldElement) -> Matrix {
        let mut out = self.clone();
        for e in &mut out.data {
            *e = self.field.mul(a, *e);
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix sum",
                left: self.rows * self.cols,
                right: other.rows * other.cols,
            });
        }
        let mut out = self.clone();
        for (e, o) in out.data.iter_mut().zip(&other.data) {
            *e = self.field.add(*e, *o);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(other.field.minus_one()))
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "vstack",
                left: self.cols,
                right: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn take_rows(&self, indices: &[usize]) -> Matrix {
        let data = indices
            .iter()
            .flat_map(|&r| self.row(r).iter().copied())
            .collect();
        Matrix {
            field: self.field.clone(),
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for cc in c..self.cols {
                self.set(r, cc, f.mul(inv, self.get(r, cc)));
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for cc in c..self.cols {
                    let v = f.sub(self.get(i, cc), f.mul(factor, self.get(r, cc)));
                    self.set(i, cc, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        (m, piv)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                context: "inverse of non-square matrix",
                left: self.rows,
                right: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = self
            .hstack(&Matrix::identity(self.field.clone(), n))
            .expect("same row count");
        let piv = aug.rref_in_place();
        if piv.len() != n || piv.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::Singular);
        }
        let mut out = Matrix::zeros(self.field.clone(), n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(out)
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                context: "hstack",
                left: self.rows,
                right: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.field.clone(), self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Basis (as rows) of the left kernel `{x : x · self = 0}`.
    pub fn row_kernel(&self) -> Matrix {
        // x·A = 0  ⟺  Aᵀ xᵀ = 0; read the free-variable solutions off the
        // reduced echelon form of Aᵀ.
        let (rr, pivots) = self.transpose().rref();
        let m = self.rows;
        let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.field.clone(), free.len(), m);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, FieldElement::ONE);
            for (i, &pc) in pivots.iter().enumerate() {
                out.set(k, pc, self.field.neg(rr.get(i, fc)));
            }
        }
        out
    }

    /// Solve `X · self = rhs` row by row. When `self` has dependent rows the
    /// particular solution with zero free coordinates is returned; when some
    /// row of `rhs` is outside the row space, `NotInSpan`.
    pub fn solve_left(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_same_field(rhs)?;
        if rhs.cols != self.cols {
            return Err(Error::DimensionMismatch {
                context: "solve_left",
                left: rhs.cols,
                right: self.cols,
            });
        }
        // X·A = B ⟺ Aᵀ·Xᵀ = Bᵀ: eliminate on [Aᵀ | Bᵀ].
        let at = self.transpose();
        let bt = rhs.transpose();
        let mut aug = at.hstack(&bt)?;
        let piv = aug.rref_in_place();
        let k = self.rows;
        let pivots_in_a: Vec<usize> = piv.iter().copied().filter(|&c| c < k).collect();
        // Any pivot in the rhs block means an inconsistent column.
        if piv.iter().any(|&c| c >= k) {
            return Err(Error::NotInSpan);
        }
        let mut xt = Matrix::zeros(self.field.clone(), k, rhs.rows);
        for (i, &pc) in pivots_in_a.iter().enumerate() {
            for j in 0..rhs.rows {
                xt.set(pc, j, aug.get(i, k + j));
            }
        }
        Ok(xt.transpose())
    }

    /// Solve `x · self = rhs` for a single row vector.
    pub fn solve_left_vec(&self, rhs: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let rhs_m = Matrix::from_rows(self.field.clone(), vec![rhs.to_vec()])?;
        Ok(self.solve_left(&rhs_m)?.row_vec(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Field> {
        Field::prime(3).unwrap()
    }

    #[test]
    fn product_against_hand_computation() {
        let f = f3();
        let a = Matrix::from_ints(f.clone(), &[&[1, 2], &[0, 1]]).unwrap();
        let b = Matrix::from_ints(f.clone(), &[&[2, 1], &[1, 1]]).unwrap();
        let ab = a.mul(&b).unwrap();
        // [1 2][2 1]   [4 3]   [1 0]
        // [0 1][1 1] = [1 1] = [1 1]  (mod 3)
        assert_eq!(ab, Matrix::from_ints(f, &[&[1, 0], &[1, 1]]).unwrap());
    }

    #[test]
    fn rref_pivots_and_rank() {
        let f = f3();
        let m = Matrix::from_ints(f, &[&[0, 1, 2], &[0, 2, 4], &[1, 1, 1]]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(m.rank(), 2);
        // Check the defining echelon properties: unit pivots, cleared columns.
        for (i, &c) in piv.iter().enumerate() {
            assert_eq!(r.get(i, c), FieldElement::ONE);
            for j in 0..r.rows() {
                if j != i {
                    assert!(r.get(j, c).is_zero());
                }
            }
        }
    }

    #[test]
    fn inverse_round_trip_and_singular_detection() {
        let f = Field::with_default_modulus(2, 2).unwrap();
        let a = f.gen();
        let m = Matrix::from_rows(
            f.clone(),
            vec![
                vec![f.one(), a],
                vec![a, f.one()],
            ],
        )
        .unwrap();
        // det = 1 - a^2 = 1 + (a+1) = a ≠ 0 over F_4.
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(f.clone(), 2));
        assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(f.clone(), 2));

        let sing = Matrix::from_rows(f.clone(), vec![vec![a, a], vec![a, a]]).unwrap();
        assert!(matches!(sing.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn row_kernel_annihilates_and_has_right_dimension() {
        let f = f3();
        // Rank-2 matrix with 4 rows: kernel has dimension 2.
        let m = Matrix::from_ints(
            f.clone(),
            &[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2], &[2, 0, 2]],
        )
        .unwrap();
        let k = m.row_kernel();
        assert_eq!(k.rows(), 2);
        assert!(k.mul(&m).unwrap().is_zero());
        assert_eq!(k.rank(), 2);
    }

    #[test]
    fn solve_left_recovers_coefficients() {
        let f = f3();
        let basis = Matrix::from_ints(f.clone(), &[&[1, 0, 2], &[0, 1, 1]]).unwrap();
        let x = vec![f.el(2), f.el(2)];
        let v = basis.mul_row(&x).unwrap();
        let got = basis.solve_left_vec(&v).unwrap();
        assert_eq!(got, x);

        let outside = vec![f.el(1), f.el(0), f.el(0)];
        assert!(matches!(
            basis.solve_left_vec(&outside),
            Err(Error::NotInSpan)
        ));
    }

    #[test]
    fn sigma_transpose_uses_the_involution() {
        let f = Field::with_default_modulus(3, 2).unwrap();
        let t = f.gen();
        let m = Matrix::from_rows(f.clone(), vec![vec![t, f.one()]]).unwrap();
        let st = m.sigma_transpose(Involution::FrobeniusSqrt).unwrap();
        assert_eq!(st.rows(), 2);
        assert_eq!(st.cols(), 1);
        // σ(t) = t^3 = -t = 2t over F_9 = F_3[t]/(t^2+1).
        assert_eq!(st.get(0, 0), f.el(6));
        assert_eq!(st.get(1, 0), f.one());
    }
}
