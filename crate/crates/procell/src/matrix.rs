//! Dense matrices over an exact field, with Gaussian elimination.
//!
//! Pivoting picks the first nonzero entry; exactness makes numerical
//! stability a non-issue.

use crate::field::{Field, FieldError, Scalar};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Rectangular matrix; all entries in one field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>, // row-major
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Matrix, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatrixError::Dimension("ragged rows".into()));
            }
            for x in row {
                if x.field() != field {
                    return Err(FieldError::Mismatch(field, x.field()).into());
                }
                data.push(x);
            }
        }
        Ok(Matrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Convenience constructor from integer literals, mostly for tests.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&n| field.from_i64(n)).collect())
            .collect();
        Matrix::from_rows(field, rows).expect("literal rows are rectangular")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "entry field must match matrix field");
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c).clone());
            }
        }
        t
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(MatrixError::Dimension(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] = self.data[i].add(&other.data[i])?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.add(&other.scale(&self.field.from_i64(-1))?)
    }

    pub fn scale(&self, k: &Scalar) -> Result<Matrix, MatrixError> {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = x.mul(k)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(r, c).add(&a.mul(b)?)?;
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product (vector as column coordinates).
    #[allow(clippy::needless_range_loop)]
    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::Dimension(format!(
                "{}x{} * vec {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![self.field.zero(); self.rows];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.at(r, c);
                if a.is_zero() || v[c].is_zero() {
                    continue;
                }
                out[r] = out[r].add(&a.mul(&v[c])?)?;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Scalar, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::Dimension(format!(
                "trace of {}x{}",
                self.rows, self.cols
            )));
        }
        let mut t = self.field.zero();
        for i in 0..self.rows {
            t = t.add(self.at(i, i))?;
        }
        Ok(t)
    }

    /// In-place reduction to reduced row echelon form.
    /// Returns the pivot column of each nonzero row, in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            // first nonzero pivot in this column at or below `row`
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.at(row, col).inv().expect("pivot is nonzero");
            self.scale_row(row, &inv);
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let factor = self.at(r, col).clone();
                    self.sub_scaled_row(r, row, &factor);
                }
            }
            pivots.push(col);
            row += 1;
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

    fn scale_row(&mut self, r: usize, k: &Scalar) {
        for c in 0..self.cols {
            let v = self.at(r, c).mul(k).expect("same field");
            self.set(r, c, v);
        }
    }

    /// row[r] -= k * row[src]
    fn sub_scaled_row(&mut self, r: usize, src: usize, k: &Scalar) {
        for c in 0..self.cols {
            let d = self.at(src, c).mul(k).expect("same field");
            let v = self.at(r, c).sub(&d).expect("same field");
            self.set(r, c, v);
        }
    }

    /// Row rank over the field.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace {x : Mx = 0}, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut x = vec![self.field.zero(); self.cols];
            x[free] = self.field.one();
            for (col, p) in pivot_of_col.iter().enumerate() {
                if let Some(row) = p {
                    x[col] = m.at(*row, free).neg();
                }
            }
            basis.push(x);
        }
        basis
    }

    /// Flattens to a single row vector of length rows*cols.
    fn flatten(&self) -> Vec<Scalar> {
        self.data.clone()
    }
}

/// Dimension of the linear span of the given n-by-n matrices inside the
/// n^2-dimensional matrix space.
pub fn span_dimension(mats: &[Matrix], n: usize) -> Result<usize, MatrixError> {
    let mut rows = Vec::with_capacity(mats.len());
    let mut field = None;
    for m in mats {
        if m.rows() != n || m.cols() != n {
            return Err(MatrixError::Dimension(format!(
                "expected {n}x{n}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if let Some(f) = field {
            if f != m.field() {
                return Err(FieldError::Mismatch(f, m.field()).into());
            }
        } else {
            field = Some(m.field());
        }
        rows.push(m.flatten());
    }
    let Some(field) = field else {
        return Ok(0);
    };
    Ok(Matrix::from_rows(field, rows)?.rank())
}
