//! Dense row-major complex matrices. Nothing clever: the library targets
//! small dimensions where naive O(n^3) products are faster than any
//! blocking or dispatch overhead would be.

use crate::error::{CoreError, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Index, IndexMut};

pub type C64 = Complex64;

/// General complex matrix (not necessarily square or Hermitian).
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(CoreError::DimensionMismatch {
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(CoreError::DimensionMismatch {
                left: self.rows,
                right: rhs.rows,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(CoreError::DimensionMismatch {
                left: self.rows,
                right: rhs.rows,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Determinant by LU elimination with partial pivoting. Exact on
    /// small dyadic inputs, which matters for the fixed determinant
    /// identities exercised in tests.
    pub fn det(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(CoreError::DimensionMismatch {
                left: self.rows,
                right: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..n {
                let factor = a[(r, col)] / p;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
            }
        }
        Ok(det)
    }
}

/// Wire format: real/imaginary parts as row-major nested arrays, `im`
/// omitted when identically zero. Square matrices carry a single `dim`
/// field; rectangular ones use `rows`/`cols`. Values survive a round trip
/// bit for bit (shortest round-trip decimal rendering).
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    re: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    fn from_cmatrix(m: &CMatrix) -> MatrixJson {
        let re = (0..m.rows)
            .map(|i| (0..m.cols).map(|j| m[(i, j)].re).collect())
            .collect();
        let any_im = m.data.iter().any(|z| z.im != 0.0);
        let im = any_im.then(|| {
            (0..m.rows)
                .map(|i| (0..m.cols).map(|j| m[(i, j)].im).collect())
                .collect()
        });
        if m.is_square() {
            MatrixJson {
                dim: Some(m.rows),
                rows: None,
                cols: None,
                re,
                im,
            }
        } else {
            MatrixJson {
                dim: None,
                rows: Some(m.rows),
                cols: Some(m.cols),
                re,
                im,
            }
        }
    }

    fn into_cmatrix(self) -> std::result::Result<CMatrix, String> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(n), None, None) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err("matrix needs either dim or rows+cols".into()),
        };
        let check = |name: &str, a: &Vec<Vec<f64>>| {
            if a.len() != rows || a.iter().any(|r| r.len() != cols) {
                Err(format!("{name} must be a {rows}x{cols} nested array"))
            } else {
                Ok(())
            }
        };
        check("re", &self.re)?;
        if let Some(im) = &self.im {
            check("im", im)?;
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            C64::new(
                self.re[i][j],
                self.im.as_ref().map_or(0.0, |a| a[i][j]),
            )
        }))
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_cmatrix(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        MatrixJson::deserialize(deserializer)?
            .into_cmatrix()
            .map_err(D::Error::custom)
    }
}

impl CMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<CMatrix> {
        serde_json::from_str(text).map_err(|e| CoreError::Io(e.to_string()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_identity_is_identity() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64, (i * j) as f64));
        let id = CMatrix::identity(3);
        assert_eq!(a.mul(&id).unwrap(), a);
        assert_eq!(id.mul(&a).unwrap(), a);
    }

    #[test]
    fn adjoint_involution() {
        let a = CMatrix::from_fn(2, 4, |i, j| C64::new(i as f64, j as f64));
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn det_of_triangular_is_diagonal_product() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = C64::new(2.0, 0.0);
        a[(1, 1)] = C64::new(-3.0, 0.0);
        a[(2, 2)] = C64::new(0.5, 0.0);
        a[(0, 2)] = C64::new(7.0, 1.0);
        let d = a.det().unwrap();
        assert!((d - C64::new(-3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn json_round_trip_square_and_rectangular() {
        let sq = CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 / 3.0 + i as f64, j as f64 * 1e-17));
        let text = sq.to_json();
        assert!(text.contains("\"dim\"") && !text.contains("\"rows\""));
        assert_eq!(CMatrix::from_json(&text).unwrap(), sq);

        let rect = CMatrix::from_fn(2, 3, |i, j| C64::new((i + j) as f64, 0.0));
        let text = rect.to_json();
        assert!(text.contains("\"rows\"") && !text.contains("\"im\""));
        assert_eq!(CMatrix::from_json(&text).unwrap(), rect);

        assert!(CMatrix::from_json(r#"{"dim":2,"re":[[1.0]]}"#).is_err());
        assert!(CMatrix::from_json(r#"{"re":[[1.0]]}"#).is_err());
    }

    #[test]
    fn det_exact_on_dyadic_entries() {
        // [[1, 1/2], [1/2, 0]] has determinant exactly -1/4 in f64.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(0, 1)] = C64::new(0.5, 0.0);
        a[(1, 0)] = C64::new(0.5, 0.0);
        let d = a.det().unwrap();
        assert_eq!(d.re, -0.25);
        assert_eq!(d.im, 0.0);
    }
}
