//! Hermitian matrices: construction always re-symmetrizes via (M + M*)/2,
//! so downstream code can rely on exact conjugate symmetry of the stored
//! entries, and diagonal imaginary parts are exactly zero.

use crate::cmatrix::{C64, CMatrix};
use crate::eig::eigh;
use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Debug)]
pub struct HermitianMatrix {
    dim: usize,
    data: CMatrix,
}

impl HermitianMatrix {
    /// Symmetrize an arbitrary square matrix: (M + M*)/2.
    pub fn from_cmatrix(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(CoreError::DimensionMismatch {
                left: m.rows(),
                right: m.cols(),
            });
        }
        let n = m.rows();
        let mut data = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let s = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                data[(i, j)] = s;
            }
        }
        // Force exact conjugate symmetry (the averaged values can differ in
        // the last bit between (i,j) and (j,i) without this).
        for i in 0..n {
            data[(i, i)] = C64::new(data[(i, i)].re, 0.0);
            for j in i + 1..n {
                let v = data[(i, j)];
                data[(j, i)] = v.conj();
            }
        }
        Ok(HermitianMatrix { dim: n, data })
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            dim: n,
            data: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            dim: n,
            data: CMatrix::identity(n),
        }
    }

    pub fn from_diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            data[(i, i)] = C64::new(v, 0.0);
        }
        HermitianMatrix { dim: n, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CoreError::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        HermitianMatrix::from_cmatrix(&m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_cmatrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: C64) {
        if i == j {
            self.data[(i, i)] = C64::new(v.re, 0.0);
        } else {
            self.data[(i, j)] = v;
            self.data[(j, i)] = v.conj();
        }
    }

    pub fn add(&self, rhs: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix {
            dim: self.dim,
            data: self.data.add(&rhs.data)?,
        })
    }

    pub fn sub(&self, rhs: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix {
            dim: self.dim,
            data: self.data.sub(&rhs.data)?,
        })
    }

    /// Scale by a real factor (keeps Hermitian-ness).
    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.scale(C64::new(s, 0.0)),
        }
    }

    /// A + s·I.
    pub fn shift(&self, s: f64) -> HermitianMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            let d = out.data[(i, i)];
            out.data[(i, i)] = C64::new(d.re + s, 0.0);
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.frobenius_norm()
    }

    /// Determinant (real for Hermitian input; computed by complex LU).
    pub fn det(&self) -> f64 {
        self.data.det().expect("square by construction").re
    }

    /// Entrywise (Hadamard/Schur) product; Hermitian whenever both factors are.
    pub fn schur_product(&self, rhs: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.dim != rhs.dim {
            return Err(CoreError::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let mut data = CMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                data[(i, j)] = self.data[(i, j)] * rhs.data[(i, j)];
            }
        }
        HermitianMatrix::from_cmatrix(&data)
    }

    /// Block direct sum A ⊕ B.
    pub fn direct_sum(&self, rhs: &HermitianMatrix) -> HermitianMatrix {
        let n = self.dim + rhs.dim;
        let mut data = CMatrix::zeros(n, n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                data[(i, j)] = self.data[(i, j)];
            }
        }
        for i in 0..rhs.dim {
            for j in 0..rhs.dim {
                data[(self.dim + i, self.dim + j)] = rhs.data[(i, j)];
            }
        }
        HermitianMatrix { dim: n, data }
    }

    /// Principal sub-block of size `len` starting at `offset` on the diagonal.
    pub fn principal_block(&self, offset: usize, len: usize) -> HermitianMatrix {
        let mut data = CMatrix::zeros(len, len);
        for i in 0..len {
            for j in 0..len {
                data[(i, j)] = self.data[(offset + i, offset + j)];
            }
        }
        HermitianMatrix { dim: len, data }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.data[(i, i)].re).collect()
    }

    /// Congruence transform X* A X (re-symmetrized to absorb round-off).
    pub fn congruence(&self, x: &CMatrix) -> Result<HermitianMatrix> {
        if x.rows() != self.dim {
            return Err(CoreError::DimensionMismatch {
                left: self.dim,
                right: x.rows(),
            });
        }
        let xa = x.adjoint().mul(&self.data)?;
        let m = xa.mul(x)?;
        HermitianMatrix::from_cmatrix(&m)
    }

    /// Eigenvalues sorted non-increasing.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(self)?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let v = self.eigenvalues()?;
        Ok(*v.last().expect("nonempty spectrum"))
    }
}

/// Löwner order check: A ≥ B iff λ_min(A − B) ≥ −tol·(1 + ||A||_F + ||B||_F).
pub fn loewner_geq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<bool> {
    let diff = a.sub(b)?;
    let lam = diff.min_eigenvalue()?;
    let scale = 1.0 + a.frobenius_norm() + b.frobenius_norm();
    Ok(lam >= -tol * scale)
}

/// Diagonal matrix carrying the spectrum of `a`, sorted non-increasing
/// (`descending = true`, written A↓) or non-decreasing (A↑).
pub fn sorted_diagonal(a: &HermitianMatrix, descending: bool) -> Result<HermitianMatrix> {
    let mut vals = a.eigenvalues()?;
    if !descending {
        vals.reverse();
    }
    Ok(HermitianMatrix::from_diag(&vals))
}

impl HermitianMatrix {
    /// Accept a parsed square matrix as Hermitian without re-symmetrizing
    /// (so round-trips stay bit-exact), verifying conjugate symmetry.
    fn from_cmatrix_verbatim(m: CMatrix) -> Result<Self> {
        let herm = HermitianMatrix::from_cmatrix(&m)?;
        let n = m.rows();
        let dev: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (m[(i, j)] - herm.data[(i, j)]).norm())
            .fold(0.0, f64::max);
        if dev > 1e-12 * (1.0 + herm.frobenius_norm()) {
            return Err(CoreError::Io(format!(
                "matrix is not Hermitian (max deviation {dev:.3e})"
            )));
        }
        Ok(HermitianMatrix { dim: n, data: m })
    }

    pub fn to_json(&self) -> String {
        self.data.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        HermitianMatrix::from_cmatrix_verbatim(CMatrix::from_json(text)?)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.data.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let m = CMatrix::deserialize(d)?;
        if !m.is_square() {
            return Err(D::Error::custom("Hermitian matrix must be square"));
        }
        HermitianMatrix::from_cmatrix_verbatim(m).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrization_fixes_skew_part() {
        let m = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, (i as f64) - j as f64));
        let h = HermitianMatrix::from_cmatrix(&m).unwrap();
        for i in 0..3 {
            assert_eq!(h.get(i, i).im, 0.0);
            for j in 0..3 {
                assert_eq!(h.get(i, j), h.get(j, i).conj());
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut h = HermitianMatrix::zeros(3);
        h.set_sym(0, 0, C64::new(0.1 + 0.2, 0.0)); // deliberately non-representable decimal
        h.set_sym(0, 1, C64::new(1.0 / 3.0, -2.0 / 7.0));
        h.set_sym(1, 2, C64::new(std::f64::consts::PI, 1e-17));
        h.set_sym(2, 2, C64::new(-1e300, 0.0));
        let text = h.to_json();
        let back = HermitianMatrix::from_json(&text).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.get(i, j).re.to_bits(), back.get(i, j).re.to_bits());
                assert_eq!(h.get(i, j).im.to_bits(), back.get(i, j).im.to_bits());
            }
        }
    }

    #[test]
    fn json_omits_im_for_real_matrices() {
        let h = HermitianMatrix::from_diag(&[1.0, 2.0]);
        let text = h.to_json();
        assert!(!text.contains("\"im\""));
        let back = HermitianMatrix::from_json(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn json_rejects_non_hermitian() {
        let text = r#"{"dim":2,"re":[[0.0,1.0],[2.0,0.0]]}"#;
        assert!(HermitianMatrix::from_json(text).is_err());
    }

    #[test]
    fn congruence_by_identity_is_identity_map() {
        let h = HermitianMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]).unwrap();
        let c = h.congruence(&CMatrix::identity(2)).unwrap();
        assert_eq!(c, h);
    }

    #[test]
    fn direct_sum_blocks() {
        let a = HermitianMatrix::from_diag(&[1.0, 2.0]);
        let b = HermitianMatrix::from_diag(&[3.0]);
        let s = a.direct_sum(&b);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.diagonal(), vec![1.0, 2.0, 3.0]);
        assert_eq!(s.principal_block(0, 2), a);
        assert_eq!(s.principal_block(2, 1), b);
    }
}
