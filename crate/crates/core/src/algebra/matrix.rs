use super::{AlgebraError, FieldElem, FiniteField};

/// A dense row-major matrix over a [`FiniteField`]. The field is passed to
/// each operation rather than stored, so matrices stay cheap to hash.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElem>,
}

impl MatrixFq {
    pub fn new(rows: usize, cols: usize, entries: Vec<FieldElem>) -> Result<Self, AlgebraError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(AlgebraError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(MatrixFq { rows, cols, entries })
    }

    /// Convenience constructor from prime-field integers.
    pub fn from_ints(f: &FiniteField, rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(AlgebraError::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|row| row.iter().map(|&x| f.from_int(x))).collect();
        MatrixFq::new(r, c, entries)
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixFq { rows, cols, entries: vec![FieldElem::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = FieldElem::ONE;
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

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElem) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn mul(&self, other: &MatrixFq, f: &FiniteField) -> Result<MatrixFq, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other, f))
    }

    /// Product without the dimension check; callers guarantee compatibility.
    pub fn mul_unchecked(&self, other: &MatrixFq, f: &FiniteField) -> MatrixFq {
        let mut out = MatrixFq::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = f.add(out.entries[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &MatrixFq, f: &FiniteField) -> MatrixFq {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.add(a, b)).collect();
        MatrixFq { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &MatrixFq, f: &FiniteField) -> MatrixFq {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f.sub(a, b)).collect();
        MatrixFq { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale(&self, c: FieldElem, f: &FiniteField) -> MatrixFq {
        let entries = self.entries.iter().map(|&a| f.mul(c, a)).collect();
        MatrixFq { rows: self.rows, cols: self.cols, entries }
    }

    pub fn pow(&self, mut k: u64, f: &FiniteField) -> MatrixFq {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = MatrixFq::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base, f);
            }
            base = base.mul_unchecked(&base, f);
            k >>= 1;
        }
        acc
    }

    pub fn trace(&self, f: &FiniteField) -> Result<FieldElem, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("trace of a non-square matrix".into()));
        }
        Ok((0..self.rows).fold(FieldElem::ZERO, |acc, i| f.add(acc, self.get(i, i))))
    }

    pub fn det(&self, f: &FiniteField) -> Result<FieldElem, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 2 {
            let ad = f.mul(self.get(0, 0), self.get(1, 1));
            let bc = f.mul(self.get(0, 1), self.get(1, 0));
            return Ok(f.sub(ad, bc));
        }
        let mut m = self.entries.clone();
        let mut det = FieldElem::ONE;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return Ok(FieldElem::ZERO);
            };
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[col * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in col + 1..n {
                let factor = f.mul(m[r * n + col], pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    m[r * n + j] = f.sub(m[r * n + j], f.mul(factor, m[col * n + j]));
                }
            }
        }
        Ok(det)
    }

    /// Gauss–Jordan inverse.
    pub fn inv(&self, f: &FiniteField) -> Result<MatrixFq, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut b = MatrixFq::identity(n).entries;
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r * n + col].is_zero()).ok_or(AlgebraError::Singular)?;
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                b.swap(piv * n + j, col * n + j);
            }
            let pinv = f.inv(a[col * n + col]).expect("nonzero pivot");
            for j in 0..n {
                a[col * n + j] = f.mul(a[col * n + j], pinv);
                b[col * n + j] = f.mul(b[col * n + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[col * n + j]));
                    b[r * n + j] = f.sub(b[r * n + j], f.mul(factor, b[col * n + j]));
                }
            }
        }
        Ok(MatrixFq { rows: n, cols: n, entries: b })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_strictly_upper_triangular(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| self.get(i, j).is_zero()))
    }

    /// Whether some power of the matrix vanishes (checked up to the dimension).
    pub fn is_nilpotent(&self, f: &FiniteField) -> bool {
        self.is_square() && self.pow(self.rows as u64, f).is_zero()
    }

    /// Whether the matrix is `c·I`.
    pub fn is_scalar(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x == self.get(0, 0)
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn format(&self, f: &FiniteField) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let row: Vec<String> = (0..self.cols).map(|j| f.format(self.get(i, j))).collect();
                format!("[{}]", row.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(f: &FiniteField, n: usize, rng: &mut ChaCha8Rng) -> MatrixFq {
        let entries = (0..n * n).map(|_| FieldElem(rng.gen_range(0..f.order() as u32))).collect();
        MatrixFq::new(n, n, entries).unwrap()
    }

    #[test]
    fn basic_examples() {
        let f = FiniteField::new(3, 1).unwrap();
        let m = MatrixFq::from_ints(&f, &[&[1, 1], &[1, 2]]).unwrap();
        assert_eq!(m.det(&f).unwrap(), FieldElem(1));
        assert_eq!(MatrixFq::identity(2).mul(&m, &f).unwrap(), m);
        let d = MatrixFq::from_ints(&f, &[&[2, 0], &[0, 2]]).unwrap();
        assert_eq!(d.det(&f).unwrap(), FieldElem(1));
        assert_eq!(m.trace(&f).unwrap(), FieldElem(0));
        let singular = MatrixFq::from_ints(&f, &[&[1, 2], &[2, 1]]).unwrap();
        assert_eq!(singular.inv(&f), Err(AlgebraError::Singular));
    }

    #[test]
    fn det_is_multiplicative_and_inverse_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, e, n) in [(3, 1, 3), (2, 2, 3), (5, 1, 4), (2, 3, 2)] {
            let f = FiniteField::new(p, e).unwrap();
            for _ in 0..50 {
                let a = random_matrix(&f, n, &mut rng);
                let b = random_matrix(&f, n, &mut rng);
                let ab = a.mul(&b, &f).unwrap();
                assert_eq!(ab.det(&f).unwrap(), f.mul(a.det(&f).unwrap(), b.det(&f).unwrap()));
                if let Ok(ai) = a.inv(&f) {
                    assert_eq!(a.mul(&ai, &f).unwrap(), MatrixFq::identity(n));
                } else {
                    assert!(a.det(&f).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn nilpotency_checks() {
        let f = FiniteField::new(3, 1).unwrap();
        let n = MatrixFq::from_ints(&f, &[&[0, 1, 2], &[0, 0, 1], &[0, 0, 0]]).unwrap();
        assert!(n.is_strictly_upper_triangular() && n.is_nilpotent(&f));
        assert!(!MatrixFq::identity(3).is_nilpotent(&f));
        assert!(MatrixFq::identity(2).scale(FieldElem(2), &f).is_scalar());
    }
}
