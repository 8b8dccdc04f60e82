//! Exact integer linear algebra: Smith normal form over unbounded integers,
//! sparse unit-pivot pre-elimination for relation lattices, and nullspaces
//! modulo a prime.

mod elim;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::residue::Residue;
use elim::{eliminate, Integers, ModPrime, Row};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Smith form was computed without transforms")]
    TransformsMissing,
    #[error("matrix shape {rows}x{cols} does not match the Smith form")]
    ShapeMismatch { rows: usize, cols: usize },
    #[error("invariant factor {0} does not fit in 64 bits")]
    FactorTooLarge(BigInt),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Dense matrix of unbounded integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds from equal-length rows; `cols` is needed for the 0-row case.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    /// Matrix product; panics on a shape mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn to_nested(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    fn from_nested(rows: usize, cols: usize, nested: Vec<Vec<BigInt>>) -> Self {
        IntMatrix { rows, cols, data: nested.into_iter().flatten().collect() }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(BigInt::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Sparse integer rows of `(column, value)` with sorted columns and no
/// zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(cols: usize) -> Self {
        SparseMatrix { cols, rows: Vec::new() }
    }

    /// Adds a row; repeated columns are summed, zeros dropped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, i64)>) {
        let mut row: Vec<(u32, i64)> = Vec::new();
        for (c, v) in entries {
            assert!(c < self.cols, "column {c} out of range");
            match row.iter_mut().find(|e| e.0 == c as u32) {
                Some(e) => e.1 += v,
                None => row.push((c as u32, v)),
            }
        }
        row.retain(|e| e.1 != 0);
        row.sort_unstable_by_key(|e| e.0);
        self.rows.push(row);
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(u32, i64)]> {
        self.rows.iter().map(Vec::as_slice)
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows.len(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m.set(r, c as usize, BigInt::from(v));
            }
        }
        m
    }

    /// Sparse form of a dense matrix whose entries fit in `i64`.
    pub fn from_dense(m: &IntMatrix) -> Option<Self> {
        let mut s = SparseMatrix::new(m.cols);
        for r in 0..m.rows {
            let mut row = Vec::new();
            for (c, v) in m.row(r).iter().enumerate() {
                if !v.is_zero() {
                    row.push((c, v.to_i64()?));
                }
            }
            s.push_row(row);
        }
        Some(s)
    }
}

/// `U·M·V = D` with `D` diagonal `d_1 | d_2 | ... | d_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// All diagonal entries including unit factors.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub left: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
}

impl SmithForm {
    /// Factors greater than one.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Product of the invariant factors (order of the torsion part).
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

pub fn smith_normal_form(m: &IntMatrix, want_transforms: bool) -> SmithForm {
    snf_core(m, want_transforms, want_transforms)
}

/// Smith form with only the right transform `V` (which is all that
/// quotient generators need).
pub fn smith_normal_form_right(m: &IntMatrix) -> SmithForm {
    snf_core(m, false, true)
}

/// Nonzero entry of least absolute value in `a[t.., t..]`; ties go to the
/// lowest row, then column.
fn min_abs_pivot(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => v.magnitude() < a[bi][bj].magnitude(),
            };
            if better {
                best = Some((i, j));
                if v.magnitude().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

fn sub_scaled(target: &mut [BigInt], source: &[BigInt], q: &BigInt, from: usize) {
    for (x, y) in target[from..].iter_mut().zip(&source[from..]) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn snf_core(m: &IntMatrix, left: bool, right: bool) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.to_nested();
    let mut u = left.then(|| IntMatrix::identity(r).to_nested());
    // Columns of V, stored as rows so column operations are row operations.
    let mut vt = right.then(|| IntMatrix::identity(c).to_nested());
    let mut factors = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = min_abs_pivot(&a, t) else { break };
        a.swap(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap(t, pi);
        }
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            if let Some(vt) = vt.as_mut() {
                vt.swap(t, pj);
            }
        }
        let pivot = a[t][t].clone();
        let mut clean = true;
        for i in t + 1..r {
            if a[i][t].is_zero() {
                continue;
            }
            let q = &a[i][t] / &pivot;
            if !q.is_zero() {
                let (top, bottom) = a.split_at_mut(i);
                sub_scaled(&mut bottom[0], &top[t], &q, t);
                if let Some(u) = u.as_mut() {
                    let (top, bottom) = u.split_at_mut(i);
                    sub_scaled(&mut bottom[0], &top[t], &q, 0);
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..c {
            if a[t][j].is_zero() {
                continue;
            }
            let q = &a[t][j] / &pivot;
            if !q.is_zero() {
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                }
                if let Some(vt) = vt.as_mut() {
                    let (top, bottom) = vt.split_at_mut(j);
                    sub_scaled(&mut bottom[0], &top[t], &q, 0);
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // Divisibility: fold an offending row into the pivot row and retry.
        let offending = (t + 1..r).find(|&i| a[i][t + 1..].iter().any(|x| !(x % &pivot).is_zero()));
        if let Some(i) = offending {
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in top[t].iter_mut().zip(&bottom[0]) {
                *x += y;
            }
            if let Some(u) = u.as_mut() {
                let (top, bottom) = u.split_at_mut(i);
                for (x, y) in top[t].iter_mut().zip(&bottom[0]) {
                    *x += y;
                }
            }
            continue;
        }
        if pivot.is_negative() {
            for x in a[t].iter_mut() {
                *x = -std::mem::take(x);
            }
            if let Some(u) = u.as_mut() {
                for x in u[t].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
        }
        factors.push(a[t][t].clone());
        t += 1;
    }
    SmithForm {
        rank: factors.len(),
        invariant_factors: factors,
        left: u.map(|u| IntMatrix::from_nested(r, r, u)),
        right: vt.map(|vt| IntMatrix::from_nested(c, c, vt).transpose()),
    }
}

/// One generator of `Hom(Z^cols / rowspace(M), Q/Z)`: a vector annihilating
/// every row mod 1, with its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGenerator {
    pub values: Vec<Residue>,
    pub order: u64,
}

fn column_over(v: &IntMatrix, col: usize, d: &BigInt) -> Result<Vec<Residue>, LatticeError> {
    let den = d.to_u64().ok_or_else(|| LatticeError::FactorTooLarge(d.clone()))?;
    Ok((0..v.rows())
        .map(|r| {
            let num = v.get(r, col).mod_floor(d).to_i128().expect("reduced below a u64");
            Residue::new(num, den)
        })
        .collect())
}

/// Generators `V e_i / d_i` for each factor `d_i > 1`.
pub fn quotient_group_generators(m: &IntMatrix, snf: &SmithForm) -> Result<Vec<QuotientGenerator>, LatticeError> {
    let v = snf.right.as_ref().ok_or(LatticeError::TransformsMissing)?;
    if v.rows() != m.cols() {
        return Err(LatticeError::ShapeMismatch { rows: m.rows(), cols: m.cols() });
    }
    let mut out = Vec::new();
    for (i, d) in snf.invariant_factors.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let values = column_over(v, i, d)?;
        out.push(QuotientGenerator { values, order: d.to_u64().expect("checked above") });
    }
    Ok(out)
}

/// Structure of `Z^cols / rowspace` for a sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientStructure {
    /// Full divisibility chain, unit factors included.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub cols: usize,
    /// Torsion generators (present when requested).
    pub generators: Option<Vec<QuotientGenerator>>,
    /// Columns left for the dense phase after unit-pivot elimination.
    pub dense_cols: usize,
    pub dense_rows: usize,
}

impl QuotientStructure {
    pub fn free_rank(&self) -> usize {
        self.cols - self.rank
    }

    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Invariant factors (and optionally generators) of `Z^cols / rowspace(M)`.
///
/// Rows with a ±1 entry are eliminated sparsely first; whatever remains goes
/// through the dense Smith form. Generators are obtained on the remainder
/// and back-substituted through the eliminated pivots.
pub fn sparse_quotient(m: &SparseMatrix, want_generators: bool) -> Result<QuotientStructure, LatticeError> {
    let input: Vec<Row<i64>> = m.rows.clone();
    let el = eliminate(&Integers, m.cols, input);
    let free: Vec<usize> = el.free_cols.iter().map(|&c| c as usize).collect();
    let mut position = vec![usize::MAX; m.cols];
    for (i, &c) in free.iter().enumerate() {
        position[c] = i;
    }
    let mut dense = IntMatrix::zeros(el.remaining.len(), free.len());
    for (r, row) in el.remaining.iter().enumerate() {
        for &(c, v) in row {
            dense.set(r, position[c as usize], BigInt::from(v));
        }
    }
    let snf = if want_generators { smith_normal_form_right(&dense) } else { smith_normal_form(&dense, false) };
    let mut invariant_factors = vec![BigInt::one(); el.pivots.len()];
    invariant_factors.extend(snf.invariant_factors.iter().cloned());
    let generators = if want_generators {
        let v = snf.right.as_ref().expect("requested");
        let mut gens = Vec::new();
        for (i, d) in snf.invariant_factors.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let sub = column_over(v, i, d)?;
            let mut values = vec![Residue::ZERO; m.cols];
            for (k, &c) in free.iter().enumerate() {
                values[c] = sub[k];
            }
            back_substitute(&el.pivots, &mut values);
            gens.push(QuotientGenerator { values, order: d.to_u64().expect("checked") });
        }
        Some(gens)
    } else {
        None
    };
    Ok(QuotientStructure {
        rank: invariant_factors.len(),
        invariant_factors,
        cols: m.cols,
        generators,
        dense_cols: free.len(),
        dense_rows: el.remaining.len(),
    })
}

/// Fills pivot columns from `unit·x_c + Σ a_j x_j ≡ 0`, latest pivot first.
fn back_substitute(pivots: &[elim::Pivot<i64>], values: &mut [Residue]) {
    for p in pivots.iter().rev() {
        let mut s = Residue::ZERO;
        for &(c, a) in &p.rest {
            s = s + values[c as usize].scale(a as i128);
        }
        // unit is ±1, its own inverse.
        values[p.col as usize] = (-s).scale(p.unit as i128);
    }
}

fn modp_rows(m: &SparseMatrix, l: u64) -> Vec<Row<u64>> {
    m.rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(c, v)| (c, v.rem_euclid(l as i64) as u64))
                .filter(|e| e.1 != 0)
                .collect()
        })
        .collect()
}

/// Basis of `{x ∈ F_l^cols : M x = 0}` in reduced echelon form (each basis
/// vector has a leading 1 in a distinct column, zeros in the others'
/// leading columns), ordered by leading column.
pub fn nullspace_mod_p_sparse(m: &SparseMatrix, l: u64) -> Result<Vec<Vec<u64>>, LatticeError> {
    if !crate::numtheory::is_prime(l) {
        return Err(LatticeError::NotPrime(l));
    }
    let ring = ModPrime(l);
    let el = eliminate(&ring, m.cols, modp_rows(m, l));
    debug_assert!(el.remaining.is_empty(), "every nonzero is a unit mod l");
    let mut basis = Vec::with_capacity(el.free_cols.len());
    for &f in &el.free_cols {
        let mut x = vec![0u64; m.cols];
        x[f as usize] = 1;
        for p in el.pivots.iter().rev() {
            let mut s = 0u64;
            for &(c, a) in &p.rest {
                s = (s + a * x[c as usize]) % l;
            }
            let inv = elim::Ring::unit_inverse(&ring, p.unit);
            x[p.col as usize] = (l - s) % l * inv % l;
        }
        basis.push(x);
    }
    Ok(rref_mod_p(basis, l))
}

pub fn nullspace_mod_p(m: &IntMatrix, l: u64) -> Result<Vec<Vec<u64>>, LatticeError> {
    nullspace_mod_p_sparse(&to_sparse_mod(m, l), l)
}

/// Rank over `F_l` of the row space.
pub fn rank_mod_p(m: &SparseMatrix, l: u64) -> Result<usize, LatticeError> {
    Ok(m.cols - nullspace_mod_p_sparse(m, l)?.len())
}

fn to_sparse_mod(m: &IntMatrix, l: u64) -> SparseMatrix {
    let lb = BigInt::from(l);
    let mut s = SparseMatrix::new(m.cols);
    for r in 0..m.rows {
        s.push_row(
            m.row(r)
                .iter()
                .enumerate()
                .map(|(c, v)| (c, v.mod_floor(&lb).to_i64().expect("below l"))),
        );
    }
    s
}

/// Reduced row echelon form of a list of vectors over `F_l`, zero rows
/// dropped.
pub fn rref_mod_p(mut rows: Vec<Vec<u64>>, l: u64) -> Vec<Vec<u64>> {
    let ring = ModPrime(l);
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_multiple_of(l)) else { continue };
        rows.swap(r, p);
        let inv = elim::Ring::unit_inverse(&ring, rows[r][c] % l);
        for x in rows[r].iter_mut() {
            *x = *x % l * inv % l;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_multiple_of(l) {
                let f = rows[i][c] % l;
                let (pivot_row, target) = if i < r {
                    let (a, b) = rows.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = rows.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in target.iter_mut().zip(pivot_row) {
                    *x = (*x % l + l - f * y % l) % l;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// Rank over `F_l` of a list of vectors.
pub fn vectors_rank_mod_p(rows: &[Vec<u64>], l: u64) -> usize {
    rref_mod_p(rows.to_vec(), l).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m, false).invariant_factors.iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(factors(&IntMatrix::from_rows(2, &[vec![2, 0], vec![0, 3]])), vec![1, 6]);
        assert_eq!(factors(&IntMatrix::zeros(3, 3)), Vec::<i64>::new());
        assert_eq!(factors(&IntMatrix::from_rows(2, &[vec![2, 4], vec![6, 8]])), vec![2, 4]);
        assert!(factors(&IntMatrix::zeros(0, 0)).is_empty());
    }

    #[test]
    fn transforms_reproduce_the_diagonal() {
        let m = IntMatrix::from_rows(3, &[vec![4, -6, 2], vec![3, 9, 12], vec![-5, 0, 7], vec![1, 1, 1]]);
        let s = smith_normal_form(&m, true);
        let d = s.left.as_ref().unwrap().mul(&m).mul(s.right.as_ref().unwrap());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expected = if i == j && i < s.rank { s.invariant_factors[i].clone() } else { BigInt::zero() };
                assert_eq!(d.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn quotient_generator_examples() {
        let m = IntMatrix::from_rows(1, &[vec![2]]);
        let g = quotient_group_generators(&m, &smith_normal_form(&m, true)).unwrap();
        assert_eq!(g, vec![QuotientGenerator { values: vec![Residue::new(1, 2)], order: 2 }]);
        let id = IntMatrix::identity(3);
        assert!(quotient_group_generators(&id, &smith_normal_form(&id, true)).unwrap().is_empty());
        assert_eq!(
            quotient_group_generators(&id, &smith_normal_form(&id, false)),
            Err(LatticeError::TransformsMissing)
        );
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace_mod_p(&IntMatrix::identity(4), 5).unwrap().is_empty());
        let ones = IntMatrix::from_rows(3, &[vec![1, 1, 1]]);
        let basis = nullspace_mod_p(&ones, 2).unwrap();
        assert_eq!(basis, vec![vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(nullspace_mod_p(&ones, 4), Err(LatticeError::NotPrime(4)));
    }

    #[test]
    fn sparse_quotient_matches_dense() {
        let rows = [vec![2, 1, 0, 0], vec![0, 3, -1, 0], vec![0, 0, 2, 2], vec![1, 0, 0, 4], vec![0, 6, 0, 0]];
        let dense = IntMatrix::from_rows(4, &rows);
        let sparse = SparseMatrix::from_dense(&dense).unwrap();
        let q = sparse_quotient(&sparse, true).unwrap();
        assert_eq!(q.invariant_factors, smith_normal_form(&dense, false).invariant_factors);
        for g in q.generators.unwrap() {
            for r in &rows {
                let s = r.iter().zip(&g.values).fold(Residue::ZERO, |acc, (&a, v)| acc + v.scale(a as i128));
                assert!(s.is_zero());
            }
        }
    }
}
