//! Sparse Gaussian elimination on unit pivots, shared by the integer and
//! mod-l paths.

use std::collections::{BTreeSet, HashSet};

/// Coefficient ring for [`Eliminator`]. Arithmetic returns `None` on
/// overflow, which ends the sparse phase.
pub(crate) trait Ring {
    type E: Copy + PartialEq + Eq + std::hash::Hash + std::fmt::Debug;
    fn is_zero(&self, a: Self::E) -> bool;
    fn is_unit(&self, a: Self::E) -> bool;
    fn unit_inverse(&self, a: Self::E) -> Self::E;
    fn mul(&self, a: Self::E, b: Self::E) -> Option<Self::E>;
    fn sub(&self, a: Self::E, b: Self::E) -> Option<Self::E>;
    fn neg(&self, a: Self::E) -> Option<Self::E>;
}

pub(crate) struct Integers;

impl Ring for Integers {
    type E = i64;
    fn is_zero(&self, a: i64) -> bool {
        a == 0
    }
    fn is_unit(&self, a: i64) -> bool {
        a == 1 || a == -1
    }
    fn unit_inverse(&self, a: i64) -> i64 {
        a
    }
    fn mul(&self, a: i64, b: i64) -> Option<i64> {
        a.checked_mul(b)
    }
    fn sub(&self, a: i64, b: i64) -> Option<i64> {
        a.checked_sub(b)
    }
    fn neg(&self, a: i64) -> Option<i64> {
        a.checked_neg()
    }
}

pub(crate) struct ModPrime(pub u64);

impl Ring for ModPrime {
    type E = u64;
    fn is_zero(&self, a: u64) -> bool {
        a == 0
    }
    fn is_unit(&self, a: u64) -> bool {
        a != 0
    }
    fn unit_inverse(&self, a: u64) -> u64 {
        let mut r = 1u64;
        let (mut b, mut e) = (a % self.0, self.0 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = ((r as u128 * b as u128) % self.0 as u128) as u64;
            }
            b = ((b as u128 * b as u128) % self.0 as u128) as u64;
            e >>= 1;
        }
        r
    }
    fn mul(&self, a: u64, b: u64) -> Option<u64> {
        Some(((a as u128 * b as u128) % self.0 as u128) as u64)
    }
    fn sub(&self, a: u64, b: u64) -> Option<u64> {
        Some((a + self.0 - b) % self.0)
    }
    fn neg(&self, a: u64) -> Option<u64> {
        Some((self.0 - a) % self.0)
    }
}

pub(crate) type Row<E> = Vec<(u32, E)>;

/// A pivot step: `unit * x[col] + Σ rest = 0`.
#[derive(Clone, Debug)]
pub(crate) struct Pivot<E> {
    pub col: u32,
    pub unit: E,
    pub rest: Row<E>,
}

pub(crate) struct Eliminated<E> {
    pub pivots: Vec<Pivot<E>>,
    /// Columns never pivoted, ascending.
    pub free_cols: Vec<u32>,
    /// Surviving nonzero rows; they only touch `free_cols`.
    pub remaining: Vec<Row<E>>,
}

/// Eliminates unit pivots until none remain (or arithmetic overflows).
/// Pivot choice: the active column with fewest live rows that has a unit
/// entry (ties: lowest column), then the shortest such row (ties: lowest
/// row index).
pub(crate) fn eliminate<R: Ring>(ring: &R, cols: usize, input: Vec<Row<R::E>>) -> Eliminated<R::E> {
    let mut seen = HashSet::new();
    let mut rows: Vec<Option<Row<R::E>>> = Vec::new();
    for r in input {
        if !r.is_empty() && seen.insert(r.clone()) {
            rows.push(Some(r));
        }
    }
    drop(seen);
    let mut col_rows: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); cols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r.as_ref().expect("live") {
            col_rows[c as usize].insert(i as u32);
        }
    }
    let mut active = vec![true; cols];
    let mut queue: BTreeSet<(usize, u32)> =
        (0..cols).filter(|&c| !col_rows[c].is_empty()).map(|c| (col_rows[c].len(), c as u32)).collect();
    let mut pivots = Vec::new();

    'search: while let Some(choice) = queue.iter().find_map(|&(_, c)| {
        col_rows[c as usize]
            .iter()
            .filter_map(|&ri| {
                let row = rows[ri as usize].as_ref().expect("indexed rows are live");
                let v = row.iter().find(|e| e.0 == c).expect("column present").1;
                ring.is_unit(v).then_some((row.len(), ri, v))
            })
            .min_by_key(|&(len, ri, _)| (len, ri))
            .map(|(_, ri, v)| (c, ri, v))
    }) {
        let (c, pr, unit) = choice;
        let prow = rows[pr as usize].clone().expect("live pivot row");
        let inv = ring.unit_inverse(unit);
        let others: Vec<u32> = col_rows[c as usize].iter().copied().filter(|&r| r != pr).collect();
        // Compute all updates before committing so an overflow leaves a
        // consistent (lattice-preserving) state.
        let mut updates = Vec::with_capacity(others.len());
        for &ri in &others {
            let row = rows[ri as usize].as_ref().expect("live");
            let v = row.iter().find(|e| e.0 == c).expect("column present").1;
            let Some(factor) = ring.mul(v, inv) else { break 'search };
            let Some(new) = axpy(ring, row, factor, &prow) else { break 'search };
            updates.push((ri, new));
        }
        let mut touched: BTreeSet<u32> = BTreeSet::new();
        for (ri, new) in updates {
            let old = rows[ri as usize].take().expect("live");
            for &(cc, _) in &old {
                col_rows[cc as usize].remove(&ri);
                touched.insert(cc);
            }
            if !new.is_empty() {
                for &(cc, _) in &new {
                    col_rows[cc as usize].insert(ri);
                    touched.insert(cc);
                }
                rows[ri as usize] = Some(new);
            }
        }
        for &(cc, _) in &prow {
            col_rows[cc as usize].remove(&pr);
            touched.insert(cc);
        }
        rows[pr as usize] = None;
        active[c as usize] = false;
        // Refresh queue keys for every column whose count may have changed.
        queue.retain(|&(_, qc)| !touched.contains(&qc));
        for cc in touched {
            if active[cc as usize] && !col_rows[cc as usize].is_empty() {
                queue.insert((col_rows[cc as usize].len(), cc));
            }
        }
        let rest = prow.into_iter().filter(|e| e.0 != c).collect();
        pivots.push(Pivot { col: c, unit, rest });
    }
    let free_cols = (0..cols as u32).filter(|&c| active[c as usize]).collect();
    let remaining = rows.into_iter().flatten().collect();
    Eliminated { pivots, free_cols, remaining }
}

/// `row - factor * pivot`, merged by column with zeros dropped.
fn axpy<R: Ring>(ring: &R, row: &Row<R::E>, factor: R::E, pivot: &Row<R::E>) -> Option<Row<R::E>> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        let (c, v) = if take_row {
            i += 1;
            row[i - 1]
        } else if take_piv {
            j += 1;
            (pivot[j - 1].0, ring.neg(ring.mul(factor, pivot[j - 1].1)?)?)
        } else {
            i += 1;
            j += 1;
            (row[i - 1].0, ring.sub(row[i - 1].1, ring.mul(factor, pivot[j - 1].1)?)?)
        };
        if !ring.is_zero(v) {
            out.push((c, v));
        }
    }
    Some(out)
}
