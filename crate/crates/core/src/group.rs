//! Finite groups as index-based multiplication tables.
//!
//! Elements are `0..order`, 0-based everywhere; labels (when present) are
//! for display only. Tables are immutable once built.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::OnceLock;

use thiserror::Error;

use crate::numtheory::is_prime;
use crate::par;

/// Largest order a table can index (entries are stored as `u16`).
pub const MAX_TABLE_ORDER: usize = u16::MAX as usize;

/// Imported tables up to this order are checked for associativity by default.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order must be positive")]
    EmptyGroup,
    #[error("group order {0} exceeds the table limit of {MAX_TABLE_ORDER}")]
    TooLarge(usize),
    #[error("multiplication table has {found} entries, expected {expected}")]
    WrongTableSize { expected: usize, found: usize },
    #[error("table entry {value} at ({row}, {col}) is not an element index")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails: ({a}·{b})·{c} != {a}·({b}·{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// How imported tables are checked for associativity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AssociativityCheck {
    /// Check when the order is at most [`ASSOCIATIVITY_CHECK_LIMIT`].
    #[default]
    Auto,
    Always,
    Skip,
}

#[derive(Debug)]
pub struct GroupTable {
    order: usize,
    mul: Vec<u16>,
    identity: usize,
    inv: Vec<u16>,
    labels: Option<Vec<String>>,
    orders: OnceLock<Vec<u32>>,
}

impl Clone for GroupTable {
    fn clone(&self) -> Self {
        GroupTable {
            order: self.order,
            mul: self.mul.clone(),
            identity: self.identity,
            inv: self.inv.clone(),
            labels: self.labels.clone(),
            orders: OnceLock::new(),
        }
    }
}

impl PartialEq for GroupTable {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.mul == other.mul
            && self.identity == other.identity
            && self.labels == other.labels
    }
}

impl Eq for GroupTable {}

impl GroupTable {
    /// Validates an untrusted row-major table: entry range, identity,
    /// inverses, and associativity according to `check`.
    pub fn from_table(
        order: usize,
        mul: &[usize],
        labels: Option<Vec<String>>,
        check: AssociativityCheck,
    ) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::EmptyGroup);
        }
        if order > MAX_TABLE_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        if mul.len() != order * order {
            return Err(GroupError::WrongTableSize { expected: order * order, found: mul.len() });
        }
        if let Some((pos, &value)) = mul.iter().enumerate().find(|(_, &v)| v >= order) {
            return Err(GroupError::EntryOutOfRange { row: pos / order, col: pos % order, value });
        }
        check_labels(order, labels.as_deref())?;
        let mul: Vec<u16> = mul.iter().map(|&v| v as u16).collect();
        let at = |a: usize, b: usize| mul[a * order + b] as usize;

        let identity = (0..order)
            .find(|&e| (0..order).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![0u16; order];
        for g in 0..order {
            let h = (0..order)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or(GroupError::NoInverse(g))?;
            inv[g] = h as u16;
        }

        let run_check = match check {
            AssociativityCheck::Always => true,
            AssociativityCheck::Skip => false,
            AssociativityCheck::Auto => {
                if order > ASSOCIATIVITY_CHECK_LIMIT {
                    log::warn!(
                        "skipping O(n^3) associativity check for imported table of order {order}"
                    );
                }
                order <= ASSOCIATIVITY_CHECK_LIMIT
            }
        };
        if run_check {
            let failure = par::find_first(order, |a| {
                for b in 0..order {
                    let ab = at(a, b);
                    for c in 0..order {
                        if at(ab, c) != at(a, at(b, c)) {
                            return Some((a, b, c));
                        }
                    }
                }
                None
            });
            if let Some((a, b, c)) = failure {
                return Err(GroupError::NotAssociative { a, b, c });
            }
        }

        Ok(GroupTable { order, mul, identity, inv, labels, orders: OnceLock::new() })
    }

    /// Builds a table from a multiplication known to define a group
    /// (family constructors). Identity and inverses are still located from
    /// the table itself.
    pub fn from_fn<F>(order: usize, mul: F, labels: Option<Vec<String>>) -> Result<Self, GroupError>
    where
        F: Fn(usize, usize) -> usize + Sync + Send,
    {
        if order == 0 {
            return Err(GroupError::EmptyGroup);
        }
        if order > MAX_TABLE_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        check_labels(order, labels.as_deref())?;
        let rows = par::map_range(order, |a| (0..order).map(|b| mul(a, b) as u16).collect::<Vec<_>>());
        let mul: Vec<u16> = rows.into_iter().flatten().collect();
        let at = |a: usize, b: usize| mul[a * order + b] as usize;
        let identity = (0..order)
            .find(|&e| at(e, e) == e)
            .ok_or(GroupError::NoIdentity)?;
        let mut inv = vec![0u16; order];
        for g in 0..order {
            let row = &mul[g * order..(g + 1) * order];
            let h = row
                .iter()
                .position(|&x| x as usize == identity)
                .ok_or(GroupError::NoInverse(g))?;
            inv[g] = h as u16;
        }
        Ok(GroupTable { order, mul, identity, inv, labels, orders: OnceLock::new() })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g] as usize
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of an element: its label, or its 1-based index.
    pub fn label(&self, g: usize) -> String {
        match &self.labels {
            Some(labels) => labels[g].clone(),
            None => format!("g{}", g + 1),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GroupError> {
        check_labels(self.order, Some(&labels))?;
        self.labels = Some(labels);
        Ok(self)
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> Vec<usize> {
        self.mul.iter().map(|&x| x as usize).collect()
    }

    #[inline]
    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.commutes(a, b)))
    }

    /// Smallest `k >= 1` with `g^k = 1`.
    pub fn element_order(&self, g: usize) -> u64 {
        self.element_orders()[g] as u64
    }

    pub fn element_orders(&self) -> &[u32] {
        self.orders.get_or_init(|| {
            par::map_range(self.order, |g| {
                let mut k = 1u32;
                let mut x = g;
                while x != self.identity {
                    x = self.mul(x, g);
                    k += 1;
                }
                k
            })
        })
    }

    /// Least common multiple of the element orders.
    pub fn exponent(&self) -> u64 {
        use num_integer::Integer;
        self.element_orders().iter().fold(1u64, |acc, &o| acc.lcm(&(o as u64)))
    }

    /// `g^k`; negative exponents go through the inverse.
    pub fn power(&self, g: usize, k: i64) -> usize {
        let mut base = if k < 0 { self.inv(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Every ordered commuting pair `(i, j)`, `i`-major, including `i = j`.
    pub fn commuting_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order).flat_map(move |i| {
            (0..self.order).filter(move |&j| self.commutes(i, j)).map(move |j| (i, j))
        })
    }

    pub fn commuting_pair_count(&self) -> u64 {
        par::sum_range(self.order, |i| self.centralizer_size(i) as u64)
    }

    pub fn centralizer_size(&self, g: usize) -> usize {
        (0..self.order).filter(|&h| self.commutes(g, h)).count()
    }

    /// Number of conjugacy classes, by orbit enumeration.
    pub fn conjugacy_class_count(&self) -> usize {
        let mut seen = vec![false; self.order];
        let mut classes = 0;
        for g in 0..self.order {
            if seen[g] {
                continue;
            }
            classes += 1;
            for h in 0..self.order {
                let c = self.mul(self.mul(h, g), self.inv(h));
                seen[c] = true;
            }
        }
        classes
    }

    /// Elements whose order is a power of `l`.
    pub fn l_part(&self, l: u64) -> Result<LPartSubset, GroupError> {
        if !is_prime(l) {
            return Err(GroupError::NotPrime(l));
        }
        let members = self
            .element_orders()
            .iter()
            .enumerate()
            .filter(|(_, &o)| is_power_of(o as u64, l))
            .map(|(g, _)| g)
            .collect();
        Ok(LPartSubset { prime: l, members })
    }
}

fn check_labels(order: usize, labels: Option<&[String]>) -> Result<(), GroupError> {
    match labels {
        Some(l) if l.len() != order => Err(GroupError::LabelCount { expected: order, found: l.len() }),
        _ => Ok(()),
    }
}

/// Whether `n` is `l^k` for some `k >= 0`.
pub fn is_power_of(mut n: u64, l: u64) -> bool {
    while n.is_multiple_of(l) {
        n /= l;
    }
    n == 1
}

/// `G[l^∞]`: the sorted indices of elements of `l`-power order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPartSubset {
    pub prime: u64,
    pub members: Vec<usize>,
}

impl LPartSubset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, g: usize) -> Option<usize> {
        self.members.binary_search(&g).ok()
    }
}

/// Commuting multiplication data of a finite set of group elements.
///
/// Holds one triple `(i, j, k)` per ordered commuting pair `x_i x_j = x_j x_i`
/// whose product `x_k` is again in the set. For a whole group this is the
/// data behind the relation lattice; for `G[l^∞]` every commuting product
/// stays inside, so no pair is dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingSubset {
    size: usize,
    triples: Vec<[u32; 3]>,
    dropped: u64,
}

impl CommutingSubset {
    pub fn of_group(g: &GroupTable) -> Self {
        let n = g.order();
        let triples = par::flat_map_range(n, |i| {
            (0..n)
                .filter(|&j| g.commutes(i, j))
                .map(|j| [i as u32, j as u32, g.mul(i, j) as u32])
                .collect()
        });
        CommutingSubset { size: n, triples, dropped: 0 }
    }

    /// Restriction to `members` (global indices, any order); local index `t`
    /// refers to `members[t]`.
    pub fn of_subset(g: &GroupTable, members: &[usize]) -> Self {
        let mut local = vec![u32::MAX; g.order()];
        for (t, &m) in members.iter().enumerate() {
            local[m] = t as u32;
        }
        let rows = par::map_range(members.len(), |a| {
            let x = members[a];
            let mut out = Vec::new();
            let mut dropped = 0u64;
            for (b, &y) in members.iter().enumerate() {
                if g.commutes(x, y) {
                    match local[g.mul(x, y)] {
                        u32::MAX => dropped += 1,
                        k => out.push([a as u32, b as u32, k]),
                    }
                }
            }
            (out, dropped)
        });
        let dropped = rows.iter().map(|(_, d)| d).sum();
        let triples = rows.into_iter().flat_map(|(t, _)| t).collect();
        CommutingSubset { size: members.len(), triples, dropped }
    }

    /// Builds the structure directly from concrete elements, without a
    /// group table. `mul` must be the group law of the ambient group and
    /// `commutes` must agree with it; products are only formed for
    /// commuting pairs.
    pub fn from_elements<T, C, F>(elements: &[T], commutes: C, mul: F) -> Self
    where
        T: Hash + Eq + Sync,
        C: Fn(&T, &T) -> bool + Sync + Send,
        F: Fn(&T, &T) -> T + Sync + Send,
    {
        let index: HashMap<&T, u32> =
            elements.iter().enumerate().map(|(i, x)| (x, i as u32)).collect();
        let rows = par::map_range(elements.len(), |a| {
            let x = &elements[a];
            let mut out = Vec::new();
            let mut dropped = 0u64;
            for (b, y) in elements.iter().enumerate() {
                if commutes(x, y) {
                    match index.get(&mul(x, y)) {
                        Some(&k) => out.push([a as u32, b as u32, k]),
                        None => dropped += 1,
                    }
                }
            }
            (out, dropped)
        });
        let dropped = rows.iter().map(|(_, d)| d).sum();
        let triples = rows.into_iter().flat_map(|(t, _)| t).collect();
        CommutingSubset { size: elements.len(), triples, dropped }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn triples(&self) -> &[[u32; 3]] {
        &self.triples
    }

    /// Commuting pairs whose product fell outside the set.
    pub fn dropped_pairs(&self) -> u64 {
        self.dropped
    }
}
