//! Realized groups for every family the constructions need, plus the
//! standard small families used as a test corpus.
//!
//! Element ordering is deterministic: cyclic and abelian groups use mixed
//! radix, `S_n`/`A_n` lexicographic one-line order, matrix groups the order
//! of their entry encodings, and closures breadth-first discovery order.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, FieldElem, FiniteField, MatrixFq, Permutation};
use crate::group::{GroupError, GroupTable};
use crate::numtheory::{factorial, factorize, is_prime};
use crate::par;

pub const DEFAULT_ORDER_CAP: usize = 2048;

/// Full `S_n`/`A_n` tables are built up to this degree (5040 elements).
pub const MAX_SYMMETRIC_DEGREE: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("group order {order} exceeds the cap of {cap}")]
    OverCap { order: u128, cap: usize },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("generators must share one realization kind and ambient space")]
    MixedGenerators,
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Family name plus parameters, e.g. `GL(2,3)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyDescriptor {
    pub name: String,
    pub params: Vec<u64>,
}

impl FamilyDescriptor {
    pub fn new(name: &str, params: &[u64]) -> Self {
        FamilyDescriptor { name: name.to_string(), params: params.to_vec() }
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        match self.name.as_str() {
            "cyclic" => write!(f, "C{}", p[0]),
            "abelian" => {
                let parts: Vec<String> = p.iter().map(|x| format!("C{x}")).collect();
                write!(f, "{}", if parts.is_empty() { "C1".into() } else { parts.join("x") })
            }
            "dihedral" => write!(f, "D{}", p[0]),
            "dicyclic" if p[0] == 2 => write!(f, "Q8"),
            "dicyclic" => write!(f, "Dic{}", p[0]),
            "symmetric" => write!(f, "S{}", p[0]),
            "alternating" => write!(f, "A{}", p[0]),
            "gl2" => write!(f, "GL(2,{})", p[0]),
            "sl2" => write!(f, "SL(2,{})", p[0]),
            "unitriangular" => write!(f, "U({},{})", p[0], p[1]),
            "heisenberg" => write!(f, "Heis({})", p[0]),
            other => {
                write!(f, "{other}")?;
                if !p.is_empty() {
                    let ps: Vec<String> = p.iter().map(u64::to_string).collect();
                    write!(f, "({})", ps.join(","))?;
                }
                Ok(())
            }
        }
    }
}

/// How the elements of a [`RealizedGroup`] are concretely represented.
#[derive(Clone, Debug)]
pub enum Realization {
    Permutations(Vec<Permutation>),
    Matrices { field: FiniteField, elements: Vec<MatrixFq> },
    Abstract,
}

impl Realization {
    pub fn kind(&self) -> &'static str {
        match self {
            Realization::Permutations(_) => "permutation",
            Realization::Matrices { .. } => "matrix",
            Realization::Abstract => "abstract",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RealizedGroup {
    pub table: GroupTable,
    pub realization: Realization,
    pub descriptor: FamilyDescriptor,
    /// Invariant factors (nontrivial, ascending) when the group is abelian by
    /// construction.
    pub abelian_invariants: Option<Vec<u64>>,
}

impl RealizedGroup {
    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn name(&self) -> String {
        self.descriptor.to_string()
    }

    /// Checks that the realization is injective and multiplies like the
    /// table: every pair when the order is at most 200, otherwise `samples`
    /// pseudo-random pairs. Returns the first offending pair.
    pub fn check_realization(&self, samples: usize) -> Result<(), (usize, usize)> {
        let n = self.order();
        let pairs: Vec<(usize, usize)> = if n <= 200 {
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
        } else {
            let mut state = 0x9E37_79B9_7F4A_7C15u64;
            (0..samples)
                .map(|_| {
                    state = splitmix(state);
                    let a = (state % n as u64) as usize;
                    state = splitmix(state);
                    (a, (state % n as u64) as usize)
                })
                .collect()
        };
        match &self.realization {
            Realization::Abstract => Ok(()),
            Realization::Permutations(els) => {
                check_injective(els)?;
                for (a, b) in pairs {
                    if els[a].then(&els[b]) != els[self.table.mul(a, b)] {
                        return Err((a, b));
                    }
                }
                Ok(())
            }
            Realization::Matrices { field, elements } => {
                check_injective(elements)?;
                for (a, b) in pairs {
                    if elements[a].mul_unchecked(&elements[b], field) != elements[self.table.mul(a, b)] {
                        return Err((a, b));
                    }
                }
                Ok(())
            }
        }
    }
}

fn check_injective<T: Hash + Eq>(els: &[T]) -> Result<(), (usize, usize)> {
    let mut seen: HashMap<&T, usize> = HashMap::new();
    for (i, x) in els.iter().enumerate() {
        if let Some(&j) = seen.get(x) {
            return Err((j, i));
        }
        seen.insert(x, i);
    }
    Ok(())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_cap(order: u128, cap: usize) -> Result<usize, FamilyError> {
    if order > cap as u128 {
        Err(FamilyError::OverCap { order, cap })
    } else {
        Ok(order as usize)
    }
}

/// Table of a group given by distinct concrete elements closed under `mul`.
pub fn table_from_elements<T, F>(
    elements: &[T],
    mul: F,
    labels: Option<Vec<String>>,
) -> Result<GroupTable, FamilyError>
where
    T: Hash + Eq + Sync,
    F: Fn(&T, &T) -> T + Sync + Send,
{
    let index: HashMap<&T, usize> = elements.iter().enumerate().map(|(i, x)| (x, i)).collect();
    if index.len() != elements.len() {
        return Err(FamilyError::BadParameter("repeated element".into()));
    }
    let n = elements.len();
    let rows = par::map_range(n, |a| {
        (0..n)
            .map(|b| index.get(&mul(&elements[a], &elements[b])).copied())
            .collect::<Option<Vec<usize>>>()
    });
    let rows: Vec<Vec<usize>> = rows
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| FamilyError::BadParameter("elements are not closed under multiplication".into()))?;
    Ok(GroupTable::from_fn(n, |a, b| rows[a][b], labels)?)
}

pub fn make_cyclic(n: u64) -> Result<RealizedGroup, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadParameter("cyclic order must be positive".into()));
    }
    let order = check_cap(n as u128, DEFAULT_ORDER_CAP)?;
    let labels = (0..order).map(|k| if k == 0 { "1".into() } else { format!("a^{k}") }).collect();
    let table = GroupTable::from_fn(order, |a, b| (a + b) % order, Some(labels))?;
    Ok(RealizedGroup {
        table,
        realization: Realization::Abstract,
        descriptor: FamilyDescriptor::new("cyclic", &[n]),
        abelian_invariants: Some(invariant_factors_of_product(&[n])),
    })
}

/// `C_{f_1} × ... × C_{f_k}` in mixed radix (last factor fastest).
pub fn make_abelian(factors: &[u64]) -> Result<RealizedGroup, FamilyError> {
    if factors.contains(&0) {
        return Err(FamilyError::BadParameter("cyclic factors must be positive".into()));
    }
    let order = check_cap(factors.iter().map(|&f| f as u128).product(), DEFAULT_ORDER_CAP)?;
    let f: Vec<usize> = factors.iter().map(|&x| x as usize).collect();
    let digits = |mut x: usize| {
        let mut d = vec![0usize; f.len()];
        for i in (0..f.len()).rev() {
            d[i] = x % f[i];
            x /= f[i];
        }
        d
    };
    let labels = (0..order)
        .map(|x| {
            let d: Vec<String> = digits(x).iter().map(usize::to_string).collect();
            format!("({})", d.join(","))
        })
        .collect();
    let table = GroupTable::from_fn(
        order,
        |a, b| {
            let (da, db) = (digits(a), digits(b));
            da.iter().zip(&db).zip(&f).fold(0, |acc, ((x, y), m)| acc * m + (x + y) % m)
        },
        Some(labels),
    )?;
    Ok(RealizedGroup {
        table,
        realization: Realization::Abstract,
        descriptor: FamilyDescriptor::new("abelian", factors),
        abelian_invariants: Some(invariant_factors_of_product(factors)),
    })
}

/// Nontrivial invariant factors (ascending divisibility chain) of a product
/// of cyclic groups.
pub fn invariant_factors_of_product(factors: &[u64]) -> Vec<u64> {
    let mut by_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
    for &f in factors {
        for (p, e) in factorize(f) {
            by_prime.entry(p).or_default().push(p.pow(e));
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable();
        // Largest powers go to the last (largest) invariant factors.
        for (slot, &pp) in out.iter_mut().rev().zip(powers.iter().rev()) {
            *slot *= pp;
        }
    }
    out
}

/// Dihedral group of order `2n`: elements `r^k s^ε` at index `k + nε`.
pub fn make_dihedral(n: u64) -> Result<RealizedGroup, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadParameter("dihedral parameter must be positive".into()));
    }
    let order = check_cap(2 * n as u128, DEFAULT_ORDER_CAP)?;
    let n = n as usize;
    let labels = (0..order)
        .map(|x| match (x % n, x / n) {
            (0, 0) => "1".to_string(),
            (k, 0) => format!("r^{k}"),
            (0, _) => "s".to_string(),
            (k, _) => format!("r^{k}s"),
        })
        .collect();
    let table = GroupTable::from_fn(
        order,
        |a, b| {
            let (ka, ea, kb, eb) = (a % n, a / n, b % n, b / n);
            let k = if ea == 0 { (ka + kb) % n } else { (ka + n - kb) % n };
            k + n * ((ea + eb) % 2)
        },
        Some(labels),
    )?;
    Ok(RealizedGroup {
        table,
        realization: Realization::Abstract,
        descriptor: FamilyDescriptor::new("dihedral", &[n as u64]),
        abelian_invariants: None,
    })
}

/// Dicyclic group of order `4n`: `<a, x | a^{2n} = 1, x^2 = a^n, x a x^-1 = a^-1>`.
/// `make_dicyclic(2)` is the quaternion group.
pub fn make_dicyclic(n: u64) -> Result<RealizedGroup, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadParameter("dicyclic parameter must be positive".into()));
    }
    let order = check_cap(4 * n as u128, DEFAULT_ORDER_CAP)?;
    let (n, m) = (n as usize, 2 * n as usize);
    let labels = (0..order)
        .map(|x| match (x % m, x / m) {
            (0, 0) => "1".to_string(),
            (k, 0) => format!("a^{k}"),
            (0, _) => "x".to_string(),
            (k, _) => format!("a^{k}x"),
        })
        .collect();
    let table = GroupTable::from_fn(
        order,
        |a, b| {
            let (ka, ea, kb, eb) = (a % m, a / m, b % m, b / m);
            match (ea, eb) {
                (0, _) => (ka + kb) % m + m * eb,
                (_, 0) => (ka + m - kb) % m + m,
                _ => (ka + m - kb + n) % m,
            }
        },
        Some(labels),
    )?;
    Ok(RealizedGroup {
        table,
        realization: Realization::Abstract,
        descriptor: FamilyDescriptor::new("dicyclic", &[n as u64]),
        abelian_invariants: None,
    })
}

/// Lexicographic rank of a permutation's one-line notation.
fn lex_rank(images: &[u32]) -> usize {
    let n = images.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = images[i + 1..].iter().filter(|&&x| x < images[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// All permutations of degree `n` in lexicographic one-line order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(factorial(n as u64) as usize);
    loop {
        out.push(Permutation::from_images(current.clone()).expect("valid permutation"));
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("successor exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

fn permutation_group(
    elements: Vec<Permutation>,
    degree: usize,
    descriptor: FamilyDescriptor,
) -> Result<RealizedGroup, FamilyError> {
    // Position of each S_n lex rank inside `elements`.
    let mut position = vec![usize::MAX; factorial(degree as u64) as usize];
    for (i, p) in elements.iter().enumerate() {
        position[lex_rank(&p.images().iter().map(|&x| x as u32).collect::<Vec<_>>())] = i;
    }
    let raw: Vec<Vec<u32>> =
        elements.iter().map(|p| p.images().iter().map(|&x| x as u32).collect()).collect();
    let labels = elements.iter().map(|p| p.to_string()).collect();
    let table = GroupTable::from_fn(
        elements.len(),
        |a, b| {
            let (s, t) = (&raw[a], &raw[b]);
            let mut prod = [0u32; MAX_SYMMETRIC_DEGREE];
            for x in 0..degree {
                prod[x] = t[s[x] as usize];
            }
            position[lex_rank(&prod[..degree])]
        },
        Some(labels),
    )?;
    Ok(RealizedGroup {
        table,
        realization: Realization::Permutations(elements),
        descriptor,
        abelian_invariants: None,
    })
}

pub fn make_symmetric(n: usize) -> Result<RealizedGroup, FamilyError> {
    if n == 0 || n > MAX_SYMMETRIC_DEGREE {
        return Err(FamilyError::BadParameter(format!(
            "full S_n tables need 1 <= n <= {MAX_SYMMETRIC_DEGREE}, got {n}"
        )));
    }
    permutation_group(all_permutations(n), n, FamilyDescriptor::new("symmetric", &[n as u64]))
}

pub fn make_alternating(n: usize) -> Result<RealizedGroup, FamilyError> {
    if n == 0 || n > MAX_SYMMETRIC_DEGREE {
        return Err(FamilyError::BadParameter(format!(
            "full A_n tables need 1 <= n <= {MAX_SYMMETRIC_DEGREE}, got {n}"
        )));
    }
    let even: Vec<Permutation> = all_permutations(n).into_iter().filter(Permutation::is_even).collect();
    permutation_group(even, n, FamilyDescriptor::new("alternating", &[n as u64]))
}

fn field_for(q: u64) -> Result<FiniteField, FamilyError> {
    let fac = factorize(q);
    match fac.as_slice() {
        [(p, e)] => Ok(FiniteField::new(*p, *e)?),
        _ => Err(FamilyError::BadParameter(format!("{q} is not a prime power"))),
    }
}

/// All `n×n` matrices over `f` satisfying `keep`, in entry-encoding order.
fn enumerate_matrices(
    f: &FiniteField,
    n: usize,
    keep: impl Fn(&MatrixFq) -> bool + Sync + Send,
) -> Vec<MatrixFq> {
    let q = f.order();
    let total = q.pow((n * n) as u32) as usize;
    let chunks = par::map_range(total.div_ceil(4096), |c| {
        (c * 4096..((c + 1) * 4096).min(total))
            .filter_map(|code| {
                let mut entries = vec![FieldElem::ZERO; n * n];
                let mut v = code as u64;
                for slot in entries.iter_mut().rev() {
                    *slot = FieldElem((v % q) as u32);
                    v /= q;
                }
                let m = MatrixFq::new(n, n, entries).expect("square");
                keep(&m).then_some(m)
            })
            .collect::<Vec<_>>()
    });
    chunks.into_iter().flatten().collect()
}

fn matrix_group(
    field: FiniteField,
    elements: Vec<MatrixFq>,
    descriptor: FamilyDescriptor,
) -> Result<RealizedGroup, FamilyError> {
    let labels = elements.iter().map(|m| m.format(&field)).collect();
    let table = table_from_elements(&elements, |a, b| a.mul_unchecked(b, &field), Some(labels))?;
    Ok(RealizedGroup {
        table,
        realization: Realization::Matrices { field, elements },
        descriptor,
        abelian_invariants: None,
    })
}

/// Every invertible 2×2 matrix over `F_q`.
pub fn gl2_elements(f: &FiniteField) -> Vec<MatrixFq> {
    enumerate_matrices(f, 2, |m| !m.det(f).expect("square").is_zero())
}

pub fn make_gl2(q: u64) -> Result<RealizedGroup, FamilyError> {
    let f = field_for(q)?;
    let qq = q as u128;
    check_cap((qq * qq - 1) * (qq * qq - qq), DEFAULT_ORDER_CAP)?;
    let els = gl2_elements(&f);
    matrix_group(f, els, FamilyDescriptor::new("gl2", &[q]))
}

pub fn make_sl2(q: u64) -> Result<RealizedGroup, FamilyError> {
    let f = field_for(q)?;
    let qq = q as u128;
    check_cap(qq * (qq * qq - 1), DEFAULT_ORDER_CAP)?;
    let els = enumerate_matrices(&f, 2, |m| m.det(&f).expect("square") == FieldElem::ONE);
    matrix_group(f, els, FamilyDescriptor::new("sl2", &[q]))
}

/// Upper unitriangular `n×n` matrices over `F_q`; free entries are listed
/// row by row, last entry fastest.
pub fn unitriangular_elements(f: &FiniteField, n: usize) -> Vec<MatrixFq> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let q = f.order();
    let total = q.pow(slots.len() as u32);
    (0..total)
        .map(|code| {
            let mut m = MatrixFq::identity(n);
            let mut v = code;
            for &(i, j) in slots.iter().rev() {
                m.set(i, j, FieldElem((v % q) as u32));
                v /= q;
            }
            m
        })
        .collect()
}

pub fn make_unitriangular(n: usize, q: u64) -> Result<RealizedGroup, FamilyError> {
    if n == 0 || n > 6 {
        return Err(FamilyError::BadParameter(format!("unitriangular dimension {n} outside 1..=6")));
    }
    let f = field_for(q)?;
    check_cap((q as u128).pow((n * (n - 1) / 2) as u32), DEFAULT_ORDER_CAP)?;
    let els = unitriangular_elements(&f, n);
    matrix_group(f, els, FamilyDescriptor::new("unitriangular", &[n as u64, q]))
}

/// The Heisenberg group `U(3, q)`.
pub fn make_heisenberg(q: u64) -> Result<RealizedGroup, FamilyError> {
    let mut g = make_unitriangular(3, q)?;
    g.descriptor = FamilyDescriptor::new("heisenberg", &[q]);
    Ok(g)
}

/// `G × H` with index `g·|H| + h`; the realization is dropped.
pub fn direct_product(
    g: &RealizedGroup,
    h: &RealizedGroup,
    cap: usize,
) -> Result<RealizedGroup, FamilyError> {
    let (m, n) = (g.order(), h.order());
    let order = check_cap(m as u128 * n as u128, cap)?;
    let labels = (0..order)
        .map(|x| format!("({},{})", g.table.label(x / n), h.table.label(x % n)))
        .collect();
    let table = GroupTable::from_fn(
        order,
        |a, b| g.table.mul(a / n, b / n) * n + h.table.mul(a % n, b % n),
        Some(labels),
    )?;
    let abelian_invariants = match (&g.abelian_invariants, &h.abelian_invariants) {
        (Some(a), Some(b)) => Some(invariant_factors_of_product(&[a.clone(), b.clone()].concat())),
        _ => None,
    };
    Ok(RealizedGroup {
        table,
        realization: Realization::Abstract,
        descriptor: FamilyDescriptor { name: format!("{} x {}", g.name(), h.name()), params: vec![] },
        abelian_invariants,
    })
}

/// Generators for [`closure_from_generators`].
#[derive(Clone, Debug)]
pub enum Generators {
    Permutations(Vec<Permutation>),
    Matrices { field: FiniteField, matrices: Vec<MatrixFq> },
}

fn bfs_closure<T, F>(identity: T, gens: &[T], mul: F, cap: usize) -> Result<Vec<T>, FamilyError>
where
    T: Clone + Hash + Eq,
    F: Fn(&T, &T) -> T,
{
    let mut seen: HashMap<T, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    seen.insert(identity, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for s in gens {
            let y = mul(&elements[i], s);
            if !seen.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(FamilyError::OverCap { order: elements.len() as u128 + 1, cap });
                }
                seen.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    Ok(elements)
}

/// Breadth-first closure: identity first, then discovery order under right
/// multiplication by the generators.
pub fn closure_from_generators(gens: &Generators, cap: usize) -> Result<RealizedGroup, FamilyError> {
    match gens {
        Generators::Permutations(ps) => {
            let degree = ps.first().ok_or(FamilyError::NoGenerators)?.degree();
            if ps.iter().any(|p| p.degree() != degree) {
                return Err(FamilyError::MixedGenerators);
            }
            let els = bfs_closure(Permutation::identity(degree), ps, |a, b| a.then(b), cap)?;
            let labels = els.iter().map(|p| p.to_string()).collect();
            let table = table_from_elements(&els, |a, b| a.then(b), Some(labels))?;
            Ok(RealizedGroup {
                table,
                realization: Realization::Permutations(els),
                descriptor: FamilyDescriptor::new("generated", &[]),
                abelian_invariants: None,
            })
        }
        Generators::Matrices { field, matrices } => {
            let first = matrices.first().ok_or(FamilyError::NoGenerators)?;
            let n = first.rows();
            if matrices.iter().any(|m| m.rows() != n || m.cols() != n) {
                return Err(FamilyError::MixedGenerators);
            }
            for m in matrices {
                if m.det(field)?.is_zero() {
                    return Err(AlgebraError::Singular.into());
                }
            }
            let els = bfs_closure(MatrixFq::identity(n), matrices, |a, b| a.mul_unchecked(b, field), cap)?;
            let mut g = matrix_group(field.clone(), els, FamilyDescriptor::new("generated", &[]))?;
            g.descriptor = FamilyDescriptor::new("generated", &[]);
            Ok(g)
        }
    }
}

/// A family by name and parameters, buildable on demand. The order is
/// known before anything is materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Cyclic(u64),
    Abelian(Vec<u64>),
    Dihedral(u64),
    Dicyclic(u64),
    Symmetric(usize),
    Alternating(usize),
    Gl2(u64),
    Sl2(u64),
    Unitriangular(usize, u64),
    Heisenberg(u64),
    Product(Box<FamilySpec>, Box<FamilySpec>),
}

impl FamilySpec {
    /// Parses names like `c6`, `abelian:2x4`, `d4`, `dic3`, `q8`, `s4`, `a5`,
    /// `gl2:3`, `sl2:3`, `u3:5`, `heis:3`, and products `s3*c2`.
    pub fn parse(text: &str) -> Result<Self, FamilyError> {
        let t = text.trim().to_ascii_lowercase();
        let unknown = || FamilyError::UnknownFamily(text.to_string());
        if let Some((a, b)) = t.split_once('*') {
            return Ok(FamilySpec::Product(Box::new(Self::parse(a)?), Box::new(Self::parse(b)?)));
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| unknown());
        let (head, args) = match t.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (t.clone(), None),
        };
        let spec = match (head.as_str(), args.as_deref()) {
            ("q8", None) => FamilySpec::Dicyclic(2),
            ("cyclic", Some(a)) => FamilySpec::Cyclic(num(a)?),
            ("dihedral", Some(a)) => FamilySpec::Dihedral(num(a)?),
            ("dicyclic", Some(a)) => FamilySpec::Dicyclic(num(a)?),
            ("symmetric", Some(a)) => FamilySpec::Symmetric(num(a)? as usize),
            ("alternating", Some(a)) => FamilySpec::Alternating(num(a)? as usize),
            ("gl2", Some(a)) => FamilySpec::Gl2(num(a)?),
            ("sl2", Some(a)) => FamilySpec::Sl2(num(a)?),
            ("heis" | "heisenberg", Some(a)) => FamilySpec::Heisenberg(num(a)?),
            ("abelian", Some(a)) => FamilySpec::Abelian(
                a.split(['x', ','].as_ref()).map(num).collect::<Result<_, _>>()?,
            ),
            ("unitriangular", Some(a)) => {
                let (n, q) = a.split_once(':').ok_or_else(unknown)?;
                FamilySpec::Unitriangular(num(n)? as usize, num(q)?)
            }
            (h, Some(a)) if h.starts_with('u') => FamilySpec::Unitriangular(num(&h[1..])? as usize, num(a)?),
            (h, None) if h.starts_with("dic") => FamilySpec::Dicyclic(num(&h[3..])?),
            (h, None) if h.starts_with('c') => FamilySpec::Cyclic(num(&h[1..])?),
            (h, None) if h.starts_with('d') => FamilySpec::Dihedral(num(&h[1..])?),
            (h, None) if h.starts_with('s') => FamilySpec::Symmetric(num(&h[1..])? as usize),
            (h, None) if h.starts_with('a') => FamilySpec::Alternating(num(&h[1..])? as usize),
            _ => return Err(unknown()),
        };
        Ok(spec)
    }

    /// Group order from closed-form formulas.
    pub fn order(&self) -> u128 {
        match self {
            FamilySpec::Cyclic(n) => *n as u128,
            FamilySpec::Abelian(f) => f.iter().map(|&x| x as u128).product(),
            FamilySpec::Dihedral(n) => 2 * *n as u128,
            FamilySpec::Dicyclic(n) => 4 * *n as u128,
            FamilySpec::Symmetric(n) => (1..=*n as u128).product(),
            FamilySpec::Alternating(n) => ((1..=*n as u128).product::<u128>()).div_ceil(2),
            FamilySpec::Gl2(q) => {
                let q = *q as u128;
                (q * q - 1) * (q * q - q)
            }
            FamilySpec::Sl2(q) => {
                let q = *q as u128;
                q * (q * q - 1)
            }
            FamilySpec::Unitriangular(n, q) => (*q as u128).pow((n * n.saturating_sub(1) / 2) as u32),
            FamilySpec::Heisenberg(q) => (*q as u128).pow(3),
            FamilySpec::Product(a, b) => a.order() * b.order(),
        }
    }

    pub fn build(&self) -> Result<RealizedGroup, FamilyError> {
        match self {
            FamilySpec::Cyclic(n) => make_cyclic(*n),
            FamilySpec::Abelian(f) => make_abelian(f),
            FamilySpec::Dihedral(n) => make_dihedral(*n),
            FamilySpec::Dicyclic(n) => make_dicyclic(*n),
            FamilySpec::Symmetric(n) => make_symmetric(*n),
            FamilySpec::Alternating(n) => make_alternating(*n),
            FamilySpec::Gl2(q) => make_gl2(*q),
            FamilySpec::Sl2(q) => make_sl2(*q),
            FamilySpec::Unitriangular(n, q) => make_unitriangular(*n, *q),
            FamilySpec::Heisenberg(q) => make_heisenberg(*q),
            FamilySpec::Product(a, b) => direct_product(&a.build()?, &b.build()?, DEFAULT_ORDER_CAP),
        }
    }

    /// Short name (`S4`, `GL(2,3)`, `S3 x C2`, ...).
    pub fn name(&self) -> String {
        match self {
            FamilySpec::Cyclic(n) => format!("C{n}"),
            FamilySpec::Abelian(f) => FamilyDescriptor::new("abelian", f).to_string(),
            FamilySpec::Dihedral(n) => format!("D{n}"),
            FamilySpec::Dicyclic(2) => "Q8".into(),
            FamilySpec::Dicyclic(n) => format!("Dic{n}"),
            FamilySpec::Symmetric(n) => format!("S{n}"),
            FamilySpec::Alternating(n) => format!("A{n}"),
            FamilySpec::Gl2(q) => format!("GL(2,{q})"),
            FamilySpec::Sl2(q) => format!("SL(2,{q})"),
            FamilySpec::Unitriangular(n, q) => format!("U({n},{q})"),
            FamilySpec::Heisenberg(q) => format!("Heis({q})"),
            FamilySpec::Product(a, b) => format!("{} x {}", a.name(), b.name()),
        }
    }

    pub fn is_abelian_family(&self) -> bool {
        matches!(self, FamilySpec::Cyclic(_) | FamilySpec::Abelian(_))
    }
}

/// Exponent partitions of `e`, largest part first.
fn partitions(e: u32, max: u32) -> Vec<Vec<u32>> {
    if e == 0 {
        return vec![vec![]];
    }
    (1..=e.min(max))
        .rev()
        .flat_map(|first| {
            partitions(e - first, first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// One representative per isomorphism type of abelian groups of order `n`,
/// as invariant factor lists.
pub fn abelian_types(n: u64) -> Vec<Vec<u64>> {
    let mut types: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for t in &types {
            for part in partitions(e, e) {
                let powers: Vec<u64> = part.iter().map(|&k| p.pow(k)).collect();
                next.push(invariant_factors_of_product(&[t.clone(), powers].concat()));
            }
        }
        types = next;
    }
    types
}

/// The built-in corpus, ordered by group order then name.
pub fn builtin_corpus(max_order: u64) -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for n in 1..=64u64 {
        for t in abelian_types(n) {
            out.push(match t.as_slice() {
                [] => FamilySpec::Cyclic(1),
                [single] => FamilySpec::Cyclic(*single),
                _ => FamilySpec::Abelian(t),
            });
        }
    }
    out.extend((3..=32).map(FamilySpec::Dihedral));
    out.extend((2..=16).map(FamilySpec::Dicyclic));
    out.extend((3..=6).map(FamilySpec::Symmetric));
    out.extend((4..=6).map(FamilySpec::Alternating));
    out.extend([3, 5].map(FamilySpec::Heisenberg));
    out.extend([3, 5].map(|q| FamilySpec::Unitriangular(3, q)));
    out.extend([2, 3, 4, 5].map(FamilySpec::Gl2));
    out.push(FamilySpec::Sl2(3));
    let prod = |a: FamilySpec, b: FamilySpec| FamilySpec::Product(Box::new(a), Box::new(b));
    out.push(prod(FamilySpec::Symmetric(3), FamilySpec::Cyclic(2)));
    out.push(prod(FamilySpec::Symmetric(3), FamilySpec::Symmetric(3)));
    out.push(prod(FamilySpec::Dicyclic(2), FamilySpec::Cyclic(2)));
    out.push(prod(FamilySpec::Alternating(4), FamilySpec::Cyclic(2)));
    out.push(prod(FamilySpec::Dihedral(4), FamilySpec::Cyclic(3)));
    out.push(prod(FamilySpec::Symmetric(4), FamilySpec::Cyclic(2)));
    out.push(prod(FamilySpec::Dicyclic(2), FamilySpec::Dicyclic(2)));
    out.retain(|s| s.order() <= max_order as u128);
    out.sort_by_key(|s| s.order());
    out
}

/// Whether `q` is a prime power.
pub fn is_prime_power(q: u64) -> bool {
    matches!(factorize(q).as_slice(), [(p, _)] if is_prime(*p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::perm_parse;

    fn count_of_order(g: &RealizedGroup, k: u64) -> usize {
        (0..g.order()).filter(|&x| g.table.element_order(x) == k).count()
    }

    #[test]
    fn small_family_examples() {
        let c6 = make_cyclic(6).unwrap();
        assert_eq!(c6.order(), 6);
        assert_eq!(count_of_order(&c6, 6), 2);
        let d4 = make_dihedral(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert_eq!(count_of_order(&d4, 4), 2);
        assert_eq!(count_of_order(&d4, 2), 5);
        let q8 = make_dicyclic(2).unwrap();
        assert_eq!(count_of_order(&q8, 2), 1);
        assert_eq!(count_of_order(&q8, 4), 6);
        assert_eq!(q8.name(), "Q8");
    }

    #[test]
    fn symmetric_and_alternating() {
        assert_eq!(make_symmetric(3).unwrap().order(), 6);
        assert_eq!(make_alternating(4).unwrap().order(), 12);
        let s4 = make_symmetric(4).unwrap();
        assert_eq!(count_of_order(&s4, 2), 9);
        assert!(s4.check_realization(0).is_ok());
        assert!(make_symmetric(8).is_err());
        // Lexicographic order: identity first, then (2 3) as one-line 0,2,1,3.
        let Realization::Permutations(els) = &s4.realization else { panic!() };
        assert!(els[0].is_identity());
        assert_eq!(els[1].images(), vec![0, 1, 3, 2]);
    }

    #[test]
    fn matrix_families() {
        assert_eq!(make_gl2(2).unwrap().order(), 6);
        let gl3 = make_gl2(3).unwrap();
        assert_eq!(gl3.order(), 48);
        assert!(gl3.check_realization(0).is_ok());
        assert_eq!(make_heisenberg(3).unwrap().order(), 27);
        assert_eq!(make_unitriangular(4, 2).unwrap().order(), 64);
        assert_eq!(make_sl2(3).unwrap().order(), 24);
        assert!(matches!(make_gl2(8), Err(FamilyError::OverCap { .. })));
        assert!(matches!(make_gl2(6), Err(FamilyError::BadParameter(_))));
    }

    #[test]
    fn gl2_element_orders_match_the_q_plus_one_count() {
        // k > 2, k | q + 1: (q(q-1)/2) φ(k) elements of order k.
        for (q, k) in [(3u64, 4u64), (4, 5), (5, 3), (5, 6)] {
            let g = make_gl2(q).unwrap();
            let expected = (q * (q - 1) / 2) * crate::numtheory::euler_phi(k);
            assert_eq!(count_of_order(&g, k) as u64, expected, "q={q} k={k}");
        }
    }

    #[test]
    fn products() {
        let c2 = make_cyclic(2).unwrap();
        let v4 = direct_product(&c2, &c2, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(v4.table.exponent(), 2);
        assert_eq!(v4.abelian_invariants, Some(vec![2, 2]));
        let c3 = make_cyclic(3).unwrap();
        assert_eq!(direct_product(&c2, &c3, DEFAULT_ORDER_CAP).unwrap().abelian_invariants, Some(vec![6]));
        let s3c2 = direct_product(&make_symmetric(3).unwrap(), &c2, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(s3c2.order(), 12);
        // Oracle: pairs (σ, ε) with lcm(ord σ, ord ε) = 2: σ ∈ {1, 3 transpositions},
        // ε ∈ {0, 1}, minus the identity pair.
        assert_eq!(count_of_order(&s3c2, 2), 4 * 2 - 1);
        assert!(matches!(direct_product(&s3c2, &s3c2, 100), Err(FamilyError::OverCap { .. })));
    }

    #[test]
    fn closures() {
        let gens = Generators::Permutations(vec![
            perm_parse("(1 2)", Some(3)).unwrap(),
            perm_parse("(1 2 3)", Some(3)).unwrap(),
        ]);
        let s3 = closure_from_generators(&gens, 100).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.table.identity(), 0);

        let f = FiniteField::new(3, 1).unwrap();
        let shear = MatrixFq::from_ints(&f, &[&[1, 1], &[0, 1]]).unwrap();
        let c3 = closure_from_generators(&Generators::Matrices { field: f.clone(), matrices: vec![shear.clone()] }, 100)
            .unwrap();
        assert_eq!(c3.order(), 3);

        let rot = MatrixFq::from_ints(&f, &[&[0, -1], &[1, 0]]).unwrap();
        let gens = Generators::Matrices { field: f.clone(), matrices: vec![rot, shear] };
        let sl23 = closure_from_generators(&gens, 100).unwrap();
        // Oracle: brute-force SL(2,3) membership count.
        let sl_count = gl2_elements(&f).iter().filter(|m| m.det(&f).unwrap() == FieldElem::ONE).count();
        assert_eq!(sl23.order(), sl_count);
        assert_eq!(sl23.order(), 24);
        assert!(sl23.check_realization(0).is_ok());
        assert!(matches!(closure_from_generators(&gens, 10), Err(FamilyError::OverCap { .. })));
    }

    #[test]
    fn abelian_types_and_invariants() {
        assert_eq!(abelian_types(8), vec![vec![8], vec![2, 4], vec![2, 2, 2]]);
        assert_eq!(abelian_types(12).len(), 2);
        assert_eq!(invariant_factors_of_product(&[6, 4]), vec![2, 12]);
        assert_eq!(invariant_factors_of_product(&[1]), Vec::<u64>::new());
        let g = make_abelian(&[2, 4]).unwrap();
        assert_eq!(g.abelian_invariants, Some(vec![2, 4]));
        assert!(g.table.is_abelian());
    }

    #[test]
    fn family_spec_parsing_and_orders() {
        for (text, order) in [
            ("c6", 6u128), ("q8", 8), ("d4", 8), ("dic3", 12), ("s4", 24), ("a5", 60),
            ("gl2:5", 480), ("sl2:3", 24), ("u3:5", 125), ("heis:3", 27), ("abelian:2x4", 8),
            ("s3*c2", 12), ("cyclic:7", 7), ("unitriangular:3:3", 27),
        ] {
            let spec = FamilySpec::parse(text).unwrap();
            assert_eq!(spec.order(), order, "{text}");
        }
        assert!(matches!(FamilySpec::parse("bogus"), Err(FamilyError::UnknownFamily(_))));
        for spec in builtin_corpus(60) {
            assert_eq!(spec.build().unwrap().order() as u128, spec.order(), "{}", spec.name());
        }
    }
}
