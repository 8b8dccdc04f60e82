//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's lattice or engine code.

#![allow(dead_code)]

use num_integer::Integer;
use semichar::{GroupTable, Residue};

/// Plain copy of a multiplication table.
pub struct Table {
    pub n: usize,
    pub mul: Vec<usize>,
}

impl Table {
    pub fn of(g: &GroupTable) -> Self {
        Table { n: g.order(), mul: g.table() }
    }

    pub fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    pub fn identity(&self) -> usize {
        (0..self.n).find(|&e| (0..self.n).all(|x| self.m(e, x) == x)).expect("identity")
    }

    pub fn order_of(&self, x: usize) -> u64 {
        let e = self.identity();
        let (mut y, mut k) = (x, 1);
        while y != e {
            y = self.m(y, x);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.n).map(|x| self.order_of(x)).fold(1, |a, b| a.lcm(&b))
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.m(a, b) == self.m(b, a)
    }

    pub fn power(&self, x: usize, k: u64) -> usize {
        let mut y = self.identity();
        for _ in 0..k {
            y = self.m(y, x);
        }
        y
    }

    /// Number of `x` with `x^d = 1`.
    pub fn torsion_count(&self, d: u64) -> u64 {
        let e = self.identity();
        (0..self.n).filter(|&x| self.power(x, d) == e).count() as u64
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn val(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// Invariant factors (ascending, nontrivial) of a finite abelian group of
/// exponent dividing `exponent`, from `count(d) = |A[d]|`.
pub fn invariants_from_torsion(exponent: u64, count: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut per_prime: Vec<(u64, Vec<usize>)> = Vec::new();
    for p in prime_factors(exponent) {
        // r[k-1] = number of cyclic factors with p-part at least p^k.
        let mut r = Vec::new();
        let mut prev = 1u64;
        let mut pk = p;
        while exponent.is_multiple_of(pk) {
            let c = count(pk);
            assert_eq!(c % prev, 0);
            let mut ratio = c / prev;
            let mut k = 0;
            while ratio > 1 {
                assert_eq!(ratio % p, 0, "torsion counts are not powers of {p}");
                ratio /= p;
                k += 1;
            }
            r.push(k);
            prev = c;
            pk *= p;
        }
        per_prime.push((p, r));
    }
    let t = per_prime.iter().map(|(_, r)| r.first().copied().unwrap_or(0)).max().unwrap_or(0);
    // The i-th largest factor has p-part p^{#{k : r_k > i}}.
    let mut factors: Vec<u64> = (0..t)
        .map(|i| per_prime.iter().map(|(p, r)| p.pow(r.iter().filter(|&&x| x > i).count() as u32)).product())
        .collect();
    factors.reverse();
    factors
}

/// The group's own invariant factors, assuming it is abelian.
pub fn abelian_invariants(t: &Table) -> Vec<u64> {
    invariants_from_torsion(t.exponent(), |d| t.torsion_count(d))
}

/// All semicharacters by backtracking, values as numerators over the
/// exponent `E`. Each element's value must be a multiple of `E/ord(x)`.
pub fn enumerate_semicharacters(t: &Table) -> (u64, Vec<Vec<u64>>) {
    let n = t.n;
    let e = t.exponent();
    let steps: Vec<u64> = (0..n).map(|x| e / t.order_of(x)).collect();
    // Constraints v[i] + v[j] = v[k], filed under the largest index involved.
    let mut constraints: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if t.commutes(i, j) {
                let k = t.m(i, j);
                constraints[i.max(j).max(k)].push((i, j, k));
            }
        }
    }
    let mut out = Vec::new();
    let mut v = vec![0u64; n];
    fn go(
        pos: usize,
        v: &mut Vec<u64>,
        e: u64,
        steps: &[u64],
        constraints: &[Vec<(usize, usize, usize)>],
        out: &mut Vec<Vec<u64>>,
    ) {
        if pos == v.len() {
            out.push(v.clone());
            return;
        }
        let mut x = 0;
        while x < e {
            v[pos] = x;
            if constraints[pos].iter().all(|&(i, j, k)| (v[i] + v[j]) % e == v[k]) {
                go(pos + 1, v, e, steps, constraints, out);
            }
            x += steps[pos];
        }
    }
    go(0, &mut v, e, &steps, &constraints, &mut out);
    (e, out)
}

/// Invariant factors of `Ĝ` by enumerating every semicharacter.
pub fn brute_force_dual(t: &Table) -> Vec<u64> {
    let (e, all) = enumerate_semicharacters(t);
    let order_of = |f: &Vec<u64>| f.iter().map(|&x| e / x.gcd(&e)).fold(1u64, |a, b| a.lcm(&b));
    let orders: Vec<u64> = all.iter().map(order_of).collect();
    invariants_from_torsion(e, |d| orders.iter().filter(|&&o| d % o == 0).count() as u64)
}

/// Whether `v_a + v_b - v_{ab}` is an integer, using only numerators and
/// denominators.
fn additive(a: Residue, b: Residue, ab: Residue) -> bool {
    let (na, da) = (a.num() as i128, a.den() as i128);
    let (nb, db) = (b.num() as i128, b.den() as i128);
    let (nc, dc) = (ab.num() as i128, ab.den() as i128);
    let den = da * db * dc;
    (na * db * dc + nb * da * dc - nc * da * db) % den == 0
}

/// First commuting pair `(a, b)` of `members` (indices into `t`) where
/// `values` (indexed like `members`) fails to be additive.
pub fn semichar_failure_on(t: &Table, members: &[usize], values: &[Residue]) -> Option<(usize, usize)> {
    let pos: std::collections::HashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate() {
            if !t.commutes(a, b) {
                continue;
            }
            let k = pos[&t.m(a, b)];
            if !additive(values[i], values[j], values[k]) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_semichar(t: &Table, values: &[Residue]) -> bool {
    let all: Vec<usize> = (0..t.n).collect();
    values.len() == t.n && semichar_failure_on(t, &all, values).is_none()
}

pub fn is_additive_at(t: &Table, values: &[Residue], a: usize, b: usize) -> bool {
    additive(values[a], values[b], values[t.m(a, b)])
}

/// Elements of `l`-power order, ascending.
pub fn l_elements(t: &Table, l: u64) -> Vec<usize> {
    (0..t.n)
        .filter(|&x| {
            let mut o = t.order_of(x);
            while o.is_multiple_of(l) {
                o /= l;
            }
            o == 1
        })
        .collect()
}

/// Rank of a list of vectors over `F_p`, by plain Gaussian elimination.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = mod_pow(m[rank][c], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for k in 0..cols {
                    m[r][k] = (m[r][k] + p * p - f * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Numerators of `F_l`-valued functions.
pub fn fl_vector(values: &[Residue], l: u64) -> Vec<u64> {
    values
        .iter()
        .map(|v| {
            assert_eq!(l % v.den(), 0, "value {v} is not in (1/{l})Z/Z");
            v.num() * (l / v.den()) % l
        })
        .collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Determinant of a small integer matrix by fraction-free elimination.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Invariant factors (nonzero diagonal of the Smith form) from
/// determinantal divisors: `d_k` is the gcd of all `k×k` minors and the
/// `k`-th factor is `d_k / d_{k-1}`.
pub fn invariants_by_minors(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}
