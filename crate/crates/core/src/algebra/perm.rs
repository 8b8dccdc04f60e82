//! Permutations of `{0, ..., n-1}`.
//!
//! Composition reads left to right, like cycle notation: `σ·τ` applies `σ`
//! first, so `(σ·τ)(x) = τ(σ(x))`. Text uses 1-based points.

use std::fmt;

use num_integer::Integer;

use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

/// A cycle as a list of 0-based points, rotated to start at its minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle(pub Vec<usize>);

impl Cycle {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[usize] {
        &self.0
    }

    /// The permutation of the given degree moving only this cycle's points.
    pub fn to_permutation(&self, degree: usize) -> Permutation {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for (i, &x) in self.0.iter().enumerate() {
            images[x] = self.0[(i + 1) % self.0.len()] as u32;
        }
        Permutation { images }
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "({})", pts.join(" "))
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// From one-line notation (`images[i]` is the image of `i`).
    pub fn from_images(images: Vec<usize>) -> Result<Self, AlgebraError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(AlgebraError::NotBijection(n));
            }
            seen[x] = true;
        }
        Ok(Permutation { images: images.into_iter().map(|x| x as u32).collect() })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    /// `self·other`: apply `self`, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Whether `self·other = other·self`, without allocating.
    #[inline]
    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.images
            .iter()
            .zip(&other.images)
            .all(|(&s, &t)| other.images[s as usize] == self.images[t as usize])
    }

    /// Disjoint cycles including fixed points, each starting at its minimum,
    /// ordered by minimum point.
    pub fn cycles(&self) -> Vec<Cycle> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(Cycle(cycle));
        }
        out
    }

    /// Cycle lengths (fixed points count as 1), largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Cycle::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn cycles_of_length(&self, k: usize) -> Vec<Cycle> {
        self.cycles().into_iter().filter(|c| c.len() == k).collect()
    }

    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().filter(|c| c.len() % 2 == 0).count() % 2 == 0
    }
}

impl fmt::Display for Permutation {
    /// Canonical cycle notation: nontrivial cycles only, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<String> =
            self.cycles().iter().filter(|c| c.len() > 1).map(|c| c.to_string()).collect();
        if cycles.is_empty() {
            write!(f, "()")
        } else {
            write!(f, "{}", cycles.concat())
        }
    }
}

/// Parses cycle notation such as `"(1 2 3)(4 5)"` or `"(1,2)"`.
///
/// Cycles need not be disjoint; they are multiplied left to right. Points are
/// 1-based and omitted points are fixed. The degree is the largest point
/// mentioned unless `degree` is given.
pub fn perm_parse(text: &str, degree: Option<usize>) -> Result<Permutation, AlgebraError> {
    let err = |pos: usize, msg: &str| AlgebraError::Parse { pos, msg: msg.into() };
    let bytes = text.as_bytes();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b if b.is_ascii_whitespace() => i += 1,
            b'(' => {
                let open = i;
                i += 1;
                let mut cycle: Vec<usize> = Vec::new();
                loop {
                    while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b',') {
                        i += 1;
                    }
                    if i >= bytes.len() {
                        return Err(err(open, "unclosed '('"));
                    }
                    match bytes[i] {
                        b')' => {
                            i += 1;
                            break;
                        }
                        b'(' => return Err(err(i, "nested '('")),
                        b if b.is_ascii_digit() => {
                            let start = i;
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                            let point: usize =
                                text[start..i].parse().map_err(|_| err(start, "point too large"))?;
                            if point < 1 {
                                return Err(err(start, "points are 1-based"));
                            }
                            if cycle.contains(&(point - 1)) {
                                return Err(err(start, "point repeated within a cycle"));
                            }
                            cycle.push(point - 1);
                        }
                        _ => return Err(err(i, "unexpected character in cycle")),
                    }
                }
                cycles.push(cycle);
            }
            b')' => return Err(err(i, "unmatched ')'")),
            _ => return Err(err(i, "expected '('")),
        }
    }
    let max_point = cycles.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
    let degree = match degree {
        Some(d) if d < max_point => {
            return Err(err(0, &format!("point {max_point} exceeds degree {d}")));
        }
        Some(d) => d,
        None => max_point,
    };
    let mut result = Permutation::identity(degree);
    for c in cycles.into_iter().filter(|c| c.len() > 1) {
        result = result.then(&Cycle(c).to_permutation(degree));
    }
    Ok(result)
}
