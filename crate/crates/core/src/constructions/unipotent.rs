use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::algebra::{FieldElem, FiniteField, MatrixFq};
use crate::engine::{homomorphism_failure, Semicharacter};
use crate::families::{make_heisenberg, make_unitriangular, Realization, RealizedGroup};
use crate::group::CommutingSubset;
use crate::numtheory::{factorize, is_prime, mod_inverse};
use crate::par;

use super::{certify, verify_full, verify_local, ConstructionError, ConstructionReport, Domain};

/// `w_{n,p}(x) = Σ_{i=1}^{n-1} (-1)^{i+1} (p^e/i) x^i` with
/// `p^e ≤ n-1 < p^{e+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogPolynomial {
    pub n: usize,
    pub p: u64,
    pub e: u32,
    /// Coefficient of `x^i` at index `i - 1`.
    pub coefficients: Vec<BigRational>,
}

impl LogPolynomial {
    /// Whether every denominator is prime to `p`.
    pub fn is_p_integral(&self) -> bool {
        let p = BigInt::from(self.p);
        self.coefficients.iter().all(|c| !c.denom().is_multiple_of(&p))
    }

    /// Coefficients mod `p`, indexed by degree from 0.
    pub fn reduce_mod_p(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (i, c) in self.coefficients.iter().enumerate() {
            out[i + 1] = rational_mod(c, self.p);
        }
        out
    }

    /// The reduction predicted by `w ≡ Σ_{i p^e < n} (-1)^{i+1} x^{i p^e}/i`.
    pub fn predicted_reduction(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        let step = self.p.pow(self.e) as usize;
        let mut i = 1usize;
        while i * step < self.n {
            let sign = if i % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            out[i * step] = rational_mod(&BigRational::new(sign, BigInt::from(i)), self.p);
            i += 1;
        }
        out
    }

    pub fn congruence_holds(&self) -> bool {
        self.reduce_mod_p() == self.predicted_reduction()
    }
}

fn rational_mod(c: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let num = c.numer().mod_floor(&pb).to_i64().expect("small");
    let den = c.denom().mod_floor(&pb).to_i64().expect("small");
    let inv = mod_inverse(den, p as i64).expect("denominator prime to p");
    ((num * inv).rem_euclid(p as i64)) as u64
}

pub fn w_polynomial(n: usize, p: u64) -> Result<LogPolynomial, ConstructionError> {
    if !is_prime(p) {
        return Err(ConstructionError::BadParameter(format!("{p} is not prime")));
    }
    if n < 2 {
        return Err(ConstructionError::BadParameter(format!("need n >= 2, got {n}")));
    }
    let mut e = 0u32;
    while p.pow(e + 1) <= (n - 1) as u64 {
        e += 1;
    }
    let pe = BigInt::from(p.pow(e));
    let coefficients = (1..n)
        .map(|i| {
            let c = BigRational::new(pe.clone(), BigInt::from(i));
            if i % 2 == 1 {
                c
            } else {
                -c
            }
        })
        .collect();
    Ok(LogPolynomial { n, p, e, coefficients })
}

/// `Σ c_i x^i` for coefficients in the prime field, by Horner's rule.
fn eval_poly(coeffs: &[u64], x: &MatrixFq, f: &FiniteField) -> MatrixFq {
    let d = x.rows();
    let mut acc = MatrixFq::zero(d, d);
    for &c in coeffs.iter().rev() {
        acc = acc.mul_unchecked(x, f).add(&MatrixFq::identity(d).scale(f.from_int(c as i64), f), f);
    }
    acc
}

fn check_nilpotent(a: &MatrixFq, n: usize, f: &FiniteField) -> Result<(), ConstructionError> {
    if a.is_square() && a.pow(n as u64, f).is_zero() {
        Ok(())
    } else {
        Err(ConstructionError::NotNilpotent(n))
    }
}

/// `w_{n,p}(A)` for `A` with `A^n = 0`, over a field of characteristic `p`.
pub fn truncated_log(a: &MatrixFq, f: &FiniteField, n: usize) -> Result<MatrixFq, ConstructionError> {
    check_nilpotent(a, n, f)?;
    if n < 2 {
        return Ok(MatrixFq::zero(a.rows(), a.cols()));
    }
    let w = w_polynomial(n, f.characteristic())?;
    Ok(eval_poly(&w.reduce_mod_p(), a, f))
}

/// `u(A) = Σ_{i=1}^{n-1} A^i / i!`, the inverse of the truncated log when
/// `p ≥ n`.
pub fn truncated_exp(a: &MatrixFq, f: &FiniteField, n: usize) -> Result<MatrixFq, ConstructionError> {
    let p = f.characteristic();
    if p < n as u64 {
        return Err(ConstructionError::BadParameter(format!("exp needs p >= n, got p = {p}, n = {n}")));
    }
    check_nilpotent(a, n, f)?;
    let mut coeffs = vec![0u64; n.max(1)];
    let mut fact = 1i64;
    for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
        fact = fact * i as i64 % p as i64;
        *c = mod_inverse(fact, p as i64).expect("i! prime to p") as u64;
    }
    Ok(eval_poly(&coeffs, a, f))
}

/// `log(g) = w_{d,p}(g - I)` for a unipotent `d×d` matrix `g`.
pub fn matrix_log(g: &MatrixFq, f: &FiniteField) -> Result<MatrixFq, ConstructionError> {
    let d = g.rows();
    truncated_log(&g.sub(&MatrixFq::identity(d), f), f, d)
}

pub(super) fn field_for(q: u64) -> Result<FiniteField, ConstructionError> {
    match factorize(q).as_slice() {
        [(p, e)] => Ok(FiniteField::new(*p, *e).map_err(crate::families::FamilyError::from)?),
        _ => Err(ConstructionError::BadParameter(format!("{q} is not a prime power"))),
    }
}

fn matrices_of(g: &RealizedGroup) -> (&FiniteField, &[MatrixFq]) {
    match &g.realization {
        Realization::Matrices { field, elements } => (field, elements),
        _ => unreachable!("matrix families are realized by matrices"),
    }
}

/// `Tr(λ·x)` for `λ` over the fixed `F_p`-basis: the additive characters
/// used for every construction over `F_q`.
fn trace_forms(f: &FiniteField, x: FieldElem) -> impl Iterator<Item = u64> + '_ {
    f.prime_basis().into_iter().map(move |lambda| f.trace(f.mul(lambda, x)) as u64)
}

/// Functions `Tr(λ·log(g)_{ij})/p` for the strictly upper entries of
/// `U(n,q)`, `n ≤ p`.
pub fn unitriangular_log_semichars(n: usize, q: u64) -> Result<ConstructionReport, ConstructionError> {
    let field = field_for(q)?;
    let p = field.characteristic();
    if n < 2 || n as u64 > p {
        return Err(ConstructionError::BadParameter(format!("need 2 <= n <= p, got n = {n}, p = {p}")));
    }
    let g = make_unitriangular(n, q)?;
    let (f, elements) = matrices_of(&g);
    let logs = elements.iter().map(|m| matrix_log(m, f)).collect::<Result<Vec<_>, _>>()?;
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let e = f.degree() as usize;
    let mut values = vec![vec![0u64; elements.len()]; slots.len() * e];
    for (idx, lg) in logs.iter().enumerate() {
        for (s, &(i, j)) in slots.iter().enumerate() {
            for (k, v) in trace_forms(f, lg.get(i, j)).enumerate() {
                values[s * e + k][idx] = v;
            }
        }
    }
    let produced: Vec<Semicharacter> = values.iter().map(|v| Semicharacter::from_fl(v, p)).collect();
    for h in &produced {
        verify_full("unitriangular logarithm", &g.table, h)?;
    }
    let (independence_rank, certified_valuation) = certify(&produced, p);
    let dim = (e * slots.len()) as u64;
    Ok(ConstructionReport {
        construction: "unitriangular logarithm",
        group: g.name(),
        prime: p,
        domain: Domain::FullGroup { order: g.order() },
        produced,
        independence_rank,
        claimed_lower_bound: dim,
        certified_valuation,
        target_valuation: dim as u32,
        exact_valuation: None,
        notes: vec![format!("log is a bijection onto the {}-dimensional F_{p}-space of nilpotent upper matrices", dim)],
    })
}

/// The Heisenberg construction together with its homomorphism checks.
#[derive(Clone, Debug)]
pub struct HeisenbergReport {
    pub report: ConstructionReport,
    /// Whether the functions built from `a` and `c` are homomorphisms.
    pub coordinates_are_homomorphisms: bool,
    /// A pair on which the first `ac - 2b` function fails to be additive.
    pub f3_failure: Option<(usize, usize)>,
    /// Whether that pair commutes (it must not).
    pub f3_failure_commutes: bool,
    /// Whether `ac - 2b = -2·log(g)_{13}` on every element.
    pub f3_matches_log: bool,
}

/// `f1 = a`, `f2 = c`, `f3 = ac - 2b` on `[[1,a,b],[0,1,c],[0,0,1]]`,
/// each composed with the trace characters.
pub fn heisenberg_semichars(q: u64) -> Result<HeisenbergReport, ConstructionError> {
    if q.is_multiple_of(2) {
        return Err(ConstructionError::BadParameter(format!("q must be odd, got {q}")));
    }
    let g = make_heisenberg(q)?;
    let (f, elements) = matrices_of(&g);
    let p = f.characteristic();
    let e = f.degree() as usize;
    let two = f.from_int(2);
    let mut values = vec![vec![0u64; elements.len()]; 3 * e];
    let mut f3_matches_log = true;
    for (idx, m) in elements.iter().enumerate() {
        let (a, b, c) = (m.get(0, 1), m.get(0, 2), m.get(1, 2));
        let f3 = f.sub(f.mul(a, c), f.mul(two, b));
        let corner = matrix_log(m, f)?.get(0, 2);
        f3_matches_log &= f.mul(f.neg(two), corner) == f3;
        for (slot, x) in [a, c, f3].into_iter().enumerate() {
            for (k, v) in trace_forms(f, x).enumerate() {
                values[slot * e + k][idx] = v;
            }
        }
    }
    let produced: Vec<Semicharacter> = values.iter().map(|v| Semicharacter::from_fl(v, p)).collect();
    for h in &produced {
        verify_full("Heisenberg coordinates", &g.table, h)?;
    }
    let coordinates_are_homomorphisms = produced[..2 * e].iter().all(|h| homomorphism_failure(&g.table, h).is_none());
    let f3_failure = homomorphism_failure(&g.table, &produced[2 * e]);
    let f3_failure_commutes = f3_failure.is_some_and(|(x, y)| g.table.commutes(x, y));
    let (independence_rank, certified_valuation) = certify(&produced, p);
    let report = ConstructionReport {
        construction: "Heisenberg coordinates",
        group: g.name(),
        prime: p,
        domain: Domain::FullGroup { order: g.order() },
        produced,
        independence_rank,
        claimed_lower_bound: 3 * e as u64,
        certified_valuation,
        target_valuation: 3 * e as u32,
        exact_valuation: None,
        notes: vec!["a and c give homomorphisms; ac - 2b is additive only on commuting pairs".into()],
    };
    Ok(HeisenbergReport { report, coordinates_are_homomorphisms, f3_failure, f3_failure_commutes, f3_matches_log })
}

/// Unipotent elements are checked pairwise with matrix products, so the
/// cap is far below the permutation one.
const UNIPOTENT_CAP: usize = 1024;

/// Unipotent `n×n` matrices over `f`, in entry-encoding order of `g - I`.
fn unipotents(f: &FiniteField, n: usize) -> Result<Vec<MatrixFq>, ConstructionError> {
    let q = f.order() as u128;
    let total = q.pow((n * n) as u32);
    let expected = q.pow((n * (n - 1)) as u32);
    if expected > UNIPOTENT_CAP as u128 || total > 1 << 20 {
        return Err(ConstructionError::TooLarge { what: "unipotent elements", size: expected, cap: UNIPOTENT_CAP });
    }
    let total = total as usize;
    let chunks = par::map_range(total.div_ceil(4096), |c| {
        (c * 4096..((c + 1) * 4096).min(total))
            .filter_map(|code| {
                let mut entries = vec![FieldElem::ZERO; n * n];
                let mut v = code as u64;
                for slot in entries.iter_mut().rev() {
                    *slot = FieldElem((v % q as u64) as u32);
                    v /= q as u64;
                }
                let nil = MatrixFq::new(n, n, entries).expect("square");
                nil.pow(n as u64, f).is_zero().then(|| nil.add(&MatrixFq::identity(n), f))
            })
            .collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// `F_p`-valued functions `g ↦ Tr(λ·F(g)_{ij})`, `F(g) = w_{n,p}(g - I)`,
/// one per off-diagonal slot and basis element `λ`, on the given
/// unipotent elements. Also reports whether every `b·E_{ij}` (`b` in the
/// basis) is a value of `F`, which certifies the functions' independence.
pub(super) fn p_part_values(
    f: &FiniteField,
    n: usize,
    elements: &[MatrixFq],
) -> Result<(Vec<Vec<u64>>, bool), ConstructionError> {
    let logs = elements
        .iter()
        .map(|g| truncated_log(&g.sub(&MatrixFq::identity(n), f), f, n))
        .collect::<Result<Vec<_>, _>>()?;
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let e = f.degree() as usize;
    let mut values = vec![vec![0u64; elements.len()]; slots.len() * e];
    for (idx, lg) in logs.iter().enumerate() {
        for (s, &(i, j)) in slots.iter().enumerate() {
            for (k, v) in trace_forms(f, lg.get(i, j)).enumerate() {
                values[s * e + k][idx] = v;
            }
        }
    }
    let certificate = slots.iter().all(|&(i, j)| {
        f.prime_basis().into_iter().all(|b| {
            let mut target = MatrixFq::zero(n, n);
            target.set(i, j, b);
            logs.contains(&target)
        })
    });
    Ok((values, certificate))
}

/// The `l = p` construction on `GL(n,q)[p^∞]`, the unipotent elements.
pub fn gl_p_part_semichars(n: usize, q: u64) -> Result<ConstructionReport, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::BadParameter(format!("need n >= 2, got {n}")));
    }
    let f = field_for(q)?;
    let p = f.characteristic();
    let elements = unipotents(&f, n)?;
    let (values, certificate) = p_part_values(&f, n, &elements)?;
    if !certificate {
        return Err(ConstructionError::Inconsistent("some b·E_ij is not a logarithm value".into()));
    }
    let produced: Vec<Semicharacter> = values.iter().map(|v| Semicharacter::from_fl(v, p)).collect();
    let c = CommutingSubset::from_elements(
        &elements,
        |x, y| x.mul_unchecked(y, &f) == y.mul_unchecked(x, &f),
        |x, y| x.mul_unchecked(y, &f),
    );
    for h in &produced {
        verify_local("unipotent logarithm", &c, h)?;
    }
    let (independence_rank, certified_valuation) = certify(&produced, p);
    let e = f.degree() as u64;
    let nn = n as u64;
    Ok(ConstructionReport {
        construction: "unipotent logarithm",
        group: format!("GL({n},{q})"),
        prime: p,
        domain: Domain::PrimaryPart { size: elements.len() },
        produced,
        independence_rank,
        claimed_lower_bound: e * nn * (nn - 1),
        certified_valuation,
        target_valuation: (e * nn * (nn - 1) / 2) as u32,
        exact_valuation: None,
        notes: vec!["every b·E_ij with b in the F_p-basis is a logarithm value".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_examples() {
        let w = w_polynomial(3, 3).unwrap();
        assert_eq!(w.e, 0);
        assert_eq!(w.reduce_mod_p(), vec![0, 1, 1]);
        let w = w_polynomial(4, 2).unwrap();
        assert_eq!(w.e, 1);
        assert_eq!(w.reduce_mod_p(), vec![0, 0, 1, 0]);
        assert!(w.congruence_holds() && w.is_p_integral());
        for p in [2, 3, 5, 7] {
            assert_eq!(w_polynomial(2, p).unwrap().reduce_mod_p(), vec![0, 1]);
        }
    }

    #[test]
    fn exp_inverts_log() {
        let f = FiniteField::new(3, 1).unwrap();
        let a = MatrixFq::from_ints(&f, &[&[0, 1, 2], &[0, 0, 1], &[0, 0, 0]]).unwrap();
        let l = truncated_log(&a, &f, 3).unwrap();
        assert_eq!(truncated_exp(&l, &f, 3).unwrap(), a);
        let b = MatrixFq::from_ints(&f, &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]).unwrap();
        assert_eq!(truncated_log(&b, &f, 3), Err(ConstructionError::NotNilpotent(3)));
    }

    #[test]
    fn unitriangular_and_heisenberg() {
        let r = unitriangular_log_semichars(3, 3).unwrap();
        assert_eq!((r.independence_rank, r.claimed_lower_bound), (3, 3));
        let r = unitriangular_log_semichars(2, 4);
        assert_eq!(r.unwrap().independence_rank, 2);
        let h = heisenberg_semichars(3).unwrap();
        assert!(h.coordinates_are_homomorphisms && h.f3_matches_log);
        assert!(h.f3_failure.is_some() && !h.f3_failure_commutes);
        assert!(heisenberg_semichars(4).is_err());
    }

    #[test]
    fn p_part_general_n() {
        let r = gl_p_part_semichars(2, 3).unwrap();
        assert_eq!((r.domain.size(), r.independence_rank), (9, 2));
        let r = gl_p_part_semichars(3, 2).unwrap();
        assert_eq!((r.domain.size(), r.independence_rank, r.claimed_lower_bound), (64, 6, 6));
    }
}
