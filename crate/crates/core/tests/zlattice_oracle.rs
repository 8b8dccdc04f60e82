mod common;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use semichar::zlattice::{
    nullspace_mod_p, smith_normal_form, sparse_quotient, vectors_rank_mod_p, IntMatrix, SparseMatrix,
};

fn matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(-bound..=bound, c), r))
}

fn dense(m: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(m[0].len(), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factors_match_minors(m in matrix(5, 5, 12)) {
        let snf = smith_normal_form(&dense(&m), false);
        let got: Vec<i128> = snf.invariant_factors.iter().map(|d| d.to_i128().unwrap()).collect();
        prop_assert_eq!(got, common::invariants_by_minors(&m));
    }

    #[test]
    fn sparse_agrees_with_dense(m in matrix(8, 7, 3)) {
        let d = dense(&m);
        let snf = smith_normal_form(&d, false);
        let q = sparse_quotient(&SparseMatrix::from_dense(&d).unwrap(), false).unwrap();
        prop_assert_eq!(q.rank, snf.rank);
        prop_assert_eq!(q.nontrivial_factors(), snf.nontrivial_factors());
    }

    #[test]
    fn quotient_generators_annihilate_rows(m in matrix(6, 6, 4)) {
        let d = dense(&m);
        let q = sparse_quotient(&SparseMatrix::from_dense(&d).unwrap(), true).unwrap();
        for g in q.generators.unwrap() {
            for row in &m {
                // Σ row_c · v_c must be an integer.
                let den = g.order as i128;
                let num: i128 = row
                    .iter()
                    .zip(&g.values)
                    .map(|(&a, v)| a as i128 * v.num() as i128 * (den / v.den() as i128))
                    .sum();
                prop_assert_eq!(num % den, 0);
            }
        }
    }

    #[test]
    fn nullspace_is_kernel(m in matrix(6, 8, 9), l in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let basis = nullspace_mod_p(&dense(&m), l).unwrap();
        let rank = common::rank_mod_p(&m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(l as i64) as u64).collect()).collect::<Vec<_>>(), l);
        prop_assert_eq!(basis.len(), m[0].len() - rank);
        prop_assert_eq!(vectors_rank_mod_p(&basis, l), basis.len());
        for v in &basis {
            for row in &m {
                let s: i64 = row.iter().zip(v).map(|(&a, &x)| a * x as i64).sum();
                prop_assert_eq!(s.rem_euclid(l as i64), 0);
            }
        }
    }
}

#[test]
fn relation_style_rows() {
    // e_i + e_j - e_k rows of Z/4 written additively: the quotient is Z/4.
    let mut m = SparseMatrix::new(4);
    for i in 0..4 {
        for j in 0..4 {
            m.push_row([(i, 1), (j, 1), ((i + j) % 4, -1)]);
        }
    }
    let q = sparse_quotient(&m, true).unwrap();
    assert_eq!(q.free_rank(), 0);
    assert_eq!(q.nontrivial_factors(), vec![BigInt::from(4)]);
}
