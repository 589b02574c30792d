use std::collections::HashSet;

use gid_core::minsat::{
    brute_minsat, brute_minsat_nonzero, count_satisfied, lift, reduce_cwp, reduce_swp, Assignment,
    MinSatInstance,
};
use gid_core::oracle::{enum_coset, min_codeword_weight, min_coset_weight};
use gid_core::rng;
use gid_core::{FieldVector, Matrix, PrimeField};
use proptest::prelude::*;

#[test]
fn reduction_is_a_fixed_function_of_the_input() {
    let mut rng = rng::stream(1, 0);
    let a = Matrix::random_full_row_rank(PrimeField::BINARY, 5, 11, &mut rng).unwrap();
    let b = FieldVector::random_nonzero(PrimeField::BINARY, 5, &mut rng);
    let (i1, _) = reduce_cwp(&a, &b).unwrap();
    let (i2, _) = reduce_cwp(&a, &b).unwrap();
    assert_eq!(i1.to_affsat(), i2.to_affsat());
    assert_eq!(i1.constraints.len(), 11);
    assert!(i1.constraints[..6]
        .iter()
        .enumerate()
        .all(|(i, c)| c.vars == vec![i + 1] && c.rhs));
}

#[test]
fn codeword_reduction_and_zero_assignment() {
    let mut rng = rng::stream(2, 0);
    for _ in 0..20 {
        let a = Matrix::random_full_row_rank(PrimeField::BINARY, 4, 10, &mut rng).unwrap();
        let (inst, ctx) = reduce_swp(&a).unwrap();
        let (g, mu) = brute_minsat(&inst).unwrap();
        assert_eq!(mu, 0);
        assert!(lift(&ctx, &g).unwrap().is_zero());
        let (g, mu) = brute_minsat_nonzero(&inst).unwrap().unwrap();
        let x = lift(&ctx, &g).unwrap();
        assert!(!x.is_zero() && a.mul_vec(&x).unwrap().is_zero());
        assert_eq!(Some(mu), min_codeword_weight(&a).unwrap());
    }
}

#[test]
fn affsat_files_round_trip() {
    let mut rng = rng::stream(3, 0);
    let a = Matrix::random_full_row_rank(PrimeField::BINARY, 6, 13, &mut rng).unwrap();
    let b = FieldVector::random_nonzero(PrimeField::BINARY, 6, &mut rng);
    let (inst, _) = reduce_cwp(&a, &b).unwrap();
    let text = inst.to_affsat();
    assert!(text.is_ascii() && !text.contains('\r'));
    assert_eq!(MinSatInstance::from_affsat(&text).unwrap(), inst);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measure_and_optimum_are_preserved(m in 1usize..6, extra in 1usize..7, seed: u64) {
        let f = PrimeField::BINARY;
        let mut rng = rng::stream(seed, 0);
        let a = Matrix::random_full_row_rank(f, m, m + extra, &mut rng).unwrap();
        let b = FieldVector::random_nonzero(f, m, &mut rng);
        let reduced = reduce_cwp(&a, &b);
        prop_assume!(reduced.is_ok());
        let (inst, ctx) = reduced.unwrap();
        prop_assert!(ctx.verify(&a));
        let mut image = HashSet::new();
        for code in 0..1u32 << extra {
            let g = Assignment::from_code(extra, code);
            let x = lift(&ctx, &g).unwrap();
            prop_assert_eq!(a.mul_vec(&x).unwrap(), b.clone());
            prop_assert_eq!(x.weight(), count_satisfied(&inst, &g).unwrap());
            image.insert(x);
        }
        let oracle: HashSet<FieldVector> = enum_coset(&a, &b).unwrap().solutions.into_iter().collect();
        prop_assert_eq!(image, oracle);
        prop_assert_eq!(brute_minsat(&inst).unwrap().1, min_coset_weight(&a, &b).unwrap());
    }

    #[test]
    fn count_is_order_independent(n_vars in 0usize..8, seed: u64) {
        let mut rng = rng::stream(seed, 1);
        let a = Matrix::random(PrimeField::BINARY, 6, n_vars, &mut rng);
        let mut inst = MinSatInstance {
            n_vars,
            constraints: (0..6)
                .map(|i| gid_core::minsat::AffineConstraint {
                    vars: a.row(i).support().into_iter().map(|v| v + 1).collect(),
                    rhs: i % 2 == 0,
                })
                .collect(),
        };
        let g = Assignment::from_code(n_vars, (seed as u32) & ((1u32 << n_vars) - 1));
        let before = count_satisfied(&inst, &g).unwrap();
        inst.constraints.reverse();
        prop_assert_eq!(before, count_satisfied(&inst, &g).unwrap());
    }
}
