use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::Arc;
use std::time::Duration;

use gid_core::geninv::gi_from_x1;
use gid_core::instance::{gen_instance, GenMode};
use gid_core::oracle::{min_codeword_weight, min_coset_weight};
use gid_core::rng;
use gid_core::solvers::strategies::{
    finiasz_sendrier, for_each_pattern, lee_brickell, leon, multi_decomp_candidate,
    multi_decomp_x1, prange_candidate, prange_sample, stern, Candidate,
};
use gid_core::solvers::{
    solve_cwp, solve_swp, verify_lwp, verify_sdp, Budget, LwpInstance, Outcome, SdpInstance,
    StrategyConfig, StrategyKind,
};
use gid_core::{decompose, FieldVector, Form, Matrix, Permutation, PrimeField, Transformation};
use proptest::prelude::*;
use rand::Rng;

fn f2() -> PrimeField {
    PrimeField::BINARY
}

fn m2(rows: &[Vec<u32>]) -> Matrix {
    Matrix::from_rows(f2(), rows).unwrap()
}

fn v2(xs: &[u32]) -> FieldVector {
    FieldVector::from_residues(f2(), xs).unwrap()
}

/// All candidates of a generator, as solutions in original coordinates.
fn solutions(
    t: &Transformation,
    gen: impl FnOnce(&mut dyn FnMut(&Candidate) -> ControlFlow<()>),
) -> Vec<FieldVector> {
    let mut out = Vec::new();
    gen(&mut |c: &Candidate| {
        out.push(c.to_solution(t));
        ControlFlow::Continue(())
    });
    out
}

fn sorted(mut v: Vec<FieldVector>) -> Vec<FieldVector> {
    v.sort_by_key(|x| x.to_residues());
    v
}

/// Plants `x = Q·[z1; z2]` on a given decomposition and returns `s = H·x`.
fn plant(h: &Matrix, t: &Transformation, z1: &[usize], z2: &[usize]) -> (FieldVector, FieldVector) {
    let (k, r) = (t.free_cols(), t.rank());
    let mut z = FieldVector::zeros(h.field(), k + r);
    for &i in z1 {
        z.set(i, 1);
    }
    for &i in z2 {
        z.set(k + i, 1);
    }
    let x = t.q().apply(&z);
    (h.mul_vec(&x).unwrap(), x)
}

#[test]
fn prange_sample_examples() {
    let h = m2(&[vec![1, 1, 0], vec![1, 0, 1]]);
    let t = Transformation::from_parts(
        &h,
        Matrix::identity(f2(), 2),
        Permutation::identity(3),
        Form::RightIdFull,
    )
    .unwrap();
    let s = v2(&[1, 1]);
    let x = prange_sample(&t, &s).unwrap();
    assert_eq!(x, v2(&[0, 1, 1]));
    assert_eq!(h.mul_vec(&x).unwrap(), s);
}

#[test]
fn prange_weight_and_support() {
    let mut rng = rng::stream(3, 0);
    for i in 0..100 {
        let f = PrimeField::new([2, 3, 5][i % 3]).unwrap();
        let h = Matrix::random_full_row_rank(f, 5, 11, &mut rng).unwrap();
        let t = decompose(&h, Form::RightIdFull, &mut rng).unwrap();
        let s = FieldVector::random_nonzero(f, 5, &mut rng);
        let x = prange_sample(&t, &s).unwrap();
        assert_eq!(h.mul_vec(&x).unwrap(), s);
        assert_eq!(x.weight(), t.transform_rhs(&s).unwrap().weight());
        // zeros on the information positions after undoing Q
        assert!(t.q().apply_inverse(&x).support().iter().all(|&j| j >= 6));
    }
}

#[test]
fn lee_brickell_finds_split_error() {
    let mut rng = rng::stream(4, 0);
    let h = Matrix::random_full_row_rank(f2(), 4, 8, &mut rng).unwrap();
    let t = decompose(&h, Form::RightIdFull, &mut rng).unwrap();
    let (s, e) = plant(&h, &t, &[2], &[1]);
    let sbar = t.transform_rhs(&s).unwrap();
    let p0 = solutions(&t, |emit| {
        let _ = lee_brickell(&t, &sbar, 0, emit);
    });
    assert_eq!(p0, vec![prange_candidate(&t, &sbar).to_solution(&t)]);
    let p1 = solutions(&t, |emit| {
        let _ = lee_brickell(&t, &sbar, 1, emit);
    });
    assert_eq!(p1.len(), 4);
    assert!(p1.contains(&e));
    let all = solutions(&t, |emit| {
        let _ = lee_brickell(&t, &sbar, 4, emit);
    });
    assert_eq!(all.len(), 1);
    assert!(t.q().apply_inverse(&all[0]).slice(0, 4).weight() == 4);
    assert_eq!(h.mul_vec(&all[0]).unwrap(), s);
}

#[test]
fn leon_filters_match_brute_force() {
    let mut rng = rng::stream(5, 0);
    let h = Matrix::random_full_row_rank(f2(), 5, 10, &mut rng).unwrap();
    let t = decompose(&h, Form::RightIdFull, &mut rng).unwrap();
    let (s, e) = plant(&h, &t, &[0, 3], &[4]);
    let sbar = t.transform_rhs(&s).unwrap();
    let ell = 2;
    let survivors = sorted(solutions(&t, |emit| {
        let _ = leon(&t, &sbar, 2, ell, emit);
    }));
    let mut brute = Vec::new();
    let _ = for_each_pattern(f2(), &(0..5).collect::<Vec<_>>(), 2, &mut |pos, _| {
        let mut z1 = FieldVector::zeros(f2(), 5);
        pos.iter().for_each(|&p| z1.set(p, 1));
        let z2 = gid_core::geninv::redundancy_part(&t, &sbar, &z1);
        if z2.slice(0, ell).is_zero() {
            brute.push(t.q().apply(&z1.concat(&z2)));
        }
        ControlFlow::Continue(())
    });
    assert_eq!(survivors, sorted(brute));
    assert!(survivors.contains(&e));
    // ℓ = r: every survivor solves V·z1 = s̄ outright
    for x in solutions(&t, |emit| {
        let _ = leon(&t, &sbar, 2, 5, emit);
    }) {
        assert!(t.q().apply_inverse(&x).slice(5, 10).is_zero());
    }
}

#[test]
fn stern_collisions_match_brute_force() {
    let mut rng = rng::stream(6, 0);
    let h = Matrix::random_full_row_rank(f2(), 4, 8, &mut rng).unwrap();
    let t = decompose(&h, Form::RightIdFull, &mut rng).unwrap();
    let s = FieldVector::random_nonzero(f2(), 4, &mut rng);
    let sbar = t.transform_rhs(&s).unwrap();
    let got = sorted(solutions(&t, |emit| {
        let _ = stern(&t, &sbar, 1, 1, emit).unwrap();
    }));
    let mut brute = Vec::new();
    for a in 0..2 {
        for b in 2..4 {
            let mut z1 = FieldVector::zeros(f2(), 4);
            z1.set(a, 1);
            z1.set(b, 1);
            let z2 = gid_core::geninv::redundancy_part(&t, &sbar, &z1);
            if z2.get(0) == 0 {
                brute.push(t.q().apply(&z1.concat(&z2)));
            }
        }
    }
    assert_eq!(got, sorted(brute));

    // ℓ = 0: every split pair collides
    let open = solutions(&t, |emit| {
        let _ = stern(&t, &sbar, 1, 0, emit).unwrap();
    });
    assert_eq!(open.len(), 4);
}

#[test]
fn stern_contains_planted_error() {
    let mut rng = rng::stream(7, 0);
    let h = Matrix::random_full_row_rank(f2(), 8, 16, &mut rng).unwrap();
    let t = decompose(&h, Form::RightIdFull, &mut rng).unwrap();
    // one error in I1, one in I2, two in the redundancy part off the window row
    let (s, e) = plant(&h, &t, &[1, 6], &[3, 5]);
    let sbar = t.transform_rhs(&s).unwrap();
    let got = solutions(&t, |emit| {
        let _ = stern(&t, &sbar, 1, 1, emit).unwrap();
    });
    assert!(got.contains(&e));
    assert!(got.iter().all(|x| h.mul_vec(x).unwrap() == s));
}

#[test]
fn finiasz_sendrier_window_solutions() {
    let mut rng = rng::stream(8, 0);
    let f3 = PrimeField::new(3).unwrap();
    let h = Matrix::random_full_row_rank(f3, 4, 8, &mut rng).unwrap();
    let t = decompose(&h, Form::PartialGe(1), &mut rng).unwrap();
    let s = FieldVector::random_nonzero(f3, 4, &mut rng);
    let sbar = t.transform_rhs(&s).unwrap();
    let w = t.free_cols();
    for p in 0..=3 {
        let got = sorted(solutions(&t, |emit| {
            let _ = finiasz_sendrier(&t, &sbar, p, emit).unwrap();
        }));
        let mut brute = Vec::new();
        let _ = for_each_pattern(f3, &(0..w).collect::<Vec<_>>(), p, &mut |pos, coefs| {
            let mut z1 = FieldVector::zeros(f3, w);
            for (&i, &c) in pos.iter().zip(coefs) {
                z1.set(i, c);
            }
            let rest = gid_core::geninv::redundancy_part(&t, &sbar, &z1);
            if rest.get(0) == 0 {
                brute.push(t.q().apply(&z1.concat(&rest.slice(1, 4))));
            }
            ControlFlow::Continue(())
        });
        assert_eq!(got, sorted(brute), "p={p}");
        assert!(got.iter().all(|x| h.mul_vec(x).unwrap() == s));
    }
}

#[test]
fn multi_block_steering() {
    let mut rng = rng::stream(9, 0);
    let h = Matrix::random_full_row_rank(f2(), 6, 12, &mut rng).unwrap();
    let t = Arc::new(decompose(&h, Form::MultiId(vec![3, 3]), &mut rng).unwrap());
    let mut s = FieldVector::random_nonzero(f2(), 6, &mut rng);
    let mut sbar = t.transform_rhs(&s).unwrap();
    while sbar.slice(0, 3).is_zero() || sbar.slice(3, 6).is_zero() {
        s = FieldVector::random_nonzero(f2(), 6, &mut rng);
        sbar = t.transform_rhs(&s).unwrap();
    }
    let zeros = vec![FieldVector::zeros(f2(), 6); 2];
    let (c, _) = multi_decomp_candidate(&t, &sbar, &zeros).unwrap();
    assert_eq!(
        c.to_solution(&t),
        prange_candidate(&t, &sbar).to_solution(&t)
    );

    let ws = vec![v2(&[1, 0, 0, 1, 0, 0]), v2(&[0, 1, 0, 1, 0, 0])];
    let (c, zero_blocks) = multi_decomp_candidate(&t, &sbar, &ws).unwrap();
    assert!(zero_blocks.is_empty());
    let x1 = multi_decomp_x1(&t, &sbar, &ws).unwrap();
    let gi = gi_from_x1(&t, x1).unwrap();
    assert_eq!(gi.apply(&s).unwrap(), c.to_solution(&t));
    assert_eq!(c.z1, v2(&[1, 1, 0, 0, 0, 0]));

    // a zero block is skipped and reported
    let h2 = m2(&[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
    let t2 = Transformation::from_parts(
        &h2,
        Matrix::identity(f2(), 2),
        Permutation::identity(4),
        Form::MultiId(vec![1]),
    )
    .unwrap();
    let sbar2 = v2(&[0, 1]);
    let ws2 = vec![v2(&[0, 0]), v2(&[1, 0])];
    let (c2, zb) = multi_decomp_candidate(&t2, &sbar2, &ws2).unwrap();
    assert_eq!(zb, vec![0]);
    assert_eq!(h2.mul_vec(&c2.to_solution(&t2)).unwrap(), sbar2);
}

#[test]
fn exhaustive_lee_brickell_reaches_oracle_minimum() {
    let mut rng = rng::stream(10, 0);
    for i in 0..30 {
        let f = PrimeField::new([2, 3][i % 2]).unwrap();
        let n = rng.gen_range(4..=9);
        let m = rng.gen_range(1..n);
        let h = Matrix::random_full_row_rank(f, m, n, &mut rng).unwrap();
        let s = FieldVector::random_nonzero(f, m, &mut rng);
        let t = decompose(&h, Form::RightIdFull, &mut rng).unwrap();
        let sbar = t.transform_rhs(&s).unwrap();
        let mut best = usize::MAX;
        for p in 0..=n - m {
            let _ = lee_brickell(&t, &sbar, p, &mut |c: &Candidate| {
                best = best.min(c.weight());
                ControlFlow::Continue(())
            });
        }
        assert_eq!(best, min_coset_weight(&h, &s).unwrap());
    }
}

#[test]
fn every_strategy_decodes_planted_instances() {
    for q in [2u64, 3] {
        let g = gen_instance(30, 15, q, 3, GenMode::Planted, 40 + q).unwrap();
        // uniform GIs land near weight n(q-1)/q, far from the planted error
        let typical = 30 * (q as usize - 1) / q as usize;
        let easy = SdpInstance::new(g.instance.h.clone(), g.instance.s.clone(), typical).unwrap();
        for kind in StrategyKind::ALL {
            let mut cfg = StrategyConfig::new(kind, 1);
            if kind == StrategyKind::MultiDecomp {
                cfg = cfg.with_ell_list(vec![5, 5]);
            }
            let inst = if kind == StrategyKind::GiRandom {
                &easy
            } else {
                &g.instance
            };
            let res = solve_cwp(inst, &cfg, &Budget::decompositions(3000)).unwrap();
            let x = res
                .solution()
                .unwrap_or_else(|| panic!("{kind} failed on q={q}"));
            assert!(verify_sdp(inst, x), "{kind}");
        }
    }
}

#[test]
fn low_weight_codewords_at_the_oracle_minimum() {
    let mut rng = rng::stream(11, 0);
    for i in 0..6 {
        let f = PrimeField::new([2, 3][i % 2]).unwrap();
        let h = Matrix::random_full_row_rank(f, 6, 12, &mut rng).unwrap();
        let d = min_codeword_weight(&h).unwrap().unwrap();
        let inst = LwpInstance::new(h, d).unwrap();
        for kind in [
            StrategyKind::LeeBrickell,
            StrategyKind::Stern,
            StrategyKind::GiRandom,
        ] {
            // Stern puts exactly p on each half of the information set
            if kind == StrategyKind::Stern && d < 2 {
                continue;
            }
            let p = if kind == StrategyKind::Stern { 1 } else { 2 };
            let cfg = StrategyConfig::new(kind, 2).with_p(p).with_ell(1);
            let res = solve_swp(&inst, &cfg, &Budget::decompositions(2000)).unwrap();
            let x = res
                .solution()
                .unwrap_or_else(|| panic!("{kind} missed weight {d}"));
            assert!(verify_lwp(&inst, x));
            assert_eq!(x.weight(), d);
        }
        let below = LwpInstance::new(inst.h.clone(), d - 1);
        if let Ok(below) = below {
            let res = solve_swp(
                &below,
                &StrategyConfig::new(StrategyKind::LeeBrickell, 0),
                &Budget::decompositions(20),
            )
            .unwrap();
            assert_eq!(res.outcome, Outcome::Fail);
        }
    }
}

#[test]
fn deterministic_for_one_worker() {
    let g = gen_instance(40, 20, 2, 6, GenMode::Planted, 12).unwrap();
    for kind in [
        StrategyKind::Prange,
        StrategyKind::GiRandom,
        StrategyKind::Stern,
    ] {
        let cfg = StrategyConfig::new(kind, 77);
        let a = solve_cwp(&g.instance, &cfg, &Budget::decompositions(200)).unwrap();
        let b = solve_cwp(&g.instance, &cfg, &Budget::decompositions(200)).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.decompositions_used, b.decompositions_used);
        assert_eq!(a.samples_used, b.samples_used);
    }
}

#[test]
fn parallel_workers_return_verified_solutions() {
    let g = gen_instance(40, 20, 2, 4, GenMode::Planted, 13).unwrap();
    let budget = Budget {
        workers: 4,
        max_decompositions: 5000,
        ..Budget::default()
    };
    let res = solve_cwp(
        &g.instance,
        &StrategyConfig::new(StrategyKind::LeeBrickell, 5),
        &budget,
    )
    .unwrap();
    assert!(verify_sdp(&g.instance, res.solution().unwrap()));
}

#[test]
fn wall_clock_limit_stops_the_search() {
    // weight 1 is unreachable for this syndrome, so only the clock ends the run
    let g = gen_instance(200, 100, 2, 1, GenMode::Random, 14).unwrap();
    let inst = SdpInstance::new(g.instance.h.clone(), g.instance.s.clone(), 0).unwrap();
    let budget = Budget {
        max_decompositions: usize::MAX,
        wall_clock_limit: Some(Duration::from_millis(200)),
        ..Budget::default()
    };
    let res = solve_cwp(
        &inst,
        &StrategyConfig::new(StrategyKind::GiRandom, 0),
        &budget,
    )
    .unwrap();
    assert_eq!(res.outcome, Outcome::Fail);
    assert!(res.elapsed < Duration::from_secs(5));
}

#[test]
fn verify_solution_examples() {
    let g = gen_instance(8, 4, 2, 1, GenMode::Planted, 1).unwrap();
    let e = g.planted.unwrap();
    assert!(verify_sdp(&g.instance, &e));
    let mut heavy = e.clone();
    let j = (0..8).find(|&j| e.get(j) == 0).unwrap();
    heavy.set(j, 1);
    assert!(!verify_sdp(&g.instance, &heavy));
    let lwp = LwpInstance::new(g.instance.h.clone(), 3).unwrap();
    assert!(!verify_lwp(&lwp, &FieldVector::zeros(f2(), 8)));
}

fn strategy_candidates(
    t: &Transformation,
    tp: &Transformation,
    s: &FieldVector,
) -> Vec<(Transformation, Candidate)> {
    let sbar = &t.transform_rhs(s).unwrap();
    let sbar_p = &tp.transform_rhs(s).unwrap();
    let mut out = Vec::new();
    let mut push = |t: &Transformation, c: &Candidate| out.push((t.clone(), c.clone()));
    for p in 0..=2 {
        let _ = lee_brickell(t, sbar, p, &mut |c: &Candidate| {
            push(t, c);
            ControlFlow::Continue(())
        });
        let _ = leon(t, sbar, p, 1, &mut |c: &Candidate| {
            push(t, c);
            ControlFlow::Continue(())
        });
        let _ = finiasz_sendrier(tp, sbar_p, p, &mut |c: &Candidate| {
            push(tp, c);
            ControlFlow::Continue(())
        });
    }
    let _ = stern(t, sbar, 1, 1, &mut |c: &Candidate| {
        push(t, c);
        ControlFlow::Continue(())
    });
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_candidate_solves_the_system(q in prop::sample::select(vec![2u64, 3, 5]), m in 2usize..5, extra in 1usize..5, seed: u64) {
        let f = PrimeField::new(q).unwrap();
        let n = m + extra;
        let mut rng = rng::stream(seed, 0);
        let h = Matrix::random_full_row_rank(f, m, n, &mut rng).unwrap();
        let s = FieldVector::random_nonzero(f, m, &mut rng);
        // the retry cap can trip on column sets that rarely span
        let t = decompose(&h, Form::RightIdFull, &mut rng);
        let tp = decompose(&h, Form::PartialGe(1), &mut rng);
        prop_assume!(t.is_ok() && tp.is_ok());
        let (t, tp) = (t.unwrap(), tp.unwrap());
        for (tt, c) in strategy_candidates(&t, &tp, &s) {
            prop_assert_eq!(h.mul_vec(&c.to_solution(&tt)).unwrap(), s.clone());
        }
    }

    #[test]
    fn stern_without_window_covers_split_patterns(m in 2usize..5, k in 2usize..6, seed: u64) {
        let mut rng = rng::stream(seed, 0);
        let h = Matrix::random_full_row_rank(f2(), m, m + k, &mut rng).unwrap();
        let s = FieldVector::random_nonzero(f2(), m, &mut rng);
        let t = decompose(&h, Form::RightIdFull, &mut rng);
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let sbar = t.transform_rhs(&s).unwrap();
        let got: BTreeSet<Vec<u32>> = solutions(&t, |emit| { let _ = stern(&t, &sbar, 1, 0, emit).unwrap(); })
            .iter().map(|x| x.to_residues()).collect();
        let half = k.div_ceil(2);
        let lb: BTreeSet<Vec<u32>> = solutions(&t, |emit| { let _ = lee_brickell(&t, &sbar, 2, emit); })
            .into_iter()
            .filter(|x| {
                let z1 = t.q().apply_inverse(x).slice(0, k).support();
                z1.iter().filter(|&&j| j < half).count() == 1
            })
            .map(|x| x.to_residues())
            .collect();
        prop_assert!(got.is_superset(&lb));
    }
}
