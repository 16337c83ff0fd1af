//! SDP solver checks: rank-one optima with known values, diagonal SDPs
//! against the simplex, SDPA round trips and scaling invariance.

mod suites;

use cmebound_opt::sdpa::{read_sdpa, write_sdpa};
use cmebound_opt::{scale_conic, solve_sdp, ConicProgram64, ConicScaling, PsdBlock, Sense, SolveStatus, Tolerances};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suites::rank_one_instance;

#[test]
fn random_rank_one_sdps() {
    suites::sdp_suite(50, 31337).unwrap();
}

#[test]
fn diagonal_sdp_agrees_with_simplex() {
    suites::diagonal_suite(30, 4242).unwrap();
}

#[test]
fn trivial_two_by_two() {
    let mut cp = ConicProgram64::new(1);
    let mut b = PsdBlock::new(2);
    b.add(None, 0, 0, 1.0);
    b.add(None, 1, 1, 1.0);
    b.add(Some(0), 1, 0, 1.0);
    cp.add_block(b);
    cp.set_objective(vec![1.0], Sense::Maximize);
    let r = solve_sdp(&cp, &Tolerances::default());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.value - 1.0).abs() < 1e-7);
}

#[test]
fn hankel_boundary_example() {
    // M^0 of a one-species moment sequence (1, y1, y2) with y1 fixed.
    let mut cp = ConicProgram64::new(3);
    let mut b = PsdBlock::new(2);
    b.add(None, 0, 0, 1.0);
    b.add(Some(0), 1, 0, 1.0);
    b.add(Some(1), 1, 1, 1.0);
    cp.add_block(b);
    cp.add_eq(vec![(0, 1.0)], 0.5);
    cp.add_eq(vec![(2, 1.0)], 0.0);
    cp.set_objective(vec![0.0, 1.0, 0.0], Sense::Minimize);
    let r = solve_sdp(&cp, &Tolerances::default());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.value - 0.25).abs() < 1e-7);
}

#[test]
fn sdpa_round_trip_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (mut cp, _) = rank_one_instance(&mut rng);
        cp.add_eq(vec![(0, rng.random_range(-1.0..1.0)), (1, 0.1)], rng.random_range(-1.0..1.0));
        cp.canonicalize();
        let mut a = Vec::new();
        write_sdpa(&cp, &mut a).unwrap();
        let back = read_sdpa::<f64, _>(&a[..]).unwrap();
        assert_eq!(back, cp);
        let mut b = Vec::new();
        write_sdpa(&back, &mut b).unwrap();
        assert_eq!(a, b, "export is deterministic");
    }
}

#[test]
fn scaling_preserves_optimal_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let tol = Tolerances::default();
    for _ in 0..10 {
        let (cp, _) = rank_one_instance(&mut rng);
        let s: Vec<f64> = (0..cp.num_vars).map(|_| rng.random_range(0.1..10.0)).collect();
        let mut scaling = ConicScaling::variables(&cp, s);
        scaling.block_diag = cp.blocks.iter().map(|b| (0..b.dim).map(|_| rng.random_range(0.5..2.0)).collect()).collect();
        let (scp, un) = scale_conic(&cp, &scaling);
        let a = solve_sdp(&cp, &tol);
        let b = solve_sdp(&scp, &tol);
        assert!((a.value - un.value(b.value)).abs() < 1e-6 * (1.0 + a.value.abs()));
        let y = un.point(&b.primal);
        assert!((cp.objective_value(&y) - a.value).abs() < 1e-6 * (1.0 + a.value.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unscale_inverts_scale(values in proptest::collection::vec(-1e3f64..1e3, 3),
                             s in proptest::collection::vec(1e-3f64..1e3, 3),
                             v in -1e6f64..1e6) {
        let mut cp = ConicProgram64::new(3);
        cp.set_objective(vec![1.0, 2.0, 3.0], Sense::Maximize);
        let (_, un) = scale_conic(&cp, &ConicScaling::variables(&cp, s));
        let back = un.point(&un.scale_point(&values));
        for (a, b) in back.iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
        prop_assert!((un.value(v / un.objective_scale) - v).abs() <= 1e-10 * (1.0 + v.abs()));
    }

    #[test]
    fn psd_two_by_two_bound(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        // [[a, y], [y, b]] ⪰ 0 iff |y| ≤ √(ab).
        let mut cp = ConicProgram64::new(1);
        let mut blk = PsdBlock::new(2);
        blk.add(None, 0, 0, a);
        blk.add(None, 1, 1, b);
        blk.add(Some(0), 1, 0, 1.0);
        cp.add_block(blk);
        cp.set_objective(vec![1.0], Sense::Maximize);
        let r = solve_sdp(&cp, &Tolerances::default());
        prop_assert_eq!(r.status, SolveStatus::Optimal);
        prop_assert!((r.value - (a * b).sqrt()).abs() < 1e-6 * (1.0 + (a * b).sqrt()));
        prop_assert!(cp.min_block_eigenvalue(&r.primal) >= -1e-8);
    }
}
