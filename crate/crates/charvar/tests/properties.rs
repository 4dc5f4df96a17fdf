//! Property-based invariants across the crate.

use charvar::cxla::{angle_turns, Cx, Mat, UnitC};
use charvar::reps::{check_relation, Group, Representation};
use charvar::retract::{h1, h2};
use charvar::strata::{eigenvalue_map, sigma_of};
use charvar::symprod::{
    fibration_product, log_cut_order, pillowcase_map, ssym_membership, sym_stratify,
    CircleMultiset, TorusMultiset,
};
use proptest::prelude::*;

fn angle() -> impl Strategy<Value = f64> {
    (0u32..(1 << 20)).prop_map(|k| k as f64 / (1u64 << 20) as f64)
}

proptest! {
    #[test]
    fn h_pair_conserves_product(rr in 0.0..5.0f64, ss in 0.0..5.0f64, t in 0.0..=1.0f64) {
        let prod = h1(rr, ss, t).unwrap() * h2(rr, ss, t).unwrap();
        prop_assert!((prod - rr * ss).abs() <= 1e-12);
    }

    #[test]
    fn h_pair_hits_endpoints(rr in 0.0..5.0f64, ss in 0.0..5.0f64) {
        prop_assert_eq!(h1(rr, ss, 0.0).unwrap(), rr);
        prop_assert_eq!(h2(rr, ss, 0.0).unwrap(), ss);
        let root = (rr * ss).sqrt();
        prop_assert!((h1(rr, ss, 1.0).unwrap() - root).abs() <= 1e-12);
        prop_assert!((h2(rr, ss, 1.0).unwrap() - root).abs() <= 1e-12);
    }

    #[test]
    fn gaps_are_simplex_coordinates(angles in prop::collection::vec(angle(), 1..6)) {
        let (sc, ordered) = log_cut_order(&CircleMultiset::new(&angles).unwrap());
        prop_assert_eq!(sc.gaps.len(), angles.len());
        prop_assert!(sc.gaps.iter().all(|&g| g >= 0.0));
        let total: f64 = sc.gaps.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert_eq!(ordered.len(), angles.len());
    }

    #[test]
    fn log_cut_is_rotation_invariant(angles in prop::collection::vec(angle(), 1..6), offset in angle()) {
        let (sc0, _) = log_cut_order(&CircleMultiset::new(&angles).unwrap());
        let rotated: Vec<f64> = angles.iter().map(|a| a + offset).collect();
        let (sc1, _) = log_cut_order(&CircleMultiset::new(&rotated).unwrap());
        for (a, b) in sc0.gaps.iter().zip(&sc1.gaps) {
            prop_assert!((a - b).abs() <= 1e-9, "gaps {:?} vs {:?}", sc0.gaps, sc1.gaps);
        }
    }

    #[test]
    fn pillowcase_constant_on_orbits(s in angle(), t in angle()) {
        // Dyadic angles survive s -> 1 - s exactly.
        let p = pillowcase_map(s, t);
        let q = pillowcase_map(1.0 - s, 1.0 - t);
        prop_assert_eq!((p.s, p.t), (q.s, q.t));
    }

    #[test]
    fn fibration_base_detects_membership(pts in prop::collection::vec((angle(), angle()), 1..4)) {
        let tm = TorusMultiset::new(&pts).unwrap();
        let (t, s) = fibration_product(&tm);
        let member = ssym_membership(&tm, 1e-9);
        let dist = |x: f64| x.min(1.0 - x);
        prop_assert_eq!(member, dist(t) <= 1e-9 && dist(s) <= 1e-9);
    }

    #[test]
    fn stratify_is_permutation_invariant(pts in prop::collection::vec((angle(), angle()), 3..4), perm in 0usize..6) {
        let tm = TorusMultiset::new(&pts).unwrap();
        let base = sym_stratify(&tm, 1e-7).unwrap();
        let mut shuffled = pts.clone();
        // One of the six permutations of three points.
        let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        shuffled = order.iter().map(|&i| shuffled[i]).collect();
        let other = sym_stratify(&TorusMultiset::new(&shuffled).unwrap(), 1e-7).unwrap();
        prop_assert_eq!(base.sigma, other.sigma);
    }

    #[test]
    fn relation_residual_is_conjugation_invariant(seed in 0u64..500) {
        let a = charvar::cxla::random_unitary(2, seed, true).unwrap();
        let b = charvar::cxla::random_unitary(2, seed ^ 0xabcd, true).unwrap();
        let rep = Representation::new(3, Group::SU(2), a, b).unwrap();
        let p = charvar::cxla::random_unitary(2, seed ^ 0x1234, false).unwrap();
        let conj = rep.conjugated(&p).unwrap();
        let r0 = check_relation(&rep, 1e-9).residual;
        let r1 = check_relation(&conj, 1e-9).residual;
        prop_assert!((r0 - r1).abs() <= 1e-10);
    }

    #[test]
    fn eigenvalue_map_sigma_of_diagonal_pairs(k1 in 0u32..10, k2 in 0u32..10) {
        // Diagonal SU(2)-style matrices with tenth-of-turn spacing have an
        // exactly known sigma-type.
        let a = Mat::diag(&[
            UnitC::from_angle_turns(k1 as f64 / 10.0).cx(),
            UnitC::from_angle_turns(k2 as f64 / 10.0).cx(),
        ]).unwrap();
        let rep = Representation::new(4, Group::U(2), a, Mat::identity(2).unwrap()).unwrap();
        let config = eigenvalue_map(&rep).unwrap();
        let sigma = sigma_of(&config, 1e-7).unwrap().sigma;
        let expected = if k1 == k2 { vec![2] } else { vec![1, 1] };
        prop_assert_eq!(sigma.parts_ascending(), expected);
    }
}

#[test]
fn unit_circle_angles_round_trip() {
    for k in 0..97 {
        let t = k as f64 / 97.0;
        let z = UnitC::from_angle_turns(t);
        assert!((z.angle_turns() - t).abs() <= 1e-12);
        assert!((z.cx().norm() - 1.0).abs() <= 1e-15);
    }
    assert!((angle_turns(Cx::new(0.0, -1.0)) - 0.75).abs() <= 1e-15);
}
