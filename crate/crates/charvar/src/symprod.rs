//! Symmetric products of the circle and the torus.
//!
//! Angles are stored in turns (fractions of a full circle) rather than
//! radians, so roots of unity stay exactly representable as rationals.
//! Configurations on the circle are ordered by a deterministic logarithm
//! cut placed after the largest angular gap; configurations on the torus
//! support the determinant-one membership test, the product fibration,
//! the pillowcase quotient of the rank-2 case, and stratum labels for
//! ranks 2 and 3.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reps::PartitionType;

/// Reduces an angle in turns to [0, 1).
pub fn reduce_turns(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance between two angles along the circle, in turns (at most 1/2).
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (reduce_turns(a) - reduce_turns(b)).abs();
    d.min(1.0 - d)
}

/// Multiset of points on the circle, as angles in turns reduced mod 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMultiset {
    angles: Vec<f64>,
}

impl CircleMultiset {
    pub fn new(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::OutOfRange("empty circle multiset".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CircleMultiset {
            angles: angles.iter().map(|&a| reduce_turns(a)).collect(),
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Multiset of points on the torus: pairs of angles in turns, reduced mod 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusMultiset {
    points: Vec<(f64, f64)>,
}

impl TorusMultiset {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::OutOfRange("empty torus multiset".into()));
        }
        if points.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TorusMultiset {
            points: points
                .iter()
                .map(|&(a, b)| (reduce_turns(a), reduce_turns(b)))
                .collect(),
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The first-factor circle multiset.
    pub fn first_factor(&self) -> CircleMultiset {
        CircleMultiset {
            angles: self.points.iter().map(|&(a, _)| a).collect(),
        }
    }
}

/// Gap coordinates of a circular configuration: `r` non-negative gaps
/// summing to 1, starting at the logarithm cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexCoords {
    pub gaps: Vec<f64>,
    /// The cut angle, in turns: the first ordered point.
    pub cut: f64,
}

/// Index of the first ordered point in an ascending angle list: the point
/// immediately counterclockwise of the largest circular gap (ties: the gap
/// whose following point has the smallest angle).
pub(crate) fn log_cut_start_sorted(sorted: &[f64]) -> usize {
    let r = sorted.len();
    if r <= 1 {
        return 0;
    }
    let gap = |i: usize| {
        let next = if i + 1 < r { sorted[i + 1] } else { sorted[0] + 1.0 };
        next - sorted[i]
    };
    let mut best = 0usize;
    for i in 1..r {
        if gap(i) > gap(best) {
            best = i;
        } else if gap(i) == gap(best) {
            let follow_i = sorted[(i + 1) % r];
            let follow_b = sorted[(best + 1) % r];
            if follow_i < follow_b {
                best = i;
            }
        }
    }
    (best + 1) % r
}

/// Deterministic logarithm-cut ordering of a circular configuration.
///
/// The angles are sorted and the cut is placed immediately counterclockwise
/// of the largest angular gap (ties: the gap whose following point has the
/// smallest angle). Returns the gap coordinates and the angles in cut order.
pub fn log_cut_order(cm: &CircleMultiset) -> (SimplexCoords, Vec<f64>) {
    let r = cm.len();
    let mut sorted = cm.angles.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    if r == 1 {
        return (
            SimplexCoords {
                gaps: vec![1.0],
                cut: sorted[0],
            },
            sorted,
        );
    }
    // gap[i] runs from sorted[i] to the next point counterclockwise.
    let mut gaps = Vec::with_capacity(r);
    for i in 0..r {
        let next = if i + 1 < r {
            sorted[i + 1]
        } else {
            sorted[0] + 1.0
        };
        gaps.push(next - sorted[i]);
    }
    let start = log_cut_start_sorted(&sorted);
    let ordered: Vec<f64> = (0..r).map(|k| sorted[(start + k) % r]).collect();
    let mut out_gaps: Vec<f64> = (0..r).map(|k| gaps[(start + k) % r]).collect();
    // Normalize away accumulated rounding so the gaps sum to exactly 1.
    let total: f64 = out_gaps.iter().sum();
    if total > 0.0 && (total - 1.0).abs() > 0.0 {
        for g in &mut out_gaps {
            *g /= total;
        }
    }
    (
        SimplexCoords {
            gaps: out_gaps,
            cut: ordered[0],
        },
        ordered,
    )
}

/// True iff both angle sums vanish mod 1 within tol: the configuration lies
/// in the determinant-one symmetric product.
pub fn ssym_membership(tm: &TorusMultiset, tol: f64) -> bool {
    let (t, s) = fibration_product(tm);
    let dist = |x: f64| x.min(1.0 - x);
    dist(t) <= tol && dist(s) <= tol
}

/// Componentwise angle sums mod 1: the base point of the product fibration.
/// The fiber over (0, 0) is exactly the `ssym_membership` locus.
pub fn fibration_product(tm: &TorusMultiset) -> (f64, f64) {
    let t: f64 = tm.points.iter().map(|&(a, _)| a).sum();
    let s: f64 = tm.points.iter().map(|&(_, b)| b).sum();
    (reduce_turns(t), reduce_turns(s))
}

/// A point of the pillowcase: the quotient of the torus by
/// `(s, t) ~ (1-s, 1-t)`, with the lexicographically smaller orbit
/// representative and the four fixed points flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PillowcasePoint {
    pub s: f64,
    pub t: f64,
    pub orbifold: bool,
}

fn involute(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        reduce_turns(1.0 - x)
    }
}

/// Canonical representative of the involution orbit of `(s, t)`.
///
/// Representatives are reproduced bit-for-bit across an orbit whenever the
/// coordinates are dyadic rationals (any point of the homology grids, and
/// the samplers used in tests); for arbitrary floats the two representatives
/// may disagree in the last ulp.
pub fn pillowcase_map(lambda_angle: f64, mu_angle: f64) -> PillowcasePoint {
    let s = reduce_turns(lambda_angle);
    let t = reduce_turns(mu_angle);
    let (si, ti) = (involute(s), involute(t));
    let (cs, ct) = if (si, ti) < (s, t) { (si, ti) } else { (s, t) };
    let orbifold = (cs == 0.0 || cs == 0.5) && (ct == 0.0 || ct == 0.5);
    PillowcasePoint {
        s: cs,
        t: ct,
        orbifold,
    }
}

/// The monodromy of the rank-2 product fibration,
/// `(s, t) -> (s + 1/2, t + 1/2)`, re-canonicalized. An involution of the
/// pillowcase that swaps the four orbifold points in two 2-cycles.
pub fn monodromy_shift(p: PillowcasePoint) -> PillowcasePoint {
    pillowcase_map(p.s + 0.5, p.t + 0.5)
}

/// Stratum of a rank-2 or rank-3 torus configuration, keyed by the
/// sigma-type of its first factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumLabel {
    pub sigma: PartitionType,
    /// Human-readable stratum name from the rank-2/rank-3 case analysis.
    pub name: &'static str,
}

/// Labels the stratum of a torus configuration by clustering the
/// first-factor angles within `tau_cluster` (circular distance).
/// Supported ranks: 2 and 3.
pub fn sym_stratify(tm: &TorusMultiset, tau_cluster: f64) -> Result<StratumLabel> {
    let r = tm.len();
    if !(2..=3).contains(&r) {
        return Err(Error::OutOfRange(format!(
            "sym_stratify supports ranks 2 and 3, got {r}"
        )));
    }
    let angles: Vec<f64> = tm.points.iter().map(|&(a, _)| a).collect();
    // Transitive closure of the within-tau relation.
    let mut assigned = vec![usize::MAX; r];
    let mut next = 0usize;
    for i in 0..r {
        if assigned[i] != usize::MAX {
            continue;
        }
        assigned[i] = next;
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..r {
                if assigned[a] != next {
                    continue;
                }
                for b in 0..r {
                    if assigned[b] == usize::MAX && circle_distance(angles[a], angles[b]) <= tau_cluster
                    {
                        assigned[b] = next;
                        changed = true;
                    }
                }
            }
        }
        next += 1;
    }
    let mut mults = vec![0usize; next];
    for &g in &assigned {
        mults[g] += 1;
    }
    let sigma = PartitionType::from_parts(&mults)?;
    let name = match (r, sigma.parts_ascending().as_slice()) {
        (2, [1, 1]) => "open-cylinder",
        (2, [2]) => "boundary-interval",
        (3, [1, 1, 1]) => "distinct-triple",
        (3, [1, 2]) => "edge-with-double",
        (3, [3]) => "triple-point",
        _ => "unknown",
    };
    Ok(StratumLabel { sigma, name })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_cut_three_points() {
        // {1, i, -1} as turns {0, 1/4, 1/2}: the half-turn gap from 1/2 back
        // to 0 is largest, so the cut lands at 0.
        let cm = CircleMultiset::new(&[0.0, 0.25, 0.5]).unwrap();
        let (sc, ordered) = log_cut_order(&cm);
        assert_eq!(ordered, vec![0.0, 0.25, 0.5]);
        assert_eq!(sc.gaps, vec![0.25, 0.25, 0.5]);
        assert_eq!(sc.cut, 0.0);
    }

    #[test]
    fn log_cut_coincident_points() {
        let cm = CircleMultiset::new(&[0.0, 0.0]).unwrap();
        let (sc, ordered) = log_cut_order(&cm);
        assert_eq!(ordered, vec![0.0, 0.0]);
        assert_eq!(sc.gaps, vec![0.0, 1.0]);
        assert_eq!(sc.cut, 0.0);
    }

    #[test]
    fn log_cut_single_point() {
        let cm = CircleMultiset::new(&[0.3]).unwrap();
        let (sc, ordered) = log_cut_order(&cm);
        assert_eq!(ordered, vec![0.3]);
        assert_eq!(sc.gaps, vec![1.0]);
    }

    #[test]
    fn log_cut_gaps_sum_to_one() {
        let cm = CircleMultiset::new(&[0.11, 0.47, 0.83, 0.9]).unwrap();
        let (sc, _) = log_cut_order(&cm);
        let total: f64 = sc.gaps.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert!(sc.gaps.iter().all(|&g| g >= 0.0));
    }

    #[test]
    fn log_cut_rotation_invariance() {
        // Rotating every angle by a common offset permutes the circular gap
        // sequence cyclically but the cut realigns it.
        let base = [0.05, 0.3, 0.62];
        let cm = CircleMultiset::new(&base).unwrap();
        let (sc0, _) = log_cut_order(&cm);
        for &offset in &[0.125, 0.25, 0.5, 0.71] {
            let rotated: Vec<f64> = base.iter().map(|&a| a + offset).collect();
            let (sc, _) = log_cut_order(&CircleMultiset::new(&rotated).unwrap());
            for (a, b) in sc0.gaps.iter().zip(&sc.gaps) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ssym_membership_cases() {
        let yes = TorusMultiset::new(&[(1.0 / 3.0, 0.25), (2.0 / 3.0, 0.75)]).unwrap();
        assert!(ssym_membership(&yes, 1e-9));
        let no = TorusMultiset::new(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 0.0)]).unwrap();
        assert!(!ssym_membership(&no, 1e-9));
    }

    #[test]
    fn ssym_membership_from_su2_pair() {
        let theta = 0.2137;
        let phi = 0.718;
        let tm = TorusMultiset::new(&[(theta, phi), (-theta, -phi)]).unwrap();
        assert!(ssym_membership(&tm, 1e-9));
    }

    #[test]
    fn fibration_product_values() {
        let tm = TorusMultiset::new(&[(1.0 / 3.0, 0.25), (2.0 / 3.0, 0.75)]).unwrap();
        let (t, s) = fibration_product(&tm);
        assert!(t.abs() <= 1e-12 && s.abs() <= 1e-12);
        let tm = TorusMultiset::new(&[(0.125, 0.0), (0.125, 0.0)]).unwrap();
        assert_eq!(fibration_product(&tm), (0.25, 0.0));
    }

    #[test]
    fn fibration_product_shifts_with_trivialization() {
        // Multiplying every first factor by e^{2 pi i theta / r} shifts the
        // base by theta.
        let pts = [(0.1, 0.2), (0.3, 0.9)];
        let tm = TorusMultiset::new(&pts).unwrap();
        let (t0, s0) = fibration_product(&tm);
        let theta: f64 = 0.25;
        let shifted: Vec<(f64, f64)> =
            pts.iter().map(|&(a, b)| (a + theta / 2.0, b)).collect();
        let (t1, s1) = fibration_product(&TorusMultiset::new(&shifted).unwrap());
        assert!(circle_distance(t1, t0 + theta) <= 1e-12);
        assert!(circle_distance(s1, s0) <= 1e-12);
    }

    #[test]
    fn pillowcase_orbit_well_defined() {
        let p = pillowcase_map(0.25, 0.75);
        let q = pillowcase_map(0.75, 0.25);
        assert_eq!(p, q);
    }

    #[test]
    fn pillowcase_orbifold_points() {
        for &(s, t) in &[(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)] {
            assert!(pillowcase_map(s, t).orbifold);
        }
        assert!(!pillowcase_map(0.1, 0.2).orbifold);
        // A lexicographic representative below the diagonal stays put.
        let p = pillowcase_map(0.1, 0.2);
        assert_eq!((p.s, p.t), (0.1, 0.2));
    }

    #[test]
    fn monodromy_on_orbifold_points() {
        let p = pillowcase_map(0.0, 0.0);
        let q = monodromy_shift(p);
        assert_eq!((q.s, q.t), (0.5, 0.5));
        assert!(q.orbifold);
    }

    #[test]
    fn monodromy_is_involution() {
        for &(s, t) in &[(0.0, 0.0), (0.1, 0.2), (0.4, 0.9), (0.5, 0.25)] {
            let p = pillowcase_map(s, t);
            let twice = monodromy_shift(monodromy_shift(p));
            assert!((twice.s - p.s).abs() <= 1e-12 && (twice.t - p.t).abs() <= 1e-12);
        }
    }

    #[test]
    fn monodromy_generic_point() {
        // (0.1, 0.2) -> (0.6, 0.7), whose canonical representative is (0.4, 0.3).
        let q = monodromy_shift(pillowcase_map(0.1, 0.2));
        assert!((q.s - 0.4).abs() <= 1e-12);
        assert!((q.t - 0.3).abs() <= 1e-12);
    }

    #[test]
    fn stratify_rank2() {
        let tm = TorusMultiset::new(&[(0.0, 0.3), (0.5, 0.9)]).unwrap();
        let label = sym_stratify(&tm, 1e-7).unwrap();
        assert_eq!(label.sigma.parts_ascending(), vec![1, 1]);
        assert_eq!(label.name, "open-cylinder");
        let tm = TorusMultiset::new(&[(1.0 / 3.0, 0.3), (1.0 / 3.0, 0.9)]).unwrap();
        let label = sym_stratify(&tm, 1e-7).unwrap();
        assert_eq!(label.sigma.parts_ascending(), vec![2]);
        assert_eq!(label.name, "boundary-interval");
    }

    #[test]
    fn stratify_rank3_and_permutation_invariance() {
        let pts = [(0.0, 0.1), (0.0, 0.4), (0.5, 0.8)];
        let label = sym_stratify(&TorusMultiset::new(&pts).unwrap(), 1e-7).unwrap();
        assert_eq!(label.sigma.parts_ascending(), vec![1, 2]);
        let perm = [(0.5, 0.8), (0.0, 0.4), (0.0, 0.1)];
        let label2 = sym_stratify(&TorusMultiset::new(&perm).unwrap(), 1e-7).unwrap();
        assert_eq!(label.sigma, label2.sigma);
    }

    #[test]
    fn stratify_clusters_across_wraparound() {
        // 0.9999... and 0.0001 are close on the circle.
        let tm = TorusMultiset::new(&[(0.99999999, 0.1), (1e-8, 0.2)]).unwrap();
        let label = sym_stratify(&tm, 1e-7).unwrap();
        assert_eq!(label.sigma.parts_ascending(), vec![2]);
    }

    #[test]
    fn stratify_rejects_other_ranks() {
        let tm = TorusMultiset::new(&[(0.1, 0.2)]).unwrap();
        assert!(sym_stratify(&tm, 1e-7).is_err());
    }
}
