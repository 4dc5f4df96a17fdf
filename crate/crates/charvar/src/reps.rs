//! Representations of the twisted Hopf link group.
//!
//! A representation is a pair of matrices `(A, B)` in one of the supported
//! groups satisfying `[A^n, B] = Id`. This module verifies the relation,
//! tests irreducibility, splits semisimple representations into blocks, and
//! checks the Schur-scalar property of `A^n`.
//!
//! Reducibility is decided through common eigenvectors only. This is valid
//! for the ranks handled here: for unitary groups every invariant subspace
//! has an invariant orthogonal complement, and every partition of r <= 3
//! other than (2) and (3) contains a part of size 1; reducibility of type
//! (2) or (3) also forces a common eigenvector through a 1-dimensional
//! summand of the restriction. For SL(2,C) at r = 2 any proper invariant
//! subspace is a line.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cxla::{
    self, classify_group, eig_sl2, eig_unitary_clustered, min_singular_stacked, Cx, Mat,
    TOL_CLUSTER, TOL_RANK, TOL_RELATION, TOL_UNIT,
};
use crate::error::{Error, Result};

/// Target group of a representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    U(usize),
    SU(usize),
    Sl2c,
}

impl Group {
    pub fn rank(&self) -> usize {
        match self {
            Group::U(r) | Group::SU(r) => *r,
            Group::Sl2c => 2,
        }
    }

    pub fn is_unitary_family(&self) -> bool {
        matches!(self, Group::U(_) | Group::SU(_))
    }

    pub fn tag(&self) -> String {
        match self {
            Group::U(r) => format!("U({r})"),
            Group::SU(r) => format!("SU({r})"),
            Group::Sl2c => "SL(2,C)".to_string(),
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "U(1)" => Ok(Group::U(1)),
            "U(2)" => Ok(Group::U(2)),
            "U(3)" => Ok(Group::U(3)),
            "SU(1)" => Ok(Group::SU(1)),
            "SU(2)" => Ok(Group::SU(2)),
            "SU(3)" => Ok(Group::SU(3)),
            "SL(2,C)" => Ok(Group::Sl2c),
            other => Err(Error::UnsupportedGroup(other.to_string())),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl Serialize for Group {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.tag())
    }
}

impl<'de> Deserialize<'de> for Group {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let tag = String::deserialize(d)?;
        Group::from_tag(&tag).map_err(serde::de::Error::custom)
    }
}

/// A representation of the twisted Hopf link group with `n` twists:
/// matrices `A, B` in the declared group with `[A^n, B] = Id`.
///
/// Construction validates group membership and dimensions but not the
/// relation itself; use [`check_relation`] for that.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Representation {
    pub n: u32,
    pub group: Group,
    #[serde(rename = "A")]
    pub a: Mat,
    #[serde(rename = "B")]
    pub b: Mat,
}

impl Representation {
    pub fn new(n: u32, group: Group, a: Mat, b: Mat) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("twist count n must be positive".into()));
        }
        let r = group.rank();
        if a.dim() != r || b.dim() != r {
            return Err(Error::GroupMismatch(format!(
                "{group} expects {r}x{r} matrices, got {}x{} and {}x{}",
                a.dim(),
                a.dim(),
                b.dim(),
                b.dim()
            )));
        }
        for (name, m) in [("A", &a), ("B", &b)] {
            let class = classify_group(m, 100.0 * TOL_UNIT);
            let ok = match group {
                Group::U(_) => class.unitary,
                Group::SU(_) => class.unitary && class.special,
                Group::Sl2c => class.sl2c,
            };
            if !ok {
                return Err(Error::GroupMismatch(format!(
                    "matrix {name} is not in {group}"
                )));
            }
        }
        Ok(Representation { n, group, a, b })
    }

    /// Parses the on-disk JSON form and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Representation = serde_json::from_str(text)?;
        Representation::new(raw.n, raw.group, raw.a, raw.b)
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    /// Conjugates both matrices by `p`: `(P A P^dagger, P B P^dagger)`.
    /// Only meaningful for unitary `p`.
    pub fn conjugated(&self, p: &Mat) -> Result<Self> {
        let pd = p.adjoint();
        let a = p.mul(&self.a)?.mul(&pd)?;
        let b = p.mul(&self.b)?.mul(&pd)?;
        Ok(Representation {
            n: self.n,
            group: self.group,
            a,
            b,
        })
    }
}

/// Result of verifying the defining relation `[A^n, B] = Id`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelationCheck {
    pub ok: bool,
    pub residual: f64,
}

/// Residual `||A^n B - B A^n||_F`; the relation holds when it is within tol.
pub fn check_relation(rep: &Representation, tol: f64) -> RelationCheck {
    let an = rep.a.pow(rep.n);
    let lhs = an.mul(&rep.b).expect("same dimension");
    let rhs = rep.b.mul(&an).expect("same dimension");
    let residual = lhs.sub(&rhs).expect("same dimension").frobenius_norm();
    RelationCheck {
        ok: residual <= tol,
        residual,
    }
}

/// A joint eigenvector: `A v = lambda v` and `B v = mu v`.
#[derive(Debug, Clone)]
pub struct CommonEig {
    pub vector: Vec<Cx>,
    pub a_value: Cx,
    pub b_value: Cx,
}

/// Candidate eigenvalues of a matrix, deduplicated.
fn eigenvalue_candidates(m: &Mat, tol: f64) -> Result<Vec<Cx>> {
    let class = classify_group(m, 100.0 * TOL_UNIT);
    let values: Vec<Cx> = if class.unitary {
        eig_unitary_clustered(m, 100.0 * TOL_UNIT, TOL_CLUSTER)?
            .into_iter()
            .map(|p| p.value.cx())
            .collect()
    } else if class.sl2c {
        let (a, b) = eig_sl2(m)?;
        vec![a, b]
    } else {
        return Err(Error::NotDiagonalizable);
    };
    let mut out: Vec<Cx> = Vec::new();
    for v in values {
        if !out.iter().any(|w| (w - v).norm() <= tol) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Searches for a joint eigenvector of `a` and `b`.
///
/// For each eigenvalue pair `(lambda, mu)` the stacked matrix
/// `(A - lambda I; B - mu I)` is tested for numerical rank < r via its
/// smallest singular value; the corresponding null vector is returned on
/// the first hit. Works for unitary matrices of dimension <= 3 and for
/// SL(2,C) pairs, including non-diagonalizable B with trace +-2 (the
/// eigenvalue list degenerates to a double value and the rank test still
/// finds the unique eigenline).
pub fn common_eigenvector(a: &Mat, b: &Mat, tol: f64) -> Result<Option<CommonEig>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let lambdas = eigenvalue_candidates(a, TOL_CLUSTER)?;
    let mus = eigenvalue_candidates(b, TOL_CLUSTER)?;
    let id = Mat::identity(a.dim())?;
    for lambda in &lambdas {
        let ka = a.sub(&id.scale(*lambda))?;
        for mu in &mus {
            let kb = b.sub(&id.scale(*mu))?;
            let (sigma, v) = min_singular_stacked(&[&ka, &kb])?;
            if sigma <= tol {
                return Ok(Some(CommonEig {
                    vector: cxla::canonical_phase(v),
                    a_value: *lambda,
                    b_value: *mu,
                }));
            }
        }
    }
    Ok(None)
}

/// True iff the representation has no joint eigenvector.
pub fn is_irreducible(rep: &Representation, tol: f64) -> Result<bool> {
    match rep.group {
        Group::U(r) | Group::SU(r) if r <= 3 => {}
        Group::Sl2c => {}
        g => return Err(Error::UnsupportedGroup(g.tag())),
    }
    Ok(common_eigenvector(&rep.a, &rep.b, tol)?.is_none())
}

/// Partition of the rank recording dimensions of irreducible summands
/// (semisimple type) or eigenvalue multiplicities (sigma-type). Stored as
/// `(part, multiplicity)` with parts strictly descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionType {
    parts: Vec<(usize, usize)>,
}

impl PartitionType {
    /// Builds from an unordered list of parts, e.g. `[1, 2]` -> 2 + 1.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::OutOfRange("partition parts must be positive".into()));
        }
        let mut sorted = parts.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut grouped: Vec<(usize, usize)> = Vec::new();
        for p in sorted {
            match grouped.last_mut() {
                Some((q, a)) if *q == p => *a += 1,
                _ => grouped.push((p, 1)),
            }
        }
        Ok(PartitionType { parts: grouped })
    }

    /// Total `sum a_t * r_t`.
    pub fn total(&self) -> usize {
        self.parts.iter().map(|(r, a)| r * a).sum()
    }

    /// `(part, multiplicity)` pairs, parts strictly descending.
    pub fn grouped(&self) -> &[(usize, usize)] {
        &self.parts
    }

    /// Multiplicities `a_1, ..., a_s` in the grouped order.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, a)| *a).collect()
    }

    /// Flat part list in ascending order, the notation used in reports:
    /// 2 + 1 -> `[1, 2]`.
    pub fn parts_ascending(&self) -> Vec<usize> {
        let mut flat: Vec<usize> = self
            .parts
            .iter()
            .flat_map(|(r, a)| std::iter::repeat_n(*r, *a))
            .collect();
        flat.sort_unstable();
        flat
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.iter().map(|(_, a)| a).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// All partitions of `r`, deterministically ordered.
    pub fn all_of(r: usize) -> Vec<PartitionType> {
        fn rec(remaining: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if remaining == 0 {
                out.push(acc.clone());
                return;
            }
            for p in (1..=remaining.min(max)).rev() {
                acc.push(p);
                rec(remaining - p, p, acc, out);
                acc.pop();
            }
        }
        let mut raw = Vec::new();
        rec(r, r, &mut Vec::new(), &mut raw);
        let mut out: Vec<PartitionType> = raw
            .iter()
            .map(|parts| PartitionType::from_parts(parts).expect("valid parts"))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = self.parts_ascending();
        write!(
            f,
            "({})",
            flat.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

impl Serialize for PartitionType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts_ascending().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartitionType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let flat = Vec::<usize>::deserialize(d)?;
        PartitionType::from_parts(&flat).map_err(serde::de::Error::custom)
    }
}

/// One irreducible block of a decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct Summand {
    pub dim: usize,
    pub a_block: Mat,
    pub b_block: Mat,
}

/// Semisimple decomposition: a unitary conjugator `Q` with
/// `Q^dagger A Q` and `Q^dagger B Q` block diagonal, blocks irreducible and
/// canonically ordered (dimension descending, then lexicographically by the
/// eigenvalue arguments of the block's A-part).
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub summands: Vec<Summand>,
    pub conjugator: Mat,
    pub partition: PartitionType,
}

impl Decomposition {
    /// `conjugator * blockdiag * conjugator^dagger` for the A matrices.
    pub fn reassemble(&self) -> Result<(Mat, Mat)> {
        let r: usize = self.summands.iter().map(|s| s.dim).sum();
        let mut a = Mat::zeros(r)?;
        let mut b = Mat::zeros(r)?;
        let mut off = 0;
        for s in &self.summands {
            for i in 0..s.dim {
                for j in 0..s.dim {
                    a.set(off + i, off + j, s.a_block.get(i, j));
                    b.set(off + i, off + j, s.b_block.get(i, j));
                }
            }
            off += s.dim;
        }
        let q = &self.conjugator;
        let qd = q.adjoint();
        Ok((q.mul(&a)?.mul(&qd)?, q.mul(&b)?.mul(&qd)?))
    }
}

/// Extends a unit vector to a unitary matrix whose first column is `v`.
fn unitary_completion(v: &[Cx]) -> Result<Mat> {
    let r = v.len();
    let mut basis: Vec<Vec<Cx>> = vec![v.to_vec()];
    for i in 0..r {
        let mut e = vec![Cx::new(0.0, 0.0); r];
        e[i] = Cx::new(1.0, 0.0);
        basis.push(e);
    }
    cxla::gram_schmidt(&mut basis);
    basis.retain(|w| w.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.5);
    if basis.len() != r {
        return Err(Error::Precondition("failed to complete basis".into()));
    }
    Mat::from_cols(&basis)
}

/// Splits off common eigenvectors recursively. Returns the accumulated
/// unitary conjugator and the list of irreducible diagonal blocks in the
/// order produced by the recursion.
fn split_blocks(a: &Mat, b: &Mat, tol: f64) -> Result<(Mat, Vec<(usize, Mat, Mat)>)> {
    let r = a.dim();
    match common_eigenvector(a, b, tol)? {
        None => Ok((Mat::identity(r)?, vec![(r, a.clone(), b.clone())])),
        Some(ce) => {
            let q = unitary_completion(&ce.vector)?;
            let qd = q.adjoint();
            let a1 = qd.mul(a)?.mul(&q)?;
            let b1 = qd.mul(b)?.mul(&q)?;
            let head_a = Mat::new(1, vec![a1.get(0, 0)])?;
            let head_b = Mat::new(1, vec![b1.get(0, 0)])?;
            if r == 1 {
                return Ok((q, vec![(1, head_a, head_b)]));
            }
            let sub_a = a1.submatrix(1, r - 1)?;
            let sub_b = b1.submatrix(1, r - 1)?;
            let (q_sub, mut blocks) = split_blocks(&sub_a, &sub_b, tol)?;
            // Embed the sub-conjugator as diag(1, Q_sub) and compose.
            let mut embed = Mat::identity(r)?;
            for i in 0..r - 1 {
                for j in 0..r - 1 {
                    embed.set(1 + i, 1 + j, q_sub.get(i, j));
                }
            }
            let total = q.mul(&embed)?;
            let mut out = vec![(1usize, head_a, head_b)];
            out.append(&mut blocks);
            Ok((total, out))
        }
    }
}

/// Sort key for canonical block order: dimension descending, then the
/// ascending list of A-eigenvalue arguments (in turns) lexicographically.
fn block_key(dim: usize, a_block: &Mat) -> (usize, Vec<f64>) {
    let mut args: Vec<f64> = match eig_unitary_clustered(a_block, 1e-6, TOL_CLUSTER) {
        Ok(pairs) => pairs.iter().map(|p| p.value.angle_turns()).collect(),
        Err(_) => (0..dim).map(|i| cxla::angle_turns(a_block.get(i, i))).collect(),
    };
    args.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    (dim, args)
}

/// Semisimple decomposition of a unitary representation.
///
/// Recursively splits off common eigenvectors together with their orthogonal
/// complements. Errors on non-unitary groups (the SL(2,C) reducible locus is
/// handled in coordinates by the retract module).
pub fn decompose(rep: &Representation, tol: f64) -> Result<Decomposition> {
    if !rep.group.is_unitary_family() {
        return Err(Error::UnsupportedGroup(format!(
            "{} (decompose applies to unitary groups)",
            rep.group
        )));
    }
    let (q, blocks) = split_blocks(&rep.a, &rep.b, tol)?;

    // Canonical order: dimension descending, then lexicographic on the
    // eigenvalue arguments of the block's A-part.
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    let keys: Vec<(usize, Vec<f64>)> =
        blocks.iter().map(|(d, a, _)| block_key(*d, a)).collect();
    order.sort_by(|&i, &j| {
        keys[j].0.cmp(&keys[i].0).then_with(|| {
            keys[i]
                .1
                .partial_cmp(&keys[j].1)
                .expect("finite eigenvalue arguments")
        })
    });

    // Permute the conjugator columns by blocks.
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0usize, |acc, (d, _, _)| {
            let off = *acc;
            *acc += d;
            Some(off)
        })
        .collect();
    let mut cols: Vec<Vec<Cx>> = Vec::with_capacity(rep.rank());
    for &bi in &order {
        for j in 0..blocks[bi].0 {
            cols.push(q.col(offsets[bi] + j));
        }
    }
    let conjugator = Mat::from_cols(&cols)?;
    let summands: Vec<Summand> = order
        .iter()
        .map(|&bi| Summand {
            dim: blocks[bi].0,
            a_block: blocks[bi].1.clone(),
            b_block: blocks[bi].2.clone(),
        })
        .collect();
    let partition =
        PartitionType::from_parts(&summands.iter().map(|s| s.dim).collect::<Vec<_>>())?;
    Ok(Decomposition {
        summands,
        conjugator,
        partition,
    })
}

/// If `A^n` is a scalar multiple of the identity within tol, returns that
/// scalar `xi = (A^n)_{11}`. For irreducible representations this always
/// succeeds (Schur), and for SU(r) the scalar is an r-th root of unity.
pub fn power_scalar(rep: &Representation, tol: f64) -> Option<Cx> {
    let an = rep.a.pow(rep.n);
    let xi = an.get(0, 0);
    let scaled_id = Mat::identity(rep.rank()).expect("valid dimension").scale(xi);
    let defect = an.sub(&scaled_id).expect("same dimension").frobenius_norm();
    if defect <= tol {
        Some(xi)
    } else {
        None
    }
}

/// Default tolerances bundled for callers that do not want to pick each one.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relation residual threshold.
    pub relation: f64,
    /// Rank-decision threshold (smallest singular value).
    pub rank: f64,
    /// Eigenvalue clustering threshold.
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relation: TOL_RELATION,
            rank: TOL_RANK,
            cluster: TOL_CLUSTER,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxla::random_unitary;

    fn cx(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn unit(theta_turns: f64) -> Cx {
        let t = 2.0 * std::f64::consts::PI * theta_turns;
        cx(t.cos(), t.sin())
    }

    fn rotation(theta: f64) -> Mat {
        Mat::new(
            2,
            vec![
                cx(theta.cos(), 0.0),
                cx(-theta.sin(), 0.0),
                cx(theta.sin(), 0.0),
                cx(theta.cos(), 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn relation_trivial_when_a_is_identity() {
        let b = random_unitary(2, 3, false).unwrap();
        let rep = Representation::new(5, Group::U(2), Mat::identity(2).unwrap(), b).unwrap();
        let chk = check_relation(&rep, 1e-9);
        assert!(chk.ok);
        assert_eq!(chk.residual, 0.0);
    }

    #[test]
    fn relation_holds_for_central_power() {
        // A^2 = -I is central.
        let a = Mat::diag(&[cx(0.0, 1.0), cx(0.0, -1.0)]).unwrap();
        let b = rotation(std::f64::consts::FRAC_PI_2);
        let rep = Representation::new(2, Group::SU(2), a, b).unwrap();
        assert!(check_relation(&rep, 1e-9).ok);
    }

    #[test]
    fn relation_fails_for_generic_eigenvalues() {
        // Hand oracle: residual = 2*sqrt(2)*sin(2*pi/5).
        let a = Mat::diag(&[unit(0.1), unit(-0.1)]).unwrap();
        let b = rotation(std::f64::consts::FRAC_PI_2);
        let rep = Representation::new(2, Group::SU(2), a, b).unwrap();
        let chk = check_relation(&rep, 1e-9);
        assert!(!chk.ok);
        let expected = 2.0 * 2.0f64.sqrt() * (2.0 * std::f64::consts::PI / 5.0).sin();
        assert!((chk.residual - expected).abs() <= 1e-12);
    }

    #[test]
    fn common_eigenvector_diagonal_pair() {
        let a = Mat::diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)]).unwrap();
        let b = Mat::diag(&[cx(0.0, 1.0), cx(0.0, -1.0)]).unwrap();
        let ce = common_eigenvector(&a, &b, 1e-7).unwrap().unwrap();
        assert!((ce.vector[0].norm() - 1.0).abs() <= 1e-12);
        assert!(ce.vector[1].norm() <= 1e-12);
        assert!((ce.a_value - cx(1.0, 0.0)).norm() <= 1e-9);
        assert!((ce.b_value - cx(0.0, 1.0)).norm() <= 1e-9);
    }

    #[test]
    fn common_eigenvector_absent_for_rotated_pair() {
        // B's eigenvectors (1, -+i)/sqrt(2) are not coordinate axes.
        let a = Mat::diag(&[cx(0.0, 1.0), cx(0.0, -1.0)]).unwrap();
        let b = rotation(std::f64::consts::FRAC_PI_2);
        assert!(common_eigenvector(&a, &b, 1e-7).unwrap().is_none());
    }

    #[test]
    fn common_eigenvector_with_scalar_a() {
        let b = random_unitary(2, 11, false).unwrap();
        let ce = common_eigenvector(&Mat::identity(2).unwrap(), &b, 1e-7).unwrap();
        let ce = ce.expect("every eigenvector of B works");
        let bv = b.apply(&ce.vector);
        for i in 0..2 {
            assert!((bv[i] - ce.b_value * ce.vector[i]).norm() <= 1e-7);
        }
    }

    #[test]
    fn irreducible_su2_example() {
        let a = Mat::diag(&[unit(1.0 / 3.0), unit(-1.0 / 3.0)]).unwrap();
        let b = rotation(std::f64::consts::FRAC_PI_4);
        let rep = Representation::new(3, Group::SU(2), a, b).unwrap();
        assert!(is_irreducible(&rep, 1e-7).unwrap());
    }

    #[test]
    fn diagonal_pair_is_reducible() {
        let a = Mat::diag(&[unit(0.2), unit(-0.2)]).unwrap();
        let b = Mat::diag(&[unit(0.4), unit(-0.4)]).unwrap();
        let rep = Representation::new(1, Group::SU(2), a, b).unwrap();
        assert!(!is_irreducible(&rep, 1e-7).unwrap());
    }

    #[test]
    fn sl2c_upper_triangular_is_reducible() {
        // e1 is a common eigenvector.
        let a = Mat::diag(&[cx(2.0, 0.0), cx(0.5, 0.0)]).unwrap();
        let b = Mat::new(2, vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]).unwrap();
        let rep = Representation::new(2, Group::Sl2c, a, b).unwrap();
        assert!(!is_irreducible(&rep, 1e-7).unwrap());
        let ce = common_eigenvector(&rep.a, &rep.b, 1e-7).unwrap().unwrap();
        assert!(ce.vector[1].norm() <= 1e-9);
    }

    #[test]
    fn decompose_diagonal_pair() {
        let a = Mat::diag(&[cx(1.0, 0.0), cx(-1.0, 0.0)]).unwrap();
        let b = Mat::diag(&[cx(0.0, 1.0), cx(0.0, -1.0)]).unwrap();
        let rep = Representation::new(2, Group::U(2), a, b).unwrap();
        let dec = decompose(&rep, 1e-7).unwrap();
        assert_eq!(dec.partition, PartitionType::from_parts(&[1, 1]).unwrap());
        assert_eq!(dec.summands.len(), 2);
    }

    #[test]
    fn decompose_irreducible_is_single_block() {
        let a = Mat::diag(&[unit(1.0 / 3.0), unit(-1.0 / 3.0)]).unwrap();
        let b = rotation(std::f64::consts::FRAC_PI_4);
        let rep = Representation::new(3, Group::SU(2), a, b).unwrap();
        let dec = decompose(&rep, 1e-7).unwrap();
        assert_eq!(dec.partition, PartitionType::from_parts(&[2]).unwrap());
    }

    #[test]
    fn decompose_recovers_constructed_block_structure() {
        // blockdiag(irreducible 2-dim, 1-dim) conjugated by a random unitary.
        let mut a = Mat::zeros(3).unwrap();
        let mut b = Mat::zeros(3).unwrap();
        let a2 = Mat::diag(&[unit(0.25), unit(-0.25)]).unwrap();
        let b2 = rotation(0.7);
        for i in 0..2 {
            for j in 0..2 {
                a.set(i, j, a2.get(i, j));
                b.set(i, j, b2.get(i, j));
            }
        }
        a.set(2, 2, cx(1.0, 0.0));
        b.set(2, 2, unit(0.3));
        let p = random_unitary(3, 99, false).unwrap();
        let rep = Representation::new(2, Group::U(3), a, b)
            .unwrap()
            .conjugated(&p)
            .unwrap();
        let dec = decompose(&rep, 1e-7).unwrap();
        assert_eq!(dec.partition, PartitionType::from_parts(&[2, 1]).unwrap());
        assert_eq!(dec.summands[0].dim, 2);
        assert_eq!(dec.summands[1].dim, 1);
        let (ra, rb) = dec.reassemble().unwrap();
        assert!(ra.max_abs_diff(&rep.a) <= 1e-9);
        assert!(rb.max_abs_diff(&rep.b) <= 1e-9);
    }

    #[test]
    fn repeated_eigenvalue_irreducible_su3() {
        // sigma = (1,2): A has a doubled eigenvalue but the pair is still
        // irreducible for generic B; the merged-eigenspace path must not
        // invent a joint eigenvector.
        let configs: Vec<_> = crate::strata::enumerate_su_exact(3, 5)
            .unwrap()
            .into_iter()
            .filter(|c| c.sigma().parts_ascending() == vec![1, 2])
            .collect();
        assert!(!configs.is_empty());
        let p = random_unitary(3, 55, false).unwrap();
        let a_diag = Mat::diag(&configs[0].values()).unwrap();
        let a = p.mul(&a_diag).unwrap().mul(&p.adjoint()).unwrap();
        let b = random_unitary(3, 56, true).unwrap();
        let rep = Representation::new(5, Group::SU(3), a, b).unwrap();
        assert!(check_relation(&rep, 1e-9).ok);
        assert!(is_irreducible(&rep, 1e-7).unwrap());
        let dec = decompose(&rep, 1e-7).unwrap();
        assert_eq!(dec.partition, PartitionType::from_parts(&[3]).unwrap());
        let config = crate::strata::eigenvalue_map(&rep).unwrap();
        let sigma = crate::strata::sigma_of(&config, 1e-7).unwrap().sigma;
        assert_eq!(sigma.parts_ascending(), vec![1, 2]);
        let cf = crate::strata::canonical_form(&rep, 1e-9).unwrap();
        assert!(!cf.unique);
    }

    #[test]
    fn decompose_rejects_sl2c() {
        let a = Mat::diag(&[cx(2.0, 0.0), cx(0.5, 0.0)]).unwrap();
        let b = Mat::identity(2).unwrap();
        let rep = Representation::new(1, Group::Sl2c, a, b).unwrap();
        assert!(matches!(decompose(&rep, 1e-7), Err(Error::UnsupportedGroup(_))));
    }

    #[test]
    fn power_scalar_scalar_matrix() {
        // A = zeta*I with zeta^3 = 1: xi = zeta^n.
        let zeta = unit(1.0 / 3.0);
        let a = Mat::diag(&[zeta, zeta, zeta]).unwrap();
        let b = Mat::identity(3).unwrap();
        let rep = Representation::new(4, Group::U(3), a, b).unwrap();
        let xi = power_scalar(&rep, 1e-9).unwrap();
        assert!((xi - zeta.powu(4)).norm() <= 1e-12);
    }

    #[test]
    fn power_scalar_absent_for_generic_diagonal() {
        let a = Mat::diag(&[cx(1.0, 0.0), unit(1.0 / 14.0)]).unwrap();
        let b = Mat::identity(2).unwrap();
        let rep = Representation::new(3, Group::U(2), a, b).unwrap();
        assert!(power_scalar(&rep, 1e-9).is_none());
    }

    #[test]
    fn partition_type_normalizes() {
        let p = PartitionType::from_parts(&[1, 2, 1]).unwrap();
        assert_eq!(p.total(), 4);
        assert_eq!(p.grouped(), &[(2, 1), (1, 2)]);
        assert_eq!(p.parts_ascending(), vec![1, 1, 2]);
        assert_eq!(p.to_string(), "(1,1,2)");
    }

    #[test]
    fn partitions_of_three() {
        let all = PartitionType::all_of(3);
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn representation_json_round_trip() {
        let a = Mat::diag(&[unit(0.25), unit(-0.25)]).unwrap();
        let b = rotation(1.0);
        let rep = Representation::new(4, Group::SU(2), a, b).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        let back = Representation::from_json(&text).unwrap();
        assert_eq!(back.n, 4);
        assert_eq!(back.group, Group::SU(2));
        assert!(back.a.max_abs_diff(&rep.a) <= 1e-15);
    }

    #[test]
    fn representation_rejects_group_mismatch() {
        let a = Mat::diag(&[cx(2.0, 0.0), cx(0.5, 0.0)]).unwrap();
        let b = Mat::identity(2).unwrap();
        assert!(Representation::new(1, Group::SU(2), a, b).is_err());
    }
}
