//! Eigenvalue-map stratification and counting.
//!
//! The eigenvalue map sends a representation to the multiset of eigenvalues
//! of `A`. This module detects the coincidence type sigma of such a
//! configuration, enumerates all admissible SU(r) configurations exactly
//! (integer exponent arithmetic modulo `n*r`; floating point appears only at
//! the boundary), evaluates the counting formula
//! `N_sigma = (r/n) * multinomial(n; a_1, ..., a_s)`, and reduces
//! representations to canonical forms modulo the stabilizer action.
//!
//! The multinomial is taken over the multiplicities `a_i` of sigma. The
//! enumeration is the ground truth for the counts: `count_by_sigma` compares
//! it against the formula and reports matches, mismatches, and the
//! conjectural cases gcd(n, r) != 1.

use num_integer::Integer;
use num_rational::Ratio;

use crate::cxla::{
    self, angle_turns, classify_group, eig_sl2, eig_unitary_clustered, Cx, Mat, UnitC,
    TOL_CLUSTER, TOL_UNIT,
};
use crate::error::{Error, Result};
use crate::reps::{PartitionType, Representation};
use crate::symprod::{log_cut_start_sorted, CircleMultiset};

/// Multiplicity pattern of an eigenvalue configuration; same shape as the
/// semisimple-type partition.
pub type SigmaType = PartitionType;

/// Multiset of unit-circle eigenvalues with its computed flags.
#[derive(Debug, Clone)]
pub struct EigenvalueConfig {
    pub values: Vec<UnitC>,
    /// Product of the values is 1 (within 1e-9).
    pub det_one: bool,
    /// All values share the same n-th power (within 1e-9).
    pub common_power: bool,
    pub n: u32,
}

const FLAG_TOL: f64 = 1e-9;

impl EigenvalueConfig {
    /// Builds a configuration from raw values, computing the flags.
    pub fn from_values(values: Vec<Cx>, n: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::OutOfRange("empty eigenvalue configuration".into()));
        }
        let units: Vec<UnitC> = values
            .iter()
            .map(|&z| UnitC::new(z, 10.0 * TOL_UNIT))
            .collect::<Result<_>>()?;
        let product: Cx = values.iter().product();
        let det_one = (product - Cx::new(1.0, 0.0)).norm() <= FLAG_TOL;
        let first_pow = values[0].powu(n);
        let common_power = values.iter().all(|z| (z.powu(n) - first_pow).norm() <= FLAG_TOL);
        Ok(EigenvalueConfig {
            values: units,
            det_one,
            common_power,
            n,
        })
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn angles_turns(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.angle_turns()).collect()
    }
}

/// The eigenvalue map: eigenvalues of `A` with flags computed, not assumed.
///
/// Requires `A` unitary, or SL(2,C) with unit-modulus spectrum; errors when
/// `A` is not diagonalizable over the unit circle.
pub fn eigenvalue_map(rep: &Representation) -> Result<EigenvalueConfig> {
    let a = &rep.a;
    let class = classify_group(a, 100.0 * TOL_UNIT);
    let values: Vec<Cx> = if class.unitary {
        eig_unitary_clustered(a, 100.0 * TOL_UNIT, TOL_CLUSTER)?
            .into_iter()
            .map(|p| p.value.cx())
            .collect()
    } else if class.sl2c {
        let (lambda, inv) = eig_sl2(a)?;
        if (lambda.norm() - 1.0).abs() > 10.0 * TOL_UNIT {
            return Err(Error::NotDiagonalizable);
        }
        // Unit-modulus double eigenvalue: diagonalizable only if A is scalar.
        if (lambda - inv).norm() <= TOL_CLUSTER {
            let scalar = Mat::identity(2)?.scale(lambda);
            if a.sub(&scalar)?.frobenius_norm() > 100.0 * TOL_UNIT {
                return Err(Error::NotDiagonalizable);
            }
        }
        vec![lambda, inv]
    } else {
        return Err(Error::NotDiagonalizable);
    };
    EigenvalueConfig::from_values(values, rep.n)
}

/// Sigma-type of a configuration plus an ambiguity warning.
#[derive(Debug, Clone)]
pub struct SigmaAnalysis {
    pub sigma: SigmaType,
    /// Set when two distinct clusters are closer than `2 * tau_cluster`:
    /// the clustering depends delicately on the threshold.
    pub ambiguous: bool,
}

/// Clusters the configuration values within `tau_cluster` (transitive
/// closure) and returns the multiplicity partition.
pub fn sigma_of(config: &EigenvalueConfig, tau_cluster: f64) -> Result<SigmaAnalysis> {
    let values: Vec<Cx> = config.values.iter().map(|v| v.cx()).collect();
    let clusters = cxla::cluster_indices(&values, tau_cluster);
    let mults: Vec<usize> = clusters.iter().map(|c| c.len()).collect();
    let sigma = PartitionType::from_parts(&mults)?;
    let mut ambiguous = false;
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            let mut min_dist = f64::INFINITY;
            for &a in &clusters[i] {
                for &b in &clusters[j] {
                    min_dist = min_dist.min((values[a] - values[b]).norm());
                }
            }
            if min_dist < 2.0 * tau_cluster {
                ambiguous = true;
            }
        }
    }
    Ok(SigmaAnalysis { sigma, ambiguous })
}

/// An admissible SU(r) eigenvalue configuration in exact form: a sorted
/// multiset of exponents modulo `n*r`, where exponent `j` stands for
/// `e^{2 pi i j/(n r)}`. All exponents share their residue mod r (the common
/// n-th power) and sum to 0 mod `n*r` (determinant one).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactConfig {
    pub n: u32,
    pub r: u32,
    /// Ascending exponents modulo `n*r`, one per eigenvalue.
    pub exponents: Vec<u32>,
}

impl ExactConfig {
    pub fn modulus(&self) -> u32 {
        self.n * self.r
    }

    /// Exponent of the common power `xi = lambda^n` inside `mu_r`.
    pub fn xi_exponent(&self) -> u32 {
        self.exponents[0] % self.r
    }

    /// Floating-point values of the configuration.
    pub fn values(&self) -> Vec<Cx> {
        let m = self.modulus() as f64;
        self.exponents
            .iter()
            .map(|&j| UnitC::from_angle_turns(j as f64 / m).cx())
            .collect()
    }

    /// Exact sigma-type: multiplicities of equal exponents.
    pub fn sigma(&self) -> SigmaType {
        let mut mults: Vec<usize> = Vec::new();
        for (i, &j) in self.exponents.iter().enumerate() {
            if i > 0 && j == self.exponents[i - 1] {
                *mults.last_mut().expect("non-empty") += 1;
            } else {
                mults.push(1);
            }
        }
        PartitionType::from_parts(&mults).expect("valid multiplicities")
    }

    pub fn to_config(&self) -> Result<EigenvalueConfig> {
        EigenvalueConfig::from_values(self.values(), self.n)
    }
}

fn check_enumeration_range(r: u32, n: u32) -> Result<()> {
    if !(2..=3).contains(&r) {
        return Err(Error::OutOfRange(format!("rank {r} (supported: 2, 3)")));
    }
    if n == 0 || n > 64 {
        return Err(Error::OutOfRange(format!("twist {n} (supported: 1..=64)")));
    }
    Ok(())
}

/// Exact enumeration of all admissible SU(r) eigenvalue configurations:
/// for each r-th root of unity `xi`, the candidates are the n solutions of
/// `lambda^n = xi` inside `mu_{nr}`, and every unordered multiset of size r
/// with product 1 is emitted. Pure integer arithmetic, no duplicates.
pub fn enumerate_su_exact(r: u32, n: u32) -> Result<Vec<ExactConfig>> {
    check_enumeration_range(r, n)?;
    let m = n * r;
    let mut out: Vec<ExactConfig> = Vec::new();
    for k in 0..r {
        // Ascending candidates j = k + r*t, t = 0..n: the solutions of
        // lambda^n = e^{2 pi i k / r} in mu_{nr}.
        let cands: Vec<u32> = (0..n).map(|t| k + r * t).collect();
        match r {
            2 => {
                for i in 0..cands.len() {
                    for j in i..cands.len() {
                        if (cands[i] + cands[j]) % m == 0 {
                            out.push(ExactConfig {
                                n,
                                r,
                                exponents: vec![cands[i], cands[j]],
                            });
                        }
                    }
                }
            }
            3 => {
                for i in 0..cands.len() {
                    for j in i..cands.len() {
                        for l in j..cands.len() {
                            if (cands[i] + cands[j] + cands[l]) % m == 0 {
                                out.push(ExactConfig {
                                    n,
                                    r,
                                    exponents: vec![cands[i], cands[j], cands[l]],
                                });
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    out.sort();
    Ok(out)
}

/// Floating-point view of [`enumerate_su_exact`].
pub fn enumerate_su_configs(r: u32, n: u32) -> Result<Vec<EigenvalueConfig>> {
    enumerate_su_exact(r, n)?
        .iter()
        .map(|e| e.to_config())
        .collect()
}

/// The counting formula `N_sigma = (r/n) * multinomial(n; a_1, ..., a_s)`,
/// evaluated exactly as a rational number. The lower indices are the
/// multiplicities `a_i` of sigma; this is the reading that the exact
/// enumeration confirms (see `count_by_sigma`). Configurations with more
/// distinct eigenvalues than n get a zero count.
pub fn n_sigma_formula(r: u32, n: u32, sigma: &SigmaType) -> Result<Ratio<i128>> {
    if n == 0 {
        return Err(Error::OutOfRange("twist must be positive".into()));
    }
    let mut numerator: i128 = 1;
    let mut remaining: i128 = n as i128;
    for a in sigma.multiplicities() {
        numerator = numerator
            .checked_mul(binomial(remaining, a as i128)?)
            .ok_or(Error::Overflow)?;
        remaining -= a as i128;
    }
    Ok(Ratio::new(
        numerator.checked_mul(r as i128).ok_or(Error::Overflow)?,
        n as i128,
    ))
}

fn binomial(n: i128, k: i128) -> Result<i128> {
    if k < 0 || n < 0 || k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i).ok_or(Error::Overflow)?;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Agreement status of an enumerated count against the formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountStatus {
    Match,
    Mismatch,
    /// gcd(n, r) != 1: the formula is only conjectural there, so the
    /// enumerated count is recorded as ground truth without a verdict.
    Conjectural,
}

impl CountStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountStatus::Match => "match",
            CountStatus::Mismatch => "mismatch",
            CountStatus::Conjectural => "conjectural",
        }
    }
}

/// One row of the counting report.
#[derive(Debug, Clone)]
pub struct SigmaCount {
    pub sigma: SigmaType,
    /// Exact count from enumeration (the ground truth).
    pub enumerated: u64,
    /// Exact value of the counting formula.
    pub formula: Ratio<i128>,
    pub status: CountStatus,
}

/// Exact counts per sigma-type from enumeration, compared with the formula.
/// Rows cover every partition of r, in deterministic order.
pub fn count_by_sigma(r: u32, n: u32) -> Result<Vec<SigmaCount>> {
    let configs = enumerate_su_exact(r, n)?;
    let coprime = (n as u64).gcd(&(r as u64)) == 1;
    let mut rows = Vec::new();
    for sigma in PartitionType::all_of(r as usize) {
        let enumerated = configs.iter().filter(|c| c.sigma() == sigma).count() as u64;
        let formula = n_sigma_formula(r, n, &sigma)?;
        let status = if !coprime {
            CountStatus::Conjectural
        } else if formula.is_integer() && formula.to_integer() == enumerated as i128 {
            CountStatus::Match
        } else {
            CountStatus::Mismatch
        };
        rows.push(SigmaCount {
            sigma,
            enumerated,
            formula,
            status,
        });
    }
    Ok(rows)
}

/// Canonical form of a unitary representation modulo the stabilizer of the
/// diagonalized `A`.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Eigenvalues of `A` in logarithm-cut order.
    pub eigenvalues: Vec<Cx>,
    /// `B` conjugated into the `A`-eigenbasis and gauge-reduced.
    pub bred: Mat,
    pub sigma: SigmaType,
    /// True when the residual torus gauge was fully fixed (all first-column
    /// entries below the diagonal nonzero); only possible for distinct
    /// eigenvalues.
    pub unique: bool,
    /// For U(r) inputs with a simple leading eigenvalue: det(B), carried out
    /// of the first column so that `bred` is special.
    pub mu: Option<Cx>,
}

/// Diagonalizes `A` with eigenvalues in logarithm-cut order and reduces `B`
/// modulo the stabilizer.
///
/// For distinct eigenvalues the residual torus gauge is fixed by making the
/// first-column entries `b_{i1}` (i >= 2) real and non-negative; for U(r)
/// the determinant phase is moved into the first column beforehand, leaving
/// a special `bred`. Entries smaller than `tol` are treated as zero, which
/// makes the gauge degenerate (`unique = false`). For repeated eigenvalues
/// the eigenbasis is orthonormalized per eigenspace and `unique = false`.
pub fn canonical_form(rep: &Representation, tol: f64) -> Result<CanonicalForm> {
    let r = rep.rank();
    let pairs = eig_unitary_clustered(&rep.a, 100.0 * TOL_UNIT, TOL_CLUSTER)?;
    // eig output is sorted by angle; rotate to logarithm-cut order.
    let sorted_angles: Vec<f64> = pairs.iter().map(|p| p.value.angle_turns()).collect();
    let start = log_cut_start_sorted(&sorted_angles);
    let ordered: Vec<&cxla::EigPair> = (0..r).map(|k| &pairs[(start + k) % r]).collect();
    let eigenvalues: Vec<Cx> = ordered.iter().map(|p| p.value.cx()).collect();
    let v = Mat::from_cols(&ordered.iter().map(|p| p.vector.clone()).collect::<Vec<_>>())?;
    let mut bred = v.adjoint().mul(&rep.b)?.mul(&v)?;

    let clusters = cxla::cluster_indices(&eigenvalues, TOL_CLUSTER);
    let sigma = PartitionType::from_parts(&clusters.iter().map(|c| c.len()).collect::<Vec<_>>())?;
    let distinct = sigma.len() == r;

    let mut unique = false;
    let mut mu = None;
    if distinct {
        if matches!(rep.group, crate::reps::Group::U(_)) {
            // Carry the determinant phase out of the first column: the
            // leading eigenvalue is simple, so this is the U(r) -> SU(r) x S^1
            // splitting.
            let det = bred.det();
            let dinv = det.inv();
            for i in 0..r {
                bred.set(i, 0, bred.get(i, 0) * dinv);
            }
            mu = Some(det);
        }
        // Residual torus gauge diag(1, u_2, ..., u_r) acting by conjugation:
        // b_{i1} -> u_i b_{i1}.
        let mut gauge = vec![Cx::new(1.0, 0.0); r];
        unique = true;
        for (i, g) in gauge.iter_mut().enumerate().skip(1) {
            let b = bred.get(i, 0);
            if b.norm() > tol {
                *g = b.conj() / b.norm();
            } else {
                unique = false;
            }
        }
        let u = Mat::diag(&gauge)?;
        let uinv = Mat::diag(&gauge.iter().map(|g| g.conj()).collect::<Vec<_>>())?;
        bred = u.mul(&bred)?.mul(&uinv)?;
    }
    Ok(CanonicalForm {
        eigenvalues,
        bred,
        sigma,
        unique,
        mu,
    })
}

/// A point of the coarse orthant: the first column of the reduced `B`.
#[derive(Debug, Clone)]
pub struct OrthantPoint {
    pub z: Cx,
    /// Non-negative real coordinates `x_2, ..., x_r`.
    pub xs: Vec<f64>,
}

impl OrthantPoint {
    /// `|z|^2 + sum x_i^2`, equal to 1 for points coming from a unitary B.
    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.xs.iter().map(|x| x * x).sum::<f64>()
    }

    /// Interior point: every real coordinate strictly positive.
    pub fn interior(&self) -> bool {
        self.xs.iter().all(|&x| x > 0.0)
    }
}

/// Coarse-orthant coordinates of a canonical form with distinct eigenvalues:
/// `z = b_{11}` and `x_i = b_{i1} >= 0`.
pub fn orthant_coords(cf: &CanonicalForm) -> Result<OrthantPoint> {
    let r = cf.bred.dim();
    if cf.sigma.len() != r {
        return Err(Error::Precondition(format!(
            "orthant coordinates need distinct eigenvalues, got sigma {}",
            cf.sigma
        )));
    }
    let z = cf.bred.get(0, 0);
    let mut xs = Vec::with_capacity(r - 1);
    for i in 1..r {
        let b = cf.bred.get(i, 0);
        if b.im.abs() > 1e-9 || b.re < -1e-9 {
            return Err(Error::Precondition(format!(
                "first column not gauge-fixed at row {i}: {b}"
            )));
        }
        xs.push(b.re.max(0.0));
    }
    Ok(OrthantPoint { z, xs })
}

/// Factorization of a common-power configuration: distinct values written as
/// `lambda_i = base * epsilon_i` with `epsilon_i` exact n-th roots of unity,
/// stored as integer exponents.
#[derive(Debug, Clone)]
pub struct UConfigNormal {
    /// The logarithm-cut-first distinct eigenvalue.
    pub base: UnitC,
    /// Exponents `k_i` of the remaining distinct values: `epsilon_i =
    /// e^{2 pi i k_i / n}`, all distinct and nonzero.
    pub root_exponents: Vec<u32>,
    pub n: u32,
}

impl UConfigNormal {
    /// The distinct values `base * epsilon_i` in order (base first).
    pub fn reconstruct(&self) -> Vec<Cx> {
        let mut out = vec![self.base.cx()];
        for &k in &self.root_exponents {
            out.push(self.base.cx() * UnitC::from_angle_turns(k as f64 / self.n as f64).cx());
        }
        out
    }
}

/// Factors a common-power configuration through its exact root-of-unity
/// differences. Errors when the `common_power` flag is unset or when some
/// ratio is farther than 1e-9 from every n-th root of unity.
pub fn u_config_normalize(config: &EigenvalueConfig) -> Result<UConfigNormal> {
    if !config.common_power {
        return Err(Error::Precondition(
            "u_config_normalize requires the common-power flag".into(),
        ));
    }
    let n = config.n;
    let values: Vec<Cx> = config.values.iter().map(|v| v.cx()).collect();
    let clusters = cxla::cluster_indices(&values, TOL_CLUSTER);
    // One representative per distinct value, ordered by the logarithm cut.
    let reps: Vec<Cx> = clusters.iter().map(|c| values[c[0]]).collect();
    let rep_angles: Vec<f64> = reps.iter().map(|z| angle_turns(*z)).collect();
    let cm = CircleMultiset::new(&rep_angles)?;
    let (_, ordered_angles) = crate::symprod::log_cut_order(&cm);
    let mut ordered: Vec<Cx> = Vec::with_capacity(reps.len());
    let mut used = vec![false; reps.len()];
    for angle in &ordered_angles {
        let (idx, _) = rep_angles
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, a)| (i, (a - angle).abs()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).expect("finite"))
            .expect("representative present");
        used[idx] = true;
        ordered.push(reps[idx]);
    }
    let base = ordered[0];
    let mut root_exponents = Vec::with_capacity(ordered.len() - 1);
    for value in ordered.iter().skip(1) {
        let eps = value / base;
        let k = (eps.arg() / (2.0 * std::f64::consts::PI) * n as f64).round() as i64;
        let k = k.rem_euclid(n as i64) as u32;
        let exact = UnitC::from_angle_turns(k as f64 / n as f64).cx();
        if (eps - exact).norm() > 1e-9 {
            return Err(Error::Precondition(format!(
                "ratio {eps} is not an n-th root of unity for n = {n}"
            )));
        }
        if k == 0 || root_exponents.contains(&k) {
            return Err(Error::Precondition(
                "distinct values must differ by distinct nontrivial roots".into(),
            ));
        }
        root_exponents.push(k);
    }
    Ok(UConfigNormal {
        base: UnitC::new(base, 10.0 * TOL_UNIT)?,
        root_exponents,
        n,
    })
}
