//! The strong deformation retraction from the SL(2,C)-character variety
//! onto the SU(2)-character variety.
//!
//! Irreducible classes are tracked in the invariant coordinates
//! `(a, d, p)` with `a*d - p = 1`, where `A = diag(lambda, 1/lambda)` and
//! `B = (a c; b d)` with `p = b*c`. The component label `lambda` is a
//! 2n-th root of unity with `lambda^2 != 1`; there are n-1 such components.
//! The flow has three closed-form stages:
//!
//! 1. `stage_rescale` equalizes `|a|` and `|d|` along the hyperbolas
//!    `|a||d| = const` (the h-function pair below).
//! 2. `stage_phase` rotates `d` onto `conj(a)`.
//! 3. `stage_radial` pulls `|a|` into the unit disc.
//!
//! Reducible classes live in `(lambda, mu)` coordinates on `(C*)^2` modulo
//! the involution `(lambda, mu) ~ (1/lambda, 1/mu)` and retract radially
//! onto the unit torus. The radial stage is multiplicative on moduli, which
//! commutes with the involution exactly.

use serde::Serialize;

use crate::cxla::{classify_group, eig_sl2, Cx, Mat, UnitC, TOL_UNIT};
use crate::error::{Error, Result};
use crate::reps::{check_relation, common_eigenvector, Group, Representation};

/// Tolerance for recognizing the component label among the 2n-th roots of
/// unity. Irreducibility plus the relation force the label onto the circle
/// exactly, so this only absorbs arithmetic noise.
const LABEL_SNAP_TOL: f64 = 1e-6;

/// Invariant coordinates of an irreducible class: `a*d - p = 1`, component
/// labeled by the eigenvalue `lambda` of `A`.
#[derive(Debug, Clone, Copy)]
pub struct IrredCoords {
    pub a: Cx,
    pub d: Cx,
    pub p: Cx,
    /// Component label: a 2n-th root of unity with `lambda^2 != 1`.
    pub lambda: Cx,
}

impl IrredCoords {
    pub fn new(a: Cx, d: Cx, p: Cx, lambda: Cx) -> Result<Self> {
        let defect = (a * d - p - Cx::new(1.0, 0.0)).norm();
        if defect > 1e-9 {
            return Err(Error::Precondition(format!(
                "a*d - p = 1 violated by {defect:.3e}"
            )));
        }
        Ok(IrredCoords { a, d, p, lambda })
    }

    /// Residual of the defining constraint `a*d - p = 1`.
    pub fn constraint_residual(&self) -> f64 {
        (self.a * self.d - self.p - Cx::new(1.0, 0.0)).norm()
    }
}

/// A reducible (semisimplified) class: `(lambda, mu)` in `(C*)^2` modulo
/// `(lambda, mu) ~ (1/lambda, 1/mu)`, stored as the canonical orbit
/// representative.
#[derive(Debug, Clone, Copy)]
pub struct ReducibleCoords {
    pub lambda: Cx,
    pub mu: Cx,
}

impl ReducibleCoords {
    /// Canonicalizes: `|lambda| >= 1`, ties by non-negative imaginary part
    /// of `lambda`, then of `mu`.
    pub fn new(lambda: Cx, mu: Cx) -> Result<Self> {
        if lambda.norm() == 0.0 || mu.norm() == 0.0 {
            return Err(Error::Precondition("reducible coordinates need nonzero values".into()));
        }
        let (l, m) = (lambda, mu);
        let (li, mi) = (lambda.inv(), mu.inv());
        let keep = if (l.norm() - 1.0).abs() <= TOL_UNIT {
            if l.im.abs() <= 1e-12 {
                m.im >= -1e-12
            } else {
                l.im > 0.0
            }
        } else {
            l.norm() > 1.0
        };
        let (lambda, mu) = if keep { (l, m) } else { (li, mi) };
        Ok(ReducibleCoords { lambda, mu })
    }
}

/// Coordinates of a class: either irreducible or reducible.
#[derive(Debug, Clone)]
pub enum ClassCoords {
    Irreducible(IrredCoords),
    Reducible(ReducibleCoords),
}

/// Stage of the retraction flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Rescale,
    Phase,
    Radial,
}

/// One observed point of a retraction trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceSample {
    pub stage: Stage,
    /// Stage-local time in [0, 1].
    pub t: f64,
    pub lambda: Cx,
    pub a: Cx,
    pub d: Cx,
    pub p: Cx,
    /// `|a*d - p - 1|`.
    pub residual_constraint: f64,
    /// `||A^n B - B A^n||_F` of the reconstructed representation.
    pub residual_relation: f64,
}

/// Sampled history of a retraction flow.
#[derive(Debug, Clone)]
pub struct RetractionTrace {
    pub samples: Vec<TraceSample>,
    /// Smallest `|d|` seen along the flow. The phase stage can pass close
    /// to zero on the diagonal; this records how close without asserting a
    /// bound.
    pub min_abs_d: f64,
}

/// Converts an SL(2,C) representation into class coordinates.
///
/// Irreducible classes are conjugated so that `A = diag(lambda, 1/lambda)`
/// with the `|lambda| >= 1` branch (ties toward non-negative imaginary
/// part), and `(a, d, p = bc)` is read from the conjugated `B`. The label is
/// snapped to the nearest 2n-th root of unity, which irreducibility forces
/// exactly. Reducible classes are sent to their semisimplification
/// `(lambda, mu)` read off a joint eigenvector.
pub fn to_coords(rep: &Representation, tol: f64) -> Result<ClassCoords> {
    if rep.group != Group::Sl2c {
        return Err(Error::UnsupportedGroup(format!(
            "to_coords expects SL(2,C), got {}",
            rep.group
        )));
    }
    let relation = check_relation(rep, tol);
    if !relation.ok {
        return Err(Error::RelationViolated(relation.residual));
    }
    match common_eigenvector(&rep.a, &rep.b, crate::cxla::TOL_RANK)? {
        Some(ce) => {
            // Reducible: the semisimplification is (lambda, mu) + (1/lambda, 1/mu).
            ReducibleCoords::new(ce.a_value, ce.b_value).map(ClassCoords::Reducible)
        }
        None => {
            let (lambda_raw, _) = eig_sl2(&rep.a)?;
            // Irreducible forces A^n = +-I, hence lambda in mu_2n, lambda^2 != 1.
            let two_n = 2 * rep.n;
            let k = (lambda_raw.arg() / (2.0 * std::f64::consts::PI) * two_n as f64).round() as i64;
            let k = k.rem_euclid(two_n as i64) as u32;
            let lambda = UnitC::from_angle_turns(k as f64 / two_n as f64).cx();
            if (lambda - lambda_raw).norm() > LABEL_SNAP_TOL {
                return Err(Error::Precondition(format!(
                    "irreducible class with eigenvalue {lambda_raw} not in mu_{two_n}"
                )));
            }
            if k == 0 || 2 * k == two_n {
                // lambda = +-1 would make A = +-I, central: impossible for
                // an irreducible pair.
                return Err(Error::Precondition(
                    "irreducible class cannot have central A".into(),
                ));
            }
            let b_conj = diagonalize_against(&rep.a, &rep.b, lambda)?;
            let (a, c, b, d) = (
                b_conj.get(0, 0),
                b_conj.get(0, 1),
                b_conj.get(1, 0),
                b_conj.get(1, 1),
            );
            let p = b * c;
            IrredCoords::new(a, d, p, lambda).map(ClassCoords::Irreducible)
        }
    }
}

/// Conjugates `b` into the eigenbasis of `a` (2x2, distinct eigenvalues
/// `lambda, 1/lambda`): returns `P^{-1} B P` where `A P = P diag(lambda,
/// 1/lambda)`.
fn diagonalize_against(a: &Mat, b: &Mat, lambda: Cx) -> Result<Mat> {
    let v1 = eigvec_2x2(a, lambda)?;
    let v2 = eigvec_2x2(a, lambda.inv())?;
    let p = Mat::from_cols(&[v1, v2])?;
    let det = p.det();
    if det.norm() < 1e-12 {
        return Err(Error::NotDiagonalizable);
    }
    let pinv = Mat::new(
        2,
        vec![
            p.get(1, 1) / det,
            -p.get(0, 1) / det,
            -p.get(1, 0) / det,
            p.get(0, 0) / det,
        ],
    )?;
    pinv.mul(b)?.mul(&p)
}

fn eigvec_2x2(m: &Mat, lambda: Cx) -> Result<Vec<Cx>> {
    let k = [
        m.get(0, 0) - lambda,
        m.get(0, 1),
        m.get(1, 0),
        m.get(1, 1) - lambda,
    ];
    let row0_norm = k[0].norm_sqr() + k[1].norm_sqr();
    let row1_norm = k[2].norm_sqr() + k[3].norm_sqr();
    let v = if row0_norm >= row1_norm {
        vec![-k[1], k[0]]
    } else {
        vec![-k[3], k[2]]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if n < 1e-14 {
        return Err(Error::NotDiagonalizable);
    }
    Ok(vec![v[0] / n, v[1] / n])
}

/// The rescaling pair of the first stage. Piecewise formulas with
/// `h1 * h2 = r * s` exactly; at `t = 0` they return `(r, s)` and at
/// `t = 1` both equal `sqrt(r s)`.
pub fn h1(rr: f64, ss: f64, t: f64) -> Result<f64> {
    check_h_args(rr, ss, t)?;
    Ok(if rr == ss || t == 0.0 {
        // Fixed locus and the t = 0 identity, kept exact.
        rr
    } else if rr >= ss {
        (1.0 - t) * rr + t * (rr * ss).sqrt()
    } else {
        let denom = (1.0 - t) * ss + t * (rr * ss).sqrt();
        if denom == 0.0 {
            0.0
        } else {
            rr * ss / denom
        }
    })
}

/// See [`h1`].
pub fn h2(rr: f64, ss: f64, t: f64) -> Result<f64> {
    check_h_args(rr, ss, t)?;
    Ok(if rr == ss || t == 0.0 {
        ss
    } else if rr > ss {
        let denom = (1.0 - t) * rr + t * (rr * ss).sqrt();
        if denom == 0.0 {
            0.0
        } else {
            rr * ss / denom
        }
    } else {
        (1.0 - t) * ss + t * (rr * ss).sqrt()
    })
}

fn check_h_args(rr: f64, ss: f64, t: f64) -> Result<()> {
    if rr < 0.0 || ss < 0.0 {
        return Err(Error::Precondition("h-functions need non-negative moduli".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("stage time {t} outside [0, 1]")));
    }
    Ok(())
}

fn rescale_modulus(z: Cx, new_modulus: f64) -> Cx {
    let n = z.norm();
    if n == 0.0 || new_modulus == 0.0 {
        Cx::new(0.0, 0.0)
    } else {
        z * (new_modulus / n)
    }
}

/// First stage: `(a, d) -> (h1 e^{i alpha}, h2 e^{i beta})`, `p` recomputed
/// as `a*d - 1`. Fixes points with `|a| = |d|`; keeps `p = 0` invariant.
pub fn stage_rescale(c: &IrredCoords, t: f64) -> Result<IrredCoords> {
    let (rr, ss) = (c.a.norm(), c.d.norm());
    if t == 0.0 || rr == ss {
        check_h_args(rr, ss, t)?;
        return Ok(*c);
    }
    let na = rescale_modulus(c.a, h1(rr, ss, t)?);
    let nd = rescale_modulus(c.d, h2(rr, ss, t)?);
    let np = na * nd - Cx::new(1.0, 0.0);
    Ok(IrredCoords {
        a: na,
        d: nd,
        p: np,
        lambda: c.lambda,
    })
}

/// Second stage, on the locus `|a| = |d|`:
/// `d -> r ((1-t) e^{i beta} + t e^{-i alpha})`. At `t = 1` the direction of
/// `d` is `conj(a)`. Points of the form `(a, conj(a))` are fixed, and
/// `(0, 0)` is fixed by the explicit case split.
pub fn stage_phase(c: &IrredCoords, t: f64, tol: f64) -> Result<IrredCoords> {
    let (rr, ss) = (c.a.norm(), c.d.norm());
    if (rr - ss).abs() > tol {
        return Err(Error::Precondition(format!(
            "stage_phase needs |a| = |d| (difference {:.3e})",
            (rr - ss).abs()
        )));
    }
    if rr == 0.0 || ss == 0.0 {
        // Within tol of the origin, which the case split keeps fixed.
        return Ok(*c);
    }
    if c.d == c.a.conj() || t == 0.0 {
        return Ok(*c);
    }
    let ea = c.a / rr;
    let ed = c.d / ss;
    let nd = (ea.conj() * t + ed * (1.0 - t)) * rr;
    let np = c.a * nd - Cx::new(1.0, 0.0);
    Ok(IrredCoords {
        a: c.a,
        d: nd,
        p: np,
        lambda: c.lambda,
    })
}

/// Third stage, on the locus `d = conj(a)`: radial retraction of `a` into
/// the closed unit disc, `a -> a * ((1-t) + t/|a|)` when `|a| > 1`.
pub fn stage_radial(c: &IrredCoords, t: f64, tol: f64) -> Result<IrredCoords> {
    if (c.d - c.a.conj()).norm() > tol {
        return Err(Error::Precondition(format!(
            "stage_radial needs d = conj(a) (difference {:.3e})",
            (c.d - c.a.conj()).norm()
        )));
    }
    let r = c.a.norm();
    if r <= 1.0 || t == 0.0 {
        return Ok(*c);
    }
    let rho = (1.0 - t) + t / r;
    let na = c.a * rho;
    let nd = na.conj();
    let np = na * nd - Cx::new(1.0, 0.0);
    Ok(IrredCoords {
        a: na,
        d: nd,
        p: np,
        lambda: c.lambda,
    })
}

/// Radial retraction of a reducible class onto the unit torus,
/// multiplicative on moduli: `lambda -> lambda |lambda|^{-t}`. Commutes with
/// the inversion involution, so the canonical representative is stable.
pub fn reducible_retract(c: &ReducibleCoords, t: f64) -> Result<ReducibleCoords> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("stage time {t} outside [0, 1]")));
    }
    let scale = |z: Cx| -> Cx {
        let n = z.norm();
        if t == 0.0 || (n - 1.0).abs() == 0.0 {
            z
        } else {
            z * n.powf(-t)
        }
    };
    ReducibleCoords::new(scale(c.lambda), scale(c.mu))
}

/// Outcome of a full retraction flow.
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub trace: RetractionTrace,
    /// Endpoint reconstructed as an SU(2) representation.
    pub final_rep: Representation,
    /// Coordinates of the endpoint.
    pub end: ClassCoords,
}

/// Runs the full flow: irreducible classes go through the three stages in
/// order (each sampled at `steps + 1` stage-local times), reducible classes
/// through the radial torus retraction. Stages are evaluated in closed form
/// from the stage-initial point, so the endpoint does not depend on `steps`.
pub fn full_flow(rep: &Representation, steps: u32, tol: f64) -> Result<FlowOutcome> {
    if steps == 0 {
        return Err(Error::OutOfRange("steps must be positive".into()));
    }
    let coords = to_coords(rep, tol)?;
    let mut samples = Vec::new();
    let mut min_abs_d = f64::INFINITY;
    match coords {
        ClassCoords::Irreducible(start) => {
            let mut current = start;
            let stage_tols = 1e-9f64.max(tol);
            for stage in [Stage::Rescale, Stage::Phase, Stage::Radial] {
                let begin = current;
                for k in 0..=steps {
                    let t = k as f64 / steps as f64;
                    let point = match stage {
                        Stage::Rescale => stage_rescale(&begin, t)?,
                        Stage::Phase => stage_phase(&begin, t, stage_tols)?,
                        Stage::Radial => stage_radial(&begin, t, stage_tols)?,
                    };
                    min_abs_d = min_abs_d.min(point.d.norm());
                    samples.push(sample_irreducible(rep.n, stage, t, &point));
                    if k == steps {
                        current = point;
                    }
                }
            }
            let final_rep = reconstruct_irreducible(rep.n, &current)?;
            Ok(FlowOutcome {
                trace: RetractionTrace { samples, min_abs_d },
                final_rep,
                end: ClassCoords::Irreducible(current),
            })
        }
        ClassCoords::Reducible(start) => {
            let mut current = start;
            for k in 0..=steps {
                let t = k as f64 / steps as f64;
                let point = reducible_retract(&start, t)?;
                min_abs_d = min_abs_d.min(point.mu.inv().norm());
                samples.push(sample_reducible(rep.n, t, &point));
                if k == steps {
                    current = point;
                }
            }
            let final_rep = reconstruct_reducible(rep.n, &current)?;
            Ok(FlowOutcome {
                trace: RetractionTrace { samples, min_abs_d },
                final_rep,
                end: ClassCoords::Reducible(current),
            })
        }
    }
}

fn sample_irreducible(n: u32, stage: Stage, t: f64, c: &IrredCoords) -> TraceSample {
    let residual_relation = reconstruct_matrices(n, c)
        .map(|(a, b)| relation_residual(n, &a, &b))
        .unwrap_or(f64::NAN);
    TraceSample {
        stage,
        t,
        lambda: c.lambda,
        a: c.a,
        d: c.d,
        p: c.p,
        residual_constraint: c.constraint_residual(),
        residual_relation,
    }
}

fn sample_reducible(n: u32, t: f64, c: &ReducibleCoords) -> TraceSample {
    // In (a, d, p) coordinates a reducible class has a = mu, d = 1/mu, p = 0.
    let a = Mat::diag(&[c.lambda, c.lambda.inv()]).expect("2x2 diagonal");
    let b = Mat::diag(&[c.mu, c.mu.inv()]).expect("2x2 diagonal");
    TraceSample {
        stage: Stage::Radial,
        t,
        lambda: c.lambda,
        a: c.mu,
        d: c.mu.inv(),
        p: Cx::new(0.0, 0.0),
        residual_constraint: (c.mu * c.mu.inv() - Cx::new(1.0, 0.0)).norm(),
        residual_relation: relation_residual(n, &a, &b),
    }
}

fn relation_residual(n: u32, a: &Mat, b: &Mat) -> f64 {
    let an = a.pow(n);
    let lhs = an.mul(b).expect("2x2");
    let rhs = b.mul(&an).expect("2x2");
    lhs.sub(&rhs).expect("2x2").frobenius_norm()
}

/// Rebuilds `(A, B)` from irreducible coordinates: `A = diag(lambda,
/// 1/lambda)` and `B = (a, -sqrt(-p); sqrt(-p), d)`, a determinant-one
/// section of `p = b*c`.
fn reconstruct_matrices(n: u32, c: &IrredCoords) -> Result<(Mat, Mat)> {
    let _ = n;
    let a = Mat::diag(&[c.lambda, c.lambda.inv()])?;
    // Near the endpoint p is real non-positive up to rounding; keeping the
    // square root real there keeps the reconstructed B numerically unitary.
    let s = if c.p.im.abs() <= 1e-12 && c.p.re <= 1e-12 {
        Cx::new((-c.p.re).max(0.0).sqrt(), 0.0)
    } else {
        (-c.p).sqrt()
    };
    let b = Mat::new(2, vec![c.a, -s, s, c.d])?;
    Ok((a, b))
}

fn reconstruct_irreducible(n: u32, c: &IrredCoords) -> Result<Representation> {
    let (a, b) = reconstruct_matrices(n, c)?;
    // At the endpoint d = conj(a), |a| <= 1 and p = |a|^2 - 1 <= 0, so B is
    // the unitary matrix (a, -w; w, conj(a)) with w = sqrt(1 - |a|^2).
    let class = classify_group(&b, 1e-8);
    let group = if class.unitary && class.special {
        Group::SU(2)
    } else {
        Group::Sl2c
    };
    Representation::new(n, group, a, b)
}

fn reconstruct_reducible(n: u32, c: &ReducibleCoords) -> Result<Representation> {
    let a = Mat::diag(&[c.lambda, c.lambda.inv()])?;
    let b = Mat::diag(&[c.mu, c.mu.inv()])?;
    let class_a = classify_group(&a, 1e-8);
    let class_b = classify_group(&b, 1e-8);
    let group = if class_a.unitary && class_b.unitary {
        Group::SU(2)
    } else {
        Group::Sl2c
    };
    Representation::new(n, group, a, b)
}
