//! Constructors for random representations in the supported strata.
//!
//! Irreducible samples take `A` diagonal with an admissible eigenvalue
//! configuration (conjugated by a Haar unitary so that nothing is aligned
//! with the coordinate axes) and a Haar-random `B`, rejection-filtered by
//! the irreducibility test. The relation `[A^n, B] = Id` holds by
//! construction because `A^n` is scalar for admissible configurations.
//! Everything is deterministic per seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cxla::{haar_unitary, Cx, Mat, UnitC};
use crate::error::{Error, Result};
use crate::reps::{is_irreducible, Group, Representation, Tolerances};
use crate::retract::ReducibleCoords;
use crate::strata::enumerate_su_exact;

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.0..1.0)
}

fn unit(t: f64) -> Cx {
    UnitC::from_angle_turns(t).cx()
}

/// Irreducible SU(r) representations (r = 2 or 3). Errors when the stratum
/// is empty, i.e. when no configuration with distinct eigenvalues exists
/// (n < r, and n = r only in degenerate cases).
pub fn su_irreducible(
    r: u32,
    n: u32,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<Representation>> {
    let configs: Vec<_> = enumerate_su_exact(r, n)?
        .into_iter()
        .filter(|c| c.sigma().len() == r as usize)
        .collect();
    if configs.is_empty() {
        return Err(Error::EmptyStratum(format!(
            "no irreducible SU({r}) stratum for n = {n} (distinct-eigenvalue count is 0)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let config = &configs[rng.gen_range(0..configs.len())];
        let diag = Mat::diag(&config.values())?;
        let v = haar_unitary(&mut rng, r as usize, true)?;
        let a = v.mul(&diag)?.mul(&v.adjoint())?;
        let b = haar_unitary(&mut rng, r as usize, true)?;
        let rep = Representation::new(n, Group::SU(r as usize), a, b)?;
        if is_irreducible(&rep, tol.rank)? {
            out.push(rep);
        }
    }
    Ok(out)
}

/// Totally reducible SU(r) representations: simultaneously diagonal pairs
/// with determinant one.
pub fn su_totally_reducible(r: u32, n: u32, count: usize, seed: u64) -> Result<Vec<Representation>> {
    if !(2..=3).contains(&r) {
        return Err(Error::OutOfRange(format!("rank {r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut a_angles: Vec<f64> = (1..r).map(|_| random_angle(&mut rng)).collect();
        let mut b_angles: Vec<f64> = (1..r).map(|_| random_angle(&mut rng)).collect();
        a_angles.push(-a_angles.iter().sum::<f64>());
        b_angles.push(-b_angles.iter().sum::<f64>());
        let a = Mat::diag(&a_angles.iter().map(|&t| unit(t)).collect::<Vec<_>>())?;
        let b = Mat::diag(&b_angles.iter().map(|&t| unit(t)).collect::<Vec<_>>())?;
        out.push(Representation::new(n, Group::SU(r as usize), a, b)?);
    }
    Ok(out)
}

/// Irreducible U(2) representations: `A` has spectrum `{lambda, lambda eps}`
/// with `lambda` free on the circle and `eps` a nontrivial n-th root of
/// unity, so `A^n` is scalar.
pub fn u2_irreducible(n: u32, count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<Representation>> {
    if n < 2 {
        return Err(Error::EmptyStratum(format!(
            "no irreducible U(2) stratum for n = {n} (needs a nontrivial n-th root)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let lambda = random_angle(&mut rng);
        let k = rng.gen_range(1..n);
        let diag = Mat::diag(&[unit(lambda), unit(lambda + k as f64 / n as f64)])?;
        let v = haar_unitary(&mut rng, 2, false)?;
        let a = v.mul(&diag)?.mul(&v.adjoint())?;
        let b = haar_unitary(&mut rng, 2, false)?;
        let rep = Representation::new(n, Group::U(2), a, b)?;
        if is_irreducible(&rep, tol.rank)? {
            out.push(rep);
        }
    }
    Ok(out)
}

/// Totally reducible U(2) representations: diagonal pairs, no determinant
/// constraint.
pub fn u2_totally_reducible(n: u32, count: usize, seed: u64) -> Result<Vec<Representation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a = Mat::diag(&[unit(random_angle(&mut rng)), unit(random_angle(&mut rng))])?;
        let b = Mat::diag(&[unit(random_angle(&mut rng)), unit(random_angle(&mut rng))])?;
        out.push(Representation::new(n, Group::U(2), a, b)?);
    }
    Ok(out)
}

/// A random SL(2,C) matrix with moderate entries, det-normalized. Entries
/// are complex Gaussians; resamples until the determinant is comfortably
/// away from zero.
fn random_sl2(rng: &mut ChaCha8Rng) -> Result<Mat> {
    use rand_distr::StandardNormal;
    loop {
        let entries: Vec<Cx> = (0..4)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Cx::new(re, im)
            })
            .collect();
        let g = Mat::new(2, entries)?;
        let det = g.det();
        if det.norm() > 0.1 {
            let s = det.sqrt().inv();
            return Ok(g.scale(s));
        }
    }
}

/// Irreducible SL(2,C) representations for twist `n`: `A` conjugate to
/// `diag(lambda, 1/lambda)` with `lambda` a 2n-th root of unity,
/// `lambda^2 != 1`, and `B` with both off-diagonal entries nonzero in that
/// frame. Empty for n < 2. When `conjugate` is set, the pair is moved out
/// of the diagonal frame by a random SL(2,C) conjugation.
pub fn sl2c_irreducible(
    n: u32,
    count: usize,
    seed: u64,
    conjugate: bool,
) -> Result<Vec<Representation>> {
    if n < 2 {
        return Err(Error::EmptyStratum(format!(
            "no irreducible SL(2,C) components for n = {n} (count n-1 = {})",
            n.saturating_sub(1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Conjugators come from their own stream: the base (A, B) sequence is
    // the same with and without `conjugate`.
    let mut conj_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f6e6a);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..n);
        let lambda = unit(k as f64 / (2 * n) as f64);
        let a = Mat::diag(&[lambda, lambda.inv()])?;
        let b = random_sl2(&mut rng)?;
        if b.get(0, 1).norm() < 0.05 || b.get(1, 0).norm() < 0.05 {
            continue;
        }
        let (a, b) = if conjugate {
            conjugate_pair(&mut conj_rng, a, b)?
        } else {
            (a, b)
        };
        out.push(Representation::new(n, Group::Sl2c, a, b)?);
    }
    Ok(out)
}

fn conjugate_pair(rng: &mut ChaCha8Rng, a: Mat, b: Mat) -> Result<(Mat, Mat)> {
    let g = random_sl2(rng)?;
    let ginv = Mat::new(
        2,
        vec![g.get(1, 1), -g.get(0, 1), -g.get(1, 0), g.get(0, 0)],
    )?;
    Ok((g.mul(&a)?.mul(&ginv)?, g.mul(&b)?.mul(&ginv)?))
}

/// Reducible SL(2,C) representations: diagonal pairs over `(C*)^2` with
/// moduli log-uniform in [1/3, 3], optionally conjugated.
pub fn sl2c_reducible(n: u32, count: usize, seed: u64, conjugate: bool) -> Result<Vec<Representation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conj_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f6e6a);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let modulus = |rng: &mut ChaCha8Rng| -> f64 { 3.0f64.powf(rng.gen_range(-1.0..1.0)) };
        let lambda = Cx::from_polar(modulus(&mut rng), 2.0 * std::f64::consts::PI * random_angle(&mut rng));
        let mu = Cx::from_polar(modulus(&mut rng), 2.0 * std::f64::consts::PI * random_angle(&mut rng));
        let a = Mat::diag(&[lambda, lambda.inv()])?;
        let b = Mat::diag(&[mu, mu.inv()])?;
        let (a, b) = if conjugate {
            conjugate_pair(&mut conj_rng, a, b)?
        } else {
            (a, b)
        };
        out.push(Representation::new(n, Group::Sl2c, a, b)?);
    }
    Ok(out)
}

/// The reducible coordinates used to build the sample at a given index, for
/// tests that need the ground truth behind `sl2c_reducible`.
pub fn reducible_coords_of(rep: &Representation) -> Result<ReducibleCoords> {
    match crate::retract::to_coords(rep, 1e-8)? {
        crate::retract::ClassCoords::Reducible(c) => Ok(c),
        _ => Err(Error::Precondition("representation is not reducible".into())),
    }
}
