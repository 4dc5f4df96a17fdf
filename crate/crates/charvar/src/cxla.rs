//! Small-dimension complex linear algebra.
//!
//! Everything in this crate works with 1x1, 2x2 and 3x3 complex matrices, so
//! instead of pulling in a general-purpose solver we use closed forms
//! throughout: quadratic/cubic characteristic polynomials for eigenvalues,
//! row cross products for null vectors of normal matrices, and Gram-Schmidt
//! for orthonormalization. All tolerances are explicit parameters; the
//! defaults below are documented constants, not hidden globals.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Complex scalar. Serialized everywhere as a two-element array `[re, im]`.
pub type Cx = Complex64;

/// Default tolerance for unit-modulus checks.
pub const TOL_UNIT: f64 = 1e-9;

/// Default eigenvalue clustering threshold. Separates genuine root-of-unity
/// coincidences (spacing at least 2*pi/(n*r) for the twists n <= 64 handled
/// here) from floating-point noise.
pub const TOL_CLUSTER: f64 = 1e-7;

/// Default tolerance for relation residuals and other arithmetic checks.
pub const TOL_RELATION: f64 = 1e-9;

/// Default tolerance for numerical rank decisions (smallest singular value).
pub const TOL_RANK: f64 = 1e-7;

fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

/// A point of the unit circle: a complex number with `| |z| - 1 | <= tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitC(Cx);

impl UnitC {
    pub fn new(z: Cx, tol: f64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = (z.norm() - 1.0).abs();
        if defect > tol {
            return Err(Error::NotUnitModulus(defect));
        }
        Ok(UnitC(z))
    }

    /// e^{2*pi*i*t} for an angle `t` in turns.
    pub fn from_angle_turns(t: f64) -> Self {
        let theta = 2.0 * std::f64::consts::PI * t;
        UnitC(cx(theta.cos(), theta.sin()))
    }

    pub fn cx(&self) -> Cx {
        self.0
    }

    /// Argument as a fraction of a full circle, in [0, 1).
    pub fn angle_turns(&self) -> f64 {
        angle_turns(self.0)
    }
}

/// Argument of `z` in turns, reduced to [0, 1).
pub fn angle_turns(z: Cx) -> f64 {
    let t = z.arg() / (2.0 * std::f64::consts::PI);
    let t = t - t.floor();
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Square complex matrix of dimension 1, 2 or 3, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    r: usize,
    e: Vec<Cx>,
}

impl Mat {
    pub fn new(r: usize, entries: Vec<Cx>) -> Result<Self> {
        if !(1..=3).contains(&r) {
            return Err(Error::UnsupportedDimension(r));
        }
        if entries.len() != r * r {
            return Err(Error::OutOfRange(format!(
                "{} entries for a {r}x{r} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Mat { r, e: entries })
    }

    pub fn zeros(r: usize) -> Result<Self> {
        Mat::new(r, vec![Cx::new(0.0, 0.0); r * r])
    }

    pub fn identity(r: usize) -> Result<Self> {
        let mut m = Mat::zeros(r)?;
        for i in 0..r {
            m.e[i * r + i] = Cx::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn diag(values: &[Cx]) -> Result<Self> {
        let mut m = Mat::zeros(values.len())?;
        for (i, v) in values.iter().enumerate() {
            m.e[i * values.len() + i] = *v;
        }
        Ok(m)
    }

    pub fn from_cols(cols: &[Vec<Cx>]) -> Result<Self> {
        let r = cols.len();
        if cols.iter().any(|c| c.len() != r) {
            return Err(Error::OutOfRange("ragged column list".into()));
        }
        let mut m = Mat::zeros(r)?;
        for (j, c) in cols.iter().enumerate() {
            for i in 0..r {
                m.e[i * r + j] = c[i];
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> Cx {
        self.e[i * self.r + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cx) {
        self.e[i * self.r + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Cx> {
        (0..self.r).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Cx> {
        self.e[i * self.r..(i + 1) * self.r].to_vec()
    }

    pub fn adjoint(&self) -> Mat {
        let r = self.r;
        let mut e = vec![Cx::new(0.0, 0.0); r * r];
        for i in 0..r {
            for j in 0..r {
                e[j * r + i] = self.get(i, j).conj();
            }
        }
        Mat { r, e }
    }

    pub fn scale(&self, s: Cx) -> Mat {
        Mat {
            r: self.r,
            e: self.e.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch(self.r, other.r));
        }
        Ok(Mat {
            r: self.r,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch(self.r, other.r));
        }
        Ok(Mat {
            r: self.r,
            e: self.e.iter().zip(&other.e).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn trace(&self) -> Cx {
        (0..self.r).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> Cx {
        match self.r {
            1 => self.get(0, 0),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            3 => {
                let m = |i: usize, j: usize| self.get(i, j);
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
            _ => unreachable!(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.e
            .iter()
            .zip(&other.e)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix product. Errors on dimension mismatch.
    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.r != other.r {
            return Err(Error::DimensionMismatch(self.r, other.r));
        }
        let r = self.r;
        let mut e = vec![Cx::new(0.0, 0.0); r * r];
        for i in 0..r {
            for j in 0..r {
                let mut acc = Cx::new(0.0, 0.0);
                for k in 0..r {
                    acc += self.get(i, k) * other.get(k, j);
                }
                e[i * r + j] = acc;
            }
        }
        Ok(Mat { r, e })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Cx]) -> Vec<Cx> {
        assert_eq!(v.len(), self.r);
        (0..self.r)
            .map(|i| (0..self.r).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, n: u32) -> Mat {
        let mut result = Mat::identity(self.r).expect("valid dimension");
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same dimension");
            }
            base = base.mul(&base).expect("same dimension");
            k >>= 1;
        }
        result
    }

    /// Frobenius norm of `M^dagger M - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().mul(self).expect("same dimension");
        let id = Mat::identity(self.r).expect("valid dimension");
        g.sub(&id).expect("same dimension").frobenius_norm()
    }

    /// Principal `k x k` trailing submatrix starting at `(off, off)`.
    pub fn submatrix(&self, off: usize, k: usize) -> Result<Mat> {
        if off + k > self.r {
            return Err(Error::OutOfRange("submatrix out of bounds".into()));
        }
        let mut e = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                e.push(self.get(off + i, off + j));
            }
        }
        Mat::new(k, e)
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.r)
            .map(|i| (0..self.r).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let r = rows.len();
        if rows.iter().any(|row| row.len() != r) {
            return Err(D::Error::custom("matrix rows have inconsistent length"));
        }
        let entries: Vec<Cx> = rows
            .iter()
            .flat_map(|row| row.iter().map(|[re, im]| Cx::new(*re, *im)))
            .collect();
        Mat::new(r, entries).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Tags recognized by [`classify_group`]. `sl2c` requires dimension 2 and
/// unit determinant; it does not require unitarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GroupClass {
    pub unitary: bool,
    pub special: bool,
    pub sl2c: bool,
}

/// Classifies a matrix against the groups handled by the crate.
///
/// `unitary` iff `||M^dagger M - I||_F <= tol`, `special` iff
/// `|det M - 1| <= tol`, `sl2c` iff the dimension is 2 and `special` holds.
pub fn classify_group(m: &Mat, tol: f64) -> GroupClass {
    let unitary = m.unitarity_defect() <= tol;
    let special = (m.det() - cx(1.0, 0.0)).norm() <= tol;
    GroupClass {
        unitary,
        special,
        sl2c: m.dim() == 2 && special,
    }
}

/// One eigenvalue/eigenvector pair of a unitary matrix.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: UnitC,
    pub vector: Vec<Cx>,
}

/// Eigendecomposition of a unitary matrix with the default clustering
/// threshold [`TOL_CLUSTER`]. See [`eig_unitary_clustered`].
pub fn eig_unitary(m: &Mat, tol: f64) -> Result<Vec<EigPair>> {
    eig_unitary_clustered(m, tol, TOL_CLUSTER)
}

/// Eigendecomposition of a unitary matrix.
///
/// Returns `r` pairs sorted by eigenvalue argument (in turns, ascending).
/// Eigenvalues closer than `tau_cluster` are merged: each cluster reports a
/// single repeated value together with an orthonormal basis of the joint
/// eigenspace. The returned eigenvectors are pairwise orthonormal.
pub fn eig_unitary_clustered(m: &Mat, tol: f64, tau_cluster: f64) -> Result<Vec<EigPair>> {
    let defect = m.unitarity_defect();
    if defect > tol {
        return Err(Error::NotUnitary { residual: defect, tol });
    }
    let raw = char_poly_roots(m)?;
    // Unitary matrices have unit-modulus spectrum; project out radial noise.
    let roots: Vec<Cx> = raw
        .into_iter()
        .map(|z| if z.norm() > 0.0 { z / z.norm() } else { z })
        .collect();
    let clusters = cluster_indices(&roots, tau_cluster);
    let mut pairs: Vec<EigPair> = Vec::with_capacity(m.dim());
    for cluster in &clusters {
        let rep = circular_mean(&cluster.iter().map(|&i| roots[i]).collect::<Vec<_>>());
        let basis = eigenspace_basis(m, &roots, cluster)?;
        for v in basis {
            pairs.push(EigPair {
                value: UnitC::new(rep, 10.0 * TOL_UNIT.max(tol))?,
                vector: v,
            });
        }
    }
    pairs.sort_by(|a, b| {
        a.value
            .angle_turns()
            .partial_cmp(&b.value.angle_turns())
            .expect("finite angles")
    });
    // A final Gram-Schmidt pass enforces orthonormality across clusters.
    let mut vectors: Vec<Vec<Cx>> = pairs.iter().map(|p| p.vector.clone()).collect();
    gram_schmidt(&mut vectors);
    for (p, v) in pairs.iter_mut().zip(vectors) {
        p.vector = canonical_phase(v);
    }
    Ok(pairs)
}

/// Unitary matrix whose columns are the eigenvectors of `pairs`, in order.
pub fn eigvec_matrix(pairs: &[EigPair]) -> Result<Mat> {
    Mat::from_cols(&pairs.iter().map(|p| p.vector.clone()).collect::<Vec<_>>())
}

/// Eigenvalues of an SL(2,C) matrix via the characteristic polynomial:
/// `lambda = (tr +- sqrt(tr^2 - 4))/2`. Returns `(lambda, 1/lambda)` with the
/// branch chosen so `|lambda| >= 1`, ties broken by non-negative imaginary
/// part.
pub fn eig_sl2(m: &Mat) -> Result<(Cx, Cx)> {
    if m.dim() != 2 {
        return Err(Error::NotSl2(format!("dimension {} != 2", m.dim())));
    }
    let det = m.det();
    if (det - cx(1.0, 0.0)).norm() > TOL_UNIT {
        return Err(Error::NotSl2(format!(
            "det = {det} is not 1 within {TOL_UNIT:.0e}"
        )));
    }
    let tr = m.trace();
    let disc = tr * tr - cx(4.0, 0.0);
    let mut s = disc.sqrt();
    // Avoid cancellation: pick the sign that maximizes |tr + s|.
    if (tr + s).norm() < (tr - s).norm() {
        s = -s;
    }
    let big = (tr + s) / cx(2.0, 0.0);
    let small = big.inv();
    let lambda = if (big.norm() - 1.0).abs() <= TOL_UNIT {
        // Unit-modulus pair: break the tie by the imaginary part.
        if big.im >= 0.0 {
            big
        } else {
            small
        }
    } else if big.norm() >= 1.0 {
        big
    } else {
        small
    };
    Ok((lambda, lambda.inv()))
}

/// Haar-random unitary (or special unitary) matrix, deterministic per seed.
pub fn random_unitary(r: usize, seed: u64, special: bool) -> Result<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary(&mut rng, r, special)
}

/// Haar-random unitary drawn from an explicit generator.
///
/// Orthonormalizes a matrix of independent complex Gaussians; normalizing
/// each column against a real positive coefficient fixes the diagonal phase,
/// which makes the distribution Haar. If `special`, the final column is
/// rescaled by `det^{-1}`.
pub fn haar_unitary<R: Rng>(rng: &mut R, r: usize, special: bool) -> Result<Mat> {
    if !(1..=3).contains(&r) {
        return Err(Error::UnsupportedDimension(r));
    }
    let mut cols: Vec<Vec<Cx>> = (0..r)
        .map(|_| {
            (0..r)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    cx(re, im) / cx(std::f64::consts::SQRT_2, 0.0)
                })
                .collect()
        })
        .collect();
    gram_schmidt(&mut cols);
    let mut u = Mat::from_cols(&cols)?;
    if special {
        let dinv = u.det().inv();
        for i in 0..r {
            let v = u.get(i, r - 1) * dinv;
            u.set(i, r - 1, v);
        }
    }
    Ok(u)
}

/// Roots of the characteristic polynomial of `m` (degree = dimension).
fn char_poly_roots(m: &Mat) -> Result<Vec<Cx>> {
    match m.dim() {
        1 => Ok(vec![m.get(0, 0)]),
        2 => {
            let (a, b) = roots_quadratic(m.trace(), m.det());
            Ok(vec![a, b])
        }
        3 => {
            let c2 = m.trace();
            let g = |i: usize, j: usize| m.get(i, j);
            let c1 = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) + g(0, 0) * g(2, 2)
                - g(0, 2) * g(2, 0)
                + g(1, 1) * g(2, 2)
                - g(1, 2) * g(2, 1);
            let c0 = m.det();
            Ok(roots_cubic(c2, c1, c0).to_vec())
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Roots of `x^2 - tr*x + det`.
fn roots_quadratic(tr: Cx, det: Cx) -> (Cx, Cx) {
    let disc = tr * tr - cx(4.0, 0.0) * det;
    let mut s = disc.sqrt();
    if (tr + s).norm() < (tr - s).norm() {
        s = -s;
    }
    let big = (tr + s) / cx(2.0, 0.0);
    if big.norm() == 0.0 {
        (big, big)
    } else {
        (big, det / big)
    }
}

/// Roots of the monic cubic `x^3 - c2 x^2 + c1 x - c0` (Cardano plus Newton
/// polishing).
fn roots_cubic(c2: Cx, c1: Cx, c0: Cx) -> [Cx; 3] {
    let third = cx(1.0 / 3.0, 0.0);
    let shift = c2 * third;
    // Depressed cubic t^3 + p t + q with x = t + c2/3.
    let p = c1 - c2 * c2 * third;
    let q = -cx(2.0 / 27.0, 0.0) * c2 * c2 * c2 + c1 * c2 * third - c0;
    let half_q = q * cx(0.5, 0.0);
    let d = (half_q * half_q + p * p * p / cx(27.0, 0.0)).sqrt();
    let u3a = -half_q + d;
    let u3b = -half_q - d;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let mut roots = if u3.norm() == 0.0 {
        // p = q = 0: triple root at the shift.
        [shift, shift, shift]
    } else {
        let u = u3.powf(1.0 / 3.0);
        let omega = cx(-0.5, 0.75f64.sqrt());
        let mut out = [cx(0.0, 0.0); 3];
        let mut w = cx(1.0, 0.0);
        for slot in &mut out {
            let uk = u * w;
            let vk = -p / (cx(3.0, 0.0) * uk);
            *slot = uk + vk + shift;
            w *= omega;
        }
        out
    };
    // Two Newton steps on the original cubic recover accuracy lost in the
    // Cardano branch arithmetic.
    for z in &mut roots {
        for _ in 0..2 {
            let f = ((*z - c2) * *z + c1) * *z - c0;
            let df = (cx(3.0, 0.0) * *z - cx(2.0, 0.0) * c2) * *z + c1;
            if df.norm() > 0.0 {
                *z -= f / df;
            }
        }
    }
    roots
}

/// Groups indices of `values` whose pairwise distance is within `tau`,
/// closed transitively. Clusters are returned sorted by their smallest
/// member angle.
pub(crate) fn cluster_indices(values: &[Cx], tau: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tau {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        match root_of[root] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[root] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups.sort_by(|a, b| {
        let ta = a.iter().map(|&i| angle_turns(values[i])).fold(f64::INFINITY, f64::min);
        let tb = b.iter().map(|&i| angle_turns(values[i])).fold(f64::INFINITY, f64::min);
        ta.partial_cmp(&tb).expect("finite angles")
    });
    groups
}

/// Mean of unit-modulus values, projected back onto the circle.
fn circular_mean(values: &[Cx]) -> Cx {
    let sum: Cx = values.iter().sum();
    if sum.norm() > 0.0 {
        sum / sum.norm()
    } else {
        values[0]
    }
}

/// Orthonormal basis of the joint eigenspace of a normal matrix for the
/// cluster of roots with the given indices.
fn eigenspace_basis(m: &Mat, roots: &[Cx], cluster: &[usize]) -> Result<Vec<Vec<Cx>>> {
    let r = m.dim();
    let k = cluster.len();
    if k == r {
        // Scalar matrix: any orthonormal basis works.
        return Ok((0..r)
            .map(|i| {
                let mut v = vec![cx(0.0, 0.0); r];
                v[i] = cx(1.0, 0.0);
                v
            })
            .collect());
    }
    if k == 1 {
        let v = simple_eigvec(m, roots[cluster[0]])?;
        return Ok(vec![v]);
    }
    // k = 2, r = 3: the eigenspace is the orthogonal complement of the
    // remaining simple eigenvector.
    let other: Vec<usize> = (0..r).filter(|i| !cluster.contains(i)).collect();
    debug_assert_eq!(other.len(), 1);
    let w = simple_eigvec(m, roots[other[0]])?;
    Ok(orthogonal_complement(&w))
}

/// Eigenvector for a simple eigenvalue of a normal matrix. For normal `m`
/// the rows of `m - lambda I` belonging to the other eigenvalues span the
/// orthogonal complement of the eigenline exactly, so a row cross product
/// recovers the direction even when `lambda` carries rounding error.
fn simple_eigvec(m: &Mat, lambda: Cx) -> Result<Vec<Cx>> {
    let r = m.dim();
    let mut k = m.clone();
    for i in 0..r {
        k.set(i, i, k.get(i, i) - lambda);
    }
    match r {
        2 => {
            let rows = [k.row(0), k.row(1)];
            let (best, _) = rows
                .iter()
                .enumerate()
                .map(|(i, row)| (i, row.iter().map(|z| z.norm_sqr()).sum::<f64>()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
                .expect("two rows");
            let row = &rows[best];
            let v = vec![-row[1], row[0]];
            normalize_checked(v)
        }
        3 => {
            let rows = [k.row(0), k.row(1), k.row(2)];
            let mut best: Option<(f64, Vec<Cx>)> = None;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let c = cross(&rows[i], &rows[j]);
                    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>();
                    if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                        best = Some((n, c));
                    }
                }
            }
            normalize_checked(best.expect("three row pairs").1)
        }
        _ => Err(Error::UnsupportedDimension(r)),
    }
}

/// Bilinear (no conjugation) cross product of two complex 3-vectors.
fn cross(a: &[Cx], b: &[Cx]) -> Vec<Cx> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize_checked(v: Vec<Cx>) -> Result<Vec<Cx>> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n <= 0.0 || !n.is_finite() {
        return Err(Error::NotDiagonalizable);
    }
    Ok(v.into_iter().map(|z| z / n).collect())
}

/// Two orthonormal vectors spanning the Hermitian-orthogonal complement of a
/// unit 3-vector.
fn orthogonal_complement(w: &[Cx]) -> Vec<Vec<Cx>> {
    let r = w.len();
    let mut basis: Vec<Vec<Cx>> = vec![w.to_vec()];
    for i in 0..r {
        let mut e = vec![cx(0.0, 0.0); r];
        e[i] = cx(1.0, 0.0);
        basis.push(e);
    }
    gram_schmidt(&mut basis);
    basis.retain(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.5);
    basis.remove(0);
    basis
}

/// In-place modified Gram-Schmidt. Vectors that become numerically zero are
/// zeroed out (callers filter them).
pub(crate) fn gram_schmidt(vectors: &mut Vec<Vec<Cx>>) {
    let mut kept: Vec<Vec<Cx>> = Vec::with_capacity(vectors.len());
    for v in vectors.iter() {
        let mut w = v.clone();
        for q in &kept {
            let coeff: Cx = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= coeff * qi;
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            kept.push(w.into_iter().map(|z| z / n).collect());
        } else {
            kept.push(vec![cx(0.0, 0.0); v.len()]);
        }
    }
    *vectors = kept;
}

/// Rescales a vector so its largest-modulus entry (smallest index on ties)
/// is real and positive. Makes eigenvector output deterministic.
pub(crate) fn canonical_phase(v: Vec<Cx>) -> Vec<Cx> {
    let mut idx = 0;
    let mut best = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best + 1e-15 {
            best = n;
            idx = i;
        }
    }
    let z = v[idx];
    if z.norm() == 0.0 {
        return v;
    }
    let phase = z.conj() / z.norm();
    v.into_iter().map(|w| w * phase).collect()
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian
/// matrix of dimension <= 3. Used for smallest-singular-value computations.
pub(crate) fn hermitian_eig(h: &Mat) -> Result<(Vec<f64>, Vec<Vec<Cx>>)> {
    let r = h.dim();
    let eigs: Vec<f64> = match r {
        1 => vec![h.get(0, 0).re],
        2 => {
            let a = h.get(0, 0).re;
            let d = h.get(1, 1).re;
            let b2 = h.get(0, 1).norm_sqr();
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b2).sqrt();
            vec![mid - rad, mid + rad]
        }
        3 => {
            // Trigonometric solution of the real characteristic cubic; exact
            // for Hermitian input since the spectrum is real.
            let m = h.trace().re / 3.0;
            let mut k = h.clone();
            for i in 0..3 {
                k.set(i, i, k.get(i, i) - cx(m, 0.0));
            }
            let p2 = k.e.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let p = (p2 / 6.0).sqrt();
            if p <= 0.0 {
                vec![m, m, m]
            } else {
                let det_b = (k.det().re) / (p * p * p);
                let half = (det_b / 2.0).clamp(-1.0, 1.0);
                let phi = half.acos() / 3.0;
                let mut v = vec![
                    m + 2.0 * p * (phi).cos(),
                    m + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos(),
                    m + 2.0 * p * (phi + 4.0 * std::f64::consts::PI / 3.0).cos(),
                ];
                v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                v
            }
        }
        d => return Err(Error::UnsupportedDimension(d)),
    };
    let mut eigs = eigs;
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    // Cluster threshold scaled to the spectral range. The closed-form cubic
    // resolves degenerate eigenvalues only to about sqrt(eps), so clusters
    // are taken generously; callers needing sharper values refine them.
    let scale = eigs.iter().fold(1.0f64, |acc, &x| acc.max(x.abs()));
    let tau = 1e-7 * scale;
    let as_cx: Vec<Cx> = eigs.iter().map(|&x| cx(x, 0.0)).collect();
    let clusters = cluster_indices(&as_cx, tau);
    let mut vectors: Vec<(f64, Vec<Cx>)> = Vec::with_capacity(r);
    for cluster in &clusters {
        let basis = eigenspace_basis(h, &as_cx, cluster)?;
        for (idx, v) in cluster.iter().zip(basis) {
            vectors.push((eigs[*idx], v));
        }
    }
    vectors.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut vecs: Vec<Vec<Cx>> = vectors.iter().map(|(_, v)| v.clone()).collect();
    gram_schmidt(&mut vecs);
    Ok((vectors.into_iter().map(|(x, _)| x).collect(), vecs))
}

/// Adjugate matrix (transpose of cofactors): `adj(M) * M = det(M) * I`.
fn adjugate(m: &Mat) -> Mat {
    let r = m.dim();
    match r {
        1 => Mat::new(1, vec![cx(1.0, 0.0)]).expect("1x1"),
        2 => Mat::new(
            2,
            vec![m.get(1, 1), -m.get(0, 1), -m.get(1, 0), m.get(0, 0)],
        )
        .expect("2x2"),
        3 => {
            let g = |i: usize, j: usize| m.get(i, j);
            let c = |i: usize, j: usize| {
                // Cofactor C_ij, sign included.
                let (r1, r2) = match i {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let (c1, c2) = match j {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let minor = g(r1, c1) * g(r2, c2) - g(r1, c2) * g(r2, c1);
                if (i + j) % 2 == 0 {
                    minor
                } else {
                    -minor
                }
            };
            // adj = cofactor transpose.
            let mut e = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    e.push(c(j, i));
                }
            }
            Mat::new(3, e).expect("3x3")
        }
        _ => unreachable!(),
    }
}

/// Smallest singular value of the matrix obtained by stacking `blocks`
/// vertically, together with the corresponding right-singular vector.
///
/// Computed from the Hermitian Gram matrix `S^dagger S`, then refined by
/// shifted inverse iteration (through the adjugate, so no division by a
/// near-zero determinant) and a Rayleigh quotient. The refinement matters
/// when the smallest eigenvalue is nearly degenerate, where the closed-form
/// cubic alone loses square-root accuracy.
pub fn min_singular_stacked(blocks: &[&Mat]) -> Result<(f64, Vec<Cx>)> {
    let r = blocks.first().ok_or_else(|| Error::OutOfRange("no blocks".into()))?.dim();
    if blocks.iter().any(|b| b.dim() != r) {
        return Err(Error::DimensionMismatch(r, 0));
    }
    let mut gram = Mat::zeros(r)?;
    for b in blocks {
        let g = b.adjoint().mul(b)?;
        gram = gram.add(&g)?;
    }
    let (eigs, vecs) = hermitian_eig(&gram)?;
    let mut v = vecs[0].clone();
    let scale = gram.frobenius_norm();
    if scale > 0.0 {
        let shift = 1e-13 * scale;
        let mut shifted = gram.clone();
        for i in 0..r {
            shifted.set(i, i, shifted.get(i, i) - cx(shift, 0.0));
        }
        let adj = adjugate(&shifted);
        for _ in 0..2 {
            let w = adj.apply(&v);
            let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-280 {
                v = w.into_iter().map(|z| z / n).collect();
            } else {
                break;
            }
        }
    }
    // sigma = ||S v|| evaluated on the blocks directly: the Gram matrix
    // alone floors small singular values at sqrt(eps) * scale.
    let sigma: f64 = blocks
        .iter()
        .map(|b| b.apply(&v).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let _ = eigs;
    Ok((sigma, v))
}
