//! Cellular homology of the SU(2) character-variety model.
//!
//! The model is built combinatorially: the torus carries the grid with
//! s-lines at k/(2n) and t-lines at 0 and 1/2 (the unit square with
//! opposite sides identified), the involution (s,t) -> (1-s, 1-t) is
//! cellular on that grid and fixes exactly the four orbifold vertices, and
//! the pillowcase is the orbit quotient with orientation bookkeeping. The
//! n-1 circles {s = k/(2n)}, k = 1..n-1, survive as disjoint edge cycles in
//! the quotient and one 2-cell is attached along each. Homology is computed
//! over the integers via Smith normal form; `d(d(x)) = 0` is asserted
//! exactly for every complex constructed here.


use crate::error::{Error, Result};

/// Dense integer matrix, row-major. Small: boundary matrices of the models
/// here stay well under 1000 entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::OutOfRange("ragged row list".into()));
        }
        Ok(IntMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Checked product; errors on overflow.
    pub fn mul(&self, other: &IntMat) -> Result<IntMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(self.cols, other.rows));
        }
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i64 = 0;
                for k in 0..self.cols {
                    let term = self
                        .get(i, k)
                        .checked_mul(other.get(k, j))
                        .ok_or(Error::Overflow)?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src], checked.
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: i64) -> Result<()> {
        for j in 0..self.cols {
            let term = self.get(src, j).checked_mul(f).ok_or(Error::Overflow)?;
            let v = self.get(dst, j).checked_add(term).ok_or(Error::Overflow)?;
            self.set(dst, j, v);
        }
        Ok(())
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, f: i64) -> Result<()> {
        for i in 0..self.rows {
            let term = self.get(i, src).checked_mul(f).ok_or(Error::Overflow)?;
            let v = self.get(i, dst).checked_add(term).ok_or(Error::Overflow)?;
            self.set(i, dst, v);
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self.set(i, j, -self.get(i, j));
        }
    }
}

/// Unimodular factors `P * M * Q = diag(divisors)`.
#[derive(Debug, Clone)]
pub struct SnfTransforms {
    pub p: IntMat,
    pub q: IntMat,
}

/// Smith normal form: divisor chain `d_1 | d_2 | ...` of positive integers.
#[derive(Debug, Clone)]
pub struct SnfResult {
    pub divisors: Vec<u64>,
    pub rank: usize,
    pub transforms: Option<SnfTransforms>,
}

/// Smith normal form by unimodular row/column reduction, with overflow
/// checking. Returns the divisor chain and the transforms.
pub fn smith_normal_form(m: &IntMat) -> Result<SnfResult> {
    let mut a = m.clone();
    let mut p = IntMat::zeros(m.rows, m.rows);
    let mut q = IntMat::zeros(m.cols, m.cols);
    for i in 0..m.rows {
        p.set(i, i, 1);
    }
    for j in 0..m.cols {
        q.set(j, j, 1);
    }

    let limit = m.rows.min(m.cols);
    let mut t = 0usize;
    while t < limit {
        // Pivot: smallest nonzero magnitude in the trailing submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                let v = a.get(i, j).unsigned_abs();
                if v != 0 && pivot.is_none_or(|(pi, pj)| v < a.get(pi, pj).unsigned_abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        p.swap_rows(t, pi);
        a.swap_cols(t, pj);
        q.swap_cols(t, pj);

        loop {
            // Clear column t.
            let mut clean = true;
            for i in (t + 1)..m.rows {
                if a.get(i, t) != 0 {
                    let f = a.get(i, t).div_euclid(a.get(t, t));
                    a.add_row_multiple(i, t, -f)?;
                    p.add_row_multiple(i, t, -f)?;
                    if a.get(i, t) != 0 {
                        // Remainder is strictly smaller: promote it to pivot.
                        a.swap_rows(t, i);
                        p.swap_rows(t, i);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Clear row t.
            for j in (t + 1)..m.cols {
                if a.get(t, j) != 0 {
                    let f = a.get(t, j).div_euclid(a.get(t, t));
                    a.add_col_multiple(j, t, -f)?;
                    q.add_col_multiple(j, t, -f)?;
                    if a.get(t, j) != 0 {
                        a.swap_cols(t, j);
                        q.swap_cols(t, j);
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // Enforce the divisor chain: the pivot must divide the trailing
            // submatrix; folding an offending row back in restarts the gcd
            // reduction with a strictly smaller pivot.
            let d = a.get(t, t);
            let mut offender: Option<usize> = None;
            'search: for i in (t + 1)..m.rows {
                for j in (t + 1)..m.cols {
                    if a.get(i, j) % d != 0 {
                        offender = Some(i);
                        break 'search;
                    }
                }
            }
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, 1)?;
                    p.add_row_multiple(t, i, 1)?;
                }
                None => break,
            }
        }
        if a.get(t, t) < 0 {
            a.negate_row(t);
            p.negate_row(t);
        }
        t += 1;
    }

    let divisors: Vec<u64> = (0..t).map(|i| a.get(i, i) as u64).collect();
    debug_assert!(divisors.windows(2).all(|w| w[1] % w[0] == 0));
    Ok(SnfResult {
        rank: divisors.len(),
        divisors,
        transforms: Some(SnfTransforms { p, q }),
    })
}

/// Finite CW complex of dimension <= 2 with integer boundary maps.
/// `boundary1` is (#0-cells x #1-cells), `boundary2` is (#1-cells x
/// #2-cells); `boundary1 * boundary2 = 0` is validated exactly.
#[derive(Debug, Clone)]
pub struct CWModel {
    labels: [Vec<String>; 3],
    boundary1: IntMat,
    boundary2: IntMat,
}

impl CWModel {
    pub fn new(labels: [Vec<String>; 3], boundary1: IntMat, boundary2: IntMat) -> Result<Self> {
        if boundary1.rows() != labels[0].len()
            || boundary1.cols() != labels[1].len()
            || boundary2.rows() != labels[1].len()
            || boundary2.cols() != labels[2].len()
        {
            return Err(Error::InvalidComplex(
                "boundary matrix shapes do not match cell counts".into(),
            ));
        }
        let dd = boundary1.mul(&boundary2)?;
        if !dd.is_zero() {
            return Err(Error::InvalidComplex("d o d != 0".into()));
        }
        Ok(CWModel {
            labels,
            boundary1,
            boundary2,
        })
    }

    pub fn cell_counts(&self) -> [usize; 3] {
        [self.labels[0].len(), self.labels[1].len(), self.labels[2].len()]
    }

    pub fn labels(&self, dim: usize) -> &[String] {
        &self.labels[dim]
    }

    pub fn boundary1(&self) -> &IntMat {
        &self.boundary1
    }

    pub fn boundary2(&self) -> &IntMat {
        &self.boundary2
    }

    pub fn euler(&self) -> i64 {
        let [c0, c1, c2] = self.cell_counts();
        c0 as i64 - c1 as i64 + c2 as i64
    }
}

/// Integral homology summary of a 2-dimensional CW complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyProfile {
    /// Betti numbers b_0, b_1, b_2.
    pub betti: Vec<usize>,
    /// Torsion coefficients (> 1) per degree.
    pub torsion: Vec<Vec<u64>>,
    pub euler: i64,
}

impl HomologyProfile {
    pub fn torsion_free(&self) -> bool {
        self.torsion.iter().all(|t| t.is_empty())
    }
}

/// Integral cellular homology via Smith normal form:
/// `b_k = #k-cells - rank d_k - rank d_{k+1}`, torsion in degree k from the
/// divisors of `d_{k+1}` exceeding 1.
pub fn homology(cw: &CWModel) -> Result<HomologyProfile> {
    let [c0, c1, c2] = cw.cell_counts();
    let snf1 = smith_normal_form(cw.boundary1())?;
    let snf2 = smith_normal_form(cw.boundary2())?;
    let betti = vec![
        c0 - snf1.rank,
        c1 - snf1.rank - snf2.rank,
        c2 - snf2.rank,
    ];
    let torsion = vec![
        snf1.divisors.iter().copied().filter(|&d| d > 1).collect(),
        snf2.divisors.iter().copied().filter(|&d| d > 1).collect(),
        Vec::new(),
    ];
    Ok(HomologyProfile {
        betti,
        torsion,
        euler: cw.euler(),
    })
}

/// Torus grid cell: kind, s-index k (mod 2n) and t-index j (0 or 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Vert,
    HEdge,
    UEdge,
    Face,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Cell {
    kind: Kind,
    k: u32,
    j: u32,
}

struct TorusGrid {
    two_n: u32,
}

impl TorusGrid {
    fn index(&self, c: Cell) -> usize {
        (2 * c.k + c.j) as usize
    }

    /// Image of an oriented cell under (s, t) -> (1-s, 1-t), as a signed cell.
    fn involute(&self, c: Cell) -> (i64, Cell) {
        let m = self.two_n;
        let neg = |k: u32| (m - k) % m;
        match c.kind {
            Kind::Vert => (1, Cell { kind: Kind::Vert, k: neg(c.k), j: c.j }),
            // Horizontal edge [k, k+1] at fixed t maps to [-k-1, -k]
            // reversed.
            Kind::HEdge => (
                -1,
                Cell {
                    kind: Kind::HEdge,
                    k: (neg(c.k) + m - 1) % m,
                    j: c.j,
                },
            ),
            // Vertical edges swap the two t-bands and reverse.
            Kind::UEdge => (
                -1,
                Cell {
                    kind: Kind::UEdge,
                    k: neg(c.k),
                    j: 1 - c.j,
                },
            ),
            // The involution preserves the orientation of the square.
            Kind::Face => (
                1,
                Cell {
                    kind: Kind::Face,
                    k: (neg(c.k) + m - 1) % m,
                    j: 1 - c.j,
                },
            ),
        }
    }

    /// Boundary of an oriented cell in the torus complex.
    fn boundary(&self, c: Cell) -> Vec<(i64, Cell)> {
        let m = self.two_n;
        match c.kind {
            Kind::Vert => vec![],
            Kind::HEdge => vec![
                (1, Cell { kind: Kind::Vert, k: (c.k + 1) % m, j: c.j }),
                (-1, Cell { kind: Kind::Vert, k: c.k, j: c.j }),
            ],
            Kind::UEdge => vec![
                (1, Cell { kind: Kind::Vert, k: c.k, j: 1 - c.j }),
                (-1, Cell { kind: Kind::Vert, k: c.k, j: c.j }),
            ],
            // Square oriented by increasing (s, t): bottom + right - top - left.
            Kind::Face => vec![
                (1, Cell { kind: Kind::HEdge, k: c.k, j: c.j }),
                (1, Cell { kind: Kind::UEdge, k: (c.k + 1) % m, j: c.j }),
                (-1, Cell { kind: Kind::HEdge, k: c.k, j: 1 - c.j }),
                (-1, Cell { kind: Kind::UEdge, k: c.k, j: c.j }),
            ],
        }
    }
}

/// Orbit bookkeeping for one cell kind: quotient index and sign per torus
/// cell.
struct OrbitMap {
    /// For each torus cell index: (sign, quotient index).
    to_quotient: Vec<(i64, usize)>,
    /// Torus representative (as Cell) per quotient cell.
    reps: Vec<Cell>,
}

fn orbit_map(grid: &TorusGrid, kind: Kind) -> OrbitMap {
    let m = grid.two_n;
    let count = (2 * m) as usize;
    let mut to_quotient: Vec<Option<(i64, usize)>> = vec![None; count];
    let mut reps: Vec<Cell> = Vec::new();
    for k in 0..m {
        for j in 0..2u32 {
            let c = Cell { kind, k, j };
            let idx = grid.index(c);
            if to_quotient[idx].is_some() {
                continue;
            }
            let (sign, partner) = grid.involute(c);
            let q = reps.len();
            reps.push(c);
            to_quotient[idx] = Some((1, q));
            let pidx = grid.index(partner);
            if pidx != idx {
                // partner = sign * c in the quotient (the involution is a
                // signed bijection of oriented cells).
                to_quotient[pidx] = Some((sign, q));
            }
        }
    }
    OrbitMap {
        to_quotient: to_quotient.into_iter().map(|x| x.expect("orbit covered")).collect(),
        reps,
    }
}

/// Builds the CW model of the SU(2) character variety for twist `n`: the
/// pillowcase quotient of the torus grid with one disc attached along each
/// of the n-1 circles {s = k/(2n)}, k = 1..n-1.
pub fn build_su2_model(n: u32) -> Result<CWModel> {
    if n == 0 || n > 64 {
        return Err(Error::OutOfRange(format!("twist {n} (supported: 1..=64)")));
    }
    let grid = TorusGrid { two_n: 2 * n };
    let verts = orbit_map(&grid, Kind::Vert);
    let hedges = orbit_map(&grid, Kind::HEdge);
    let uedges = orbit_map(&grid, Kind::UEdge);
    let faces = orbit_map(&grid, Kind::Face);

    let edge_count = hedges.reps.len() + uedges.reps.len();
    let h_count = hedges.reps.len();
    // Quotient edges are listed h-edges first, then u-edges.
    let edge_index = |sign_idx: (i64, usize), kind: Kind| -> (i64, usize) {
        match kind {
            Kind::HEdge => sign_idx,
            Kind::UEdge => (sign_idx.0, h_count + sign_idx.1),
            _ => unreachable!(),
        }
    };

    // boundary1: rows = quotient vertices, cols = quotient edges.
    let mut b1 = IntMat::zeros(verts.reps.len(), edge_count);
    let all_edges: Vec<(Cell, usize)> = hedges
        .reps
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .chain(uedges.reps.iter().enumerate().map(|(i, &c)| (c, hedges.reps.len() + i)))
        .collect();
    for (cell, col) in &all_edges {
        for (coeff, d) in grid.boundary(*cell) {
            let (s, row) = verts.to_quotient[grid.index(d)];
            let v = b1.get(row, *col) + coeff * s;
            b1.set(row, *col, v);
        }
    }

    // boundary2: quotient faces plus n-1 attached discs.
    let disc_count = (n - 1) as usize;
    let mut b2 = IntMat::zeros(edge_count, faces.reps.len() + disc_count);
    for (col, cell) in faces.reps.iter().enumerate() {
        for (coeff, d) in grid.boundary(*cell) {
            let om = match d.kind {
                Kind::HEdge => &hedges,
                Kind::UEdge => &uedges,
                _ => unreachable!(),
            };
            let (s, idx) = edge_index(om.to_quotient[grid.index(d)], d.kind);
            let v = b2.get(idx, col) + coeff * s;
            b2.set(idx, col, v);
        }
    }
    // Disc k attaches along the full t-cycle at s = k/(2n): both vertical
    // edges with coefficient +1.
    for k in 1..n {
        let col = faces.reps.len() + (k - 1) as usize;
        for j in 0..2u32 {
            let d = Cell { kind: Kind::UEdge, k, j };
            let (s, idx) = edge_index(uedges.to_quotient[grid.index(d)], Kind::UEdge);
            let v = b2.get(idx, col) + s;
            b2.set(idx, col, v);
        }
    }

    let two_n = 2 * n;
    let vert_labels: Vec<String> = verts
        .reps
        .iter()
        .map(|c| format!("vertex s={}/{two_n} t={}/2", c.k, c.j))
        .collect();
    let mut edge_labels: Vec<String> = hedges
        .reps
        .iter()
        .map(|c| format!("pillow edge s=[{},{}]/{two_n} t={}/2", c.k, c.k + 1, c.j))
        .collect();
    edge_labels.extend(uedges.reps.iter().map(|c| {
        if c.k >= 1 && c.k < n {
            format!("circle edge s={}/{two_n} t=[{},{}]/2", c.k, c.j, c.j + 1)
        } else {
            format!("pillow edge s={}/{two_n} t=[{},{}]/2", c.k, c.j, c.j + 1)
        }
    }));
    let mut face_labels: Vec<String> = faces
        .reps
        .iter()
        .map(|c| format!("pillow face s=[{},{}]/{two_n} t=[{},{}]/2", c.k, c.k + 1, c.j, c.j + 1))
        .collect();
    face_labels.extend((1..n).map(|k| format!("attached disc {k} (s={k}/{two_n})")));

    CWModel::new([vert_labels, edge_labels, face_labels], b1, b2)
}

/// Number of grid 0-cells fixed by the involution (the orbifold points).
pub fn fixed_vertex_count(n: u32) -> Result<usize> {
    if n == 0 || n > 64 {
        return Err(Error::OutOfRange(format!("twist {n}")));
    }
    let grid = TorusGrid { two_n: 2 * n };
    let mut fixed = 0;
    for k in 0..grid.two_n {
        for j in 0..2u32 {
            let c = Cell { kind: Kind::Vert, k, j };
            let (_, img) = grid.involute(c);
            if img == c {
                fixed += 1;
            }
        }
    }
    Ok(fixed)
}

/// Hand-built CW model with the homotopy type of the complement of the
/// hyperbola {a*d = 1} in C^2 (equivalently C^2 minus C*): a circle and a
/// sphere wedged at a point. One 0-cell, one loop with zero boundary, one
/// 2-cell attached trivially. Betti numbers (1, 1, 1).
pub fn model_cp_minus_hyperbola() -> CWModel {
    let labels = [
        vec!["basepoint".to_string()],
        vec!["circle factor".to_string()],
        vec!["sphere cell".to_string()],
    ];
    let b1 = IntMat::zeros(1, 1);
    let b2 = IntMat::zeros(1, 1);
    CWModel::new(labels, b1, b2).expect("trivial boundaries")
}
