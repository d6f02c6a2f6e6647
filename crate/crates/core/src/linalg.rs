//! Exact matrices and canonical subspaces over F_q.
//!
//! A [`Subspace`] is stored as the reduced row echelon form of any basis, with
//! pivots normalized to 1 and zero rows dropped, so two subspaces are equal as
//! sets exactly when their stored bases are identical.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldSpec};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{}]", self.field)?;
        f.debug_list()
            .entries(self.data.chunks(self.cols.max(1)))
            .finish()
    }
}

impl Mat {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&c| c >= field.q()) {
            return Err(Error::ElementOutOfRange {
                code: bad as u64,
                q: field.q() as u64,
            });
        }
        Ok(Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows of equal length `cols`.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dims(format!(
                "row of length {} in a {cols}-column matrix",
                r.len()
            )));
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Permutation matrix acting on row vectors: `(v * P)[k] = v[order[k]]`.
    pub fn permutation(field: &Field, order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &o in order {
            if o >= n || std::mem::replace(&mut seen[o], true) {
                return Err(Error::Domain(format!("{order:?} is not a permutation")));
            }
        }
        let mut m = Self::zeros(field, n, n);
        for (k, &o) in order.iter().enumerate() {
            m.set(o, k, 1);
        }
        Ok(m)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                f.axpy(dst, self.get(r, k), other.row(k));
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::dims("matrix shapes differ"));
        }
        let f = &self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Mat {
            data,
            ..self.clone()
        })
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    pub fn inverse(&self) -> Result<Mat> {
        let n = self.rows;
        if self.cols != n {
            return Err(Error::dims("inverse of a non-square matrix"));
        }
        let mut aug = Mat::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.set(r, n + r, 1);
        }
        let red = rref(&aug);
        if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
            return Err(Error::Domain("matrix is singular".into()));
        }
        let mut inv = Mat::zeros(&self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&red.reduced.row(r)[n..]);
        }
        Ok(inv)
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.rows {
            return Err(Error::dims(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![0; self.cols];
        for (k, &c) in v.iter().enumerate() {
            self.field.axpy(&mut out, c, self.row(k));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input, zero rows at the bottom.
    pub reduced: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn rref(m: &Mat) -> Rref {
    if m.field.q() == 2 && m.cols <= 64 {
        return rref_gf2(m);
    }
    let f = &m.field;
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i * cols + col] != 0) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let inv = f.inv(a[rank * cols + col]);
        f.scale(&mut a[rank * cols..(rank + 1) * cols], inv);
        let pivot_row = a[rank * cols..(rank + 1) * cols].to_vec();
        for i in 0..rows {
            let factor = a[i * cols + col];
            if i != rank && factor != 0 {
                f.axpy(&mut a[i * cols..(i + 1) * cols], f.neg(factor), &pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    Rref {
        reduced: Mat {
            data: a,
            ..m.clone()
        },
        rank,
        pivots,
    }
}

fn rref_gf2(m: &Mat) -> Rref {
    let (rows, cols) = (m.rows, m.cols);
    let mut words: Vec<u64> = (0..rows)
        .map(|r| {
            m.row(r)
                .iter()
                .enumerate()
                .fold(0u64, |w, (c, &x)| w | ((x as u64) << c))
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let bit = 1u64 << col;
        let Some(p) = (rank..rows).find(|&i| words[i] & bit != 0) else {
            continue;
        };
        words.swap(p, rank);
        let pivot = words[rank];
        for (i, w) in words.iter_mut().enumerate() {
            if i != rank && *w & bit != 0 {
                *w ^= pivot;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let mut data = Vec::with_capacity(rows * cols);
    for w in &words {
        data.extend((0..cols).map(|c| ((w >> c) & 1) as u32));
    }
    Rref {
        reduced: Mat { data, ..m.clone() },
        rank,
        pivots,
    }
}

/// Coefficients expressing `v` in terms of the linearly independent `rows`,
/// or `None` when `v` is outside their span.
pub fn coordinates(field: &Field, rows: &[Vec<u32>], v: &[u32]) -> Result<Option<Vec<u32>>> {
    let k = rows.len();
    let len = v.len();
    if rows.iter().any(|r| r.len() != len) {
        return Err(Error::dims("rows and vector differ in length"));
    }
    // Columns are the given rows followed by v.
    let mut m = Mat::zeros(field, len, k + 1);
    for (j, r) in rows.iter().enumerate() {
        for (i, &x) in r.iter().enumerate() {
            m.set(i, j, x);
        }
    }
    for (i, &x) in v.iter().enumerate() {
        m.set(i, k, x);
    }
    let red = rref(&m);
    if red.pivots.contains(&k) {
        return Ok(None);
    }
    if red.pivots.len() != k {
        return Err(Error::Dependent);
    }
    Ok(Some((0..k).map(|j| red.reduced.get(j, k)).collect()))
}

/// An incrementally built echelon basis. Each stored row has a unit pivot and
/// zeros in the pivot columns of all earlier rows.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    field: Field,
    len: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: &Field, len: usize) -> Self {
        Echelon {
            field: field.clone(),
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn residual(&self, v: &[u32]) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.len);
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = r[p];
            if c != 0 {
                f.axpy(&mut r, f.neg(c), row);
            }
        }
        r
    }

    /// Adds `v` if it is independent of the stored rows.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let mut r = self.residual(v);
        let Some(p) = r.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = self.field.inv(r[p]);
        self.field.scale(&mut r, inv);
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Mat,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} in {}^{}) ",
            self.dim(),
            self.basis.field,
            self.ambient()
        )?;
        f.debug_list()
            .entries(self.basis.data.chunks(self.ambient().max(1)))
            .finish()
    }
}

impl Subspace {
    /// The span of `generators` inside F_q^ambient.
    pub fn span(field: &Field, ambient: usize, generators: &[Vec<u32>]) -> Result<Self> {
        let m = Mat::from_rows(field, ambient, generators)?;
        Ok(Self::row_space(&m))
    }

    pub fn row_space(m: &Mat) -> Self {
        let red = rref(m);
        let mut basis = red.reduced;
        basis.data.truncate(red.rank * basis.cols);
        basis.rows = red.rank;
        Subspace {
            basis,
            pivots: red.pivots,
        }
    }

    pub fn zero(field: &Field, ambient: usize) -> Self {
        Subspace {
            basis: Mat::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    /// The span of the standard basis vectors `e_i` for `i` in `coords`.
    pub fn coordinate(field: &Field, ambient: usize, coords: &[usize]) -> Result<Self> {
        let gens: Vec<Vec<u32>> = coords
            .iter()
            .map(|&i| {
                let mut v = vec![0; ambient];
                if i >= ambient {
                    return Err(Error::dims(format!("coordinate {i} outside F^{ambient}")));
                }
                v[i] = 1;
                Ok(v)
            })
            .collect::<Result<_>>()?;
        Self::span(field, ambient, &gens)
    }

    pub fn field(&self) -> &Field {
        &self.basis.field
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// The canonical basis, one row per basis vector.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<u32>> {
        self.basis.to_rows()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.ambient() != other.ambient() {
            return Err(Error::dims(format!(
                "ambient dimensions {} and {}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    /// True iff `v` lies in the subspace.
    pub fn member(&self, v: &[u32]) -> Result<bool> {
        if v.len() != self.ambient() {
            return Err(Error::dims(format!(
                "vector of length {} in F^{}",
                v.len(),
                self.ambient()
            )));
        }
        let f = self.field();
        let mut r = v.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            let c = r[p];
            if c != 0 {
                f.axpy(&mut r, f.neg(c), self.basis.row(k));
            }
        }
        Ok(r.iter().all(|&c| c == 0))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        for r in 0..other.dim() {
            if !self.member(other.basis.row(r))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let mut gens = self.basis_rows();
        gens.extend(other.basis_rows());
        Subspace::span(self.field(), self.ambient(), &gens)
    }

    /// `dim(a) + dim(b) - dim(a + b)`.
    pub fn intersect_dim(&self, other: &Subspace) -> Result<usize> {
        let sum = self.sum(other)?;
        Ok(self.dim() + other.dim() - sum.dim())
    }

    /// The intersection, by the Zassenhaus method: row reduce the rows
    /// `(a, a)` and `(b, 0)`; the rows whose left half vanishes span `a ∩ b`
    /// in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let m = self.ambient();
        let mut gens = Vec::with_capacity(self.dim() + other.dim());
        for r in 0..self.dim() {
            let a = self.basis.row(r);
            gens.push([a, a].concat());
        }
        for r in 0..other.dim() {
            let mut row = other.basis.row(r).to_vec();
            row.resize(2 * m, 0);
            gens.push(row);
        }
        let stacked = Mat::from_rows(self.field(), 2 * m, &gens)?;
        let red = rref(&stacked);
        let meet: Vec<Vec<u32>> = (0..red.rank)
            .filter(|&r| red.pivots[r] >= m)
            .map(|r| red.reduced.row(r)[m..].to_vec())
            .collect();
        Subspace::span(self.field(), m, &meet)
    }

    /// Image under `v -> v * frame` for an invertible square `frame`.
    pub fn transform(&self, frame: &Mat) -> Result<Subspace> {
        if frame.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        if frame.rows() != self.ambient() || frame.cols() != self.ambient() {
            return Err(Error::dims("frame does not match the ambient dimension"));
        }
        Ok(Subspace::row_space(&self.basis.mul(frame)?))
    }
}

/// Extends the independent vectors `independent`, all inside `within`, to a
/// basis of `within`. The output starts with the input, in order; completion
/// vectors are the canonical basis rows of `within` that keep the set
/// independent, scanned in order.
pub fn extend_to_basis(independent: &[Vec<u32>], within: &Subspace) -> Result<Vec<Vec<u32>>> {
    let mut ech = Echelon::new(within.field(), within.ambient());
    for v in independent {
        if !within.member(v)? {
            return Err(Error::NotContained);
        }
        if !ech.insert(v) {
            return Err(Error::Dependent);
        }
    }
    let mut out = independent.to_vec();
    for row in within.basis_rows() {
        if ech.rank() == within.dim() {
            break;
        }
        if ech.insert(&row) {
            out.push(row);
        }
    }
    debug_assert_eq!(out.len(), within.dim());
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    field: FieldSpec,
    ambient: usize,
    basis: Vec<Vec<u32>>,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr {
            field: self.field().spec().clone(),
            ambient: self.ambient(),
            basis: self.basis_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SubspaceRepr::deserialize(d)?;
        let field = Field::from_spec(&repr.field).map_err(D::Error::custom)?;
        Subspace::span(&field, repr.ambient, &repr.basis).map_err(D::Error::custom)
    }
}
