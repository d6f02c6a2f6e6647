//! The bilinear forms graph H_q(n, d).
//!
//! Two equivalent models are kept side by side. In the matrix model a vertex
//! is an `n x d` matrix `F` over F_q and the distance between two vertices is
//! `rank(F - G)`. In the subspace model the same vertex is the d-subspace
//! `U_F = {(F y, y) : y in F_q^d}` of F_q^{n+d}; it meets the distinguished
//! n-subspace `N = span(e_1, ..., e_n)` trivially, and the distance between
//! two vertices is `d - dim(U_F ∩ U_G)`.
//!
//! Vertex indices are the base-q digits of the matrix entries read row-major,
//! with the top-left entry as the most significant digit.

use num_bigint::BigUint;

use crate::bounds::rank_class_counts;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linalg::{Mat, Subspace};

/// Largest vertex count that may be enumerated by default.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

const RANK_TABLE_MAX_BITS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    field: Field,
    n: usize,
    d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    matrix: Mat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexIndex(pub u64);

impl Vertex {
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    /// The transposed vertex, a vertex of H_q(d, n).
    pub fn transpose_map(&self) -> Vertex {
        Vertex {
            matrix: self.matrix.transpose(),
        }
    }
}

impl GraphSpec {
    pub fn new(field: &Field, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Domain(format!(
                "n and d must be positive, got n={n}, d={d}"
            )));
        }
        Ok(GraphSpec {
            field: field.clone(),
            n,
            d,
        })
    }

    /// H_q(n, d) over the field of order `q`.
    pub fn with_order(q: u64, n: usize, d: usize) -> Result<Self> {
        Self::new(&Field::from_order(q)?, n, d)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ambient(&self) -> usize {
        self.n + self.d
    }

    pub fn diameter(&self) -> usize {
        self.n.min(self.d)
    }

    /// `q^{nd}`, saturating at `u128::MAX`.
    pub fn vertex_count(&self) -> u128 {
        (self.q() as u128).saturating_pow((self.n * self.d) as u32)
    }

    /// The vertex count, provided it is at most `cap`.
    pub fn enumerable(&self, cap: u64) -> Result<u64> {
        let count = self.vertex_count();
        if count > cap as u128 {
            return Err(Error::cap("vertex set", count, cap as u128));
        }
        Ok(count as u64)
    }

    /// H_q(d, n), the target of [`Vertex::transpose_map`].
    pub fn transposed(&self) -> GraphSpec {
        GraphSpec {
            field: self.field.clone(),
            n: self.d,
            d: self.n,
        }
    }

    /// `N = span(e_1, ..., e_n)` inside F_q^{n+d}.
    pub fn n_space(&self) -> Subspace {
        let coords: Vec<usize> = (0..self.n).collect();
        Subspace::coordinate(&self.field, self.ambient(), &coords).expect("coordinates in range")
    }

    pub fn vertex(&self, matrix: Mat) -> Result<Vertex> {
        if matrix.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if (matrix.rows(), matrix.cols()) != (self.n, self.d) {
            return Err(Error::dims(format!(
                "{}x{} matrix for H({}, {})",
                matrix.rows(),
                matrix.cols(),
                self.n,
                self.d
            )));
        }
        Ok(Vertex { matrix })
    }

    pub fn zero_vertex(&self) -> Vertex {
        Vertex {
            matrix: Mat::zeros(&self.field, self.n, self.d),
        }
    }

    fn check(&self, v: &Vertex) -> Result<()> {
        if v.matrix.field() != &self.field || v.matrix.rows() != self.n || v.matrix.cols() != self.d
        {
            return Err(Error::Domain(format!(
                "vertex {}x{} over {} does not belong to H_{}({}, {})",
                v.matrix.rows(),
                v.matrix.cols(),
                v.matrix.field(),
                self.q(),
                self.n,
                self.d
            )));
        }
        Ok(())
    }

    pub fn vertex_at(&self, idx: VertexIndex) -> Result<Vertex> {
        let count = self.vertex_count();
        if idx.0 as u128 >= count {
            return Err(Error::Domain(format!(
                "vertex index {} out of range {count}",
                idx.0
            )));
        }
        let q = self.q();
        let mut rest = idx.0;
        let mut data = vec![0u32; self.n * self.d];
        for slot in data.iter_mut().rev() {
            *slot = (rest % q) as u32;
            rest /= q;
        }
        Ok(Vertex {
            matrix: Mat::new(&self.field, self.n, self.d, data)?,
        })
    }

    pub fn index_of(&self, v: &Vertex) -> Result<VertexIndex> {
        self.check(v)?;
        if self.vertex_count() > u64::MAX as u128 {
            return Err(Error::cap(
                "vertex index",
                self.vertex_count(),
                u64::MAX as u128,
            ));
        }
        let q = self.q();
        Ok(VertexIndex(
            v.matrix
                .data()
                .iter()
                .fold(0u64, |acc, &x| acc * q + x as u64),
        ))
    }

    /// Rank distance `rank(F_u - F_v)`.
    pub fn distance(&self, u: &Vertex, v: &Vertex) -> Result<usize> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.matrix.sub(&v.matrix)?.rank())
    }

    /// `U_F`, the row space of `[F^T | I_d]`.
    pub fn subspace_of(&self, v: &Vertex) -> Result<Subspace> {
        self.check(v)?;
        let (n, d) = (self.n, self.d);
        let rows: Vec<Vec<u32>> = (0..d)
            .map(|j| {
                let mut row = vec![0u32; n + d];
                for (i, slot) in row[..n].iter_mut().enumerate() {
                    *slot = v.matrix.get(i, j);
                }
                row[n + j] = 1;
                row
            })
            .collect();
        Subspace::span(&self.field, n + d, &rows)
    }

    /// Inverse of [`GraphSpec::subspace_of`]. Fails with [`Error::MeetsN`]
    /// when `u` meets `N` nontrivially.
    pub fn vertex_of(&self, u: &Subspace) -> Result<Vertex> {
        let (n, d) = (self.n, self.d);
        if u.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if u.ambient() != n + d || u.dim() != d {
            return Err(Error::dims(format!(
                "expected a {d}-subspace of F^{}, got dim {} in F^{}",
                n + d,
                u.dim(),
                u.ambient()
            )));
        }
        // Basis B = [X | Y]; U ∩ N = 0 iff Y is invertible, and then F^T = Y^{-1} X.
        let b = u.basis();
        let mut x = Mat::zeros(&self.field, d, n);
        let mut y = Mat::zeros(&self.field, d, d);
        for r in 0..d {
            for c in 0..n {
                x.set(r, c, b.get(r, c));
            }
            for c in 0..d {
                y.set(r, c, b.get(r, n + c));
            }
        }
        let y_inv = y.inverse().map_err(|_| Error::MeetsN)?;
        let ft = y_inv.mul(&x)?;
        Ok(Vertex {
            matrix: ft.transpose(),
        })
    }

    /// Every vertex once, in increasing index order.
    pub fn enumerate_vertices(
        &self,
        cap: u64,
    ) -> Result<impl Iterator<Item = (VertexIndex, Vertex)> + '_> {
        let count = self.enumerable(cap)?;
        Ok((0..count).map(move |i| {
            let idx = VertexIndex(i);
            (idx, self.vertex_at(idx).expect("index in range"))
        }))
    }

    /// Entry `i` is the number of `n x d` matrices of rank `i`.
    pub fn rank_class_sizes(&self) -> Vec<BigUint> {
        rank_class_counts(self.q(), self.n, self.d)
    }
}

/// Fast rank distance between vertex indices, for enumeration-scale work.
#[derive(Clone)]
pub struct IndexDistance {
    spec: GraphSpec,
    rank_table: Option<Vec<u8>>,
}

impl IndexDistance {
    pub fn new(spec: &GraphSpec) -> Result<Self> {
        let bits = spec.n * spec.d;
        if bits > 64 || spec.vertex_count() > u64::MAX as u128 {
            return Err(Error::cap(
                "vertex index",
                spec.vertex_count(),
                u64::MAX as u128,
            ));
        }
        let rank_table = (spec.q() == 2 && bits <= RANK_TABLE_MAX_BITS).then(|| {
            (0..1u64 << bits)
                .map(|x| binary_rank(x, spec.n, spec.d) as u8)
                .collect()
        });
        Ok(IndexDistance {
            spec: spec.clone(),
            rank_table,
        })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    #[inline]
    pub fn distance(&self, u: u64, v: u64) -> usize {
        if self.spec.q() == 2 {
            let x = u ^ v;
            return match &self.rank_table {
                Some(t) => t[x as usize] as usize,
                None => binary_rank(x, self.spec.n, self.spec.d),
            };
        }
        let (n, d) = (self.spec.n, self.spec.d);
        let f = &self.spec.field;
        let q = self.spec.q();
        let mut buf = [0u32; 64];
        let (mut a, mut b) = (u, v);
        for slot in buf[..n * d].iter_mut().rev() {
            *slot = f.sub((a % q) as u32, (b % q) as u32);
            a /= q;
            b /= q;
        }
        small_rank(f, &mut buf[..n * d], n, d)
    }
}

/// Rank of an `n x d` matrix over GF(2) packed row-major, first entry in the
/// most significant of the `n*d` low bits.
fn binary_rank(x: u64, n: usize, d: usize) -> usize {
    let mask = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for r in 0..n {
        let mut row = (x >> ((n - 1 - r) * d)) & mask;
        while row != 0 {
            let top = 63 - row.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = row;
                rank += 1;
                break;
            }
            row ^= basis[top];
        }
    }
    rank
}

/// In-place Gaussian elimination on a row-major `n x d` buffer.
fn small_rank(f: &Field, m: &mut [u32], n: usize, d: usize) -> usize {
    let mut rank = 0;
    for col in 0..d {
        let Some(p) = (rank..n).find(|&r| m[r * d + col] != 0) else {
            continue;
        };
        for j in 0..d {
            m.swap(p * d + j, rank * d + j);
        }
        let inv = f.inv(m[rank * d + col]);
        for r in rank + 1..n {
            let factor = m[r * d + col];
            if factor != 0 {
                let c = f.neg(f.mul(factor, inv));
                for j in col..d {
                    m[r * d + j] = f.add(m[r * d + j], f.mul(c, m[rank * d + j]));
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Serializes vertices as a JSON array of `n x d` integer matrices.
pub fn vertices_to_json(vertices: &[Vertex]) -> serde_json::Value {
    serde_json::Value::Array(
        vertices
            .iter()
            .map(|v| serde_json::json!(v.matrix.to_rows()))
            .collect(),
    )
}

pub fn vertices_from_json(spec: &GraphSpec, value: &serde_json::Value) -> Result<Vec<Vertex>> {
    let mats: Vec<Vec<Vec<u32>>> = serde_json::from_value(value.clone())?;
    mats.iter()
        .map(|rows| {
            if rows.len() != spec.n {
                return Err(Error::Format(format!(
                    "expected {} rows, got {}",
                    spec.n,
                    rows.len()
                )));
            }
            spec.vertex(Mat::from_rows(&spec.field, spec.d, rows)?)
        })
        .collect()
}

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// One base-q digit string per line, entries row-major. Requires q <= 36.
pub fn vertices_to_csv(spec: &GraphSpec, vertices: &[Vertex]) -> Result<String> {
    if spec.q() > DIGITS.len() as u64 {
        return Err(Error::Format(format!(
            "digit strings need q <= 36, got {}",
            spec.q()
        )));
    }
    let mut out = String::new();
    for v in vertices {
        spec.check(v)?;
        out.extend(v.matrix.data().iter().map(|&x| DIGITS[x as usize] as char));
        out.push('\n');
    }
    Ok(out)
}

pub fn vertices_from_csv(spec: &GraphSpec, text: &str) -> Result<Vec<Vertex>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let data = line
                .chars()
                .map(|c| {
                    c.to_digit(36)
                        .filter(|&x| (x as u64) < spec.q())
                        .ok_or_else(|| Error::Format(format!("bad digit {c:?} in {line:?}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            if data.len() != spec.n * spec.d {
                return Err(Error::Format(format!("{line:?} has {} digits", data.len())));
            }
            spec.vertex(Mat::new(&spec.field, spec.n, spec.d, data)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(q: u64, n: usize, d: usize) -> GraphSpec {
        GraphSpec::with_order(q, n, d).unwrap()
    }

    #[test]
    fn zero_and_identical_distance() {
        let g = h(3, 2, 3);
        let v = g.vertex_at(VertexIndex(417)).unwrap();
        assert_eq!(g.distance(&v, &v).unwrap(), 0);
    }

    #[test]
    fn rank_one_difference_is_adjacent() {
        let g = h(2, 3, 2);
        let u = g.vertex_at(VertexIndex(13)).unwrap();
        // outer product of (1,1,0) and (0,1)
        let e = Mat::from_rows(g.field(), 2, &[vec![0, 1], vec![0, 1], vec![0, 0]]).unwrap();
        let v = g.vertex(u.matrix().sub(&e).unwrap()).unwrap();
        assert_eq!(g.distance(&u, &v).unwrap(), 1);
        let su = g.subspace_of(&u).unwrap();
        let sv = g.subspace_of(&v).unwrap();
        assert_eq!(su.intersect_dim(&sv).unwrap(), g.d() - 1);
    }

    #[test]
    fn zero_vertex_is_last_coordinates() {
        let g = h(2, 2, 2);
        let s = g.subspace_of(&g.zero_vertex()).unwrap();
        assert_eq!(s, Subspace::coordinate(g.field(), 4, &[2, 3]).unwrap());
        assert_eq!(g.index_of(&g.zero_vertex()).unwrap(), VertexIndex(0));
    }

    #[test]
    fn identity_vertex_subspace() {
        let g = h(2, 2, 2);
        let v = g.vertex(Mat::identity(g.field(), 2)).unwrap();
        let s = g.subspace_of(&v).unwrap();
        assert_eq!(s.basis_rows(), vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
    }

    #[test]
    fn round_trips_h2_2_2() {
        let g = h(2, 2, 2);
        let mut n = 0;
        for (idx, v) in g.enumerate_vertices(DEFAULT_ENUMERATION_CAP).unwrap() {
            let s = g.subspace_of(&v).unwrap();
            assert_eq!(s.intersect_dim(&g.n_space()).unwrap(), 0);
            assert_eq!(g.vertex_of(&s).unwrap(), v);
            assert_eq!(g.index_of(&v).unwrap(), idx);
            n += 1;
        }
        assert_eq!(n, 16);
    }

    #[test]
    fn vertex_of_rejects_subspace_meeting_n() {
        let g = h(2, 2, 2);
        let s = Subspace::coordinate(g.field(), 4, &[0, 3]).unwrap();
        assert!(matches!(g.vertex_of(&s), Err(Error::MeetsN)));
    }

    #[test]
    fn enumerate_counts_and_order() {
        let g = h(3, 2, 2);
        let all: Vec<_> = g
            .enumerate_vertices(DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .collect();
        assert_eq!(all.len(), 81);
        assert!(all.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(all[0].1, g.zero_vertex());
        let mut mats: Vec<Vec<u32>> = all
            .iter()
            .map(|(_, v)| v.matrix().data().to_vec())
            .collect();
        mats.dedup();
        assert_eq!(mats.len(), 81);
        assert!(matches!(
            g.enumerate_vertices(80),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn index_layout_is_row_major_most_significant_first() {
        let g = h(2, 2, 2);
        let v = g.vertex_at(VertexIndex(0b1000)).unwrap();
        assert_eq!(v.matrix().to_rows(), vec![vec![1, 0], vec![0, 0]]);
        let v = g.vertex_at(VertexIndex(0b0001)).unwrap();
        assert_eq!(v.matrix().to_rows(), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn index_distance_matches_matrix_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (q, n, d) in [(2, 2, 2), (2, 5, 3), (3, 2, 2), (4, 2, 3), (5, 3, 2)] {
            let g = h(q, n, d);
            let kernel = IndexDistance::new(&g).unwrap();
            let count = g.vertex_count() as u64;
            for _ in 0..500 {
                let (a, b) = (rng.gen_range(0..count), rng.gen_range(0..count));
                let (u, v) = (
                    g.vertex_at(VertexIndex(a)).unwrap(),
                    g.vertex_at(VertexIndex(b)).unwrap(),
                );
                assert_eq!(kernel.distance(a, b), g.distance(&u, &v).unwrap());
            }
        }
    }

    #[test]
    fn spec_mismatch_is_an_error() {
        let g = h(2, 2, 2);
        let other = h(3, 2, 2);
        let v = other.zero_vertex();
        assert!(g.distance(&g.zero_vertex(), &v).is_err());
        let wide = h(2, 2, 3).zero_vertex();
        assert!(g.subspace_of(&wide).is_err());
    }

    #[test]
    fn transpose_is_an_involution() {
        let g = h(3, 3, 2);
        assert_eq!(
            g.zero_vertex().transpose_map(),
            g.transposed().zero_vertex()
        );
        let v = g.vertex_at(VertexIndex(555)).unwrap();
        assert_eq!(v.transpose_map().transpose_map(), v);
    }

    #[test]
    fn vertex_files_round_trip() {
        let g = h(3, 2, 2);
        let vs: Vec<Vertex> = [0, 5, 80]
            .iter()
            .map(|&i| g.vertex_at(VertexIndex(i)).unwrap())
            .collect();
        let json = vertices_to_json(&vs);
        assert_eq!(vertices_from_json(&g, &json).unwrap(), vs);
        let csv = vertices_to_csv(&g, &vs).unwrap();
        assert_eq!(csv, "0000\n0012\n2222\n");
        assert_eq!(vertices_from_csv(&g, &csv).unwrap(), vs);
        assert!(vertices_from_csv(&g, "0003\n").is_err());
    }
}
