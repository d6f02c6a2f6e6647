use serde::{Deserialize, Serialize};

use crate::bilform::{GraphSpec, Vertex, VertexIndex, DEFAULT_ENUMERATION_CAP};
use crate::bounds::theorem_bound;
use crate::error::{Error, Result};
use crate::linalg::{coordinates, extend_to_basis, Mat, Subspace};
use crate::partition::{build_partition, STPartition};

/// Where a constructed landmark came from: its block and the functional
/// coordinates selecting a hyperplane of that block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub block: usize,
    pub label: u64,
    pub coords: Vec<u32>,
}

/// An ordered list of landmark vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandmarkSet {
    spec: GraphSpec,
    landmarks: Vec<Vertex>,
    provenance: Option<Vec<Provenance>>,
}

impl LandmarkSet {
    pub fn new(
        spec: &GraphSpec,
        landmarks: Vec<Vertex>,
        provenance: Option<Vec<Provenance>>,
    ) -> Result<Self> {
        for v in &landmarks {
            spec.index_of(v)?;
        }
        if let Some(p) = &provenance {
            if p.len() != landmarks.len() {
                return Err(Error::Format(format!(
                    "{} provenance records for {} landmarks",
                    p.len(),
                    landmarks.len()
                )));
            }
        }
        Ok(LandmarkSet {
            spec: spec.clone(),
            landmarks,
            provenance,
        })
    }

    pub fn from_indices(spec: &GraphSpec, indices: &[u64]) -> Result<Self> {
        let landmarks = indices
            .iter()
            .map(|&i| spec.vertex_at(VertexIndex(i)))
            .collect::<Result<_>>()?;
        Self::new(spec, landmarks, None)
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn landmarks(&self) -> &[Vertex] {
        &self.landmarks
    }

    pub fn provenance(&self) -> Option<&[Provenance]> {
        self.provenance.as_deref()
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn indices(&self) -> Result<Vec<u64>> {
        self.landmarks
            .iter()
            .map(|v| self.spec.index_of(v).map(|i| i.0))
            .collect()
    }

    /// Drops the landmark at `position`, with its provenance record.
    pub fn remove(&mut self, position: usize) -> Vertex {
        if let Some(p) = &mut self.provenance {
            p.remove(position);
        }
        self.landmarks.remove(position)
    }
}

/// Which half of the construction applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `n >= d + 2`: blocks are the (d+1)-dimensional partition pieces and
    /// each block's line is its intersection with N.
    Wide,
    /// `d <= n <= d + 1`: blocks are a fixed line of N plus a d-dimensional
    /// partition piece.
    Narrow,
}

impl Case {
    pub fn number(self) -> u8 {
        match self {
            Case::Wide => 1,
            Case::Narrow => 2,
        }
    }
}

/// A (d+1)-dimensional block W together with a line L inside it. Its
/// landmarks are the `q^d` hyperplanes of W that miss L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: u64,
    pub w: Subspace,
    pub l: Subspace,
    /// `[θ, w_1, ..., w_d]`: θ spans L and the rest complete a basis of W.
    frame: Vec<Vec<u32>>,
}

impl Block {
    fn new(label: u64, w: Subspace, l: Subspace) -> Result<Self> {
        if l.dim() != 1 {
            return Err(Error::dims(format!("block line has dimension {}", l.dim())));
        }
        if !w.contains(&l)? {
            return Err(Error::NotContained);
        }
        let theta = l.basis_rows().remove(0);
        let frame = extend_to_basis(&[theta], &w)?;
        Ok(Block { label, w, l, frame })
    }

    pub fn theta(&self) -> &[u32] {
        &self.frame[0]
    }

    /// `span{w_j - c_j θ}`.
    pub fn hyperplane(&self, coords: &[u32]) -> Result<Subspace> {
        if coords.len() + 1 != self.frame.len() {
            return Err(Error::dims(format!(
                "{} functional coordinates for a block of dimension {}",
                coords.len(),
                self.frame.len()
            )));
        }
        let f = self.w.field();
        let theta = self.theta();
        let rows: Vec<Vec<u32>> = self.frame[1..]
            .iter()
            .zip(coords)
            .map(|(w, &c)| {
                let mut row = w.clone();
                f.axpy(&mut row, f.neg(c), theta);
                row
            })
            .collect();
        Subspace::span(f, self.w.ambient(), &rows)
    }

    /// The functional coordinates of a hyperplane `u` of W missing L, or
    /// `None` when `u` is not such a hyperplane.
    pub fn coords_of(&self, u: &Subspace) -> Result<Option<Vec<u32>>> {
        if u.dim() + 1 != self.frame.len() || !self.w.contains(u)? || u.member(self.theta())? {
            return Ok(None);
        }
        let f = self.w.field();
        let mut rows = u.basis_rows();
        rows.push(self.theta().to_vec());
        let mut coords = Vec::with_capacity(u.dim());
        for w in &self.frame[1..] {
            // w_j = u_j + c_j θ with u_j in U
            let Some(x) = coordinates(f, &rows, w)? else {
                return Ok(None);
            };
            coords.push(*x.last().expect("θ coefficient"));
        }
        Ok(Some(coords))
    }

    fn landmark_count(&self) -> u64 {
        (self.w.field().q() as u64).pow((self.frame.len() - 1) as u32)
    }
}

/// The frame data behind a constructed landmark set, all in standard
/// coordinates where `N = span(e_1, ..., e_n)`.
#[derive(Clone, Debug)]
pub struct ConstructionContext {
    pub case: Case,
    pub graph: GraphSpec,
    pub partition: STPartition,
    pub n_space: Subspace,
    /// The (n-1)-dimensional big piece inside N in the wide case, the fixed
    /// line of N in the narrow case.
    pub anchor: Subspace,
    pub blocks: Vec<Block>,
}

impl ConstructionContext {
    /// Position in the landmark list of the hyperplane `coords` of block
    /// `block`.
    pub fn position(&self, block: usize, coords: &[u32]) -> usize {
        let q = self.graph.q();
        let per_block = q.pow(self.graph.d() as u32);
        let within = coords.iter().fold(0u64, |acc, &c| acc * q + c as u64);
        (block as u64 * per_block + within) as usize
    }
}

/// Every coordinate vector in F_q^len, first coordinate most significant.
fn lex_vectors(q: u64, len: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..q.pow(len as u32)).map(move |mut k| {
        let mut c = vec![0u32; len];
        for slot in c.iter_mut().rev() {
            *slot = (k % q) as u32;
            k /= q;
        }
        c
    })
}

/// The d-subspaces of the (d+1)-space `w` meeting the line `l` trivially, in
/// lexicographic order of their functional coordinates.
pub fn hyperplanes_avoiding(w: &Subspace, l: &Subspace) -> Result<Vec<Subspace>> {
    let block = Block::new(0, w.clone(), l.clone())?;
    let q = w.field().q() as u64;
    lex_vectors(q, w.dim() - 1)
        .map(|c| block.hyperplane(&c))
        .collect()
}

/// Builds the landmark family for H_q(n, d) with `n >= d >= 2`. The result
/// has `q^{n+d-1}` landmarks when `n >= d + 2` and `q^{n+d}` otherwise.
pub fn build_landmarks(spec: &GraphSpec, cap: u64) -> Result<(LandmarkSet, ConstructionContext)> {
    let (n, d, q) = (spec.n(), spec.d(), spec.q());
    if d < 2 || n < d {
        return Err(Error::Domain(format!(
            "construction needs n >= d >= 2, got n={n}, d={d}"
        )));
    }
    let expected = theorem_bound(q, n, d)?;
    let expected_u128 = u128::try_from(&expected).unwrap_or(u128::MAX);
    if expected_u128 > cap as u128 {
        return Err(Error::cap("landmark family", expected_u128, cap as u128));
    }
    let part_cap = cap.max(DEFAULT_ENUMERATION_CAP);
    let field = spec.field();
    let n_space = spec.n_space();

    let (case, partition, anchor, blocks) = if n >= d + 2 {
        // Big piece of dim n-1 at construction coordinates s..s+t; N adds h0 = e_0.
        let (t, s) = (n - 1, d + 1);
        let raw = build_partition(field, t, s, part_cap)?;
        let order: Vec<usize> = std::iter::once(0).chain(s..s + t).chain(1..s).collect();
        let frame = Mat::permutation(field, &order)?;
        let partition = raw.reframe(&frame)?;
        let anchor = partition.big_piece.clone();
        if !n_space.contains(&anchor)? || anchor.dim() != n - 1 {
            return Err(Error::Internal("big piece is not a hyperplane of N".into()));
        }
        let mut h0 = vec![0u32; n + d];
        h0[0] = 1;
        let h0 = frame.apply_row(&h0)?;
        if anchor.sum(&Subspace::span(field, n + d, &[h0])?)? != n_space {
            return Err(Error::Internal("big piece plus h0 does not give N".into()));
        }
        let ext_coeffs = |a: u64| -> Vec<u32> {
            let mut c = vec![0u32; t];
            let mut rest = a;
            for slot in c.iter_mut() {
                *slot = (rest % q) as u32;
                rest /= q;
            }
            c
        };
        let mut blocks = Vec::with_capacity(partition.small_pieces.len());
        for piece in &partition.small_pieces {
            let w = piece.space.clone();
            if w.sum(&n_space)?.dim() != n + d {
                return Err(Error::Internal(format!(
                    "block {} does not span with N",
                    piece.label
                )));
            }
            let meet = w.intersect(&n_space)?;
            // closed form: span{(h0, a * h0)} in construction coordinates
            let mut closed = vec![0u32; n + d];
            closed[0] = 1;
            closed[s..].copy_from_slice(&ext_coeffs(piece.label));
            let closed = Subspace::span(field, n + d, &[frame.apply_row(&closed)?])?;
            if meet.dim() != 1 || meet != closed {
                return Err(Error::Internal(format!(
                    "block {} meets N in {meet:?}, expected {closed:?}",
                    piece.label
                )));
            }
            blocks.push(Block::new(piece.label, w, meet)?);
        }
        (Case::Wide, partition, anchor, blocks)
    } else {
        // Big piece of dim n is N itself, at construction coordinates d..d+n.
        let (t, s) = (n, d);
        let raw = build_partition(field, t, s, part_cap)?;
        let order: Vec<usize> = (s..s + t).chain(0..s).collect();
        let frame = Mat::permutation(field, &order)?;
        let partition = raw.reframe(&frame)?;
        if partition.big_piece != n_space {
            return Err(Error::Internal("big piece does not land on N".into()));
        }
        let first = n_space.basis_rows().remove(0);
        let anchor = Subspace::span(field, n + d, &[first])?;
        let mut blocks = Vec::with_capacity(partition.small_pieces.len());
        for piece in &partition.small_pieces {
            let w = anchor.sum(&piece.space)?;
            if w.dim() != d + 1 {
                return Err(Error::Internal(format!(
                    "block {} has dimension {}",
                    piece.label,
                    w.dim()
                )));
            }
            blocks.push(Block::new(piece.label, w, anchor.clone())?);
        }
        (Case::Narrow, partition, anchor, blocks)
    };

    let mut landmarks = Vec::new();
    let mut provenance = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        for coords in lex_vectors(q, d) {
            let u = block.hyperplane(&coords)?;
            let v = spec
                .vertex_of(&u)
                .map_err(|e| Error::Internal(format!("landmark {coords:?} of block {i}: {e}")))?;
            landmarks.push(v);
            provenance.push(Provenance {
                block: i,
                label: block.label,
                coords,
            });
        }
    }
    debug_assert!(blocks.iter().all(|b| b.landmark_count() == q.pow(d as u32)));
    if landmarks.len() as u128 != expected_u128 {
        return Err(Error::Internal(format!(
            "built {} landmarks, expected {expected}",
            landmarks.len()
        )));
    }

    let set = LandmarkSet::new(spec, landmarks, Some(provenance))?;
    let ctx = ConstructionContext {
        case,
        graph: spec.clone(),
        partition,
        n_space,
        anchor,
        blocks,
    };
    Ok((set, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilform::DEFAULT_ENUMERATION_CAP as CAP;
    use std::collections::HashSet;

    fn build(q: u64, n: usize, d: usize) -> (LandmarkSet, ConstructionContext) {
        build_landmarks(&GraphSpec::with_order(q, n, d).unwrap(), CAP).unwrap()
    }

    #[test]
    fn sizes_match_the_bound() {
        assert_eq!(build(2, 4, 2).0.len(), 32);
        assert_eq!(build(2, 2, 2).0.len(), 16);
        assert_eq!(build(2, 3, 2).0.len(), 32);
        assert_eq!(build(3, 2, 2).0.len(), 81);
    }

    #[test]
    fn landmarks_meet_n_trivially_and_are_distinct() {
        for (q, n, d) in [(3, 2, 2), (2, 4, 2), (2, 3, 3)] {
            let (set, ctx) = build(q, n, d);
            let g = &ctx.graph;
            let mut seen = HashSet::new();
            for (v, prov) in set.landmarks().iter().zip(set.provenance().unwrap()) {
                let u = g.subspace_of(v).unwrap();
                assert_eq!(u.dim(), d);
                assert_eq!(u.intersect_dim(&ctx.n_space).unwrap(), 0);
                let block = &ctx.blocks[prov.block];
                assert!(block.w.contains(&u).unwrap());
                assert_eq!(u.intersect_dim(&block.l).unwrap(), 0);
                assert!(seen.insert(g.index_of(v).unwrap()));
            }
        }
    }

    #[test]
    fn wide_case_context_invariants() {
        let (_, ctx) = build(2, 4, 2);
        assert_eq!(ctx.case, Case::Wide);
        assert_eq!(ctx.anchor.dim(), 3);
        assert!(ctx.n_space.contains(&ctx.anchor).unwrap());
        assert_eq!(ctx.blocks.len(), 8);
        for b in &ctx.blocks {
            assert_eq!(b.w.dim(), 3);
            assert_eq!(b.w.sum(&ctx.n_space).unwrap().dim(), 6);
            assert_eq!(b.w.intersect(&ctx.n_space).unwrap(), b.l);
        }
    }

    #[test]
    fn narrow_case_context_invariants() {
        let (_, ctx) = build(3, 3, 2);
        assert_eq!(ctx.case, Case::Narrow);
        assert_eq!(ctx.anchor.dim(), 1);
        assert_eq!(ctx.blocks.len(), 27);
        for b in &ctx.blocks {
            assert_eq!(b.w.dim(), 3);
            assert_eq!(b.l, ctx.anchor);
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        let g = GraphSpec::with_order(2, 3, 1).unwrap();
        assert!(matches!(build_landmarks(&g, CAP), Err(Error::Domain(_))));
        let g = GraphSpec::with_order(2, 2, 3).unwrap();
        assert!(matches!(build_landmarks(&g, CAP), Err(Error::Domain(_))));
        let g = GraphSpec::with_order(2, 4, 2).unwrap();
        assert!(matches!(
            build_landmarks(&g, 31),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn hyperplanes_of_a_plane_missing_a_line() {
        let f = crate::gf::Field::new(2, 1).unwrap();
        let w = Subspace::coordinate(&f, 3, &[0, 1]).unwrap();
        let l = Subspace::span(&f, 3, &[vec![1, 1, 0]]).unwrap();
        let hs = hyperplanes_avoiding(&w, &l).unwrap();
        let mut got: Vec<Vec<Vec<u32>>> = hs.iter().map(|h| h.basis_rows()).collect();
        got.sort();
        assert_eq!(got, vec![vec![vec![0, 1, 0]], vec![vec![1, 0, 0]]]);
    }

    #[test]
    fn hyperplanes_are_direct_complements() {
        let f = crate::gf::Field::new(3, 1).unwrap();
        let w = Subspace::span(
            &f,
            5,
            &[
                vec![1, 0, 2, 0, 0],
                vec![0, 1, 0, 1, 0],
                vec![0, 0, 0, 0, 1],
            ],
        )
        .unwrap();
        let l = Subspace::span(&f, 5, &[vec![1, 1, 2, 1, 2]]).unwrap();
        let hs = hyperplanes_avoiding(&w, &l).unwrap();
        assert_eq!(hs.len(), 9);
        for h in &hs {
            assert_eq!(h.intersect_dim(&l).unwrap(), 0);
            assert_eq!(h.sum(&l).unwrap(), w);
        }
    }

    #[test]
    fn hyperplanes_reject_line_outside() {
        let f = crate::gf::Field::new(2, 1).unwrap();
        let w = Subspace::coordinate(&f, 3, &[0, 1]).unwrap();
        let l = Subspace::coordinate(&f, 3, &[2]).unwrap();
        assert!(matches!(
            hyperplanes_avoiding(&w, &l),
            Err(Error::NotContained)
        ));
    }

    #[test]
    fn coords_round_trip() {
        let (set, ctx) = build(2, 4, 2);
        for (k, prov) in set.provenance().unwrap().iter().enumerate() {
            let block = &ctx.blocks[prov.block];
            let u = block.hyperplane(&prov.coords).unwrap();
            assert_eq!(block.coords_of(&u).unwrap(), Some(prov.coords.clone()));
            assert_eq!(ctx.position(prov.block, &prov.coords), k);
        }
        assert_eq!(ctx.blocks[0].coords_of(&ctx.n_space).unwrap(), None);
    }
}
