//! Mixed-dimension partitions of F_q^{s+t} built from a slice of a spread.
//!
//! Let K = F_{q^t} viewed as an F_q-space with basis `1, x, ..., x^{t-1}` and
//! let H be the span of the first `s` basis vectors. Inside H × K the sets
//! `{0} × K` and `{(h, a h) : h in H}` for each `a` in K cover every nonzero
//! vector exactly once: a vector `(h, y)` with `h != 0` lies only in the piece
//! labelled `a = y / h`. This gives one piece of dimension `t` and `q^t`
//! pieces of dimension `s`.
//!
//! Construction coordinates list the `s` coordinates of H first, then the `t`
//! coordinates of K.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Extension, Field, FieldSpec};
use crate::linalg::{Mat, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPiece {
    /// Code of the scalar `a` in F_{q^t}.
    pub label: u64,
    pub space: Subspace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct STPartition {
    pub field: Field,
    pub ambient: usize,
    pub big_piece: Subspace,
    pub small_pieces: Vec<LabeledPiece>,
    /// Maps construction coordinates to the current ones (row vectors on the
    /// left). Identity straight out of [`build_partition`].
    pub frame: Mat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionCheck {
    Ok,
    /// The first nonzero vector, in base-q order, not covered exactly once.
    Violation {
        vector: Vec<u32>,
        count: usize,
    },
}

impl PartitionCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, PartitionCheck::Ok)
    }
}

/// One piece of dimension `t_big` and `q^{t_big}` pieces of dimension
/// `s_small` partitioning F_q^{s_small + t_big}. Requires `1 <= s_small <= t_big`.
pub fn build_partition(
    field: &Field,
    t_big: usize,
    s_small: usize,
    cap: u64,
) -> Result<STPartition> {
    if s_small == 0 || s_small > t_big {
        return Err(Error::Domain(format!(
            "need 1 <= s_small <= t_big, got s_small={s_small}, t_big={t_big}"
        )));
    }
    let ext = Extension::new(field, t_big, cap)?;
    let ambient = s_small + t_big;
    let big_coords: Vec<usize> = (s_small..ambient).collect();
    let big_piece = Subspace::coordinate(field, ambient, &big_coords)?;

    let mut small_pieces = Vec::with_capacity(ext.order() as usize);
    for a in ext.elements() {
        let mult = ext.mul_matrix(a)?;
        let rows: Vec<Vec<u32>> = (0..s_small)
            .map(|j| {
                let mut row = vec![0u32; ambient];
                row[j] = 1;
                for i in 0..t_big {
                    row[s_small + i] = mult.get(i, j);
                }
                row
            })
            .collect();
        small_pieces.push(LabeledPiece {
            label: a,
            space: Subspace::span(field, ambient, &rows)?,
        });
    }

    let partition = STPartition {
        field: field.clone(),
        ambient,
        big_piece,
        small_pieces,
        frame: Mat::identity(field, ambient),
    };
    match verify_partition(&partition, cap)? {
        PartitionCheck::Ok => Ok(partition),
        PartitionCheck::Violation { vector, count } => Err(Error::Internal(format!(
            "partition covers {vector:?} {count} times"
        ))),
    }
}

impl STPartition {
    pub fn big_dim(&self) -> usize {
        self.big_piece.dim()
    }

    pub fn small_dim(&self) -> usize {
        self.small_pieces.first().map_or(0, |p| p.space.dim())
    }

    pub fn pieces(&self) -> impl Iterator<Item = &Subspace> {
        std::iter::once(&self.big_piece).chain(self.small_pieces.iter().map(|p| &p.space))
    }

    /// Applies the invertible change of coordinates `v -> v * frame` to every
    /// piece.
    pub fn reframe(&self, frame: &Mat) -> Result<STPartition> {
        frame.inverse()?;
        Ok(STPartition {
            field: self.field.clone(),
            ambient: self.ambient,
            big_piece: self.big_piece.transform(frame)?,
            small_pieces: self
                .small_pieces
                .iter()
                .map(|p| {
                    Ok(LabeledPiece {
                        label: p.label,
                        space: p.space.transform(frame)?,
                    })
                })
                .collect::<Result<_>>()?,
            frame: self.frame.mul(frame)?,
        })
    }
}

/// Checks that every nonzero vector of the ambient space lies in exactly one
/// piece.
pub fn verify_partition(p: &STPartition, cap: u64) -> Result<PartitionCheck> {
    let q = p.field.q() as u128;
    let total = q.saturating_pow(p.ambient as u32);
    if total > cap as u128 {
        return Err(Error::cap("partition ambient space", total, cap as u128));
    }
    let pieces: Vec<&Subspace> = p.pieces().collect();
    for s in &pieces {
        if s.ambient() != p.ambient || s.field() != &p.field {
            return Err(Error::dims(
                "piece does not live in the partition's ambient space",
            ));
        }
    }
    let m = p.ambient;
    let q = q as u64;
    let decode = |mut code: u64| {
        let mut v = vec![0u32; m];
        for slot in v.iter_mut().rev() {
            *slot = (code % q) as u32;
            code /= q;
        }
        v
    };
    let first_bad = (1..total as u64).into_par_iter().find_map_first(|code| {
        let v = decode(code);
        let count = pieces
            .iter()
            .filter(|s| s.member(&v).expect("lengths checked"))
            .count();
        (count != 1).then_some((v, count))
    });
    Ok(match first_bad {
        None => PartitionCheck::Ok,
        Some((vector, count)) => PartitionCheck::Violation { vector, count },
    })
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    label: u64,
    basis: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    field: FieldSpec,
    ambient: usize,
    frame: Vec<Vec<u32>>,
    big_piece: Vec<Vec<u32>>,
    small_pieces: Vec<PieceRepr>,
}

impl Serialize for STPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionRepr {
            field: self.field.spec().clone(),
            ambient: self.ambient,
            frame: self.frame.to_rows(),
            big_piece: self.big_piece.basis_rows(),
            small_pieces: self
                .small_pieces
                .iter()
                .map(|p| PieceRepr {
                    label: p.label,
                    basis: p.space.basis_rows(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for STPartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PartitionRepr::deserialize(d)?;
        let build = || -> Result<STPartition> {
            let field = Field::from_spec(&repr.field)?;
            let m = repr.ambient;
            Ok(STPartition {
                frame: Mat::from_rows(&field, m, &repr.frame)?,
                big_piece: Subspace::span(&field, m, &repr.big_piece)?,
                small_pieces: repr
                    .small_pieces
                    .iter()
                    .map(|p| {
                        Ok(LabeledPiece {
                            label: p.label,
                            space: Subspace::span(&field, m, &p.basis)?,
                        })
                    })
                    .collect::<Result<_>>()?,
                field,
                ambient: m,
            })
        };
        build().map_err(D::Error::custom)
    }
}
