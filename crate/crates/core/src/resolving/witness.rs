//! Separating witnesses: for two distinct vertices A and B, find a landmark U
//! with `dim(A ∩ U) != dim(B ∩ U)` by following the resolving argument step
//! by step.
//!
//! Some block W must satisfy `A ∩ W != B ∩ W`, because the blocks cover every
//! nonzero vector of A and B. Write `A_W = A ∩ W`, `B_W = B ∩ W` with
//! `dim A_W <= dim B_W = t` (swapping if needed), θ for the block's line and
//! `β_1..β_t` for a basis of `B_W`. Since θ lies in N it is in neither A nor
//! B.
//!
//! * Unequal dimensions: complete `{θ, β}` to a basis of W and drop θ. U
//!   contains `B_W` but is too small to contain `A_W`.
//! * Equal dimensions, `α ∈ A_W \ B_W` dependent on `{θ, β}`: the same U.
//!   α has a nonzero θ-component, so α is not in U.
//! * Equal dimensions, `{α, θ, β}` independent: complete it to a basis of W
//!   and replace `α, θ` by `α + θ`. U contains `B_W` and misses both α and θ.

use serde::Serialize;

use crate::bilform::Vertex;
use crate::error::{Error, Result};
use crate::linalg::{extend_to_basis, Echelon, Subspace};

use super::construct::ConstructionContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    UnequalDims,
    EqualDimsDependent,
    EqualDimsIndependent,
}

impl Branch {
    pub const ALL: [Branch; 3] = [
        Branch::UnequalDims,
        Branch::EqualDimsDependent,
        Branch::EqualDimsIndependent,
    ];
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub block: usize,
    pub label: u64,
    pub coords: Vec<u32>,
    /// Index of the landmark in the constructed list.
    pub position: usize,
    pub landmark: Vertex,
    /// `(dim(A ∩ U), dim(B ∩ U))`, in argument order.
    pub dims: (usize, usize),
    pub branch: Branch,
    pub theta: Vec<u32>,
    /// The vector of the smaller-or-equal side outside the other side, when
    /// the dimensions are equal.
    pub alpha: Option<Vec<u32>>,
}

fn broken(msg: String) -> Error {
    Error::Internal(format!("separating witness: {msg}"))
}

pub fn find_separating_landmark(
    a: &Vertex,
    b: &Vertex,
    ctx: &ConstructionContext,
) -> Result<Witness> {
    let g = &ctx.graph;
    let sa = g.subspace_of(a)?;
    let sb = g.subspace_of(b)?;
    if sa == sb {
        return Err(Error::IdenticalVertices);
    }
    let found = ctx.blocks.iter().enumerate().find_map(|(i, block)| {
        let ai = sa.intersect(&block.w);
        let bi = sb.intersect(&block.w);
        match (ai, bi) {
            (Ok(ai), Ok(bi)) if ai == bi => None,
            (ai, bi) => Some(ai.and_then(|ai| Ok((i, ai, bi?)))),
        }
    });
    let (i, ai, bi) = found.ok_or_else(|| broken("no block tells the vertices apart".into()))??;
    let block = &ctx.blocks[i];
    let w = &block.w;
    let field = w.field();

    let (small, large) = if ai.dim() > bi.dim() {
        (&bi, &ai)
    } else {
        (&ai, &bi)
    };
    let theta = block.theta().to_vec();
    let betas = large.basis_rows();
    let t = betas.len();

    let span_without_theta = |basis: Vec<Vec<u32>>| -> Result<Subspace> {
        Subspace::span(field, w.ambient(), &basis[1..])
    };
    let with_theta: Vec<Vec<u32>> = std::iter::once(theta.clone())
        .chain(betas.iter().cloned())
        .collect();

    let (u, branch, alpha) = if small.dim() < t {
        let basis =
            extend_to_basis(&with_theta, w).map_err(|e| broken(format!("θ with B_W: {e}")))?;
        (span_without_theta(basis)?, Branch::UnequalDims, None)
    } else {
        let alpha = small
            .basis_rows()
            .into_iter()
            .find(|v| !large.member(v).unwrap_or(true))
            .ok_or_else(|| broken("equal intersections with equal dimensions".into()))?;
        let mut ech = Echelon::new(field, w.ambient());
        let independent = std::iter::once(&alpha)
            .chain(&with_theta)
            .all(|v| ech.insert(v));
        if !independent {
            let basis =
                extend_to_basis(&with_theta, w).map_err(|e| broken(format!("θ with B_W: {e}")))?;
            (
                span_without_theta(basis)?,
                Branch::EqualDimsDependent,
                Some(alpha),
            )
        } else {
            if t == g.d() {
                return Err(broken("d + 2 independent vectors in a (d+1)-space".into()));
            }
            let start: Vec<Vec<u32>> = std::iter::once(alpha.clone()).chain(with_theta).collect();
            let basis =
                extend_to_basis(&start, w).map_err(|e| broken(format!("α, θ with B_W: {e}")))?;
            let mut sum = alpha.clone();
            field.axpy(&mut sum, 1, &theta);
            let rows: Vec<Vec<u32>> = std::iter::once(sum)
                .chain(basis[2..].iter().cloned())
                .collect();
            (
                Subspace::span(field, w.ambient(), &rows)?,
                Branch::EqualDimsIndependent,
                Some(alpha),
            )
        }
    };

    if u.dim() != g.d() {
        return Err(broken(format!("U has dimension {}", u.dim())));
    }
    let coords = block
        .coords_of(&u)?
        .ok_or_else(|| broken(format!("U is not a landmark of block {i}")))?;
    if block.hyperplane(&coords)? != u {
        return Err(broken("functional coordinates do not reproduce U".into()));
    }
    let landmark = g
        .vertex_of(&u)
        .map_err(|e| broken(format!("U is not a vertex: {e}")))?;
    let dims = (sa.intersect_dim(&u)?, sb.intersect_dim(&u)?);
    if dims.0 == dims.1 {
        return Err(broken(format!(
            "U fails to separate: both intersections have dimension {}",
            dims.0
        )));
    }
    Ok(Witness {
        block: i,
        label: block.label,
        position: ctx.position(i, &coords),
        coords,
        landmark,
        dims,
        branch,
        theta,
        alpha,
    })
}
