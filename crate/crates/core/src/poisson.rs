//! Poisson solver with the unknown placed on dual vertices.
//!
//! Solves `-lap u = f` with Dirichlet data `g`. The discrete operator is the
//! chain `H2 . d1 . H1^-1 . d0_dual` acting on the dual-vertex array; Dirichlet
//! data enters through ghost values pinned at boundary edge centers, whose
//! half dual edges feed the flux balance of the adjacent triangles.

use thiserror::Error;

use crate::cochain::Cochain;
use crate::complex::{Carrier, SimplicialComplex2};
use crate::dual::{validate_dual, DualMesh};
use crate::geometry::Vec2;
use crate::hodge::{
    degenerate_dual_message, inverse_hodge1, HodgeError, HodgeOperators, InverseHodge1, InverseMode,
};
use crate::linsolve::{SolveError as LuError, SparseLu};
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error("degenerate dual mesh: {0}")]
    DegenerateDual(String),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error("singular system: {0}")]
    SingularSystem(#[from] LuError),
}

/// Minimum |e*| / mean edge length before a dual is considered degenerate.
pub const DUAL_LENGTH_RATIO: f64 = 1e-8;

pub struct PoissonProblem<'a> {
    /// Right-hand side of `-lap u = f`.
    pub f: &'a dyn Fn(Vec2) -> f64,
    /// Dirichlet boundary data.
    pub g: &'a dyn Fn(Vec2) -> f64,
}

pub fn solve_poisson(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    hodge: &HodgeOperators,
    mode: InverseMode,
    problem: &PoissonProblem,
) -> Result<Cochain, PoissonError> {
    let report = validate_dual(cx, dual, DUAL_LENGTH_RATIO);
    if !report.is_ok() {
        return Err(PoissonError::DegenerateDual(degenerate_dual_message(
            &report,
        )));
    }

    let nf = cx.num_triangles();
    let ne = cx.num_edges();
    // du on dual edges is C u + b with ghosts g(c_e) on boundary edges
    let c_mat = cx.exterior_derivative(0, Carrier::Dual);
    let mut bvec = vec![0.0; ne];
    for (e, flag) in cx.boundary_edge_flags.iter().enumerate() {
        if *flag {
            let (_, sign) = cx.edge_triangles[e][0].expect("boundary edge has one triangle");
            bvec[e] = -(sign as f64) * (problem.g)(dual.edge_centers[e]);
        }
    }
    let d1 = cx.exterior_derivative(1, Carrier::Primal);
    let h2d1 = hodge.h2.matmul(&d1).expect("shape");
    let f_rhs: Vec<f64> = dual.triangle_centers.iter().map(|&p| (problem.f)(p)).collect();

    let u = match mode {
        InverseMode::Elementwise => {
            let inv = inverse_hodge1(cx, dual, &hodge.h1, InverseMode::Elementwise)?;
            let inv_mat = match &inv {
                InverseHodge1::Matrix(m) => m,
                InverseHodge1::Factored(_) => unreachable!(),
            };
            let l = h2d1.matmul(inv_mat).expect("shape").matmul(&c_mat).expect("shape");
            let correction = h2d1.matvec(&inv_mat.matvec(&bvec));
            let rhs: Vec<f64> = f_rhs
                .iter()
                .zip(&correction)
                .map(|(f, c)| f - c)
                .collect();
            let lu = SparseLu::factor(&l)?;
            lu.solve_checked(&rhs)?
        }
        InverseMode::DirectSolve => {
            // block system over (u, p) with p = H1^-1 (C u + b):
            //   H2 d1 p = f
            //   C u - H1 p = -b
            let mut trip: Vec<(usize, usize, f64)> = Vec::new();
            for (r, c, v) in h2d1.iter() {
                trip.push((r, nf + c, v));
            }
            for (r, c, v) in c_mat.iter() {
                trip.push((nf + r, c, v));
            }
            for (r, c, v) in hodge.h1.iter() {
                trip.push((nf + r, nf + c, -v));
            }
            let block = SparseMatrix::from_triplets(nf + ne, nf + ne, &trip).unwrap();
            let mut rhs = vec![0.0; nf + ne];
            rhs[..nf].copy_from_slice(&f_rhs);
            for e in 0..ne {
                rhs[nf + e] = -bvec[e];
            }
            let lu = SparseLu::factor(&block)?;
            let x = lu.solve_checked(&rhs)?;
            x[..nf].to_vec()
        }
    };

    Ok(Cochain {
        degree: 0,
        carrier: Carrier::Dual,
        values: u,
    })
}
