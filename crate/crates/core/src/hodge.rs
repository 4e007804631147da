//! Discrete Hodge operators on arbitrary-centered duals.
//!
//! The 1-form operator is assembled from per-triangle 3x3 blocks that are
//! exact on locally constant forms for any choice of interior centers. On a
//! circumcentric dual of an acute mesh it reduces to the classical diagonal
//! operator with entries |e*|/|e|.

use thiserror::Error;

use crate::complex::SimplicialComplex2;
use crate::dual::{DualMesh, DualValidationReport};
use crate::geometry::{Mat3, Vec2};
use crate::linsolve::{SolveError, SparseLu};
use crate::quadrature::integrate_1form_segment;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum HodgeError {
    #[error("triangle {0}: collinear edges in local Hodge decomposition")]
    SingularDecomposition(usize),
    #[error("triangle {0}: local Hodge block is numerically singular")]
    SingularLocalHodge(usize),
    #[error("global Hodge matrix is singular")]
    SingularGlobalHodge(#[from] SolveError),
}

/// Per-triangle 1-form Hodge block: maps the triangle's three primal edge
/// cochain values to its three half-dual-edge contributions.
#[derive(Clone, Debug)]
pub struct LocalHodge1 {
    pub triangle: usize,
    pub matrix: Mat3,
    /// Local slot -> global edge index.
    pub edges: [usize; 3],
}

/// Condition-number threshold above which a local block is reported singular.
const LOCAL_COND_LIMIT: f64 = 1e12;

/// Build the local block from the closed-form entries
/// `M[i][i] = (e_i x e_i*) / |e_i|^2` and
/// `M[i][j] = (e_i . e_i*) / |e_i|^2 * (e_i . e_k) / (e_j x e_k)`.
pub fn local_hodge1(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    t: usize,
) -> Result<LocalHodge1, HodgeError> {
    let local = cx.edge_of_triangle[t];
    let ev: [Vec2; 3] = [
        cx.edge_vector(local[0].0),
        cx.edge_vector(local[1].0),
        cx.edge_vector(local[2].0),
    ];
    let halves = &dual.half_dual_edges[t];
    let mut m = Mat3::zeros();
    for i in 0..3 {
        let estar = halves[i].vector;
        let len2 = ev[i].norm_squared();
        m.0[i][i] = ev[i].cross(estar) / len2;
        let proj = ev[i].dot(estar) / len2;
        for j in 0..3 {
            if j == i {
                continue;
            }
            let k = 3 - i - j;
            let denom = ev[j].cross(ev[k]);
            if denom == 0.0 {
                return Err(HodgeError::SingularDecomposition(t));
            }
            m.0[i][j] = proj * ev[i].dot(ev[k]) / denom;
        }
    }
    Ok(LocalHodge1 {
        triangle: t,
        matrix: m,
        edges: [local[0].0, local[1].0, local[2].0],
    })
}

/// Assembled Hodge operators for all three degrees.
#[derive(Clone, Debug)]
pub struct HodgeOperators {
    /// V x V diagonal: dual cell area per vertex.
    pub h0: SparseMatrix,
    /// E x E sparse: primal 1-cochains to dual 1-cochains.
    pub h1: SparseMatrix,
    /// F x F diagonal: 1 / triangle area.
    pub h2: SparseMatrix,
}

pub fn assemble_hodge0(cx: &SimplicialComplex2, dual: &DualMesh) -> SparseMatrix {
    let _ = cx;
    SparseMatrix::from_diagonal(&dual.dual_cell_areas)
}

pub fn assemble_hodge2(cx: &SimplicialComplex2, dual: &DualMesh) -> SparseMatrix {
    let _ = dual;
    let inv_areas: Vec<f64> = (0..cx.num_triangles())
        .map(|t| 1.0 / cx.triangle_area(t))
        .collect();
    SparseMatrix::from_diagonal(&inv_areas)
}

pub fn assemble_hodge1(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
) -> Result<SparseMatrix, HodgeError> {
    let mut triplets = Vec::with_capacity(9 * cx.num_triangles());
    for t in 0..cx.num_triangles() {
        let block = local_hodge1(cx, dual, t)?;
        for i in 0..3 {
            for j in 0..3 {
                let v = block.matrix.0[i][j];
                if v != 0.0 {
                    triplets.push((block.edges[i], block.edges[j], v));
                }
            }
        }
    }
    Ok(SparseMatrix::from_triplets(cx.num_edges(), cx.num_edges(), &triplets).unwrap())
}

impl HodgeOperators {
    pub fn build(cx: &SimplicialComplex2, dual: &DualMesh) -> Result<Self, HodgeError> {
        Ok(Self {
            h0: assemble_hodge0(cx, dual),
            h1: assemble_hodge1(cx, dual)?,
            h2: assemble_hodge2(cx, dual),
        })
    }
}

/// How the dual-to-primal Hodge on 1-forms is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseMode {
    /// Sparse approximation assembled from local inverses weighted by
    /// dual-length fractions (exact in the diagonal case).
    Elementwise,
    /// Exact application through a sparse LU factorization of H1.
    DirectSolve,
}

impl InverseMode {
    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "elementwise" => Some(InverseMode::Elementwise),
            "direct-solve" => Some(InverseMode::DirectSolve),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InverseMode::Elementwise => "elementwise",
            InverseMode::DirectSolve => "direct-solve",
        }
    }
}

/// Application of the inverse 1-form Hodge (dual 1-cochains to primal).
pub enum InverseHodge1 {
    Matrix(SparseMatrix),
    Factored(Box<SparseLu>),
}

impl InverseHodge1 {
    pub fn apply(&self, dual_cochain: &[f64]) -> Vec<f64> {
        match self {
            InverseHodge1::Matrix(m) => m.matvec(dual_cochain),
            InverseHodge1::Factored(lu) => lu.solve(dual_cochain),
        }
    }

    /// The explicit sparse matrix, only available in elementwise mode.
    pub fn as_matrix(&self) -> Option<&SparseMatrix> {
        match self {
            InverseHodge1::Matrix(m) => Some(m),
            InverseHodge1::Factored(_) => None,
        }
    }
}

/// Assemble the elementwise inverse `sum_T F_T M_T^-1 F_T` with `F_T` the
/// diagonal of signed dual-length fractions (boundary edges: 1), or factor H1
/// for exact application.
pub fn inverse_hodge1(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    h1: &SparseMatrix,
    mode: InverseMode,
) -> Result<InverseHodge1, HodgeError> {
    match mode {
        InverseMode::DirectSolve => {
            let lu = SparseLu::factor(h1)?;
            Ok(InverseHodge1::Factored(Box::new(lu)))
        }
        InverseMode::Elementwise => {
            let mut triplets = Vec::with_capacity(9 * cx.num_triangles());
            for t in 0..cx.num_triangles() {
                let block = local_hodge1(cx, dual, t)?;
                let inv = block
                    .matrix
                    .inverse()
                    .filter(|_| block.matrix.cond_1() <= LOCAL_COND_LIMIT)
                    .ok_or(HodgeError::SingularLocalHodge(t))?;
                let mut fractions = [1.0; 3];
                for (k, &(e, _)) in cx.edge_of_triangle[t].iter().enumerate() {
                    if !cx.boundary_edge_flags[e] {
                        fractions[k] =
                            dual.half_dual_edges[t][k].signed_length / dual.dual_edge_lengths[e];
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        let v = fractions[i] * inv.0[i][j] * fractions[j];
                        if v != 0.0 {
                            triplets.push((block.edges[i], block.edges[j], v));
                        }
                    }
                }
            }
            Ok(InverseHodge1::Matrix(
                SparseMatrix::from_triplets(cx.num_edges(), cx.num_edges(), &triplets).unwrap(),
            ))
        }
    }
}

/// l2 norm of `H1 (omega on primal edges) - (star omega on full dual edges)`.
pub fn hodge_exactness_error(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    h1: &SparseMatrix,
    form: &dyn Fn(Vec2) -> Vec2,
    star_form: &dyn Fn(Vec2) -> Vec2,
    quad_order: usize,
) -> f64 {
    let ne = cx.num_edges();
    let mut primal = vec![0.0; ne];
    for (e, &[tail, head]) in cx.edges.iter().enumerate() {
        primal[e] = integrate_1form_segment(
            form,
            cx.vertex_coords[tail],
            cx.vertex_coords[head],
            quad_order,
        );
    }
    let mapped = h1.matvec(&primal);
    let mut err2 = 0.0;
    for e in 0..ne {
        let exact = dual.integrate_1form_dual_edge(cx, e, star_form, quad_order);
        err2 += (mapped[e] - exact) * (mapped[e] - exact);
    }
    err2.sqrt()
}

/// Report from a degenerate-dual gate, carried by solver errors.
pub fn degenerate_dual_message(report: &DualValidationReport) -> String {
    format!(
        "{} degenerate dual edges, {} singular local blocks (first edges: {:?})",
        report.degenerate_edges.len(),
        report.singular_triangles.len(),
        report.degenerate_edges.iter().take(5).collect::<Vec<_>>()
    )
}
