//! Stream-function solvers for incompressible Navier-Stokes and the
//! Boussinesq anisothermal system.
//!
//! The stream function lives on primal vertices; applying the exterior
//! derivative to the momentum equation eliminates the pressure, and every term
//! is balanced as a 2-form over dual cells. Velocity is the dual 1-cochain of
//! `star d psi`, so the discrete divergence `d d psi` vanishes identically.
//!
//! At walls, the dual cells of boundary vertices close through the boundary;
//! the missing circulation along those wall segments is exactly the integral
//! of the prescribed tangential boundary velocity, which supplies the wall
//! vorticity (the classical stream-function/vorticity closure).

use thiserror::Error;

use crate::cochain::Cochain;
use crate::complex::{Carrier, SimplicialComplex2};
use crate::dual::DualMesh;
use crate::exact::FluidParams;
use crate::geometry::Vec2;
use crate::hodge::HodgeOperators;
use crate::linsolve::{SolveError, SparseLu};
use crate::quadrature::integrate_vector_tangential;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("singular time-step system: {0}")]
    SingularSystem(#[from] SolveError),
    #[error("solution diverged (non-finite values) at step {0}")]
    NonFinite(usize),
    #[error("time step and tolerance must be positive")]
    BadConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvectionScheme {
    Centered,
    Upwind,
}

impl ConvectionScheme {
    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "centered" => Some(ConvectionScheme::Centered),
            "upwind" => Some(ConvectionScheme::Upwind),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    /// Time step; `None` picks `0.25 dx_mean^2 / max(nu, kappa)`.
    pub dt: Option<f64>,
    pub max_steps: usize,
    /// Relative steady-state threshold on `max|dpsi| / (dt max|psi|)`.
    pub steady_tol: f64,
    pub convection_scheme: ConvectionScheme,
    pub quad_order: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: None,
            max_steps: 200_000,
            steady_tol: 1e-8,
            convection_scheme: ConvectionScheme::Centered,
            quad_order: 5,
        }
    }
}

impl SolverConfig {
    pub fn default_dt(mesh_dx: f64, params: &FluidParams) -> f64 {
        0.25 * mesh_dx * mesh_dx / params.nu.max(params.kappa).max(1e-12)
    }
}

/// Dirichlet samplers; velocity feeds the wall-vorticity closure.
pub struct BoundaryData<'a> {
    pub psi: &'a dyn Fn(Vec2, f64) -> f64,
    pub theta: Option<&'a dyn Fn(Vec2, f64) -> f64>,
    pub velocity: &'a dyn Fn(Vec2, f64) -> Vec2,
}

pub struct FlowProblem<'a> {
    pub bc: BoundaryData<'a>,
    /// Optional body force in the momentum equation.
    pub body_force: Option<&'a dyn Fn(Vec2, f64) -> Vec2>,
}

#[derive(Debug)]
pub struct FlowResult {
    pub psi: Cochain,
    pub theta: Option<Cochain>,
    pub steps: usize,
    pub residual_history: Vec<f64>,
}

/// Vorticity operator `d_dual . H1 . d0`: primal-vertex stream function to
/// the 2-form integral over dual cells. Rows of interior vertices annihilate
/// constants and, by constant-form exactness of H1, all affine fields.
pub fn assemble_stream_laplacian(
    cx: &SimplicialComplex2,
    hodge: &HodgeOperators,
) -> SparseMatrix {
    let d0 = cx.exterior_derivative(0, Carrier::Primal);
    let dd1 = cx.exterior_derivative(1, Carrier::Dual);
    dd1.matmul(&hodge.h1).unwrap().matmul(&d0).unwrap()
}

/// Precomputed geometry and operators for the time stepper.
pub struct StreamOperators<'m> {
    cx: &'m SimplicialComplex2,
    dual: &'m DualMesh,
    /// `B1 H1 d0`: dual-cell integrals of `d omega` from psi (interior rows).
    a_mat: SparseMatrix,
    /// `A diag(1/|v*|) A`, the viscous chain.
    visc: SparseMatrix,
    inv_dual_area: Vec<f64>,
    /// Interpolation weights of each triangle center in its vertex values.
    center_weights: Vec<[f64; 3]>,
    /// y-extent of the full dual edge, for the buoyancy term.
    dual_y: Vec<f64>,
    /// Wall half segments (from, to, owning vertex) in boundary-ccw direction.
    wall_segments: Vec<(Vec2, Vec2, usize)>,
    boundary_vertices: Vec<usize>,
    quad_order: usize,
}

impl<'m> StreamOperators<'m> {
    pub fn build(
        cx: &'m SimplicialComplex2,
        dual: &'m DualMesh,
        hodge: &HodgeOperators,
        quad_order: usize,
    ) -> Self {
        let d0 = cx.exterior_derivative(0, Carrier::Primal);
        let b1h1 = cx.boundary1.matmul(&hodge.h1).unwrap();
        let a_mat = b1h1.matmul(&d0).unwrap();
        let inv_dual_area: Vec<f64> = dual.dual_cell_areas.iter().map(|&a| 1.0 / a).collect();
        let visc = a_mat
            .matmul(&SparseMatrix::from_diagonal(&inv_dual_area).matmul(&a_mat).unwrap())
            .unwrap();

        let mut center_weights = Vec::with_capacity(cx.num_triangles());
        for t in 0..cx.num_triangles() {
            let [p0, p1, p2] = cx.triangle_points(t);
            let c = dual.triangle_centers[t];
            // barycentric coordinates of the center
            let det = (p1 - p0).cross(p2 - p0);
            let w1 = (c - p0).cross(p2 - p0) / det;
            let w2 = (p1 - p0).cross(c - p0) / det;
            center_weights.push([1.0 - w1 - w2, w1, w2]);
        }

        let dual_y: Vec<f64> = dual.dual_edge_vectors.iter().map(|v| v.y).collect();

        // wall half segments in the direction that keeps the domain on the left
        let mut wall_segments = Vec::new();
        for (e, flag) in cx.boundary_edge_flags.iter().enumerate() {
            if !*flag {
                continue;
            }
            let (_, sign) = cx.edge_triangles[e][0].unwrap();
            let [tail, head] = cx.edges[e];
            let (from, to) = if sign > 0 { (tail, head) } else { (head, tail) };
            let pf = cx.vertex_coords[from];
            let pt = cx.vertex_coords[to];
            let mid = dual.edge_centers[e];
            wall_segments.push((pf, mid, from));
            wall_segments.push((mid, pt, to));
        }
        let boundary_vertices: Vec<usize> = (0..cx.num_vertices())
            .filter(|&v| cx.boundary_vertex_flags[v])
            .collect();

        Self {
            cx,
            dual,
            a_mat,
            visc,
            inv_dual_area,
            center_weights,
            dual_y,
            wall_segments,
            boundary_vertices,
            quad_order,
        }
    }

    pub fn vorticity_chain(&self) -> &SparseMatrix {
        &self.a_mat
    }

    /// Mass flux across each dual edge: difference of the interpolated stream
    /// function between the dual edge's endpoints (triangle centers, or the
    /// edge center on the boundary). Telescopes to zero around interior cells.
    pub fn dual_flux(&self, psi: &[f64]) -> Vec<f64> {
        let cx = self.cx;
        let mut q = vec![0.0; cx.num_edges()];
        for t in 0..cx.num_triangles() {
            let tri = cx.triangles[t];
            let w = self.center_weights[t];
            let psi_c = w[0] * psi[tri[0]] + w[1] * psi[tri[1]] + w[2] * psi[tri[2]];
            for &(e, sign) in &cx.edge_of_triangle[t] {
                let [a, b] = cx.edges[e];
                let psi_e = 0.5 * (psi[a] + psi[b]);
                q[e] += sign as f64 * (psi_c - psi_e);
            }
        }
        q
    }

    /// Circulation of the prescribed boundary velocity along the wall pieces
    /// of each boundary dual cell; zero at interior vertices.
    pub fn wall_circulation(&self, velocity: &dyn Fn(Vec2, f64) -> Vec2, t: f64) -> Vec<f64> {
        let mut u = vec![0.0; self.cx.num_vertices()];
        let sampler = |p: Vec2| velocity(p, t);
        for &(from, to, v) in &self.wall_segments {
            u[v] += integrate_vector_tangential(&sampler, from, to, self.quad_order);
        }
        u
    }

    /// Pointwise vorticity at vertices from the chain plus wall closure.
    pub fn vorticity(&self, psi: &[f64], wall: &[f64]) -> Vec<f64> {
        let mut w = self.a_mat.matvec(psi);
        for v in 0..w.len() {
            w[v] = (w[v] + wall[v]) * self.inv_dual_area[v];
        }
        w
    }

    /// `d(iota_u d omega)` over dual cells: flux times an edge-averaged (or
    /// upwinded) vorticity, closed by the dual derivative.
    pub fn convection(&self, w: &[f64], flux: &[f64], scheme: ConvectionScheme) -> Vec<f64> {
        let cx = self.cx;
        let mut f = vec![0.0; cx.num_edges()];
        for (e, &[a, b]) in cx.edges.iter().enumerate() {
            let advected = match scheme {
                ConvectionScheme::Centered => 0.5 * (w[a] + w[b]),
                ConvectionScheme::Upwind => {
                    if flux[e] > 0.0 {
                        w[a]
                    } else if flux[e] < 0.0 {
                        w[b]
                    } else {
                        0.5 * (w[a] + w[b])
                    }
                }
            };
            f[e] = flux[e] * advected;
        }
        neg_b1(cx, &f)
    }

    /// `d(theta dy)` over dual cells: theta averaged onto dual edges times the
    /// dual edge's y-extent, then the dual derivative.
    pub fn buoyancy(&self, theta: &[f64]) -> Vec<f64> {
        let cx = self.cx;
        let mut f = vec![0.0; cx.num_edges()];
        for (e, &[a, b]) in cx.edges.iter().enumerate() {
            f[e] = 0.5 * (theta[a] + theta[b]) * self.dual_y[e];
        }
        neg_b1(cx, &f)
    }

    /// Advection of theta: `star d star(theta omega)` at vertices.
    pub fn theta_advection(
        &self,
        theta: &[f64],
        flux: &[f64],
        scheme: ConvectionScheme,
    ) -> Vec<f64> {
        let cx = self.cx;
        let mut f = vec![0.0; cx.num_edges()];
        for (e, &[a, b]) in cx.edges.iter().enumerate() {
            let adv = match scheme {
                ConvectionScheme::Centered => 0.5 * (theta[a] + theta[b]),
                ConvectionScheme::Upwind => {
                    if flux[e] > 0.0 {
                        theta[a]
                    } else if flux[e] < 0.0 {
                        theta[b]
                    } else {
                        0.5 * (theta[a] + theta[b])
                    }
                }
            };
            f[e] = flux[e] * adv;
        }
        let mut cells = neg_b1(cx, &f);
        for v in 0..cells.len() {
            cells[v] *= self.inv_dual_area[v];
        }
        cells
    }

    /// Dual-cell integrals of `d(f-flat)` for a body force.
    pub fn force_cells(&self, force: &dyn Fn(Vec2, f64) -> Vec2, t: f64) -> Vec<f64> {
        let cx = self.cx;
        let sampler = |p: Vec2| force(p, t);
        let mut f = vec![0.0; cx.num_edges()];
        for e in 0..cx.num_edges() {
            f[e] = self
                .dual
                .integrate_1form_dual_edge(cx, e, &sampler, self.quad_order);
        }
        neg_b1(cx, &f)
    }
}

/// Dual exterior derivative on dual 1-cochains (`-boundary1` applied).
fn neg_b1(cx: &SimplicialComplex2, edge_vals: &[f64]) -> Vec<f64> {
    let mut out = cx.boundary1.matvec(edge_vals);
    out.iter_mut().for_each(|v| *v = -*v);
    out
}

enum MarchMode {
    ToSteadyState,
    FixedTime(f64),
}

struct March<'m> {
    ops: StreamOperators<'m>,
    params: FluidParams,
    config: SolverConfig,
    dt: f64,
}

impl<'m> March<'m> {
    fn new(
        cx: &'m SimplicialComplex2,
        dual: &'m DualMesh,
        hodge: &HodgeOperators,
        params: FluidParams,
        config: SolverConfig,
        mode: &MarchMode,
    ) -> Result<(Self, usize), FlowError> {
        let stats = cx.mesh_stats();
        let mut dt = config
            .dt
            .unwrap_or_else(|| SolverConfig::default_dt(stats.mean_edge_length, &params));
        if !(dt > 0.0) || !(config.steady_tol > 0.0) {
            return Err(FlowError::BadConfig);
        }
        let steps = match mode {
            MarchMode::ToSteadyState => config.max_steps,
            MarchMode::FixedTime(t_end) => {
                let n = (t_end / dt).ceil().max(1.0) as usize;
                dt = t_end / n as f64;
                n
            }
        };
        let ops = StreamOperators::build(cx, dual, hodge, config.quad_order);
        Ok((
            Self {
                ops,
                params,
                config,
                dt,
            },
            steps,
        ))
    }

    fn momentum_matrix(&self) -> SparseMatrix {
        let a = &self.ops.a_mat;
        let mut m = a.scale(1.0 / self.dt).add(&self.ops.visc.scale(self.params.nu)).unwrap();
        m = replace_rows_with_identity(&m, &self.ops.boundary_vertices);
        m
    }

    fn theta_matrix(&self) -> SparseMatrix {
        let n = self.ops.cx.num_vertices();
        let scaled = self
            .ops
            .a_mat
            .scale_rows(&self.ops.inv_dual_area)
            .scale(self.dt * self.params.kappa);
        let m = SparseMatrix::identity(n).add(&scaled).unwrap();
        replace_rows_with_identity(&m, &self.ops.boundary_vertices)
    }
}

fn replace_rows_with_identity(m: &SparseMatrix, rows: &[usize]) -> SparseMatrix {
    let mask: std::collections::HashSet<usize> = rows.iter().copied().collect();
    let mut triplets: Vec<(usize, usize, f64)> = m
        .iter()
        .filter(|(r, _, _)| !mask.contains(r))
        .collect();
    for &r in rows {
        triplets.push((r, r, 1.0));
    }
    SparseMatrix::from_triplets(m.nrows(), m.ncols(), &triplets).unwrap()
}

/// March the isothermal Navier-Stokes system to steady state.
pub fn solve_navier_stokes(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    hodge: &HodgeOperators,
    params: FluidParams,
    problem: &FlowProblem,
    psi0: Option<&[f64]>,
    config: SolverConfig,
) -> Result<FlowResult, FlowError> {
    march(
        cx,
        dual,
        hodge,
        params,
        problem,
        psi0,
        None,
        config,
        MarchMode::ToSteadyState,
    )
}

/// March the Boussinesq system with a fixed step up to `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn solve_boussinesq(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    hodge: &HodgeOperators,
    params: FluidParams,
    problem: &FlowProblem,
    psi0: Option<&[f64]>,
    theta0: Option<&[f64]>,
    t_end: f64,
    config: SolverConfig,
) -> Result<FlowResult, FlowError> {
    march(
        cx,
        dual,
        hodge,
        params,
        problem,
        psi0,
        Some(theta0.map(<[f64]>::to_vec).unwrap_or_default()),
        config,
        MarchMode::FixedTime(t_end),
    )
}

#[allow(clippy::too_many_arguments)]
fn march(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    hodge: &HodgeOperators,
    params: FluidParams,
    problem: &FlowProblem,
    psi0: Option<&[f64]>,
    theta0: Option<Vec<f64>>,
    config: SolverConfig,
    mode: MarchMode,
) -> Result<FlowResult, FlowError> {
    let (m, max_steps) = March::new(cx, dual, hodge, params, config, &mode)?;
    let nv = cx.num_vertices();
    let with_theta = theta0.is_some() || problem.bc.theta.is_some();

    let mpsi = m.momentum_matrix();
    let psi_lu = SparseLu::factor(&mpsi)?;
    let (mth_lu, mut theta) = if with_theta {
        let lu = SparseLu::factor(&m.theta_matrix())?;
        let mut th = theta0.unwrap_or_default();
        if th.is_empty() {
            th = vec![0.0; nv];
        }
        (Some(lu), th)
    } else {
        (None, vec![0.0; nv])
    };

    let mut psi: Vec<f64> = match psi0 {
        Some(v) => v.to_vec(),
        None => vec![0.0; nv],
    };
    // boundary values at t = 0
    for &v in &m.ops.boundary_vertices {
        psi[v] = (problem.bc.psi)(cx.vertex_coords[v], 0.0);
        if let Some(gth) = problem.bc.theta {
            theta[v] = gth(cx.vertex_coords[v], 0.0);
        }
    }

    let dt = m.dt;
    let scheme = m.config.convection_scheme;
    let mut history = Vec::new();
    let mut steps_taken = 0;

    for step in 0..max_steps {
        let t1 = (step + 1) as f64 * dt;
        let wall_now = m
            .ops
            .wall_circulation(problem.bc.velocity, step as f64 * dt);
        let flux = m.ops.dual_flux(&psi);

        if let Some(mth_lu) = &mth_lu {
            let adv = m.ops.theta_advection(&theta, &flux, scheme);
            let mut rth: Vec<f64> = theta
                .iter()
                .zip(&adv)
                .map(|(&th, &a)| th - dt * a)
                .collect();
            if let Some(gth) = problem.bc.theta {
                for &v in &m.ops.boundary_vertices {
                    rth[v] = gth(cx.vertex_coords[v], t1);
                }
            }
            theta = mth_lu.solve(&rth);
        }

        let w = m.ops.vorticity(&psi, &wall_now);
        let conv = m.ops.convection(&w, &flux, scheme);
        let buoy = if with_theta && params.beta != 0.0 {
            m.ops.buoyancy(&theta)
        } else {
            vec![0.0; nv]
        };
        let wall_next = m.ops.wall_circulation(problem.bc.velocity, t1);
        let mut visc_wall: Vec<f64> = wall_next
            .iter()
            .zip(&m.ops.inv_dual_area)
            .map(|(&u, &ia)| u * ia)
            .collect();
        visc_wall = m.ops.a_mat.matvec(&visc_wall);
        let force = match problem.body_force {
            Some(f) => m.ops.force_cells(f, t1),
            None => vec![0.0; nv],
        };

        let a_psi = m.ops.a_mat.matvec(&psi);
        let mut rhs = vec![0.0; nv];
        let bg = params.beta * params.g;
        for v in 0..nv {
            rhs[v] = a_psi[v] / dt - conv[v] - bg * buoy[v] - params.nu * visc_wall[v] + force[v];
        }
        for &v in &m.ops.boundary_vertices {
            rhs[v] = (problem.bc.psi)(cx.vertex_coords[v], t1);
        }
        let psi_next = psi_lu.solve(&rhs);
        if psi_next.iter().any(|v| !v.is_finite()) || theta.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::NonFinite(step));
        }

        let max_dpsi = psi
            .iter()
            .zip(&psi_next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        let max_psi = psi_next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let residual = max_dpsi / (dt * max_psi.max(1e-300));
        history.push(residual);
        psi = psi_next;
        steps_taken = step + 1;

        if matches!(mode, MarchMode::ToSteadyState) && residual < m.config.steady_tol {
            break;
        }
    }

    Ok(FlowResult {
        psi: Cochain {
            degree: 0,
            carrier: Carrier::Primal,
            values: psi,
        },
        theta: with_theta.then(|| Cochain {
            degree: 0,
            carrier: Carrier::Primal,
            values: theta,
        }),
        steps: steps_taken,
        residual_history: history,
    })
}

/// Per-triangle constant vector matching the edge fluxes `<d0 psi, e>` in
/// least squares (the 90-degree-rotated gradient of the linear interpolant).
pub fn reconstruct_velocity_per_triangle(cx: &SimplicialComplex2, psi: &[f64]) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(cx.num_triangles());
    for t in 0..cx.num_triangles() {
        // rows u x e_i = q_i, i.e. (e_y, -e_x) . u = q
        let mut m00 = 0.0;
        let mut m01 = 0.0;
        let mut m11 = 0.0;
        let mut r0 = 0.0;
        let mut r1 = 0.0;
        for &(e, _) in &cx.edge_of_triangle[t] {
            let ev = cx.edge_vector(e);
            let [a, b] = cx.edges[e];
            let q = psi[b] - psi[a];
            m00 += ev.y * ev.y;
            m01 += -ev.y * ev.x;
            m11 += ev.x * ev.x;
            r0 += ev.y * q;
            r1 += -ev.x * q;
        }
        let det = m00 * m11 - m01 * m01;
        out.push(Vec2::new(
            (r0 * m11 - r1 * m01) / det,
            (m00 * r1 - m01 * r0) / det,
        ));
    }
    out
}

/// Per-vertex constant vector fitted to the dual-edge circulations of
/// `star d psi = H1 d0 psi`: for a constant field, the circulation along a
/// dual edge is `-u . e*`, so each incident dual edge contributes one row.
pub fn reconstruct_velocity_dual(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    hodge: &HodgeOperators,
    psi: &[f64],
) -> Vec<Vec2> {
    let d0 = cx.exterior_derivative(0, Carrier::Primal);
    let star_dpsi = hodge.h1.matvec(&d0.matvec(psi));
    let nv = cx.num_vertices();
    let mut m00 = vec![0.0; nv];
    let mut m01 = vec![0.0; nv];
    let mut m11 = vec![0.0; nv];
    let mut r0 = vec![0.0; nv];
    let mut r1 = vec![0.0; nv];
    for (e, &[a, b]) in cx.edges.iter().enumerate() {
        let d = dual.dual_edge_vectors[e];
        for v in [a, b] {
            m00[v] += d.x * d.x;
            m01[v] += d.x * d.y;
            m11[v] += d.y * d.y;
            r0[v] += -d.x * star_dpsi[e];
            r1[v] += -d.y * star_dpsi[e];
        }
    }
    (0..nv)
        .map(|v| {
            let det = m00[v] * m11[v] - m01[v] * m01[v];
            Vec2::new(
                (r0[v] * m11[v] - r1[v] * m01[v]) / det,
                (m00[v] * r1[v] - m01[v] * r0[v]) / det,
            )
        })
        .collect()
}

/// First-order velocity reconstruction from the stream function: the
/// per-triangle constants averaged onto vertices with area weights.
pub fn reconstruct_velocity(cx: &SimplicialComplex2, psi: &[f64]) -> Vec<Vec2> {
    let nv = cx.num_vertices();
    let per_tri = reconstruct_velocity_per_triangle(cx, psi);
    let mut acc = vec![Vec2::default(); nv];
    let mut wsum = vec![0.0; nv];
    for (t, &u) in per_tri.iter().enumerate() {
        let area = cx.triangle_area(t);
        for &v in &cx.triangles[t] {
            acc[v] = acc[v] + u * area;
            wsum[v] += area;
        }
    }
    for v in 0..nv {
        acc[v] = acc[v] / wsum[v];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{build_dual, CenterStrategy};
    use crate::exact::Rect;
    use crate::meshgen::gen_right_mesh;

    fn setup(
        n: usize,
        domain: Rect,
    ) -> (SimplicialComplex2, DualMesh, HodgeOperators) {
        let cx = gen_right_mesh(n, domain).unwrap();
        let dual = build_dual(&cx, &CenterStrategy::Barycentric).unwrap();
        let hodge = HodgeOperators::build(&cx, &dual).unwrap();
        (cx, dual, hodge)
    }

    #[test]
    fn stream_laplacian_annihilates_constants_and_interior_linears() {
        let (cx, _dual, hodge) = setup(7, Rect::UNIT);
        let l = assemble_stream_laplacian(&cx, &hodge);
        let ones = vec![1.0; cx.num_vertices()];
        for v in l.matvec(&ones) {
            assert!(v.abs() < 1e-12);
        }
        let linear: Vec<f64> = cx.vertex_coords.iter().map(|p| 2.0 * p.x - 0.7 * p.y).collect();
        let lv = l.matvec(&linear);
        for (v, val) in lv.iter().enumerate() {
            if !cx.boundary_vertex_flags[v] {
                assert!(val.abs() < 1e-12, "vertex {v}: {val}");
            }
        }
        // row sums vanish (constant nullspace)
        for v in 0..cx.num_vertices() {
            let sum: f64 = l.row(v).map(|(_, x)| x).sum();
            assert!(sum.abs() < 1e-12);
        }
    }

    #[test]
    fn dual_flux_telescopes_on_interior_cells() {
        let (cx, dual, hodge) = setup(6, Rect::UNIT);
        let ops = StreamOperators::build(&cx, &dual, &hodge, 5);
        let psi: Vec<f64> = cx.vertex_coords.iter().map(|p| p.x * p.x - p.y).collect();
        let q = ops.dual_flux(&psi);
        let cells = neg_b1(&cx, &q);
        for (v, val) in cells.iter().enumerate() {
            if !cx.boundary_vertex_flags[v] {
                assert!(val.abs() < 1e-13, "vertex {v}: {val}");
            }
        }
    }

    #[test]
    fn convection_vanishes_for_constant_psi_and_constant_vorticity() {
        let (cx, dual, hodge) = setup(6, Rect::UNIT);
        let ops = StreamOperators::build(&cx, &dual, &hodge, 5);
        // constant psi: no flow at all
        let psi = vec![4.0; cx.num_vertices()];
        let q = ops.dual_flux(&psi);
        assert!(q.iter().all(|&v| v.abs() < 1e-14));
        // solid rotation: constant vorticity advected by divergence-free flux
        let psi2: Vec<f64> = cx
            .vertex_coords
            .iter()
            .map(|p| 0.25 * (p.x * p.x + p.y * p.y))
            .collect();
        let q2 = ops.dual_flux(&psi2);
        let w = vec![1.0; cx.num_vertices()];
        let conv = ops.convection(&w, &q2, ConvectionScheme::Centered);
        for (v, val) in conv.iter().enumerate() {
            if !cx.boundary_vertex_flags[v] {
                assert!(val.abs() < 1e-13, "vertex {v}: {val}");
            }
        }
    }

    #[test]
    fn convection_is_quadratic_in_psi() {
        let (cx, dual, hodge) = setup(5, Rect::UNIT);
        let ops = StreamOperators::build(&cx, &dual, &hodge, 5);
        let psi: Vec<f64> = cx
            .vertex_coords
            .iter()
            .map(|p| (3.1 * p.x).sin() * (2.3 * p.y).cos())
            .collect();
        let wall = vec![0.0; cx.num_vertices()];
        let term = |psi: &[f64]| {
            let q = ops.dual_flux(psi);
            let w = ops.vorticity(psi, &wall);
            ops.convection(&w, &q, ConvectionScheme::Centered)
        };
        let plus = term(&psi);
        let negated: Vec<f64> = psi.iter().map(|v| -v).collect();
        let minus = term(&negated);
        for (a, b) in plus.iter().zip(&minus) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rest_state_stays_at_rest() {
        // beta = 0, constant theta, zero psi boundary: nothing moves
        let (cx, dual, hodge) = setup(5, Rect::UNIT);
        let params = FluidParams {
            rho: 1.0,
            nu: 0.5,
            kappa: 0.1,
            beta: 0.0,
            g: 10.0,
        };
        let psi_bc = |_: Vec2, _: f64| 0.0;
        let th_bc = |_: Vec2, _: f64| 2.5;
        let u_bc = |_: Vec2, _: f64| Vec2::default();
        let problem = FlowProblem {
            bc: BoundaryData {
                psi: &psi_bc,
                theta: Some(&th_bc),
                velocity: &u_bc,
            },
            body_force: None,
        };
        let theta0 = vec![2.5; cx.num_vertices()];
        let out = solve_boussinesq(
            &cx,
            &dual,
            &hodge,
            params,
            &problem,
            None,
            Some(&theta0),
            0.05,
            SolverConfig::default(),
        )
        .unwrap();
        for &v in &out.psi.values {
            assert!(v.abs() < 1e-10);
        }
        for &v in &out.theta.unwrap().values {
            assert!((v - 2.5).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_flow_reconstructs_exactly() {
        let (cx, _dual, _hodge) = setup(4, Rect::UNIT);
        // psi = y -> u = (1, 0)
        let psi: Vec<f64> = cx.vertex_coords.iter().map(|p| p.y).collect();
        for u in reconstruct_velocity(&cx, &psi) {
            assert!((u.x - 1.0).abs() < 1e-13 && u.y.abs() < 1e-13);
        }
        // psi = -x -> u = (0, 1) by u = (dpsi/dy, -dpsi/dx)
        let psi2: Vec<f64> = cx.vertex_coords.iter().map(|p| -p.x).collect();
        for u in reconstruct_velocity(&cx, &psi2) {
            assert!(u.x.abs() < 1e-13 && (u.y - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn deterministic_residual_history() {
        let (cx, dual, hodge) = setup(5, Rect::UNIT);
        let params = FluidParams {
            rho: 1.0,
            nu: 1.0,
            kappa: 0.0,
            beta: 0.0,
            g: 0.0,
        };
        let psi_bc = |p: Vec2, _: f64| 2.0 * p.y * p.y - 4.0 * p.y * p.y * p.y / 3.0;
        let u_bc = |p: Vec2, _: f64| Vec2::new(4.0 * p.y * (1.0 - p.y), 0.0);
        let problem = FlowProblem {
            bc: BoundaryData {
                psi: &psi_bc,
                theta: None,
                velocity: &u_bc,
            },
            body_force: None,
        };
        let config = SolverConfig {
            dt: Some(0.05),
            max_steps: 40,
            ..SolverConfig::default()
        };
        let r1 = solve_navier_stokes(&cx, &dual, &hodge, params, &problem, None, config).unwrap();
        let r2 = solve_navier_stokes(&cx, &dual, &hodge, params, &problem, None, config).unwrap();
        assert_eq!(r1.residual_history.len(), r2.residual_history.len());
        for (a, b) in r1.residual_history.iter().zip(&r2.residual_history) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in r1.psi.values.iter().zip(&r2.psi.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
