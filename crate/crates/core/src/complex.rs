//! Oriented 2D simplicial complexes with boundary and exterior derivative operators.
//!
//! Triangles are stored counterclockwise. Edges carry a canonical orientation
//! (tail = smaller vertex index) and are indexed in first-discovery order over
//! the triangle list, so assembly is deterministic for a given input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{signed_area2, triangle_angles, triangle_area, Vec2};
use crate::sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("triangle {triangle} references vertex {vertex} out of range {nverts}")]
    VertexIndexOutOfRange {
        triangle: usize,
        vertex: usize,
        nverts: usize,
    },
    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("duplicate triangle {0}")]
    DuplicateTriangle(usize),
    #[error("triangle {0} is degenerate (area below tolerance)")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("mesh file parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which complex a cochain or derivative lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Carrier {
    Primal,
    Dual,
}

/// An oriented triangle mesh with its incidence structure.
#[derive(Clone, Debug)]
pub struct SimplicialComplex2 {
    pub vertex_coords: Vec<Vec2>,
    /// Canonically oriented edges, tail index < head index.
    pub edges: Vec<[usize; 2]>,
    /// Counterclockwise triangles.
    pub triangles: Vec<[usize; 3]>,
    /// Per triangle: the three edges in local order (v0v1, v1v2, v2v0) with the
    /// relative sign of the traversal against the canonical edge orientation.
    pub edge_of_triangle: Vec<[(usize, i8); 3]>,
    /// Per edge: up to two incident (triangle, sign) pairs.
    pub edge_triangles: Vec<[Option<(usize, i8)>; 2]>,
    /// V x E signed incidence matrix (restriction of the boundary operator to 1-chains).
    pub boundary1: SparseMatrix,
    /// E x F signed incidence matrix (restriction to 2-chains).
    pub boundary2: SparseMatrix,
    pub boundary_vertex_flags: Vec<bool>,
    pub boundary_edge_flags: Vec<bool>,
}

/// Summary statistics used by the convergence harness.
#[derive(Clone, Copy, Debug)]
pub struct MeshStats {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_triangles: usize,
    pub mean_edge_length: f64,
    pub min_area: f64,
    pub max_area: f64,
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
}

/// Relative area tolerance for degenerate-triangle rejection.
const DEGENERACY_TOL: f64 = 1e-14;

pub fn build_complex(
    vertex_coords: Vec<Vec2>,
    triangle_vertex_triples: &[[usize; 3]],
) -> Result<SimplicialComplex2, MeshError> {
    let nv = vertex_coords.len();
    if nv < 3 {
        return Err(MeshError::TooFewVertices(nv));
    }
    // scale-invariant degeneracy guard: |area| < tol * (bbox diagonal)^2
    let (mut lo, mut hi) = (vertex_coords[0], vertex_coords[0]);
    for &p in &vertex_coords {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let diag2 = (hi - lo).norm_squared();
    let area_tol = DEGENERACY_TOL * diag2;

    let mut triangles = Vec::with_capacity(triangle_vertex_triples.len());
    let mut seen = std::collections::HashSet::new();
    for (t, tri) in triangle_vertex_triples.iter().enumerate() {
        for &v in tri {
            if v >= nv {
                return Err(MeshError::VertexIndexOutOfRange {
                    triangle: t,
                    vertex: v,
                    nverts: nv,
                });
            }
        }
        let [a, b, c] = *tri;
        if a == b || b == c || a == c {
            return Err(MeshError::RepeatedVertex(t));
        }
        let mut key = *tri;
        key.sort_unstable();
        if !seen.insert(key) {
            return Err(MeshError::DuplicateTriangle(t));
        }
        let area2 = signed_area2(vertex_coords[a], vertex_coords[b], vertex_coords[c]);
        if area2.abs() < 2.0 * area_tol {
            return Err(MeshError::DegenerateTriangle(t));
        }
        // enforce counterclockwise orientation
        triangles.push(if area2 > 0.0 { [a, b, c] } else { [a, c, b] });
    }

    let mut edge_index = std::collections::HashMap::new();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    let mut edge_of_triangle = Vec::with_capacity(triangles.len());
    let mut edge_triangles: Vec<[Option<(usize, i8)>; 2]> = Vec::new();
    for (t, &[a, b, c]) in triangles.iter().enumerate() {
        let mut local = [(0usize, 0i8); 3];
        for (k, (u, v)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
            let key = [u.min(v), u.max(v)];
            let eid = *edge_index.entry(key).or_insert_with(|| {
                edges.push(key);
                edge_triangles.push([None, None]);
                edges.len() - 1
            });
            let sign: i8 = if u < v { 1 } else { -1 };
            local[k] = (eid, sign);
            let slot = &mut edge_triangles[eid];
            if slot[0].is_none() {
                slot[0] = Some((t, sign));
            } else if slot[1].is_none() {
                slot[1] = Some((t, sign));
            } else {
                return Err(MeshError::NonManifoldEdge(key[0], key[1]));
            }
        }
        edge_of_triangle.push(local);
    }

    let ne = edges.len();
    let nf = triangles.len();
    let mut b1 = Vec::with_capacity(2 * ne);
    for (e, &[tail, head]) in edges.iter().enumerate() {
        b1.push((tail, e, -1.0));
        b1.push((head, e, 1.0));
    }
    let boundary1 = SparseMatrix::from_triplets(nv, ne, &b1).unwrap();
    let mut b2 = Vec::with_capacity(3 * nf);
    for (t, local) in edge_of_triangle.iter().enumerate() {
        for &(e, s) in local {
            b2.push((e, t, s as f64));
        }
    }
    let boundary2 = SparseMatrix::from_triplets(ne, nf, &b2).unwrap();

    let boundary_edge_flags: Vec<bool> = edge_triangles.iter().map(|s| s[1].is_none()).collect();
    let mut boundary_vertex_flags = vec![false; nv];
    for (e, flag) in boundary_edge_flags.iter().enumerate() {
        if *flag {
            boundary_vertex_flags[edges[e][0]] = true;
            boundary_vertex_flags[edges[e][1]] = true;
        }
    }

    Ok(SimplicialComplex2 {
        vertex_coords,
        edges,
        triangles,
        edge_of_triangle,
        edge_triangles,
        boundary1,
        boundary2,
        boundary_vertex_flags,
        boundary_edge_flags,
    })
}

impl SimplicialComplex2 {
    pub fn num_vertices(&self) -> usize {
        self.vertex_coords.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertex_coords[a],
            self.vertex_coords[b],
            self.vertex_coords[c],
        ]
    }

    pub fn edge_vector(&self, e: usize) -> Vec2 {
        let [tail, head] = self.edges[e];
        self.vertex_coords[head] - self.vertex_coords[tail]
    }

    pub fn edge_midpoint(&self, e: usize) -> Vec2 {
        let [tail, head] = self.edges[e];
        self.vertex_coords[tail].midpoint(self.vertex_coords[head])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [p, q, r] = self.triangle_points(t);
        triangle_area(p, q, r)
    }

    /// Discrete exterior derivative as a matrix.
    ///
    /// Primal: `d0 = boundary1^T`, `d1 = boundary2^T`. Dual derivatives follow
    /// the convention `dual d_k = (-1)^k * (primal d_{1-k})^T`, which makes the
    /// Stokes pairing hold on the dual complex with dual edges oriented as the
    /// +90-degree rotation of their primal edges.
    pub fn exterior_derivative(&self, degree: u8, carrier: Carrier) -> SparseMatrix {
        match (carrier, degree) {
            (Carrier::Primal, 0) => self.boundary1.transpose(),
            (Carrier::Primal, 1) => self.boundary2.transpose(),
            (Carrier::Dual, 0) => self.boundary2.clone(),
            (Carrier::Dual, 1) => self.boundary1.scale(-1.0),
            _ => panic!("exterior derivative degree must be 0 or 1"),
        }
    }

    pub fn mesh_stats(&self) -> MeshStats {
        let mut total_len = 0.0;
        for e in 0..self.num_edges() {
            total_len += self.edge_vector(e).norm();
        }
        let mut min_area = f64::INFINITY;
        let mut max_area = 0.0_f64;
        let mut min_angle = f64::INFINITY;
        let mut max_angle = 0.0_f64;
        for t in 0..self.num_triangles() {
            let [p, q, r] = self.triangle_points(t);
            let a = triangle_area(p, q, r);
            min_area = min_area.min(a);
            max_area = max_area.max(a);
            for ang in triangle_angles(p, q, r) {
                min_angle = min_angle.min(ang);
                max_angle = max_angle.max(ang);
            }
        }
        MeshStats {
            num_vertices: self.num_vertices(),
            num_edges: self.num_edges(),
            num_triangles: self.num_triangles(),
            mean_edge_length: total_len / self.num_edges() as f64,
            min_area,
            max_area,
            min_angle_deg: min_angle.to_degrees(),
            max_angle_deg: max_angle.to_degrees(),
        }
    }

    /// Native text format: `V E_hint F`, then V lines `x y`, then F lines `i j k`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {} {}",
            self.num_vertices(),
            self.num_edges(),
            self.num_triangles()
        );
        for p in &self.vertex_coords {
            let _ = writeln!(s, "{:.17e} {:.17e}", p.x, p.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, MeshError> {
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| MeshError::Parse(format!("unexpected end of input reading {what}")))
        };
        let nv: usize = next("V")?
            .parse()
            .map_err(|e| MeshError::Parse(format!("vertex count: {e}")))?;
        let _e_hint: usize = next("E")?
            .parse()
            .map_err(|e| MeshError::Parse(format!("edge hint: {e}")))?;
        let nf: usize = next("F")?
            .parse()
            .map_err(|e| MeshError::Parse(format!("face count: {e}")))?;
        let mut coords = Vec::with_capacity(nv);
        for i in 0..nv {
            let x: f64 = next("x")?
                .parse()
                .map_err(|e| MeshError::Parse(format!("vertex {i} x: {e}")))?;
            let y: f64 = next("y")?
                .parse()
                .map_err(|e| MeshError::Parse(format!("vertex {i} y: {e}")))?;
            coords.push(Vec2::new(x, y));
        }
        let mut tris = Vec::with_capacity(nf);
        for t in 0..nf {
            let mut tri = [0usize; 3];
            for slot in &mut tri {
                *slot = next("triangle index")?
                    .parse()
                    .map_err(|e| MeshError::Parse(format!("triangle {t}: {e}")))?;
            }
            tris.push(tri);
        }
        build_complex(coords, &tris)
    }

    pub fn write_text_file(&self, path: &std::path::Path) -> Result<(), MeshError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_text_file(path: &std::path::Path) -> Result<Self, MeshError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_triangle() -> SimplicialComplex2 {
        build_complex(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            &[[0, 1, 2]],
        )
        .unwrap()
    }

    /// Two-triangle mesh with vertex numbering chosen so the canonical edge
    /// orientations and discovery order reproduce the reference incidence
    /// matrices exactly.
    fn two_triangle_mesh() -> SimplicialComplex2 {
        build_complex(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(2.0, 1.0),
                Vec2::new(1.0, 1.0),
            ],
            &[[0, 1, 3], [1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn two_triangle_boundary_matrices() {
        let cx = two_triangle_mesh();
        assert_eq!(cx.num_edges(), 5);
        let b2 = cx.boundary2.to_dense();
        assert_eq!(
            b2,
            vec![
                vec![1.0, 0.0],
                vec![1.0, -1.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 1.0],
            ]
        );
        // vertex 2 here plays the reference's fourth vertex and vice versa, so
        // the incidence rows for those two vertices swap places
        let b1 = cx.boundary1.to_dense();
        assert_eq!(
            b1,
            vec![
                vec![-1.0, 0.0, -1.0, 0.0, 0.0],
                vec![1.0, -1.0, 0.0, -1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0, -1.0],
                vec![0.0, 1.0, 1.0, 0.0, 1.0],
            ]
        );
    }

    #[test]
    fn boundary_composition_vanishes() {
        for cx in [single_triangle(), two_triangle_mesh()] {
            let prod = cx.boundary1.matmul(&cx.boundary2).unwrap();
            assert_eq!(prod.max_abs_entry(), 0.0);
        }
    }

    #[test]
    fn d1_d0_is_zero() {
        let cx = two_triangle_mesh();
        let d0 = cx.exterior_derivative(0, Carrier::Primal);
        let d1 = cx.exterior_derivative(1, Carrier::Primal);
        assert_eq!(d1.matmul(&d0).unwrap().max_abs_entry(), 0.0);
        // dual side as well
        let dd0 = cx.exterior_derivative(0, Carrier::Dual);
        let dd1 = cx.exterior_derivative(1, Carrier::Dual);
        assert_eq!(dd1.matmul(&dd0).unwrap().max_abs_entry(), 0.0);
    }

    #[test]
    fn d0_is_vertex_difference() {
        let cx = two_triangle_mesh();
        let d0 = cx.exterior_derivative(0, Carrier::Primal);
        let u: Vec<f64> = cx.vertex_coords.iter().map(|p| p.x + 2.0 * p.y).collect();
        let du = d0.matvec(&u);
        for (e, &[tail, head]) in cx.edges.iter().enumerate() {
            assert!((du[e] - (u[head] - u[tail])).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_is_closed() {
        let cx = single_triangle();
        let d0 = cx.exterior_derivative(0, Carrier::Primal);
        let du = d0.matvec(&[5.0, 5.0, 5.0]);
        assert!(du.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn counterclockwise_enforced() {
        let cx = build_complex(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            &[[0, 2, 1]],
        )
        .unwrap();
        assert_eq!(cx.triangles[0], [0, 1, 2]);
    }

    #[test]
    fn error_cases() {
        let pts = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(matches!(
            build_complex(pts.clone(), &[[0, 1, 5]]),
            Err(MeshError::VertexIndexOutOfRange { .. })
        ));
        assert!(matches!(
            build_complex(pts.clone(), &[[0, 1, 2], [2, 1, 0]]),
            Err(MeshError::DuplicateTriangle(1))
        ));
        let collinear = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0)];
        assert!(matches!(
            build_complex(collinear, &[[0, 1, 2]]),
            Err(MeshError::DegenerateTriangle(0))
        ));
        assert!(matches!(
            build_complex(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], &[[0, 1, 0]]),
            Err(MeshError::TooFewVertices(2))
        ));
        assert!(matches!(
            build_complex(pts, &[[0, 1, 1]]),
            Err(MeshError::RepeatedVertex(0))
        ));
    }

    #[test]
    fn nonmanifold_edge_detected() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, -1.0),
        ];
        // edge (0,1) in three triangles
        let r = build_complex(pts, &[[0, 1, 2], [0, 1, 3], [0, 1, 4]]);
        assert!(matches!(r, Err(MeshError::NonManifoldEdge(0, 1))));
    }

    #[test]
    fn boundary_flags() {
        let cx = two_triangle_mesh();
        // edge (1,3) is interior, all others boundary
        for (e, &[a, b]) in cx.edges.iter().enumerate() {
            let interior = (a, b) == (1, 3);
            assert_eq!(cx.boundary_edge_flags[e], !interior, "edge ({a},{b})");
        }
        assert!(cx.boundary_vertex_flags.iter().all(|&f| f));
    }

    #[test]
    fn stats_on_unit_right_triangle() {
        let stats = single_triangle().mesh_stats();
        let expected = (2.0 + 2.0_f64.sqrt()) / 3.0;
        assert!((stats.mean_edge_length - expected).abs() < 1e-14);
        assert!((stats.max_angle_deg - 90.0).abs() < 1e-10);
        assert!((stats.min_angle_deg - 45.0).abs() < 1e-10);
    }

    #[test]
    fn text_roundtrip() {
        let cx = two_triangle_mesh();
        let cx2 = SimplicialComplex2::from_text(&cx.to_text()).unwrap();
        assert_eq!(cx.triangles, cx2.triangles);
        assert_eq!(cx.edges, cx2.edges);
        for (p, q) in cx.vertex_coords.iter().zip(&cx2.vertex_coords) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn edge_reorientation_keeps_d1_d0_zero() {
        // flip one interior edge by hand and check the chain property survives
        let cx = two_triangle_mesh();
        let mut flipped = cx.clone();
        let e = flipped
            .boundary_edge_flags
            .iter()
            .position(|&b| !b)
            .unwrap();
        flipped.edges[e] = [cx.edges[e][1], cx.edges[e][0]];
        let negate_row = |m: &SparseMatrix, row: usize, transpose_side: bool| {
            let triplets: Vec<_> = m
                .iter()
                .map(|(r, c, v)| {
                    let hit = if transpose_side { c == row } else { r == row };
                    (r, c, if hit { -v } else { v })
                })
                .collect();
            SparseMatrix::from_triplets(m.nrows(), m.ncols(), &triplets).unwrap()
        };
        flipped.boundary1 = negate_row(&cx.boundary1, e, true);
        flipped.boundary2 = negate_row(&cx.boundary2, e, false);
        let prod = flipped.boundary1.matmul(&flipped.boundary2).unwrap();
        assert_eq!(prod.max_abs_entry(), 0.0);
    }
}
