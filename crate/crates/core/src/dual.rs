//! Cell duals of a triangle mesh built from a pluggable choice of centers.
//!
//! Dual edges are oriented as the +90-degree (counterclockwise) rotation of
//! their primal edge. Each triangle contributes the half segment between the
//! edge center and the triangle center; a half whose natural direction opposes
//! the convention carries a negative signed length.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::SimplicialComplex2;
use crate::geometry::{barycenter, circumcenter, incenter, signed_area2, Vec2};

#[derive(Debug, Error)]
pub enum DualError {
    #[error("triangle {0} is degenerate, no circumcenter")]
    DegenerateTriangle(usize),
    #[error("custom edge center for edge {0} does not lie strictly inside the edge")]
    EdgeCenterOutsideEdge(usize),
}

/// How triangle and edge centers are chosen.
#[derive(Clone)]
pub enum CenterStrategy {
    Circumcentric,
    Barycentric,
    Incentric,
    Custom {
        name: String,
        /// Triangle center from the three corner points; may lie outside.
        triangle_center: Arc<dyn Fn(usize, [Vec2; 3]) -> Vec2 + Send + Sync>,
        /// Edge center from the edge endpoints; must lie strictly inside.
        edge_center: Arc<dyn Fn(usize, Vec2, Vec2) -> Vec2 + Send + Sync>,
    },
}

impl fmt::Debug for CenterStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl CenterStrategy {
    pub fn name(&self) -> &str {
        match self {
            CenterStrategy::Circumcentric => "circumcentric",
            CenterStrategy::Barycentric => "barycentric",
            CenterStrategy::Incentric => "incentric",
            CenterStrategy::Custom { name, .. } => name,
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "circumcentric" => Some(CenterStrategy::Circumcentric),
            "barycentric" => Some(CenterStrategy::Barycentric),
            "incentric" => Some(CenterStrategy::Incentric),
            _ => None,
        }
    }

    fn triangle_center(&self, t: usize, pts: [Vec2; 3]) -> Result<Vec2, DualError> {
        match self {
            CenterStrategy::Circumcentric => {
                circumcenter(pts[0], pts[1], pts[2]).ok_or(DualError::DegenerateTriangle(t))
            }
            CenterStrategy::Barycentric => Ok(barycenter(pts[0], pts[1], pts[2])),
            CenterStrategy::Incentric => Ok(incenter(pts[0], pts[1], pts[2])),
            CenterStrategy::Custom {
                triangle_center, ..
            } => Ok(triangle_center(t, pts)),
        }
    }

    /// Built-in strategies place edge centers at midpoints.
    fn edge_center(&self, e: usize, tail: Vec2, head: Vec2) -> Result<Vec2, DualError> {
        match self {
            CenterStrategy::Custom { edge_center, .. } => {
                let c = edge_center(e, tail, head);
                let d = head - tail;
                let t = (c - tail).dot(d) / d.norm_squared();
                let off = (c - tail                ).cross(d).abs() / d.norm();
                if !(t > 1e-9 && t < 1.0 - 1e-9) || off > 1e-9 * d.norm() {
                    return Err(DualError::EdgeCenterOutsideEdge(e));
                }
                Ok(c)
            }
            _ => Ok(tail.midpoint(head)),
        }
    }
}

/// One half of a dual edge, attached to a (triangle, local edge) slot.
#[derive(Clone, Copy, Debug)]
pub struct HalfDualEdge {
    /// Vector along the dual orientation (+90 degrees from the primal edge).
    pub vector: Vec2,
    /// Length with sign: negative when the center lies on the wrong side.
    pub signed_length: f64,
}

#[derive(Clone, Debug)]
pub struct DualMesh {
    pub strategy_name: String,
    pub triangle_centers: Vec<Vec2>,
    pub edge_centers: Vec<Vec2>,
    /// Indexed `[triangle][local edge]`.
    pub half_dual_edges: Vec<[HalfDualEdge; 3]>,
    /// Full oriented dual edge vector per edge (sum of half vectors).
    pub dual_edge_vectors: Vec<Vec2>,
    /// Signed polyline length per dual edge (sum of signed half lengths).
    pub dual_edge_lengths: Vec<f64>,
    /// Area of the dual cell around each vertex, boundary cells closed
    /// through the vertex itself.
    pub dual_cell_areas: Vec<f64>,
}

/// Edges and triangles that would make a Hodge operator singular.
#[derive(Clone, Debug, Default)]
pub struct DualValidationReport {
    pub degenerate_edges: Vec<usize>,
    pub singular_triangles: Vec<usize>,
}

impl DualValidationReport {
    pub fn is_ok(&self) -> bool {
        self.degenerate_edges.is_empty() && self.singular_triangles.is_empty()
    }
}

pub fn build_dual(cx: &SimplicialComplex2, strategy: &CenterStrategy) -> Result<DualMesh, DualError> {
    let nf = cx.num_triangles();
    let ne = cx.num_edges();
    let mut triangle_centers = Vec::with_capacity(nf);
    for t in 0..nf {
        triangle_centers.push(strategy.triangle_center(t, cx.triangle_points(t))?);
    }
    let mut edge_centers = Vec::with_capacity(ne);
    for (e, &[tail, head]) in cx.edges.iter().enumerate() {
        edge_centers.push(strategy.edge_center(
            e,
            cx.vertex_coords[tail],
            cx.vertex_coords[head],
        )?);
    }

    let mut half_dual_edges = Vec::with_capacity(nf);
    let mut dual_edge_vectors = vec![Vec2::default(); ne];
    let mut dual_edge_lengths = vec![0.0; ne];
    for t in 0..nf {
        let ct = triangle_centers[t];
        let mut halves = [HalfDualEdge {
            vector: Vec2::default(),
            signed_length: 0.0,
        }; 3];
        for (k, &(e, sign)) in cx.edge_of_triangle[t].iter().enumerate() {
            // sign = +1 iff the triangle lies on the +90-degree side of the edge
            let vector = (ct - edge_centers[e]) * sign as f64;
            let ev = cx.edge_vector(e);
            let signed_length = vector.norm() * ev.cross(vector).signum();
            halves[k] = HalfDualEdge {
                vector,
                signed_length,
            };
            dual_edge_vectors[e] = dual_edge_vectors[e] + vector;
            dual_edge_lengths[e] += signed_length;
        }
        half_dual_edges.push(halves);
    }

    // dual cell areas: per triangle, the signed quad (v, c_out, c_t, c_in)
    // around each corner; quad boundaries along shared segments cancel, so the
    // signed sum is exact for any centers and boundary cells close through v.
    let mut dual_cell_areas = vec![0.0; cx.num_vertices()];
    for t in 0..nf {
        let ct = triangle_centers[t];
        let [a, b, c] = cx.triangles[t];
        let local = cx.edge_of_triangle[t];
        // corner k uses the edges (k-1, k) in local order: v0 -> (e0 out, e2 in)
        for (k, &v) in [a, b, c].iter().enumerate() {
            let e_out = local[k].0;
            let e_in = local[(k + 2) % 3].0;
            let quad = [
                cx.vertex_coords[v],
                edge_centers[e_out],
                ct,
                edge_centers[e_in],
            ];
            let mut s = 0.0;
            for i in 0..4 {
                s += quad[i].cross(quad[(i + 1) % 4]);
            }
            dual_cell_areas[v] += 0.5 * s;
        }
    }

    Ok(DualMesh {
        strategy_name: strategy.name().to_string(),
        triangle_centers,
        edge_centers,
        half_dual_edges,
        dual_edge_vectors,
        dual_edge_lengths,
        dual_cell_areas,
    })
}

impl DualMesh {
    /// (sin, cos) of the angle from the primal edge to the half dual edge.
    pub fn half_edge_angle(&self, cx: &SimplicialComplex2, t: usize, local: usize) -> (f64, f64) {
        let (e, _) = cx.edge_of_triangle[t][local];
        let ev = cx.edge_vector(e);
        let hv = self.half_dual_edges[t][local].vector;
        let denom = ev.norm() * hv.norm();
        (ev.cross(hv) / denom, ev.dot(hv) / denom)
    }

    /// Integrate a 1-form along the full dual edge polyline of edge `e`.
    pub fn integrate_1form_dual_edge(
        &self,
        cx: &SimplicialComplex2,
        e: usize,
        f: &dyn Fn(Vec2) -> Vec2,
        order: usize,
    ) -> f64 {
        let mut total = 0.0;
        for slot in cx.edge_triangles[e].iter().flatten() {
            let (t, sign) = *slot;
            let ct = self.triangle_centers[t];
            let ce = self.edge_centers[e];
            let (from, to) = if sign > 0 { (ce, ct) } else { (ct, ce) };
            total += crate::quadrature::integrate_1form_segment(f, from, to, order);
        }
        total
    }
}

pub fn validate_dual(
    cx: &SimplicialComplex2,
    dual: &DualMesh,
    min_length_ratio: f64,
) -> DualValidationReport {
    let mean_edge = cx.mesh_stats().mean_edge_length;
    let mut report = DualValidationReport::default();
    for e in 0..cx.num_edges() {
        if dual.dual_edge_lengths[e].abs() < min_length_ratio * mean_edge {
            report.degenerate_edges.push(e);
        }
    }
    for t in 0..cx.num_triangles() {
        match crate::hodge::local_hodge1(cx, dual, t) {
            Ok(local) => {
                if local.matrix.cond_1() > 1e12 {
                    report.singular_triangles.push(t);
                }
            }
            Err(_) => report.singular_triangles.push(t),
        }
    }
    report
}

/// Deterministic pseudo-random interior strategy used by the exactness tests:
/// triangle centers at hashed interior barycentric points, edge centers at a
/// hashed interior parameter.
pub fn random_interior_strategy(seed: u64) -> CenterStrategy {
    fn hash(mut x: u64) -> u64 {
        // splitmix64
        x = x.wrapping_add(0x9e3779b97f4a7c15);
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^ (x >> 31)
    }
    fn unit(x: u64) -> f64 {
        (x >> 11) as f64 / (1u64 << 53) as f64
    }
    let tri_seed = hash(seed ^ 0x747269);
    let edge_seed = hash(seed ^ 0x65646765);
    CenterStrategy::Custom {
        name: format!("random-interior-{seed}"),
        triangle_center: Arc::new(move |t, pts| {
            let h1 = unit(hash(tri_seed ^ (t as u64).wrapping_mul(3)));
            let h2 = unit(hash(tri_seed ^ (t as u64).wrapping_mul(3) ^ 1));
            // interior barycentric coordinates with a 0.1 margin
            let l0 = 0.1 + 0.8 * h1;
            let l1 = (1.0 - l0) * (0.1 + 0.8 * h2);
            let l2 = 1.0 - l0 - l1;
            pts[0] * l0 + pts[1] * l1 + pts[2] * l2
        }),
        edge_center: Arc::new(move |e, tail, head| {
            let t = 0.3 + 0.4 * unit(hash(edge_seed ^ e as u64));
            tail.lerp(head, t)
        }),
    }
}

/// Signed area of the whole mesh (positive for counterclockwise triangles).
pub fn mesh_area(cx: &SimplicialComplex2) -> f64 {
    (0..cx.num_triangles())
        .map(|t| {
            let [p, q, r] = cx.triangle_points(t);
            0.5 * signed_area2(p, q, r)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn unit_right_triangle() -> SimplicialComplex2 {
        build_complex(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            &[[0, 1, 2]],
        )
        .unwrap()
    }

    fn two_squares() -> SimplicialComplex2 {
        // 2x1 right mesh on [0,2]x[0,1]
        build_complex(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(2.0, 0.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(2.0, 1.0),
            ],
            &[[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]],
        )
        .unwrap()
    }

    #[test]
    fn circumcentric_hypotenuse_dual_has_zero_length() {
        let cx = unit_right_triangle();
        let dual = build_dual(&cx, &CenterStrategy::Circumcentric).unwrap();
        // hypotenuse is edge (1,2)
        let e = cx.edges.iter().position(|&e| e == [1, 2]).unwrap();
        assert!(dual.dual_edge_lengths[e].abs() < 1e-15);
        let report = validate_dual(&cx, &dual, 1e-8);
        assert!(report.degenerate_edges.contains(&e));
    }

    #[test]
    fn barycentric_halves_positive_on_unit_right_triangle() {
        let cx = unit_right_triangle();
        let dual = build_dual(&cx, &CenterStrategy::Barycentric).unwrap();
        for h in &dual.half_dual_edges[0] {
            assert!(h.signed_length > 0.0);
        }
        assert!(validate_dual(&cx, &dual, 1e-8).is_ok());
    }

    #[test]
    fn dual_cell_areas_partition_mesh() {
        let cx = two_squares();
        for strategy in [
            CenterStrategy::Circumcentric,
            CenterStrategy::Barycentric,
            CenterStrategy::Incentric,
            random_interior_strategy(42),
        ] {
            let dual = build_dual(&cx, &strategy).unwrap();
            let total: f64 = dual.dual_cell_areas.iter().sum();
            let area = mesh_area(&cx);
            assert!(
                ((total - area) / area).abs() < 1e-12,
                "{}: {total} vs {area}",
                strategy.name()
            );
        }
    }

    #[test]
    fn circumcentric_duals_are_perpendicular() {
        let cx = two_squares();
        let dual = build_dual(&cx, &CenterStrategy::Circumcentric).unwrap();
        for e in 0..cx.num_edges() {
            let ev = cx.edge_vector(e);
            let dv = dual.dual_edge_vectors[e];
            if dv.norm() > 1e-14 {
                let cos = ev.dot(dv) / (ev.norm() * dv.norm());
                assert!(cos.abs() < 1e-12, "edge {e}: cos = {cos}");
            }
        }
    }

    #[test]
    fn angle_data_is_normalized() {
        let cx = two_squares();
        for strategy in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
            let dual = build_dual(&cx, &strategy).unwrap();
            for t in 0..cx.num_triangles() {
                for k in 0..3 {
                    let (sin, cos) = dual.half_edge_angle(&cx, t, k);
                    assert!(sin >= -1e-12, "sin theta must be nonnegative");
                    assert!((sin * sin + cos * cos - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn interior_dual_edge_is_center_difference() {
        let cx = two_squares();
        let dual = build_dual(&cx, &CenterStrategy::Barycentric).unwrap();
        let e = cx.edges.iter().position(|&e| e == [1, 4]).unwrap();
        let slots = cx.edge_triangles[e];
        let (t_pos, _) = slots
            .iter()
            .flatten()
            .find(|&&(_, s)| s > 0)
            .copied()
            .unwrap();
        let (t_neg, _) = slots
            .iter()
            .flatten()
            .find(|&&(_, s)| s < 0)
            .copied()
            .unwrap();
        let expect = dual.triangle_centers[t_pos] - dual.triangle_centers[t_neg];
        let got = dual.dual_edge_vectors[e];
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn custom_edge_center_must_be_interior() {
        let cx = unit_right_triangle();
        let bad = CenterStrategy::Custom {
            name: "bad".into(),
            triangle_center: Arc::new(|_, pts| barycenter(pts[0], pts[1], pts[2])),
            edge_center: Arc::new(|_, tail, head| tail.lerp(head, 1.5)),
        };
        assert!(matches!(
            build_dual(&cx, &bad),
            Err(DualError::EdgeCenterOutsideEdge(_))
        ));
    }

    #[test]
    fn right_mesh_circumcentric_flags_hypotenuses_only() {
        let cx = two_squares();
        let dual = build_dual(&cx, &CenterStrategy::Circumcentric).unwrap();
        let report = validate_dual(&cx, &dual, 1e-8);
        let expect: Vec<usize> = (0..cx.num_edges())
            .filter(|&e| {
                let v = cx.edge_vector(e);
                v.x != 0.0 && v.y != 0.0
            })
            .collect();
        assert_eq!(report.degenerate_edges, expect);
        // barycentric is clean on the same mesh
        let dual_b = build_dual(&cx, &CenterStrategy::Barycentric).unwrap();
        assert!(validate_dual(&cx, &dual_b, 1e-8).is_ok());
    }
}
