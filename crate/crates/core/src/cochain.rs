//! Cochains (discrete differential forms) and the discretization of smooth
//! forms by point evaluation and quadrature.

use thiserror::Error;

use crate::complex::{Carrier, SimplicialComplex2};
use crate::dual::DualMesh;
use crate::geometry::Vec2;
use crate::quadrature::{integrate_1form_segment, integrate_scalar_triangle};

#[derive(Debug, Error)]
pub enum CochainError {
    #[error("dual carrier requested but no dual mesh supplied")]
    MissingDualMesh,
    #[error("cochain degree must be 0, 1 or 2, got {0}")]
    BadDegree(u8),
}

/// A real-valued k-cochain on the primal or dual complex.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub degree: u8,
    pub carrier: Carrier,
    pub values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(degree: u8, carrier: Carrier, len: usize) -> Self {
        Self {
            degree,
            carrier,
            values: vec![0.0; len],
        }
    }

    /// Number of carrier elements for a degree on a given complex
    /// (dual degree k pairs with primal dimension 2-k).
    pub fn expected_len(cx: &SimplicialComplex2, degree: u8, carrier: Carrier) -> usize {
        match (carrier, degree) {
            (Carrier::Primal, 0) => cx.num_vertices(),
            (Carrier::Primal, 1) => cx.num_edges(),
            (Carrier::Primal, 2) => cx.num_triangles(),
            (Carrier::Dual, 0) => cx.num_triangles(),
            (Carrier::Dual, 1) => cx.num_edges(),
            (Carrier::Dual, 2) => cx.num_vertices(),
            _ => panic!("degree must be 0, 1 or 2"),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Pointwise samplers for a smooth k-form: a scalar for degrees 0 and 2
/// (density against dx^dy), a coefficient pair (f_x, f_y) for degree 1.
pub enum FormSampler<'a> {
    Scalar(&'a dyn Fn(Vec2) -> f64),
    OneForm(&'a dyn Fn(Vec2) -> Vec2),
}

/// Discretize a smooth form into a cochain by evaluation (degree 0) or
/// Gauss-Legendre quadrature (degrees 1 and 2).
pub fn discretize_form(
    sampler: &FormSampler,
    degree: u8,
    carrier: Carrier,
    cx: &SimplicialComplex2,
    dual: Option<&DualMesh>,
    quad_order: usize,
) -> Result<Cochain, CochainError> {
    let order = quad_order.max(1);
    let values = match (carrier, degree, sampler) {
        (Carrier::Primal, 0, FormSampler::Scalar(f)) => {
            cx.vertex_coords.iter().map(|&p| f(p)).collect()
        }
        (Carrier::Primal, 1, FormSampler::OneForm(f)) => cx
            .edges
            .iter()
            .map(|&[a, b]| {
                integrate_1form_segment(*f, cx.vertex_coords[a], cx.vertex_coords[b], order)
            })
            .collect(),
        (Carrier::Primal, 2, FormSampler::Scalar(f)) => (0..cx.num_triangles())
            .map(|t| integrate_scalar_triangle(*f, cx.triangle_points(t), order))
            .collect(),
        (Carrier::Dual, 0, FormSampler::Scalar(f)) => {
            let dual = dual.ok_or(CochainError::MissingDualMesh)?;
            dual.triangle_centers.iter().map(|&p| f(p)).collect()
        }
        (Carrier::Dual, 1, FormSampler::OneForm(f)) => {
            let dual = dual.ok_or(CochainError::MissingDualMesh)?;
            (0..cx.num_edges())
                .map(|e| dual.integrate_1form_dual_edge(cx, e, *f, order))
                .collect()
        }
        (Carrier::Dual, 2, FormSampler::Scalar(f)) => {
            let dual = dual.ok_or(CochainError::MissingDualMesh)?;
            // integrate over the per-corner quads that tile each dual cell
            let mut vals = vec![0.0; cx.num_vertices()];
            for t in 0..cx.num_triangles() {
                let ct = dual.triangle_centers[t];
                let tri = cx.triangles[t];
                let local = cx.edge_of_triangle[t];
                for (k, &v) in tri.iter().enumerate() {
                    let c_out = dual.edge_centers[local[k].0];
                    let c_in = dual.edge_centers[local[(k + 2) % 3].0];
                    let p = cx.vertex_coords[v];
                    vals[v] += integrate_scalar_triangle(*f, [p, c_out, ct], order)
                        + integrate_scalar_triangle(*f, [p, ct, c_in], order);
                }
            }
            vals
        }
        (_, d, _) if d > 2 => return Err(CochainError::BadDegree(d)),
        _ => {
            return Err(CochainError::BadDegree(degree));
        }
    };
    Ok(Cochain {
        degree,
        carrier,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::dual::{build_dual, CenterStrategy};

    fn unit_right() -> SimplicialComplex2 {
        build_complex(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            &[[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn dx_on_unit_edge_is_one() {
        let cx = unit_right();
        let f = |_: Vec2| Vec2::new(1.0, 0.0);
        let c = discretize_form(&FormSampler::OneForm(&f), 1, Carrier::Primal, &cx, None, 1).unwrap();
        let e = cx.edges.iter().position(|&e| e == [0, 1]).unwrap();
        assert!((c.values[e] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_dx_on_unit_edge_is_half() {
        let cx = unit_right();
        let f = |p: Vec2| Vec2::new(p.x, 0.0);
        let c = discretize_form(&FormSampler::OneForm(&f), 1, Carrier::Primal, &cx, None, 1).unwrap();
        let e = cx.edges.iter().position(|&e| e == [0, 1]).unwrap();
        assert!((c.values[e] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unit_density_gives_area() {
        let cx = unit_right();
        let f = |_: Vec2| 1.0;
        let c = discretize_form(&FormSampler::Scalar(&f), 2, Carrier::Primal, &cx, None, 2).unwrap();
        assert!((c.values[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dual_carrier_requires_dual_mesh() {
        let cx = unit_right();
        let f = |_: Vec2| 1.0;
        assert!(matches!(
            discretize_form(&FormSampler::Scalar(&f), 0, Carrier::Dual, &cx, None, 1),
            Err(CochainError::MissingDualMesh)
        ));
    }

    #[test]
    fn dual_two_form_tiles_cells() {
        let cx = unit_right();
        let dual = build_dual(&cx, &CenterStrategy::Barycentric).unwrap();
        let f = |_: Vec2| 1.0;
        let c =
            discretize_form(&FormSampler::Scalar(&f), 2, Carrier::Dual, &cx, Some(&dual), 2).unwrap();
        let total: f64 = c.values.iter().sum();
        assert!((total - 0.5).abs() < 1e-14);
        for (v, &val) in c.values.iter().enumerate() {
            assert!((val - dual.dual_cell_areas[v]).abs() < 1e-14);
        }
    }

    #[test]
    fn fundamental_theorem_on_primal_edges() {
        let cx = unit_right();
        let u = |p: Vec2| p.x * p.x - 3.0 * p.y;
        let u0 = discretize_form(&FormSampler::Scalar(&u), 0, Carrier::Primal, &cx, None, 1).unwrap();
        let d0 = cx.exterior_derivative(0, Carrier::Primal);
        let du = d0.matvec(&u0.values);
        for (e, &[a, b]) in cx.edges.iter().enumerate() {
            let expect = u(cx.vertex_coords[b]) - u(cx.vertex_coords[a]);
            assert!((du[e] - expect).abs() < 1e-14);
        }
    }
}
