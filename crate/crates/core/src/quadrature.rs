//! Gauss-Legendre quadrature on segments and a Duffy-transform rule on triangles.

use crate::geometry::Vec2;

/// Gauss-Legendre nodes and weights on [-1, 1] for 1..=8 points.
const GAUSS_LEGENDRE: [&[(f64, f64)]; 8] = [
    &[(0.00000000000000000e+00, 2.00000000000000000e+00)],
    &[(-5.77350269189625731e-01, 1.00000000000000000e+00), (5.77350269189625731e-01, 1.00000000000000000e+00)],
    &[(-7.74596669241483404e-01, 5.55555555555555691e-01), (0.00000000000000000e+00, 8.88888888888888840e-01), (7.74596669241483404e-01, 5.55555555555555691e-01)],
    &[(-8.61136311594052573e-01, 3.47854845137453683e-01), (-3.39981043584856257e-01, 6.52145154862546206e-01), (3.39981043584856257e-01, 6.52145154862546206e-01), (8.61136311594052573e-01, 3.47854845137453683e-01)],
    &[(-9.06179845938663964e-01, 2.36926885056189418e-01), (-5.38469310105683108e-01, 4.78628670499366193e-01), (0.00000000000000000e+00, 5.68888888888888999e-01), (5.38469310105683108e-01, 4.78628670499366193e-01), (9.06179845938663964e-01, 2.36926885056189418e-01)],
    &[(-9.32469514203152050e-01, 1.71324492379169746e-01), (-6.61209386466264482e-01, 3.60761573048138939e-01), (-2.38619186083196932e-01, 4.67913934572691370e-01), (2.38619186083196932e-01, 4.67913934572691370e-01), (6.61209386466264482e-01, 3.60761573048138939e-01), (9.32469514203152050e-01, 1.71324492379169746e-01)],
    &[(-9.49107912342758486e-01, 1.29484966168870647e-01), (-7.41531185599394460e-01, 2.79705391489276589e-01), (-4.05845151377397184e-01, 3.81830050505118312e-01), (0.00000000000000000e+00, 4.17959183673468959e-01), (4.05845151377397184e-01, 3.81830050505118312e-01), (7.41531185599394460e-01, 2.79705391489276589e-01), (9.49107912342758486e-01, 1.29484966168870647e-01)],
    &[(-9.60289856497536176e-01, 1.01228536290376689e-01), (-7.96666477413626728e-01, 2.22381034453374343e-01), (-5.25532409916328991e-01, 3.13706645877887047e-01), (-1.83434642495649780e-01, 3.62683783378361768e-01), (1.83434642495649780e-01, 3.62683783378361768e-01), (5.25532409916328991e-01, 3.13706645877887047e-01), (7.96666477413626728e-01, 2.22381034453374343e-01), (9.60289856497536176e-01, 1.01228536290376689e-01)],
];

pub fn gauss_rule(order: usize) -> &'static [(f64, f64)] {
    let n = order.clamp(1, 8);
    GAUSS_LEGENDRE[n - 1]
}

/// Line integral of the 1-form `f_x dx + f_y dy` along the segment `a -> b`.
///
/// Exact for polynomial coefficients of degree <= 2*order - 1.
pub fn integrate_1form_segment(f: &dyn Fn(Vec2) -> Vec2, a: Vec2, b: Vec2, order: usize) -> f64 {
    let d = b - a;
    let mut total = 0.0;
    for &(x, w) in gauss_rule(order) {
        let p = a + d * ((x + 1.0) * 0.5);
        total += w * f(p).dot(d) * 0.5;
    }
    total
}

/// Tangential line integral of a vector field along `a -> b` (same as the 1-form u-flat).
pub fn integrate_vector_tangential(u: &dyn Fn(Vec2) -> Vec2, a: Vec2, b: Vec2, order: usize) -> f64 {
    integrate_1form_segment(u, a, b, order)
}

/// Area integral of a scalar density over a triangle via the Duffy transform,
/// `order^2` points; exact for polynomials of total degree <= 2*order - 2.
pub fn integrate_scalar_triangle(f: &dyn Fn(Vec2) -> f64, tri: [Vec2; 3], order: usize) -> f64 {
    let [p0, p1, p2] = tri;
    let e1 = p1 - p0;
    let e2 = p2 - p0;
    let jac = e1.cross(e2); // twice the signed area
    let rule = gauss_rule(order);
    let mut total = 0.0;
    for &(xu, wu) in rule {
        let u = (xu + 1.0) * 0.5;
        for &(xv, wv) in rule {
            let v = (xv + 1.0) * 0.5;
            // Duffy: (u, v) in [0,1]^2 -> barycentric (u(1-v), uv), jacobian u
            let l1 = u * (1.0 - v);
            let l2 = u * v;
            let p = p0 + e1 * l1 + e2 * l2;
            total += wu * wv * 0.25 * u * f(p);
        }
    }
    total * jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_form_on_unit_edge() {
        // dx integrated over (0,0)->(1,0) is 1
        let v = integrate_1form_segment(&|_| Vec2::new(1.0, 0.0), Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), 1);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x_dx_on_unit_edge() {
        // analytic value 1/2
        let v = integrate_1form_segment(
            &|p| Vec2::new(p.x, 0.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            1,
        );
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gauss_exactness_degree() {
        // order q integrates t^(2q-1) exactly along a segment
        for q in 1..=8usize {
            let deg = 2 * q - 1;
            let v = integrate_1form_segment(
                &|p| Vec2::new(p.x.powi(deg as i32), 0.0),
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                q,
            );
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "order {q}: {v} vs {exact}");
        }
    }

    #[test]
    fn unit_density_gives_triangle_area() {
        let tri = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let v = integrate_scalar_triangle(&|_| 1.0, tri, 2);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quadratic_density_on_reference_triangle() {
        // integral of x^2 over the unit right triangle = 1/12
        let tri = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let v = integrate_scalar_triangle(&|p| p.x * p.x, tri, 3);
        assert!((v - 1.0 / 12.0).abs() < 1e-14);
    }
}
