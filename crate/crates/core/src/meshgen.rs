//! Mesh generators: structured right-isoceles and acute (well-centered)
//! triangulations, non-Delaunay diagnostics, and seeded vertex perturbation
//! toward a prescribed non-Delaunay ratio.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{build_complex, MeshError, SimplicialComplex2};
use crate::exact::Rect;
use crate::geometry::{circumcenter, signed_area2, triangle_area, Vec2};

#[derive(Debug, Error)]
pub enum MeshGenError {
    #[error("resolution must be at least 2 points per direction, got {0}")]
    ResolutionTooSmall(usize),
    #[error("domain is degenerate")]
    DegenerateDomain,
    #[error("target ratio {0} not reachable (achieved {1:.3} after {2} sweeps)")]
    TargetUnreachable(f64, f64, usize),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Mesh family requested by the harness.
#[derive(Clone, Debug)]
pub enum MeshKind {
    Right,
    Acute,
    /// Right mesh whose interior vertices are perturbed until the requested
    /// fraction of triangles is non-Delaunay.
    Perturbed { target_ratio: f64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct MeshRecipe {
    pub kind: MeshKind,
    /// Points per direction for the right mesh, cells per direction for acute.
    pub n: usize,
    pub domain: Rect,
}

impl MeshRecipe {
    pub fn build(&self) -> Result<SimplicialComplex2, MeshGenError> {
        match &self.kind {
            MeshKind::Right => gen_right_mesh(self.n, self.domain),
            MeshKind::Acute => gen_acute_mesh(self.n, self.domain),
            MeshKind::Perturbed { target_ratio, seed } => {
                let base = gen_right_mesh(self.n, self.domain)?;
                perturb_to_non_delaunay(&base, *target_ratio, *seed, 1e-8)
            }
        }
    }
}

/// `n` points per direction; each of the `(n-1)^2` cells is split by the same
/// diagonal, giving `2 (n-1)^2` right isoceles triangles.
pub fn gen_right_mesh(n: usize, domain: Rect) -> Result<SimplicialComplex2, MeshGenError> {
    if n < 2 {
        return Err(MeshGenError::ResolutionTooSmall(n));
    }
    if domain.width() <= 0.0 || domain.height() <= 0.0 {
        return Err(MeshGenError::DegenerateDomain);
    }
    let cells = n - 1;
    let mut pts = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            pts.push(Vec2::new(
                domain.x0 + domain.width() * i as f64 / cells as f64,
                domain.y0 + domain.height() * j as f64 / cells as f64,
            ));
        }
    }
    let idx = |i: usize, j: usize| j * n + i;
    let mut tris = Vec::with_capacity(2 * cells * cells);
    for j in 0..cells {
        for i in 0..cells {
            tris.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            tris.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(build_complex(pts, &tris)?)
}

/// Acute tile of the unit cell: 4 corners, one point per side, 4 interior
/// points, 14 triangles, largest angle just above 72 degrees. Side points are
/// placed so that checkerboard mirroring produces a conforming tiling.
const ACUTE_S: f64 = 0.5324;
const ACUTE_T: f64 = 0.4643;
const ACUTE_I0: (f64, f64) = (0.3551, 0.3669);
const ACUTE_I1: (f64, f64) = (0.6936, 0.3109);

fn acute_cell_vertices() -> [(f64, f64); 12] {
    let (a, b) = ACUTE_I0;
    let (c, d) = ACUTE_I1;
    [
        (0.0, 0.0),              // 0 corner
        (1.0, 0.0),              // 1
        (1.0, 1.0),              // 2
        (0.0, 1.0),              // 3
        (ACUTE_S, 0.0),          // 4 bottom side
        (1.0, ACUTE_T),          // 5 right side
        (1.0 - ACUTE_S, 1.0),    // 6 top side
        (0.0, 1.0 - ACUTE_T),    // 7 left side
        (a, b),                  // 8 interior
        (c, d),                  // 9
        (1.0 - a, 1.0 - b),      // 10
        (1.0 - c, 1.0 - d),      // 11
    ]
}

const ACUTE_CELL_TRIANGLES: [[usize; 3]; 14] = [
    [0, 4, 8],
    [4, 1, 9],
    [4, 9, 8],
    [1, 5, 9],
    [5, 2, 10],
    [5, 10, 9],
    [2, 6, 10],
    [6, 3, 11],
    [6, 11, 10],
    [3, 7, 11],
    [7, 0, 8],
    [7, 8, 11],
    [8, 9, 10],
    [8, 10, 11],
];

/// Tile the domain with `n x n` mirrored copies of the acute cell.
/// Every triangle is strictly acute, so each circumcenter is interior.
pub fn gen_acute_mesh(n: usize, domain: Rect) -> Result<SimplicialComplex2, MeshGenError> {
    if n < 1 {
        return Err(MeshGenError::ResolutionTooSmall(n));
    }
    if domain.width() <= 0.0 || domain.height() <= 0.0 {
        return Err(MeshGenError::DegenerateDomain);
    }
    let cell = acute_cell_vertices();
    let hx = domain.width() / n as f64;
    let hy = domain.height() / n as f64;
    let mut pts: Vec<Vec2> = Vec::new();
    let mut ids: std::collections::HashMap<(i64, i64), usize> = std::collections::HashMap::new();
    let mut tris = Vec::with_capacity(14 * n * n);
    let quant = |v: f64| (v * 1e9).round() as i64;
    for cj in 0..n {
        for ci in 0..n {
            let mirror_x = ci % 2 == 1;
            let mirror_y = cj % 2 == 1;
            let mut local = [0usize; 12];
            for (k, &(x, y)) in cell.iter().enumerate() {
                let xx = if mirror_x { 1.0 - x } else { x };
                let yy = if mirror_y { 1.0 - y } else { y };
                let p = Vec2::new(
                    domain.x0 + (ci as f64 + xx) * hx,
                    domain.y0 + (cj as f64 + yy) * hy,
                );
                let key = (quant(p.x), quant(p.y));
                let id = *ids.entry(key).or_insert_with(|| {
                    pts.push(p);
                    pts.len() - 1
                });
                local[k] = id;
            }
            for tri in &ACUTE_CELL_TRIANGLES {
                tris.push([local[tri[0]], local[tri[1]], local[tri[2]]]);
            }
        }
    }
    Ok(build_complex(pts, &tris)?)
}

/// Fraction of triangles whose open circumdisk contains another mesh vertex.
pub fn non_delaunay_ratio(cx: &SimplicialComplex2) -> f64 {
    ratio_of(&cx.vertex_coords, &cx.triangles)
}

/// Uniform bucket grid for circumdisk queries.
struct VertexGrid {
    cell: f64,
    origin: Vec2,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl VertexGrid {
    fn build(coords: &[Vec2], cell: f64) -> Self {
        let mut lo = coords[0];
        let mut hi = coords[0];
        for &p in coords {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let nx = ((hi.x - lo.x) / cell).ceil() as usize + 1;
        let ny = ((hi.y - lo.y) / cell).ceil() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (v, &p) in coords.iter().enumerate() {
            let i = ((p.x - lo.x) / cell) as usize;
            let j = ((p.y - lo.y) / cell) as usize;
            buckets[j.min(ny - 1) * nx + i.min(nx - 1)].push(v);
        }
        Self {
            cell,
            origin: lo,
            nx,
            ny,
            buckets,
        }
    }

    fn candidates_in_disk(&self, center: Vec2, radius: f64) -> impl Iterator<Item = usize> + '_ {
        let i0 = (((center.x - radius - self.origin.x) / self.cell).floor().max(0.0)) as usize;
        let j0 = (((center.y - radius - self.origin.y) / self.cell).floor().max(0.0)) as usize;
        let i1 = ((((center.x + radius - self.origin.x) / self.cell).ceil()) as usize).min(self.nx - 1);
        let j1 = ((((center.y + radius - self.origin.y) / self.cell).ceil()) as usize).min(self.ny - 1);
        (j0..=j1).flat_map(move |j| {
            (i0..=i1).flat_map(move |i| self.buckets[j * self.nx + i].iter().copied())
        })
    }
}

fn is_non_delaunay_grid(coords: &[Vec2], tri: [usize; 3], grid: &VertexGrid) -> bool {
    let (p, q, r) = (coords[tri[0]], coords[tri[1]], coords[tri[2]]);
    let Some(center) = circumcenter(p, q, r) else {
        return true;
    };
    let radius = (p - center).norm();
    let tol = 1e-12 * radius;
    grid.candidates_in_disk(center, radius)
        .any(|v| !tri.contains(&v) && (coords[v] - center).norm() < radius - tol)
}

fn ratio_of(coords: &[Vec2], tris: &[[usize; 3]]) -> f64 {
    if tris.is_empty() {
        return 0.0;
    }
    let mut total_len = 0.0;
    for tri in tris {
        total_len += (coords[tri[1]] - coords[tri[0]]).norm();
    }
    let grid = VertexGrid::build(coords, (total_len / tris.len() as f64).max(1e-12) * 2.0);
    let bad = tris
        .iter()
        .filter(|&&tri| is_non_delaunay_grid(coords, tri, &grid))
        .count();
    bad as f64 / tris.len() as f64
}

/// Move interior vertices by seeded Gaussian steps, accepting a move only if
/// no incident triangle inverts or falls under the area floor, until the
/// non-Delaunay ratio lands within +-0.03 of the target.
pub fn perturb_to_non_delaunay(
    cx: &SimplicialComplex2,
    target_ratio: f64,
    seed: u64,
    quality_floor: f64,
) -> Result<SimplicialComplex2, MeshGenError> {
    const RATIO_TOL: f64 = 0.03;
    const MAX_SWEEPS: usize = 200;

    let mut coords = cx.vertex_coords.clone();
    let tris = cx.triangles.clone();
    let mut tris_of_vertex: Vec<Vec<usize>> = vec![Vec::new(); coords.len()];
    for (t, tri) in tris.iter().enumerate() {
        for &v in tri {
            tris_of_vertex[v].push(t);
        }
    }
    let stats = cx.mesh_stats();
    let domain_area: f64 = (0..cx.num_triangles()).map(|t| cx.triangle_area(t)).sum();
    let area_floor = quality_floor * domain_area;
    let mut step = 0.3 * stats.mean_edge_length;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut ratio = ratio_of(&coords, &tris);
    if (ratio - target_ratio).abs() <= RATIO_TOL {
        return Ok(build_complex(coords, &tris)?);
    }

    let movable: Vec<usize> = (0..coords.len())
        .filter(|&v| !cx.boundary_vertex_flags[v])
        .collect();

    for sweep in 0..MAX_SWEEPS {
        let mut accepted = 0usize;
        for &v in &movable {
            if (ratio - target_ratio).abs() <= RATIO_TOL {
                return Ok(build_complex(coords, &tris)?);
            }
            // approximate a Gaussian step with a sum of uniforms
            let gauss = |rng: &mut ChaCha8Rng| {
                let s: f64 = (0..6).map(|_| rng.gen_range(-1.0..1.0)).sum();
                s / 6.0_f64.sqrt()
            };
            let delta = Vec2::new(gauss(&mut rng), gauss(&mut rng)) * step;
            let candidate = coords[v] + delta;
            let valid = tris_of_vertex[v].iter().all(|&t| {
                let tri = tris[t];
                let pts = [
                    if tri[0] == v { candidate } else { coords[tri[0]] },
                    if tri[1] == v { candidate } else { coords[tri[1]] },
                    if tri[2] == v { candidate } else { coords[tri[2]] },
                ];
                signed_area2(pts[0], pts[1], pts[2]) > 0.0
                    && triangle_area(pts[0], pts[1], pts[2]) >= area_floor
            });
            if !valid {
                continue;
            }
            let old = coords[v];
            coords[v] = candidate;
            let next_ratio = ratio_of(&coords, &tris);
            // accept moves that step toward the target without overshooting it
            let toward = if ratio < target_ratio {
                next_ratio > ratio && next_ratio <= target_ratio + RATIO_TOL
            } else {
                next_ratio < ratio && next_ratio >= target_ratio - RATIO_TOL
            };
            if toward {
                ratio = next_ratio;
                accepted += 1;
            } else {
                coords[v] = old;
            }
        }
        if (ratio - target_ratio).abs() <= RATIO_TOL {
            return Ok(build_complex(coords, &tris)?);
        }
        if accepted == 0 {
            step *= 0.5;
            if step < 1e-6 * stats.mean_edge_length {
                return Err(MeshGenError::TargetUnreachable(target_ratio, ratio, sweep));
            }
        }
    }
    Err(MeshGenError::TargetUnreachable(
        target_ratio,
        ratio,
        MAX_SWEEPS,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_mesh_counts() {
        let cx = gen_right_mesh(20, Rect::UNIT).unwrap();
        assert_eq!(cx.num_triangles(), 722);
        assert_eq!(cx.num_vertices(), 400);
        let cx2 = gen_right_mesh(2, Rect::UNIT).unwrap();
        assert_eq!(cx2.num_triangles(), 2);
    }

    #[test]
    fn right_mesh_angles() {
        let stats = gen_right_mesh(5, Rect::UNIT).unwrap().mesh_stats();
        assert!((stats.min_angle_deg - 45.0).abs() < 1e-9);
        assert!((stats.max_angle_deg - 90.0).abs() < 1e-9);
    }

    #[test]
    fn acute_mesh_is_strictly_acute() {
        for n in [1usize, 2, 3] {
            let cx = gen_acute_mesh(n, Rect::UNIT).unwrap();
            assert_eq!(cx.num_triangles(), 14 * n * n);
            let stats = cx.mesh_stats();
            assert!(
                stats.max_angle_deg < 89.0,
                "n = {n}: max angle {}",
                stats.max_angle_deg
            );
        }
    }

    #[test]
    fn acute_mesh_is_well_centered() {
        use crate::dual::{build_dual, validate_dual, CenterStrategy};
        let cx = gen_acute_mesh(2, Rect::UNIT).unwrap();
        let dual = build_dual(&cx, &CenterStrategy::Circumcentric).unwrap();
        assert!(validate_dual(&cx, &dual, 1e-8).is_ok());
        // every circumcenter strictly inside its triangle
        for t in 0..cx.num_triangles() {
            let [p, q, r] = cx.triangle_points(t);
            let c = dual.triangle_centers[t];
            for (a, b) in [(p, q), (q, r), (r, p)] {
                assert!(signed_area2(a, b, c) > 0.0);
            }
        }
    }

    #[test]
    fn refinement_halves_mean_edge_length() {
        let s1 = gen_acute_mesh(2, Rect::UNIT).unwrap().mesh_stats();
        let s2 = gen_acute_mesh(4, Rect::UNIT).unwrap().mesh_stats();
        let ratio = s1.mean_edge_length / s2.mean_edge_length;
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn structured_right_mesh_is_delaunay() {
        // cocircular corners sit on, not inside, the circumcircle
        let cx = gen_right_mesh(6, Rect::UNIT).unwrap();
        assert_eq!(non_delaunay_ratio(&cx), 0.0);
    }

    #[test]
    fn flipped_diagonal_in_bent_quad_is_non_delaunay() {
        // moving one corner inward makes the chosen diagonal the bad one
        let cx = build_complex(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.6, 0.6),
                Vec2::new(0.0, 1.0),
            ],
            &[[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        assert_eq!(non_delaunay_ratio(&cx), 0.0);
        let flipped = build_complex(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.6, 0.6),
                Vec2::new(0.0, 1.0),
            ],
            &[[0, 1, 3], [1, 2, 3]],
        )
        .unwrap();
        assert!(non_delaunay_ratio(&flipped) > 0.0);
    }

    #[test]
    fn ratio_invariant_under_similarity() {
        let cx = build_complex(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(0.6, 0.6),
                Vec2::new(0.0, 1.0),
            ],
            &[[0, 1, 3], [1, 2, 3]],
        )
        .unwrap();
        let r0 = non_delaunay_ratio(&cx);
        let (s, c) = (0.3_f64.sin(), 0.3_f64.cos());
        let moved: Vec<Vec2> = cx
            .vertex_coords
            .iter()
            .map(|p| Vec2::new(5.0 * (c * p.x - s * p.y) + 3.0, 5.0 * (s * p.x + c * p.y) - 1.0))
            .collect();
        let cx2 = build_complex(moved, &cx.triangles).unwrap();
        assert_eq!(r0, non_delaunay_ratio(&cx2));
    }

    #[test]
    fn perturbation_reaches_target_and_is_deterministic() {
        let base = gen_right_mesh(10, Rect::UNIT).unwrap();
        let a = perturb_to_non_delaunay(&base, 0.15, 7, 1e-8).unwrap();
        let ratio = non_delaunay_ratio(&a);
        assert!((0.12..=0.18).contains(&ratio), "ratio {ratio}");
        // boundary untouched
        for (v, flag) in base.boundary_vertex_flags.iter().enumerate() {
            if *flag {
                assert_eq!(a.vertex_coords[v], base.vertex_coords[v]);
            }
        }
        let b = perturb_to_non_delaunay(&base, 0.15, 7, 1e-8).unwrap();
        for (p, q) in a.vertex_coords.iter().zip(&b.vertex_coords) {
            assert!(p.x.to_bits() == q.x.to_bits() && p.y.to_bits() == q.y.to_bits());
        }
    }
}
