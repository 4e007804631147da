//! Case runner and convergence-sweep driver with CSV output.

use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::SimplicialComplex2;
use crate::dual::{build_dual, CenterStrategy, DualError};
use crate::exact::{ExactError, ExactSolution};
use crate::hodge::{HodgeError, HodgeOperators, InverseMode};
use crate::meshgen::{MeshGenError, MeshRecipe};
use crate::norms::{convergence_rate, relative_error, NormError};
use crate::ns::{
    solve_boussinesq, solve_navier_stokes, BoundaryData, FlowError, FlowProblem, SolverConfig,
};
use crate::poisson::{solve_poisson, PoissonError, PoissonProblem};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    MeshGen(#[from] MeshGenError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("csv parse error: {0}")]
    CsvParse(String),
}

/// Which solver a case exercises; decided by the exact-solution token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemClass {
    Poisson,
    NavierStokes,
    Boussinesq,
}

pub fn classify(solution: &ExactSolution) -> ProblemClass {
    match solution {
        ExactSolution::PoissonQuadratic | ExactSolution::PoissonSinSinh => ProblemClass::Poisson,
        ExactSolution::Poiseuille { .. } | ExactSolution::TaylorGreen { .. } => {
            ProblemClass::NavierStokes
        }
        _ => ProblemClass::Boussinesq,
    }
}

#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub recipe: MeshRecipe,
    pub strategy: CenterStrategy,
    pub problem: String,
    pub inverse_mode: InverseMode,
    pub config: SolverConfig,
    /// Override for the advective time step of the steady flow cases,
    /// as a multiple of the mean edge length.
    pub steady_dt_factor: f64,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub mesh_kind: String,
    pub n: usize,
    pub dx_mean: f64,
    pub num_triangles: usize,
    pub strategy: String,
    pub problem: String,
    pub err_psi: f64,
    pub err_u: Option<f64>,
    pub err_theta: Option<f64>,
    pub steps: usize,
    pub wall_time_s: f64,
}

pub fn run_case(spec: &CaseSpec) -> Result<CaseReport, HarnessError> {
    let start = std::time::Instant::now();
    let cx = spec.recipe.build()?;
    let report = run_case_on(spec, &cx)?;
    Ok(CaseReport {
        wall_time_s: start.elapsed().as_secs_f64(),
        ..report
    })
}

/// Run a case on an already-built mesh (used by perturbed-mesh sweeps).
pub fn run_case_on(spec: &CaseSpec, cx: &SimplicialComplex2) -> Result<CaseReport, HarnessError> {
    let start = std::time::Instant::now();
    let solution = ExactSolution::by_name(&spec.problem)?;
    let dual = build_dual(cx, &spec.strategy)?;
    let hodge = HodgeOperators::build(cx, &dual)?;
    let stats = cx.mesh_stats();
    let params = solution.fluid_params();

    let (err_psi, err_u, err_theta, steps) = match classify(&solution) {
        ProblemClass::Poisson => {
            let f = |p| solution.poisson_f(p);
            let g = |p| solution.poisson_u(p);
            let u = solve_poisson(
                cx,
                &dual,
                &hodge,
                spec.inverse_mode,
                &PoissonProblem { f: &f, g: &g },
            )?;
            let exact: Vec<f64> = dual
                .triangle_centers
                .iter()
                .map(|&p| solution.poisson_u(p))
                .collect();
            let e = relative_error(&u.values, &exact, None)?;
            (e, None, None, 1)
        }
        ProblemClass::NavierStokes => {
            let psi_bc = |p, t| solution.psi(p, t);
            let u_bc = |p, t| solution.velocity(p, t);
            let force = |p, t| solution.body_force(p, t).unwrap_or_default();
            let has_force = solution.body_force(crate::geometry::Vec2::default(), 0.0).is_some();
            let problem = FlowProblem {
                bc: BoundaryData {
                    psi: &psi_bc,
                    theta: None,
                    velocity: &u_bc,
                },
                body_force: if has_force { Some(&force) } else { None },
            };
            let mut config = spec.config;
            if config.dt.is_none() {
                // steady cases are marched with an advective step
                let u_scale = 1.0_f64.max(velocity_scale(&solution, cx));
                config.dt = Some(spec.steady_dt_factor * stats.mean_edge_length / u_scale);
            }
            let res = solve_navier_stokes(cx, &dual, &hodge, params, &problem, None, config)?;
            let (e_psi, e_u) = flow_errors(cx, &dual, &hodge, &solution, &res.psi.values, None)?;
            (e_psi, Some(e_u), None, res.steps)
        }
        ProblemClass::Boussinesq => {
            let psi_bc = |p, t| solution.psi(p, t);
            let th_bc = |p, t| solution.theta(p, t);
            let u_bc = |p, t| solution.velocity(p, t);
            let problem = FlowProblem {
                bc: BoundaryData {
                    psi: &psi_bc,
                    theta: Some(&th_bc),
                    velocity: &u_bc,
                },
                body_force: None,
            };
            let t_end = solution.reference_end_time().unwrap();
            let psi0: Vec<f64> = cx.vertex_coords.iter().map(|&p| solution.psi(p, 0.0)).collect();
            let theta0: Vec<f64> = cx
                .vertex_coords
                .iter()
                .map(|&p| solution.theta(p, 0.0))
                .collect();
            let res = solve_boussinesq(
                cx,
                &dual,
                &hodge,
                params,
                &problem,
                Some(&psi0),
                Some(&theta0),
                t_end,
                spec.config,
            )?;
            let (e_psi, e_u) = flow_errors(cx, &dual, &hodge, &solution, &res.psi.values, Some(t_end))?;
            let theta = res.theta.unwrap();
            let exact_theta: Vec<f64> = cx
                .vertex_coords
                .iter()
                .map(|&p| solution.theta(p, t_end))
                .collect();
            let e_theta = relative_error(&theta.values, &exact_theta, None)?;
            (e_psi, Some(e_u), Some(e_theta), res.steps)
        }
    };

    Ok(CaseReport {
        mesh_kind: mesh_kind_name(&spec.recipe),
        n: spec.recipe.n,
        dx_mean: stats.mean_edge_length,
        num_triangles: stats.num_triangles,
        strategy: spec.strategy.name().to_string(),
        problem: spec.problem.clone(),
        err_psi,
        err_u,
        err_theta,
        steps,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn velocity_scale(solution: &ExactSolution, cx: &SimplicialComplex2) -> f64 {
    cx.vertex_coords
        .iter()
        .map(|&p| solution.velocity(p, 0.0).norm())
        .fold(0.0, f64::max)
}

fn flow_errors(
    cx: &SimplicialComplex2,
    dual: &crate::dual::DualMesh,
    hodge: &HodgeOperators,
    solution: &ExactSolution,
    psi: &[f64],
    at_time: Option<f64>,
) -> Result<(f64, f64), HarnessError> {
    let t = at_time.unwrap_or(0.0);
    let exact_psi: Vec<f64> = cx.vertex_coords.iter().map(|&p| solution.psi(p, t)).collect();
    let e_psi = relative_error(psi, &exact_psi, None)?;
    let _ = hodge;
    let recon = crate::ns::reconstruct_velocity(cx, psi);
    let mut num = Vec::with_capacity(2 * recon.len());
    let mut exact = Vec::with_capacity(2 * recon.len());
    let mut weights = Vec::with_capacity(2 * recon.len());
    for (v, u) in recon.iter().enumerate() {
        let ue = solution.velocity(cx.vertex_coords[v], t);
        num.push(u.x);
        num.push(u.y);
        exact.push(ue.x);
        exact.push(ue.y);
        weights.push(dual.dual_cell_areas[v]);
        weights.push(dual.dual_cell_areas[v]);
    }
    let e_u = relative_error(&num, &exact, Some(&weights))?;
    Ok((e_psi, e_u))
}

fn mesh_kind_name(recipe: &MeshRecipe) -> String {
    match &recipe.kind {
        crate::meshgen::MeshKind::Right => "right".to_string(),
        crate::meshgen::MeshKind::Acute => "acute".to_string(),
        crate::meshgen::MeshKind::Perturbed { target_ratio, .. } => {
            format!("perturbed-{:.2}", target_ratio)
        }
    }
}

/// One row per case plus least-squares rates on the final row of each
/// (mesh kind, strategy, problem) group.
#[derive(Clone, Debug, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub mesh_kind: String,
    pub n: usize,
    pub dx_mean: f64,
    pub strategy: String,
    pub problem: String,
    pub err_psi: f64,
    pub err_u: Option<f64>,
    pub err_theta: Option<f64>,
    pub rate_psi: Option<f64>,
    pub rate_u: Option<f64>,
    pub rate_theta: Option<f64>,
}

pub const SWEEP_HEADER: &str =
    "mesh_kind,n,dx_mean,strategy,problem,err_psi,err_u,err_theta,rate_psi,rate_u,rate_theta";

pub fn sweep(cases: &[CaseSpec]) -> Result<SweepTable, HarnessError> {
    let mut rows = Vec::new();
    for spec in cases {
        let report = run_case(spec)?;
        rows.push(SweepRow {
            mesh_kind: report.mesh_kind,
            n: report.n,
            dx_mean: report.dx_mean,
            strategy: report.strategy,
            problem: report.problem,
            err_psi: report.err_psi,
            err_u: report.err_u,
            err_theta: report.err_theta,
            rate_psi: None,
            rate_u: None,
            rate_theta: None,
        });
    }
    fill_group_rates(&mut rows)?;
    Ok(SweepTable { rows })
}

/// Rates are computed per (mesh_kind, strategy, problem) group over all of the
/// group's refinement levels and written on its final row.
pub fn fill_group_rates(rows: &mut [SweepRow]) -> Result<(), HarnessError> {
    let mut groups: std::collections::BTreeMap<(String, String, String), Vec<usize>> =
        Default::default();
    for (i, row) in rows.iter().enumerate() {
        groups
            .entry((row.mesh_kind.clone(), row.strategy.clone(), row.problem.clone()))
            .or_default()
            .push(i);
    }
    for idx in groups.values() {
        if idx.len() < 2 {
            continue;
        }
        let pts_psi: Vec<(f64, f64)> = idx.iter().map(|&i| (rows[i].dx_mean, rows[i].err_psi)).collect();
        let rate_psi = convergence_rate(&pts_psi)?;
        let pts_u: Option<Vec<(f64, f64)>> = idx
            .iter()
            .map(|&i| rows[i].err_u.map(|e| (rows[i].dx_mean, e)))
            .collect();
        let pts_th: Option<Vec<(f64, f64)>> = idx
            .iter()
            .map(|&i| rows[i].err_theta.map(|e| (rows[i].dx_mean, e)))
            .collect();
        let last = *idx.last().unwrap();
        rows[last].rate_psi = Some(rate_psi);
        if let Some(p) = pts_u {
            rows[last].rate_u = Some(convergence_rate(&p)?);
        }
        if let Some(p) = pts_th {
            rows[last].rate_theta = Some(convergence_rate(&p)?);
        }
    }
    Ok(())
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.17e},{},{},{:.17e},{},{},{},{},{}",
                r.mesh_kind,
                r.n,
                r.dx_mean,
                r.strategy,
                r.problem,
                r.err_psi,
                fmt_opt(r.err_u),
                fmt_opt(r.err_theta),
                fmt_opt(r.rate_psi),
                fmt_opt(r.rate_u),
                fmt_opt(r.rate_theta),
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| {
            HarnessError::CsvParse("empty input".into())
        })?;
        if header.trim() != SWEEP_HEADER {
            return Err(HarnessError::CsvParse(format!("unexpected header '{header}'")));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(HarnessError::CsvParse(format!(
                    "line {}: expected 11 fields, got {}",
                    lineno + 2,
                    f.len()
                )));
            }
            let parse = |s: &str| -> Result<f64, HarnessError> {
                s.parse()
                    .map_err(|e| HarnessError::CsvParse(format!("line {}: {e}", lineno + 2)))
            };
            let parse_opt = |s: &str| -> Result<Option<f64>, HarnessError> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    parse(s).map(Some)
                }
            };
            rows.push(SweepRow {
                mesh_kind: f[0].to_string(),
                n: f[1]
                    .parse()
                    .map_err(|e| HarnessError::CsvParse(format!("line {}: {e}", lineno + 2)))?,
                dx_mean: parse(f[2])?,
                strategy: f[3].to_string(),
                problem: f[4].to_string(),
                err_psi: parse(f[5])?,
                err_u: parse_opt(f[6])?,
                err_theta: parse_opt(f[7])?,
                rate_psi: parse_opt(f[8])?,
                rate_u: parse_opt(f[9])?,
                rate_theta: parse_opt(f[10])?,
            });
        }
        Ok(SweepTable { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rect;
    use crate::meshgen::MeshKind;

    fn poisson_case(n: usize) -> CaseSpec {
        CaseSpec {
            recipe: MeshRecipe {
                kind: MeshKind::Right,
                n,
                domain: Rect::UNIT,
            },
            strategy: CenterStrategy::Barycentric,
            problem: "poisson-quadratic".into(),
            inverse_mode: InverseMode::DirectSolve,
            config: SolverConfig::default(),
            steady_dt_factor: 0.4,
        }
    }

    #[test]
    fn sweep_errors_decrease_and_rates_fill() {
        let cases: Vec<CaseSpec> = [5, 9, 17].iter().map(|&n| poisson_case(n)).collect();
        let table = sweep(&cases).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows[0].err_psi > table.rows[1].err_psi);
        assert!(table.rows[1].err_psi > table.rows[2].err_psi);
        assert!(table.rows[2].rate_psi.is_some());
        assert!(table.rows[0].rate_psi.is_none());
        let rate = table.rows[2].rate_psi.unwrap();
        assert!(rate > 1.5, "rate {rate}");
    }

    #[test]
    fn empty_sweep_has_header_only() {
        let table = sweep(&[]).unwrap();
        assert_eq!(table.to_csv().trim(), SWEEP_HEADER);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let table = SweepTable {
            rows: vec![SweepRow {
                mesh_kind: "right".into(),
                n: 9,
                dx_mean: 0.123456789012345678,
                strategy: "barycentric".into(),
                problem: "poisson-quadratic".into(),
                err_psi: 3.4e-5,
                err_u: Some(1.0 / 3.0),
                err_theta: None,
                rate_psi: Some(1.987654321),
                rate_u: None,
                rate_theta: None,
            }],
        };
        let parsed = SweepTable::from_csv(&table.to_csv()).unwrap();
        assert_eq!(parsed.rows, table.rows);
    }
}
