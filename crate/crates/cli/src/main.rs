//! Command-line driver: mesh generation and diagnostics, Hodge accuracy
//! checks, PDE solves and convergence sweeps, all emitting CSV.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dec2d::complex::SimplicialComplex2;
use dec2d::config::Config;
use dec2d::dual::{build_dual, CenterStrategy};
use dec2d::exact::{ExactSolution, Rect};
use dec2d::geometry::Vec2;
use dec2d::harness::{run_case_on, sweep, CaseSpec};
use dec2d::hodge::{assemble_hodge1, hodge_exactness_error, InverseMode};
use dec2d::meshgen::{
    gen_acute_mesh, gen_right_mesh, non_delaunay_ratio, perturb_to_non_delaunay, MeshKind,
    MeshRecipe,
};
use dec2d::ns::SolverConfig;

#[derive(Parser)]
#[command(name = "dec2d", version, about = "2D discrete exterior calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Dual-mesh center strategy.
    #[arg(long, global = true, default_value = "barycentric")]
    strategy: String,
    /// Inverse Hodge application: elementwise | direct-solve.
    #[arg(long, global = true, default_value = "direct-solve")]
    inverse_mode: String,
    /// Solver configuration file with key = value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (CSV or mesh text); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized operations.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh generation, import and diagnostics.
    Mesh {
        #[command(subcommand)]
        action: MeshAction,
    },
    /// Hodge operator checks.
    Hodge {
        #[command(subcommand)]
        action: HodgeAction,
    },
    /// Solve a single problem on one mesh.
    Solve {
        #[command(subcommand)]
        action: SolveAction,
    },
    /// Convergence sweep over refinement levels.
    Converge(ConvergeArgs),
}

#[derive(Subcommand)]
enum MeshAction {
    /// Generate a structured mesh.
    Gen(MeshGenArgs),
    /// Perturb interior vertices toward a non-Delaunay ratio.
    Perturb(MeshPerturbArgs),
    /// Print mesh statistics as key=value lines.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Convert a Gmsh MSH 2.2 ASCII file to the native format.
    Import {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Args)]
struct MeshGenArgs {
    /// right | acute
    #[arg(long)]
    kind: String,
    /// Points per direction (right) or cells per direction (acute).
    #[arg(long)]
    n: usize,
    /// Domain rectangle as x0,y0,x1,y1.
    #[arg(long, default_value = "0,0,1,1")]
    domain: String,
}

#[derive(Args)]
struct MeshPerturbArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Target fraction of non-Delaunay triangles.
    #[arg(long)]
    ratio: f64,
    /// Absolute triangle-area floor as a fraction of the domain area.
    #[arg(long, default_value_t = 1e-8)]
    quality_floor: f64,
}

#[derive(Subcommand)]
enum HodgeAction {
    /// Reproduce the 1-form accuracy table on the unit right triangle and the
    /// 20-point right mesh.
    Check,
}

#[derive(Subcommand)]
enum SolveAction {
    Poisson(SolveArgs),
    Ns(SolveArgs),
    Boussinesq(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Native mesh file; mutually exclusive with --kind/--n.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// right | acute (generated when --in is not given).
    #[arg(long, default_value = "right")]
    kind: String,
    #[arg(long, default_value_t = 17)]
    n: usize,
    /// Exact-solution token naming the case.
    #[arg(long)]
    problem: String,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Exact-solution token.
    #[arg(long)]
    problem: String,
    /// right | acute | perturbed
    #[arg(long, default_value = "right")]
    mesh: String,
    /// Comma-separated strategy tokens.
    #[arg(long, default_value = "barycentric")]
    strategies: String,
    /// Comma-separated refinement levels (points or cells per direction).
    #[arg(long)]
    levels: String,
    /// Non-Delaunay target ratio for --mesh perturbed.
    #[arg(long, default_value_t = 0.15)]
    ratio: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let strategy = CenterStrategy::parse(&cli.strategy)
        .ok_or_else(|| format!("unknown strategy '{}'", cli.strategy))?;
    let inverse_mode = InverseMode::parse(&cli.inverse_mode)
        .ok_or_else(|| format!("unknown inverse mode '{}'", cli.inverse_mode))?;
    let solver_config = match &cli.config {
        Some(path) => Config::read_file(path)?.solver_config()?,
        None => SolverConfig::default(),
    };

    match &cli.command {
        Command::Mesh { action } => match action {
            MeshAction::Gen(args) => {
                let domain = parse_domain(&args.domain)?;
                let cx = match args.kind.as_str() {
                    "right" => gen_right_mesh(args.n, domain)?,
                    "acute" => gen_acute_mesh(args.n, domain)?,
                    other => return Err(format!("unknown mesh kind '{other}'").into()),
                };
                emit(&cli.out, &cx.to_text())
            }
            MeshAction::Perturb(args) => {
                let cx = SimplicialComplex2::read_text_file(&args.input)?;
                let out = perturb_to_non_delaunay(&cx, args.ratio, cli.seed, args.quality_floor)?;
                emit(&cli.out, &out.to_text())
            }
            MeshAction::Stats { input } => {
                let cx = SimplicialComplex2::read_text_file(input)?;
                let s = cx.mesh_stats();
                let text = format!(
                    "vertices={}\nedges={}\ntriangles={}\nmean_edge_length={:.17e}\n\
                     min_area={:.17e}\nmax_area={:.17e}\nmin_angle_deg={:.17e}\n\
                     max_angle_deg={:.17e}\nnon_delaunay_percent={:.17e}\n",
                    s.num_vertices,
                    s.num_edges,
                    s.num_triangles,
                    s.mean_edge_length,
                    s.min_area,
                    s.max_area,
                    s.min_angle_deg,
                    s.max_angle_deg,
                    100.0 * non_delaunay_ratio(&cx),
                );
                emit(&cli.out, &text)
            }
            MeshAction::Import { input } => {
                let text = std::fs::read_to_string(input)?;
                let cx = dec2d::gmsh::import_gmsh(&text)?;
                emit(&cli.out, &cx.to_text())
            }
        },
        Command::Hodge { action } => match action {
            HodgeAction::Check => emit(&cli.out, &hodge_check_csv()?),
        },
        Command::Solve { action } => {
            let (args, class) = match action {
                SolveAction::Poisson(a) => (a, "poisson"),
                SolveAction::Ns(a) => (a, "ns"),
                SolveAction::Boussinesq(a) => (a, "boussinesq"),
            };
            let solution = ExactSolution::by_name(&args.problem)?;
            let expected = match dec2d::harness::classify(&solution) {
                dec2d::harness::ProblemClass::Poisson => "poisson",
                dec2d::harness::ProblemClass::NavierStokes => "ns",
                dec2d::harness::ProblemClass::Boussinesq => "boussinesq",
            };
            if expected != class {
                return Err(format!(
                    "problem '{}' belongs to 'solve {expected}', not 'solve {class}'",
                    args.problem
                )
                .into());
            }
            let cx = match &args.input {
                Some(path) => SimplicialComplex2::read_text_file(path)?,
                None => match args.kind.as_str() {
                    "right" => gen_right_mesh(args.n, solution.domain())?,
                    "acute" => gen_acute_mesh(args.n, solution.domain())?,
                    other => return Err(format!("unknown mesh kind '{other}'").into()),
                },
            };
            let spec = CaseSpec {
                recipe: MeshRecipe {
                    kind: match args.kind.as_str() {
                        "acute" => MeshKind::Acute,
                        _ => MeshKind::Right,
                    },
                    n: args.n,
                    domain: solution.domain(),
                },
                strategy,
                problem: args.problem.clone(),
                inverse_mode,
                config: solver_config,
                steady_dt_factor: 0.4,
            };
            let report = run_case_on(&spec, &cx)?;
            let text = format!(
                "mesh_kind,n,dx_mean,strategy,problem,err_psi,err_u,err_theta,steps,wall_time_s\n\
                 {},{},{:.17e},{},{},{:.17e},{},{},{},{:.6}\n",
                report.mesh_kind,
                report.n,
                report.dx_mean,
                report.strategy,
                report.problem,
                report.err_psi,
                report.err_u.map(|v| format!("{v:.17e}")).unwrap_or_default(),
                report.err_theta.map(|v| format!("{v:.17e}")).unwrap_or_default(),
                report.steps,
                report.wall_time_s,
            );
            emit(&cli.out, &text)
        }
        Command::Converge(args) => {
            let levels: Vec<usize> = args
                .levels
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()?;
            let strategies: Vec<CenterStrategy> = args
                .strategies
                .split(',')
                .map(|s| {
                    CenterStrategy::parse(s.trim())
                        .ok_or_else(|| format!("unknown strategy '{s}'"))
                })
                .collect::<Result<_, _>>()?;
            let solution = ExactSolution::by_name(&args.problem)?;
            let kind = match args.mesh.as_str() {
                "right" => MeshKind::Right,
                "acute" => MeshKind::Acute,
                "perturbed" => MeshKind::Perturbed {
                    target_ratio: args.ratio,
                    seed: cli.seed,
                },
                other => return Err(format!("unknown mesh family '{other}'").into()),
            };
            let mut cases = Vec::new();
            for strat in &strategies {
                for &n in &levels {
                    cases.push(CaseSpec {
                        recipe: MeshRecipe {
                            kind: kind.clone(),
                            n,
                            domain: solution.domain(),
                        },
                        strategy: strat.clone(),
                        problem: args.problem.clone(),
                        inverse_mode,
                        config: solver_config,
                        steady_dt_factor: 0.4,
                    });
                }
            }
            let table = sweep(&cases)?;
            emit(&cli.out, &table.to_csv())
        }
    }
}

fn parse_domain(text: &str) -> Result<Rect, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad domain '{text}': {e}"))?;
    if parts.len() != 4 {
        return Err(format!("domain needs 4 numbers, got {}", parts.len()));
    }
    Ok(Rect {
        x0: parts[0],
        y0: parts[1],
        x1: parts[2],
        y1: parts[3],
    })
}

/// The two reference 1-forms on the single unit right triangle and the
/// 20-point right-triangulated unit square, barycentric and incentric duals.
fn hodge_check_csv() -> Result<String, Box<dyn std::error::Error>> {
    let form1 = |p: Vec2| Vec2::new(p.x - p.y, -(p.x - p.y));
    let star1 = |p: Vec2| Vec2::new(p.x - p.y, p.x - p.y);
    let form2 = |p: Vec2| Vec2::new(p.x + p.y, p.x + p.y);
    let star2 = |p: Vec2| Vec2::new(-(p.x + p.y), p.x + p.y);

    let single = dec2d::build_complex(
        vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
        &[[0, 1, 2]],
    )?;
    let right = gen_right_mesh(20, Rect::UNIT)?;

    let mut out = String::from("mesh,form,strategy,error\n");
    for (mesh_name, cx) in [("single-triangle", &single), ("right-20", &right)] {
        for strat in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
            let dual = build_dual(cx, &strat)?;
            let h1 = assemble_hodge1(cx, &dual)?;
            let e1 = hodge_exactness_error(cx, &dual, &h1, &form1, &star1, 5);
            let e2 = hodge_exactness_error(cx, &dual, &h1, &form2, &star2, 5);
            out.push_str(&format!("{mesh_name},(x-y)(dx-dy),{},{e1:.17e}\n", strat.name()));
            out.push_str(&format!("{mesh_name},(x+y)(dx+dy),{},{e2:.17e}\n", strat.name()));
        }
    }
    Ok(out)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Box<dyn std::error::Error>> {
    match out {
        Some(path) => {
            write_with_parents(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_with_parents(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)
}
