//! Scratch calibration runs for picking sweep levels. Not part of the test
//! suite; prints rates for each table family.

use dec2d::dual::CenterStrategy;
use dec2d::exact::ExactSolution;
use dec2d::harness::{run_case, CaseSpec};
use dec2d::hodge::InverseMode;
use dec2d::meshgen::{MeshKind, MeshRecipe};
use dec2d::norms::convergence_rate;
use dec2d::ns::SolverConfig;

fn spec(kind: MeshKind, n: usize, strategy: CenterStrategy, problem: &str) -> CaseSpec {
    let mode = std::env::var("INVERSE_MODE").unwrap_or_default();
    let solution = ExactSolution::by_name(problem).unwrap();
    CaseSpec {
        recipe: MeshRecipe {
            kind,
            n,
            domain: solution.domain(),
        },
        strategy,
        problem: problem.into(),
        inverse_mode: if mode == "elementwise" { InverseMode::Elementwise } else { InverseMode::DirectSolve },
        config: SolverConfig::default(),
        steady_dt_factor: 0.4,
    }
}

fn run_family(kind: MeshKind, levels: &[usize], strategy: CenterStrategy, problem: &str) {
    let t0 = std::time::Instant::now();
    let mut pts_psi = Vec::new();
    let mut pts_u = Vec::new();
    let mut pts_th = Vec::new();
    for &n in levels {
        let report = run_case(&spec(kind.clone(), n, strategy.clone(), problem)).unwrap();
        pts_psi.push((report.dx_mean, report.err_psi));
        if let Some(e) = report.err_u {
            pts_u.push((report.dx_mean, e));
        }
        if let Some(e) = report.err_theta {
            pts_th.push((report.dx_mean, e));
        }
        eprintln!(
            "  {kind:?} n={n} dx={:.4e} err_psi={:.4e} err_u={:?} err_th={:?} steps={}",
            report.dx_mean, report.err_psi, report.err_u, report.err_theta, report.steps
        );
    }
    if pts_psi.len() < 2 {
        println!("{problem} {kind:?} {}: single level, no rates [{:.1}s]",
                 strategy.name(), t0.elapsed().as_secs_f64());
        return;
    }
    let r_psi = convergence_rate(&pts_psi).unwrap();
    let r_u = if pts_u.len() > 1 {
        Some(convergence_rate(&pts_u).unwrap())
    } else {
        None
    };
    let r_th = if pts_th.len() > 1 {
        Some(convergence_rate(&pts_th).unwrap())
    } else {
        None
    };
    println!(
        "{problem} {kind:?} {}: rate_psi={r_psi:.3} rate_u={r_u:?} rate_th={r_th:?}  [{:.1}s]",
        strategy.name(),
        t0.elapsed().as_secs_f64()
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).map(String::as_str).unwrap_or("poisson");
    match what {
        "poisson" => {
            let acute_levels = [3usize, 4, 6, 8, 11];
            let right_levels = [11usize, 16, 23, 33];
            for strat in [
                CenterStrategy::Circumcentric,
                CenterStrategy::Barycentric,
                CenterStrategy::Incentric,
            ] {
                run_family(MeshKind::Acute, &acute_levels, strat, "poisson-quadratic");
            }
            for strat in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
                run_family(MeshKind::Right, &right_levels, strat, "poisson-quadratic");
            }
            for strat in [
                CenterStrategy::Circumcentric,
                CenterStrategy::Barycentric,
                CenterStrategy::Incentric,
            ] {
                run_family(MeshKind::Acute, &acute_levels, strat, "poisson-sinsinh");
            }
            for strat in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
                run_family(MeshKind::Right, &right_levels, strat, "poisson-sinsinh");
            }
        }
        "poiseuille" => {
            for strat in [
                CenterStrategy::Circumcentric,
                CenterStrategy::Barycentric,
                CenterStrategy::Incentric,
            ] {
                run_family(MeshKind::Acute, &[4, 6, 8, 11], strat, "poiseuille");
            }
            for strat in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
                run_family(MeshKind::Right, &[9, 17, 33, 49], strat, "poiseuille");
            }
        }
        "taylor-green" => {
            for strat in [
                CenterStrategy::Circumcentric,
                CenterStrategy::Barycentric,
                CenterStrategy::Incentric,
            ] {
                run_family(MeshKind::Acute, &[8, 11, 16, 22], strat, "taylor-green");
            }
            for strat in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
                run_family(MeshKind::Right, &[9, 17, 33], strat, "taylor-green");
            }
        }
        "travel" => {
            for strat in [CenterStrategy::Barycentric, CenterStrategy::Incentric] {
                run_family(MeshKind::Right, &[61], strat, "travel-nu-ne-kappa");
            }
        }
        "perturbed" => {
            for ratio in [0.15, 0.5] {
                run_family(
                    MeshKind::Perturbed {
                        target_ratio: ratio,
                        seed: 20240901,
                    },
                    &[5, 10, 19, 38],
                    CenterStrategy::Barycentric,
                    "travel-nu-eq-kappa",
                );
            }
        }
        other => eprintln!("unknown family {other}"),
    }
}
