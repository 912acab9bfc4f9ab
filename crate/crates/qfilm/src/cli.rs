//! Command-line surface: classify / minimize2d / minimize3d / gamma-study /
//! stability / analyze.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 on numerical
//! failures (divergence, non-coercive constants, constraint violations, no
//! unbounded witness). Reports are JSON, bulk fields are CSV; identical
//! configs and seeds produce bit-identical outputs.

use crate::analysis::{
    biaxiality_field, boundary_layer_width, find_vortices, gamma_study, stability_report,
    total_winding, VORTEX_NOISE_FLOOR,
};
use crate::config::parse_config;
use crate::energy2d::{ctilde, stability_threshold, EdgeScheme, PotentialSpec};
use crate::energy3d::{minimize_eps, total_energy_eps, z_variation};
use crate::error::Error;
use crate::grid::{DomainShape, Grid2d, Grid3d, QField2d, QField3d};
use crate::io::{read_pfield, write_pfield, write_qfield3d};
use crate::minimizer::{boundary_case1, boundary_case2, initial_guess, minimize_reduced, BoundaryKind};
use crate::surface::{classify_regime, SurfaceCoefficients};
use crate::tensor::QTensor;
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "qfilm",
    about = "Thin-film Landau-de Gennes energies: classification, minimization, diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Square,
    Disc,
}

impl ShapeArg {
    fn to_shape(self) -> DomainShape {
        match self {
            ShapeArg::Square => DomainShape::Square,
            ShapeArg::Disc => DomainShape::Disc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify the bare surface energy into its bounded regime (JSON).
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        c1: f64,
        #[arg(long, allow_negative_numbers = true)]
        c2: f64,
        #[arg(long, allow_negative_numbers = true)]
        c3: f64,
        #[arg(long, allow_negative_numbers = true)]
        c4: f64,
    },
    /// Minimize the reduced 2D functional per the config; writes field.csv,
    /// report.json and history.csv into --out.
    Minimize2d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimize the 3D film energy at the first epsilon of the config list;
    /// writes field3d.csv, report.json and history.csv into --out.
    Minimize3d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Thin-film convergence study over the epsilon list; writes rows.csv
    /// and summary.json into --out.
    GammaStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bifurcation sweep of the trivial branch over a delta ladder (JSON to
    /// stdout).
    Stability {
        #[arg(long)]
        config: PathBuf,
    },
    /// Diagnostics of a stored planar field: vortices, boundary-layer width,
    /// biaxiality (JSON to stdout).
    Analyze {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, value_enum, default_value = "square")]
        shape: ShapeArg,
        /// Anchoring target used when the field file has no `b` column.
        #[arg(long, allow_negative_numbers = true)]
        beta: Option<f64>,
    },
}

/// Runs the CLI on explicit argv (index 0 is the program name) and returns
/// the exit status.
pub fn run_command(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successful exits.
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { 1 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Diverged { .. }
                | Error::NonCoercive { .. }
                | Error::NoWitnessFound { .. }
                | Error::NotDValued { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cmd: Command) -> crate::error::Result<()> {
    match cmd {
        Command::Classify { c1, c2, c3, c4 } => {
            let report = classify_regime(&SurfaceCoefficients::new(c1, c2, c3, c4));
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(())
        }
        Command::Minimize2d { config, out } => minimize2d(&config, &out),
        Command::Minimize3d { config, out } => minimize3d(&config, &out),
        Command::GammaStudy { config, out } => run_gamma_study(&config, &out),
        Command::Stability { config } => run_stability(&config),
        Command::Analyze { field, shape, beta } => analyze(&field, shape.to_shape(), beta),
    }
}

fn load_config(path: &Path) -> crate::error::Result<crate::config::RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let (cfg, warnings) = parse_config(&text)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn write_history(path: &Path, history: &[(usize, f64, f64)]) -> crate::error::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "iteration,energy,residual")?;
    for &(it, e, r) in history {
        writeln!(out, "{it},{e:.16e},{r:.16e}")?;
    }
    Ok(())
}

fn boundary_for(cfg: &crate::config::RunConfig, grid: &Grid2d) -> crate::minimizer::BoundaryData {
    match cfg.boundary_kind() {
        BoundaryKind::Case1 => boundary_case1(grid, cfg.beta),
        BoundaryKind::Case2 { degree } => boundary_case2(grid, degree, cfg.beta),
    }
}

fn minimize2d(config: &Path, out: &Path) -> crate::error::Result<()> {
    let cfg = load_config(config)?;
    let grid = Grid2d::new(cfg.domain_shape(), cfg.nx, cfg.ny);
    let scheme = EdgeScheme::build(&grid);
    let ec = cfg.elastic();
    let mp = cfg.model_params()?;
    let spec = PotentialSpec::from_model(&ec, &mp);
    let bd = boundary_for(&cfg, &grid);
    let solver_cfg = cfg.solver_config()?;

    // With the leading anchoring absent the normal eigenvalue is a free
    // unknown per node; otherwise it is pinned to beta and the reduced
    // planar functional applies.
    let free_b = cfg.alpha0 == 0.0 && cfg.alpha1 > 0.0;
    let (field, report, breakdown) = if free_b {
        let boundary_q: Vec<crate::tensor::QTensor> = bd
            .values
            .iter()
            .map(|&(p1, p2)| {
                crate::tensor::q_from_p(&crate::tensor::PVector::new(p1, p2, cfg.beta))
            })
            .collect();
        let (field, breakdown, report) =
            crate::minimizer::minimize_f0_full(&grid, &boundary_q, &ec, &mp, &solver_cfg)?;
        (field, report, breakdown)
    } else {
        let (mut field, report) = minimize_reduced(&grid, &scheme, &bd, &spec, &solver_cfg)?;
        field.b = Some(vec![cfg.beta; grid.num_nodes()]);
        let qf = QField2d::from_pfield(&grid, &field);
        let breakdown = crate::energy2d::f0_energy_unchecked(&grid, &qf, &ec, &mp);
        (field, report, breakdown)
    };
    let stability = stability_threshold(&grid, &scheme, &spec);

    std::fs::create_dir_all(out)?;
    write_pfield(&out.join("field.csv"), &grid, &field)?;
    write_history(&out.join("history.csv"), &report.history)?;
    let doc = json!({
        "command": "minimize2d",
        "config": cfg,
        "free_b": free_b,
        "potential": spec,
        "stability": stability,
        "solve": report,
        "f0_breakdown": breakdown,
        "boundary_winding": bd.winding(),
    });
    std::fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&doc).expect("report serializes"),
    )?;
    println!(
        "minimize2d: energy {:.12e}, iterations {}, residual {:.3e}, converged {}",
        report.energy, report.iterations, report.residual, report.converged
    );
    Ok(())
}


fn minimize3d(config: &Path, out: &Path) -> crate::error::Result<()> {
    let cfg = load_config(config)?;
    let grid3 = Grid3d::new(cfg.domain_shape(), cfg.nx, cfg.ny, cfg.nz);
    let ec = cfg.elastic();
    let mp = cfg.model_params()?;
    let bd = boundary_for(&cfg, &grid3.base);
    let p_init = initial_guess(&grid3.base, &bd, PotentialSpec::from_model(&ec, &mp).delta);
    let q2 = QField2d::from_pfield(&grid3.base, &p_init);
    let mut init = QField3d::extend_2d(&grid3, &q2);

    // Seeded symmetry-breaking perturbation on free nodes.
    let solver_cfg = cfg.solver_config()?;
    let mut rng = StdRng::seed_from_u64(solver_cfg.seed);
    for id in 0..grid3.num_nodes() {
        if grid3.is_free(id) {
            let amp = solver_cfg.perturbation;
            let d = QTensor::new(
                rng.gen_range(-amp..amp),
                rng.gen_range(-amp..amp),
                rng.gen_range(-amp..amp),
                rng.gen_range(-amp..amp),
                rng.gen_range(-amp..amp),
            );
            init.q[id] = init.q[id].add(&d);
        }
    }

    let f_eps_initial = total_energy_eps(&grid3, &init, &ec, &mp).total;
    let (field, breakdown, stats) =
        minimize_eps(&grid3, &init, &ec, &mp, solver_cfg.tol, solver_cfg.max_iters)?;

    std::fs::create_dir_all(out)?;
    write_qfield3d(&out.join("field3d.csv"), &grid3, &field)?;
    write_history(&out.join("history.csv"), &stats.history)?;
    let doc = json!({
        "command": "minimize3d",
        "config": cfg,
        "epsilon": mp.epsilon,
        "initial_energy": f_eps_initial,
        "breakdown": breakdown,
        "z_variation": z_variation(&grid3, &field),
        "solve": {
            "iterations": stats.iterations,
            "energy": stats.energy,
            "residual": stats.residual,
            "converged": stats.converged,
        },
    });
    std::fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&doc).expect("report serializes"),
    )?;
    println!(
        "minimize3d: epsilon {}, energy {:.12e}, iterations {}, converged {}",
        mp.epsilon, breakdown.total, stats.iterations, stats.converged
    );
    Ok(())
}

fn run_gamma_study(config: &Path, out: &Path) -> crate::error::Result<()> {
    let cfg = load_config(config)?;
    let ec = cfg.elastic();
    let mp = cfg.model_params()?;
    let grid2 = Grid2d::new(cfg.domain_shape(), cfg.nx, cfg.ny);
    let bd = boundary_for(&cfg, &grid2);
    let solver_cfg = cfg.solver_config()?;
    let study = gamma_study(
        cfg.domain_shape(),
        cfg.nx,
        cfg.ny,
        cfg.nz,
        &ec,
        &mp,
        &cfg.epsilons,
        &bd,
        &solver_cfg,
    )?;

    std::fs::create_dir_all(out)?;
    let mut rows = std::io::BufWriter::new(std::fs::File::create(out.join("rows.csv"))?);
    writeln!(
        rows,
        "epsilon,f_eps_initial,min_f_eps,z_variation,l2_distance_to_2d,iterations,converged"
    )?;
    for r in &study.rows {
        writeln!(
            rows,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.epsilon,
            r.f_eps_initial,
            r.min_f_eps,
            r.z_variation,
            r.l2_distance_to_2d,
            r.iterations,
            r.converged
        )?;
    }
    drop(rows);
    std::fs::write(
        out.join("summary.json"),
        serde_json::to_string_pretty(&json!({
            "command": "gamma-study",
            "config": cfg,
            "study": study,
        }))
        .expect("study serializes"),
    )?;
    println!("gamma-study: min F0 {:.12e}", study.min_f0);
    for r in &study.rows {
        println!(
            "  eps {:>6}: min F_eps {:.12e}, z-variation {:.6e}, gap {:.6e}",
            r.epsilon,
            r.min_f_eps,
            r.z_variation,
            (study.min_f0 - r.min_f_eps).abs()
        );
    }
    Ok(())
}

fn run_stability(config: &Path) -> crate::error::Result<()> {
    let cfg = load_config(config)?;
    let grid = Grid2d::new(cfg.domain_shape(), cfg.nx, cfg.ny);
    let scheme = EdgeScheme::build(&grid);
    let ct = ctilde(cfg.a, cfg.b, cfg.beta);
    let solver_cfg = cfg.solver_config()?;

    // Delta ladder: explicit continuation list, or an automatic sweep across
    // the predicted bifurcation when the potential is nonconvex.
    let deltas = if !cfg.continuation.is_empty() {
        cfg.continuation.clone()
    } else if ct < 0.0 {
        let probe = PotentialSpec::new(ct, 1.0);
        let lambda1 = stability_threshold(&grid, &scheme, &probe).lambda1;
        let dstar2 = -2.0 * ct / lambda1;
        [1.3f64, 1.1, 0.9, 0.75]
            .iter()
            .map(|f| (f * dstar2).sqrt())
            .collect()
    } else {
        vec![0.4, 0.2, 0.1]
    };

    let rows = stability_report(&grid, &scheme, ct, cfg.beta, &deltas, &solver_cfg)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "command": "stability",
            "ctilde": ct,
            "rows": rows,
        }))
        .expect("rows serialize")
    );
    Ok(())
}

fn analyze(field_path: &Path, shape: DomainShape, beta: Option<f64>) -> crate::error::Result<()> {
    let (grid, mut field) = read_pfield(field_path, shape)?;
    if field.b.is_none() {
        match beta {
            Some(b) => field.beta = b,
            None => {
                return Err(Error::Invalid(
                    "field file has no b column; pass --beta".into(),
                ))
            }
        }
    }

    let vortices = find_vortices(&grid, &field);
    let plateau = (0..grid.num_nodes())
        .filter(|&id| grid.node_weight[id] > 0.0)
        .map(|id| field.planar_norm_at(id))
        .fold(0.0f64, f64::max);
    // A field sitting entirely at the roundoff floor has no layer.
    let width = if plateau > VORTEX_NOISE_FLOOR {
        boundary_layer_width(&grid, &field, plateau)
    } else {
        f64::NAN
    };
    let xi = biaxiality_field(&grid, &field);
    let xi_max = xi
        .iter()
        .enumerate()
        .filter(|(id, _)| grid.node_weight[*id] > 0.0)
        .map(|(_, &v)| v)
        .fold(0.0f64, f64::max);
    let xi_at_cores: Vec<f64> = vortices
        .iter()
        .map(|v| {
            let i = ((v.x - grid.x0) / grid.hx).round() as usize;
            let j = ((v.y - grid.y0) / grid.hy).round() as usize;
            xi[grid.node_id(i.min(grid.nx), j.min(grid.ny))]
        })
        .collect();

    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "command": "analyze",
            "total_winding": total_winding(&grid, &field),
            "vortices": vortices,
            "plateau": plateau,
            "boundary_layer_width": if width.is_finite() { Some(width) } else { None },
            "xi_max": xi_max,
            "xi_at_cores": xi_at_cores,
        }))
        .expect("analysis serializes")
    );
    Ok(())
}

/// Everything the binary does; kept separate so tests can drive it.
pub fn run_from_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let argv: Vec<String> = args.into_iter().collect();
    run_command(&argv)
}
