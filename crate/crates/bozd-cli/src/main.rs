//! `bozd` – command-line front end for the Benjamin–Ono solvers.
//!
//! Every subcommand builds a [`RunConfig`] (from flags or from `--config`),
//! validates it, calls into the `bozd` library and writes CSV/JSON files
//! whose headers embed the canonical configuration.  Exit codes: 0 success,
//! 1 numerical failure or failed verification, 2 invalid input.

mod output;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use bozd::branches::{self, solve_branches, weak_limit_ubar};
use bozd::config::{GridSpec, RunConfig};
use bozd::exact::{nonspecial_check, ExactSolver, TraceOptions};
use bozd::matsuno::{u_matsuno, MatsunoSpec};
use bozd::profile::{heatmap, profile_grid, stokes_graph, ProfileKind};
use bozd::verify::suites::{run_suite, Suite, SuiteOptions, SuiteReport};
use bozd::zd::u_zd_from_branches;
use bozd::{Error, LaxOleinikPoint, RationalInitialData, SolverConfig};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{num, write_json, CsvOut};
use svg::{Labels, Polyline};

#[derive(Parser, Debug)]
#[command(
    name = "bozd",
    version,
    about = "Exact and zero-dispersion solutions of the Benjamin-Ono equation with rational initial data",
    long_about = "Exact and zero-dispersion solutions of u_t + 2 u u_x + eps (|D| u)_x = 0 with rational \
                  initial data u0(x) = sum_n [c_n/(x - p_n) + conj(c_n)/(x - conj(p_n))].\n\n\
                  Grids are given as START or START:END:N.  Output files go to --out-dir and carry the \
                  canonical run configuration as '# ' header lines.  Exit codes: 0 success, 1 numerical \
                  failure or failed verification, 2 invalid input."
)]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true, env = "BO_WORKERS")]
    workers: Option<usize>,
    /// Directory for output files.
    #[arg(long, short = 'o', global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Read the run configuration (TOML, or JSON by extension) instead of
    /// the grid, data and epsilon flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Initial-data file with `poles = [[re, im], ...]` and
    /// `residues = [[re, im], ...]` (TOML, or JSON by extension).
    #[arg(long, conflicts_with = "builtin")]
    data: Option<PathBuf>,
    /// Built-in data set (default two-pole).
    #[arg(long, value_parser = ["lorentzian", "two-pole"])]
    builtin: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative quadrature tolerance of the exact solver.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Level offset of the contour dominance check.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero-dispersion profile on a (t, x) grid: writes profile.csv
    /// (t, x, epsilon, J, ubar, u_zd, u_exact, status) and optionally heatmap.csv.
    Profile {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Times, START or START:END:N.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        /// Positions, START or START:END:N.
        #[arg(long, default_value = "-2:6:81", allow_hyphen_values = true)]
        x: String,
        /// Comma-separated list of epsilon values.
        #[arg(long, value_delimiter = ',', default_value = "0.0625")]
        eps: Vec<f64>,
        /// Also evaluate the exact solution.
        #[arg(long)]
        exact: bool,
        /// Only the weak limit and the phase count (no epsilon).
        #[arg(long)]
        only_ubar: bool,
        /// Also write heatmap.csv of Re(-i h) at the first t and the middle x.
        #[arg(long)]
        heatmap: bool,
        /// Heat-map box in the real direction, RE0,RE1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-10.0, 10.0])]
        heatmap_re: Vec<f64>,
        /// Heat-map box in the imaginary direction, IM0,IM1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-5.0, 5.0])]
        heatmap_im: Vec<f64>,
        /// Heat-map resolution, NRE,NIM.
        #[arg(long, value_delimiter = ',', default_values_t = [201usize, 101])]
        heatmap_n: Vec<usize>,
    },
    /// Exact solution at one point for one or more epsilons (JSON on stdout).
    Exact {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// Write the contours to contours.csv (role, k, re, im, Re(-i h), Im(-i h)).
        #[arg(long)]
        dump_contours: bool,
    },
    /// Zero-dispersion profile and Burgers branches at one point (JSON on stdout).
    Zd {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// N-soliton solution for u0 = 2/(1+x^2) with epsilon = 1/N (JSON on stdout).
    Matsuno {
        /// Number of solitons N.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Caustic positions at given times (caustics.csv), or caustic curves
    /// in a (t, x) window with --scan (caustic_curves.csv).
    Caustics {
        #[command(flatten)]
        data: DataArgs,
        /// Times, START or START:END:N.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        /// Trace curves by marching squares over the t-range and --x-range.
        #[arg(long)]
        scan: bool,
        /// X0,X1 window of the scan.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-5.0, 25.0])]
        x_range: Vec<f64>,
        /// NT,NX grid cells of the scan.
        #[arg(long, value_delimiter = ',', default_values_t = [200usize, 600])]
        resolution: Vec<usize>,
    },
    /// Steepest-descent and -ascent arcs from every critical point in the
    /// closed upper half-plane (stokes.csv).
    StokesTrace {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Stop descent arcs once Im h has dropped this far below the saddle.
        #[arg(long)]
        level_drop: Option<f64>,
    },
    /// Runs verification suites and writes report.json; exits 1 if any
    /// bound fails.
    Verify {
        /// Suite to run (repeatable): paper-table, slope, l2, matsuno-cross,
        /// identities, contours, bounds, caustics, or all.
        #[arg(long, default_value = "all")]
        suite: Vec<String>,
        /// Seed of the randomized suites.
        #[arg(long, default_value_t = SuiteOptions::default().seed)]
        seed: u64,
    },
    /// Quick consistency checks (identities, caustics, bounds, matsuno-cross).
    Selftest,
}

fn parse_grid(s: &str) -> Result<GridSpec, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let f = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidConfig(format!("`{p}` in grid `{s}` is not a number")))
    };
    match parts.as_slice() {
        [a] => GridSpec::new(f(a)?, f(a)?, 1),
        [a, b, n] => {
            let n = n
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("`{n}` in grid `{s}` is not a count")))?;
            GridSpec::new(f(a)?, f(b)?, n)
        }
        _ => Err(Error::InvalidConfig(format!("grid `{s}` must be START or START:END:N"))),
    }
}

/// The two values of a `A,B` option.
fn pair<T: Copy>(v: &[T], flag: &str) -> Result<(T, T), Error> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::InvalidConfig(format!("{flag} takes exactly two comma-separated values, got {}", v.len()))),
    }
}

fn point_grid(v: f64) -> GridSpec {
    GridSpec { start: v, end: v, n: 1 }
}

fn solver_config(args: &SolverArgs) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(q) = args.quad_tol {
        cfg.quad_tol = q;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    cfg
}

/// The run configuration from `--config` or from the flags.
fn resolve_config(cli: &Cli, from_flags: RunConfig) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let c = RunConfig::from_path(path)?;
            if c.subcommand != from_flags.subcommand {
                return Err(Error::InvalidConfig(format!(
                    "configuration is for `{}`, not `{}`",
                    c.subcommand, from_flags.subcommand
                ))
                .into());
            }
            c
        }
        None => from_flags,
    };
    if cfg.data.is_none() && cfg.builtin.is_none() {
        cfg.builtin = Some("two-pole".into());
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if cli.config.is_none() {
        cfg.output_dir = cli.out_dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_data(cfg: &RunConfig) -> Result<RationalInitialData> {
    Ok(match (&cfg.data, cfg.builtin.as_deref()) {
        (Some(p), _) => RationalInitialData::from_path(p)?,
        (None, Some("lorentzian")) => RationalInitialData::lorentzian(),
        _ => RationalInitialData::two_pole_fixture(),
    })
}

fn base_config(sub: &str, data: &DataArgs, t: GridSpec, x: GridSpec, eps: Vec<f64>) -> RunConfig {
    RunConfig {
        subcommand: sub.into(),
        data: data.data.clone(),
        builtin: data.builtin.clone(),
        t,
        x,
        epsilons: eps,
        solver: SolverConfig::default(),
        output_dir: PathBuf::from("."),
        workers: None,
    }
}

/// `profile.svg`: curves against x for a single time, otherwise a heat grid
/// over (x, t) of u_zd at the first epsilon (or of the weak limit).
fn write_profile_svg(
    cfg: &RunConfig,
    kind: &ProfileKind,
    ts: &[f64],
    rows: &[bozd::profile::ProfileRow],
) -> Result<PathBuf> {
    let dir = &cfg.output_dir;
    if ts.len() == 1 {
        let mut lines = vec![Polyline {
            points: rows.iter().filter(|r| r.epsilon.is_nan() || r.epsilon == rows[0].epsilon).map(|r| (r.x, r.ubar)).collect(),
            style: 0,
            dashed: true,
        }];
        if let ProfileKind::Full { epsilons, .. } = kind {
            for (k, &e) in epsilons.iter().enumerate() {
                let sel: Vec<_> = rows.iter().filter(|r| r.epsilon == e).collect();
                lines.push(Polyline { points: sel.iter().map(|r| (r.x, r.u_zd)).collect(), style: 1 + 2 * k, dashed: false });
                if sel.iter().any(|r| r.u_exact.is_some()) {
                    lines.push(Polyline {
                        points: sel.iter().map(|r| (r.x, r.u_exact.unwrap_or(f64::NAN))).collect(),
                        style: 2 + 2 * k,
                        dashed: false,
                    });
                }
            }
        }
        let title = format!("t = {}: ubar (dashed), u_zd and u_exact per epsilon", ts[0]);
        return svg::polylines(dir, "profile.svg", cfg, &Labels { title: &title, x: "x", y: "u" }, &lines);
    }
    let (title, cells): (String, Vec<(f64, f64, f64)>) = match kind {
        ProfileKind::Full { epsilons, .. } => (
            format!("u_zd at epsilon = {}", epsilons[0]),
            rows.iter().filter(|r| r.epsilon == epsilons[0]).map(|r| (r.x, r.t, r.u_zd)).collect(),
        ),
        ProfileKind::WeakLimit => ("weak limit ubar".into(), rows.iter().map(|r| (r.x, r.t, r.ubar)).collect()),
    };
    svg::heat_grid(dir, "profile.svg", cfg, &Labels { title: &title, x: "x", y: "t" }, &cells)
}

/// Prints `v` as pretty JSON; a closed stdout (e.g. `| head`) is not an error.
fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()).into());
        }
        // Fails only if the pool was already set up, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match &cli.command {
        Command::Profile {
            data,
            solver,
            t,
            x,
            eps,
            exact,
            only_ubar,
            heatmap: want_heatmap,
            heatmap_re,
            heatmap_im,
            heatmap_n,
        } => {
            let mut flags = base_config("profile", data, parse_grid(t)?, parse_grid(x)?, if *only_ubar { vec![] } else { eps.clone() });
            flags.solver = solver_config(solver);
            let cfg = resolve_config(cli, flags)?;
            let d = load_data(&cfg)?;
            let ts = cfg.t.points();
            let xs = cfg.x.points();
            let kind = if *only_ubar || cfg.epsilons.is_empty() {
                ProfileKind::WeakLimit
            } else {
                ProfileKind::Full { epsilons: cfg.epsilons.clone(), exact: exact.then(|| cfg.solver.clone()) }
            };
            let rows = profile_grid(&d, &ts, &xs, &kind)?;
            let path = if kind == ProfileKind::WeakLimit {
                let mut out = CsvOut::create(&cfg.output_dir, "profile.csv", &cfg, &["t", "x", "J", "ubar", "status"])?;
                for r in &rows {
                    out.row([num(r.t), num(r.x), j_str(r.j), num(r.ubar), r.status.clone()])?;
                }
                out.finish()?
            } else {
                let mut out = CsvOut::create(
                    &cfg.output_dir,
                    "profile.csv",
                    &cfg,
                    &["t", "x", "epsilon", "J", "ubar", "u_zd", "u_exact", "status"],
                )?;
                for r in &rows {
                    out.row([
                        num(r.t),
                        num(r.x),
                        num(r.epsilon),
                        j_str(r.j),
                        num(r.ubar),
                        num(r.u_zd),
                        r.u_exact.map(num).unwrap_or_default(),
                        r.status.clone(),
                    ])?;
                }
                out.finish()?
            };
            eprintln!("wrote {} ({} rows)", path.display(), rows.len());
            let path = write_profile_svg(&cfg, &kind, &ts, &rows)?;
            eprintln!("wrote {}", path.display());
            if *want_heatmap {
                let pt = LaxOleinikPoint::new(ts[0], xs[xs.len() / 2])?;
                let (re, im, n) = (pair(heatmap_re, "--heatmap-re")?, pair(heatmap_im, "--heatmap-im")?, pair(heatmap_n, "--heatmap-n")?);
                let cells = heatmap(&d, pt, re, im, n);
                let mut out = CsvOut::create(&cfg.output_dir, "heatmap.csv", &cfg, &["re", "im", "re_minus_i_h"])?;
                for &(a, b, v) in &cells {
                    out.row([num(a), num(b), num(v)])?;
                }
                let title = format!("Re(-i h) at t = {}, x = {}", pt.t, pt.x);
                svg::heat_grid(&cfg.output_dir, "heatmap.svg", &cfg, &Labels { title: &title, x: "Re z", y: "Im z" }, &cells)?;
                eprintln!("wrote {} at (t, x) = ({}, {})", out.finish()?.display(), pt.t, pt.x);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact { data, solver, t, x, eps, dump_contours } => {
            let mut flags = base_config("exact", data, point_grid(*t), point_grid(*x), eps.clone());
            flags.solver = solver_config(solver);
            let cfg = resolve_config(cli, flags)?;
            let d = load_data(&cfg)?;
            let s = ExactSolver::new(d.clone(), cfg.solver.clone())?;
            let pt = LaxOleinikPoint::new(cfg.t.start, cfg.x.start)?;
            let eps_ref = cfg.epsilons.iter().copied().fold(0.0, f64::max);
            if eps_ref <= 0.0 {
                return Err(Error::InvalidConfig("at least one epsilon is required".into()).into());
            }
            let set = s.build_contours(pt, eps_ref, None)?;
            let evals = cfg.epsilons.iter().map(|&e| s.evaluate(&set, e)).collect::<bozd::Result<Vec<_>>>()?;
            #[derive(Serialize)]
            struct Out<'a> {
                t: f64,
                x: f64,
                evaluations: &'a [bozd::exact::ExactEvaluation],
                contours_valid: bool,
                validation: &'a [bozd::exact::ValidationReport],
                nonspecial: Option<bozd::exact::NonspecialReport>,
            }
            print_json(&Out {
                t: pt.t,
                x: pt.x,
                evaluations: &evals,
                contours_valid: set.all_valid(),
                validation: &set.reports,
                nonspecial: nonspecial_check(&d, pt).ok(),
            })?;
            if *dump_contours {
                let mut out = CsvOut::create(&cfg.output_dir, "contours.csv", &cfg, &["role", "k", "re", "im", "re_minus_i_h", "im_minus_i_h"])?;
                let mut lines = Vec::new();
                for (i, p) in set.paths.iter().enumerate() {
                    lines.push(Polyline { points: p.dump().iter().map(|r| (r[0], r[1])).collect(), style: i, dashed: false });
                }
                let title = format!("contours at t = {}, x = {}", pt.t, pt.x);
                svg::polylines(&cfg.output_dir, "contours.svg", &cfg, &Labels { title: &title, x: "Re z", y: "Im z" }, &lines)?;
                for p in &set.paths {
                    let role = match p.role {
                        bozd::exact::ContourRole::W0 => "W0".to_string(),
                        bozd::exact::ContourRole::Wn(n) => format!("W{n}"),
                    };
                    for (k, row) in p.dump().iter().enumerate() {
                        out.row([role.clone(), k.to_string(), num(row[0]), num(row[1]), num(row[2]), num(row[3])])?;
                    }
                }
                eprintln!("wrote {}", out.finish()?.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Zd { data, t, x, eps } => {
            let cfg = resolve_config(cli, base_config("zd", data, point_grid(*t), point_grid(*x), eps.clone()))?;
            let d = load_data(&cfg)?;
            let pt = LaxOleinikPoint::new(cfg.t.start, cfg.x.start)?;
            let b = solve_branches(&d, pt)?;
            let u = cfg
                .epsilons
                .iter()
                .map(|&e| u_zd_from_branches(&d, pt, &b, e))
                .collect::<bozd::Result<Vec<_>>>()?;
            #[derive(Serialize)]
            struct Out<'a> {
                t: f64,
                x: f64,
                j: usize,
                ubar: f64,
                branches: &'a bozd::BranchData,
                epsilons: &'a [f64],
                u_zd: Vec<f64>,
            }
            print_json(&Out { t: pt.t, x: pt.x, j: b.j, ubar: weak_limit_ubar(&b), branches: &b, epsilons: &cfg.epsilons, u_zd: u })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Matsuno { n, t, x } => {
            if *n == 0 {
                return Err(Error::InvalidConfig("N must be at least 1".into()).into());
            }
            let data = DataArgs { data: None, builtin: Some("lorentzian".into()) };
            let cfg = resolve_config(cli, base_config("matsuno", &data, point_grid(*t), point_grid(*x), vec![1.0 / *n as f64]))?;
            let nn = (1.0 / cfg.epsilons[0]).round() as usize;
            let spec = MatsunoSpec::new(nn)?;
            let u = u_matsuno(&spec, cfg.t.start, cfg.x.start)?;
            print_json(&serde_json::json!({ "n": nn, "epsilon": spec.epsilon, "t": cfg.t.start, "x": cfg.x.start, "u": u }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Caustics { data, t, scan, x_range, resolution } => {
            let (x0, x1) = pair(x_range, "--x-range")?;
            let (nt, nx) = pair(resolution, "--resolution")?;
            let x = GridSpec::new(x0, x1, nx + 1)?;
            let cfg = resolve_config(cli, base_config("caustics", data, parse_grid(t)?, x, vec![]))?;
            let d = load_data(&cfg)?;
            if *scan {
                let curves = branches::caustic_scan(&d, (cfg.t.start, cfg.t.end), (cfg.x.start, cfg.x.end), (nt, nx))?;
                let mut out = CsvOut::create(&cfg.output_dir, "caustic_curves.csv", &cfg, &["curve", "t", "x"])?;
                for (i, c) in curves.iter().enumerate() {
                    for (tt, xx) in &c.points {
                        out.row([i.to_string(), num(*tt), num(*xx)])?;
                    }
                }
                eprintln!("wrote {} ({} curves)", out.finish()?.display(), curves.len());
                let lines: Vec<Polyline> = curves
                    .iter()
                    .map(|c| Polyline { points: c.points.iter().map(|&(tt, xx)| (xx, tt)).collect(), style: 0, dashed: false })
                    .collect();
                svg::polylines(&cfg.output_dir, "caustic_curves.svg", &cfg, &Labels { title: "caustic curves", x: "x", y: "t" }, &lines)?;
            } else {
                let mut out = CsvOut::create(&cfg.output_dir, "caustics.csv", &cfg, &["t", "x"])?;
                let mut all = Vec::new();
                for tt in cfg.t.points() {
                    let xs = branches::caustic_points(&d, tt)?;
                    for xx in &xs {
                        out.row([num(tt), num(*xx)])?;
                    }
                    all.push(serde_json::json!({ "t": tt, "caustics": xs }));
                }
                print_json(&all)?;
                eprintln!("wrote {}", out.finish()?.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::StokesTrace { data, t, x, level_drop } => {
            let cfg = resolve_config(cli, base_config("stokes-trace", data, point_grid(*t), point_grid(*x), vec![]))?;
            let d = load_data(&cfg)?;
            let pt = LaxOleinikPoint::new(cfg.t.start, cfg.x.start)?;
            let opts = TraceOptions { level_drop: *level_drop, ..TraceOptions::default() };
            let (arcs, messages) = stokes_graph(&d, pt, &opts)?;
            let mut out = CsvOut::create(&cfg.output_dir, "stokes.csv", &cfg, &["critical", "branch", "k", "re", "im", "im_h"])?;
            for a in &arcs {
                for (k, (z, h)) in a.trace.nodes.iter().zip(&a.trace.h_values).enumerate() {
                    out.row([a.critical.to_string(), a.branch.to_string(), k.to_string(), num(z.re), num(z.im), num(h.im)])?;
                }
            }
            let summary: Vec<_> = arcs
                .iter()
                .map(|a| serde_json::json!({ "critical": a.critical, "saddle": [a.saddle.re, a.saddle.im], "branch": a.branch, "nodes": a.trace.nodes.len(), "stop": a.trace.stop }))
                .collect();
            print_json(&serde_json::json!({ "arcs": summary, "messages": messages }))?;
            let lines: Vec<Polyline> = arcs
                .iter()
                .map(|a| Polyline {
                    points: a.trace.nodes.iter().map(|z| (z.re, z.im)).collect(),
                    style: if a.branch < 2 { 0 } else { 1 },
                    dashed: a.branch >= 2,
                })
                .collect();
            let title = format!("steepest descent (solid) and ascent (dashed) arcs at t = {}, x = {}", pt.t, pt.x);
            svg::polylines(&cfg.output_dir, "stokes.svg", &cfg, &Labels { title: &title, x: "Re z", y: "Im z" }, &lines)?;
            eprintln!("wrote {}", out.finish()?.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let suites = parse_suites(suite)?;
            run_suites(cli, "verify", &suites, *seed)
        }
        Command::Selftest => run_suites(
            cli,
            "selftest",
            &[Suite::Identities, Suite::Caustics, Suite::Bounds, Suite::MatsunoCross],
            SuiteOptions::default().seed,
        ),
    }
}

fn j_str(j: usize) -> String {
    if j == usize::MAX {
        String::new()
    } else {
        j.to_string()
    }
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(n.parse::<Suite>()?);
        }
    }
    out.dedup();
    Ok(out)
}

fn run_suites(cli: &Cli, sub: &str, suites: &[Suite], seed: u64) -> Result<ExitCode> {
    let data = DataArgs { data: None, builtin: None };
    let cfg = resolve_config(cli, base_config(sub, &data, point_grid(1.0), point_grid(0.0), vec![]))?;
    let opts = SuiteOptions { workers: cfg.workers, seed, ..SuiteOptions::default() };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for s in suites {
        let r = run_suite(*s, &opts);
        for c in &r.checks {
            println!(
                "[{}] {}: {}: {} ({}){}",
                if c.passed { "PASS" } else { "FAIL" },
                s,
                c.name,
                c.value,
                c.bound,
                if c.detail.is_empty() { String::new() } else { format!(" - {}", c.detail) }
            );
        }
        reports.push(r);
    }
    let path = write_json(&cfg.output_dir, "report.json", &cfg, &reports)?;
    eprintln!("wrote {}", path.display());
    Ok(if reports.iter().all(|r| r.passed()) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn is_input_error(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::InvalidData { .. } | Error::InvalidConfig(_) | Error::Input(_) | Error::NonPositiveTime(_))
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_input_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
