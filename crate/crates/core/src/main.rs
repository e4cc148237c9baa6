//! Command-line front end: evaluate the layered Green's tensor on grids,
//! export far-field patterns, run the self-check suites, and solve the
//! rough-interface scattering problem.
//!
//! Exit codes: 0 on success, 1 on any validation error (bad flags, malformed
//! inputs, unreadable files), 2 when a verify check fails.  All file outputs
//! are written atomically (temp file in the destination directory + rename),
//! and identical inputs plus seeds produce byte-identical outputs.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::io::Write;
use std::path::{Path, PathBuf};

use layered_elastica::bie2d::{IncidentSource, ProfileShape, SolverConfig, SurfaceProfile, TransmissionSolver};
use layered_elastica::green2d::Green2d;
use layered_elastica::green3d::{Green3d, Potential3d};
use layered_elastica::medium::{ElasticMedium, WaveType};
use layered_elastica::quadrature::QuadConfig;
use layered_elastica::specfun::cyl_fun;
use layered_elastica::verify::{run_suite, CheckReport, VerifyOptions, SUITE_ORDER};
use layered_elastica::{Error, Result};

#[derive(Parser)]
#[command(
    name = "layered-elastica",
    about = "Two-layered elastodynamic Green's tensors and a rough-interface scattering solver",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the layered Green's tensor on a grid and write it as CSV.
    Eval(EvalArgs),
    /// Export far-field patterns of the correction potentials as CSV.
    Farfield(FarfieldArgs),
    /// Run self-check suites and report JSON verdicts.
    Verify(VerifyArgs),
    /// Solve the rough-interface transmission scattering problem.
    Solve(SolveArgs),
    /// Print Bessel/Hankel values (debugging aid).
    #[command(hide = true)]
    SpecfunProbe(SpecfunProbeArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Spatial dimension (2 or 3).
    #[arg(long)]
    dim: usize,
    /// Path to the medium JSON {lambda, mu, rho_plus, rho_minus, omega, dim}.
    #[arg(long)]
    medium: PathBuf,
    /// Optional quadrature JSON {tol, node_budget, indent_scale}.
    #[arg(long)]
    quad: Option<PathBuf>,
    /// Source point as a JSON array, e.g. "[0.3, 0.7]".
    #[arg(long)]
    source: String,
    /// Grid spec "x1:a:b:n,x2:c:d:n[,x3:e:f:n]"; the first axis varies
    /// slowest in the output.
    #[arg(long)]
    grid: String,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FarfieldArgs {
    /// Spatial dimension (2 or 3).
    #[arg(long)]
    dim: usize,
    /// Path to the medium JSON.
    #[arg(long)]
    medium: PathBuf,
    /// Optional quadrature JSON.
    #[arg(long)]
    quad: Option<PathBuf>,
    /// Source point as a JSON array.
    #[arg(long)]
    source: String,
    /// Number of angles (2D); offset from grazing directions.
    #[arg(long)]
    angles: Option<usize>,
    /// Number of polar angles (3D).
    #[arg(long)]
    theta: Option<usize>,
    /// Number of azimuthal angles (3D).
    #[arg(long)]
    phi: Option<usize>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (positional); see --suite for the list.
    suite_pos: Option<String>,
    /// Suite name: stress-identity, spectral-residual, sommerfeld, angular,
    /// degenerate, pde-2d, pde-3d, farfield, radiation, solver-flat,
    /// solver-rough.
    #[arg(long)]
    suite: Option<String>,
    /// Run every suite in the documented order.
    #[arg(long)]
    all: bool,
    /// Seed of the randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probe radii of the radiation suite, comma-separated.
    #[arg(long = "R-list", value_name = "R1,R2,...")]
    r_list: Option<String>,
    /// Optional quadrature JSON.
    #[arg(long)]
    quad: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the medium JSON (dim must be 2).
    #[arg(long)]
    medium: PathBuf,
    /// Path to the profile JSON {"type": "flat"|"bump"|"samples", ...}.
    #[arg(long)]
    profile: PathBuf,
    /// Source as "[z1, z2, a1_re, a1_im, a2_re, a2_im]".
    #[arg(long)]
    source: String,
    /// Radius of the computational ball.
    #[arg(long, short = 'R')]
    radius: f64,
    /// Number of boundary (Nyström) nodes.
    #[arg(long, default_value_t = 512)]
    nodes: usize,
    /// Override the volume-mesh divisions per direction (even).
    #[arg(long)]
    mesh_divisions: Option<usize>,
    /// Target volume-mesh points per shortest wavelength.
    #[arg(long, default_value_t = 10.0)]
    ppw: f64,
    /// Samples per direction of the exported field grid.
    #[arg(long, default_value_t = 41)]
    grid_n: usize,
    /// Optional quadrature JSON.
    #[arg(long)]
    quad: Option<PathBuf>,
    /// Output JSON path (the field grid goes to the same path with extension
    /// .csv).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpecfunProbeArgs {
    /// Cylinder-function order (0..=2).
    #[arg(long, default_value_t = 0)]
    order: usize,
    /// Complex argument "re,im".
    #[arg(long)]
    z: String,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are not errors; anything else (unknown flags,
            // missing values) is a validation failure.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    init_threads();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

/// Cap rayon's parallelism from LAYERED_ELASTICA_THREADS if set.
fn init_threads() {
    if let Ok(v) = std::env::var("LAYERED_ELASTICA_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Eval(a) => cmd_eval(a).map(|()| 0),
        Command::Farfield(a) => cmd_farfield(a).map(|()| 0),
        Command::Verify(a) => cmd_verify(a),
        Command::Solve(a) => cmd_solve(a).map(|()| 0),
        Command::SpecfunProbe(a) => cmd_specfun(a).map(|()| 0),
    }
}

// -- shared plumbing ----------------------------------------------------------

fn read_medium(path: &Path, dim: Option<usize>) -> Result<ElasticMedium> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read medium file {}: {e}", path.display())))?;
    let m: ElasticMedium = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed medium JSON {}: {e}", path.display())))?;
    m.validate()?;
    if let Some(d) = dim {
        if m.dim != d {
            return Err(Error::InvalidInput(format!("--dim {d} does not match medium dim {}", m.dim)));
        }
    }
    Ok(m)
}

fn read_quad(path: &Option<PathBuf>) -> Result<QuadConfig> {
    match path {
        None => Ok(QuadConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidInput(format!("cannot read quad file {}: {e}", p.display())))?;
            let q: QuadConfig = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("malformed quad JSON {}: {e}", p.display())))?;
            q.validate()?;
            Ok(q)
        }
    }
}

fn parse_floats(text: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("{what} must be a JSON array of numbers: {e}")))?;
    if v.len() != n {
        return Err(Error::InvalidInput(format!("{what} needs exactly {n} numbers, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} must be finite")));
    }
    Ok(v)
}

/// One axis of a grid spec "name:start:end:count".
struct GridAxis {
    start: f64,
    end: f64,
    count: usize,
}

fn parse_grid(spec: &str, dim: usize) -> Result<Vec<GridAxis>> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != dim {
        return Err(Error::InvalidInput(format!("grid spec needs {dim} axes, got {}", parts.len())));
    }
    let mut axes = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        let fields: Vec<&str> = part.split(':').collect();
        let bad = || Error::InvalidInput(format!("grid axis '{part}' is not of the form x{}:start:end:count", i + 1));
        if fields.len() != 4 || fields[0] != format!("x{}", i + 1) {
            return Err(bad());
        }
        let start: f64 = fields[1].parse().map_err(|_| bad())?;
        let end: f64 = fields[2].parse().map_err(|_| bad())?;
        let count: usize = fields[3].parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !end.is_finite() || end < start {
            return Err(bad());
        }
        axes.push(GridAxis { start, end, count });
    }
    Ok(axes)
}

fn axis_value(a: &GridAxis, i: usize) -> f64 {
    if a.count == 1 {
        a.start
    } else {
        a.start + (a.end - a.start) * i as f64 / (a.count - 1) as f64
    }
}

/// Write `content` to `path` atomically: temp file in the same directory,
/// then rename over the destination.
fn write_atomic(path: &Path, content: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create temp file in {}: {e}", dir.display())))?;
    tmp.write_all(content)?;
    tmp.persist(path)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn fmt(v: f64) -> String {
    // 17 significant digits: round-trips every f64.
    format!("{v:.16e}")
}

// -- eval ---------------------------------------------------------------------

fn cmd_eval(a: EvalArgs) -> Result<()> {
    if a.dim != 2 && a.dim != 3 {
        return Err(Error::InvalidInput(format!("--dim must be 2 or 3, got {}", a.dim)));
    }
    let m = read_medium(&a.medium, Some(a.dim))?;
    let q = read_quad(&a.quad)?;
    let y = parse_floats(&a.source, a.dim, "--source")?;
    let axes = parse_grid(&a.grid, a.dim)?;

    let mut points: Vec<Vec<f64>> = Vec::new();
    if a.dim == 2 {
        for i in 0..axes[0].count {
            for j in 0..axes[1].count {
                points.push(vec![axis_value(&axes[0], i), axis_value(&axes[1], j)]);
            }
        }
    } else {
        for i in 0..axes[0].count {
            for j in 0..axes[1].count {
                for k in 0..axes[2].count {
                    points.push(vec![
                        axis_value(&axes[0], i),
                        axis_value(&axes[1], j),
                        axis_value(&axes[2], k),
                    ]);
                }
            }
        }
    }

    let mut csv = String::new();
    if a.dim == 2 {
        csv.push_str("x1,x2");
        for i in 1..=2 {
            for j in 1..=2 {
                csv.push_str(&format!(",re_G{i}{j},im_G{i}{j}"));
            }
        }
        csv.push('\n');
        let g = Green2d::new(m, q)?;
        for p in &points {
            let gm = g.assemble([p[0], p[1]], [y[0], y[1]])?;
            csv.push_str(&fmt(p[0]));
            csv.push(',');
            csv.push_str(&fmt(p[1]));
            for i in 0..2 {
                for j in 0..2 {
                    csv.push(',');
                    csv.push_str(&fmt(gm.entries[i][j].re));
                    csv.push(',');
                    csv.push_str(&fmt(gm.entries[i][j].im));
                }
            }
            csv.push('\n');
        }
    } else {
        csv.push_str("x1,x2,x3");
        for i in 1..=3 {
            for j in 1..=3 {
                csv.push_str(&format!(",re_G{i}{j},im_G{i}{j}"));
            }
        }
        csv.push('\n');
        let g = Green3d::new(m, q)?;
        for p in &points {
            let gm = g.assemble([p[0], p[1], p[2]], [y[0], y[1], y[2]])?;
            csv.push_str(&fmt(p[0]));
            csv.push(',');
            csv.push_str(&fmt(p[1]));
            csv.push(',');
            csv.push_str(&fmt(p[2]));
            for i in 0..3 {
                for j in 0..3 {
                    csv.push(',');
                    csv.push_str(&fmt(gm.entries[i][j].re));
                    csv.push(',');
                    csv.push_str(&fmt(gm.entries[i][j].im));
                }
            }
            csv.push('\n');
        }
    }
    write_atomic(&a.out, csv.as_bytes())
}

// -- farfield -----------------------------------------------------------------

fn cmd_farfield(a: FarfieldArgs) -> Result<()> {
    let m = read_medium(&a.medium, Some(a.dim))?;
    let q = read_quad(&a.quad)?;
    let y = parse_floats(&a.source, a.dim, "--source")?;
    let mut csv = String::new();
    if a.dim == 2 {
        let n = a
            .angles
            .ok_or_else(|| Error::InvalidInput("--angles is required in 2D".into()))?;
        if n == 0 {
            return Err(Error::InvalidInput("--angles must be positive".into()));
        }
        let g = Green2d::new(m, q)?;
        csv.push_str("angle,wave_type,column,re,im\n");
        for i in 0..n {
            let theta = (i as f64 + 0.5) * 2.0 * std::f64::consts::PI / n as f64;
            if theta.sin().abs() < 2e-3 {
                continue; // grazing directions have no pointwise far field
            }
            for wt in [WaveType::P, WaveType::S] {
                for j in [1usize, 2] {
                    let ff = g.far_field(wt, j, theta, [y[0], y[1]])?;
                    let name = if wt == WaveType::P { "p" } else { "s" };
                    csv.push_str(&format!(
                        "{},{name},{j},{},{}\n",
                        fmt(theta),
                        fmt(ff.value.re),
                        fmt(ff.value.im)
                    ));
                }
            }
        }
    } else if a.dim == 3 {
        let nt = a.theta.ok_or_else(|| Error::InvalidInput("--theta is required in 3D".into()))?;
        let np = a.phi.ok_or_else(|| Error::InvalidInput("--phi is required in 3D".into()))?;
        if nt == 0 || np == 0 {
            return Err(Error::InvalidInput("--theta and --phi must be positive".into()));
        }
        let g = Green3d::new(m, q)?;
        csv.push_str("theta,phi,wave_type,column,component,re,im\n");
        let kinds: Vec<Potential3d> = (1..=3)
            .map(Potential3d::P)
            .chain((1..=3).flat_map(|j| (1..=3).map(move |l| Potential3d::S(j, l))))
            .collect();
        for it in 0..nt {
            let theta = -std::f64::consts::FRAC_PI_2
                + (it as f64 + 0.5) * std::f64::consts::PI / nt as f64;
            if theta.sin().abs() < 2e-3 {
                continue;
            }
            for ip in 0..np {
                let phi = (ip as f64 + 0.5) * 2.0 * std::f64::consts::PI / np as f64;
                for &kind in &kinds {
                    let ff = g.correction_far_field(kind, theta, phi, [y[0], y[1], y[2]])?;
                    let (name, j, l) = match kind {
                        Potential3d::P(j) => ("p", j, 0usize),
                        Potential3d::S(j, l) => ("s", j, l),
                    };
                    csv.push_str(&format!(
                        "{},{},{name},{j},{l},{},{}\n",
                        fmt(theta),
                        fmt(phi),
                        fmt(ff.value.re),
                        fmt(ff.value.im)
                    ));
                }
            }
        }
    } else {
        return Err(Error::InvalidInput(format!("--dim must be 2 or 3, got {}", a.dim)));
    }
    write_atomic(&a.out, csv.as_bytes())
}

// -- verify -------------------------------------------------------------------

#[derive(serde::Serialize)]
struct SuiteReport {
    suite: String,
    checks: Vec<CheckReport>,
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let mut suites: Vec<String> = Vec::new();
    if a.all {
        suites.extend(SUITE_ORDER.iter().map(|s| s.to_string()));
    }
    for s in [&a.suite_pos, &a.suite].into_iter().flatten() {
        if !suites.iter().any(|t| t == s) {
            suites.push(s.clone());
        }
    }
    if suites.is_empty() {
        return Err(Error::InvalidInput(
            "verify needs a suite name, --suite NAME, or --all".into(),
        ));
    }
    let mut opt = VerifyOptions { seed: a.seed, quad: read_quad(&a.quad)?, ..VerifyOptions::default() };
    if let Some(list) = &a.r_list {
        let radii: std::result::Result<Vec<f64>, _> = list.split(',').map(|t| t.trim().parse::<f64>()).collect();
        opt.radii = radii.map_err(|_| Error::InvalidInput(format!("malformed --R-list '{list}'")))?;
    }
    let mut reports = Vec::new();
    let mut all_pass = true;
    for suite in &suites {
        let checks = run_suite(suite, &opt)?;
        all_pass &= checks.iter().all(|c| c.pass);
        reports.push(SuiteReport { suite: suite.clone(), checks });
    }
    let json = serde_json::to_string_pretty(&reports)?;
    match &a.out {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => println!("{json}"),
    }
    Ok(if all_pass { 0 } else { 2 })
}

// -- solve --------------------------------------------------------------------

fn read_profile(path: &Path) -> Result<SurfaceProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read profile file {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed profile JSON {}: {e}", path.display())))?;
    match v.get("type").and_then(|t| t.as_str()) {
        Some("flat") => Ok(SurfaceProfile::flat()),
        Some("bump") | Some("samples") => {
            let shape: ProfileShape = serde_json::from_value(v)
                .map_err(|e| Error::InvalidInput(format!("malformed profile JSON {}: {e}", path.display())))?;
            match shape {
                ProfileShape::Bump { height, radius } => SurfaceProfile::bump(height, radius),
                ProfileShape::Samples { xs, ys } => SurfaceProfile::from_samples(xs, ys),
            }
        }
        _ => Err(Error::InvalidInput(format!(
            "profile JSON {} needs \"type\": \"flat\", \"bump\", or \"samples\"",
            path.display()
        ))),
    }
}

#[derive(serde::Serialize)]
struct SolveHeader {
    medium: ElasticMedium,
    profile: SurfaceProfile,
    source: IncidentSource,
    radius: f64,
    boundary_nodes: usize,
    mesh_divisions: usize,
    mesh_nodes: usize,
    elements: usize,
    field_grid: String,
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let m = read_medium(&a.medium, Some(2))?;
    let profile = read_profile(&a.profile)?;
    let s = parse_floats(&a.source, 6, "--source")?;
    let src = IncidentSource {
        z: [s[0], s[1]],
        a: [Complex64::new(s[2], s[3]), Complex64::new(s[4], s[5])],
    };
    if a.grid_n < 2 {
        return Err(Error::InvalidInput("--grid-n must be at least 2".into()));
    }
    let quad = read_quad(&a.quad)?;
    let cfg = SolverConfig {
        mesh_divisions: a.mesh_divisions,
        points_per_wavelength: a.ppw,
        tail_tol: quad.tol.max(1e-12).min(1e-6),
        volume_weights: None,
    };
    let solver = TransmissionSolver::new(m.clone(), profile.clone(), a.radius, a.nodes, &cfg)?;
    let sol = solver.solve(&src)?;

    let csv_path = a.out.with_extension("csv");
    let ball = solver.ball();
    let header = SolveHeader {
        medium: m,
        profile,
        source: src,
        radius: ball.radius,
        boundary_nodes: ball.boundary_nodes,
        mesh_divisions: ball.mesh_divisions,
        mesh_nodes: ball.mesh_nodes,
        elements: ball.elements,
        field_grid: csv_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };

    // Field grid: scattered part û and total field at the interior points of
    // a uniform grid over the bounding square.
    let mut csv = String::from("x1,x2,re_uhat1,im_uhat1,re_uhat2,im_uhat2,re_utot1,im_utot1,re_utot2,im_utot2\n");
    let n = a.grid_n;
    for i in 0..n {
        let x1 = -a.radius + 2.0 * a.radius * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x2 = -a.radius + 2.0 * a.radius * j as f64 / (n - 1) as f64;
            if (x1 * x1 + x2 * x2).sqrt() > 0.999 * a.radius {
                continue;
            }
            let uh = solver.u_hat_at(&sol, [x1, x2])?;
            let ut = solver.total_field(&sol, [x1, x2])?;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt(x1),
                fmt(x2),
                fmt(uh[0].re),
                fmt(uh[0].im),
                fmt(uh[1].re),
                fmt(uh[1].im),
                fmt(ut[0].re),
                fmt(ut[0].im),
                fmt(ut[1].re),
                fmt(ut[1].im)
            ));
        }
    }
    write_atomic(&a.out, serde_json::to_string_pretty(&header)?.as_bytes())?;
    write_atomic(&csv_path, csv.as_bytes())
}

// -- specfun probe ------------------------------------------------------------

fn cmd_specfun(a: SpecfunProbeArgs) -> Result<()> {
    let parts: Vec<&str> = a.z.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidInput("--z must be \"re,im\"".into()));
    }
    let re: f64 = parts[0].trim().parse().map_err(|_| Error::InvalidInput("bad real part".into()))?;
    let im: f64 = parts[1].trim().parse().map_err(|_| Error::InvalidInput("bad imaginary part".into()))?;
    let z = Complex64::new(re, im);
    let v = cyl_fun(a.order, z)?;
    println!("J{}({z}) = {}", a.order, v.j);
    println!("Y{}({z}) = {}", a.order, v.y);
    println!("H{}({z}) = {}", a.order, v.h1);
    Ok(())
}
