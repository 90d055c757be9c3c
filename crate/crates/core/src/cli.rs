//! Command-line front end: subcommands emitting CSV and JSON.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::calculus::{origin_probe, random_wall_point, wall_jump_probe, ProbeReport};
use crate::chamber::{classify, fold, ON_WALL_TOL};
use crate::config::{GridSpec, GroupSpec, RunConfig};
use crate::error::{Error, Result};
use crate::groups::Preset;
use crate::linalg::{self, Point};
use crate::polar::{curve_jump_probe, model_H, random_symmetric, random_transversal_curve, sym_eig_model, PolarModel, SymEig3Model};
use crate::smoothing::SmoothChain;
use crate::verify::run_suite;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "orbit-smooth", version, about = "Smooth orbit maps of finite reflection groups")]
pub struct Cli {
    /// Run configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override the sampling seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override the group with a preset such as B2 or I2(5).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fold points from a CSV file into the chamber.
    Fold {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write the group, chain parameters, faces and tube validation as JSON.
    BuildMap,
    /// Sample H on a regular lattice.
    Grid,
    /// Jump probes of H across walls and through the origin.
    Probe {
        /// Summary JSON path; next to `--out` or on stderr when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Model H on symmetric 3x3 matrices.
    DemoSym3 {
        /// Rows of 6 packed or 9 full matrix entries.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of random matrices without `--input`.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Run the acceptance suite and write its JSON summary.
    Verify,
}

/// Outcome of a command that completed without error.
pub struct Outcome {
    pub exit: u8,
    pub stderr: Option<String>,
}

impl Outcome {
    fn ok() -> Self {
        Self { exit: EXIT_OK, stderr: None }
    }
}

pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &cli.preset {
        cfg.group = GroupSpec::Preset(name.parse::<Preset>()?);
    }
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.to_string_lossy().into_owned());
    }
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = load_config(cli)?;
    let out = cfg.output.as_ref().map(PathBuf::from);
    match &cli.command {
        Command::Fold { input } => {
            let chain = cfg.build_chain()?;
            emit(out.as_deref(), &cmd_fold(&chain, &fs::read_to_string(input)?, cfg.suite.seed)?)?;
            Ok(Outcome::ok())
        }
        Command::BuildMap => {
            let chain = cfg.build_chain()?;
            let (text, valid) = cmd_build_map(&chain, &cfg)?;
            emit(out.as_deref(), &text)?;
            valid?;
            Ok(Outcome::ok())
        }
        Command::Grid => {
            let chain = cfg.build_chain()?;
            let grid = cfg.grid.clone().unwrap_or_else(|| GridSpec::cube(chain.group.dimension));
            emit(out.as_deref(), &cmd_grid(&chain, &grid, cfg.suite.seed)?)?;
            Ok(Outcome::ok())
        }
        Command::Probe { summary } => {
            let chain = cfg.build_chain()?;
            let (csv, json) = cmd_probe(&chain, &cfg)?;
            emit(out.as_deref(), &csv)?;
            match (summary, &out) {
                (Some(p), _) => fs::write(p, json)?,
                (None, Some(o)) => fs::write(o.with_extension("summary.json"), json)?,
                (None, None) => return Ok(Outcome { exit: EXIT_OK, stderr: Some(json) }),
            }
            Ok(Outcome::ok())
        }
        Command::DemoSym3 { input, count } => {
            let text = input.as_ref().map(fs::read_to_string).transpose()?;
            emit(out.as_deref(), &cmd_demo_sym3(&cfg, text.as_deref(), *count)?)?;
            Ok(Outcome::ok())
        }
        Command::Verify => {
            let chain = cfg.build_chain()?;
            let (text, pass) = cmd_verify(&chain, &cfg)?;
            emit(out.as_deref(), &text)?;
            Ok(Outcome { exit: if pass { EXIT_OK } else { EXIT_VERIFY_FAILED }, stderr: None })
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_row(s: &mut String, cells: impl IntoIterator<Item = String>) {
    let cells: Vec<String> = cells.into_iter().collect();
    s.push_str(&cells.join(","));
    s.push('\n');
}

fn axis_names(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

/// Points, one per row, comma-separated; blank lines and `#` lines are skipped.
pub fn parse_points(text: &str, dim: usize) -> Result<Vec<Point>> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { row, message: format!("bad coordinate `{}`", c.trim()) })
            })
            .collect::<Result<_>>()?;
        if vals.len() != dim {
            return Err(Error::Parse { row, message: format!("expected {dim} coordinates, got {}", vals.len()) });
        }
        pts.push(Point::from_vec(vals));
    }
    Ok(pts)
}

pub fn cmd_fold(chain: &SmoothChain, input: &str, seed: u64) -> Result<String> {
    let n = chain.group.dimension;
    let pts = parse_points(input, n)?;
    let mut s = format!("# seed={seed}\n");
    push_row(
        &mut s,
        axis_names("x", n)
            .chain(axis_names("image", n))
            .chain(["level", "wall_count", "word_length"].map(String::from)),
    );
    for p in &pts {
        let f = fold(&chain.group, &chain.chamber, p)?;
        let d = classify(&chain.group, &f.image, ON_WALL_TOL);
        push_row(
            &mut s,
            p.iter()
                .chain(f.image.iter())
                .map(|&v| num(v))
                .chain([d.level, d.walls_containing.len(), f.element.word.len()].map(|v| v.to_string())),
        );
    }
    Ok(s)
}

#[derive(Serialize)]
struct FaceDump {
    index: usize,
    walls: Vec<usize>,
    level: usize,
    span_basis: Vec<Vec<f64>>,
    rays: Vec<Vec<f64>>,
}

fn vecs(v: &[Point]) -> Vec<Vec<f64>> {
    v.iter().map(|p| p.iter().cloned().collect()).collect()
}

/// JSON of the chain and the result of tube validation.
pub fn cmd_build_map(chain: &SmoothChain, cfg: &RunConfig) -> Result<(String, Result<()>)> {
    let faces: Vec<FaceDump> = chain
        .stratification
        .faces
        .iter()
        .map(|f| FaceDump {
            index: f.index,
            walls: f.walls.clone(),
            level: f.level,
            span_basis: vecs(&f.span_basis),
            rays: vecs(&f.rays),
        })
        .collect();
    let (validation, outcome) = match chain.validate_tubes(cfg.suite.tube_samples, cfg.suite.seed) {
        Ok(r) => (json!({ "pass": true, "report": r }), Ok(())),
        Err(e) => (json!({ "pass": false, "error": e.to_string() }), Err(e)),
    };
    let doc = json!({
        "seed": cfg.suite.seed,
        "group": chain.group.dump(),
        "profile": chain.profile,
        "tubes": chain.tubes,
        "faces": faces,
        "validation": validation,
    });
    Ok((to_json(&doc), outcome))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn cmd_grid(chain: &SmoothChain, grid: &GridSpec, seed: u64) -> Result<String> {
    let n = chain.group.dimension;
    if n > 3 {
        return Err(Error::config(format!("grid needs a group in dimension at most 3, got {n}")));
    }
    if grid.lower.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: grid.lower.len() });
    }
    let mut s = format!("# seed={seed}\n");
    push_row(&mut s, axis_names("x", n).chain(axis_names("h", n)).chain(["level".to_string()]));
    if (0..n).any(|i| grid.upper[i] < grid.lower[i]) {
        return Ok(s);
    }
    let coord = |axis: usize, k: usize| {
        let m = grid.nodes[axis];
        if m == 1 {
            grid.lower[axis]
        } else {
            grid.lower[axis] + (grid.upper[axis] - grid.lower[axis]) * k as f64 / (m - 1) as f64
        }
    };
    let total: usize = grid.nodes.iter().product();
    for flat in 0..total {
        let mut rem = flat;
        let mut p = Point::zeros(n);
        for axis in (0..n).rev() {
            p[axis] = coord(axis, rem % grid.nodes[axis]);
            rem /= grid.nodes[axis];
        }
        let h = chain.apply_H(&p)?;
        let level = classify(&chain.group, &p, ON_WALL_TOL).level;
        push_row(&mut s, p.iter().chain(h.iter()).map(|&v| num(v)).chain([level.to_string()]));
    }
    Ok(s)
}

#[derive(Serialize)]
struct ProbeSummary {
    point: usize,
    kind: &'static str,
    location: Vec<f64>,
    length_scale: f64,
    orders: Vec<usize>,
    slopes: Vec<f64>,
    control_slopes: Option<Vec<f64>>,
    resolved: usize,
}

/// CSV of jump norms at random wall points and along lines through the
/// origin, and a JSON summary of the fitted slopes.
pub fn cmd_probe(chain: &SmoothChain, cfg: &RunConfig) -> Result<(String, String)> {
    let opts = &cfg.suite;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = chain.group.dimension;
    let mut reports: Vec<(&'static str, Point, ProbeReport)> = Vec::new();
    for _ in 0..opts.wall_points {
        let x = random_wall_point(chain, 0.01, 3.0, &mut rng);
        let r = wall_jump_probe(chain, &x, &opts.probe)?;
        reports.push(("wall", x, r));
    }
    for _ in 0..opts.lines {
        let mut x0 = Point::zeros(n);
        for f in &chain.group.fixed_subspace {
            x0.axpy(rng.random_range(-1.0..1.0), f, 1.0);
        }
        let u = linalg::random_unit(&mut rng, n);
        let r = origin_probe(chain, &x0, &u, &opts.probe)?;
        reports.push(("origin", x0, r));
    }

    let mut csv = format!("# seed={}\n", opts.seed);
    csv.push_str("point,kind,offset,order,jump_norm,control_jump_norm,floor\n");
    let mut summary = Vec::new();
    for (i, (kind, x, r)) in reports.iter().enumerate() {
        for (k, order) in r.orders.iter().enumerate() {
            for (j, d) in r.offsets.iter().enumerate() {
                let control = r.control_jumps.as_ref().map(|c| num(c[k][j])).unwrap_or_default();
                let _ = writeln!(
                    csv,
                    "{i},{kind},{},{order},{},{control},{}",
                    num(*d),
                    num(r.jump_norms[k][j]),
                    num(r.floors[k][j])
                );
            }
        }
        summary.push(ProbeSummary {
            point: i,
            kind,
            location: x.iter().cloned().collect(),
            length_scale: r.length_scale,
            orders: r.orders.clone(),
            slopes: r.slopes.clone(),
            control_slopes: r.control_slopes.clone(),
            resolved: r.resolved,
        });
    }
    let json = to_json(&json!({ "seed": opts.seed, "probes": summary }));
    Ok((csv, json))
}

/// Symmetric matrices, one per row, as 6 packed entries
/// `(s11, s22, s33, s12, s13, s23)` or 9 row-major entries.
pub fn parse_symmetric(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse { row, message: format!("bad entry `{}`", c.trim()) })
            })
            .collect::<Result<_>>()?;
        let m = match v.len() {
            6 => nalgebra::DMatrix::from_row_slice(3, 3, &[v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2]]),
            9 => {
                let m = nalgebra::DMatrix::from_row_slice(3, 3, &v);
                if (&m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
                    return Err(Error::Parse { row, message: "matrix is not symmetric".into() });
                }
                m
            }
            k => return Err(Error::Parse { row, message: format!("expected 6 or 9 entries, got {k}") }),
        };
        out.push(SymEig3Model::pack(&m));
    }
    Ok(out)
}

pub fn cmd_demo_sym3(cfg: &RunConfig, input: Option<&str>, count: usize) -> Result<String> {
    let opts = &cfg.suite;
    let model = sym_eig_model();
    let chain = SmoothChain::with_defaults(model.weyl().clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mats = match input {
        Some(text) => parse_symmetric(text)?,
        None => (0..count).map(|_| random_symmetric(&mut rng)).collect(),
    };
    let mut s = format!("# seed={}\n", opts.seed);
    s.push_str("row,s11,s22,s33,s12,s13,s23,lambda0,lambda1,lambda2,h0,h1,h2,invariance\n");
    for (i, p) in mats.iter().enumerate() {
        let m = SymEig3Model::unpack(p);
        let ev = model.section_map(p)?;
        let h = model_H(&model, &chain, p)?;
        let mut inv: f64 = 0.0;
        for _ in 0..opts.polar_rotations {
            let q = linalg::random_rotation(&mut rng, 3);
            inv = inv.max((model_H(&model, &chain, &model.act(&q, p))? - &h).norm());
        }
        let entries = [m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(0, 1)], m[(0, 2)], m[(1, 2)]];
        push_row(
            &mut s,
            std::iter::once(i.to_string())
                .chain(entries.iter().chain(ev.iter()).chain(h.iter()).map(|&v| num(v)))
                .chain([num(inv)]),
        );
    }
    s.push_str("# curve,raw_jump,h_slope\n");
    for c in 0..opts.curves {
        let curve = random_transversal_curve(&mut rng);
        let r = curve_jump_probe(&model, &chain, &curve, &opts.probe)?;
        let _ = writeln!(s, "# {c},{},{}", num(r.raw_jump), num(r.report.slopes[0]));
    }
    Ok(s)
}

/// JSON summary of the acceptance suite and whether it passed.
pub fn cmd_verify(chain: &SmoothChain, cfg: &RunConfig) -> Result<(String, bool)> {
    let summary = run_suite(chain, cfg.preset(), &cfg.suite);
    Ok((to_json(&summary), summary.pass))
}
