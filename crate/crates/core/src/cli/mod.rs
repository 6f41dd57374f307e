//! Command-line front end: argument parsing, dispatch, exit codes.

pub mod format;

use crate::bands::{caustic_band_and_caustic, regular_band, BandError, BandGrid};
use crate::classify::{
    barycenter_of_band, classify_curve_with, component_count, is_condensed, is_diffuse, lifted_sign,
    reduce_space, rotation_number, ClassifyError, ClassifyOptions, NuMode,
};
use crate::curve::{
    arccot, integrate_frames, total_curvature, translate_curve, translate_space, CurvatureBound,
    CurveError, CurveSamples, SpaceSpec, DEFAULT_N,
};
use crate::geom3::UnitVec3;
use crate::homotopy::{
    add_loops_fn, bending_family, check_bending_space, exotic_f, exotic_sphere_family, find_antipodal_pair,
    graft_antipodal, graft_quadruple, insert_loops_at, make_circle, uniform_grid, validate_with,
    HomotopyError, HomotopyPath, STEP_THRESHOLD,
};
use clap::{Parser, Subcommand, ValueEnum};
use format::{
    band_csv, curve_csv, emit_curve_file, parse_curve_file, parse_manifest, sha256_hex, Bounds,
    Family, FamilyEntry, FileHash, FormatError, Manifest,
};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Computation(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 2,
            CliError::Computation(_) => 1,
        }
    }
    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) | CliError::Io(_) => "validation",
            CliError::Computation(_) => "computation",
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::InvalidInput(_) | CurveError::InvalidSpace(_) | CurveError::DegenerateTranslation { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::NotMember { .. } | ClassifyError::UndefinedForSpace => CliError::Validation(e.to_string()),
            ClassifyError::Curve(c) => c.into(),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<BandError> for CliError {
    fn from(e: BandError) -> Self {
        match e {
            BandError::NotMember { .. } | BandError::InvalidSpace(_) | BandError::NotStrictlyInside { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<HomotopyError> for CliError {
    fn from(e: HomotopyError) -> Self {
        match e {
            HomotopyError::InvalidInput(_)
            | HomotopyError::Obstruction { .. }
            | HomotopyError::WindowOverflow { .. }
            | HomotopyError::NotAntipodal { .. }
            | HomotopyError::Precondition(_)
            | HomotopyError::InvalidFamily(_) => CliError::Validation(e.to_string()),
            HomotopyError::Curve(c) => c.into(),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

fn bound_arg(s: &str) -> Result<CurvatureBound, String> {
    s.parse().map_err(|e: CurveError| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "curvebound", version, about = "Spherical curves with bounded geodesic curvature")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Component of the curve in its space, as JSON.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        m: usize,
        /// Closure tolerance for membership.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Total curvature, lifted sign, condensed/diffuse flags, ν and h_γ.
    Invariants {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        m: usize,
    },
    /// Generate curves or families.
    Gen {
        #[command(subcommand)]
        what: Gen,
    },
    /// Transform a curve file.
    Transform {
        #[command(subcommand)]
        what: Transform,
    },
    /// Validate a homotopy family manifest.
    ValidatePath {
        manifest: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = STEP_THRESHOLD)]
        threshold: f64,
    },
    /// Band of a curve as CSV (t,theta,x,y,z).
    Band {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = BandKindArg::Regular)]
        kind: BandKindArg,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Number of components of the space.
    Count {
        #[arg(long, allow_hyphen_values = true, value_parser = bound_arg)]
        kappa1: CurvatureBound,
        #[arg(long, allow_hyphen_values = true, value_parser = bound_arg)]
        kappa2: CurvatureBound,
    },
    /// Curve as CSV (t,x,y,z,v,kappa).
    Export {
        file: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BandKindArg {
    Regular,
    Caustic,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SpaceArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = bound_arg, default_value = "-inf")]
    pub kappa1: CurvatureBound,
    #[arg(long, allow_hyphen_values = true, value_parser = bound_arg, default_value = "+inf")]
    pub kappa2: CurvatureBound,
}

#[derive(Debug, Subcommand)]
pub enum Gen {
    /// Circle of radius rho traversed k times, Φ(0) = I.
    Circle {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: usize,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bending of the k-equator in L_{-kappa1}^{+kappa1}(I).
    Bending {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        kappa1: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// The exotic sphere family g (or f with --glued) on a Fibonacci grid of points.
    Exotic {
        #[arg(long)]
        kappa1: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long)]
        glued: bool,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Transform {
    /// γ_θ in the translated space.
    Translate {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// F_n(γ) = Φ_γ·σ_n.
    AddLoops {
        file: PathBuf,
        #[arg(long)]
        loops: usize,
        #[arg(long)]
        rho1: Option<f64>,
        #[arg(long, default_value_t = 8)]
        refine: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full circles inserted at a point.
    InsertLoops {
        file: PathBuf,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        loops: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long)]
        rho1: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Antipodal or quadruple graft.
    Graft {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GraftKind::Antipodal)]
        kind: GraftKind,
        #[arg(long)]
        s: f64,
        /// Four comma-separated parameters (quadruple).
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// Four comma-separated radii (quadruple).
        #[arg(long, value_delimiter = ',')]
        rho: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraftKind {
    Antipodal,
    Quadruple,
}

/// Runs one invocation; returns the exit status. Errors go to `err` as JSON.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let words: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(err, "{}", json!({"error": "validation", "message": e.to_string(), "exit_code": 2}));
            return 2;
        }
    };
    match dispatch(cli.command, &words[1..], out) {
        Ok(code) => code,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}));
            e.exit_code()
        }
    }
}

fn read_curve(path: &Path) -> Result<(CurveSamples, SpaceSpec, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let (c, s) = parse_curve_file(text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok((c, s, bytes))
}

fn hash_of(path: &Path, bytes: &[u8]) -> FileHash {
    FileHash {
        path: path.display().to_string(),
        sha256: sha256_hex(bytes),
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("serializable");
    bytes.push(b'\n');
    std::fs::write(path, &bytes)?;
    Ok(bytes)
}

/// Writes `text` to `out` plus a manifest beside it, or prints it when no path is given.
fn emit(text: &str, dest: Option<&Path>, command: &[String], inputs: Vec<FileHash>, out: &mut dyn Write) -> Result<(), CliError> {
    match dest {
        None => {
            out.write_all(text.as_bytes())?;
        }
        Some(p) => {
            std::fs::write(p, text)?;
            let m = Manifest {
                command: command.to_vec(),
                inputs,
                outputs: vec![hash_of(p, text.as_bytes())],
                family: None,
            };
            write_json(&manifest_path(p), &m)?;
        }
    }
    Ok(())
}

fn dispatch(cmd: Command, words: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    let opts = ClassifyOptions::from_env();
    match cmd {
        Command::Classify { file, m, tol } => {
            let (c, s, _) = read_curve(&file)?;
            let mut o = ClassifyOptions { m, ..opts };
            if let Some(t) = tol {
                o.closure_tol = t;
            }
            let r = classify_curve_with(&c, &s, &o)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("serializable"))?;
        }
        Command::Invariants { file, m } => {
            let (c, s, _) = read_curve(&file)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&invariants(&c, &s, &ClassifyOptions { m, ..opts })?).expect("serializable"))?;
        }
        Command::Count { kappa1, kappa2 } => {
            let s = SpaceSpec::new(kappa1, kappa2)?;
            writeln!(out, "{}", component_count(&s))?;
        }
        Command::Export { file, csv } => {
            let (c, _, bytes) = read_curve(&file)?;
            emit(&curve_csv(&c), Some(&csv), words, vec![hash_of(&file, &bytes)], out)?;
        }
        Command::Band { file, kind, m, csv } => {
            let (c, s, bytes) = read_curve(&file)?;
            let band = band_of(&c, &s, kind, m)?;
            emit(&band_csv(&band), Some(&csv), words, vec![hash_of(&file, &bytes)], out)?;
        }
        Command::Gen { what } => gen(what, words, out)?,
        Command::Transform { what } => transform(what, words, out)?,
        Command::ValidatePath { manifest, tol, threshold } => {
            let (report, pass) = validate_manifest(&manifest, tol, threshold)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
            return Ok(if pass { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn band_of(c: &CurveSamples, s: &SpaceSpec, kind: BandKindArg, m: usize) -> Result<BandGrid, CliError> {
    Ok(match kind {
        BandKindArg::Regular => regular_band(&integrate_frames(c), s, m)?,
        BandKindArg::Caustic => {
            let red = reduce_space(c, s)?;
            caustic_band_and_caustic(&integrate_frames(&red.curve), red.kappa0(), m)?.0
        }
    })
}

fn invariants(c: &CurveSamples, s: &SpaceSpec, opts: &ClassifyOptions) -> Result<serde_json::Value, CliError> {
    let red = reduce_space(c, s)?;
    let fc = integrate_frames(&red.curve);
    let mut v = json!({
        "n": c.n(),
        "length": c.length(),
        "total_curvature": total_curvature(c),
        "lifted_sign": lifted_sign(&integrate_frames(c))?,
        "component_count": component_count(s),
        "kappa0": red.kappa0(),
    });
    if red.kappa0().is_finite() {
        let k0 = red.kappa0();
        let cond = is_condensed(&red.curve, k0, opts.m)?;
        let diff = is_diffuse(&red.curve, k0, opts.m)?;
        v["condensed"] = cond.condensed.into();
        v["diffuse"] = diff.diffuse.into();
        v["rotation_number"] = match rotation_number(&red.curve, k0, NuMode::Auto, opts) {
            Ok(r) => r.nu.into(),
            Err(ClassifyError::Unclassifiable) => serde_json::Value::Null,
            Err(e) => return Err(e.into()),
        };
        v["h_gamma"] = if cond.condensed {
            let band = caustic_band_and_caustic(&fc, k0, opts.m)?.0;
            json!(barycenter_of_band(&band, opts.grid_dirs)?.to_array())
        } else {
            serde_json::Value::Null
        };
    }
    Ok(v)
}

fn default_rho1(s: &SpaceSpec) -> f64 {
    // a radius strictly inside (ρ₂, ρ₁), nearest the small end
    let (r1, r2) = (s.rho1(), s.rho2());
    r2 + (r1 - r2) / 4.0
}

fn gen(what: Gen, words: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    match what {
        Gen::Circle { rho, k, n, space, out: dest } => {
            let s = SpaceSpec::new(space.kappa1, space.kappa2)?;
            let c = make_circle(rho, k, 0.0, n)?;
            emit(&emit_curve_file(&c, &s), dest.as_deref(), words, vec![], out)?;
        }
        Gen::Bending { k, kappa1, steps, n, out_dir } => {
            check_bending_space(k, kappa1)?;
            let s = SpaceSpec::symmetric(kappa1)?;
            let grid = uniform_grid(steps);
            let curves = bending_family(k, &grid, n)?;
            let entries: Vec<(f64, CurveSamples, Option<[f64; 3]>)> =
                grid.iter().zip(curves).map(|(s, c)| (*s, c, None)).collect();
            write_family(&out_dir, "bending", &s, entries, words)?;
        }
        Gen::Exotic { kappa1, points, n, glued, out_dir } => {
            let s = SpaceSpec::symmetric(kappa1)?;
            let mut entries = Vec::with_capacity(points);
            for i in 0..points {
                let p = UnitVec3::normalize(crate::convexity::fibonacci_direction(i, points))
                    .map_err(|e| CliError::Computation(e.to_string()))?;
                let c = if glued { exotic_f(kappa1, &p, n)? } else { exotic_sphere_family(kappa1, &p, n)? };
                let sv = if points > 1 { i as f64 / (points - 1) as f64 } else { 0.0 };
                entries.push((sv, c, Some(p.to_array())));
            }
            write_family(&out_dir, if glued { "exotic_f" } else { "exotic_g" }, &s, entries, words)?;
        }
    }
    Ok(())
}

fn write_family(
    dir: &Path,
    kind: &str,
    s: &SpaceSpec,
    entries: Vec<(f64, CurveSamples, Option<[f64; 3]>)>,
    words: &[String],
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    let mut listed = Vec::new();
    for (i, (sv, c, point)) in entries.into_iter().enumerate() {
        let name = format!("curve_{i:04}.json");
        let text = emit_curve_file(&c, s);
        std::fs::write(dir.join(&name), &text)?;
        outputs.push(FileHash {
            path: name.clone(),
            sha256: sha256_hex(text.as_bytes()),
        });
        listed.push(FamilyEntry { s: sv, file: name, point });
    }
    let m = Manifest {
        command: words.to_vec(),
        inputs: vec![],
        outputs,
        family: Some(Family {
            kind: kind.to_string(),
            bounds: Bounds {
                kappa1: s.kappa1.into(),
                kappa2: s.kappa2.into(),
            },
            entries: listed,
        }),
    };
    write_json(&dir.join("manifest.json"), &m)?;
    Ok(())
}

fn transform(what: Transform, words: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let (file, dest) = match &what {
        Transform::Translate { file, out, .. }
        | Transform::AddLoops { file, out, .. }
        | Transform::InsertLoops { file, out, .. }
        | Transform::Graft { file, out, .. } => (file.clone(), out.clone()),
    };
    let (c, s, bytes) = read_curve(&file)?;
    let (c2, s2) = match what {
        Transform::Translate { theta, .. } => (translate_curve(&c, theta)?, translate_space(&s, theta)?),
        Transform::AddLoops { loops, rho1, refine, .. } => {
            (add_loops_fn(&c, loops, rho1.unwrap_or_else(|| default_rho1(&s)), refine)?, s)
        }
        Transform::InsertLoops { t0, loops, eps, rho1, .. } => {
            (insert_loops_at(&c, t0, loops, eps, rho1.unwrap_or_else(|| default_rho1(&s)))?, s)
        }
        Transform::Graft { kind, s: size, t, rho, .. } => {
            let red = reduce_space(&c, &s)?;
            if red.theta != 0.0 {
                return Err(CliError::Validation("grafting needs an upper bound of +inf".into()));
            }
            let rho0 = arccot(s.kappa1.value());
            match kind {
                GraftKind::Antipodal => {
                    let p = find_antipodal_pair(&c, rho0)
                        .ok_or_else(|| CliError::Validation("no antipodal pair of caustic band points".into()))?;
                    (graft_antipodal(&c, p.t1, p.t2, p.rho_a, p.rho_b, size)?, s)
                }
                GraftKind::Quadruple => {
                    let (Ok(t), Ok(rho)) = (<[f64; 4]>::try_from(t), <[f64; 4]>::try_from(rho)) else {
                        return Err(CliError::Validation("quadruple graft needs --t and --rho with four values each".into()));
                    };
                    (graft_quadruple(&c, t, rho, size)?.curve, s)
                }
            }
        }
    };
    emit(&emit_curve_file(&c2, &s2), dest.as_deref(), words, vec![hash_of(&file, &bytes)], out)
}

fn validate_manifest(path: &Path, tol: Option<f64>, threshold: f64) -> Result<(serde_json::Value, bool), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let m = parse_manifest(&text)?;
    let fam = m
        .family
        .ok_or_else(|| CliError::Validation("manifest lists no family".into()))?;
    let k1 = fam.bounds.kappa1.parse()?;
    let k2 = fam.bounds.kappa2.parse()?;
    let space = SpaceSpec::new(k1, k2)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut s_grid = Vec::with_capacity(fam.entries.len());
    let mut curves = Vec::with_capacity(fam.entries.len());
    for e in &fam.entries {
        let text = std::fs::read_to_string(base.join(&e.file))
            .map_err(|err| CliError::Validation(format!("{}: {err}", e.file)))?;
        if let Some(h) = m.outputs.iter().find(|h| h.path == e.file) {
            if h.sha256 != sha256_hex(text.as_bytes()) {
                return Err(CliError::Validation(format!("{}: sha256 does not match the manifest", e.file)));
            }
        }
        // curves are checked against the family space by the validator, not at parse time
        let f: format::CurveFile =
            serde_json::from_str(&text).map_err(|err| CliError::Validation(format!("{}: {err}", e.file)))?;
        let relaxed = format::CurveFile {
            bounds: Bounds {
                kappa1: format::BoundValue::Text("-inf".into()),
                kappa2: format::BoundValue::Text("+inf".into()),
            },
            ..f
        };
        let (c, _) = relaxed.validate().map_err(|err| CliError::Validation(format!("{}: {err}", e.file)))?;
        s_grid.push(e.s);
        curves.push(c);
    }
    if curves.len() < 2 {
        return Err(CliError::Validation("a path needs at least two curves".into()));
    }
    let hp = HomotopyPath::new(space.clone(), s_grid, curves)?;
    let r = validate_with(&hp, &space, tol.unwrap_or(crate::curve::DEFAULT_CLOSURE_TOL), threshold);
    let pass = r.pass;
    Ok((serde_json::to_value(&r).expect("serializable"), pass))
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_command(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
