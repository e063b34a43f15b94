//! The `willmore-lab` command line.
//!
//! [`run`] takes the full argument vector and two sinks so it can be driven
//! from tests. Exit status: 0 on success, 1 on a domain error (JSON on
//! stderr), 2 on a usage or spec syntax error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::energetics::{self, epsreg_scan, gauss_bonnet_check, ScanThresholds};
use crate::gauss_map::{self, conservation_residual, harmonicity_residual, YGrid};
use crate::geom::{fundamental_forms, tracefree_density};
use crate::moebius::MoebiusMap;
use crate::normalizer::{self, CenterConfig};
use crate::quadrature::DiskQuadrature;
use crate::residuals::{self, convergence_study, ParamGrid};
use crate::zoo::SurfaceSpec;

/// Version tag written into every CSV header comment.
pub const CSV_VERSION: &str = "v1";

#[derive(Debug, Parser)]
#[command(
    name = "willmore-lab",
    version,
    about = "Curvature energies, conformal Gauss maps and Willmore residuals of analytic surface patches",
    after_help = "Surface specs: plane | sphere r=R | enneper | catenoid | graph h=paraboloid|saddle\n  | weierstrass g=\"..\" dh=\"..\" [base=..] | invert center=(x,y,z) of (S)\n  | moebius \"stage | ...\" of (S) | rescale center=(x,y) scale=s of (S)\n  | perturb amp=a of (S) | grid path=\"file.csv\"\nMöbius stages: translate (x,y,z) | dilate s | rotate (x,y,z) angle | invert (x,y,z)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in surfaces, or print jets and curvature at one point
    Zoo(ZooArgs),
    /// Energy report over one parameter disk
    Analyze(DiskArgs),
    /// Möbius normalization cancelling the average mean curvature of a disk
    Normalize(DiskArgs),
    /// Energy reports over centers × radii with hypothesis gates
    EpsregScan(ScanArgs),
    /// Gauss–Codazzi and Willmore residuals under grid refinement
    Residuals(GridArgs),
    /// Tracefree energy against 2W − 4πχ for round spheres and their Möbius images
    GaussBonnet(ClosedArgs),
    /// Conformal Gauss map identities and harmonicity residuals
    Desitter(DesitterArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Surface spec (see below)
    #[arg(long)]
    surface: Option<String>,
    /// Möbius map applied after the surface
    #[arg(long)]
    moebius: Option<String>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file supplying defaults for any long flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ZooArgs {
    #[command(flatten)]
    common: Common,
    /// Parameter point x,y
    #[arg(long)]
    center: Option<String>,
}

#[derive(Debug, Args)]
struct DiskArgs {
    #[command(flatten)]
    common: Common,
    /// Disk center x,y
    #[arg(long)]
    center: Option<String>,
    /// Disk radius
    #[arg(long)]
    radius: Option<f64>,
    /// Quadrature resolution NRxNT
    #[arg(long)]
    grid: Option<String>,
    /// ε₀ threshold on the tracefree L² norm
    #[arg(long)]
    eps0: Option<f64>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// Disk center x,y (repeatable)
    #[arg(long)]
    center: Vec<String>,
    /// Comma-separated radii
    #[arg(long)]
    radius: Option<String>,
    /// Quadrature resolution NRxNT
    #[arg(long)]
    grid: Option<String>,
    /// ε₀ threshold on the tracefree L² norm
    #[arg(long)]
    eps0: Option<f64>,
    /// C₀ threshold on the weak-L² norm of ∇λ
    #[arg(long)]
    c0: Option<f64>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    common: Common,
    /// Disk center x,y
    #[arg(long)]
    center: Option<String>,
    /// Disk radius
    #[arg(long)]
    radius: Option<f64>,
    /// Coarsest grid half-width n (h = radius/n), refined twice
    #[arg(long)]
    half_width: Option<usize>,
    /// Minimum convergence order required for exit status 0
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct ClosedArgs {
    #[command(flatten)]
    common: Common,
    /// Largest acceptable defect
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct DesitterArgs {
    #[command(flatten)]
    common: Common,
    /// Disk center x,y
    #[arg(long)]
    center: Option<String>,
    /// Disk radius
    #[arg(long)]
    radius: Option<f64>,
    /// Grid half-width n (h = radius/n)
    #[arg(long)]
    half_width: Option<usize>,
    /// Read Y samples (x,y,Y1..Y5) instead of a surface
    #[arg(long)]
    y_grid: Option<PathBuf>,
    /// Write the sampled Y grid as CSV
    #[arg(long)]
    dump: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Domain { kind: &'static str, message: String },
}

type ResidualFn =
    fn(&SurfaceSpec, &ParamGrid) -> Result<residuals::ResidualField, residuals::ResidualError>;

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn domain(kind: &'static str, e: impl std::fmt::Display) -> Failure {
    Failure::Domain {
        kind,
        message: e.to_string(),
    }
}

impl From<crate::zoo::SurfaceError> for Failure {
    fn from(e: crate::zoo::SurfaceError) -> Self {
        if e.is_syntax() {
            Failure::Usage(format!("invalid surface spec: {e}"))
        } else {
            domain("surface", e)
        }
    }
}

/// Flags from a `--config` file, consulted for anything not given on the command line.
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Config(map));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key=value", k + 1)))?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            map.insert(key, value.trim().to_string());
        }
        Ok(Config(map))
    }

    fn str(&self, cli: &Option<String>, key: &str) -> Option<String> {
        cli.clone().or_else(|| self.0.get(key).cloned())
    }

    fn num<T: std::str::FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config: invalid value `{v}` for {key}"))),
        }
    }
}

struct Ctx {
    config: Config,
    format: Format,
    out: Option<PathBuf>,
}

fn parse_pair(text: &str, flag: &str) -> Result<[f64; 2], Failure> {
    let bad = || usage(format!("--{flag}: expected x,y (got `{text}`)"));
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (a, b) = t.split_once(',').ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

fn parse_grid(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || {
        usage(format!(
            "--grid: expected NRxNT with NR ≥ 4, NT ≥ 8 (got `{text}`)"
        ))
    };
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let (nr, nt) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if nr < 4 || nt < 8 {
        return Err(bad());
    }
    Ok((nr, nt))
}

fn positive(v: f64, flag: &str) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{flag} must be positive (got {v})")))
    }
}

fn surface(common: &Common, cfg: &Config) -> Result<SurfaceSpec, Failure> {
    let text = cfg
        .str(&common.surface, "surface")
        .ok_or_else(|| usage("--surface is required"))?;
    let mut spec: SurfaceSpec = text.parse()?;
    if let Some(m) = cfg.str(&common.moebius, "moebius") {
        let map: MoebiusMap = m
            .parse()
            .map_err(|e| usage(format!("invalid --moebius: {e}")))?;
        spec = SurfaceSpec::transformed(map, spec)?;
    }
    Ok(spec)
}

fn emit(ctx: &Ctx, stdout: &mut dyn Write, body: &[u8]) -> Result<(), Failure> {
    match &ctx.out {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| domain("io", format!("{}: {e}", p.display())))
        }
        None => stdout.write_all(body).map_err(|e| domain("io", e)),
    }
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s.into_bytes()
}

fn csv_header(command: &str) -> String {
    format!("# willmore-lab {command} csv {CSV_VERSION}\n")
}

/// Flat CSV of a JSON object: one header row of keys, one row of values.
fn object_csv(command: &str, v: &serde_json::Value) -> Vec<u8> {
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    fn flatten(
        prefix: &str,
        v: &serde_json::Value,
        keys: &mut Vec<String>,
        vals: &mut Vec<String>,
    ) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    flatten(&key, x, keys, vals);
                }
            }
            serde_json::Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    flatten(&format!("{prefix}.{i}"), x, keys, vals);
                }
            }
            serde_json::Value::String(s) => {
                keys.push(prefix.to_string());
                vals.push(format!("\"{}\"", s.replace('"', "\"\"")));
            }
            serde_json::Value::Null => {
                keys.push(prefix.to_string());
                vals.push(String::new());
            }
            other => {
                keys.push(prefix.to_string());
                vals.push(other.to_string());
            }
        }
    }
    flatten("", v, &mut keys, &mut vals);
    format!(
        "{}{}\n{}\n",
        csv_header(command),
        keys.join(","),
        vals.join(",")
    )
    .into_bytes()
}

fn disk(
    center: &Option<String>,
    radius: Option<f64>,
    grid: &Option<String>,
    cfg: &Config,
) -> Result<DiskQuadrature, Failure> {
    let c = match cfg.str(center, "center") {
        Some(t) => parse_pair(&t, "center")?,
        None => [0.0, 0.0],
    };
    let r = positive(cfg.num(radius, "radius")?.unwrap_or(1.0), "radius")?;
    let (nr, nt) = match cfg.str(grid, "grid") {
        Some(t) => parse_grid(&t)?,
        None => (16, 32),
    };
    DiskQuadrature::new(c, r, nr, nt).map_err(|e| usage(e.to_string()))
}

const ZOO_LIST: &[(&str, &str)] = &[
    ("plane", "(x, y, 0)"),
    (
        "sphere r=1",
        "stereographic chart r(2x, 2y, x²+y²−1)/(1+x²+y²)",
    ),
    (
        "enneper",
        "(x − x³/3 + xy², −y + y³/3 − x²y, x² − y²), minimal",
    ),
    ("catenoid", "(cosh x cos y, cosh x sin y, x), minimal"),
    ("graph h=paraboloid", "(x, y, x² + 2y²), not conformal"),
    ("graph h=saddle", "(x, y, x² − y²), not conformal"),
    (
        "weierstrass g=\"z\" dh=\"2\"",
        "Weierstrass data (g, dh); this one is Enneper",
    ),
    (
        "invert center=(0,0,3) of (enneper)",
        "inversion image of any surface",
    ),
    (
        "moebius \"translate (1,0,0) | dilate 2\" of (catenoid)",
        "Möbius image of any surface",
    ),
    (
        "rescale center=(3,0) scale=0.5 of (enneper)",
        "p ↦ S(center + scale·p)",
    ),
    (
        "perturb amp=0.05 of (enneper)",
        "S + amp·(0, 0, x²), not Willmore",
    ),
    (
        "grid path=\"phi.csv\"",
        "samples x,y,phi1,phi2,phi3 on a uniform grid",
    ),
];

fn cmd_zoo(a: &ZooArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    if ctx.config.str(&a.common.surface, "surface").is_none() {
        let body = match ctx.format {
            Format::Json => json_bytes(
                &ZOO_LIST
                    .iter()
                    .map(|(s, d)| json!({"spec": s, "description": d}))
                    .collect::<Vec<_>>(),
            ),
            Format::Csv => {
                let mut s = csv_header("zoo") + "spec,description\n";
                for (spec, d) in ZOO_LIST {
                    s += &format!("\"{}\",\"{}\"\n", spec.replace('"', "\"\""), d);
                }
                s.into_bytes()
            }
        };
        return emit(ctx, stdout, &body);
    }
    let spec = surface(&a.common, &ctx.config)?;
    let p = match ctx.config.str(&a.center, "center") {
        Some(t) => parse_pair(&t, "center")?,
        None => [0.0, 0.0],
    };
    let (f, c) = gauss_map::gauss_map_at(&spec, p)?;
    let j = spec.jet(p)?;
    let v3 = |v: &nalgebra::Vector3<f64>| [v[0], v[1], v[2]];
    let report = json!({
        "surface": spec.to_string(),
        "point": p,
        "phi": v3(&j.phi),
        "phi_x": v3(&j.d1[0]),
        "phi_y": v3(&j.d1[1]),
        "lambda": f.lambda,
        "normal": v3(&f.normal),
        "a11": f.a11, "a12": f.a12, "a22": f.a22,
        "h": f.h,
        "k": f.k,
        "tracefree_density": tracefree_density(&f),
        "conformality_defect": f.conformality_defect,
        "y": c.y.as_slice(),
        "yx": c.yx.as_slice(),
        "yy": c.yy.as_slice(),
    });
    let body = match ctx.format {
        Format::Json => json_bytes(&report),
        Format::Csv => object_csv("zoo", &report),
    };
    emit(ctx, stdout, &body)
}

fn cmd_analyze(a: &DiskArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    let spec = surface(&a.common, &ctx.config)?;
    let q = disk(&a.center, a.radius, &a.grid, &ctx.config)?;
    let report = energetics::energy_report(&spec, &q).map_err(|e| domain("energy", e))?;
    let body = match ctx.format {
        Format::Json => json_bytes(&json!({"surface": spec.to_string(), "report": report})),
        Format::Csv => object_csv(
            "analyze",
            &serde_json::to_value(&report).expect("serialize"),
        ),
    };
    emit(ctx, stdout, &body)
}

fn cmd_normalize(a: &DiskArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    let spec = surface(&a.common, &ctx.config)?;
    let q = disk(&a.center, a.radius, &a.grid, &ctx.config)?;
    let eps0 = positive(ctx.config.num(a.eps0, "eps0")?.unwrap_or(0.1), "eps0")?;
    let r = normalizer::normalize(&spec, &q, &CenterConfig::default(), eps0).map_err(|e| {
        let kind = match e {
            normalizer::NormalizeError::NoRealSphere { .. } => "no_real_sphere",
            normalizer::NormalizeError::NoAdmissibleCenter { .. } => "no_admissible_center",
            _ => "normalize",
        };
        domain(kind, e)
    })?;
    let body = match ctx.format {
        Format::Json => json_bytes(&json!({"surface": spec.to_string(), "result": r})),
        Format::Csv => object_csv("normalize", &serde_json::to_value(&r).expect("serialize")),
    };
    emit(ctx, stdout, &body)
}

fn cmd_scan(a: &ScanArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    let spec = surface(&a.common, &ctx.config)?;
    let mut center_texts = a.center.clone();
    if center_texts.is_empty() {
        if let Some(c) = ctx.config.0.get("center") {
            center_texts = c.split(';').map(str::to_string).collect();
        }
    }
    let centers = if center_texts.is_empty() {
        vec![[0.0, 0.0]]
    } else {
        center_texts
            .iter()
            .map(|t| parse_pair(t, "center"))
            .collect::<Result<_, _>>()?
    };
    let radii: Vec<f64> = match ctx.config.str(&a.radius, "radius") {
        Some(t) => t
            .split(',')
            .map(|r| {
                r.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("--radius: bad value `{r}`")))
                    .and_then(|v| positive(v, "radius"))
            })
            .collect::<Result<_, _>>()?,
        None => vec![1.0],
    };
    let (nr, nt) = match ctx.config.str(&a.grid, "grid") {
        Some(t) => parse_grid(&t)?,
        None => (16, 32),
    };
    let d = ScanThresholds::default();
    let th = ScanThresholds {
        eps0: positive(ctx.config.num(a.eps0, "eps0")?.unwrap_or(d.eps0), "eps0")?,
        c0: positive(ctx.config.num(a.c0, "c0")?.unwrap_or(d.c0), "c0")?,
        ..d
    };
    let rows =
        epsreg_scan(&spec, &centers, &radii, nr, nt, &th).map_err(|e| domain("energy", e))?;
    let body = match ctx.format {
        Format::Json => {
            json_bytes(&json!({"surface": spec.to_string(), "thresholds": th, "rows": rows}))
        }
        Format::Csv => {
            let mut buf = csv_header("epsreg-scan").into_bytes();
            energetics::write_scan_csv(&rows, &mut buf).map_err(|e| domain("io", e))?;
            buf
        }
    };
    emit(ctx, stdout, &body)
}

#[derive(Serialize)]
struct ResidualSummary {
    kind: &'static str,
    study: residuals::ConvergenceStudy,
    min_order: f64,
}

fn cmd_residuals(a: &GridArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    let spec = surface(&a.common, &ctx.config)?;
    let c = match ctx.config.str(&a.center, "center") {
        Some(t) => parse_pair(&t, "center")?,
        None => [0.0, 0.0],
    };
    let r = positive(ctx.config.num(a.radius, "radius")?.unwrap_or(0.5), "radius")?;
    let n = ctx.config.num(a.half_width, "half-width")?.unwrap_or(8);
    let grid = ParamGrid::new(c, r, n).map_err(|e| usage(e.to_string()))?;
    let tol = ctx.config.num(a.tol, "tol")?;
    let kinds: [(&'static str, ResidualFn); 3] = [
        ("gauss_codazzi", residuals::gauss_codazzi_residual),
        ("willmore_classical", residuals::willmore_residual_classical),
        (
            "willmore_divergence",
            residuals::willmore_residual_divergence,
        ),
    ];
    let mut out = Vec::new();
    for (kind, f) in kinds {
        let study = convergence_study(&grid, |g| f(&spec, g)).map_err(|e| domain("residual", e))?;
        out.push(ResidualSummary {
            kind,
            min_order: study.min_order(),
            study,
        });
    }
    let body = match ctx.format {
        Format::Json => json_bytes(&json!({
            "surface": spec.to_string(),
            "center": c,
            "radius": r,
            "willmore": spec.is_willmore(),
            "residuals": out,
        })),
        Format::Csv => {
            let mut s = csv_header("residuals") + "kind,h,max,order,exact\n";
            for o in &out {
                for (k, (h, m)) in o.study.hs.iter().zip(&o.study.maxima).enumerate() {
                    let order = if k == 0 {
                        String::new()
                    } else {
                        format!("{}", o.study.orders[k - 1])
                    };
                    s += &format!("{},{},{:e},{},{}\n", o.kind, h, m, order, o.study.exact);
                }
            }
            s.into_bytes()
        }
    };
    emit(ctx, stdout, &body)?;
    if let Some(t) = tol {
        if let Some(bad) = out.iter().find(|o| !o.study.passes(t)) {
            return Err(domain(
                "convergence",
                format!("{} converges at order {:.3} < {t}", bad.kind, bad.min_order),
            ));
        }
    }
    Ok(())
}

fn cmd_gauss_bonnet(a: &ClosedArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    let spec = surface(&a.common, &ctx.config)?;
    let tol = positive(ctx.config.num(a.tol, "tol")?.unwrap_or(1e-3), "tol")?;
    let r = gauss_bonnet_check(&spec).map_err(|e| match e {
        energetics::EnergyError::UnsupportedClosedSurface(_) => {
            domain("unsupported_closed_surface", e)
        }
        other => domain("energy", other),
    })?;
    let body = match ctx.format {
        Format::Json => json_bytes(&json!({"surface": spec.to_string(), "tol": tol, "report": r})),
        Format::Csv => object_csv(
            "gauss-bonnet",
            &serde_json::to_value(&r).expect("serialize"),
        ),
    };
    emit(ctx, stdout, &body)?;
    if r.defect > tol {
        return Err(domain(
            "gauss_bonnet",
            format!("defect {:e} exceeds {tol:e}", r.defect),
        ));
    }
    Ok(())
}

fn cmd_desitter(a: &DesitterArgs, ctx: &Ctx, stdout: &mut dyn Write) -> Result<(), Failure> {
    let y_path = a
        .y_grid
        .clone()
        .or_else(|| ctx.config.0.get("y-grid").map(PathBuf::from));
    let (y, surface_text, identities) = if let Some(p) = y_path {
        let y = YGrid::read_csv_path(&p).map_err(|e| domain("y_grid", e))?;
        (y, None, None)
    } else {
        let spec = surface(&a.common, &ctx.config)?;
        let c = match ctx.config.str(&a.center, "center") {
            Some(t) => parse_pair(&t, "center")?,
            None => [0.0, 0.0],
        };
        let r = positive(ctx.config.num(a.radius, "radius")?.unwrap_or(0.5), "radius")?;
        let n = ctx.config.num(a.half_width, "half-width")?.unwrap_or(16);
        let grid = ParamGrid::new(c, r, n).map_err(|e| usage(e.to_string()))?;
        let y = YGrid::from_spec(&spec, grid)?;
        let mut worst = [0.0f64; 5];
        for p in grid.nodes() {
            let (f, cj) = gauss_map::gauss_map_at(&spec, p)?;
            let rep = gauss_map::conformality_report(&cj, tracefree_density(&f));
            worst[0] = worst[0].max((crate::lorentz::square(&cj.y) - 1.0).abs());
            for k in 0..3 {
                worst[k + 1] = worst[k + 1].max(rep[k]);
            }
            let f2 = fundamental_forms(&spec.jet(p)?).map_err(crate::zoo::SurfaceError::from)?;
            worst[4] = worst[4].max((gauss_map::recover_h(&cj.y) - f2.h).abs());
        }
        let ids = json!({
            "unit_defect": worst[0],
            "yx_yy_pairing": worst[1],
            "yx_yy_norm_difference": worst[2],
            "energy_density_defect": worst[3],
            "h_recovery_defect": worst[4],
        });
        (y, Some(spec.to_string()), Some(ids))
    };
    let dump = a
        .dump
        .clone()
        .or_else(|| ctx.config.0.get("dump").map(PathBuf::from));
    if let Some(d) = dump {
        let file =
            std::fs::File::create(&d).map_err(|e| domain("io", format!("{}: {e}", d.display())))?;
        y.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| domain("io", e))?;
    }
    let h = harmonicity_residual(&y).map_err(|e| domain("residual", e))?;
    let c = conservation_residual(&y).map_err(|e| domain("residual", e))?;
    let report = json!({
        "surface": surface_text,
        "center": y.grid.center,
        "radius": y.grid.radius,
        "h": y.grid.h(),
        "identities": identities,
        "harmonicity": {"max": h.max, "l2_mean": h.l2_mean},
        "conservation": {"max": c.max, "l2_mean": c.l2_mean},
    });
    let body = match ctx.format {
        Format::Json => json_bytes(&report),
        Format::Csv => object_csv("desitter", &report),
    };
    emit(ctx, stdout, &body)
}

/// The full help text, as printed by `willmore-lab --help`.
pub fn help_text() -> String {
    Cli::command().render_help().to_string()
}

pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let common = match &cli.command {
        Command::Zoo(a) => &a.common,
        Command::Analyze(a) | Command::Normalize(a) => &a.common,
        Command::EpsregScan(a) => &a.common,
        Command::Residuals(a) => &a.common,
        Command::GaussBonnet(a) => &a.common,
        Command::Desitter(a) => &a.common,
    };
    let result = Config::load(common.config.as_deref()).and_then(|config| {
        let format = match common.format {
            Some(f) => f,
            None => match config.0.get("format").map(String::as_str) {
                None | Some("json") => Format::Json,
                Some("csv") => Format::Csv,
                Some(other) => return Err(usage(format!("config: unknown format `{other}`"))),
            },
        };
        let out = common
            .out
            .clone()
            .or_else(|| config.0.get("out").map(PathBuf::from));
        let ctx = Ctx {
            config,
            format,
            out,
        };
        match &cli.command {
            Command::Zoo(a) => cmd_zoo(a, &ctx, stdout),
            Command::Analyze(a) => cmd_analyze(a, &ctx, stdout),
            Command::Normalize(a) => cmd_normalize(a, &ctx, stdout),
            Command::EpsregScan(a) => cmd_scan(a, &ctx, stdout),
            Command::Residuals(a) => cmd_residuals(a, &ctx, stdout),
            Command::GaussBonnet(a) => cmd_gauss_bonnet(a, &ctx, stdout),
            Command::Desitter(a) => cmd_desitter(a, &ctx, stdout),
        }
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(Failure::Domain { kind, message }) => {
            let _ = writeln!(stderr, "{}", json!({"error": kind, "message": message}));
            1
        }
    }
}
