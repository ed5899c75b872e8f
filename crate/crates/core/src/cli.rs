//! Command-line front end.
//!
//! Every subcommand writes `<name>.json` and `<name>.txt` (plus any figures
//! or dumps) into the output directory, together with `manifest.json`.
//! The output directory is `--out`, else `$PAPERTORUS_OUT`, else
//! `papertorus-out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::certifier::ift::pup_tent_params_of;
use crate::certifier::{
    build_bundle, format_bundle, ift_certificate, verify_bundle, SeparationKind, SeparationParams,
    DEFAULT_SCALE_EXP,
};
use crate::combinatorics::{proof_log, prove_hull_lemma};
use crate::error::{Error, Result};
use crate::geometry::figures::{development_csv, development_svg, slice_csv, slice_svg};
use crate::geometry::{
    cone_angles, convex_hull, develop, slice_plane, Configuration, Plane, PupTentParams,
};
use crate::mat3::Mat3;
use crate::numeric::{format_decimal, parse_decimal, Precision};
use crate::solver::newton::truncate_decimals;
use crate::solver::search::trace_csv;
use crate::solver::{jacobian, newton_refine_traced, run_chains, JacobianMode, SearchSpec};
use crate::torus_file::{format_torus, read_torus};

pub const OUT_ENV: &str = "PAPERTORUS_OUT";
pub const DEFAULT_OUT: &str = "papertorus-out";
pub const MANIFEST: &str = "manifest.json";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "papertorus",
    version,
    about = "Flat polyhedral tori: hull prover, search and certification"
)]
pub struct Cli {
    /// Seed for randomized subcommands (overrides a search spec's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 64)]
    pub precision: u32,
    /// Worker threads for the data-parallel parts (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Run the 7-vertex hull prover and write its proof log.
    Prove7,
    /// Cone angles and flatness of a torus file.
    Flatness { torus: PathBuf },
    /// Jacobian of the angle map on the symmetric family.
    Jacobian(JacobianArgs),
    /// Newton refinement of the symmetric family.
    Newton(NewtonArgs),
    /// Stochastic search for flat tori.
    Search(SearchArgs),
    /// Exact convex hull and face number.
    Hull { torus: PathBuf },
    /// Separation certificates for every relevant face pair.
    CertifyEmbedding(EmbeddingArgs),
    /// The inverse-function existence chain.
    CertifyIft { torus: PathBuf },
    /// Intrinsic development into the plane.
    Develop(DevelopArgs),
    /// Cross-section by a plane.
    Slice(SliceArgs),
    /// Replay a certificate bundle against a torus file.
    Verify(VerifyArgs),
    /// Repeat the run recorded in a manifest.
    Rerun { manifest: PathBuf },
}

#[derive(Debug, Args, Serialize)]
pub struct JacobianArgs {
    /// Torus file in the symmetric family (default: built-in coordinates).
    #[arg(long)]
    pub torus: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Analytic,
    Difference,
}

#[derive(Debug, Args, Serialize)]
pub struct NewtonArgs {
    /// Stop once the deviation is at most this value, e.g. `1e-60`.
    #[arg(long)]
    pub target: String,
    /// Starting heights `z0,z1,z2` (default: built-in heights truncated).
    #[arg(long)]
    pub start: Option<String>,
    /// Decimals kept when truncating the built-in heights.
    #[arg(long, default_value_t = 8)]
    pub truncate: usize,
    /// Decimals of the refined heights shown in the text report.
    #[arg(long, default_value_t = 32)]
    pub show: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub dihedral_floor: Option<f64>,
    #[arg(long)]
    pub min_angle_floor: Option<f64>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SeparationArgs {
    /// Decimal exponent of the integer scaling.
    #[arg(long, default_value_t = DEFAULT_SCALE_EXP)]
    pub scale: u32,
    /// Half-width of the integer direction cube.
    #[arg(long, default_value_t = crate::certifier::separation::DEFAULT_GRID)]
    pub grid: i64,
    /// Required margin in scaled units (default `6 * 10^30`).
    #[arg(long)]
    pub lambda: Option<String>,
}

impl SeparationArgs {
    fn params(&self) -> Result<SeparationParams> {
        let lambda = match &self.lambda {
            None => SeparationParams::default().lambda,
            Some(s) => parse_lambda(s)?,
        };
        Ok(SeparationParams {
            grid: self.grid,
            lambda,
        })
    }
}

fn parse_lambda(s: &str) -> Result<i128> {
    if let Ok(v) = s.parse::<i128>() {
        return Ok(v);
    }
    // mantissa e exponent, e.g. 6e30
    let bad = || Error::InvalidConfiguration(format!("bad lambda `{s}`"));
    let (m, e) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    let m: i128 = m.parse().map_err(|_| bad())?;
    let e: u32 = e.parse().map_err(|_| bad())?;
    10i128
        .checked_pow(e)
        .and_then(|p| p.checked_mul(m))
        .ok_or_else(bad)
}

#[derive(Debug, Args, Serialize)]
pub struct EmbeddingArgs {
    pub torus: PathBuf,
    #[command(flatten)]
    pub separation: SeparationArgs,
    /// Skip the existence-chain footer.
    #[arg(long)]
    pub no_ift: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DevelopArgs {
    pub torus: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    /// Lattice translates drawn on each side of the fundamental domain.
    #[arg(long, default_value_t = 1)]
    pub copies: i32,
}

#[derive(Debug, Args, Serialize)]
pub struct SliceArgs {
    pub torus: PathBuf,
    /// `px,py,pz,nx,ny,nz`: a point on the plane and its normal.
    #[arg(long, allow_hyphen_values = true)]
    pub plane: String,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    pub bundle: PathBuf,
    pub torus: PathBuf,
    #[command(flatten)]
    pub separation: SeparationArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the program name, without `--out`.
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub precision: u32,
    pub output_dir: String,
    pub version: String,
    pub config: Value,
    pub outputs: Vec<String>,
}

struct Report {
    name: &'static str,
    json: Value,
    text: String,
    extra: Vec<(String, String)>,
    /// A proof or certificate that did not go through.
    failed: bool,
}

impl Report {
    fn new(name: &'static str, json: Value, text: String) -> Self {
        Report {
            name,
            json,
            text,
            extra: Vec::new(),
            failed: false,
        }
    }
}

/// Parse `args` (program name first) and run. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let recorded = strip_out(&args[1.min(args.len())..]);
    execute(cli, recorded, &out)
}

fn strip_out(args: &[OsString]) -> Vec<String> {
    let mut kept = Vec::new();
    let mut skip = false;
    for a in args {
        let s = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
        } else if s == "--out" {
            skip = true;
        } else if !s.starts_with("--out=") {
            kept.push(s);
        }
    }
    kept
}

fn execute(cli: Cli, recorded: Vec<String>, out: &Path) -> i32 {
    if let Command::Rerun { manifest } = &cli.command {
        return rerun(manifest, cli.out.as_deref());
    }
    if cli.precision < 2 {
        eprintln!("error: --precision must be at least 2");
        return EXIT_USAGE;
    }
    let pool = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(p) => Some(p),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        },
        None => None,
    };
    let result = match &pool {
        Some(p) => p.install(|| dispatch(&cli)),
        None => dispatch(&cli),
    };
    let report = match result {
        Ok(r) => r,
        Err((e, code)) => {
            eprintln!("error: {e}");
            return code;
        }
    };
    match write_outputs(&cli, recorded, out, &report) {
        Ok(()) => {
            print!("{}", report.text);
            if report.failed {
                EXIT_FAILURE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn rerun(manifest: &Path, out: Option<&Path>) -> i32 {
    let text = match std::fs::read_to_string(manifest) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", manifest.display());
            return EXIT_USAGE;
        }
    };
    let m: RunManifest = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {}: {e}", manifest.display());
            return EXIT_USAGE;
        }
    };
    let mut args = vec!["papertorus".to_string()];
    args.extend(m.args);
    args.push("--out".into());
    args.push(out.map_or(m.output_dir, |p| p.to_string_lossy().into_owned()));
    run(args)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Prove7 => "prove7",
        Command::Flatness { .. } => "flatness",
        Command::Jacobian(_) => "jacobian",
        Command::Newton(_) => "newton",
        Command::Search(_) => "search",
        Command::Hull { .. } => "hull",
        Command::CertifyEmbedding(_) => "certify-embedding",
        Command::CertifyIft { .. } => "certify-ift",
        Command::Develop(_) => "develop",
        Command::Slice(_) => "slice",
        Command::Verify(_) => "verify",
        Command::Rerun { .. } => "rerun",
    }
}

fn inputs(c: &Command) -> Vec<&Path> {
    match c {
        Command::Flatness { torus } | Command::Hull { torus } | Command::CertifyIft { torus } => {
            vec![torus]
        }
        Command::Jacobian(a) => a.torus.iter().map(|p| p.as_path()).collect(),
        Command::Search(a) => vec![&a.spec],
        Command::CertifyEmbedding(a) => vec![&a.torus],
        Command::Develop(a) => vec![&a.torus],
        Command::Slice(a) => vec![&a.torus],
        Command::Verify(a) => vec![&a.bundle, &a.torus],
        Command::Rerun { manifest } => vec![manifest],
        Command::Prove7 | Command::Newton(_) => vec![],
    }
}

fn write_outputs(cli: &Cli, args: Vec<String>, out: &Path, r: &Report) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut files = vec![format!("{}.json", r.name), format!("{}.txt", r.name)];
    let mut json = serde_json::to_string_pretty(&r.json).expect("json values serialize");
    json.push('\n');
    std::fs::write(out.join(&files[0]), json)?;
    std::fs::write(out.join(&files[1]), &r.text)?;
    for (name, body) in &r.extra {
        std::fs::write(out.join(name), body)?;
        files.push(name.clone());
    }
    let manifest = RunManifest {
        subcommand: subcommand_name(&cli.command).into(),
        args,
        inputs: inputs(&cli.command)
            .iter()
            .map(|p| p.to_string_lossy().into_owned())
            .collect(),
        seed: cli.seed,
        precision: cli.precision,
        output_dir: out.to_string_lossy().into_owned(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(cli).expect("cli serializes"),
        outputs: files,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(out.join(MANIFEST), text)?;
    Ok(())
}

type Dispatch = std::result::Result<Report, (Error, i32)>;

/// Bad input is a usage error; anything else that goes wrong is a failure.
fn classify(e: Error) -> (Error, i32) {
    let code = match e {
        Error::Io(_)
        | Error::Parse { .. }
        | Error::InvalidSearchSpec(_)
        | Error::InvalidConfiguration(_)
        | Error::InvalidTriangulation(_)
        | Error::InsufficientPrecision { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    };
    (e, code)
}

fn dispatch(cli: &Cli) -> Dispatch {
    let p = Precision::new(cli.precision);
    let load = |path: &Path| {
        read_torus(path)
            .map(|c| c.with_precision(p))
            .map_err(classify)
    };
    match &cli.command {
        Command::Prove7 => prove7().map_err(classify),
        Command::Flatness { torus } => flatness(&load(torus)?).map_err(classify),
        Command::Jacobian(a) => {
            let params = match &a.torus {
                Some(t) => pup_tent_params_of(&load(t)?).map_err(classify)?,
                None => PupTentParams::published(p),
            };
            jacobian_cmd(&params, p, a.mode).map_err(classify)
        }
        Command::Newton(a) => newton(a, p).map_err(classify),
        Command::Search(a) => search(a, cli.seed).map_err(classify),
        Command::Hull { torus } => hull(&load(torus)?).map_err(classify),
        Command::CertifyEmbedding(a) => {
            let c = load(&a.torus)?;
            let params = a.separation.params().map_err(classify)?;
            certify_embedding(&c, a, &params, p).map_err(classify)
        }
        Command::CertifyIft { torus } => {
            let c = load(torus)?;
            pup_tent_params_of(&c).map_err(classify)?;
            certify_ift(&c, p).map_err(classify)
        }
        Command::Develop(a) => develop_cmd(&load(&a.torus)?, a).map_err(classify),
        Command::Slice(a) => slice_cmd(&load(&a.torus)?, &a.plane, p).map_err(classify),
        Command::Verify(a) => {
            let c = load(&a.torus)?;
            let params = a.separation.params().map_err(classify)?;
            let text = std::fs::read_to_string(&a.bundle).map_err(|e| classify(e.into()))?;
            // once the inputs are readable, any rejection is a failed replay
            Ok(verify(&text, &c, a.separation.scale, &params))
        }
        Command::Rerun { .. } => unreachable!("handled before dispatch"),
    }
}

fn dec(x: &Float) -> String {
    format_decimal(x, Precision::from_bits(x.prec()).digits())
}

fn sci(x: &Float) -> String {
    format!("{:.6e}", x.to_f64())
}

fn mat_json(m: &Mat3) -> Value {
    json!(m
        .iter()
        .map(|row| row.iter().map(dec).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn mat_text(m: &Mat3, decimals: usize) -> String {
    let mut s = String::new();
    for row in m {
        let cells: Vec<String> = row
            .iter()
            .map(|x| format!("{:>12.*}", decimals, x.to_f64()))
            .collect();
        let _ = writeln!(s, "  {}", cells.join(" "));
    }
    s
}

fn prove7() -> Result<Report> {
    let r = prove_hull_lemma()?;
    let mut text = format!(
        "patterns {}\nafter degree filter {}\nsurvivors {}\nautomorphism group order {}\nsurvivors form one orbit {}\n",
        r.total_patterns,
        r.after_degree_filter,
        r.survivors.len(),
        r.automorphism_group_order,
        r.survivors_form_one_orbit
    );
    for (s, w) in r.survivors.iter().zip(&r.survivor_witness) {
        let edges: Vec<String> = s
            .internal_edges()
            .iter()
            .map(|e| format!("{}{}", e.0, e.1))
            .collect();
        let _ = writeln!(text, "  internal {} witness {w}", edges.join(" "));
    }
    let json = serde_json::to_value(&r).expect("report serializes");
    let mut report = Report::new("prove7", json, text);
    report.failed = r.survivors.len() != 6 || !r.survivors_form_one_orbit;
    report.extra.push(("prove7_log.txt".into(), proof_log(&r)));
    Ok(report)
}

fn flatness(c: &Configuration) -> Result<Report> {
    let f = cone_angles(c)?;
    let dev = f.deviations();
    let mut text = format!(
        "precision {}\nmax_deviation {}\n",
        c.precision().digits(),
        sci(&f.max_deviation)
    );
    for (k, d) in dev.iter().enumerate() {
        let _ = writeln!(text, "  vertex {k} theta - 2pi {}", sci(d));
    }
    let json = json!({
        "precision": c.precision().digits(),
        "cone_angles": f.cone_angles.iter().map(dec).collect::<Vec<_>>(),
        "deviations": dev.iter().map(dec).collect::<Vec<_>>(),
        "max_deviation": dec(&f.max_deviation),
        "angle_sum": dec(&f.angle_sum()),
    });
    Ok(Report::new("flatness", json, text))
}

fn jacobian_cmd(params: &PupTentParams, p: Precision, mode: ModeArg) -> Result<Report> {
    let mode = match mode {
        ModeArg::Analytic => JacobianMode::Analytic,
        ModeArg::Difference => JacobianMode::CentralDifference,
    };
    let j = jacobian(params, p, mode)?;
    let text = format!(
        "dF\n{}inverse\n{}det {}\nmax |inverse| {}\nasymmetry {}\n",
        mat_text(&j.matrix, 6),
        mat_text(&j.inverse, 6),
        sci(&j.determinant),
        sci(&j.inf_norm_of_inverse),
        sci(&j.asymmetry)
    );
    let json = json!({
        "mode": format!("{mode:?}"),
        "z": params.z.iter().map(dec).collect::<Vec<_>>(),
        "matrix": mat_json(&j.matrix),
        "inverse": mat_json(&j.inverse),
        "determinant": dec(&j.determinant),
        "inf_norm_of_inverse": dec(&j.inf_norm_of_inverse),
        "asymmetry": dec(&j.asymmetry),
    });
    Ok(Report::new("jacobian", json, text))
}

fn parse_number(s: &str, p: Precision) -> Result<Float> {
    parse_decimal(s.trim(), p)
        .ok_or_else(|| Error::InvalidConfiguration(format!("bad number `{s}`")))
}

fn newton(a: &NewtonArgs, p: Precision) -> Result<Report> {
    let target = parse_number(&a.target, p)?;
    let start = match &a.start {
        Some(s) => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::InvalidConfiguration(
                    "--start needs three comma-separated heights".into(),
                ));
            }
            PupTentParams::new([
                parse_number(parts[0], p)?,
                parse_number(parts[1], p)?,
                parse_number(parts[2], p)?,
            ])
        }
        None => {
            let full = PupTentParams::published(p);
            let z: Vec<Float> = full
                .z
                .iter()
                .map(|z| parse_number(&truncate_decimals(z, a.truncate), p))
                .collect::<Result<_>>()?;
            PupTentParams::new([z[0].clone(), z[1].clone(), z[2].clone()])
        }
    };
    let o = newton_refine_traced(&start, &target, p)?;
    let shown: Vec<String> = o
        .params
        .z
        .iter()
        .map(|z| truncate_decimals(z, a.show))
        .collect();
    let mut text = format!("iterations {}\n", o.iterations);
    for (i, d) in o.deviations.iter().enumerate() {
        let _ = writeln!(text, "  step {i} deviation {}", sci(d));
    }
    for (i, z) in shown.iter().enumerate() {
        let _ = writeln!(text, "z{i} {z}");
    }
    let json = json!({
        "precision": p.digits(),
        "target": dec(&target),
        "start": start.z.iter().map(dec).collect::<Vec<_>>(),
        "iterations": o.iterations,
        "deviations": o.deviations.iter().map(dec).collect::<Vec<_>>(),
        "z": o.params.z.iter().map(dec).collect::<Vec<_>>(),
        "z_truncated": shown,
    });
    let mut r = Report::new("newton", json, text);
    let c = crate::geometry::build_pup_tent(&o.params, p)?;
    r.extra.push(("newton.pt".into(), format_torus(&c)));
    Ok(r)
}

fn search(a: &SearchArgs, seed: Option<u64>) -> Result<Report> {
    let mut spec = SearchSpec::parse(&std::fs::read_to_string(&a.spec)?)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(f) = a.dihedral_floor {
        spec.dihedral_floor = f;
    }
    if let Some(f) = a.min_angle_floor {
        spec.min_angle_floor = f;
    }
    if let Some(n) = a.chains {
        spec.chains = n;
    }
    if let Some(n) = a.iterations {
        spec.max_iterations = n;
    }
    spec.validate()?;
    let o = run_chains(&spec)?;
    let best = o.best();
    let mut text = format!(
        "chains {}\nbest chain {} deviation {:e}\n",
        o.chains.len(),
        o.best,
        best.max_deviation
    );
    for (i, ch) in o.chains.iter().enumerate() {
        let _ = writeln!(
            text,
            "  chain {i} seed {} deviation {:e} face_number {}",
            ch.seed, ch.max_deviation, ch.face_number
        );
    }
    let json = json!({
        "spec": spec.to_key_values(),
        "best": o.best,
        "chains": o.chains.iter().map(|ch| json!({
            "seed": ch.seed,
            "max_deviation": ch.max_deviation,
            "face_number": ch.face_number,
            "accepted_improvements": ch.trace.len(),
        })).collect::<Vec<_>>(),
    });
    let mut r = Report::new("search", json, text);
    r.extra
        .push(("search_trace.csv".into(), trace_csv(&best.trace)));
    r.extra
        .push(("search_best.pt".into(), format_torus(&best.configuration)));
    Ok(r)
}

fn hull(c: &Configuration) -> Result<Report> {
    let h = convex_hull(c)?;
    let text = format!(
        "vertices on hull {}/{}\nhull facets {}\nface_number {}\ntorus faces on hull {:?}\n",
        h.on_hull.iter().filter(|&&b| b).count(),
        h.on_hull.len(),
        h.facet_list.len(),
        h.face_number,
        h.torus_faces_on_hull
    );
    let json = serde_json::to_value(&h).expect("hull serializes");
    Ok(Report::new("hull", json, text))
}

fn certify_embedding(
    c: &Configuration,
    a: &EmbeddingArgs,
    params: &SeparationParams,
    p: Precision,
) -> Result<Report> {
    let ift = (!a.no_ift && pup_tent_params_of(c).is_ok()).then_some(p);
    let b = build_bundle(c, a.separation.scale, params, ift)?;
    let disjoint = b
        .certificates
        .iter()
        .filter(|x| x.kind == SeparationKind::Disjoint)
        .count();
    let min = b.certificates.iter().map(|x| x.margin).min();
    let text = format!(
        "certificates {} ({} disjoint, {} shared-vertex)\nlambda {}\nmin margin {}\nift footer {}\n",
        b.certificates.len(),
        disjoint,
        b.certificates.len() - disjoint,
        params.lambda,
        min.map_or("none".into(), |m| m.to_string()),
        b.ift.is_some()
    );
    let json = json!({
        "scale_exp": b.scale_exp,
        "grid": params.grid,
        "lambda": params.lambda.to_string(),
        "certificates": b.certificates.len(),
        "disjoint": disjoint,
        "shared_vertex": b.certificates.len() - disjoint,
        "min_margin": min.map(|m| m.to_string()),
        "ift": b.ift.as_ref().map(|f| serde_json::to_value(f).expect("footer serializes")),
    });
    let mut r = Report::new("certify-embedding", json, text);
    r.extra.push(("certificates.txt".into(), format_bundle(&b)));
    Ok(r)
}

fn certify_ift(c: &Configuration, p: Precision) -> Result<Report> {
    let cert = match ift_certificate(c, p) {
        Ok(cert) => cert,
        Err(e @ Error::ChainBroken { .. }) => {
            let json = json!({ "holds": false, "error": e.to_string() });
            let mut r = Report::new("certify-ift", json, format!("chain broken: {e}\n"));
            r.failed = true;
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let mut text = String::new();
    for l in &cert.links {
        let _ = writeln!(
            text,
            "{:<18} {:<5} {}",
            l.name,
            if l.holds { "ok" } else { "FAIL" },
            l.statement
        );
    }
    let _ = writeln!(
        text,
        "exists a flat torus within {} of p",
        sci(&cert.conclusion_radius)
    );
    let json = json!({
        "holds": true,
        "precision": cert.precision.digits(),
        "z": cert.params.z.iter().map(dec).collect::<Vec<_>>(),
        "flatness_at_p": dec(&cert.flatness_at_p),
        "m": mat_json(&cert.m),
        "eigenvalues": cert.eigenvalues.iter().map(dec).collect::<Vec<_>>(),
        "min_abs_eigenvalue": dec(&cert.min_abs_eigenvalue),
        "df_p": mat_json(&cert.df_p),
        "df_minus_m_inf": dec(&cert.df_minus_m_inf),
        "expansion_lambda": dec(&cert.expansion_lambda),
        "ball_radius": dec(&cert.ball_radius),
        "conclusion_radius": dec(&cert.conclusion_radius),
        "links": cert.links,
        "crude": cert.crude,
        "embedding_certificates": cert.embedding_certificates,
    });
    Ok(Report::new("certify-ift", json, text))
}

fn develop_cmd(c: &Configuration, a: &DevelopArgs) -> Result<Report> {
    let d = develop(c, a.base)?;
    let gram = d.gram();
    let lattice = d.lattice_f64();
    let text = format!(
        "base face {}\nlattice ({:.9}, {:.9}) ({:.9}, {:.9})\ngram {:.9} {:.9} {:.9}\ncovolume {:.9}\nmax rotational holonomy {}\nmax edge length error {}\n",
        d.base_face,
        lattice[0][0],
        lattice[0][1],
        lattice[1][0],
        lattice[1][1],
        gram[0].to_f64(),
        gram[1].to_f64(),
        gram[2].to_f64(),
        d.covolume().to_f64(),
        sci(&d.max_rotation()),
        sci(&d.max_edge_length_error(c)),
    );
    let json = json!({
        "base_face": d.base_face,
        "lattice": d.lattice.iter().map(|v| v.iter().map(dec).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "gram": gram.iter().map(dec).collect::<Vec<_>>(),
        "covolume": dec(&d.covolume()),
        "rotational_holonomy": d.rotational_holonomy.iter().map(dec).collect::<Vec<_>>(),
        "deck": d.deck.iter().map(|g| json!({
            "faces": [g.faces.0, g.faces.1],
            "rotation": dec(&g.rotation),
            "translation": g.translation.iter().map(dec).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "tree_parent": d.tree_parent,
    });
    let mut r = Report::new("develop", json, text);
    r.extra
        .push(("develop.svg".into(), development_svg(&d, a.copies)));
    r.extra.push(("develop.csv".into(), development_csv(&d)));
    Ok(r)
}

fn slice_cmd(c: &Configuration, plane: &str, p: Precision) -> Result<Report> {
    let v: Vec<f64> = plane
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidConfiguration(format!("bad --plane `{plane}`")))?;
    if v.len() != 6 {
        return Err(Error::InvalidConfiguration(
            "--plane needs px,py,pz,nx,ny,nz".into(),
        ));
    }
    let plane = Plane::from_f64([v[0], v[1], v[2]], [v[3], v[4], v[5]], p.bits())?;
    let s = slice_plane(c, &plane)?;
    let text = format!(
        "plane point {:?} normal {:?}\nshift {:e}\nloops {}\nopen chains {}\n",
        s.plane.0,
        s.plane.1,
        s.shift,
        s.loops.len(),
        s.open_chains.len()
    );
    let json = json!({
        "plane": { "point": s.plane.0, "normal": s.plane.1 },
        "shift": s.shift,
        "loops": s.loops.len(),
        "loop_sizes": s.loops.iter().map(Vec::len).collect::<Vec<_>>(),
        "open_chains": s.open_chains.len(),
    });
    let mut r = Report::new("slice", json, text);
    r.extra.push(("slice.svg".into(), slice_svg(&s)));
    r.extra.push(("slice.csv".into(), slice_csv(&s)));
    Ok(r)
}

fn verify(text: &str, c: &Configuration, scale_exp: u32, params: &SeparationParams) -> Report {
    match verify_bundle(text, c, scale_exp, params) {
        Ok(v) => {
            let out = format!(
                "verified {} certificates\nmin margin {}\nift footer checked {}\n",
                v.certificates, v.min_margin, v.ift_checked
            );
            let json = json!({
                "verified": true,
                "certificates": v.certificates,
                "min_margin": v.min_margin,
                "ift_checked": v.ift_checked,
            });
            Report::new("verify", json, out)
        }
        Err(e) => {
            let json = json!({ "verified": false, "error": e.to_string() });
            let mut r = Report::new("verify", json, format!("rejected: {e}\n"));
            r.failed = true;
            r
        }
    }
}
