//! Command-line front end. Every command prints a one-line summary, writes
//! its JSON report to `--out` (or stdout with `--json`) and exits with
//! 0 pass, 1 fail, 2 inconclusive, 3 malformed input, 64 usage.

use crate::error::{Error, Result};
use crate::flows::{self, PencilField};
use crate::hyperbolic::{UnitTangent, C64};
use crate::io::{self, Report};
use crate::models::{self, Cp1, GeodesicH3, GraphSurface};
use crate::nesting::{self, NestedPair};
use crate::pencils::{self, ClassifyOptions, Pencil, TangentVector};
use crate::quadrics::{self, FeasibilityOptions, Quadric, SymTensor};
use crate::render::{self, Chart};
use crate::reps::{self, Embedding, EmbeddingKind, FuchsianRep};
use crate::status::Status;
use crate::symplectic::{self, Lagrangian, LagrangianLoop, SymplecticSpace};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "pencils", about = "Pencils of quadrics: classification, fitting, flows and audits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Decision tolerance passed to the numerical tests.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Report path (SVG path for `render`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print the JSON report to stdout.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify pencils and test fitting pairs and directions.
    #[command(subcommand)]
    Pencil(PencilCmd),
    /// Cross-ratio and Hilbert distances between nested quadrics.
    #[command(subcommand)]
    Quadric(QuadricCmd),
    /// Maslov indices, pair quadrics and loop windings.
    #[command(subcommand)]
    Lagrangian(LagrangianCmd),
    /// Build representations and audit their singular-value gaps.
    #[command(subcommand)]
    Rep(RepCmd),
    /// Averaged pencil fields and their flow audits.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// The `H³` and `H^{2,2}` model geometries.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Draw conics or Hermitian circles as SVG.
    Render(RenderArgs),
}

#[derive(Subcommand, Debug)]
enum PencilCmd {
    /// Mixed, nn-regular, ω-regular and maximal tests with witnesses.
    Classify {
        #[arg(long)]
        pencil: PathBuf,
    },
    /// Whether two pencils form a fitting pair.
    FittingPair {
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
    },
    /// `--images` is a pencil file holding the images of the basis.
    FittingDirection {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        images: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum QuadricCmd {
    /// Cross-ratio distance of a nested pair by line search and closed form.
    CrossRatio {
        #[arg(long)]
        q1: PathBuf,
        #[arg(long)]
        q2: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        lines: usize,
    },
    /// Hilbert distance between two positive definite tensors.
    Hilbert {
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum LagrangianCmd {
    /// Maslov index of three Lagrangian frames.
    Maslov {
        #[arg(long)]
        l1: PathBuf,
        #[arg(long)]
        l2: PathBuf,
        #[arg(long)]
        l3: PathBuf,
    },
    /// The quadric vanishing on two transverse Lagrangians.
    PairQuadric {
        #[arg(long)]
        l1: PathBuf,
        #[arg(long)]
        l2: PathBuf,
    },
    /// `--loop` holds `{"frames": [frame, ...], "params": [...]}`.
    Winding {
        #[arg(long = "loop")]
        lp: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RepKindArg {
    Schottky,
    Genus2,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum EmbedArg {
    Irr,
    Diag,
}

impl From<EmbedArg> for EmbeddingKind {
    fn from(e: EmbedArg) -> Self {
        match e {
            EmbedArg::Irr => EmbeddingKind::Irreducible,
            EmbedArg::Diag => EmbeddingKind::Diagonal,
        }
    }
}

#[derive(Subcommand, Debug)]
enum RepCmd {
    /// A Schottky or genus-two representation composed with an embedding.
    Build {
        #[arg(long, value_enum, default_value = "schottky")]
        kind: RepKindArg,
        #[arg(long, value_enum, default_value = "irr")]
        embed: EmbedArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Fit the linear lower bound on log singular-value gaps over words.
    AnosovGap {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = 12)]
        maxlen: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Representation file from `rep build`; defaults to the Schottky group.
    #[arg(long)]
    rep: Option<PathBuf>,
    /// Overrides the half-dimension stored in `--rep`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    embed: Option<EmbedArg>,
    #[arg(long = "K", default_value_t = 256)]
    k: usize,
}

#[derive(Subcommand, Debug)]
enum FlowCmd {
    /// Averaged pencil at `--point x,y` (the point `x + iy` of the upper half-plane).
    AveragedPencil {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value = "0,1")]
        point: String,
    },
    /// Equivariance, nestedness, contraction and limit audits.
    Audit {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 6.0)]
        tmax: f64,
        #[arg(long, default_value_t = 10)]
        lines: usize,
    },
    /// Fiber counts over the domain of discontinuity and the limit set.
    Fibration {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ModelCmd {
    /// Geodesics of `H³` by endpoints `a,b` (complex `re:im`, or `inf`).
    H3 {
        #[arg(long, allow_hyphen_values = true)]
        g1: String,
        #[arg(long, allow_hyphen_values = true)]
        g2: Option<String>,
    },
    /// The spacelike-plane θ-family check, or a Gauss-map audit of a graph surface.
    H22 {
        #[arg(long)]
        theta_family: bool,
        /// Graph surface JSON `{"h4": [[..],[..]], "h5": [[..],[..]]}`.
        #[arg(long)]
        surface: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// `{"quadrics": [mat, ...]}`, `{"hermitian": [[a, d, p, q], ...]}` or a pencil file.
    #[arg(long)]
    input: PathBuf,
    /// Three-column frame slicing quadrics of dimension above 3.
    #[arg(long)]
    frame: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 200)]
    grid: usize,
}

/// Parse `argv` (without the program name) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("pencils")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let g = cli.global.clone();
    let threads = g.threads.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    let start = Instant::now();
    match pool.install(|| dispatch(&cli.command, &g)) {
        Ok((summary, report)) => {
            // timing stays out of the report so reports are reproducible
            eprintln!("runtime {:.3}s", start.elapsed().as_secs_f64());
            println!("{summary}");
            let text = report.to_json();
            if g.json {
                println!("{text}");
            }
            if let (Some(path), false) = (&g.out, matches!(cli.command, Command::Render(_))) {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("{}: {e}", path.display());
                    return EXIT_MALFORMED;
                }
            }
            exit_code(report.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}

pub fn exit_code(s: Status) -> i32 {
    match s {
        Status::True => EXIT_PASS,
        Status::False => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Search failures are inconclusive; every other error blames the input.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Exhausted(_) | Error::Continuation { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_MALFORMED,
    }
}

fn feas_opts(g: &Global) -> FeasibilityOptions {
    let mut o = FeasibilityOptions { seed: g.seed, ..FeasibilityOptions::default() };
    if let Some(t) = g.tol {
        o.band = t;
    }
    o
}

fn read_pencil(path: &Path) -> Result<Pencil> {
    Pencil::new(io::parse_pencil_basis(&io::read_text(path)?)?)
}

fn read_lagrangian(path: &Path) -> Result<Lagrangian> {
    let f = io::parse_frame(&io::read_text(path)?)?;
    if f.nrows() % 2 != 0 {
        return Err(Error::Malformed("frame needs an even number of rows".into()));
    }
    Lagrangian::new(&SymplecticSpace::standard(f.nrows() / 2), f)
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&io::read_text(path)?).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: &Command, g: &Global) -> Result<(String, Report)> {
    match cmd {
        Command::Pencil(c) => pencil_cmd(c, g),
        Command::Quadric(c) => quadric_cmd(c, g),
        Command::Lagrangian(c) => lagrangian_cmd(c, g),
        Command::Rep(c) => rep_cmd(c, g),
        Command::Flow(c) => flow_cmd(c, g),
        Command::Model(c) => model_cmd(c, g),
        Command::Render(a) => render_cmd(a, g),
    }
}

fn pencil_cmd(c: &PencilCmd, g: &Global) -> Result<(String, Report)> {
    match c {
        PencilCmd::Classify { pencil } => {
            let p = read_pencil(pencil)?;
            let mut opts = ClassifyOptions { seed: g.seed, ..ClassifyOptions::default() };
            if let Some(t) = g.tol {
                opts.tol = t;
            }
            let cl = pencils::classify(&p, &opts)?;
            let mut r = Report::new("pencil classify", g.seed);
            r.tolerances.insert("tol".into(), opts.tol);
            r.check("mixed", cl.mixed, Some(cl.mixed_margin), Some(opts.tol));
            r.check("nn-regular", cl.nn_regular, Some(cl.nn_margin), Some(opts.tol));
            r.check("omega-regular", cl.omega_regular, cl.omega_margin, Some(opts.tol));
            r.check("maximal", cl.maximal, None, None);
            r.margin = cl.omega_margin;
            if let Some((a, b)) = &cl.witnesses {
                r.witness = json!({ "positive": io::rows(&a.frame), "negative": io::rows(&b.frame) });
            }
            r.data = json!({ "winding": cl.winding, "boundary_samples": cl.boundary.as_ref().map(|b| b.len()) });
            let wind = cl.winding.map_or("-".to_string(), |w| w.to_string());
            Ok((format!("maximal: {} winding: {wind}", cl.maximal), r))
        }
        PencilCmd::FittingPair { p1, p2 } => {
            let rep = pencils::fitting_pair(&read_pencil(p1)?, &read_pencil(p2)?, &feas_opts(g))?;
            Ok((format!("fitting: {}", rep.fitting), fitting_report("pencil fitting-pair", &rep, g)))
        }
        PencilCmd::FittingDirection { pencil, images } => {
            let base = read_pencil(pencil)?;
            let imgs = io::parse_pencil_basis(&io::read_text(images)?)?;
            let rep = pencils::fitting_direction(&TangentVector::new(base, imgs)?, &feas_opts(g))?;
            Ok((format!("fitting: {}", rep.fitting), fitting_report("pencil fitting-direction", &rep, g)))
        }
    }
}

fn fitting_report(cmd: &str, rep: &pencils::FittingReport, g: &Global) -> Report {
    let mut r = Report::new(cmd, g.seed);
    let band = rep.feasibility.as_ref().map(|f| f.band);
    if let Some(b) = band {
        r.tolerances.insert("band".into(), b);
    }
    r.margin = rep.feasibility.as_ref().map(|f| f.primal_margin);
    r.check("fitting", rep.fitting, r.margin, band);
    if let Some((a, b)) = &rep.witness {
        r.witness = json!({ "q1": io::rows(a), "q2": io::rows(b) });
    }
    r.data = json!({ "dual_margin": rep.feasibility.as_ref().and_then(|f| f.dual_margin), "geometric": rep.geometric });
    r
}

fn quadric_cmd(c: &QuadricCmd, g: &Global) -> Result<(String, Report)> {
    match c {
        QuadricCmd::CrossRatio { q1, q2, lines } => {
            let pair = NestedPair::new(Quadric::new(io::read_matrix(q1)?)?, Quadric::new(io::read_matrix(q2)?)?)?;
            let cr = nesting::cross_ratio_distance(&pair, *lines, g.seed)?;
            let mut r = Report::new("quadric cross-ratio", g.seed);
            let agree = (cr.value - cr.closed_form).abs() <= 1e-6 * cr.closed_form.abs().max(1.0);
            r.check("nested", Status::True, Some(pair.margin), None);
            r.check("search-agrees-with-closed-form", Status::from_bool(agree || cr.search_value >= cr.closed_form), None, Some(1e-6));
            r.margin = Some(cr.value);
            r.witness = json!({ "line": [cr.argmin_line.0, cr.argmin_line.1] });
            r.data = serde_json::to_value(&cr).unwrap_or_default();
            Ok((format!("{}", cr.value), r))
        }
        QuadricCmd::Hilbert { p1, p2 } => {
            let a = SymTensor::new(io::read_matrix(p1)?)?;
            let b = SymTensor::new(io::read_matrix(p2)?)?;
            let d = quadrics::hilbert_distance(&a, &b)?;
            let mut r = Report::new("quadric hilbert", g.seed);
            r.check("positive", Status::True, Some(d), None);
            r.margin = Some(d);
            Ok((format!("{d}"), r))
        }
    }
}

#[derive(Deserialize)]
struct LoopJson {
    frames: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    params: Vec<f64>,
}

fn lagrangian_cmd(c: &LagrangianCmd, g: &Global) -> Result<(String, Report)> {
    match c {
        LagrangianCmd::Maslov { l1, l2, l3 } => {
            let (a, b, cc) = (read_lagrangian(l1)?, read_lagrangian(l2)?, read_lagrangian(l3)?);
            let sp = SymplecticSpace::standard(a.n());
            let m = symplectic::maslov_index(&sp, &a, &b, &cc)?;
            let margin = symplectic::triple_margin(&sp, &a, &b, &cc)?;
            let mut r = Report::new("lagrangian maslov", g.seed);
            r.check("transverse", Status::True, Some(margin), None);
            r.margin = Some(margin);
            r.data = json!({ "maslov": m, "maximal": m == a.n() as i64 });
            Ok((format!("{m}"), r))
        }
        LagrangianCmd::PairQuadric { l1, l2 } => {
            let (a, b) = (read_lagrangian(l1)?, read_lagrangian(l2)?);
            let q = symplectic::pair_quadric(&SymplecticSpace::standard(a.n()), &a, &b)?;
            let mut r = Report::new("lagrangian pair-quadric", g.seed);
            r.check("transverse", Status::True, Some(a.transversality(&b)), None);
            r.data = serde_json::to_value(io::MatrixJson::from_mat(&q.mat)).unwrap_or_default();
            Ok((serde_json::to_string(&io::MatrixJson::from_mat(&q.mat)).unwrap_or_default(), r))
        }
        LagrangianCmd::Winding { lp } => {
            let j: LoopJson = parse_json(lp)?;
            let ls = j
                .frames
                .iter()
                .map(|f| {
                    let m = io::from_rows(f)?;
                    Lagrangian::new(&SymplecticSpace::standard(m.nrows() / 2), m)
                })
                .collect::<Result<Vec<_>>>()?;
            let params = if j.params.is_empty() { (0..ls.len()).map(|i| i as f64).collect() } else { j.params };
            let lp = LagrangianLoop::new(ls, params)?;
            let w = symplectic::maslov_winding(&lp)?;
            let mut r = Report::new("lagrangian winding", g.seed);
            r.check("sampled", Status::True, Some(lp.max_step()), None);
            r.data = json!({ "winding": w });
            Ok((format!("{w}"), r))
        }
    }
}

/// Representation file written by `rep build`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepFile {
    pub rep: FuchsianRep,
    pub n: usize,
    pub embedding: EmbeddingKind,
}

fn rep_cmd(c: &RepCmd, g: &Global) -> Result<(String, Report)> {
    match c {
        RepCmd::Build { kind, embed, n } => {
            let rep = match kind {
                RepKindArg::Schottky => reps::default_schottky(),
                RepKindArg::Genus2 => reps::build_genus2(),
            };
            let emb = Embedding::new(*n, (*embed).into())?;
            let mut r = Report::new("rep build", g.seed);
            let sp = emb.space();
            let resid = rep.generators.iter().map(|m| sp.symplectic_residual(&emb.apply(m))).fold(0.0, f64::max);
            r.check("symplectic-image", Status::from_bool(resid < 1e-9), Some(resid), Some(1e-9));
            if let Some(rr) = rep.relator_residual {
                r.check("relator", Status::from_bool(rr < 1e-9), Some(rr), Some(1e-9));
            }
            let file = RepFile { rep, n: *n, embedding: emb.kind };
            r.data = serde_json::to_value(&file).unwrap_or_default();
            Ok((format!("{} generators in Sp({}, R)", file.rep.generators.len(), 2 * n), r))
        }
        RepCmd::AnosovGap { rep, maxlen } => {
            let f: RepFile = parse_json(rep).or_else(|_| parse_json::<serde_json::Value>(rep).and_then(|v| {
                serde_json::from_value(v["data"].clone()).map_err(|e| Error::Malformed(format!("rep JSON: {e}")))
            }))?;
            let emb = Embedding::new(f.n, f.embedding)?;
            let gap = reps::anosov_gap_audit(&f.rep, &emb, *maxlen)?;
            let mut r = Report::new("rep anosov-gap", g.seed);
            r.check("slope-positive", Status::from_bool(gap.slope > 0.0), Some(gap.slope), Some(0.0));
            r.check("bound-holds", Status::from_bool(gap.bound_slack >= 0.0), Some(gap.bound_slack), Some(0.0));
            r.margin = Some(gap.slope);
            r.data = json!({ "A": gap.slope, "B": gap.intercept, "ls_slope": gap.ls_slope, "power_slopes": gap.power_slopes, "min_by_length": gap.min_by_length });
            Ok((format!("A = {} B = {}", gap.slope, gap.intercept), r))
        }
    }
}

fn load_field(a: &FieldArgs) -> Result<(FuchsianRep, Embedding, PencilField)> {
    let (rep, n0, kind0) = match &a.rep {
        Some(p) => {
            let v: serde_json::Value = parse_json(p)?;
            let f: RepFile = serde_json::from_value(if v.get("data").is_some() { v["data"].clone() } else { v })
                .map_err(|e| Error::Malformed(format!("rep JSON: {e}")))?;
            (f.rep, f.n, f.embedding)
        }
        None => (reps::default_schottky(), 1, EmbeddingKind::Irreducible),
    };
    let emb = Embedding::new(a.n.unwrap_or(n0), a.embed.map_or(kind0, Into::into))?;
    let field = PencilField::averaged(&emb, a.k)?;
    Ok((rep, emb, field))
}

fn parse_point(s: &str) -> Result<C64> {
    let bad = || Error::Malformed(format!("point `{s}` is not `x,y` with y > 0"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let z = C64::new(x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?);
    if !(z.im > 0.0) {
        return Err(bad());
    }
    Ok(z)
}

fn flow_cmd(c: &FlowCmd, g: &Global) -> Result<(String, Report)> {
    match c {
        FlowCmd::AveragedPencil { field, point } => {
            let (_, _, f) = load_field(field)?;
            let x = parse_point(point)?;
            let p = f.pencil(x)?;
            let cl = pencils::classify(&p, &ClassifyOptions { seed: g.seed, ..ClassifyOptions::default() })?;
            let mut r = Report::new("flow averaged-pencil", g.seed);
            r.check("maximal", cl.maximal, cl.omega_margin, None);
            r.data = json!({ "pencil": io::pencil_json(&p.basis), "winding": cl.winding });
            Ok((format!("maximal: {} winding: {}", cl.maximal, cl.winding.map_or("-".into(), |w| w.to_string())), r))
        }
        FlowCmd::Audit { field, tmax, lines } => {
            let (rep, emb, f) = load_field(field)?;
            let mut r = Report::new("flow audit", g.seed);
            let pts = [C64::new(0.3, 1.2), C64::new(-1.0, 0.5), C64::new(2.0, 3.0)];
            let eq = f.equivariance_residual(&rep.generators, &pts)?;
            r.check("equivariance", Status::from_bool(eq < 1e-8), Some(eq), Some(1e-8));
            let mut rng = crate::linalg::rng(g.seed);
            let nest = flows::nestedness_audit(&f, &mut rng, *lines, &[0.1, 0.5, 1.0]);
            r.check("nested", Status::from_margin(nest, 0.0), Some(nest), Some(0.0));
            let start = UnitTangent { x: C64::new(0.0, 1.0), angle: std::f64::consts::FRAC_PI_2 };
            let grid: Vec<f64> = (1..=8).map(|k| *tmax * k as f64 / 8.0).collect();
            let con = flows::contraction_audit(&f, &start, &grid, 200, g.seed)?;
            r.check("contraction", Status::from_bool(con.alpha > 0.0), Some(con.alpha), Some(0.0));
            let horizon = flows::limit_horizon(&emb).min(tmax.max(1.0) * 4.0);
            let mut worst = 0.0f64;
            for j in 0..*lines {
                let v = flows::random_tangent(&mut rng, 1.5);
                let lim = flows::limit_audit(&f, &v, horizon, 40, j % 2 == 0, crate::linalg::substream(g.seed, j as u64))?;
                worst = worst.max(lim.angle);
            }
            r.check("limit-map", Status::from_bool(worst < 1e-3), Some(worst), Some(1e-3));
            // reported only: whether the map is an immersion is left open
            let sv: Vec<[f64; 2]> = pts.iter().map(|&x| flows::pencil_map_singular_values(&f, x, 1e-4)).collect::<Result<_>>()?;
            r.data = json!({ "alpha": con.alpha, "log_cr": con.log_cr, "times": con.times, "limit_horizon": horizon, "derivative_singular_values": sv });
            Ok((format!("audit: {}", r.status), r))
        }
        FlowCmd::Fibration { field, samples, limit } => {
            let (rep, _, f) = load_field(field)?;
            let fr = flows::fibration_audit(&f, &rep, *samples, *limit, g.seed)?;
            let mut r = Report::new("flow fibration", g.seed);
            r.check("one-fiber-inside", Status::from_bool(fr.interior_histogram.iter().enumerate().all(|(k, &c)| k == 1 || c == 0)), None, None);
            r.check("no-fiber-on-limit-set", Status::from_bool(fr.limit_histogram.iter().skip(1).all(|&c| c == 0)), None, None);
            r.tolerances.insert("root_residual".into(), fr.root_residual);
            r.data = serde_json::to_value(&fr).unwrap_or_default();
            Ok((format!("fibration: {}", fr.status), r))
        }
    }
}

fn parse_geodesic(s: &str) -> Result<GeodesicH3> {
    let (a, b) = s.split_once(',').ok_or_else(|| Error::Malformed(format!("geodesic `{s}` is not `a,b`")))?;
    GeodesicH3::new(Cp1::parse(a)?, Cp1::parse(b)?)
}

fn model_cmd(c: &ModelCmd, g: &Global) -> Result<(String, Report)> {
    match c {
        ModelCmd::H3 { g1, g2 } => {
            let a = parse_geodesic(g1)?;
            let mut r = Report::new("model h3", g.seed);
            let (p, err) = models::pencil_geodesic_roundtrip(&a)?;
            r.check("roundtrip", Status::from_bool(err < 1e-9), Some(err), Some(1e-9));
            let Some(g2) = g2 else {
                r.data = json!({ "pencil": io::pencil_json(&p.basis) });
                return Ok((format!("roundtrip error: {err:e}"), r));
            };
            let b = parse_geodesic(g2)?;
            let x = models::geodesics_fitting_crosscheck(&a, &b, &feas_opts(g))?;
            r.check("statuses-agree", x.agree, None, None);
            r.margin = Some(x.distance);
            r.data = serde_json::to_value(&x).unwrap_or_default();
            Ok((format!("disjoint: {} fitting: {} distance: {}", x.disjoint, x.fitting, x.distance), r))
        }
        ModelCmd::H22 { theta_family, surface } => {
            let mut r = Report::new("model h22", g.seed);
            let mut summary = Vec::new();
            if *theta_family || surface.is_none() {
                let t = models::theta_family_audit(64)?;
                r.check("exact-at-zero", Status::from_bool(t.exact_at_zero), None, None);
                r.check("displayed-family", Status::from_bool(t.reflected_angle_error < 1e-12), Some(t.reflected_angle_error), Some(1e-12));
                r.check("maximal", t.maximal, None, None);
                r.check("winding", Status::from_bool(t.winding.map(i64::abs) == Some(2)), None, None);
                summary.push(format!("theta family: {}", r.status));
                r.data = json!({ "theta_family": t });
            }
            if let Some(path) = surface {
                let s: GraphSurface = parse_json(path)?;
                let pts: Vec<[f64; 2]> = (0..9).map(|k| [0.15 * ((k % 3) as f64 - 1.0), 0.15 * ((k / 3) as f64 - 1.0)]).collect();
                let a = models::spacelike_gauss_audit(&s, &pts, 8, &feas_opts(g))?;
                // a violated second-form bound is reported, not failed
                r.check("endpoint-curves-spacelike", Status::from_bool(a.endpoint_failures == 0), None, None);
                r.check("gauss-map-fitting", a.fitting, None, None);
                summary.push(format!("surface: bound violations {} endpoint failures {} fitting {}", a.bound_violations, a.endpoint_failures, a.fitting));
                r.data["surface"] = serde_json::to_value(&a).unwrap_or_default();
            }
            Ok((summary.join("; "), r))
        }
    }
}

#[derive(Deserialize)]
struct RenderJson {
    #[serde(default)]
    quadrics: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    hermitian: Vec<[f64; 4]>,
    #[serde(default)]
    basis: Vec<Vec<Vec<f64>>>,
}

fn render_cmd(a: &RenderArgs, g: &Global) -> Result<(String, Report)> {
    let j: RenderJson = parse_json(&a.input)?;
    let frame = a.frame.as_ref().map(|p| io::parse_frame(&io::read_text(p)?)).transpose()?;
    let mut conics = Vec::new();
    for rows in j.quadrics.iter().chain(&j.basis) {
        let m = io::from_rows(rows)?;
        conics.push(match (&frame, m.nrows()) {
            (_, 3) if frame.is_none() => m,
            (Some(f), _) => render::slice(&m, f)?,
            (None, _) => return Err(Error::Malformed("quadrics of dimension above 3 need --frame".into())),
        });
    }
    for h in &j.hermitian {
        conics.push(render::hermitian_conic(&models::HermitianForm::from_coords(h[0], h[1], h[2], h[3])));
    }
    if conics.is_empty() {
        return Err(Error::Malformed("nothing to render".into()));
    }
    let chart = Chart { radius: a.radius, grid: a.grid, ..Chart::default() };
    let out = render::render_conics(&conics, &chart)?;
    if let Some(p) = &g.out {
        std::fs::write(p, &out.svg).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?;
    }
    let mut r = Report::new("render", g.seed);
    r.check("rendered", Status::True, None, None);
    r.data = json!({ "segments": out.segments, "omitted": out.omitted });
    let note = if out.omitted.is_empty() { String::new() } else { format!(" (omitted {:?}: empty in window)", out.omitted) };
    Ok((format!("{} curves{note}", conics.len() - out.omitted.len()), r))
}
