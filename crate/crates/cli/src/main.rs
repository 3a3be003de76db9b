use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use padic_greens::dynamics::{
    certify_fatou, classify_orbit, green_hat, green_hat_n, green_homogeneous_n, holder_constants,
    lipschitz_constant, local_constancy_radius, min_bound_lemma, orbit_defects, witness_depth,
    DEFAULT_DEPTH,
};
use padic_greens::harness::{verify, VerifyConfig};
use padic_greens::padic::{parse_rational, round_sig};
use padic_greens::projective::chordal_distance;
use padic_greens::{Error, HomogeneousMap, LogValue, PadicRational, PrimeContext, ProjectivePoint};

/// Exact p-adic Green functions of morphisms of projective space.
#[derive(Parser, Debug)]
#[command(name = "padic-greens", version)]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct MapArg {
    /// Map file in the JSON map format.
    #[arg(long = "map")]
    map_file: PathBuf,
}

#[derive(Args, Debug)]
struct PointsArg {
    /// Point as comma-separated rationals ("0,1", "1/2,3") or JSON; repeatable.
    #[arg(long = "point", required = true)]
    points: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Valuation of the resultant of the minimal lift.
    Resultant(MapArg),
    /// Chordal distance between two points.
    Distance {
        /// Map file supplying the prime.
        #[arg(long = "map", conflicts_with = "p", required_unless_present = "p")]
        map_file: Option<PathBuf>,
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        points: PointsArg,
    },
    /// Certified bracket for the modified Green function.
    Green {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        points: PointsArg,
        /// Truncation depth.
        #[arg(long = "tol-n", conflicts_with = "tol")]
        tol_n: Option<u32>,
        /// Bracket width bound, in units of log p (e.g. "1/1000").
        #[arg(long)]
        tol: Option<String>,
        /// Also report G at the given coordinates taken as a lift.
        #[arg(long)]
        homogeneous: bool,
    },
    /// Orbital good reduction of the residue orbit.
    Classify {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        points: PointsArg,
    },
    /// Fatou certificate or an honest unknown.
    Certify {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        points: PointsArg,
    },
    /// First iterates with their image-norm defects.
    Orbit {
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        points: PointsArg,
        #[arg(long, default_value_t = 6)]
        n: u32,
    },
    /// Seeded property verification; exits 1 on any failure.
    Verify {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; defaults to PADIC_GREENS_THREADS or the CPU count.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: u32,
    },
    /// Lipschitz, local constancy and Hölder constants.
    Holder(MapArg),
    /// Brute-force check of min_k D a^k + b^-k <= 2a D^(log b / log ab).
    LemmaMin {
        #[arg(long = "dist", alias = "D")]
        dist: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Defaults to max(64, witness depth).
        #[arg(long)]
        k_max: Option<u32>,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Property(Output),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

struct Output {
    json: Value,
    text: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = cli.text;
    match run(cli.command) {
        Ok(out) => {
            emit(&out, text);
            ExitCode::SUCCESS
        }
        Err(Failure::Property(out)) => {
            emit(&out, text);
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e == Error::NotAMorphism { 3 } else { 2 })
        }
    }
}

fn emit(out: &Output, text: bool) {
    if text {
        print!("{}", out.text);
    } else {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
    }
}

fn load_map(path: &PathBuf) -> Result<HomogeneousMap, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(HomogeneousMap::from_json(&src)?)
}

fn parse_point(ctx: PrimeContext, s: &str) -> Result<ProjectivePoint, Error> {
    if s.trim_start().starts_with('{') {
        ProjectivePoint::from_json(ctx, s)
    } else {
        ProjectivePoint::parse(ctx, s)
    }
}

fn parse_coords(ctx: PrimeContext, s: &str) -> Result<Vec<PadicRational>, Error> {
    if s.trim_start().starts_with('{') {
        return Ok(ProjectivePoint::from_json(ctx, s)?.lift());
    }
    s.split(',').map(|c| PadicRational::parse(ctx, c.trim())).collect()
}

fn points(map: &HomogeneousMap, args: &PointsArg) -> Result<Vec<ProjectivePoint>, Error> {
    let pts = args
        .points
        .iter()
        .map(|s| parse_point(map.context(), s))
        .collect::<Result<Vec<_>, _>>()?;
    for p in &pts {
        if p.dimension() != map.dimension() {
            return Err(Error::DimensionMismatch {
                expected: map.dimension() + 1,
                found: p.dimension() + 1,
            });
        }
    }
    Ok(pts)
}

/// One JSON object for a single point, an array otherwise.
fn collect(items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.into_iter().next().expect("one item")
    } else {
        Value::Array(items)
    }
}

fn log_text(v: &LogValue) -> String {
    format!("{} log {} (≈ {})", v.coeff(), v.context().p(), round_sig(v.approx()))
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Resultant(m) => {
            let map = load_map(&m.map_file)?;
            let ctx = map.context();
            let mut json = map.resultant_valuation().to_json(ctx);
            json["p"] = json!(ctx.p());
            json["resultant"] = json!(map.resultant().to_string());
            json["scaling_exponent"] = json!(map.scaling_exponent());
            let text = format!(
                "v_p(Res) = {} for the minimal lift, |Res| = {}^-{}\nRes of the forms as given = {}\n",
                map.v_res(),
                ctx.p(),
                map.v_res(),
                map.resultant()
            );
            Ok(Output { json, text })
        }
        Command::Distance { map_file, p, points: args } => {
            let ctx = match (map_file, p) {
                (Some(path), _) => load_map(&path)?.context(),
                (None, Some(p)) => PrimeContext::new(p)?,
                (None, None) => unreachable!("clap requires one of --map, --p"),
            };
            let pts = args
                .points
                .iter()
                .map(|s| parse_point(ctx, s))
                .collect::<Result<Vec<_>, _>>()?;
            let [a, b] = pts.as_slice() else {
                return Err(Failure::Io("distance takes exactly two --point values".into()));
            };
            let d = chordal_distance(a, b)?;
            let text = match d.valuation().finite() {
                Some(w) => format!("Δ({a}, {b}) = {}^-{w}\n", ctx.p()),
                None => format!("Δ({a}, {b}) = 0\n"),
            };
            Ok(Output { json: d.to_json(ctx), text })
        }
        Command::Green { map: m, points: args, tol_n, tol, homogeneous } => {
            let map = load_map(&m.map_file)?;
            let ctx = map.context();
            let tol = tol
                .map(|t| parse_rational(&t).map(|c| LogValue::new(ctx, c)))
                .transpose()?;
            let mut items = Vec::new();
            let mut text = String::new();
            for (s, point) in args.points.iter().zip(points(&map, &args)?) {
                let est = match &tol {
                    Some(t) => green_hat(&map, &point, t)?,
                    None => green_hat_n(&map, &point, tol_n.unwrap_or(DEFAULT_DEPTH))?,
                };
                let _ = writeln!(
                    text,
                    "ĝ{point} ∈ [{}, {}], n = {}",
                    log_text(&est.lower()),
                    log_text(&est.upper()),
                    est.n_used
                );
                let mut item = json!({"point": point, "g_hat": est});
                if homogeneous {
                    let x = parse_coords(ctx, s)?;
                    let big = green_homogeneous_n(&map, &x, est.n_used)?;
                    let _ = writeln!(text, "G ∈ [{}, {}]", log_text(&big.lower()), log_text(&big.upper()));
                    item["G"] = serde_json::to_value(&big).expect("json");
                }
                items.push(item);
            }
            Ok(Output { json: collect(items), text })
        }
        Command::Classify { map: m, points: args } => {
            let map = load_map(&m.map_file)?;
            let mut items = Vec::new();
            let mut text = String::new();
            for point in points(&map, &args)? {
                let c = classify_orbit(&map, &point)?;
                let _ = writeln!(text, "{point}: {}", c.to_json());
                items.push(json!({"point": point, "classification": c.to_json()}));
            }
            Ok(Output { json: collect(items), text })
        }
        Command::Certify { map: m, points: args } => {
            let map = load_map(&m.map_file)?;
            let mut items = Vec::new();
            let mut text = String::new();
            for point in points(&map, &args)? {
                let cert = certify_fatou(&map, &point)?;
                let _ = writeln!(text, "{point}: {}", if cert.is_certified() {
                    "certified Fatou"
                } else {
                    "unknown"
                });
                items.push(json!({"point": point, "certificate": cert.to_json()}));
            }
            Ok(Output { json: collect(items), text })
        }
        Command::Orbit { map: m, points: args, n } => {
            let map = load_map(&m.map_file)?;
            let mut items = Vec::new();
            let mut text = String::new();
            for point in points(&map, &args)? {
                let defects = orbit_defects(&map, &point, n)?;
                let mut iterates = Vec::new();
                let mut cur = point.clone();
                for (k, m) in defects.iter().enumerate() {
                    let _ = writeln!(text, "φ^{k}: {}  m = {m}", cur.canonical());
                    iterates.push(json!({"k": k, "point": cur.canonical(), "m": m}));
                    cur = map.apply(&cur)?;
                }
                let _ = writeln!(text, "φ^{n}: {}", cur.canonical());
                iterates.push(json!({"k": n, "point": cur.canonical()}));
                items.push(json!({
                    "point": point,
                    "iterates": iterates,
                    "classification": classify_orbit(&map, &point)?.to_json(),
                }));
            }
            Ok(Output { json: collect(items), text })
        }
        Command::Verify { map: m, samples, seed, threads, depth } => {
            let map = load_map(&m.map_file)?;
            let cfg = VerifyConfig {
                samples,
                seed,
                threads,
                depth,
                ..VerifyConfig::default()
            };
            let report = verify(&map, &cfg)?;
            let out = Output {
                json: report.to_json(),
                text: report.to_text(),
            };
            if report.passed() {
                Ok(out)
            } else {
                Err(Failure::Property(out))
            }
        }
        Command::Holder(m) => {
            let map = load_map(&m.map_file)?;
            let h = holder_constants(&map);
            let lip = lipschitz_constant(&map);
            let json = json!({
                "holder": h.to_json(),
                "lipschitz_log": lip,
                "local_constancy_radius_valuation": local_constancy_radius(&map),
            });
            let text = format!(
                "u = {}, exponent = {}, coefficient = {}\nlog Lipschitz constant = {}\ng constant on pairs with w > {}\n",
                h.u(),
                round_sig(h.exponent),
                round_sig(h.coefficient),
                log_text(&lip),
                local_constancy_radius(&map)
            );
            Ok(Output { json, text })
        }
        Command::LemmaMin { dist, a, b, k_max } => {
            let k_max = k_max.unwrap_or_else(|| witness_depth(dist, a, b).max(64));
            let r = min_bound_lemma(dist, a, b, k_max)?;
            let json = json!({
                "min_value": round_sig(r.min_value),
                "argmin": r.argmin,
                "bound": round_sig(r.bound),
                "holds": r.holds,
                "k_max": k_max,
            });
            let text = format!(
                "min = {} at k = {}, bound = {}, {}\n",
                round_sig(r.min_value),
                r.argmin,
                round_sig(r.bound),
                if r.holds { "holds" } else { "VIOLATED" }
            );
            if r.holds {
                Ok(Output { json, text })
            } else {
                Err(Failure::Property(Output { json, text }))
            }
        }
    }
}
