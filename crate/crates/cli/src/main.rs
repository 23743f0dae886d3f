use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use perikos::dto::ExtRatJson;
use perikos::job::{run, JobSpec};
use serde_json::{json, Map, Value};

/// Exact-arithmetic period-map toolkit: p-adic formal groups, isocrystal
/// slope theory, Fargues-Fontaine bundle calculus, and the group actions
/// on Lubin-Tate tower points. All commands read and write strict JSON and
/// are byte-reproducible under a fixed seed.
#[derive(Parser)]
#[command(name = "perikos", version, arg_required_else_help = true)]
struct Cli {
    /// Execute a JobSpec document ({"command", "params", "seed", "prec"})
    /// instead of subcommand flags
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,

    /// Seed for randomized commands (byte-reproducible outputs)
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Option<Commands>,
}

#[derive(Subcommand)]
enum Commands {
    /// Build a deformation-space formal group law (or load one) and check
    /// the group-law axioms and its height mod p
    FglCheck {
        /// Height of the deformation law to build
        #[arg(long)]
        h: Option<u32>,
        #[arg(long)]
        p: Option<u64>,
        /// Deformation parameters as a JSON list, e.g. "[5]"
        #[arg(long)]
        u: Option<String>,
        /// Truncation order of the bivariate law
        #[arg(long)]
        order: Option<usize>,
        /// Coefficient precision (digits)
        #[arg(long)]
        prec: Option<i64>,
        /// Associativity mode: "full" or "sampled"
        #[arg(long)]
        assoc: Option<String>,
        /// Check a serialized law from a JSON file instead of building one
        #[arg(long, value_name = "FILE")]
        fgl_json: Option<PathBuf>,
        /// Height search bound
        #[arg(long)]
        h_max: Option<u32>,
    },
    /// Evaluate the crystalline period map at a rigid point of
    /// deformation space
    PeriodEval {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        p: Option<u64>,
        /// Deformation parameters as a JSON list, e.g. "[0]"
        #[arg(long)]
        u: Option<String>,
        /// Target output precision (certified digits)
        #[arg(long)]
        prec: Option<i64>,
    },
    /// Evaluate the global period point: Hecke triple, period-domain
    /// fiber, and the local period point inside it
    GlobalEval {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        prec: Option<i64>,
    },
    /// Newton polygon of a semilinear Frobenius matrix
    Newton {
        #[arg(long)]
        p: Option<u64>,
        /// Residue field exponent (default 1)
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        prec: Option<i64>,
        /// Matrix entries as JSON rows, e.g. "[[1,0],[0,5]]"
        #[arg(long)]
        entries: String,
    },
    /// Enumerate the rank-h degree-d stratum of the Kottwitz set
    Kottwitz {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        d: i64,
        /// Lower slope bound "a/b" (default 0)
        #[arg(long)]
        lo: Option<String>,
        /// Upper slope bound "a/b" (default 1)
        #[arg(long)]
        hi: Option<String>,
    },
    /// Bundle classes of one-dimensional height-h groups up to isogeny
    Bundles {
        #[arg(long)]
        h: u32,
    },
    /// Kappa invariant, point classification, and the Frobenius
    /// fundamental-domain representative
    Kappa {
        #[arg(long)]
        p: Option<u64>,
        /// Log-radius of p: "a/b" or "inf"
        #[arg(long)]
        log_p: String,
        /// Log-radius of the pseudo-uniformizer: "a/b" or "inf"
        #[arg(long)]
        log_w: String,
    },
    /// Validate a Hecke modification triple
    HeckeCheck {
        /// Bundle E as slope triples, e.g. "[[1,2,1]]" for O(1/2)
        #[arg(long)]
        e: String,
        /// Bundle F as slope triples, e.g. "[[0,1,2]]" for O(0)^2
        #[arg(long)]
        f: String,
        #[arg(long)]
        length: u32,
    },
    /// Multiply two division-algebra elements
    OdMul {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        prec: Option<i64>,
        /// Left factor as JSON, e.g. "{\"coeffs\":[1,0]}"
        #[arg(long)]
        a: String,
        /// Right factor as JSON
        #[arg(long)]
        b: String,
    },
    /// Apply a group action to a tower point
    Act {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        prec: Option<i64>,
        /// One of "j", "gl", "weil"
        #[arg(long)]
        action: String,
        /// Tower point document (JSON file)
        #[arg(long, value_name = "FILE")]
        point_json: PathBuf,
        /// Division-algebra operand for action "j" (inline JSON)
        #[arg(long)]
        s: Option<String>,
        /// Matrix operand for action "gl" (inline JSON rows)
        #[arg(long)]
        g: Option<String>,
        /// Weil operand for action "weil" (inline JSON {"n": 1})
        #[arg(long)]
        w: Option<String>,
    },
    /// Seeded randomized check that the J- and GL-actions commute
    CommuteCheck {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        prec: Option<i64>,
        #[arg(long)]
        trials: Option<u32>,
    },
}

fn schema_fail(msg: &str) -> ExitCode {
    let doc = json!({
        "schema_version": perikos::job::SCHEMA_VERSION,
        "tool": {"name": "perikos", "version": env!("CARGO_PKG_VERSION")},
        "error": {"kind": "schema", "message": msg},
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    eprintln!("perikos: schema error: {msg}");
    ExitCode::from(4)
}

fn parse_json_flag(name: &str, raw: &str) -> Result<Value, String> {
    serde_json::from_str(raw).map_err(|e| format!("flag --{name} is not valid JSON: {e}"))
}

fn parse_ext_rat(name: &str, raw: &str) -> Result<Value, String> {
    if raw == "inf" {
        return Ok(json!("inf"));
    }
    let (num, den) = match raw.split_once('/') {
        Some((a, b)) => (a, b),
        None => (raw, "1"),
    };
    let num: i64 = num
        .trim()
        .parse()
        .map_err(|_| format!("flag --{name}: bad numerator in {raw:?}"))?;
    let den: i64 = den
        .trim()
        .parse()
        .map_err(|_| format!("flag --{name}: bad denominator in {raw:?}"))?;
    // round-trips through the ExtRatJson schema
    let _ = ExtRatJson::Fin([num, den]);
    Ok(json!([num, den]))
}

fn build_job(cli: &Cli) -> Result<JobSpec, String> {
    let command = cli.command.as_ref().expect("clap enforces a subcommand");
    let mut params = Map::new();
    let mut ins = |k: &str, v: Value| {
        params.insert(k.to_string(), v);
    };
    let name = match command {
        Commands::FglCheck {
            h,
            p,
            u,
            order,
            prec,
            assoc,
            fgl_json,
            h_max,
        } => {
            if let Some(h) = h {
                ins("h", json!(h));
            }
            if let Some(p) = p {
                ins("p", json!(p));
            }
            if let Some(u) = u {
                ins("u", parse_json_flag("u", u)?);
            }
            if let Some(order) = order {
                ins("order", json!(order));
            }
            if let Some(prec) = prec {
                ins("prec", json!(prec));
            }
            if let Some(assoc) = assoc {
                ins("assoc", json!(assoc));
            }
            if let Some(path) = fgl_json {
                let raw = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                ins(
                    "fgl",
                    serde_json::from_str(&raw)
                        .map_err(|e| format!("{} is not valid JSON: {e}", path.display()))?,
                );
            }
            if let Some(h_max) = h_max {
                ins("h_max", json!(h_max));
            }
            "fgl-check"
        }
        Commands::PeriodEval { h, p, u, prec } | Commands::GlobalEval { h, p, u, prec } => {
            ins("h", json!(h));
            if let Some(p) = p {
                ins("p", json!(p));
            }
            if let Some(u) = u {
                ins("u", parse_json_flag("u", u)?);
            }
            if let Some(prec) = prec {
                ins("prec", json!(prec));
            }
            match command {
                Commands::PeriodEval { .. } => "period-eval",
                _ => "global-eval",
            }
        }
        Commands::Newton {
            p,
            m,
            prec,
            entries,
        } => {
            if let Some(p) = p {
                ins("p", json!(p));
            }
            if let Some(m) = m {
                ins("m", json!(m));
            }
            if let Some(prec) = prec {
                ins("prec", json!(prec));
            }
            ins("entries", parse_json_flag("entries", entries)?);
            "newton"
        }
        Commands::Kottwitz { h, d, lo, hi } => {
            ins("h", json!(h));
            ins("d", json!(d));
            if let Some(lo) = lo {
                ins("lo", parse_ext_rat("lo", lo)?);
            }
            if let Some(hi) = hi {
                ins("hi", parse_ext_rat("hi", hi)?);
            }
            "kottwitz"
        }
        Commands::Bundles { h } => {
            ins("h", json!(h));
            "bundles"
        }
        Commands::Kappa { p, log_p, log_w } => {
            if let Some(p) = p {
                ins("p", json!(p));
            }
            ins("log_p", parse_ext_rat("log-p", log_p)?);
            ins("log_w", parse_ext_rat("log-w", log_w)?);
            "kappa"
        }
        Commands::HeckeCheck { e, f, length } => {
            ins("e", parse_json_flag("e", e)?);
            ins("f", parse_json_flag("f", f)?);
            ins("length", json!(length));
            "hecke-check"
        }
        Commands::OdMul { p, h, prec, a, b } => {
            if let Some(p) = p {
                ins("p", json!(p));
            }
            ins("h", json!(h));
            if let Some(prec) = prec {
                ins("prec", json!(prec));
            }
            ins("a", parse_json_flag("a", a)?);
            ins("b", parse_json_flag("b", b)?);
            "od-mul"
        }
        Commands::Act {
            p,
            h,
            prec,
            action,
            point_json,
            s,
            g,
            w,
        } => {
            if let Some(p) = p {
                ins("p", json!(p));
            }
            ins("h", json!(h));
            if let Some(prec) = prec {
                ins("prec", json!(prec));
            }
            ins("action", json!(action));
            let raw = std::fs::read_to_string(point_json)
                .map_err(|e| format!("cannot read {}: {e}", point_json.display()))?;
            ins(
                "point",
                serde_json::from_str(&raw)
                    .map_err(|e| format!("{} is not valid JSON: {e}", point_json.display()))?,
            );
            if let Some(s) = s {
                ins("s", parse_json_flag("s", s)?);
            }
            if let Some(g) = g {
                ins("g", parse_json_flag("g", g)?);
            }
            if let Some(w) = w {
                ins("w", parse_json_flag("w", w)?);
            }
            "act"
        }
        Commands::CommuteCheck { p, h, prec, trials } => {
            if let Some(p) = p {
                ins("p", json!(p));
            }
            ins("h", json!(h));
            if let Some(prec) = prec {
                ins("prec", json!(prec));
            }
            if let Some(trials) = trials {
                ins("trials", json!(trials));
            }
            "commute-check"
        }
    };
    Ok(JobSpec {
        command: name.to_string(),
        params: Value::Object(params),
        seed: cli.seed,
        prec: None,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.json.is_some() && cli.command.is_some() {
        return schema_fail("--json conflicts with a subcommand; pick one input mode");
    }
    let job = if let Some(path) = &cli.json {
        let raw = match std::fs::read_to_string(path) {
            Ok(r) => r,
            Err(e) => return schema_fail(&format!("cannot read {}: {e}", path.display())),
        };
        let mut job: JobSpec = match serde_json::from_str(&raw) {
            Ok(j) => j,
            Err(e) => return schema_fail(&format!("invalid JobSpec document: {e}")),
        };
        if cli.seed.is_some() {
            job.seed = cli.seed;
        }
        job
    } else if cli.command.is_some() {
        match build_job(&cli) {
            Ok(j) => j,
            Err(e) => return schema_fail(&e),
        }
    } else {
        return schema_fail("no command given (use a subcommand or --json FILE)");
    };
    let (doc, code) = run(&job);
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    if code != 0 {
        if let Some(err) = doc.get("error") {
            eprintln!(
                "perikos: {} error: {}",
                err.get("kind").and_then(Value::as_str).unwrap_or("?"),
                err.get("message").and_then(Value::as_str).unwrap_or("?")
            );
        }
    }
    ExitCode::from(code as u8)
}
