use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use refined_curves::cache::{d_series_cached, Cache};
use refined_curves::localize::Certify;
use refined_curves::refined::{
    check_proposition, extract_refined, render_csv, render_table, required_truncation, table_to_json,
    universal_eval, universal_fit, DSeries, RefinedTable, SurfaceGeometry,
};
use refined_curves::series::{rat_to_string, Coefficient};
use refined_curves::suite::run_suite;
use refined_curves::toric::{load_surface, preset_with_divisor, EquivLineBundle, ToricSurfaceModel};

#[derive(Parser)]
#[command(name = "refined-curves", version, about = "Refined curve counts on toric surfaces by exact localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Cache directory (REFINED_CURVES_CACHE takes precedence)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Always recompute
    #[arg(long, global = true)]
    no_cache: bool,
    /// Seed for the specialization draws
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Certify with three specializations instead of two
    #[arg(long, global = true)]
    paranoid: bool,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct SurfaceArg {
    /// Preset (`p2:d`, `p1xp1:a,b`, `hirzebruch:a:c1,c2`) or model-file path
    surface: String,
    /// Divisor coordinates `a_1,...,a_k` on the preset's rays, replacing its bundle
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bundle: Option<Vec<i64>>,
}

#[derive(Subcommand)]
enum Command {
    /// The generating series D(x, y, w) of localized integrals
    DSeries {
        #[command(flatten)]
        surface: SurfaceArg,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        x_order: i64,
    },
    /// The table N^i, M^i for one delta (or m = chi(L) - 1 - delta)
    Refined {
        #[command(flatten)]
        surface: SurfaceArg,
        #[arg(long, conflicts_with = "m", required_unless_present = "m", allow_hyphen_values = true)]
        delta: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long)]
        n_max: Option<i64>,
        #[arg(long)]
        x_order: Option<i64>,
    },
    /// Refined node polynomials N^d(y) for d = 0..=delta
    NodePoly {
        #[command(flatten)]
        surface: SurfaceArg,
        #[arg(long)]
        delta: i64,
        #[arg(long)]
        n_max: Option<i64>,
    },
    /// Fit the four universal series from four surfaces and test a fifth
    UniversalFit {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        x_order: i64,
        /// Four presets
        #[arg(long, num_args = 4, default_values = ["p2:1", "p2:2", "p1xp1:1,1", "hirzebruch:1:2,3"])]
        basis: Vec<String>,
        /// Preset compared against the fit
        #[arg(long, default_value = "p1xp1:1,2")]
        held_out: String,
        /// Evaluate the fit at `L^2,LK,K^2,c2`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eval: Option<Vec<i64>>,
    },
    /// Run a check suite
    Check {
        #[arg(long, default_value = "core")]
        suite: String,
    },
}

/// Input errors exit with 2, property violations with 1.
enum Failure {
    Input(String),
    Violation(String),
}

type Outcome = Result<String, Failure>;

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

struct Ctx {
    format: Format,
    certify: Certify,
    cache: Cache,
}

fn load(arg: &SurfaceArg) -> Result<(ToricSurfaceModel, EquivLineBundle), Failure> {
    match &arg.bundle {
        Some(div) => preset_with_divisor(&arg.surface, div).map_err(input),
        None => load_surface(&arg.surface).map_err(input),
    }
}

fn bundle_label(l: &EquivLineBundle) -> String {
    if l.divisor.is_empty() {
        "model".into()
    } else {
        let d: Vec<String> = l.divisor.iter().map(i64::to_string).collect();
        format!("D={}", d.join(","))
    }
}

fn d_for(ctx: &Ctx, s: &ToricSurfaceModel, l: &EquivLineBundle, n: usize, x: i64) -> Result<DSeries, Failure> {
    d_series_cached(s, l, n, x, &ctx.certify, &ctx.cache).map_err(|e| Failure::Violation(e.to_string()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn d_series_cmd(ctx: &Ctx, arg: &SurfaceArg, n_max: usize, x_order: i64) -> Outcome {
    if x_order < 0 {
        return Err(Failure::Input(format!("--x-order must be >= 0, got {x_order}")));
    }
    let (s, l) = load(arg)?;
    let d = d_for(ctx, &s, &l, n_max, x_order)?;
    let mut rows = Vec::new();
    for n in 0..=d.order() {
        let c = d.coeff(n).map_err(input)?;
        for e in 0..=c.order() {
            rows.push((n, e, c.coeff(e).map_err(input)?.to_y_string()));
        }
    }
    Ok(match ctx.format {
        Format::Json => pretty(&json!({
            "surface": s.name,
            "bundle": bundle_label(&l),
            "n_max": n_max,
            "x_order": x_order,
            "series": d.to_json(),
        })),
        Format::Csv => {
            let mut out = String::from("surface,bundle,w,x,coefficient\n");
            for (n, e, c) in rows {
                out.push_str(&format!("{},\"{}\",{n},{e},\"{c}\"\n", s.name, bundle_label(&l)));
            }
            out
        }
        Format::Table => {
            let width = rows.iter().map(|r| format!("w^{} x^{}", r.0, r.1).len()).max().unwrap_or(0);
            rows.iter().map(|(n, e, c)| format!("{:<width$}  {c}\n", format!("w^{n} x^{e}"))).collect()
        }
    })
}

fn check_truncation(delta: i64, n_max: Option<i64>, x_order: Option<i64>) -> Result<(i64, i64), Failure> {
    let (need_n, need_x) = required_truncation(delta);
    let n = n_max.unwrap_or(need_n);
    let x = x_order.unwrap_or(need_x);
    if n < need_n || x < need_x {
        return Err(Failure::Input(format!(
            "truncation too small for delta = {delta}: need --n-max >= {need_n} and --x-order >= {need_x}, got {n}, {x}"
        )));
    }
    Ok((n, x))
}

fn render_tables(ctx: &Ctx, tables: &[RefinedTable], json: Value) -> String {
    match ctx.format {
        Format::Json => pretty(&json),
        Format::Csv => render_csv(tables),
        Format::Table => render_table(tables),
    }
}

fn violations(tables: &[RefinedTable]) -> Vec<String> {
    let mut out = Vec::new();
    for t in tables {
        for c in check_proposition(t).checks.iter().filter(|c| !c.passed) {
            out.push(format!("delta={}: {} failed: {}", t.delta, c.name, c.detail));
        }
    }
    out
}

fn finish(output: String, bad: Vec<String>) -> Outcome {
    if bad.is_empty() {
        Ok(output)
    } else {
        print!("{output}");
        Err(Failure::Violation(bad.join("\n")))
    }
}

fn refined_cmd(
    ctx: &Ctx,
    arg: &SurfaceArg,
    delta: Option<i64>,
    m: Option<i64>,
    n_max: Option<i64>,
    x_order: Option<i64>,
) -> Outcome {
    let (s, l) = load(arg)?;
    let geom = SurfaceGeometry::from_model(&s, &l).map_err(input)?;
    let delta = match (delta, m) {
        (Some(d), None) => d,
        (None, Some(m)) => geom.delta_for(m).map_err(input)?,
        _ => return Err(Failure::Input("give exactly one of --delta and --m".into())),
    };
    if delta < 0 || delta > geom.chi_l - 1 {
        return Err(Failure::Input(format!("need 0 <= delta <= chi(L) - 1 = {}, got {delta}", geom.chi_l - 1)));
    }
    let (n, x) = check_truncation(delta, n_max, x_order)?;
    let d = d_for(ctx, &s, &l, n as usize, x)?;
    let table = extract_refined(&s.name, &bundle_label(&l), &geom, &d, delta).map_err(input)?;
    let tables = [table];
    let out = render_tables(ctx, &tables, table_to_json(&tables[0]));
    finish(out, violations(&tables))
}

fn node_poly_cmd(ctx: &Ctx, arg: &SurfaceArg, delta: i64, n_max: Option<i64>) -> Outcome {
    let (s, l) = load(arg)?;
    let geom = SurfaceGeometry::from_model(&s, &l).map_err(input)?;
    if delta < 0 || delta > geom.chi_l - 1 {
        return Err(Failure::Input(format!("need 0 <= delta <= chi(L) - 1 = {}, got {delta}", geom.chi_l - 1)));
    }
    let (n, x) = check_truncation(delta, n_max, None)?;
    let d = d_for(ctx, &s, &l, n as usize, x)?;
    let label = bundle_label(&l);
    let tables: Vec<RefinedTable> = (0..=delta)
        .map(|k| extract_refined(&s.name, &label, &geom, &d, k))
        .collect::<Result<_, _>>()
        .map_err(input)?;
    let polys: Vec<Value> = tables
        .iter()
        .map(|t| {
            json!({
                "delta": t.delta,
                "N": t.n(t.delta).to_json(),
                "N_at_y1": rat_to_string(&t.y1_n(t.delta)),
                "palindromic": t.n(t.delta).is_palindromic(),
            })
        })
        .collect();
    let out = match ctx.format {
        Format::Table => {
            let mut out = String::from("delta  N_delta(y)  N_delta(1)\n");
            for t in &tables {
                out.push_str(&format!("{}  {}  {}\n", t.delta, t.n(t.delta).to_y_string(), rat_to_string(&t.y1_n(t.delta))));
            }
            out
        }
        _ => render_tables(
            ctx,
            &tables,
            json!({
                "surface": s.name,
                "bundle": label,
                "geometry": geom,
                "node_polynomials": polys,
                "tables": tables.iter().map(table_to_json).collect::<Vec<_>>(),
            }),
        ),
    };
    finish(out, violations(&tables))
}

fn universal_cmd(
    ctx: &Ctx,
    n_max: usize,
    x_order: i64,
    basis: &[String],
    held_out: &str,
    eval: Option<&[i64]>,
) -> Outcome {
    let basis: Vec<_> = basis.iter().map(|id| load_surface(id)).collect::<Result<_, _>>().map_err(input)?;
    let held = load_surface(held_out).map_err(input)?;
    let fit = universal_fit(&basis, Some(&held), n_max, x_order, |s, l, n, x| {
        d_series_cached(s, l, n, x, &ctx.certify, &ctx.cache)
            .map_err(|e| refined_curves::refined::RefinedError::InvalidInput(e.to_string()))
    })
    .map_err(|e| Failure::Violation(e.to_string()))?;
    let mut value = fit.to_json();
    if let Some(e) = eval {
        let chern: [i64; 4] = e
            .try_into()
            .map_err(|_| Failure::Input(format!("--eval needs 4 numbers L^2,LK,K^2,c2, got {}", e.len())))?;
        value["evaluation"] = json!({"chern": chern, "series": universal_eval(&fit, chern).map_err(input)?.to_json()});
    }
    let out = match ctx.format {
        Format::Json => pretty(&value),
        _ => {
            let mut out = String::from("pair  L^2  LK  K^2  c2\n");
            for b in fit.basis.iter().chain(fit.held_out.as_ref()) {
                let [a, b2, c, d] = b.chern;
                out.push_str(&format!("{}  {a}  {b2}  {c}  {d}\n", b.name));
            }
            let verdict = match fit.mismatch {
                None => format!("held-out reproduced through w^{n_max} x^{x_order}"),
                Some((k, e)) => format!("held-out differs at w^{k} x^{e}"),
            };
            out.push_str(&verdict);
            out.push('\n');
            out
        }
    };
    let bad = match fit.mismatch {
        Some((k, e)) => vec![format!("held-out {held_out} differs from the fit at w^{k} x^{e}")],
        None => vec![],
    };
    finish(out, bad)
}

fn check_cmd(ctx: &Ctx, suite: &str) -> Outcome {
    let report = run_suite(suite, &ctx.certify, &ctx.cache).map_err(Failure::Input)?;
    let out = match ctx.format {
        Format::Json => pretty(&serde_json::to_value(&report).expect("json")),
        Format::Csv => {
            let mut out = String::from("suite,check,passed,detail\n");
            for c in &report.checks {
                out.push_str(&format!("{},{},{},\"{}\"\n", report.suite, c.name, c.passed, c.detail.replace('"', "\"\"")));
            }
            out
        }
        Format::Table => report.render(),
    };
    let bad = report.checks.iter().filter(|c| !c.passed).map(|c| format!("{} failed", c.name)).collect();
    finish(out, bad)
}

fn run(cli: Cli) -> Outcome {
    let o = &cli.opts;
    if let Some(t) = o.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(input)?;
    }
    let cache = if o.no_cache { Cache::disabled() } else { Cache::from_env_or(o.cache_dir.clone()) };
    let ctx = Ctx { format: o.format, certify: Certify { seed: o.seed, paranoid: o.paranoid }, cache };
    match &cli.command {
        Command::DSeries { surface, n_max, x_order } => d_series_cmd(&ctx, surface, *n_max, *x_order),
        Command::Refined { surface, delta, m, n_max, x_order } => {
            refined_cmd(&ctx, surface, *delta, *m, *n_max, *x_order)
        }
        Command::NodePoly { surface, delta, n_max } => node_poly_cmd(&ctx, surface, *delta, *n_max),
        Command::UniversalFit { n_max, x_order, basis, held_out, eval } => {
            universal_cmd(&ctx, *n_max, *x_order, basis, held_out, eval.as_deref())
        }
        Command::Check { suite } => check_cmd(&ctx, suite),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("property violation: {msg}");
            ExitCode::from(1)
        }
    }
}
