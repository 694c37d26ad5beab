//! `mfnear`: counting formulas, table reproduction, closest-bent-function
//! analysis and the verification suite.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 on bad
//! usage or input.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mfnear::boolfun::is_bent;
use mfnear::counting::{self, log2_big, CountReport, ExactRational};
use mfnear::mmf::{coincidence_parents, map_to_coefficients, near_count, near_enumerate, realize_all, NearBentWitness};
use mfnear::oracle::{self, Suite, VerificationOutcome};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use crate::output::{Format, Report};

#[derive(Parser)]
#[command(name = "mfnear", version, about = "Closest bent functions of Maiorana-McFarland functions")]
struct Cli {
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for sampled work; a random one is drawn and reported if absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file. Defaults to `$MFNEAR_OUT_DIR/<command>.<ext>` when that
    /// variable is set, otherwise stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Keep wall-clock times in verification reports.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact counts and bounds for each 2n.
    Formulas {
        /// Values of 2n (even, 2 to 24).
        #[arg(long = "two-n", value_delimiter = ',', default_values_t = [2, 4, 6, 8, 10, 12, 14, 16])]
        two_n: Vec<usize>,
    },
    /// One of the five published tables.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        id: u8,
    },
    /// Closest bent functions of one function.
    Near(NearArgs),
    /// Brute-force verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Sample size for the randomized checks.
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Seeded Monte Carlo estimates.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        #[arg(long = "two-n")]
        two_n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
}

#[derive(Args)]
struct NearArgs {
    #[arg(value_enum)]
    mode: NearMode,
    /// Permutation as a JSON array, e.g. `[0,1,3,2]`.
    #[arg(long)]
    pi: Option<String>,
    /// `phi` as a bit string, character `y` holding `phi(y)`; zero if absent.
    #[arg(long)]
    phi: Option<String>,
    /// Truth table in hex (most significant digit first).
    #[arg(long, conflicts_with_all = ["pi", "phi"])]
    hex: Option<String>,
    /// Scan every affine subspace instead of using the criterion.
    #[arg(long)]
    brute: bool,
    /// With `list`: the 24 parents of a dimension-2 witness.
    #[arg(long)]
    parents: bool,
    /// Witness index for `--parents` (default: the first of dimension 2).
    #[arg(long, requires = "parents")]
    witness: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NearMode {
    Count,
    List,
    Realize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Sums,
    Coincidence,
    Census,
    Beta,
    Near,
}

impl SuiteArg {
    fn suite(self) -> Suite {
        match self {
            SuiteArg::All => Suite::All,
            SuiteArg::Sums => Suite::Sums,
            SuiteArg::Coincidence => Suite::Coincidence,
            SuiteArg::Census => Suite::Census,
            SuiteArg::Beta => Suite::Beta,
            SuiteArg::Near => Suite::Near,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SuiteArg::All => "all",
            SuiteArg::Sums => "sums",
            SuiteArg::Coincidence => "coincidence",
            SuiteArg::Census => "census",
            SuiteArg::Beta => "beta",
            SuiteArg::Near => "near",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    NearAverage,
    MSize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let seed = cli.seed.unwrap_or_else(rand::random);
    let (report, passed) = match &cli.command {
        Command::Formulas { two_n } => (formulas(two_n)?, true),
        Command::Table { id } => (table(*id)?, true),
        Command::Near(args) => (near(args)?, true),
        Command::Verify { suite, trials } => verify(*suite, *trials, seed, cli.timings)?,
        Command::Sample { kind, two_n, trials } => (sample(*kind, *two_n, *trials, seed)?, true),
    };
    if let Some(path) = report.emit(cli.format, cli.out.as_deref())? {
        eprintln!("wrote {}", path.display());
    }
    Ok(passed)
}

fn log2_of_int(v: &BigInt) -> Option<f64> {
    v.to_biguint().filter(|u| *u > BigUint::ZERO).map(|u| log2_big(&u))
}

fn log2_of_rational(v: &ExactRational) -> Option<f64> {
    (*v.numer() > BigInt::ZERO).then(|| v.log2())
}

fn quantity(name: impl Into<String>, exact: String, log2: Option<f64>) -> Value {
    json!({ "name": name.into(), "exact": exact, "log2": log2 })
}

fn formulas(list: &[usize]) -> Result<Report> {
    let mut result = Vec::new();
    let mut rows = Vec::new();
    let mut text = String::new();
    for &two_n in list {
        if two_n == 0 || two_n % 2 == 1 || two_n > 24 {
            bail!("2n must be even and at most 24, got {two_n}");
        }
        let n = two_n / 2;
        let mut q = Vec::new();
        let big = |v: BigUint| {
            let l = (v > BigUint::ZERO).then(|| log2_big(&v));
            (v.to_string(), l)
        };
        let (e, l) = big(counting::lambda(two_n)?);
        q.push(quantity("lambda", e, l));
        for k in 0..=n {
            let s = counting::sigma(n, k)?;
            q.push(quantity(format!("sigma_{k}"), s.to_string(), log2_of_rational(&s)));
        }
        let avg = counting::near_average(n)?;
        q.push(quantity("near_average", avg.to_string(), log2_of_rational(&avg)));
        for (name, v) in [
            ("mf", counting::mf_size(n)?),
            ("near_mf", counting::near_mf_size(n)?),
            ("mfsp", counting::mfsp_size(n)?),
            ("beta", counting::beta(two_n)?),
        ] {
            let (e, l) = big(v);
            q.push(quantity(name, e, l));
        }
        let m = counting::expected_m(two_n)?;
        q.push(quantity("expected_m", m.to_string(), log2_of_rational(&m)));
        let b = counting::mfc_bounds(two_n)?;
        q.push(quantity("mfc_lower", b.lower.to_string(), log2_of_int(&b.lower)));
        let (e, l) = big(b.upper);
        q.push(quantity("mfc_upper", e, l));
        if two_n >= 10 {
            let nb = counting::near_mfc_upper(two_n)?;
            q.push(quantity("near_mfc_upper", nb.bound.to_string(), log2_of_rational(&nb.bound)));
        }
        text.push_str(&format!("2n = {two_n}\n"));
        for item in &q {
            let name = item["name"].as_str().unwrap_or_default();
            let exact = item["exact"].as_str().unwrap_or_default();
            let log2 = item["log2"].as_f64().map(|l| format!("{l:.6}")).unwrap_or_default();
            text.push_str(&format!("  {name:<15} {exact}"));
            if !log2.is_empty() {
                text.push_str(&format!("  (log2 {log2})"));
            }
            text.push('\n');
            rows.push(vec![two_n.to_string(), name.to_string(), exact.to_string(), log2]);
        }
        result.push(json!({ "two_n": two_n, "quantities": q }));
    }
    Ok(Report {
        command: "formulas".into(),
        seed: None,
        result: Value::Array(result),
        header: vec!["two_n", "quantity", "exact", "log2"],
        rows,
        text,
    })
}

fn table(id: u8) -> Result<Report> {
    let rows: Vec<CountReport> = counting::table(id)?;
    let columns = counting::table_columns(id)?;
    let mut text = format!("{:>4}", "2n");
    for c in columns {
        text.push_str(&format!("  {c:>22}"));
    }
    text.push('\n');
    let mut two_ns: Vec<usize> = rows.iter().map(|r| r.two_n).collect();
    two_ns.dedup();
    for two_n in two_ns {
        text.push_str(&format!("{two_n:>4}"));
        for c in columns {
            let shown = rows
                .iter()
                .find(|r| r.two_n == two_n && r.column == *c)
                .map(|r| r.display.as_str())
                .unwrap_or("");
            text.push_str(&format!("  {shown:>22}"));
        }
        text.push('\n');
    }
    Ok(Report {
        command: format!("table {id}"),
        seed: None,
        result: serde_json::to_value(&rows)?,
        header: vec!["table", "two_n", "column", "display", "exact", "log2"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.table.to_string(),
                    r.two_n.to_string(),
                    r.column.to_string(),
                    r.display.clone(),
                    r.exact.clone().unwrap_or_default(),
                    r.log2.map(|l| l.to_string()).unwrap_or_default(),
                ]
            })
            .collect(),
        text,
    })
}

fn witness_json(index: usize, w: &NearBentWitness) -> Value {
    json!({
        "index": index,
        "dim": w.dim(),
        "l_base": w.l().base(),
        "l_basis": w.l().direction().basis(),
        "h": format!("{:#x}", w.coefficients()),
        "info_set": w.info_set().one_based(),
    })
}

fn near(args: &NearArgs) -> Result<Report> {
    let f = input::parse(args.pi.as_deref(), args.phi.as_deref(), args.hex.as_deref())?;
    let vars = f.table.vars();
    let mode = args.mode;
    if args.parents && !matches!(mode, NearMode::List) {
        bail!("--parents is only available with `list`");
    }
    if args.brute {
        if args.parents {
            bail!("--parents needs the criterion, not --brute");
        }
        if vars > oracle::MAX_BRUTE_VARS {
            bail!("--brute supports 2n <= {}, got {vars}", oracle::MAX_BRUTE_VARS);
        }
        if !is_bent(&f.table)? {
            bail!("the input function is not bent");
        }
    } else {
        if f.mm.is_none() {
            bail!("the input is not a Maiorana-McFarland function; use --brute");
        }
        if vars > 12 {
            bail!("the criterion is limited to 2n <= 12, got {vars}");
        }
    }
    let function = f.table.to_hex();
    let mut result = json!({ "function": function, "two_n": vars, "method": if args.brute { "brute" } else { "criterion" } });
    let mut header = vec![];
    let mut rows = vec![];
    let mut text = String::new();
    match (mode, args.brute, &f.mm) {
        (NearMode::Count, true, _) => {
            let (flats, scanned) = oracle::near_flats(&f.table)?;
            result["count"] = json!(flats.len());
            result["subspaces_scanned"] = json!(scanned);
            header = vec!["count"];
            rows.push(vec![flats.len().to_string()]);
            text = format!("{}\n", flats.len());
        }
        (NearMode::Count, false, Some(g)) => {
            let c = near_count(g)?;
            result["count"] = json!(c);
            header = vec!["count"];
            rows.push(vec![c.to_string()]);
            text = format!("{c}\n");
        }
        (NearMode::List, true, _) => {
            let (flats, _) = oracle::near_flats(&f.table)?;
            let list: Vec<Value> =
                flats.iter().map(|u| json!({ "base": u.base(), "basis": u.direction().basis() })).collect();
            header = vec!["base", "basis"];
            for u in &flats {
                let basis = u.direction().basis().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
                rows.push(vec![u.base().to_string(), basis.clone()]);
                text.push_str(&format!("base {} basis [{}]\n", u.base(), basis));
            }
            result["flats"] = Value::Array(list);
        }
        (NearMode::List, false, Some(g)) if args.parents => {
            let witnesses = near_enumerate(g)?;
            let index = match args.witness {
                Some(i) => i,
                None => witnesses
                    .iter()
                    .position(|w| w.dim() == 2)
                    .ok_or_else(|| anyhow::anyhow!("the function has no dimension-2 witness"))?,
            };
            let w = witnesses
                .get(index)
                .ok_or_else(|| anyhow::anyhow!("witness index {index} out of range ({} witnesses)", witnesses.len()))?;
            if w.dim() != 2 {
                bail!("witness {index} has dimension {}, parents need dimension 2", w.dim());
            }
            let parents = coincidence_parents(g, w)?;
            header = vec!["pi", "phi", "h"];
            let list: Vec<Value> = parents
                .iter()
                .map(|p| {
                    let pi = p.function.pi().table().to_vec();
                    let phi = input::phi_bits(p.function.phi());
                    let h = format!("{:#x}", map_to_coefficients(w.l(), &p.h));
                    rows.push(vec![format!("{pi:?}"), phi.clone(), h.clone()]);
                    text.push_str(&format!("pi {pi:?} phi {phi} h {h}\n"));
                    json!({ "pi": pi, "phi": phi, "h": h })
                })
                .collect();
            result["witness"] = witness_json(index, w);
            result["parents"] = Value::Array(list);
        }
        (NearMode::List, false, Some(g)) => {
            let witnesses = near_enumerate(g)?;
            header = vec!["index", "dim", "l_base", "l_basis", "h", "info_set"];
            let list: Vec<Value> = witnesses
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let basis = w.l().direction().basis().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
                    let info = w.info_set().one_based().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
                    let h = format!("{:#x}", w.coefficients());
                    rows.push(vec![i.to_string(), w.dim().to_string(), w.l().base().to_string(), basis.clone(), h.clone(), info.clone()]);
                    text.push_str(&format!("{i}: dim {} L {} + [{basis}] H {h} I {{{info}}}\n", w.dim(), w.l().base()));
                    witness_json(i, w)
                })
                .collect();
            result["witnesses"] = Value::Array(list);
        }
        (NearMode::Realize, brute, mm) => {
            let tables = if brute {
                oracle::near_brute(&f.table)?
            } else {
                let g = mm.as_ref().expect("checked above");
                let mut t = realize_all(g, &near_enumerate(g)?);
                t.sort();
                t
            };
            let hex: Vec<String> = tables.iter().map(|t| t.to_hex()).collect();
            header = vec!["table"];
            for h in &hex {
                rows.push(vec![h.clone()]);
                text.push_str(h);
                text.push('\n');
            }
            result["tables"] = json!(hex);
        }
        (_, false, None) => unreachable!("checked above"),
    }
    Ok(Report {
        command: "near".into(),
        seed: None,
        result,
        header,
        rows,
        text,
    })
}

fn verify(suite: SuiteArg, trials: u64, seed: u64, timings: bool) -> Result<(Report, bool)> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let outcomes: Vec<VerificationOutcome> = oracle::run_suite(suite.suite(), trials, seed)?
        .into_iter()
        .map(|o| if timings { o } else { o.without_timing() })
        .collect();
    let pass = outcomes.iter().all(|o| o.pass);
    let mut text = String::new();
    let mut rows = Vec::new();
    for o in &outcomes {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        text.push_str(&format!("[{mark}] {}: {}\n", o.label, o.observed));
        if let Some(w) = &o.witness {
            text.push_str(&format!("       witness: {w}\n"));
        }
        rows.push(vec![
            o.label.clone(),
            o.pass.to_string(),
            o.expected.clone(),
            o.observed.clone(),
            o.witness.clone().unwrap_or_default(),
            o.counters.subspaces_scanned.to_string(),
            o.counters.functions_tested.to_string(),
        ]);
    }
    let report = Report {
        command: "verify".into(),
        seed: Some(seed),
        result: json!({ "suite": suite.name(), "trials": trials, "pass": pass, "outcomes": outcomes }),
        header: vec!["label", "pass", "expected", "observed", "witness", "subspaces_scanned", "functions_tested"],
        rows,
        text,
    };
    Ok((report, pass))
}

fn sample(kind: SampleKind, two_n: usize, trials: u64, seed: u64) -> Result<Report> {
    if trials == 0 {
        bail!("--trials must be positive");
    }
    if two_n == 0 || two_n % 2 == 1 || two_n > 10 {
        bail!("2n must be even and at most 10, got {two_n}");
    }
    let (name, est, target) = match kind {
        SampleKind::NearAverage => (
            "near-average",
            oracle::sample_near_average(two_n, trials, seed)?,
            counting::near_average(two_n / 2)?,
        ),
        SampleKind::MSize => {
            if two_n > oracle::MAX_BRUTE_VARS {
                bail!("m-size sampling supports 2n <= {}", oracle::MAX_BRUTE_VARS);
            }
            ("m-size", oracle::m_sample(two_n, trials, seed)?, counting::expected_m(two_n)?)
        }
    };
    let target_f = target.to_f64();
    let z = est.z_score(target_f);
    let text = format!(
        "{name} 2n={two_n}: mean {:.6} +- {:.6} over {} samples (min {}, max {}); target {} = {target_f:.6}; z = {z:.3}\n",
        est.mean, est.std_error, est.count, est.min, est.max, target
    );
    Ok(Report {
        command: format!("sample {name}"),
        seed: Some(seed),
        result: json!({
            "kind": name,
            "two_n": two_n,
            "estimate": est,
            "target": target.to_string(),
            "target_f64": target_f,
            "z": z,
        }),
        header: vec!["kind", "two_n", "count", "mean", "std_error", "min", "max", "target", "z"],
        rows: vec![vec![
            name.to_string(),
            two_n.to_string(),
            est.count.to_string(),
            est.mean.to_string(),
            est.std_error.to_string(),
            est.min.to_string(),
            est.max.to_string(),
            target.to_string(),
            z.to_string(),
        ]],
        text,
    })
}
