use std::error::Error;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use omtbdd::bits::BitString;
use omtbdd::diagram::{EqResult, Omtbdd, Value};
use omtbdd::generator::{generate, GenParams};
use omtbdd::learner::{learn, query_bounds, write_events, LearnerConfig};
use omtbdd::oracles::{oracles_from_target, CachedMembership, MembershipOracle};
use omtbdd::pipeline::{compile_classifier, read_rows, EqMode, TreeClassifier};
use omtbdd::sweep::{cell_means, run_sweep, write_csv, Axis, SweepSpec};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "omtbdd", version, about = "Learn ordered multi-terminal decision diagrams from queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random reduced diagram with exactly n nodes.
    Gen(GenArgs),
    /// Learn a diagram from a target file with exact oracles.
    Learn(LearnArgs),
    /// Run a query-count sweep over random targets and write CSV.
    Sweep(SweepArgs),
    /// Compile a tree classifier into a diagram.
    Compile(CompileArgs),
    /// Evaluate a diagram on one input.
    Eval {
        file: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Check two diagrams for equivalence.
    Equiv { a: PathBuf, b: PathBuf },
    /// Reduce a diagram to canonical form.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a diagram as Graphviz DOT.
    Dot {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: Value,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    retry_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    target: PathBuf,
    /// Memoize membership answers and report distinct queries too.
    #[arg(long)]
    cache_mq: bool,
    /// Verify the learner's conditions after every update.
    #[arg(long)]
    check_invariants: bool,
    #[arg(long)]
    addedge_suffix: bool,
    /// Write the event log as JSON lines.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Write the learned diagram.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// nodes, vars or leaves
    #[arg(long)]
    axis: Axis,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    grid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 512)]
    m: usize,
    #[arg(long, default_value_t = 8)]
    k: Value,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Zero the timing column so output is reproducible.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    classifier: PathBuf,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Answer equivalence queries from the classifier's full truth table.
    #[arg(long)]
    exact: bool,
}

fn load(path: &Path) -> Result<Omtbdd> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Omtbdd::from_document(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let params = GenParams { retry_cap: a.retry_cap, ..GenParams::new(a.n, a.m, a.k, a.seed) };
    let d = generate(&params)?;
    let text = format!(
        "# gen n={} m={} k={} seed={} retry_cap={}\n{}",
        a.n,
        a.m,
        a.k,
        a.seed,
        a.retry_cap,
        d.to_document()
    );
    emit(a.out.as_deref(), &text)
}

fn cmd_learn(a: LearnArgs) -> Result<()> {
    let target = load(&a.target)?.reduce();
    let m = target.m();
    let config = LearnerConfig {
        addedge_suffix: a.addedge_suffix,
        check_against: a.check_invariants.then(|| target.clone()),
        record_events: a.events.is_some(),
        ..LearnerConfig::default()
    };
    let (mq, mut eq) = oracles_from_target(&target);
    let (out, distinct) = if a.cache_mq {
        let mut cached = CachedMembership::new(mq);
        let out = learn(m, &mut cached, &mut eq, &config)?;
        (out, Some(cached.distinct()))
    } else {
        let mut mq = mq;
        let out = learn(m, &mut mq, &mut eq, &config)?;
        debug_assert_eq!(mq.queries(), out.mq);
        (out, None)
    };
    if let Some(path) = &a.events {
        write_events(&out.events, BufWriter::new(File::create(path)?))?;
    }
    if let Some(path) = &a.out {
        fs::write(path, out.diagram.to_document())?;
    }
    let exact = out.diagram.equivalent(&target)?.is_yes();
    let (mq_bound, eq_bound) = query_bounds(target.node_count(), m);
    println!("nodes={}", out.diagram.node_count());
    println!("mq={}", out.mq);
    if let Some(d) = distinct {
        println!("mq_distinct={d}");
    }
    println!("eq={}", out.eq);
    println!("updates={}", out.updates.len());
    println!("exact={exact}");
    if !target.is_constant() {
        println!("mq_bound={mq_bound}");
        println!("eq_bound={eq_bound}");
        if out.mq > mq_bound || out.eq > eq_bound {
            return Err("query bound exceeded".into());
        }
    }
    if !exact {
        return Err("learned diagram differs from the target".into());
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let spec = SweepSpec {
        trials: a.trials,
        seed: a.seed,
        deterministic: a.deterministic,
        ..SweepSpec::new(a.axis, a.grid, a.n, a.m, a.k)
    };
    let rows = run_sweep(&spec)?;
    match &a.csv {
        Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    if a.csv.is_some() {
        for (value, mq, eq) in cell_means(&rows) {
            println!("{value}\tmean_mq={mq:.1}\tmean_eq={eq:.1}");
        }
    }
    if rows.iter().any(|r| r.bound_violation) {
        return Err("query bound exceeded".into());
    }
    Ok(())
}

fn cmd_compile(a: CompileArgs) -> Result<()> {
    let text = fs::read_to_string(&a.classifier).map_err(|e| format!("{}: {e}", a.classifier.display()))?;
    let c = TreeClassifier::parse(&text)?;
    let rows = match &a.data {
        Some(path) => read_rows(File::open(path).map_err(|e| format!("{}: {e}", path.display()))?)?,
        None => Vec::new(),
    };
    let mode = if a.exact { EqMode::Exact } else { EqMode::Dataset };
    let compiled = compile_classifier(&c, &rows, mode)?;
    let mut doc = String::new();
    for (j, cond) in compiled.conditions.iter().enumerate() {
        doc.push_str(&format!("# x{} feature={} threshold={:?}\n", j + 1, cond.feature, cond.threshold));
    }
    doc.push_str(&compiled.diagram.to_document());
    if let Some(path) = &a.out {
        fs::write(path, doc)?;
    }
    let report = compiled.report.to_string();
    match &a.report {
        Some(path) => fs::write(path, &report)?,
        None => print!("{report}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Learn(a) => cmd_learn(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Eval { file, input } => {
            let d = load(&file)?;
            let x: BitString = input.parse()?;
            println!("{}", d.eval(&x)?);
            Ok(())
        }
        Command::Equiv { a, b } => match load(&a)?.equivalent(&load(&b)?)? {
            EqResult::Yes => {
                println!("YES");
                Ok(())
            }
            EqResult::No(e) => {
                println!("NO {}", e.display_id());
                Ok(())
            }
        },
        Command::Reduce { file, out } => emit(out.as_deref(), &load(&file)?.reduce().to_document()),
        Command::Dot { file, out } => emit(out.as_deref(), &load(&file)?.to_dot()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
