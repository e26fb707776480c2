//! `iled`: learn, evaluate and generate Event Calculus definitions from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use iled::ec::{read_stream, serialize_windows, BackgroundTheory, Window, WindowContext};
use iled::incremental::{HistoricalMemory, Hypothesis, LearnConfig};
use iled::io::generator::{annotate, generate_narrative, FIGHTING_MODES, FIGHTING_TRUTH};
use iled::io::metrics::contiguous_segments;
use iled::io::{
    dump_window, evaluate, fighting_task, fighting_truth, learn_stream, Denominator, Dumps, Metrics, RunSinks,
    SyntheticConfig,
};
use iled::logic::{parse_modes, parse_program, LanguageConfig, Program};
use iled::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "iled", version, about = "Incremental learning of Event Calculus definitions")]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn incrementally from a stream of windows.
    Learn(LearnArgs),
    /// Learn in one batch from the whole stream presented as a single window.
    Xhail(TaskArgs),
    /// Score a hypothesis on test windows.
    Evaluate(EvaluateArgs),
    /// Write a seeded synthetic stream for the fighting task.
    Generate(GenerateArgs),
    /// Show the stored windows and latest hypothesis snapshot of a run directory.
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
struct TaskArgs {
    /// Mode declarations file.
    #[arg(long)]
    modes: PathBuf,
    /// Background rules for statically defined fluents.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Stream file, or a directory of `*.win` files.
    #[arg(long)]
    data: PathBuf,
    /// Variable depth bound of the mode language.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Node limit of one clause search.
    #[arg(long, default_value_t = 1 << 22)]
    node_cap: usize,
    /// Output directory for the run.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the Kernel Set of each window.
    #[arg(long)]
    dump_kernel: bool,
    /// Print the transformed Kernel Set and hypothesis of each window.
    #[arg(long)]
    dump_transformed: bool,
    /// Print the ground transformed program of each window.
    #[arg(long)]
    dump_ground: bool,
}

impl TaskArgs {
    fn dumps(&self) -> Dumps {
        Dumps { kernel: self.dump_kernel, transformed: self.dump_transformed, ground: self.dump_ground }
    }
}

#[derive(Args, Debug)]
struct LearnArgs {
    #[command(flatten)]
    task: TaskArgs,
    /// Re-cut the stream into windows of this many examples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    window: Option<u64>,
    /// Line-delimited step records; wall-clock times go to `<stem>.timing.jsonl` beside it.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Threads evaluating stored windows during a re-check.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Held-out stream to score the final hypothesis on.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Denominator::Instance)]
    denominator: Denominator,
    /// Check coverage and support sets against every stored window after each step.
    #[arg(long)]
    audit: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    modes: PathBuf,
    #[arg(long)]
    background: Option<PathBuf>,
    /// Hypothesis file.
    #[arg(long)]
    hypothesis: PathBuf,
    /// Test stream file or directory.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = Denominator::Instance)]
    denominator: Denominator,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Output directory for `stream.win`, `modes.lp` and `truth.lp`.
    #[arg(long)]
    out: PathBuf,
    /// Number of examples (time-point transitions).
    #[arg(long, default_value_t = 500)]
    examples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Window size in examples.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    window: u64,
    /// Number of persons.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(2..))]
    persons: u64,
    /// Probability that a person emits an event at a time point.
    #[arg(long, default_value_t = 1.0)]
    event_probability: f64,
    /// Also write a held-out `test.win` with this many examples.
    #[arg(long)]
    test_examples: Option<usize>,
}

#[derive(Args, Debug)]
struct InspectArgs {
    /// Run directory written by `learn --out`.
    #[arg(long)]
    out: PathBuf,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_task(modes: &Path, background: Option<&Path>, depth: usize) -> Result<(BackgroundTheory, LanguageConfig)> {
    let modes = parse_modes(&read_text(modes)?)?;
    let rules = match background {
        Some(p) => parse_program(&read_text(p)?)?,
        None => Program::default(),
    };
    let lang = LanguageConfig::new(modes.clone(), depth);
    Ok((BackgroundTheory::new(modes, rules)?, lang))
}

fn load_stream(path: &Path) -> Result<Vec<Window>> {
    let ws = read_stream(path)?;
    if ws.is_empty() {
        return Err(Error::Data(format!("{}: no windows", path.display())));
    }
    Ok(ws)
}

fn print_dumps(b: &BackgroundTheory, lang: &LanguageConfig, h: &Hypothesis, w: &Window, what: Dumps) -> Result<()> {
    if what.any() {
        let ctx = WindowContext::new(b, w)?;
        print!("{}", dump_window(b, &ctx, &h.clauses, lang, what)?);
    }
    Ok(())
}

fn timing_path(metrics: &Path) -> PathBuf {
    let stem = metrics.file_stem().map_or("metrics".into(), |s| s.to_string_lossy().into_owned());
    metrics.with_file_name(format!("{stem}.timing.jsonl"))
}

fn learn(args: &LearnArgs) -> Result<()> {
    let t = &args.task;
    let (b, lang) = load_task(&t.modes, t.background.as_deref(), t.depth)?;
    let mut windows = load_stream(&t.data)?;
    if let Some(g) = args.window {
        windows = Window::rewindow(&windows, g as usize)?;
    }
    let mut mem = match &t.out {
        Some(dir) => HistoricalMemory::open(dir)?,
        None => HistoricalMemory::in_memory(),
    };
    if !mem.is_empty() {
        return Err(Error::Data("output directory already holds a run; choose an empty one".into()));
    }
    let cfg = LearnConfig { language: lang.clone(), node_cap: t.node_cap, jobs: args.jobs.max(1) };
    let sinks =
        RunSinks { metrics: args.metrics.clone(), timing: args.metrics.as_deref().map(timing_path), audit: args.audit };
    let dumps = t.dumps();
    let run = learn_stream(&windows, &b, &cfg, &mut mem, Hypothesis::default(), &sinks, &mut |_, h, w| {
        print_dumps(&b, &lang, h, w, dumps)
    })?;
    print!("{}", run.hypothesis);
    if let Some(dir) = &t.out {
        write_text(&dir.join("hypothesis.lp"), &run.hypothesis.to_string())?;
    }
    let mut m = Metrics {
        hypothesis_size: run.hypothesis.literal_count(),
        clauses: run.hypothesis.len(),
        revisions: run.revisions(),
        window_reads: run.window_reads(),
        windows: windows.len(),
        training_time: run.seconds,
        ..Default::default()
    };
    if let Some(test) = &args.test {
        let s = evaluate(&b, &run.hypothesis.program(), &load_stream(test)?, args.denominator)?;
        m.precision = Some(s.precision());
        m.recall = Some(s.recall());
    }
    eprintln!("{}", serde_json::to_string(&m).expect("metrics serialize"));
    Ok(())
}

fn xhail(t: &TaskArgs) -> Result<()> {
    let (b, lang) = load_task(&t.modes, t.background.as_deref(), t.depth)?;
    let segments = contiguous_segments(&load_stream(&t.data)?);
    let [batch] = segments.as_slice() else {
        return Err(Error::Data(format!("batch mode needs one contiguous stream, found {} segments", segments.len())));
    };
    let mut mem = HistoricalMemory::in_memory();
    let cfg = LearnConfig { language: lang.clone(), node_cap: t.node_cap, jobs: 1 };
    let run = learn_stream(
        std::slice::from_ref(batch),
        &b,
        &cfg,
        &mut mem,
        Hypothesis::default(),
        &RunSinks::default(),
        &mut |_, h, w| print_dumps(&b, &lang, h, w, t.dumps()),
    )?;
    let text = run.hypothesis.program().to_string();
    print!("{text}");
    if let Some(dir) = &t.out {
        write_text(&dir.join("hypothesis.lp"), &text)?;
    }
    Ok(())
}

fn evaluate_cmd(args: &EvaluateArgs) -> Result<()> {
    let (b, _) = load_task(&args.modes, args.background.as_deref(), 1)?;
    let h = parse_program(&read_text(&args.hypothesis)?)?;
    let s = evaluate(&b, &h, &load_stream(&args.data)?, args.denominator)?;
    let m = Metrics {
        precision: Some(s.precision()),
        recall: Some(s.recall()),
        hypothesis_size: h.literal_count(),
        clauses: h.len(),
        ..Default::default()
    };
    println!("{}", serde_json::to_string(&m).expect("metrics serialize"));
    Ok(())
}

/// Seed of the held-out stream derived from the training seed.
fn test_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let (b, _) = fighting_task();
    let truth = fighting_truth();
    let stream = |n: usize, seed: u64| -> Result<String> {
        let cfg = SyntheticConfig {
            persons: args.persons as usize,
            event_probability: args.event_probability,
            ..SyntheticConfig::new(n, seed)
        };
        let mut w = generate_narrative(&cfg);
        annotate(&b, &truth, &mut w)?;
        Ok(serialize_windows(&Window::rewindow(&[w], args.window as usize)?))
    };
    write_text(&args.out.join("stream.win"), &stream(args.examples, args.seed)?)?;
    if let Some(n) = args.test_examples {
        write_text(&args.out.join("test.win"), &stream(n, test_seed(args.seed))?)?;
    }
    write_text(&args.out.join("modes.lp"), FIGHTING_MODES)?;
    write_text(&args.out.join("truth.lp"), FIGHTING_TRUTH)?;
    info!("wrote {}", args.out.display());
    Ok(())
}

fn inspect(args: &InspectArgs) -> Result<()> {
    if !args.out.is_dir() {
        return Err(Error::Data(format!("{}: not a run directory", args.out.display())));
    }
    let mem = HistoricalMemory::open(&args.out)?;
    println!("% windows stored: {}", mem.len());
    let latest = (1..=mem.len() as u64).rev().map(|n| args.out.join(format!("hypothesis.{n}.lp"))).find(|p| p.exists());
    match latest {
        Some(p) => {
            println!("% snapshot: {}", p.display());
            print!("{}", read_text(&p)?);
        }
        None => println!("% no hypothesis snapshot"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Learn(a) => learn(a),
        Command::Xhail(a) => xhail(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Generate(a) => generate(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iled: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
