mod output;
mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tabu_portfolio::{
    parse_orlib, read_frontier_csv, read_report_csv, solve_cef_observed, solve_uef, summary_metrics,
    write_frontier_csv, write_report_csv, CefConfig, Constraints, Frontier, Instance, IterationRecord, LambdaRun,
    SearchObserver, DEFAULT_QP_TOL, DEFAULT_UEF_POINTS,
};

use output::{read_text, Staged};
use svg::{Series, Style};

/// Cardinality-constrained mean-variance portfolio selection.
#[derive(Parser)]
#[command(name = "tabufolio", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the exact (unconstrained) efficient frontier.
    Uef(UefArgs),
    /// Run the tabu search over the risk-aversion sweep.
    Solve(SolveArgs),
    /// Compare a constrained frontier against the exact one.
    Metrics(MetricsArgs),
}

#[derive(Args)]
struct PlotArgs {
    /// SVG plot path [default: the CSV path with an .svg extension]
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Do not write a plot.
    #[arg(long, conflicts_with = "plot")]
    no_plot: bool,
}

impl PlotArgs {
    fn path(&self, csv: &Path) -> Option<PathBuf> {
        if self.no_plot {
            None
        } else {
            Some(self.plot.clone().unwrap_or_else(|| csv.with_extension("svg")))
        }
    }
}

#[derive(Args)]
struct UefArgs {
    /// OR-Library instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Number of target returns in the sweep, before the dominance filter.
    #[arg(long, default_value_t = DEFAULT_UEF_POINTS)]
    uef_points: usize,
    /// KKT residual tolerance for each QP solve.
    #[arg(long, default_value_t = DEFAULT_QP_TOL)]
    qp_tol: f64,
    #[arg(long, default_value = "uef.csv")]
    out: PathBuf,
    #[command(flatten)]
    plot: PlotArgs,
}

#[derive(Args)]
struct SolveArgs {
    /// OR-Library instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Number of assets held.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Lower bound on each held weight.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Upper bound on each held weight.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Spacing of the risk-aversion grid on [0, 1].
    #[arg(long, default_value_t = 0.02)]
    lambda_step: f64,
    /// Random trials for the greedy initial portfolio.
    #[arg(long, default_value_t = 10_000)]
    t_trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Upper limit on token-ring passes per risk-aversion value.
    #[arg(long)]
    max_passes: Option<usize>,
    /// Concurrent risk-aversion runs [default: available cores]
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long, default_value = "cef.csv")]
    out: PathBuf,
    /// Exact frontier CSV drawn behind the solutions in the plot.
    #[arg(long)]
    uef: Option<PathBuf>,
    /// Write every tabu-search iteration to this CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write a per-run summary (passes, objectives) to this CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write the run time to this CSV (metric,value), for `metrics --run-report`.
    #[arg(long)]
    run_report: Option<PathBuf>,
    #[command(flatten)]
    plot: PlotArgs,
}

#[derive(Args)]
struct MetricsArgs {
    /// Constrained frontier CSV from `solve`.
    #[arg(long)]
    cef: PathBuf,
    /// Exact frontier CSV from `uef`.
    #[arg(long)]
    uef: PathBuf,
    /// Run report from `solve --run-report`; adds time_seconds to the output.
    #[arg(long)]
    run_report: Option<PathBuf>,
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Uef(a) => cmd_uef(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Metrics(a) => cmd_metrics(&a),
    }
}

fn load_instance(path: &Path) -> Result<Instance<f64>> {
    let text = read_text(path)?;
    parse_orlib(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn load_frontier(path: &Path) -> Result<Frontier<f64>> {
    let text = read_text(path)?;
    read_frontier_csv(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn frontier_series(f: &Frontier<f64>, label: &str, color: &'static str, style: Style) -> Series {
    Series {
        label: label.into(),
        color,
        style,
        points: f.points().iter().map(|p| (p.risk, p.ret)).collect(),
    }
}

fn finish(staged: Staged) -> Result<()> {
    for path in staged.commit()? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_uef(a: &UefArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let uef = solve_uef(&inst, a.uef_points, a.qp_tol)
        .with_context(|| format!("exact frontier of {}", a.instance.display()))?;

    let mut staged = Staged::default();
    staged.add(&a.out, &write_frontier_csv(&uef))?;
    if let Some(p) = a.plot.path(&a.out) {
        let title = format!("Exact frontier, {} assets", inst.n());
        let series = [frontier_series(&uef, "exact", "steelblue", Style::Line)];
        staged.add(&p, &svg::plot(&title, "variance", "mean return", &series))?;
    }
    println!("{} frontier points from {} targets", uef.len(), a.uef_points);
    finish(staged)
}

/// Per-run log: best objective after each pass and, with `--trace`, every
/// t1 iteration rendered as CSV rows.
struct RunLog {
    index: usize,
    lambda: f64,
    trace: Option<String>,
}

impl SearchObserver<f64> for RunLog {
    fn iteration(&mut self, invocation: usize, q: f64, r: &IterationRecord<f64>) {
        if let Some(t) = &mut self.trace {
            let _ = writeln!(
                t,
                "{},{},{},{},{},{},{},{},{},{}",
                self.index,
                self.lambda,
                invocation,
                q,
                r.iteration,
                r.kind.as_str(),
                r.target + 1,
                r.tabu,
                r.objective,
                r.incumbent
            );
        }
    }
}

const TRACE_HEADER: &str = "lambda_index,lambda,invocation,q,iteration,move,asset,tabu,objective,incumbent\n";
const SUMMARY_HEADER: &str = "lambda_index,lambda,passes,t1_invocations,hit_pass_cap,initial_objective,warmup_objective,objective,risk,return,pass_objectives\n";

fn summary_csv(runs: &[LambdaRun<f64>]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    for r in runs {
        let o = &r.outcome;
        let passes: Vec<String> = o.pass_objectives.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.index,
            r.lambda,
            o.passes(),
            o.t1_invocations,
            o.hit_pass_cap,
            o.initial_evaluation.objective,
            o.warmup_objective,
            o.evaluation.objective,
            o.evaluation.risk,
            o.evaluation.ret,
            passes.join(";")
        );
    }
    out
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    // bad bounds are reported before anything is read or solved
    Constraints::new(a.k, a.epsilon, a.delta, 0.0)?;
    if a.parallel == Some(0) {
        bail!("--parallel must be at least 1");
    }

    let start = Instant::now();
    let inst = load_instance(&a.instance)?;
    let overlay = a.uef.as_deref().map(load_frontier).transpose()?;

    let mut config = CefConfig::standard(a.seed);
    config.k = a.k;
    config.epsilon = a.epsilon;
    config.delta = a.delta;
    config.lambda_step = a.lambda_step;
    config.construct_trials = a.t_trials;
    if let Some(m) = a.max_passes {
        config.max_passes = m;
    }

    let tracing = a.trace.is_some();
    let solve = || {
        solve_cef_observed(&inst, &config, |index, lambda| RunLog {
            index,
            lambda,
            trace: tracing.then(String::new),
        })
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = a.parallel {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("cannot start the worker pool")?;
    let (cef, logs) = pool
        .install(solve)
        .with_context(|| format!("solving {}", a.instance.display()))?;
    let seconds = start.elapsed().as_secs_f64();

    let mut staged = Staged::default();
    staged.add(&a.out, &write_frontier_csv(&cef.frontier))?;
    if let Some(p) = a.plot.path(&a.out) {
        let mut series = Vec::new();
        if let Some(u) = &overlay {
            series.push(frontier_series(u, "exact", "steelblue", Style::Line));
        }
        series.push(frontier_series(&cef.frontier, "tabu search", "crimson", Style::Markers));
        let title = format!("Constrained frontier, k = {} of {} assets", a.k, inst.n());
        staged.add(&p, &svg::plot(&title, "variance", "mean return", &series))?;
    }
    if let Some(p) = &a.trace {
        let mut text = String::from(TRACE_HEADER);
        for log in &logs {
            text.push_str(log.trace.as_deref().unwrap_or_default());
        }
        staged.add(p, &text)?;
    }
    if let Some(p) = &a.summary {
        staged.add(p, &summary_csv(&cef.runs))?;
    }
    if let Some(p) = &a.run_report {
        staged.add(p, &format!("metric,value\ntime_seconds,{seconds}\n"))?;
    }

    let capped = cef.runs.iter().filter(|r| r.outcome.hit_pass_cap).count();
    let invocations: usize = cef.runs.iter().map(|r| r.outcome.t1_invocations).sum();
    println!(
        "{} risk-aversion values, {invocations} tabu searches, {capped} runs stopped at the pass cap, {seconds:.2} s",
        cef.runs.len()
    );
    finish(staged)
}

fn cmd_metrics(a: &MetricsArgs) -> Result<()> {
    let cef = load_frontier(&a.cef)?;
    let uef = load_frontier(&a.uef)?;
    let time = match &a.run_report {
        Some(p) => {
            let rows = read_report_csv(&read_text(p)?).with_context(|| format!("cannot parse {}", p.display()))?;
            let t = rows.iter().find(|(m, _)| m == "time_seconds").map(|r| r.1);
            if t.is_none() {
                bail!("{} has no time_seconds row", p.display());
            }
            t
        }
        None => None,
    };
    let report = summary_metrics(&cef, &uef)
        .with_context(|| format!("comparing {} against {}", a.cef.display(), a.uef.display()))?;

    println!("{:<16}{:>12}", "", "error (%)");
    println!("{:<16}{:>12.4}", "median", report.median_error);
    println!("{:<16}{:>12.4}", "mean", report.mean_error);
    println!("{:<16}{:>12.4}", "risk", report.risk_error);
    println!("{:<16}{:>12.4}", "return", report.return_error);
    if let Some(t) = time {
        println!("{:<16}{:>12.1}", "time (s)", t);
    }
    println!(
        "{} points, {} with a defined error",
        report.per_point.len(),
        report.defined()
    );

    let mut staged = Staged::default();
    staged.add(&a.out, &write_report_csv(&report, time))?;
    finish(staged)
}
