use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use bmcp::harness::{compare_variants, run_bench_in, summarize_configs, write_results, BenchSpec};
use bmcp::instgen::{generate, Family, GenParams, IntRange};
use bmcp::vdls::{BranchPick, BranchPool, InitStrategy};
use bmcp::{exact_opt, greedy_construct, instance_stats, run_vdls, Instance, NeighbourGraph, SearchConfig, Solution};

#[derive(Parser)]
#[command(name = "bmcp", version, about = "Budgeted maximum coverage solvers and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print structural statistics of an instance as JSON.
    Stats { instance: PathBuf },
    /// Solve an instance with the greedy construction or the local search.
    Solve(SolveArgs),
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Compute the exact optimum of a small instance.
    Oracle {
        instance: PathBuf,
        /// Maximum number of search nodes.
        #[arg(long, default_value_t = 50_000_000)]
        limit: u64,
    },
    /// Run a batch experiment described by a JSON spec.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// Per-run CSV; the summary goes next to it as <stem>.summary.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (overrides the spec; 0 = all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Greedy,
    Vdls,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolArg {
    Neighbours,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PickArg {
    Top,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Greedy,
    Empty,
    Random,
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "vdls")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, default_value_t = 7)]
    width: usize,
    /// Cut-off time in seconds.
    #[arg(long, default_value_t = 600.0)]
    time: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "neighbours")]
    branch_pool: PoolArg,
    #[arg(long, value_enum, default_value = "top")]
    branch_pick: PickArg,
    #[arg(long, value_enum, default_value = "greedy")]
    init: InitArg,
    /// Write the run report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Uniform,
    Grouped,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    density: f64,
    #[arg(long)]
    budget: i64,
    #[arg(long, default_value_t = 25)]
    groups: usize,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value = "1:100")]
    cost_range: String,
    #[arg(long, default_value = "1:100")]
    weight_range: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.json` selects the JSON encoding.
    #[arg(long)]
    out: PathBuf,
}

fn load(path: &PathBuf) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("reading {}", path.display()))
}

fn print_solution(sol: &Solution) {
    println!("W {}", sol.weight());
    println!("C {}", sol.cost());
    let items: Vec<String> = sol.items().iter().map(|i| (i + 1).to_string()).collect();
    println!("items {}", items.join(" "));
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = load(&args.instance)?;
    match args.algo {
        AlgoArg::Greedy => print_solution(&greedy_construct(&inst)),
        AlgoArg::Vdls => {
            if !(args.time > 0.0 && args.time.is_finite()) {
                bail!("--time must be positive");
            }
            let cfg = SearchConfig {
                max_depth: args.depth,
                max_width: args.width,
                cutoff: Duration::from_secs_f64(args.time),
                seed: args.seed,
                branch_pool: match args.branch_pool {
                    PoolArg::Neighbours => BranchPool::Neighbours,
                    PoolArg::All => BranchPool::AllItems,
                },
                branch_pick: match args.branch_pick {
                    PickArg::Top => BranchPick::TopGain,
                    PickArg::Random => BranchPick::RandomK,
                },
                init: match args.init {
                    InitArg::Greedy => InitStrategy::Greedy,
                    InitArg::Empty => InitStrategy::Empty,
                    InitArg::Random => InitStrategy::Random,
                },
            };
            cfg.validate().map_err(anyhow::Error::msg)?;
            let graph = NeighbourGraph::build(&inst);
            let (sol, report) = run_vdls(&inst, &graph, &cfg);
            print_solution(&sol);
            if let Some(path) = args.report {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn generate_cmd(args: GenerateArgs) -> Result<()> {
    let params = GenParams {
        family: match args.family {
            FamilyArg::Uniform => Family::Uniform,
            FamilyArg::Grouped => Family::Grouped,
        },
        n: args.n,
        m: args.m,
        budget: args.budget,
        density: args.density,
        groups: args.groups,
        repeats: args.repeats,
        cost_range: args.cost_range.parse::<IntRange>()?,
        weight_range: args.weight_range.parse::<IntRange>()?,
        seed: args.seed,
    };
    let inst = generate(&params)?;
    inst.save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("{}: {} edges -> {}", params.name(), inst.edge_count(), args.out.display());
    Ok(())
}

fn bench(spec_path: PathBuf, out: Option<PathBuf>, jobs: Option<usize>) -> Result<()> {
    let text = std::fs::read_to_string(&spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))?;
    let mut spec = BenchSpec::from_json(&text)?;
    if let Some(j) = jobs {
        spec.jobs = j;
    }
    let out = out
        .or_else(|| spec.output.clone())
        .unwrap_or_else(|| PathBuf::from("results.csv"));
    let results = run_bench_in(&spec, spec_path.parent())?;
    for err in &results.errors {
        eprintln!("error: {err}");
    }
    let summary_path = write_results(&out, &results)?;
    eprintln!(
        "{} runs -> {}, summary -> {}",
        results.rows.len(),
        out.display(),
        summary_path.display()
    );
    for c in summarize_configs(&results.summary) {
        println!(
            "{} d={} k={} mean_best={:.1} mean_average={:.1} over {} instance(s)",
            c.algo, c.d, c.k, c.mean_best, c.mean_average, c.instances
        );
    }
    let configs = spec.all_configs();
    if configs.len() > 1 {
        for cmp in compare_variants(&results.summary, &configs[0]) {
            println!(
                "{}: {:.1} vs baseline {:.1}{}",
                cmp.variant,
                cmp.variant_mean_best,
                cmp.baseline_mean_best,
                if cmp.inverted { "  [INVERSION]" } else { "" }
            );
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Stats { instance } => {
            let inst = load(&instance)?;
            println!("{}", serde_json::to_string(&instance_stats(&inst)?)?);
        }
        Command::Solve(args) => solve(args)?,
        Command::Generate(args) => generate_cmd(args)?,
        Command::Oracle { instance, limit } => {
            let inst = load(&instance)?;
            let r = exact_opt(&inst, limit);
            println!("W {}", r.weight);
            println!("exact {}", r.exact);
            let items: Vec<String> = r.items.iter().map(|i| (i + 1).to_string()).collect();
            println!("items {}", items.join(" "));
        }
        Command::Bench { spec, out, jobs } => bench(spec, out, jobs)?,
    }
    Ok(())
}
