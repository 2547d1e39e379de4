//! Command-line front end for the parking-slot allocation engine.
//!
//! Data goes to stdout or `--out` files; diagnostics go to stderr. Exit
//! codes: 0 success, 1 invalid data, 2 search budget exceeded, 3 usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parkgame::experiments::{self, bench_csv, compare_csv, doubling_schedule};
use parkgame::json::{
    allocation_from_str, allocation_to_string, bench_summary_value, compare_summary_value,
    equilibria_to_value, scenario_from_str, scenario_to_string, staged_to_value,
    to_canonical_string,
};
use parkgame::{
    enumerate_nash, find_allocation_deviation, find_improving_deviation, generate,
    greedy_allocate, nash_allocate, run_stages, Allocation, AllocationConfig, CarId,
    DeviationWitness, GenSpec, GreedyOrder, Objective, ProjectedScenario, SlotId, StagePlan,
    StagePlanError, ValidateOptions, DEFAULT_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "parkgame",
    version,
    about = "Parking-slot allocation: generate instances, allocate, verify, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance from a seed
    Gen(GenArgs),
    /// Assign slots with the priority allocator or the greedy baseline
    Allocate(AllocateArgs),
    /// Allocate cars arriving in batches over one shared slot inventory
    Stages(StagesArgs),
    /// Verify stability of an allocation or enumerate all stable profiles
    Oracle(OracleArgs),
    /// Compare parked counts of both allocators over generated instances
    Compare(CompareArgs),
    /// Time the priority allocator over a doubling schedule of car counts
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of cars
    #[arg(long)]
    cars: usize,
    /// Number of slots
    #[arg(long)]
    slots: usize,
    /// Number of gates; cars rotate over them round-robin
    #[arg(long, default_value_t = 1)]
    gates: usize,
    /// Generation seed
    #[arg(long)]
    seed: u64,
    /// Smallest reaching time in minutes
    #[arg(long, default_value_t = 1)]
    reach_min: u64,
    /// Largest reaching time in minutes
    #[arg(long, default_value_t = 10)]
    reach_max: u64,
    /// Smallest time limit in minutes
    #[arg(long, default_value_t = 1)]
    time_min: u64,
    /// Largest time limit in minutes
    #[arg(long, default_value_t = 12)]
    time_max: u64,
    /// Write the instance here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    /// Priority allocator: ascending resilience, best residual cost
    Nash,
    /// Greedy baseline: nearest remaining reachable slot
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    /// Input order (greedy only)
    Arrival,
    /// Ascending resilience (greedy only)
    Resilience,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Prefer the smallest finite residual cost
    Min,
    /// Prefer the largest finite residual cost
    Max,
}

#[derive(Args)]
struct AllocateArgs {
    /// Instance file
    #[arg(long)]
    input: PathBuf,
    /// Which allocator to run
    #[arg(long, value_enum, default_value_t = Algorithm::Nash)]
    algorithm: Algorithm,
    /// Processing order of the greedy baseline
    #[arg(long, value_enum, default_value_t = OrderArg::Arrival)]
    order: OrderArg,
    /// Residual-cost objective of the priority allocator
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Min)]
    objective: ObjectiveArg,
    /// Accept duplicate resilience values; ties break by car input order
    #[arg(long)]
    resolve_resilience_ties: bool,
    /// Write the allocation here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("plan").required(true).args(["batch_size", "batches"])))]
struct StagesArgs {
    /// Instance file
    #[arg(long)]
    input: PathBuf,
    /// Split cars into consecutive batches of this size
    #[arg(long)]
    batch_size: Option<usize>,
    /// JSON file with explicit batches: an array of arrays of car ids
    #[arg(long)]
    batches: Option<PathBuf>,
    /// Residual-cost objective of the per-batch allocation
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Min)]
    objective: ObjectiveArg,
    /// Accept duplicate resilience values; ties break by car input order
    #[arg(long)]
    resolve_resilience_ties: bool,
    /// Write the staged allocation here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["check", "enumerate"])))]
struct OracleArgs {
    /// Instance file
    #[arg(long)]
    input: PathBuf,
    /// Allocation file to test for improving unilateral deviations
    #[arg(long)]
    check: Option<PathBuf>,
    /// Enumerate every deviation-stable total profile
    #[arg(long)]
    enumerate: bool,
    /// Stop enumeration after this many stable profiles
    #[arg(long)]
    limit: Option<usize>,
    /// Refuse exhaustive searches larger than this many candidates
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Accept duplicate resilience values; ties break by car input order
    #[arg(long)]
    resolve_resilience_ties: bool,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Number of generated instances
    #[arg(long)]
    runs: usize,
    /// Cars per instance
    #[arg(long)]
    cars: usize,
    /// Slots per instance
    #[arg(long)]
    slots: usize,
    /// Base seed; run r uses seed + r
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-run CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an aggregate JSON summary here
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Slots per instance
    #[arg(long)]
    slots: usize,
    /// First car count of the schedule
    #[arg(long)]
    cars_start: usize,
    /// How many times to double the car count
    #[arg(long, default_value_t = 0)]
    doublings: u32,
    /// Base seed; point i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions per point; the fastest is reported
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    /// Write the per-point CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON summary with the fitted slope here
    #[arg(long)]
    summary: Option<PathBuf>,
}

enum Failure {
    /// Unreadable, unparsable, or invalid input data.
    Data(String),
    /// An exhaustive search refused to start within its budget.
    Budget(String),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(Failure::Data(message)) => {
            eprintln!("error: {message}");
            exit(1);
        }
        Err(Failure::Budget(message)) => {
            eprintln!("error: {message}");
            exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Allocate(args) => run_allocate(args),
        Command::Stages(args) => run_stages_cmd(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Compare(args) => run_compare(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|err| Failure::Data(format!("cannot read {}: {err}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|err| Failure::Data(format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_projected(path: &Path, allow_ties: bool) -> Result<ProjectedScenario, Failure> {
    let scenario = scenario_from_str(&read_file(path)?)
        .map_err(|err| Failure::Data(format!("{}: {err}", path.display())))?;
    let options = ValidateOptions {
        allow_resilience_ties: allow_ties,
    };
    ProjectedScenario::project_with(&scenario, options)
        .map_err(|err| Failure::Data(format!("{}: {err}", path.display())))
}

fn config_from(objective: ObjectiveArg, order: OrderArg) -> AllocationConfig {
    AllocationConfig {
        objective: match objective {
            ObjectiveArg::Min => Objective::MinResidual,
            ObjectiveArg::Max => Objective::MaxResidual,
        },
        greedy_order: match order {
            OrderArg::Arrival => GreedyOrder::Arrival,
            OrderArg::Resilience => GreedyOrder::Resilience,
        },
    }
}

fn run_gen(args: GenArgs) -> Result<(), Failure> {
    let spec = GenSpec {
        cars: args.cars,
        slots: args.slots,
        gates: args.gates,
        reach_range: (args.reach_min, args.reach_max),
        time_range: (args.time_min, args.time_max),
        seed: args.seed,
    };
    let scenario = generate(&spec).map_err(|err| Failure::Data(err.to_string()))?;
    emit(args.out.as_deref(), &scenario_to_string(&scenario))
}

fn run_allocate(args: AllocateArgs) -> Result<(), Failure> {
    let projected = load_projected(&args.input, args.resolve_resilience_ties)?;
    let config = config_from(args.objective, args.order);
    let allocation = match args.algorithm {
        Algorithm::Nash => nash_allocate(&projected, &config),
        Algorithm::Greedy => greedy_allocate(&projected, &config),
    };
    emit(args.out.as_deref(), &allocation_to_string(&projected, &allocation))
}

fn run_stages_cmd(args: StagesArgs) -> Result<(), Failure> {
    let projected = load_projected(&args.input, args.resolve_resilience_ties)?;
    let plan = match (&args.batch_size, &args.batches) {
        (Some(size), None) => StagePlan::by_batch_size(projected.car_count(), *size)
            .map_err(|err| Failure::Data(err.to_string()))?,
        (None, Some(path)) => {
            let labels: Vec<Vec<String>> = serde_json::from_str(&read_file(path)?)
                .map_err(|err| Failure::Data(format!("{}: Json: {err}", path.display())))?;
            let car_by_label: std::collections::HashMap<&str, CarId> = projected
                .cars()
                .iter()
                .map(|car| (car.label.as_str(), car.id))
                .collect();
            let batches = labels
                .iter()
                .map(|batch| {
                    batch
                        .iter()
                        .map(|label| {
                            car_by_label.get(label.as_str()).copied().ok_or_else(|| {
                                Failure::Data(format!("unknown car {label} in the batch plan"))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            StagePlan::from_batches(batches, projected.car_count())
                .map_err(|err| Failure::Data(describe_plan_error(&projected, err)))?
        }
        _ => unreachable!("clap enforces exactly one batch plan"),
    };
    let staged = run_stages(&projected, &plan, &config_from(args.objective, OrderArg::Arrival));
    emit(
        args.out.as_deref(),
        &to_canonical_string(&staged_to_value(&projected, &staged)),
    )
}

/// Restates a batch-plan error in the instance's car labels.
fn describe_plan_error(projected: &ProjectedScenario, err: StagePlanError) -> String {
    match err {
        StagePlanError::DuplicateCar { car } => format!(
            "car {} appears in more than one batch",
            projected.car(car).label
        ),
        StagePlanError::MissingCar { car } => {
            format!("car {} is missing from the plan", projected.car(car).label)
        }
        other => other.to_string(),
    }
}

fn describe_witness(
    projected: &ProjectedScenario,
    allocation: &Allocation,
    witness: &DeviationWitness,
) -> String {
    let car = &projected.car(witness.car).label;
    let target = projected.slot_name(witness.better_slot);
    match allocation.slot_of(witness.car) {
        Some(slot) => format!(
            "car {car} can improve by moving from {} to {target}: {} -> {}",
            projected.slot_name(slot),
            witness.current_cost,
            witness.deviated_cost
        ),
        None => format!(
            "car {car} can improve by taking {target}: {} -> {}",
            witness.current_cost, witness.deviated_cost
        ),
    }
}

fn run_oracle(args: OracleArgs) -> Result<(), Failure> {
    let projected = load_projected(&args.input, args.resolve_resilience_ties)?;
    if let Some(check) = &args.check {
        let allocation = allocation_from_str(&read_file(check)?, &projected)
            .map_err(|err| Failure::Data(format!("{}: {err}", check.display())))?;
        // fully parked allocations are checked as total profiles; otherwise the
        // scan also offers every slot to the unparked cars
        let witness = if allocation.is_fully_parked() && allocation.car_count() > 0 {
            find_improving_deviation(&projected, &allocation.to_profile(SlotId::new(1)))
        } else {
            find_allocation_deviation(&projected, &allocation)
        };
        let text = match witness {
            None => "equilibrium: true\n".to_string(),
            Some(witness) => format!(
                "equilibrium: false\n{}\n",
                describe_witness(&projected, &allocation, &witness)
            ),
        };
        return emit(args.out.as_deref(), &text);
    }
    let limit = args.limit.unwrap_or(usize::MAX);
    let equilibria = enumerate_nash(&projected, limit, args.budget)
        .map_err(|err| Failure::Budget(err.to_string()))?;
    emit(
        args.out.as_deref(),
        &to_canonical_string(&equilibria_to_value(&projected, &equilibria)),
    )
}

fn run_compare(args: CompareArgs) -> Result<(), Failure> {
    let template = GenSpec::new(args.cars, args.slots, 1, 0);
    let report = experiments::compare(args.runs, &template, args.seed)
        .map_err(|err| Failure::Data(err.to_string()))?;
    emit(args.out.as_deref(), &compare_csv(&report))?;
    if let Some(summary) = &args.summary {
        emit(Some(summary), &to_canonical_string(&compare_summary_value(&report)))?;
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Failure> {
    if args.doublings >= usize::BITS
        || (args.cars_start as u128) << args.doublings > usize::MAX as u128
    {
        return Err(Failure::Data(format!(
            "doubling {} cars {} times overflows the schedule",
            args.cars_start, args.doublings
        )));
    }
    let schedule = doubling_schedule(args.cars_start, args.doublings);
    let report = experiments::bench(args.slots, &schedule, args.seed, args.reps as usize)
        .map_err(|err| Failure::Data(err.to_string()))?;
    emit(args.out.as_deref(), &bench_csv(&report))?;
    if let Some(summary) = &args.summary {
        emit(Some(summary), &to_canonical_string(&bench_summary_value(&report)))?;
    }
    Ok(())
}
