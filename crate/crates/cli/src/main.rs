//! `bnctl`: attractors, basins and minimal control sets of Boolean networks.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bnctl_core::bench::{bench_network, CSV_HEADER};
use bnctl_core::control::{solve_with, target_control, GlobalAnalysis};
use bnctl_core::report::{AttractorEntry, AttractorsReport, ControlReport};
use bnctl_core::transition::DEFAULT_STATE_CAP_BITS;
use bnctl_core::verify::{check_network, generate_random_bn, random_network_text, RandomBnSpec};
use bnctl_core::{
    BooleanNetwork, ControlSolution, Error, Method, SolveOptions, State, StateSet, UpdateMode,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

const EXIT_USAGE: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_UNCONTROLLABLE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bnctl",
    version,
    about = "Attractors, basins and minimal control of Boolean networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List attractors, optionally with their basins.
    Attractors {
        file: PathBuf,
        #[arg(long)]
        basins: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Update::Async)]
        update: Update,
    },
    /// Minimal control: to one attractor, between chosen attractors, or between all of them.
    Control {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Source state (target mode).
        #[arg(long)]
        from: Option<String>,
        /// A state of the target attractor (target mode).
        #[arg(long)]
        to: Option<String>,
        /// Comma-separated states, one per attractor (all-pairs mode).
        #[arg(long, conflicts_with = "all")]
        attractors: Option<String>,
        /// Use every attractor (all-pairs mode).
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Global)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Update::Async)]
        update: Update,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a seeded random network.
    Random {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        in_degree: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        bias: f64,
        /// Output file; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the analysis against brute-force oracles.
    Verify {
        /// Network to check; random networks are used with --seeds instead.
        file: Option<PathBuf>,
        /// Seeds as `A..B` (end exclusive), `A..=B` or a single number.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        in_degree: usize,
    },
    /// Time the global and decomposed methods and write CSV rows.
    Bench {
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        in_degree: usize,
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Benchmark this network instead of random ones.
        #[arg(long)]
        network: Option<PathBuf>,
        /// Output CSV file; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Target,
    AllPairs,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Global,
    Decomposed,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Update {
    Async,
    Sync,
}

impl From<Update> for UpdateMode {
    fn from(u: Update) -> UpdateMode {
        match u {
            Update::Async => UpdateMode::Async,
            Update::Sync => UpdateMode::Sync,
        }
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::StateCapExceeded { .. }
            | Error::TooManyVariables { .. }
            | Error::SupportTooLarge { .. } => EXIT_CAP,
            Error::Uncontrollable(..) => EXIT_UNCONTROLLABLE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bnctl: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult {
    let cap_bits = state_cap_bits()?;
    match command {
        Command::Attractors {
            file,
            basins,
            format,
            update,
        } => cmd_attractors(&load(&file)?, basins, format, options(update, cap_bits)),
        Command::Control {
            file,
            mode,
            from,
            to,
            attractors,
            all,
            method,
            update,
            format,
        } => {
            let bn = load(&file)?;
            let opts = options(update, cap_bits);
            match mode {
                Mode::Target => {
                    let (Some(from), Some(to)) = (from, to) else {
                        return Err(Failure::usage("--mode target needs --from and --to"));
                    };
                    cmd_target(&bn, &from, &to, format, opts)
                }
                Mode::AllPairs => {
                    if attractors.is_none() && !all {
                        return Err(Failure::usage(
                            "--mode all-pairs needs --attractors or --all",
                        ));
                    }
                    cmd_all_pairs(&bn, attractors.as_deref(), method, format, opts)
                }
                Mode::Full => {
                    if attractors.is_some() {
                        return Err(Failure::usage(
                            "--mode full uses every attractor; drop --attractors",
                        ));
                    }
                    cmd_all_pairs(&bn, None, method, format, opts)
                }
            }
        }
        Command::Random {
            vars,
            in_degree,
            seed,
            bias,
            output,
        } => {
            let spec = RandomBnSpec {
                n: vars,
                k: in_degree,
                seed,
                bias,
            };
            let text = random_network_text(&spec).map_err(|e| Failure::usage(e.to_string()))?;
            emit(output.as_deref(), &text)
        }
        Command::Verify {
            file,
            seeds,
            vars,
            in_degree,
        } => cmd_verify(
            file.as_deref(),
            seeds.as_deref(),
            vars,
            in_degree,
            options(Update::Async, cap_bits),
        ),
        Command::Bench {
            vars,
            in_degree,
            count,
            seed,
            network,
            output,
        } => cmd_bench(
            vars,
            in_degree,
            count,
            seed,
            network.as_deref(),
            output.as_deref(),
            cap_bits,
        ),
    }
}

/// Cap from `BNCTL_STATE_CAP`: a state count (rounded down to a power of
/// two) or `2^K`.
fn state_cap_bits() -> CliResult<usize> {
    let Ok(raw) = std::env::var("BNCTL_STATE_CAP") else {
        return Ok(DEFAULT_STATE_CAP_BITS);
    };
    let raw = raw.trim();
    let parsed = match raw.strip_prefix("2^") {
        Some(exp) => exp.parse::<usize>().ok(),
        None => raw
            .parse::<u64>()
            .ok()
            .filter(|&v| v > 0)
            .map(|v| v.ilog2() as usize),
    };
    match parsed {
        Some(bits) if bits <= bnctl_core::state::MAX_WIDTH => Ok(bits),
        _ => Err(Failure::usage(format!(
            "BNCTL_STATE_CAP must be a state count or 2^K with K <= {}, got {raw:?}",
            bnctl_core::state::MAX_WIDTH
        ))),
    }
}

fn options(update: Update, cap_bits: usize) -> SolveOptions {
    SolveOptions {
        mode: update.into(),
        cap_bits,
        ..SolveOptions::default()
    }
}

fn load(path: &Path) -> CliResult<BooleanNetwork> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    BooleanNetwork::parse(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
        }
    }
}

fn parse_state(text: &str, width: usize) -> CliResult<State> {
    let s = State::parse_bits(text)?;
    if text.len() != width {
        return Err(Error::StateWidth {
            state: text.to_string(),
            got: text.len(),
            expected: width,
        }
        .into());
    }
    Ok(s)
}

fn join_states(set: &StateSet) -> String {
    set.to_bit_strings().join(",")
}

fn cmd_attractors(
    bn: &BooleanNetwork,
    with_basins: bool,
    format: Format,
    opts: SolveOptions,
) -> CliResult {
    let global = GlobalAnalysis::new(bn, &opts)?;
    let entries: Vec<AttractorEntry> = global
        .attractors
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let basin = with_basins.then(|| global.basin(a));
            AttractorEntry {
                id: k + 1,
                states: a.to_bit_strings(),
                basin_size: basin.as_ref().map(StateSet::len),
                basin: basin.as_ref().map(StateSet::to_bit_strings),
            }
        })
        .collect();
    let mut out = String::new();
    match format {
        Format::Json => {
            let report = AttractorsReport {
                variables: bn.names().to_vec(),
                attractors: entries,
            };
            out = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
        }
        Format::Text => {
            for e in &entries {
                let _ = write!(out, "A{} {}", e.id, e.states.join(","));
                if let (Some(size), Some(basin)) = (e.basin_size, &e.basin) {
                    let _ = write!(out, " basin {size} {}", basin.join(","));
                }
                out.push('\n');
            }
        }
    }
    emit(None, &out)
}

fn cmd_target(
    bn: &BooleanNetwork,
    from: &str,
    to: &str,
    format: Format,
    opts: SolveOptions,
) -> CliResult {
    let n = bn.len();
    let source = parse_state(from, n)?;
    let target_state = parse_state(to, n)?;
    let global = GlobalAnalysis::new(bn, &opts)?;
    let target = global
        .attractor_of(target_state)
        .map(|k| global.attractors[k].clone())
        .ok_or_else(|| Failure::from(Error::UnknownAttractor(to.to_string())))?;
    let solution = target_control(bn, source, &target, &opts)?;
    let witness = solution.witnesses.values().next().copied();
    match format {
        Format::Json => {
            let report = json!({
                "from": from,
                "target": target.to_bit_strings(),
                "minimum_size": solution.minimum_size,
                "solutions": solution.all_minimum_solutions.iter().map(|c| c.to_one_based()).collect::<Vec<_>>(),
                "witness": witness.map(|w| json!({
                    "control": w.control.to_one_based(),
                    "from": w.from.to_bit_string(n),
                    "to": w.to.to_bit_string(n),
                })),
            });
            emit(
                None,
                &(serde_json::to_string_pretty(&report).expect("serializable") + "\n"),
            )
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "target {}", join_states(&target));
            let _ = writeln!(out, "minimum size {}", solution.minimum_size);
            let _ = writeln!(
                out,
                "solutions {}",
                show_sets(&solution.all_minimum_solutions)
            );
            if let Some(w) = witness {
                let _ = writeln!(
                    out,
                    "witness {} {} -> {}",
                    w.control,
                    w.from.to_bit_string(n),
                    w.to.to_bit_string(n)
                );
            }
            emit(None, &out)
        }
    }
}

fn show_sets(sets: &[bnctl_core::ControlSet]) -> String {
    sets.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn select_attractors(
    global: &GlobalAnalysis,
    list: Option<&str>,
    width: usize,
) -> CliResult<Vec<StateSet>> {
    let Some(list) = list else {
        return Ok(global.attractors.clone());
    };
    let mut chosen: Vec<usize> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let s = parse_state(item, width)?;
        let k = global
            .attractor_of(s)
            .ok_or_else(|| Failure::from(Error::UnknownAttractor(item.to_string())))?;
        if chosen.contains(&k) {
            return Err(Failure::usage(format!(
                "{item} names attractor A{} twice",
                k + 1
            )));
        }
        chosen.push(k);
    }
    Ok(chosen
        .into_iter()
        .map(|k| global.attractors[k].clone())
        .collect())
}

fn solve(
    bn: &BooleanNetwork,
    global: &GlobalAnalysis,
    atts: &[StateSet],
    method: Method,
    opts: &SolveOptions,
) -> CliResult<ControlSolution> {
    if atts.len() < 2 {
        return Ok(ControlSolution {
            method,
            attractors: atts.to_vec(),
            control: bnctl_core::IndexSet::EMPTY,
            minimum_size: 0,
            all_minimum_solutions: vec![bnctl_core::IndexSet::EMPTY],
            witnesses: Default::default(),
            unsound_pairs: Vec::new(),
            per_block: Vec::new(),
            lattice_nodes: 1u64 << bn.len(),
        });
    }
    Ok(solve_with(bn, global, atts, method, opts)?)
}

fn solution_text(sol: &ControlSolution, width: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method {}", sol.method.as_str());
    for (k, a) in sol.attractors.iter().enumerate() {
        let _ = writeln!(out, "A{} {}", k + 1, join_states(a));
    }
    let _ = writeln!(out, "minimum size {}", sol.minimum_size);
    let _ = writeln!(out, "solutions {}", show_sets(&sol.all_minimum_solutions));
    let _ = writeln!(out, "control {}", sol.control);
    for b in &sol.per_block {
        let _ = writeln!(
            out,
            "block {} hat {} covers {}",
            b.nodes,
            b.hat,
            show_sets(&b.cover.solutions)
        );
    }
    for (&(i, j), w) in &sol.witnesses {
        let _ = writeln!(
            out,
            "witness A{}->A{} {} {} -> {}",
            i + 1,
            j + 1,
            w.control,
            w.from.to_bit_string(width),
            w.to.to_bit_string(width)
        );
    }
    for &(i, j) in &sol.unsound_pairs {
        let _ = writeln!(out, "unsound A{}->A{}", i + 1, j + 1);
    }
    out
}

fn cmd_all_pairs(
    bn: &BooleanNetwork,
    list: Option<&str>,
    method: MethodArg,
    format: Format,
    opts: SolveOptions,
) -> CliResult {
    let n = bn.len();
    let global = GlobalAnalysis::new(bn, &opts)?;
    let atts = select_attractors(&global, list, n)?;
    let methods: &[Method] = match method {
        MethodArg::Global => &[Method::Global],
        MethodArg::Decomposed => &[Method::Decomposed],
        MethodArg::Both => &[Method::Global, Method::Decomposed],
    };
    let solutions = methods
        .iter()
        .map(|&m| solve(bn, &global, &atts, m, &opts))
        .collect::<CliResult<Vec<_>>>()?;
    for sol in &solutions {
        if !sol.is_sound() {
            eprintln!(
                "warning: {} control {} misses {} attractor pair(s)",
                sol.method.as_str(),
                sol.control,
                sol.unsound_pairs.len()
            );
        }
    }
    let comparison = (solutions.len() == 2).then(|| {
        let (g, d) = (&solutions[0], &solutions[1]);
        if d.minimum_size > g.minimum_size {
            eprintln!(
                "warning: decomposed answer has size {} against the global minimum {}",
                d.minimum_size, g.minimum_size
            );
        }
        (
            g.minimum_size,
            d.minimum_size,
            g.all_minimum_solutions == d.all_minimum_solutions,
        )
    });
    let out = match format {
        Format::Json => {
            let reports: Vec<ControlReport> = solutions
                .iter()
                .map(|s| ControlReport::from_solution(s, n))
                .collect();
            let value = match comparison {
                Some((g, d, same)) => json!({
                    "global": reports[0],
                    "decomposed": reports[1],
                    "comparison": { "global_size": g, "decomposed_size": d, "same_solutions": same },
                }),
                None => serde_json::to_value(&reports[0]).expect("serializable"),
            };
            serde_json::to_string_pretty(&value).expect("serializable") + "\n"
        }
        Format::Text => {
            let mut out = solutions
                .iter()
                .map(|s| solution_text(s, n))
                .collect::<Vec<_>>()
                .join("\n");
            if let Some((g, d, same)) = comparison {
                let _ = writeln!(
                    out,
                    "\ncomparison global {g} decomposed {d} same solutions {}",
                    if same { "yes" } else { "no" }
                );
            }
            out
        }
    };
    emit(None, &out)
}

/// Parses `A..B`, `A..=B` or `A`.
fn parse_seeds(text: &str) -> CliResult<std::ops::Range<u64>> {
    let bad = || Failure::usage(format!("--seeds expects A..B, A..=B or A, got {text:?}"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    if let Some((a, b)) = text.split_once("..=") {
        Ok(num(a)?..num(b)? + 1)
    } else if let Some((a, b)) = text.split_once("..") {
        Ok(num(a)?..num(b)?)
    } else {
        let a = num(text)?;
        Ok(a..a + 1)
    }
}

fn cmd_verify(
    file: Option<&Path>,
    seeds: Option<&str>,
    vars: usize,
    in_degree: usize,
    opts: SolveOptions,
) -> CliResult {
    let mut targets: Vec<(String, BooleanNetwork)> = Vec::new();
    if let Some(path) = file {
        targets.push((path.display().to_string(), load(path)?));
    }
    if let Some(range) = seeds {
        for seed in parse_seeds(range)? {
            let spec = RandomBnSpec::new(vars, in_degree, seed);
            let bn = generate_random_bn(&spec).map_err(|e| Failure::usage(e.to_string()))?;
            targets.push((format!("seed {seed}"), bn));
        }
    }
    if targets.is_empty() {
        return Err(Failure::usage("verify needs a network file or --seeds"));
    }
    let mut mismatched = 0;
    for (name, bn) in &targets {
        let check = check_network(bn, &opts)?;
        let status = if check.mismatches.is_empty() {
            "ok"
        } else {
            "MISMATCH"
        };
        let mut line = format!("{name}: {status}, {} attractors", check.attractors);
        if !check.control_checked && check.attractors >= 2 {
            line.push_str(", control not checked (network too large)");
        }
        if let Some((g, d)) = check.gap {
            let _ = write!(line, ", decomposed size {d} vs global {g}");
        }
        if !check.decomposed_unsound_pairs.is_empty() {
            let _ = write!(
                line,
                ", decomposed control misses {} pair(s)",
                check.decomposed_unsound_pairs.len()
            );
        }
        println!("{line}");
        for m in &check.mismatches {
            println!("  {m}");
        }
        if !check.mismatches.is_empty() {
            mismatched += 1;
        }
    }
    if mismatched > 0 {
        return Err(Failure {
            code: EXIT_MISMATCH,
            message: format!(
                "{mismatched} of {} network(s) disagree with the oracles",
                targets.len()
            ),
        });
    }
    Ok(())
}

fn cmd_bench(
    vars: usize,
    in_degree: usize,
    count: u64,
    seed: u64,
    network: Option<&Path>,
    output: Option<&Path>,
    cap_bits: usize,
) -> CliResult {
    let opts = options(Update::Async, cap_bits);
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    if let Some(path) = network {
        let bn = load(path)?;
        let k = (0..bn.len())
            .map(|i| bn.regulators(i).len())
            .max()
            .unwrap_or(0);
        csv.push_str(&bench_network(&bn, k, 0, &opts)?.to_csv());
        csv.push('\n');
    } else {
        for s in seed..seed + count {
            let spec = RandomBnSpec::new(vars, in_degree, s);
            let bn = generate_random_bn(&spec).map_err(|e| Failure::usage(e.to_string()))?;
            csv.push_str(&bench_network(&bn, in_degree, s, &opts)?.to_csv());
            csv.push('\n');
        }
    }
    emit(output, &csv)
}
