//! `stabnull`: stabilizer nullity of circuits and states, lower bounds on
//! T-count, and a self-check battery.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input, 3 resource cap.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use stabnull_core::circuit::{apply_to_state, build_unitary_capped};
use stabnull_core::nullity::{compute_s_state, stab_group, t_count_lower_bound_with, NullityReport};
use stabnull_core::stabilizer::{
    aux_nullity, enumerate_stabilizer_states, maximally_entangled, random_stabilizer_state,
    state_nullities, MAX_STABILIZER_ENUM_QUBITS,
};
use stabnull_core::theorems::{check_names, run_all_with, run_check_with, CheckResult, RunOptions, Scale};
use stabnull_core::{Backend, Circuit, Complex64, Error, ExactScalar, LabelSubgroup, Matrix, Scalar, StateVector};

#[derive(Parser, Debug)]
#[command(name = "stabnull", version, about = "Unitary and state stabilizer nullity")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// exact: ℤ[ω, 1/√2] arithmetic; float: f64 with tolerance 1e-8; auto:
    /// exact when every gate is representable
    #[arg(long, global = true, value_enum, default_value_t = BackendChoice::Auto, env = "STABNULL_BACKEND")]
    backend: BackendChoice,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table, env = "STABNULL_FORMAT")]
    format: Format,

    #[arg(long, global = true, default_value_t = 0, env = "STABNULL_SEED")]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Smoke, env = "STABNULL_SCALE")]
    scale: ScaleArg,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "STABNULL_THREADS")]
    threads: Option<usize>,

    /// Largest circuit width for which a dense unitary is built
    #[arg(long, global = true, default_value_t = stabnull_core::circuit::DEFAULT_MAX_UNITARY_QUBITS, env = "STABNULL_MAX_QUBITS")]
    max_qubits: usize,

    /// Report elapsed times as zero, for reproducible output
    #[arg(long, global = true, env = "STABNULL_NO_TIMING")]
    no_timing: bool,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Circuit file
    #[arg(long, conflicts_with = "circuit", required_unless_present = "circuit")]
    file: Option<PathBuf>,

    /// Inline circuit; `;` separates lines
    #[arg(long)]
    circuit: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nullity of a circuit's unitary and the implied T-count bound
    Gate(Input),
    /// Nullity of a circuit applied to an initial state
    State {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Init::Zero)]
        init: Init,
    },
    /// Unitary nullity against the best stabilizer-input state nullity
    Compare(Input),
    /// Run the self-check battery
    Verify {
        /// Run a single named check
        #[arg(long)]
        check: Option<String>,
        /// List check names and exit
        #[arg(long)]
        list: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Enumerate n-qubit stabilizer states
    Stabilizers {
        #[arg(long)]
        qubits: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendChoice {
    Exact,
    Float,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Smoke,
    Standard,
    Deep,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Scale {
        match s {
            ScaleArg::Smoke => Scale::Smoke,
            ScaleArg::Standard => Scale::Standard,
            ScaleArg::Deep => Scale::Deep,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Init {
    Zero,
    Plus,
}

enum Failure {
    Checks,
    Input(String),
    Resource(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks | Failure::Runtime(_) => 1,
            Failure::Input(_) => 2,
            Failure::Resource(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Resource(e.to_string()),
            Error::Parse(_)
            | Error::InvalidGate(_)
            | Error::InvalidLabel(_)
            | Error::BackendUnsupported { .. }
            | Error::NonUnitPhase(_)
            | Error::NotUnitary => Failure::Input(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Gate(input) => cmd_gate(&cli.opts, input),
        Command::State { input, init } => cmd_state(&cli.opts, input, *init),
        Command::Compare(input) => cmd_compare(&cli.opts, input),
        Command::Verify { check, list, inject_fault } => cmd_verify(&cli.opts, check.as_deref(), *list, *inject_fault),
        Command::Stabilizers { qubits } => cmd_stabilizers(&cli.opts, *qubits),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Checks => {}
                Failure::Input(m) | Failure::Resource(m) | Failure::Runtime(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn load(input: &Input) -> Result<(Circuit, String), Failure> {
    let (text, source) = match (&input.file, &input.circuit) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            (text, path.display().to_string())
        }
        (None, Some(inline)) => (inline.replace(';', "\n"), "inline".to_string()),
        (None, None) => return Err(Failure::Input("no circuit given (use --file or --circuit)".into())),
    };
    let circuit: Circuit = text.parse().map_err(|e| Failure::Input(format!("{source}: {e}")))?;
    let name = circuit.name().map(str::to_string).unwrap_or(source);
    Ok((circuit, name))
}

fn resolve(choice: BackendChoice, c: &Circuit) -> Backend {
    match choice {
        BackendChoice::Exact => Backend::Exact,
        BackendChoice::Float => Backend::Float,
        BackendChoice::Auto if c.exact_representable() => Backend::Exact,
        BackendChoice::Auto => Backend::Float,
    }
}

fn timing(opts: &GlobalOpts, ms: f64) -> f64 {
    if opts.no_timing {
        0.0
    } else {
        ms
    }
}

fn emit_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_gate(opts: &GlobalOpts, input: &Input) -> CliResult {
    let (c, name) = load(input)?;
    let backend = resolve(opts.backend, &c);
    let mut bound = t_count_lower_bound_with(&c, backend, opts.max_qubits)?;
    bound.report.elapsed_ms = timing(opts, bound.report.elapsed_ms);
    let r = &bound.report;
    if opts.format == Format::Json {
        emit_json(r);
        return Ok(());
    }
    let mut out = String::new();
    writeln!(out, "circuit          {name}").unwrap();
    writeln!(out, "qubits           {}", r.n).unwrap();
    writeln!(out, "backend          {}", r.backend).unwrap();
    writeln!(out, "s(U)             {}", r.s).unwrap();
    writeln!(out, "nullity v(U)     {}", r.nullity).unwrap();
    writeln!(out, "Clifford: {}", yes_no(r.nullity == 0)).unwrap();
    writeln!(out, "T gates in circuit: {} (Clifford+T: {})", bound.t_gates_used, yes_no(bound.clifford_t)).unwrap();
    writeln!(out, "t_count_lower_bound ≥ v(U) = {}", bound.bound).unwrap();
    if r.entries.len() <= 64 {
        writeln!(out, "±1 entries (U σ_v U† = ±σ_u):").unwrap();
        for e in &r.entries {
            let v = e.v.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "  v={v:<8} u={:<8} sign={:+}", e.u, e.sign).unwrap();
        }
    }
    writeln!(out, "elapsed          {:.3} ms", r.elapsed_ms).unwrap();
    print!("{out}");
    Ok(())
}

#[derive(Serialize)]
struct StateOutput {
    report: NullityReport,
    stab_generators: Vec<String>,
    stab_group: Vec<String>,
}

fn state_output<S: Scalar>(c: &Circuit, init: Init) -> Result<StateOutput, Failure> {
    let n = c.width();
    let psi0 = match init {
        Init::Zero => StateVector::<S>::zero_state(n),
        Init::Plus => StateVector::<S>::plus_state(n),
    };
    let psi = apply_to_state(c, &psi0)?;
    let report = compute_s_state(&psi)?;
    let group = stab_group(&psi)?;
    let mut span = LabelSubgroup::trivial(n);
    let mut generators = Vec::new();
    for g in &group {
        if span.insert(&g.label)? {
            generators.push(g.to_string());
        }
    }
    Ok(StateOutput { report, stab_generators: generators, stab_group: group.iter().map(|g| g.to_string()).collect() })
}

fn cmd_state(opts: &GlobalOpts, input: &Input, init: Init) -> CliResult {
    let (c, name) = load(input)?;
    if c.width() > opts.max_qubits {
        return Err(Error::CapExceeded { what: "state", n: c.width(), cap: opts.max_qubits }.into());
    }
    let mut out = match resolve(opts.backend, &c) {
        Backend::Exact => state_output::<ExactScalar>(&c, init)?,
        _ => state_output::<Complex64>(&c, init)?,
    };
    out.report.elapsed_ms = timing(opts, out.report.elapsed_ms);
    if opts.format == Format::Json {
        emit_json(&out);
        return Ok(());
    }
    let r = &out.report;
    let init_name = match init {
        Init::Zero => "|0…0⟩",
        Init::Plus => "|+…+⟩",
    };
    println!("circuit          {name}");
    println!("initial state    {init_name}");
    println!("qubits           {}", r.n);
    println!("backend          {}", r.backend);
    println!("s(ψ)             {}", r.s);
    println!("nullity v_s(ψ)   {}", r.nullity);
    println!("Stab generators  {{{}}}", out.stab_generators.join(", "));
    if out.stab_group.len() <= 16 {
        println!("Stab             {{{}}}", out.stab_group.join(", "));
    }
    println!("elapsed          {:.3} ms", r.elapsed_ms);
    Ok(())
}

#[derive(Serialize)]
struct CompareOutput {
    n: usize,
    backend: Backend,
    nullity: u32,
    state_max: u32,
    state_argmax: Vec<[f64; 2]>,
    plus_attains_max: bool,
    inputs: usize,
    enumeration: &'static str,
    aux_phi: u32,
    strict_separation: bool,
}

fn compare_output<S: Scalar>(c: &Circuit, opts: &GlobalOpts) -> Result<CompareOutput, Failure> {
    let n = c.width();
    let u: Matrix<S> = build_unitary_capped(c, opts.max_qubits)?;
    let nullity = stabnull_core::nullity::compute_s_unitary(&u)?.nullity;
    let (states, enumeration) = if n <= 3 {
        (enumerate_stabilizer_states::<S>(n)?.states().to_vec(), "full")
    } else if n <= MAX_STABILIZER_ENUM_QUBITS + 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut s = vec![StateVector::<S>::plus_state(n)];
        for _ in 0..stabnull_core::stabilizer::DEFAULT_ANCILLA_SAMPLES {
            s.push(random_stabilizer_state(n, &mut rng)?);
        }
        (s, "sampled")
    } else {
        return Err(Error::CapExceeded { what: "comparison", n, cap: MAX_STABILIZER_ENUM_QUBITS + 2 }.into());
    };
    let values = state_nullities(&u, &states)?;
    let state_max = values.iter().copied().max().unwrap_or(0);
    let argmax = values.iter().position(|&v| v == state_max).unwrap_or(0);
    let plus = StateVector::<S>::plus_state(n);
    let plus_value = state_nullities(&u, std::slice::from_ref(&plus))?[0];
    let aux_phi = aux_nullity(&u, &maximally_entangled(n)?)?;
    Ok(CompareOutput {
        n,
        backend: S::BACKEND,
        nullity,
        state_max,
        state_argmax: states[argmax].amplitudes().iter().map(|a| a.to_c64()).map(|z| [z.re, z.im]).collect(),
        plus_attains_max: plus_value == state_max,
        inputs: states.len(),
        enumeration,
        aux_phi,
        strict_separation: nullity > state_max,
    })
}

fn fmt_amp(z: [f64; 2]) -> String {
    let r = |x: f64| if x.abs() < 5e-4 { 0.0 } else { x };
    let (re, im) = (r(z[0]), r(z[1]));
    match (re == 0.0, im == 0.0) {
        (true, true) => "0".into(),
        (false, true) => format!("{re:.3}"),
        (true, false) => format!("{im:.3}i"),
        (false, false) => format!("{re:.3}{im:+.3}i"),
    }
}

fn cmd_compare(opts: &GlobalOpts, input: &Input) -> CliResult {
    let (c, name) = load(input)?;
    let out = match resolve(opts.backend, &c) {
        Backend::Exact => compare_output::<ExactScalar>(&c, opts)?,
        _ => compare_output::<Complex64>(&c, opts)?,
    };
    if opts.format == Format::Json {
        emit_json(&out);
        return Ok(());
    }
    println!("circuit              {name}");
    println!("qubits               {}", out.n);
    println!("backend              {}", out.backend);
    println!("v(U)                 {}", out.nullity);
    println!("stabilizer inputs    {} ({})", out.inputs, out.enumeration);
    println!("max v_s(U|ψ⟩)        {}", out.state_max);
    println!(
        "  attained at        [{}]",
        out.state_argmax.iter().map(|&z| fmt_amp(z)).collect::<Vec<_>>().join(", ")
    );
    println!("  |+…+⟩ attains max  {}", yes_no(out.plus_attains_max));
    println!("v_s((I⊗U)|Φ⟩)        {}", out.aux_phi);
    println!("strict separation: {}", yes_no(out.strict_separation));
    Ok(())
}

fn cmd_verify(opts: &GlobalOpts, check: Option<&str>, list: bool, inject_fault: bool) -> CliResult {
    if list {
        for name in check_names() {
            println!("{name}");
        }
        return Ok(());
    }
    let run = RunOptions { seed: opts.seed, scale: opts.scale.into(), inject_fault };
    let mut results: Vec<CheckResult> = match check {
        Some(name) => vec![run_check_with(name, run)
            .ok_or_else(|| Failure::Input(format!("unknown check `{name}` (see --list)")))?],
        None => run_all_with(run),
    };
    for r in &mut results {
        r.elapsed_ms = timing(opts, r.elapsed_ms);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if opts.format == Format::Json {
        emit_json(&results);
    } else {
        println!("seed {}  scale {}", opts.seed, Scale::from(opts.scale));
        for r in &results {
            println!("{:<36} {:<4} {:>10.1} ms", r.name, if r.passed { "pass" } else { "FAIL" }, r.elapsed_ms);
        }
        for r in results.iter().filter(|r| !r.passed) {
            println!("\n{} failed (replay: verify --check {} --seed {} --scale {})", r.name, r.name, r.seed, r.scale);
            println!("{}", serde_json::to_string_pretty(&r.witness).expect("witness serializes"));
        }
        println!("{} passed, {} failed", results.len() - failed, failed);
    }
    if failed > 0 {
        Err(Failure::Checks)
    } else {
        Ok(())
    }
}

fn cmd_stabilizers(opts: &GlobalOpts, qubits: usize) -> CliResult {
    let set = enumerate_stabilizer_states::<Complex64>(qubits)?;
    if opts.format == Format::Json {
        println!("{}", set.to_json());
        return Ok(());
    }
    println!("qubits     {qubits}");
    println!("states     {}", set.len());
    println!("BFS depth  {}", set.max_depth());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn inline_circuits_split_on_semicolons() {
        let input = Input { file: None, circuit: Some("qubits 2;h 0;cnot 0 1".into()) };
        let (c, name) = load(&input).ok().unwrap();
        assert_eq!((c.width(), c.gates().len(), name.as_str()), (2, 2, "inline"));
    }

    #[test]
    fn auto_backend_falls_back_to_float_for_custom_gates() {
        let t: Circuit = "qubits 1\nt 0\n".parse().unwrap();
        assert_eq!(resolve(BackendChoice::Auto, &t), Backend::Exact);
        let e = Circuit::from_gates(1, [stabnull_core::circuit::exp_ix(0)]).unwrap();
        assert_eq!(resolve(BackendChoice::Auto, &e), Backend::Float);
        assert_eq!(resolve(BackendChoice::Float, &t), Backend::Float);
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let parse = "qubits 1\nfoo 0\n".parse::<Circuit>().unwrap_err();
        assert_eq!(Failure::from(Error::Parse(parse)).code(), 2);
        assert_eq!(Failure::Checks.code(), 1);
        let cap = stabnull_core::build_unitary::<Complex64>(&"qubits 9\n".parse().unwrap()).unwrap_err();
        assert_eq!(Failure::from(cap).code(), 3);
    }
}
