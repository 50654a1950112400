use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

use qforge_core::harness::{load_suite, run_suite};
use qforge_core::logic::{run_logic, BasisState};
use qforge_core::passes::{compile, verify, CompileError, PassConfig};
use qforge_core::qp::emit_qp;
use qforge_core::reduction::{
    generate_kernels, kernel_file_name, kernel_source, manifest, manifest_file_name, parse_bits,
    ReductionConfig,
};
use qforge_core::source::parse_source;
use qforge_core::statevector;
use qforge_core::Circuit;

#[derive(Parser)]
#[command(
    name = "qforge",
    version,
    about = "Quantum circuit compiler, simulator and reducer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Logic,
    Sv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and verify a circuit.
    Check { file: PathBuf },
    /// Lower a circuit and write it as a QP program.
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = PassConfig::DEFAULT_MAX_CONTROLS)]
        max_controls: usize,
    },
    /// Simulate a circuit from a prepared basis state.
    Sim {
        file: PathBuf,
        #[arg(long, value_enum)]
        backend: BackendArg,
        /// `reg=value,...` or a raw basis index.
        #[arg(long, default_value = "0")]
        prep: String,
        /// Amplitudes to print for the state-vector backend.
        #[arg(long, default_value_t = 8)]
        top: usize,
    },
    /// Specialize qubits to constants and write one kernel per value.
    Reduce {
        file: PathBuf,
        /// Comma-separated qubits: `a[3]`, `a3`, a 1-qubit register name or a flat index.
        #[arg(long)]
        qubits: String,
        /// Comma-separated bitstrings, character i giving qubit i of the list.
        #[arg(long)]
        values: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = ReductionConfig::default().semantic_cap)]
        semantic_cap: usize,
    },
    /// Run a `.qtest` suite.
    Test { suite: PathBuf },
}

/// Failures that are the tool's fault rather than the input's.
#[derive(Debug)]
struct Internal(String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Internal {}

fn internal(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(Internal(e.to_string()))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_source(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn verified(path: &Path) -> Result<Circuit> {
    let c = read_circuit(path)?;
    let diags = verify(&c);
    for d in diags.iter() {
        eprintln!("{}: {d}", path.display());
    }
    if diags.has_errors() {
        bail!("{}: verification failed", path.display());
    }
    Ok(c)
}

/// Temp file in the destination directory, renamed into place by the caller.
fn staged(path: &Path, contents: &str) -> Result<NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes()).map_err(internal)?;
    tmp.flush().map_err(internal)?;
    Ok(tmp)
}

fn commit(files: Vec<(NamedTempFile, PathBuf)>) -> Result<()> {
    for (tmp, dest) in files {
        tmp.persist(&dest)
            .map_err(|e| internal(format!("cannot write {}: {}", dest.display(), e.error)))?;
    }
    Ok(())
}

fn parse_int(s: &str) -> Option<u64> {
    match s.strip_prefix("0b") {
        Some(bits) => u64::from_str_radix(bits, 2).ok(),
        None => s.parse().ok(),
    }
}

fn prepare(c: &Circuit, spec: &str) -> Result<BasisState> {
    let spec = spec.trim();
    if let Some(v) = parse_int(spec) {
        return BasisState::from_u64(c.n_qubits(), v).map_err(|e| anyhow!("--prep: {e}"));
    }
    let layout = c.layout();
    let mut state = BasisState::zeros(c.n_qubits());
    for (reg, v) in
        qforge_core::harness::parse_assignments(spec).map_err(|m| anyhow!("--prep: {m}"))?
    {
        let (base, size) = layout
            .register(&reg)
            .ok_or_else(|| anyhow!("--prep: unknown register `{reg}`"))?;
        if size > 64 || (size < 64 && v >> size != 0) {
            bail!("--prep: {reg}={v} does not fit in {size} qubits");
        }
        state.set_field(base, size, v);
    }
    Ok(state)
}

fn describe_state(c: &Circuit, s: &BasisState) -> String {
    let layout = c.layout();
    let mut parts: Vec<String> = Vec::new();
    let mut covered = 0;
    for (label, base, size) in &layout.registers {
        covered = covered.max(base + size);
        if *size <= 64 {
            parts.push(format!("{label}={}", s.field(*base, *size)));
        } else {
            let bits: String = (0..*size)
                .rev()
                .map(|k| if s.get(base + k) { '1' } else { '0' })
                .collect();
            parts.push(format!("{label}=0b{bits}"));
        }
    }
    if covered < c.n_qubits() {
        let bits: String = (covered..c.n_qubits())
            .rev()
            .map(|q| if s.get(q) { '1' } else { '0' })
            .collect();
        parts.push(format!("qubits[{covered}..]=0b{bits}"));
    }
    parts.join(" ")
}

fn resolve_qubit(c: &Circuit, s: &str) -> Result<usize> {
    let s = s.trim();
    let bad = || anyhow!("--qubits: `{s}` is not a qubit of this circuit");
    if let Ok(i) = s.parse::<usize>() {
        return (i < c.n_qubits()).then_some(i).ok_or_else(bad);
    }
    let layout = c.layout();
    if let Some((label, rest)) = s.split_once('[') {
        let offset = rest
            .strip_suffix(']')
            .and_then(|o| o.parse().ok())
            .ok_or_else(bad)?;
        return layout.lookup(label, offset).ok_or_else(bad);
    }
    if let Some((base, 1)) = layout.register(s) {
        return Ok(base);
    }
    let split = s.trim_end_matches(|ch: char| ch.is_ascii_digit()).len();
    let (label, digits) = s.split_at(split);
    let offset = digits.parse().map_err(|_| bad())?;
    layout.lookup(label, offset).ok_or_else(bad)
}

fn cmd_check(file: &Path) -> Result<()> {
    let c = verified(file)?;
    println!("ok: {} qubits, {} gates", c.n_qubits(), c.len());
    Ok(())
}

fn cmd_compile(file: &Path, output: &Path, max_controls: usize) -> Result<()> {
    let cfg = PassConfig::new(max_controls).map_err(|e| anyhow!("--max-controls: {e}"))?;
    let c = read_circuit(file)?;
    let program = compile(&c, &cfg).map_err(|e| match e {
        CompileError::Verify(d) => anyhow!("{}: verification failed\n{d}", file.display()),
        other => anyhow!("{}: {other}", file.display()),
    })?;
    let mut text = emit_qp(&program).map_err(internal)?;
    text.push('\n');
    commit(vec![(staged(output, &text)?, output.to_path_buf())])?;
    println!("{} gates, {} qubits", program.gates.len(), program.n_qubits);
    Ok(())
}

fn cmd_sim(file: &Path, backend: BackendArg, prep: &str, top: usize) -> Result<()> {
    let c = verified(file)?;
    let input = prepare(&c, prep)?;
    match backend {
        BackendArg::Logic => {
            let out = run_logic(&c, &input).map_err(|e| anyhow!("{e}"))?;
            println!("{}", describe_state(&c, &out));
        }
        BackendArg::Sv => {
            let basis = input
                .as_u64()
                .ok_or_else(|| anyhow!("circuit too wide for the state-vector backend"))?;
            let sv = statevector::run(&c, basis).map_err(|e| anyhow!("{e}"))?;
            let mut order: Vec<(usize, f64)> = sv.probabilities().into_iter().enumerate().collect();
            order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let n = c.n_qubits();
            let mut out = String::new();
            for &(i, p) in order.iter().take(top) {
                let a = sv.amplitudes()[i];
                let bits: String = (0..n)
                    .rev()
                    .map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' })
                    .collect();
                let _ = writeln!(out, "{i} |{bits}> {:+.12} {:+.12} p={:.12}", a.re, a.im, p);
            }
            print!("{out}");
        }
    }
    Ok(())
}

fn cmd_reduce(
    file: &Path,
    qubits: &str,
    values: &str,
    output: &Path,
    semantic_cap: usize,
) -> Result<()> {
    let c = verified(file)?;
    let qs: Vec<usize> = qubits
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| resolve_qubit(&c, s))
        .collect::<Result<_>>()?;
    let vals: Vec<Vec<bool>> = values
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let bits = parse_bits(s.trim())
                .ok_or_else(|| anyhow!("--values: `{s}` is not a bitstring"))?;
            if bits.len() != qs.len() {
                bail!(
                    "--values: `{s}` has {} bits for {} qubits",
                    bits.len(),
                    qs.len()
                );
            }
            Ok(bits)
        })
        .collect::<Result<_>>()?;
    let report = generate_kernels(&c, &qs, &vals, &ReductionConfig { semantic_cap });
    let base = file
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| anyhow!("cannot derive an output name from {}", file.display()))?;
    if !report.all_ok() {
        for o in report.failures() {
            if let Err(e) = &o.result {
                eprintln!(
                    "value {}: {e}",
                    qforge_core::reduction::format_bits(&o.value)
                );
            }
        }
        bail!("reduction failed; nothing written");
    }
    fs::create_dir_all(output).with_context(|| format!("cannot create {}", output.display()))?;
    let mut files = Vec::new();
    for o in &report.outcomes {
        let k = o.result.as_ref().expect("checked above");
        let dest = output.join(kernel_file_name(base, &o.value));
        files.push((staged(&dest, &kernel_source(&c, &qs, &o.value, k))?, dest));
    }
    let manifest_path = output.join(manifest_file_name(base));
    files.push((
        staged(&manifest_path, &manifest(&c, base, &report))?,
        manifest_path,
    ));
    commit(files)?;
    for o in &report.outcomes {
        let k = o.result.as_ref().expect("checked above");
        println!(
            "{} {} {} qubits, {} gates",
            kernel_file_name(base, &o.value),
            k.method,
            k.circuit.n_qubits(),
            k.circuit.len()
        );
    }
    Ok(())
}

fn cmd_test(suite: &Path) -> Result<bool> {
    let cases = load_suite(suite).map_err(|e| anyhow!("{}: {e}", suite.display()))?;
    let report = run_suite(&cases);
    println!("{report}");
    Ok(report.all_passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { file } => cmd_check(&file).map(|_| true),
        Command::Compile {
            file,
            output,
            max_controls,
        } => cmd_compile(&file, &output, max_controls).map(|_| true),
        Command::Sim {
            file,
            backend,
            prep,
            top,
        } => cmd_sim(&file, backend, &prep, top).map(|_| true),
        Command::Reduce {
            file,
            qubits,
            values,
            output,
            semantic_cap,
        } => cmd_reduce(&file, &qubits, &values, &output, semantic_cap).map(|_| true),
        Command::Test { suite } => cmd_test(&suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Internal>() => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
