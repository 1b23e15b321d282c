//! `nvqc`: verify the published pulse tables, optimize new sequences, and
//! simulate states, sweeps and spectra. Every command writes CSV/JSON files
//! plus a run manifest.
//!
//! Exit codes: 0 success, 1 quality target missed, 2 usage or schema error.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nvqc::catalog::{builtin_catalog, find_entry, verification_csv, verify_catalog, SequenceDocument, VerifyOptions};
use nvqc::ga::{make_sequence_objective, optimize, GaConfig, ParameterBounds};
use nvqc::lab::polarization_sweep;
use nvqc::parse::{parse_grid, parse_initial_state, parse_robust, parse_sequence_document, parse_target};
use nvqc::pulse::{evolve_state, gate_fidelity, sequence_unitary, ControlSystem, PulseSequence, RabiRange};
use nvqc::report::{csv_table, fmt_num, xy_csv};
use nvqc::spectrum::{fid_spectrum, SpectrumConfig, Transition};
use nvqc::spinsys::{NVParams, MAX_CARBONS, PAPER_COUPLINGS};
use nvqc::targets::TargetSpec;

use output::{sibling, Recorder};

#[derive(Parser)]
#[command(name = "nvqc", version, about = "Pulse-sequence control of an NV-center spin register")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run manifest path [default: <out>.manifest.json]
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Re-evaluate published sequences against their published fidelities.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        entry: Option<String>,
        #[arg(long)]
        all: bool,
        /// Rabi samples for robust entries.
        #[arg(long, default_value_t = 5)]
        rabi_samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a pulse sequence implementing a target unitary.
    Optimize {
        /// Target JSON, e.g. {"kind": "controlled_rx", "n_carbons": 1, "j": 1}.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        pulses: usize,
        /// Average over `k` Rabi values in [lo, hi] MHz: `lo,hi,k`.
        #[arg(long)]
        robust: Option<String>,
        /// GA configuration JSON.
        #[arg(long)]
        ga: Option<PathBuf>,
        #[arg(long, env = "NVPF_SEED")]
        seed: Option<u64>,
        /// Nominal Rabi frequency, MHz.
        #[arg(long, default_value_t = 0.5)]
        rabi: f64,
        /// Best sequence JSON; the trace goes to <out>.trace.csv and the result to <out>.result.json.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evolve an initial state through a sequence and report populations.
    Simulate {
        #[arg(long)]
        seq: PathBuf,
        /// Bitstring (`00`), `mixed`, or `prepared:p,c`.
        #[arg(long, default_value = "00")]
        initial: String,
        /// Override the sequence's Rabi frequency, MHz.
        #[arg(long)]
        rabi: Option<f64>,
        /// Number of carbons when the sequence file carries no target.
        #[arg(long, default_value_t = 1)]
        carbons: usize,
        /// Also write the density matrix to this CSV.
        #[arg(long)]
        density: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Gate fidelity versus Rabi frequency, or ¹⁴N leakage versus polarization.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long)]
        seq: PathBuf,
        /// `lo:hi:n`
        #[arg(long)]
        grid: String,
        /// Target JSON for Rabi sweeps of sequence files that carry none.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Simulated free-induction-decay ESR spectrum.
    Spectrum {
        #[arg(long, value_enum)]
        transition: TransitionArg,
        /// Phase-advance frequency of the second pulse, MHz.
        #[arg(long, default_value_t = 5.0)]
        nu_d: f64,
        #[arg(long, default_value_t = 8192)]
        points: usize,
        /// Sampling interval, μs.
        #[arg(long, default_value_t = 0.05)]
        dwell: f64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Export every published sequence as a JSON file.
    Catalog {
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Rabi,
    Polarization,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransitionArg {
    Minus,
    Plus,
}

impl From<TransitionArg> for Transition {
    fn from(t: TransitionArg) -> Self {
        match t {
            TransitionArg::Minus => Transition::Minus,
            TransitionArg::Plus => Transition::Plus,
        }
    }
}

/// Whether the run met its quality target (exit 0) or not (exit 1).
type Quality = bool;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_target(path: &Path) -> anyhow::Result<TargetSpec> {
    parse_target(&read(path)?).with_context(|| format!("parsing target {}", path.display()))
}

fn load_sequence(path: &Path) -> anyhow::Result<(PulseSequence, Option<TargetSpec>)> {
    let doc = parse_sequence_document(&read(path)?).with_context(|| format!("parsing sequence {}", path.display()))?;
    Ok((doc.sequence()?, doc.target))
}

fn system_for(n_carbons: usize) -> anyhow::Result<ControlSystem> {
    if !(1..=PAPER_COUPLINGS.len()).contains(&n_carbons) {
        bail!(
            "{n_carbons} carbons requested; built-in couplings cover 1..={} (hard limit {MAX_CARBONS})",
            PAPER_COUPLINGS.len()
        );
    }
    Ok(ControlSystem::multi_carbon(&NVParams::default(), &PAPER_COUPLINGS[..n_carbons])?)
}

fn cmd_verify(rec: &mut Recorder, entry: Option<String>, rabi_samples: usize, out: &Path) -> anyhow::Result<Quality> {
    if rabi_samples == 0 {
        bail!("--rabi-samples must be at least 1");
    }
    let entries = match entry {
        Some(name) => vec![find_entry(&name)?],
        None => builtin_catalog(),
    };
    let opts = VerifyOptions {
        robust_samples: rabi_samples,
        ..VerifyOptions::default()
    };
    let rows = verify_catalog(&entries, &opts)?;
    rec.write(out, &verification_csv(&rows))?;
    for r in &rows {
        eprintln!(
            "{:<16} {:.4} (published {:.3}) {}",
            r.name,
            r.computed,
            r.published,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(rows.iter().all(|r| r.pass))
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    rec: &mut Recorder,
    target: &Path,
    pulses: usize,
    robust: Option<&str>,
    ga: Option<&Path>,
    seed: Option<u64>,
    rabi: f64,
    out: &Path,
) -> anyhow::Result<Quality> {
    let spec = load_target(target)?;
    let robust: Option<RabiRange> = robust.map(parse_robust).transpose()?;
    let mut config = match ga {
        Some(p) => {
            rec.config_path = Some(p.to_path_buf());
            GaConfig::from_json(&read(p)?).with_context(|| format!("parsing GA config {}", p.display()))?
        }
        None => GaConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    rec.seed = Some(config.seed);
    if !(rabi.is_finite() && rabi > 0.0) {
        bail!("--rabi must be > 0");
    }
    let bounds = ParameterBounds::default_for(pulses);
    bounds.validate()?;
    let n_carbons = spec.n_carbons()?;
    system_for(n_carbons)?;
    let objective = make_sequence_objective(
        &spec,
        pulses,
        &NVParams::default(),
        &PAPER_COUPLINGS[..n_carbons],
        rabi,
        robust,
    )?;
    let result = optimize(|x: &[f64]| objective.fidelity(x), &bounds, &config)?;

    let mut seq = nvqc::ga::decode_params(&result.best_params, pulses, rabi)?;
    if let Some(r) = robust {
        seq = seq.with_rabi_range(r.lo, r.hi)?;
    }
    let doc = SequenceDocument::new(seq, Some(spec), None);
    rec.write(out, &doc.to_json())?;
    rec.write(&sibling(out, "trace.csv"), &result.trace_csv())?;
    rec.write(&sibling(out, "result.json"), &serde_json::to_string_pretty(&result)?)?;
    eprintln!(
        "best fitness {} after {} generations ({} evaluations)",
        fmt_num(result.best_fitness),
        result.generations_run,
        result.evaluations
    );
    Ok(result.best_fitness >= config.target_fitness)
}

fn basis_label(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

fn cmd_simulate(
    rec: &mut Recorder,
    seq_path: &Path,
    initial: &str,
    rabi: Option<f64>,
    carbons: usize,
    density: Option<&Path>,
    out: &Path,
) -> anyhow::Result<Quality> {
    let (seq, target) = load_sequence(seq_path)?;
    rec.config_path = Some(seq_path.to_path_buf());
    let n_carbons = match &target {
        Some(t) => t.n_carbons()?,
        None => carbons,
    };
    let sys = system_for(n_carbons)?;
    let n_qubits = n_carbons + 1;
    let rho0 = parse_initial_state(initial, n_qubits)?;
    if let Some(r) = rabi {
        if !(r.is_finite() && r > 0.0) {
            bail!("--rabi must be > 0");
        }
    }
    let rho = evolve_state(&seq, &rho0, &sys, rabi)?;
    let pops = rho.populations()?;
    let mut csv = String::from("basis,population\n");
    for (k, p) in pops.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", basis_label(k, n_qubits), fmt_num(*p)));
    }
    rec.write(out, &csv)?;
    if let Some(path) = density {
        let dim = rho.dim();
        let m = rho.matrix();
        let mut header = vec!["part".to_string(), "row".to_string()];
        header.extend((0..dim).map(|j| format!("c{j}")));
        let mut text = header.join(",") + "\n";
        for (part, imag) in [("re", false), ("im", true)] {
            for i in 0..dim {
                let cells: Vec<String> = (0..dim)
                    .map(|j| {
                        let z = m[(i, j)];
                        fmt_num(if imag { z.im } else { z.re })
                    })
                    .collect();
                text.push_str(&format!("{part},{i},{}\n", cells.join(",")));
            }
        }
        rec.write(path, &text)?;
    }
    Ok(true)
}

fn cmd_sweep(
    rec: &mut Recorder,
    kind: SweepKind,
    seq_path: &Path,
    grid: &str,
    target: Option<&Path>,
    out: &Path,
) -> anyhow::Result<Quality> {
    let grid = parse_grid(grid)?;
    let (seq, seq_target) = load_sequence(seq_path)?;
    rec.config_path = Some(seq_path.to_path_buf());
    let points = match kind {
        SweepKind::Rabi => {
            let spec = match target {
                Some(p) => load_target(p)?,
                None => seq_target.ok_or_else(|| anyhow!("sequence file has no target; pass --target"))?,
            };
            let sys = system_for(spec.n_carbons()?)?;
            let u_t = spec.unitary()?;
            if grid.iter().any(|r| *r <= 0.0) {
                bail!("Rabi grid must be positive");
            }
            grid.iter()
                .map(|&r| Ok((r, gate_fidelity(&sequence_unitary(&seq, &sys, Some(r))?, &u_t)?)))
                .collect::<nvqc::Result<Vec<_>>>()?
        }
        SweepKind::Polarization => polarization_sweep(&seq, &grid, &NVParams::default())?,
    };
    let (x, y) = match kind {
        SweepKind::Rabi => ("rabi_mhz", "fidelity"),
        SweepKind::Polarization => ("p_n", "leakage"),
    };
    rec.write(out, &xy_csv(x, y, &points))?;
    Ok(true)
}

fn cmd_spectrum(
    rec: &mut Recorder,
    transition: Transition,
    nu_d: f64,
    points: usize,
    dwell: f64,
    out: &Path,
) -> anyhow::Result<Quality> {
    let cfg = SpectrumConfig {
        nu_d_mhz: nu_d,
        dwell_us: dwell,
        n_points: points,
    };
    let spec = fid_spectrum(&NVParams::default(), &PAPER_COUPLINGS[0], transition, &cfg)?;
    let rows: Vec<Vec<f64>> = spec.iter().map(|&(f, a)| vec![f, a]).collect();
    rec.write(out, &csv_table(&["frequency_mhz", "amplitude"], &rows))?;
    Ok(true)
}

fn cmd_catalog(rec: &mut Recorder, dir: &Path) -> anyhow::Result<Quality> {
    for e in builtin_catalog() {
        rec.write(&dir.join(format!("{}.json", e.name)), &e.document().to_json())?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, out, common) = match &cli.command {
        Command::Verify { out, common, .. } => ("verify", out.clone(), common),
        Command::Optimize { out, common, .. } => ("optimize", out.clone(), common),
        Command::Simulate { out, common, .. } => ("simulate", out.clone(), common),
        Command::Sweep { out, common, .. } => ("sweep", out.clone(), common),
        Command::Spectrum { out, common, .. } => ("spectrum", out.clone(), common),
        Command::Catalog { out_dir, common } => ("catalog", out_dir.join("catalog"), common),
    };
    let manifest = common.manifest.clone().unwrap_or_else(|| sibling(&out, "manifest.json"));
    let mut rec = Recorder::start(name);

    let result = match &cli.command {
        Command::Verify { entry, rabi_samples, out, .. } => cmd_verify(&mut rec, entry.clone(), *rabi_samples, out),
        Command::Optimize { target, pulses, robust, ga, seed, rabi, out, .. } => cmd_optimize(
            &mut rec,
            target,
            *pulses,
            robust.as_deref(),
            ga.as_deref(),
            *seed,
            *rabi,
            out,
        ),
        Command::Simulate { seq, initial, rabi, carbons, density, out, .. } => {
            cmd_simulate(&mut rec, seq, initial, *rabi, *carbons, density.as_deref(), out)
        }
        Command::Sweep { kind, seq, grid, target, out, .. } => {
            cmd_sweep(&mut rec, *kind, seq, grid, target.as_deref(), out)
        }
        Command::Spectrum { transition, nu_d, points, dwell, out, .. } => {
            cmd_spectrum(&mut rec, (*transition).into(), *nu_d, *points, *dwell, out)
        }
        Command::Catalog { out_dir, .. } => cmd_catalog(&mut rec, out_dir),
    };

    let code = match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    if code != 2 {
        if let Err(e) = rec.finish(&manifest, code) {
            eprintln!("error: writing manifest: {e:#}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
