//! `imfogram` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 conservation
//! violation under `--strict`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use imfogram_core::io::{self, InputFormat};
use imfogram_core::signals::{self, Duffing, NoisyTriple, Tone};
use imfogram_core::spectral::l1_fourier_energy;
use imfogram_core::{
    check_imf_set, decompose, imfogram, spectrogram, AveragingWindows, ConservationReport, ExtensionMode,
    FifConfig, FilterFamily, FilterMode, ImfSet, Signal, TfrMatrix,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "imfogram", version, about = "Fast Iterative Filtering, L1 energy checks and IMFograms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic test signal as `time,value` CSV.
    Gen(GenArgs),
    /// Decompose a signal into modes and a trend.
    Decompose(DecomposeArgs),
    /// Check L1 Fourier-energy conservation of a decomposition.
    Verify(VerifyArgs),
    /// IMFogram of a decomposition.
    Imfogram(ImfogramArgs),
    /// One-sided amplitude spectrogram of a signal.
    Spectrogram(SpectrogramArgs),
    /// Ingest, decompose, verify and render in one go.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    ChirpPair,
    NoisyTriple,
    Duffing,
    Multisine,
    TwoTone,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Pgm,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Output CSV file.
    #[arg(long)]
    output: PathBuf,
    /// Sample count (default: one second for the chirps, 16384 for Duffing).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise level of the noisy triple.
    #[arg(long, default_value_t = 0.18)]
    sigma: f64,
    /// Multisine windows as `a:f:phi,...` per window, windows separated by `;`.
    #[arg(long)]
    tones: Option<String>,
    /// Multisine window length.
    #[arg(long, default_value_t = 512)]
    window: usize,
    /// Two-tone parameters `a:f:phi` of the second tone.
    #[arg(long, default_value = "0.8:0.6:1")]
    second: String,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long = "input-format")]
    input_format: Option<String>,
    /// Sample rate for single-column CSV input.
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
}

#[derive(Args)]
struct FifArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = imfogram_core::filters::DEFAULT_CHI)]
    chi: f64,
    #[arg(long = "max-imfs", default_value_t = 50)]
    max_imfs: usize,
    #[arg(long = "max-inner-iterations", default_value_t = 200)]
    max_inner_iterations: usize,
    #[arg(long = "filter-family", default_value = "bump")]
    filter_family: String,
    #[arg(long = "filter-mode", default_value = "double")]
    filter_mode: String,
    #[arg(long, default_value = "periodic")]
    extension: String,
}

#[derive(Args)]
struct TfrArgs {
    /// Window length J in samples (default: min(256, n)).
    #[arg(long)]
    window: Option<usize>,
    /// Hop H in samples (default: J).
    #[arg(long)]
    hop: Option<usize>,
    /// IMFogram frequency rows (default: J/2 + 1).
    #[arg(long = "freq-bins")]
    freq_bins: Option<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv,pgm")]
    format: Vec<Format>,
    #[arg(long = "pgm-depth", default_value_t = 16)]
    pgm_depth: u8,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "output-dir")]
    output_dir: PathBuf,
    #[command(flatten)]
    fif: FifArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Decomposition CSV (`time, components..., trend`).
    #[arg(long)]
    imfs: PathBuf,
    #[arg(long = "output-dir")]
    output_dir: PathBuf,
    #[arg(long, allow_negative_numbers = true, default_value_t = imfogram_core::verify::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ImfogramArgs {
    #[arg(long)]
    imfs: PathBuf,
    #[arg(long = "output-dir")]
    output_dir: PathBuf,
    #[command(flatten)]
    tfr: TfrArgs,
}

#[derive(Args)]
struct SpectrogramArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "output-dir")]
    output_dir: PathBuf,
    #[command(flatten)]
    tfr: TfrArgs,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "output-dir")]
    output_dir: PathBuf,
    #[command(flatten)]
    fif: FifArgs,
    #[command(flatten)]
    tfr: TfrArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = imfogram_core::verify::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    strict: bool,
    /// Accepted for symmetry with `gen`; decomposition is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

/// Error tagged with the pipeline stage it came from.
struct Failure {
    stage: &'static str,
    message: String,
}

type Outcome<T> = std::result::Result<T, Failure>;

fn at<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> Failure {
    move |e| Failure { stage, message: e.to_string() }
}

fn invalid(flag: &str, message: impl std::fmt::Display) -> Failure {
    Failure { stage: "arguments", message: format!("{flag}: {message}") }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("error [{}]: {}", f.stage, f.message);
        return ExitCode::from(EXIT_VALIDATION);
    }
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Decompose(a) => run_decompose(a),
        Command::Verify(a) => run_verify(a),
        Command::Imfogram(a) => run_imfogram(a),
        Command::Spectrogram(a) => run_spectrogram(a),
        Command::Pipeline(a) => run_pipeline(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error [{}]: {}", f.stage, f.message);
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn configure_threads() -> Outcome<()> {
    let Ok(v) = std::env::var("IMFOGRAM_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| invalid("IMFOGRAM_THREADS", format!("expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(at("threads"))
}

fn prepare_dir(dir: &Path) -> Outcome<()> {
    fs::create_dir_all(dir).map_err(|e| invalid("--output-dir", format!("{}: {e}", dir.display())))
}

fn load_signal(a: &InputArgs) -> Outcome<Signal> {
    if !a.input.is_file() {
        return Err(invalid("--input", format!("{} is not a readable file", a.input.display())));
    }
    if let Some(r) = a.rate {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("--rate", format!("must be positive, got {r}")));
        }
    }
    let format = match &a.input_format {
        Some(f) => f.parse::<InputFormat>().map_err(|e| invalid("--input-format", e))?,
        None => InputFormat::from_path(&a.input),
    };
    io::ingest(&a.input, format, a.rate).map_err(at("ingest"))
}

fn fif_config(a: &FifArgs) -> Outcome<FifConfig> {
    if !(a.delta.is_finite() && a.delta > 0.0) {
        return Err(invalid("--delta", format!("must be positive, got {}", a.delta)));
    }
    if !(1.1..=2.0).contains(&a.chi) {
        return Err(invalid("--chi", format!("must lie in [1.1, 2], got {}", a.chi)));
    }
    if a.max_imfs == 0 {
        return Err(invalid("--max-imfs", "must be at least 1"));
    }
    if a.max_inner_iterations == 0 {
        return Err(invalid("--max-inner-iterations", "must be at least 1"));
    }
    Ok(FifConfig {
        delta: a.delta,
        chi: a.chi,
        max_imfs: a.max_imfs,
        max_inner_iterations: a.max_inner_iterations,
        filter_family: a.filter_family.parse::<FilterFamily>().map_err(|e| invalid("--filter-family", e))?,
        filter_mode: a.filter_mode.parse::<FilterMode>().map_err(|e| invalid("--filter-mode", e))?,
        extension: a.extension.parse::<ExtensionMode>().map_err(|e| invalid("--extension", e))?,
        ..FifConfig::default()
    })
}

/// Window, hop and frequency rows after defaults, checked against `n`.
fn tfr_shape(a: &TfrArgs, n: usize) -> Outcome<(usize, usize, usize)> {
    let window = a.window.unwrap_or(n.min(256));
    if window == 0 || window > n {
        return Err(invalid("--window", format!("must lie in [1, {n}], got {window}")));
    }
    let hop = a.hop.unwrap_or(window);
    if hop == 0 || hop > window {
        return Err(invalid("--hop", format!("must lie in [1, {window}], got {hop}")));
    }
    let bins = a.freq_bins.unwrap_or(window / 2 + 1);
    if bins < 2 {
        return Err(invalid("--freq-bins", format!("must be at least 2, got {bins}")));
    }
    if a.pgm_depth != 8 && a.pgm_depth != 16 {
        return Err(invalid("--pgm-depth", format!("must be 8 or 16, got {}", a.pgm_depth)));
    }
    Ok((window, hop, bins))
}

fn write_file(path: &Path, stage: &'static str, f: impl FnOnce(&mut fs::File) -> imfogram_core::Result<()>) -> Outcome<()> {
    let mut file = fs::File::create(path).map_err(|e| Failure {
        stage,
        message: format!("{}: {e}", path.display()),
    })?;
    f(&mut file).map_err(at(stage))
}

fn export_tfr(m: &TfrMatrix, dir: &Path, stem: &str, a: &TfrArgs) -> Outcome<()> {
    if a.format.contains(&Format::Csv) {
        write_file(&dir.join(format!("{stem}.csv")), "export", |f| io::write_tfr_csv(std::io::BufWriter::new(f), m))?;
    }
    if a.format.contains(&Format::Pgm) {
        write_file(&dir.join(format!("{stem}.pgm")), "export", |f| {
            io::write_tfr_pgm(std::io::BufWriter::new(f), m, a.pgm_depth)
        })?;
    }
    Ok(())
}

fn print_meta(signal: &Signal, set: &ImfSet) {
    let total = l1_fourier_energy(signal);
    let share = |s: &Signal| if total > 0.0 { l1_fourier_energy(s) / total } else { 0.0 };
    println!("{:>4} {:>8} {:>6} {:>5} {:>12}", "imf", "l", "p", "cap", "energy");
    if let Some(run) = set.run() {
        for (k, (m, imf)) in run.meta.iter().zip(set.imfs()).enumerate() {
            println!(
                "{:>4} {:>8} {:>6} {:>5} {:>12.6}",
                k + 1,
                m.filter_length(),
                m.iterations,
                if m.hit_iteration_cap { "yes" } else { "no" },
                share(imf)
            );
        }
        println!("{:>4} {:>8} {:>6} {:>5} {:>12.6}", "tr", "-", "-", "-", share(set.trend()));
        println!("stop: {}", imfogram_core::io::stop_name(run.stop_reason));
    }
}

fn report_outputs(report: &ConservationReport, dir: &Path, strict: bool) -> Outcome<u8> {
    write_file(&dir.join("conservation.csv"), "verify", |f| {
        io::write_report_csv(std::io::BufWriter::new(f), report)
    })?;
    let line = report.summary_json();
    fs::write(dir.join("summary.json"), format!("{line}\n")).map_err(at("verify"))?;
    println!("{line}");
    if strict && !report.conserves() {
        eprintln!(
            "conservation violated: {} bins, relative error {:e}",
            report.violations.len(),
            report.relative_error
        );
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

fn parse_tone(s: &str) -> Outcome<Tone> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| invalid("--tones", format!("{s:?}: {e}")))?;
    match nums.as_slice() {
        [a, f] => Ok(Tone::new(*a, *f, 0.0)),
        [a, f, p] => Ok(Tone::new(*a, *f, *p)),
        _ => Err(invalid("--tones", format!("expected a:f[:phi], got {s:?}"))),
    }
}

fn run_gen(a: GenArgs) -> Outcome<u8> {
    if let Some(parent) = a.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| invalid("--output", e))?;
    }
    let stage = "generate";
    let signal = match a.kind {
        Kind::ChirpPair => {
            let rate = a.rate.unwrap_or(2000.0);
            signals::gen_chirp_pair(a.n.unwrap_or(rate.round() as usize), rate).map_err(at(stage))?
        }
        Kind::NoisyTriple => {
            let rate = a.rate.unwrap_or(2000.0);
            let p = NoisyTriple { noise_sigma: a.sigma, seed: a.seed };
            signals::gen_noisy_triple(a.n.unwrap_or(rate.round() as usize), rate, p).map_err(at(stage))?
        }
        Kind::Duffing => {
            let n = a.n.unwrap_or(16384);
            let rate = a.rate.unwrap_or(n as f64 / 150.0);
            signals::gen_duffing_velocity(n, rate, Duffing::default()).map_err(at(stage))?
        }
        Kind::Multisine => {
            let spec = a.tones.as_deref().ok_or_else(|| invalid("--tones", "required for --kind multisine"))?;
            let windows = spec
                .split(';')
                .map(|w| w.split(',').filter(|t| !t.trim().is_empty()).map(parse_tone).collect())
                .collect::<Outcome<Vec<Vec<Tone>>>>()?;
            signals::gen_piecewise_multisine(&windows, a.window, a.rate.unwrap_or(a.window as f64))
                .map_err(at(stage))?
        }
        Kind::TwoTone => {
            let t = parse_tone(&a.second).map_err(|f| invalid("--second", f.message))?;
            let n = a.n.unwrap_or(4096);
            signals::gen_two_tone(t.amplitude, t.frequency, t.phase, n, a.rate.unwrap_or(51.2)).map_err(at(stage))?
        }
    };
    write_file(&a.output, "export", |f| io::write_signal_csv(std::io::BufWriter::new(f), &signal))?;
    Ok(0)
}

fn run_decompose(a: DecomposeArgs) -> Outcome<u8> {
    let config = fif_config(&a.fif)?;
    let signal = load_signal(&a.input)?;
    prepare_dir(&a.output_dir)?;
    let set = decompose(&signal, &config).map_err(at("decompose"))?;
    write_file(&a.output_dir.join("imfs.csv"), "export", |f| {
        io::write_imf_set_csv(std::io::BufWriter::new(f), &set)
    })?;
    print_meta(&signal, &set);
    Ok(0)
}

fn run_verify(a: VerifyArgs) -> Outcome<u8> {
    if !(a.tolerance >= 0.0) {
        return Err(invalid("--tolerance", format!("must be >= 0, got {}", a.tolerance)));
    }
    if !a.imfs.is_file() {
        return Err(invalid("--imfs", format!("{} is not a readable file", a.imfs.display())));
    }
    let signal = load_signal(&a.input)?;
    prepare_dir(&a.output_dir)?;
    let set = io::read_imf_set_csv(&a.imfs).map_err(at("ingest"))?;
    let report = check_imf_set(&signal, &set, a.tolerance).map_err(at("verify"))?;
    report_outputs(&report, &a.output_dir, a.strict)
}

fn run_imfogram(a: ImfogramArgs) -> Outcome<u8> {
    if !a.imfs.is_file() {
        return Err(invalid("--imfs", format!("{} is not a readable file", a.imfs.display())));
    }
    let set = io::read_imf_set_csv(&a.imfs).map_err(at("ingest"))?;
    let (window, hop, bins) = tfr_shape(&a.tfr, set.trend().len())?;
    prepare_dir(&a.output_dir)?;
    let windows = AveragingWindows::new(window, hop).map_err(at("imfogram"))?;
    let m = imfogram(&set, &windows, bins).map_err(at("imfogram"))?;
    export_tfr(&m, &a.output_dir, "imfogram", &a.tfr)?;
    Ok(0)
}

fn run_spectrogram(a: SpectrogramArgs) -> Outcome<u8> {
    let signal = load_signal(&a.input)?;
    let (window, hop, _) = tfr_shape(&a.tfr, signal.len())?;
    prepare_dir(&a.output_dir)?;
    let m = spectrogram(&signal, window, hop).map_err(at("spectrogram"))?;
    export_tfr(&m, &a.output_dir, "spectrogram", &a.tfr)?;
    Ok(0)
}

fn run_pipeline(a: PipelineArgs) -> Outcome<u8> {
    let config = fif_config(&a.fif)?;
    if !(a.tolerance >= 0.0) {
        return Err(invalid("--tolerance", format!("must be >= 0, got {}", a.tolerance)));
    }
    let signal = load_signal(&a.input)?;
    let (window, hop, bins) = tfr_shape(&a.tfr, signal.len())?;
    prepare_dir(&a.output_dir)?;

    let set = decompose(&signal, &config).map_err(at("decompose"))?;
    write_file(&a.output_dir.join("imfs.csv"), "export", |f| {
        io::write_imf_set_csv(std::io::BufWriter::new(f), &set)
    })?;
    print_meta(&signal, &set);

    let report = check_imf_set(&signal, &set, a.tolerance).map_err(at("verify"))?;
    let code = report_outputs(&report, &a.output_dir, a.strict)?;

    if set.is_empty() {
        log::warn!("no modes extracted; IMFogram skipped");
    } else {
        let windows = AveragingWindows::new(window, hop).map_err(at("imfogram"))?;
        let m = imfogram(&set, &windows, bins).map_err(at("imfogram"))?;
        export_tfr(&m, &a.output_dir, "imfogram", &a.tfr)?;
    }
    let spec = spectrogram(&signal, window, hop).map_err(at("spectrogram"))?;
    export_tfr(&spec, &a.output_dir, "spectrogram", &a.tfr)?;
    Ok(code)
}
