use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use kantorovich::image::{binarize, load_image, phase_fractions, reconstruct, save_image, ReconstructionConfig};
use kantorovich::kernels::{check_partition_of_unity, make_product, moment_m_beta, KernelSpec, Support};
use kantorovich::sampling::{Extension, SamplingScheme, DEFAULT_TRUNCATION_TOL};
use kantorovich::signals::{convergence_sweep, write_sweep_csv, Metric, TestSignal};
use kantorovich::Error;

#[derive(Parser)]
#[command(name = "kantorovich", version, about = "Sampling Kantorovich operators for signal and image reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upscale a PGM image with S_w
    Reconstruct(ReconstructArgs),
    /// Report kernel conditions and optionally export the kernel curve
    KernelInfo(KernelInfoArgs),
    /// Error of S_w f − f on a built-in test signal over a list of w
    Converge(ConvergeArgs),
    /// Threshold a PGM image to black and white and report phase fractions
    Binarize(BinarizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    /// replicate edge pixels outside the frame
    Clamp,
    /// the image is zero outside its frame
    Zero,
}

#[derive(clap::Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "jackson:12:1")]
    kernel: KernelSpec,
    #[arg(long, default_value_t = 40.0)]
    w: f64,
    #[arg(long, default_value_t = 6)]
    scale: usize,
    #[arg(long, value_enum, default_value_t = Boundary::Clamp)]
    boundary: Boundary,
    /// per-factor truncation tolerance
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_TOL)]
    truncation_tol: f64,
}

#[derive(clap::Args)]
struct KernelInfoArgs {
    #[arg(long)]
    kernel: KernelSpec,
    /// write `x,value` samples of the kernel
    #[arg(long)]
    csv: Option<PathBuf>,
    /// also report the moment m_beta
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    probes: usize,
    /// half-width of the exported curve
    #[arg(long, default_value_t = 6.0)]
    range: f64,
    #[arg(long, default_value_t = 1201)]
    samples: usize,
}

#[derive(clap::Args)]
struct ConvergeArgs {
    #[arg(long)]
    kernel: KernelSpec,
    #[arg(long)]
    test: TestSignal,
    #[arg(long)]
    metric: Metric,
    /// comma-separated sampling rates
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    w_list: Vec<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BinarizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// gray level; pixels above it become white. Otsu's threshold if absent
    #[arg(long)]
    threshold: Option<f64>,
    /// write `white_fraction,black_fraction`
    #[arg(long)]
    report: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Writes through a sibling temporary file so that a failed run leaves no output.
fn write_atomically(path: &Path, write: impl FnOnce(&Path) -> Result<(), Failure>) -> Result<(), Failure> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    match write(&tmp).and_then(|()| fs::rename(&tmp, path).map_err(Failure::from)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<(), Failure> {
    let config = ReconstructionConfig {
        kernel: args.kernel,
        w: args.w,
        scale: args.scale,
        truncation_tol: args.truncation_tol,
        boundary: match args.boundary {
            Boundary::Clamp => Extension::Clamp,
            Boundary::Zero => Extension::Zero,
        },
    };
    config.validate().map_err(usage)?;
    let start = Instant::now();
    let image = load_image(&args.input)?;
    let output = reconstruct(&image, &config)?;
    write_atomically(&args.output, |p| Ok(save_image(&output, p)?))?;
    println!(
        "{}x{} -> {}x{} ({}, w = {}, scale = {}) in {:.2} s",
        image.width(),
        image.height(),
        output.width(),
        output.height(),
        config.kernel,
        config.w,
        config.scale,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_kernel_info(args: KernelInfoArgs) -> Result<(), Failure> {
    if args.probes == 0 || args.samples < 2 || !(args.range > 0.0) {
        return Err(Failure::Usage("--probes must be positive, --samples at least 2, --range positive".into()));
    }
    if let Some(beta) = args.beta {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Failure::Usage(format!("--beta must be finite and >= 0, got {beta}")));
        }
    }
    let kernel = args.kernel.build().map_err(usage)?;
    let product = make_product(vec![kernel.clone()])?;
    let mut out = String::new();
    out.push_str(&format!("kernel: {}\n", args.kernel));
    match kernel.support() {
        Support::Compact { lo, hi } => out.push_str(&format!("support: [{lo}, {hi}]\n")),
        Support::PolynomialDecay { exponent, envelope } => {
            out.push_str(&format!("decay: |x|^-{exponent} with envelope {envelope:.6e}\n"))
        }
    }
    if let Some(c) = kernel.jackson_constant() {
        out.push_str(&format!("normalization c_k: {c:.15e}\n"));
    }
    out.push_str(&format!("integral: {:.12}\n", kernel.integral(1e-10)?));
    let deviation = check_partition_of_unity(&product, &SamplingScheme::uniform(1), args.probes, 1e-12)?;
    out.push_str(&format!("partition of unity deviation ({} probes): {deviation:.3e}\n", args.probes));
    let m0 = moment_m_beta(&kernel, 0.0, args.probes)?;
    out.push_str(&format!("m_0: {:.12} (tail bound {:.1e})\n", m0.value, m0.tail_bound));
    if let Some(beta) = args.beta {
        match moment_m_beta(&kernel, beta, args.probes) {
            Ok(m) => out.push_str(&format!("m_{beta}: {:.12} (tail bound {:.1e})\n", m.value, m.tail_bound)),
            Err(Error::DivergentMoment { decay, .. }) => {
                out.push_str(&format!("m_{beta}: diverges (kernel decays like |x|^-{decay})\n"))
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.push_str(&format!(
        "truncation radius (tol {DEFAULT_TRUNCATION_TOL:e}): {}\n",
        kernel.truncation_radius(DEFAULT_TRUNCATION_TOL)
    ));
    if let Some(path) = &args.csv {
        let step = 2.0 * args.range / (args.samples - 1) as f64;
        let mut csv = String::from("x,value\n");
        for i in 0..args.samples {
            let x = -args.range + step * i as f64;
            csv.push_str(&format!("{x},{:.17e}\n", kernel.evaluate(x)));
        }
        write_atomically(path, |p| Ok(fs::write(p, csv.as_bytes())?))?;
    }
    print!("{out}");
    Ok(())
}

fn cmd_converge(args: ConvergeArgs) -> Result<(), Failure> {
    if args.w_list.is_empty() {
        return Err(Failure::Usage("--w-list is empty".into()));
    }
    if let Some(w) = args.w_list.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Failure::Usage(format!("w must be finite and positive, got {w}")));
    }
    args.kernel.build().map_err(usage)?;
    let rows = convergence_sweep(args.test, &args.kernel, args.metric, &args.w_list)?;
    let mut table = Vec::new();
    write_sweep_csv(&rows, &mut table)?;
    if let Some(path) = &args.csv {
        write_atomically(path, |p| Ok(fs::write(p, &table)?))?;
    }
    io::stdout().write_all(&table)?;
    Ok(())
}

fn cmd_binarize(args: BinarizeArgs) -> Result<(), Failure> {
    if let Some(t) = args.threshold {
        if !t.is_finite() {
            return Err(Failure::Usage(format!("threshold must be finite, got {t}")));
        }
    }
    let image = load_image(&args.input)?;
    let binary = binarize(&image, args.threshold);
    let (white, black) = phase_fractions(&binary)?;
    write_atomically(&args.output, |p| Ok(save_image(&binary, p)?))?;
    if let Some(path) = &args.report {
        let csv = format!("white_fraction,black_fraction\n{white},{black}\n");
        write_atomically(path, |p| Ok(fs::write(p, csv.as_bytes())?))?;
    }
    println!("white_fraction {white}, black_fraction {black}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::KernelInfo(a) => cmd_kernel_info(a),
        Command::Converge(a) => cmd_converge(a),
        Command::Binarize(a) => cmd_binarize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
