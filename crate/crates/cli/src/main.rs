use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsamp_core::fourier::io::{read_coefficients, write_coefficient_rows, write_coefficients, write_pgm};
use fsamp_core::fourier::block;
use fsamp_core::metrics::{recovery_report, DEFAULT_METRIC_GRID};
use fsamp_core::recon::{partial_sum_recon, vdp_recon};
use fsamp_core::witness::TorusWitnessOptions;
use fsamp_core::{
    bv_min_admm, hierarchical, lowest_block, uniform_random, AdmmParams, HierarchicalParams, Measurements, Phantom,
    SamplingDesign,
};
use fsamp_cli::experiment::DEFAULT_SEED;
use fsamp_cli::witness::{group_witness, torus_witness};
use fsamp_cli::{compare_runs, preset, rerun_from_manifest, run_experiment, verify_rerun, CliError, CliResult, ExperimentSpec, PRESETS};

#[derive(Parser)]
#[command(name = "fsamp", version, about = "Fourier-sampling reconstruction experiments")]
struct Cli {
    /// Root seed for every random draw (default 7).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads for FFTs and phase searches.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Render a phantom and optionally dump its exact coefficients.
    Phantom {
        /// Phantom JSON (built-in phantom when omitted).
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_METRIC_GRID)]
        grid: usize,
        /// Also write coefficients for `|xi|_inf <= M`.
        #[arg(long)]
        coeffs: Option<u64>,
    },
    /// Generate a sampling design.
    Design {
        #[command(subcommand)]
        scheme: DesignCmd,
        #[arg(long, default_value_t = 2, global = true)]
        dim: usize,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Exact phantom coefficients at the design frequencies.
    Measure {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        phantom: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct from a measurement dump.
    Reconstruct(ReconArgs),
    /// Recovery metrics of a reconstruction against the phantom.
    Metrics {
        #[arg(long)]
        recon: PathBuf,
        #[arg(long)]
        phantom: Option<PathBuf>,
        /// Design for the feasibility check (full coefficient block when omitted).
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_METRIC_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy selection and Riesz-product witness.
    Witness(WitnessArgs),
    /// Run an experiment from a spec file or a preset, or rerun a manifest.
    Experiment {
        #[arg(long, conflicts_with_all = ["preset", "rerun"])]
        spec: Option<PathBuf>,
        #[arg(long, conflicts_with = "rerun")]
        preset: Option<String>,
        /// Manifest to re-execute; the rerun is checked against it.
        #[arg(long)]
        rerun: Option<PathBuf>,
    },
    /// Tabulate finished runs (CSV and JSON).
    Compare {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        /// Output prefix, `.csv` and `.json` are appended.
        #[arg(long, default_value = "comparison")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DesignCmd {
    LowestBlock {
        #[arg(long)]
        m: u64,
    },
    Hierarchical {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        k0: Option<u32>,
        #[arg(long)]
        k_cap: Option<u32>,
    },
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        half_width: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Partial,
    Vdp,
    Bvmin,
}

#[derive(Args)]
struct ReconArgs {
    #[arg(long)]
    measurements: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Degree (default: largest measured frequency, doubled for bvmin).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    oversample: Option<usize>,
    #[arg(long)]
    fixed_rho: bool,
    /// Measurements are not Hermitian-symmetric.
    #[arg(long)]
    complex: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    /// Cyclic moduli of the group, e.g. `1024` or `8,8`.
    #[arg(long, value_delimiter = ',')]
    group: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    lambda_frac: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Build the degree-`2^k` torus witness instead (needs `--design`).
    #[arg(long, requires = "design", conflicts_with = "group")]
    torus_k: Option<u32>,
    #[arg(long)]
    design: Option<PathBuf>,
}

fn out_path(cli: &Cli, given: &Option<PathBuf>, default: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(&cli.out_dir)?;
    Ok(match given {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => cli.out_dir.join(p),
        None => cli.out_dir.join(default),
    })
}

fn load_phantom(path: &Option<PathBuf>) -> CliResult<Phantom> {
    Ok(match path {
        Some(p) => Phantom::load(p)?,
        None => Phantom::standard(),
    })
}

fn run(cli: &Cli) -> CliResult<()> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.cmd {
        Cmd::Phantom { spec, grid, coeffs } => {
            let ph = load_phantom(spec)?;
            let img = out_path(cli, &None, "phantom.pgm")?;
            write_pgm(&img, &ph.render(*grid)?, None)?;
            std::fs::write(out_path(cli, &None, "phantom.json")?, ph.to_json()?)?;
            if let Some(m) = coeffs {
                let freqs: Vec<_> = block(2, *m).collect();
                let vals = freqs.iter().map(|xi| ph.coeff(xi)).collect::<Result<Vec<_>, _>>()?;
                write_coefficient_rows(&out_path(cli, &None, "phantom_coeffs.csv")?, 2, freqs.iter().zip(vals))?;
            }
            println!("{}", img.display());
        }
        Cmd::Design { scheme, dim, out } => {
            let design = match scheme {
                DesignCmd::LowestBlock { m } => lowest_block(*m, *dim)?,
                DesignCmd::Hierarchical { n, alpha, k0, k_cap } => {
                    let mut p = HierarchicalParams::with_defaults(*n, *dim, *alpha);
                    if let Some(k0) = k0 {
                        p.k0 = *k0;
                        p.k_cap = fsamp_core::design::default_k_cap(*k0, *dim, *alpha);
                    }
                    if let Some(c) = k_cap {
                        p.k_cap = *c;
                    }
                    hierarchical(&p, *dim, seed)?
                }
                DesignCmd::Uniform { n, half_width } => uniform_random(*n, *half_width, *dim, seed)?,
            };
            let path = out_path(cli, out, "design.txt")?;
            design.write(&path)?;
            println!("{} frequencies -> {}", design.len(), path.display());
        }
        Cmd::Measure { design, phantom, out } => {
            let d = SamplingDesign::read(design)?;
            let ph = load_phantom(phantom)?;
            let meas = Measurements::from_source(&d, &ph, "phantom", true)?;
            let path = out_path(cli, out, "measurements.csv")?;
            meas.write(&path)?;
            println!("{} measurements -> {}", meas.len(), path.display());
        }
        Cmd::Reconstruct(a) => reconstruct(cli, a)?,
        Cmd::Metrics {
            recon,
            phantom,
            design,
            grid,
            out,
        } => {
            let f = read_coefficients(recon)?;
            let ph = load_phantom(phantom)?;
            let d = match design {
                Some(p) => SamplingDesign::read(p)?,
                None => lowest_block(f.degree() as u64, 2)?,
            };
            let report = recovery_report(&f, &ph, &d, *grid)?;
            let path = out_path(cli, out, "metrics.json")?;
            std::fs::write(&path, report.to_json()?)?;
            println!("edge_discrepancy {} -> {}", report.edge_discrepancy, path.display());
        }
        Cmd::Witness(w) => {
            let dir = out_path(cli, &None, "")?;
            if let Some(k) = w.torus_k {
                let design = SamplingDesign::read(w.design.as_ref().expect("clap enforces --design"))?;
                let opts = TorusWitnessOptions {
                    delta: w.delta,
                    trials: w.trials,
                    seed,
                    ..Default::default()
                };
                let r = torus_witness(k, &design, &opts, &dir)?;
                println!("n = {}, torus L2/L1 = {:?}", r.n, r.torus_ratios.get("2"));
            } else {
                if w.group.is_empty() {
                    return Err(CliError::Input("--group or --torus-k is required".into()));
                }
                let r = group_witness(w.group.clone(), w.lambda_frac, w.delta, w.trials, seed, &dir)?;
                println!(
                    "|S| = {}, l1 = {:.6} (target {:.6}), l2/l1 = {:.6}",
                    r.greedy.n(),
                    r.ell1,
                    r.target_ell1,
                    r.ratios["2"]
                );
            }
        }
        Cmd::Experiment { spec, preset: name, rerun } => {
            if let Some(manifest) = rerun {
                let original = manifest_run_name(manifest)?;
                let dir = cli.out_dir.join(format!("{original}-rerun"));
                rerun_from_manifest(manifest, &dir)?;
                let check = verify_rerun(manifest, &dir.join("manifest.json"))?;
                println!("{}", serde_json::to_string_pretty(&check)?);
                if !check.passed() {
                    return Err(CliError::Mismatch(format!("fields {:?}", check.mismatched_fields)));
                }
                return Ok(());
            }
            let mut spec = match (spec, name) {
                (Some(p), _) => ExperimentSpec::load(p)?,
                (None, Some(n)) => preset(n)
                    .ok_or_else(|| CliError::Input(format!("unknown preset `{n}`, expected one of {PRESETS:?}")))?,
                (None, None) => return Err(CliError::Input("--spec, --preset or --rerun is required".into())),
            };
            if let Some(s) = cli.seed {
                spec.seed = s;
            }
            spec.out_dir = cli.out_dir.join(&spec.name);
            let m = run_experiment(&spec)?;
            println!("{}", spec.out_dir.join("manifest.json").display());
            if let Some(t) = m.timings_ms.get("solver") {
                println!("solver {t:.0} ms");
            }
        }
        Cmd::Compare { manifests, out } => {
            let table = compare_runs(manifests)?;
            let prefix = out_path(cli, &Some(out.clone()), "comparison")?;
            table.write(&prefix)?;
            print!("{}", table.to_csv());
        }
    }
    Ok(())
}

fn manifest_run_name(path: &Path) -> CliResult<String> {
    Ok(fsamp_cli::RunManifest::read(path)?.spec.name)
}

fn reconstruct(cli: &Cli, a: &ReconArgs) -> CliResult<()> {
    let meas = Measurements::read(&a.measurements, "file", !a.complex)?;
    let bound = meas.max_sup_norm() as usize;
    let path = out_path(cli, &a.out, "coefficients.csv")?;
    let f = match a.method {
        Method::Partial => partial_sum_recon(&meas, a.m.unwrap_or(bound))?,
        Method::Vdp => vdp_recon(&meas, a.m.unwrap_or(bound))?,
        Method::Bvmin => {
            let mut p = AdmmParams::new(a.m.unwrap_or((2 * bound).max(2)));
            p.adaptive_rho = !a.fixed_rho;
            if let Some(r) = a.rho {
                p.rho = r;
            }
            if let Some(n) = a.max_iter {
                p.max_iter = n;
            }
            if let Some(e) = a.eps {
                p.eps_primal = e;
                p.eps_dual = e;
            }
            if let Some(o) = a.oversample {
                p.oversample = o;
            }
            let (f, rep) = bv_min_admm(&meas, &p)?;
            write_coefficients(&path, &f)?;
            std::fs::write(out_path(cli, &None, "convergence.json")?, serde_json::to_string_pretty(&rep)?)?;
            if !rep.converged {
                return Err(CliError::NotConverged(format!(
                    "{} iterations, primal {:.3e}, dual {:.3e}; best iterate written to {}",
                    rep.iterations,
                    rep.primal_res,
                    rep.dual_res,
                    path.display()
                )));
            }
            println!("converged in {} iterations -> {}", rep.iterations, path.display());
            return Ok(());
        }
    };
    write_coefficients(&path, &f)?;
    println!("{}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
