//! Experiment specs, presets and the staged pipeline.
//!
//! Seeds: every random draw in a run comes from the root `seed` of the
//! spec. The design generator is seeded with the root seed itself (its
//! ChaCha8 stream layout is fixed by `fsamp-core`), so a spec with seed 7
//! draws the same frequencies as `fsamp design ... --seed 7`. The registry
//! in the manifest lists each consumer with the seed it received.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fsamp_core::fourier::{evaluate_on_grid, io as fio, GridField};
use fsamp_core::metrics::{recovery_report, EdgeReport, DEFAULT_METRIC_GRID};
use fsamp_core::recon::{partial_sum_recon, vdp_recon};
use fsamp_core::{
    bv_min_admm, hierarchical, lowest_block, uniform_random, AdmmParams, HierarchicalParams, Measurements, Phantom,
    SamplingDesign, Scheme, TrigPolynomial,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_file, sha256_hex, ArtifactRecord, RunManifest, REPORT_TOLERANCE};

/// Root seed of the built-in experiments.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum DesignSpec {
    LowestBlock {
        m: u64,
    },
    Hierarchical {
        n_target: usize,
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default)]
        k0: Option<u32>,
        #[serde(default)]
        k_cap: Option<u32>,
    },
    UniformRandom {
        n_target: usize,
        half_width: u64,
    },
    /// A design file written by `fsamp design`.
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

/// Reconstruction method. Unset degrees are resolved from the design:
/// the largest sampled `|xi|_inf` for the linear methods and twice that
/// for BV minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MethodSpec {
    PartialSum {
        #[serde(default)]
        m: Option<usize>,
    },
    Vdp {
        #[serde(default)]
        m: Option<usize>,
    },
    Bvmin {
        #[serde(default)]
        degree: Option<usize>,
        #[serde(default)]
        rho: Option<f64>,
        #[serde(default)]
        max_iter: Option<usize>,
        #[serde(default)]
        eps: Option<f64>,
        #[serde(default)]
        oversample: Option<usize>,
        #[serde(default)]
        adaptive_rho: Option<bool>,
    },
}

impl MethodSpec {
    pub fn bvmin() -> Self {
        MethodSpec::Bvmin {
            degree: None,
            rho: None,
            max_iter: None,
            eps: None,
            oversample: None,
            adaptive_rho: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    /// Phantom JSON file; the built-in phantom when absent.
    #[serde(default)]
    pub phantom: Option<PathBuf>,
    pub design: DesignSpec,
    pub method: MethodSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub metric_grid: usize,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_grid() -> usize {
    DEFAULT_METRIC_GRID
}

fn default_out() -> PathBuf {
    PathBuf::from(".")
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 6] = ["exp1", "exp2", "exp3", "exp4", "exp5", "exp4-1089"];

/// The built-in experiments at n = 289 (and 1089 for `exp4-1089`).
///
/// Hierarchical designs cap the bands at `k = 5` (radius 64) and the
/// uniform design draws from `|xi|_inf <= 64`; the solver degree must be at
/// least twice the largest sampled frequency, so wider designs do not fit
/// a practical grid.
pub fn preset(name: &str) -> Option<ExperimentSpec> {
    let (design, method) = match name {
        "exp1" => (DesignSpec::LowestBlock { m: 8 }, MethodSpec::PartialSum { m: Some(8) }),
        "exp2" => (DesignSpec::LowestBlock { m: 8 }, MethodSpec::Vdp { m: Some(8) }),
        "exp3" => (
            DesignSpec::LowestBlock { m: 8 },
            MethodSpec::Bvmin {
                degree: Some(32),
                rho: None,
                max_iter: None,
                eps: None,
                oversample: None,
                adaptive_rho: None,
            },
        ),
        "exp4" | "exp4-1089" => (
            DesignSpec::Hierarchical {
                n_target: if name == "exp4" { 289 } else { 1089 },
                alpha: 1.0,
                k0: None,
                k_cap: Some(5),
            },
            MethodSpec::bvmin(),
        ),
        "exp5" => (
            DesignSpec::UniformRandom {
                n_target: 289,
                half_width: 64,
            },
            MethodSpec::bvmin(),
        ),
        _ => return None,
    };
    Some(ExperimentSpec {
        name: name.to_string(),
        phantom: None,
        design,
        method,
        seed: DEFAULT_SEED,
        metric_grid: DEFAULT_METRIC_GRID,
        out_dir: default_out(),
    })
}

/// Concrete parameters of a run, with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub phantom: Option<PathBuf>,
    pub design: ResolvedDesign,
    pub method: ResolvedMethod,
    pub metric_grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ResolvedDesign {
    Generated { dim: usize, scheme: Scheme, seed: u64 },
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ResolvedMethod {
    PartialSum { m: usize },
    Vdp { m: usize },
    Bvmin(AdmmParams),
}

impl ResolvedMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ResolvedMethod::PartialSum { .. } => "partial_sum",
            ResolvedMethod::Vdp { .. } => "vdp",
            ResolvedMethod::Bvmin(_) => "bvmin",
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            ResolvedMethod::PartialSum { m } | ResolvedMethod::Vdp { m } => *m,
            ResolvedMethod::Bvmin(p) => p.degree,
        }
    }
}

/// Solver outcome kept in the report; wall time lives in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub converged: bool,
    pub final_objective: f64,
    pub primal_res: f64,
    pub dual_res: f64,
    pub rho_final: f64,
    pub best_iteration: usize,
    pub grid_points: usize,
}

/// Contents of `report.json`. Deterministic given the resolved parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub n: usize,
    pub scheme: String,
    pub method: String,
    pub degree: usize,
    pub max_sampled_frequency: u64,
    /// How far the reconstruction leaves the truth's value range on the
    /// metric grid.
    pub overshoot: f64,
    pub metrics: EdgeReport,
    pub solver: Option<SolverSummary>,
}

pub(crate) fn load_phantom(path: Option<&Path>) -> CliResult<Phantom> {
    match path {
        Some(p) => Ok(Phantom::load(p)?),
        None => Ok(Phantom::standard()),
    }
}

fn phantom_hash(path: Option<&Path>) -> CliResult<String> {
    // Hash the canonical JSON so the built-in phantom and an identical file
    // compare equal.
    Ok(sha256_hex(load_phantom(path)?.to_json()?.as_bytes()))
}

pub fn resolve(spec: &ExperimentSpec) -> CliResult<Resolved> {
    if spec.metric_grid == 0 {
        return Err(CliError::Input("metric grid must be positive".into()));
    }
    let design = match &spec.design {
        DesignSpec::LowestBlock { m } => ResolvedDesign::Generated {
            dim: 2,
            scheme: Scheme::LowestBlock { m: *m },
            seed: spec.seed,
        },
        DesignSpec::Hierarchical {
            n_target,
            alpha,
            k0,
            k_cap,
        } => {
            let mut p = HierarchicalParams::with_defaults(*n_target, 2, *alpha);
            if let Some(k0) = k0 {
                p.k0 = *k0;
                p.k_cap = fsamp_core::design::default_k_cap(*k0, 2, *alpha);
            }
            if let Some(c) = k_cap {
                p.k_cap = *c;
            }
            ResolvedDesign::Generated {
                dim: 2,
                scheme: Scheme::Hierarchical(p),
                seed: spec.seed,
            }
        }
        DesignSpec::UniformRandom { n_target, half_width } => ResolvedDesign::Generated {
            dim: 2,
            scheme: Scheme::UniformRandom {
                half_width: *half_width,
                n_target: *n_target,
            },
            seed: spec.seed,
        },
        DesignSpec::File { path } => ResolvedDesign::File { path: path.clone() },
    };
    // The method defaults need the largest sampled frequency.
    let bound = build_design(&design)?.max_sup_norm() as usize;
    let method = match &spec.method {
        MethodSpec::PartialSum { m } => ResolvedMethod::PartialSum { m: m.unwrap_or(bound) },
        MethodSpec::Vdp { m } => ResolvedMethod::Vdp { m: m.unwrap_or(bound) },
        MethodSpec::Bvmin {
            degree,
            rho,
            max_iter,
            eps,
            oversample,
            adaptive_rho,
        } => {
            let mut p = AdmmParams::new(degree.unwrap_or((2 * bound).max(2)));
            if let Some(r) = rho {
                p.rho = *r;
            }
            if let Some(n) = max_iter {
                p.max_iter = *n;
            }
            if let Some(e) = eps {
                p.eps_primal = *e;
                p.eps_dual = *e;
            }
            if let Some(o) = oversample {
                p.oversample = *o;
            }
            if let Some(a) = adaptive_rho {
                p.adaptive_rho = *a;
            }
            ResolvedMethod::Bvmin(p)
        }
    };
    Ok(Resolved {
        phantom: spec.phantom.clone(),
        design,
        method,
        metric_grid: spec.metric_grid,
    })
}

fn build_design(d: &ResolvedDesign) -> CliResult<SamplingDesign> {
    let design = match d {
        ResolvedDesign::Generated { dim, scheme, seed } => match scheme {
            Scheme::LowestBlock { m } => lowest_block(*m, *dim)?,
            Scheme::Hierarchical(p) => hierarchical(p, *dim, *seed)?,
            Scheme::UniformRandom { half_width, n_target } => uniform_random(*n_target, *half_width, *dim, *seed)?,
        },
        ResolvedDesign::File { path } => SamplingDesign::read(path)?,
    };
    if design.is_empty() {
        return Err(CliError::Input("design has no frequencies".into()));
    }
    if design.dim() != 2 {
        return Err(CliError::Input(format!("experiments run on the 2-torus, design has d = {}", design.dim())));
    }
    Ok(design)
}

fn reconstruct(method: &ResolvedMethod, meas: &Measurements) -> CliResult<(TrigPolynomial, Option<fsamp_core::ConvergenceReport>)> {
    Ok(match method {
        ResolvedMethod::PartialSum { m } => (partial_sum_recon(meas, *m)?, None),
        ResolvedMethod::Vdp { m } => (vdp_recon(meas, *m)?, None),
        ResolvedMethod::Bvmin(p) => {
            let (f, rep) = bv_min_admm(meas, p)?;
            (f, Some(rep))
        }
    })
}

fn value_range(f: &GridField) -> (f64, f64) {
    f.real_parts()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

/// Collects artifacts and timings while the stages run.
struct Recorder {
    dir: PathBuf,
    artifacts: BTreeMap<String, ArtifactRecord>,
    timings: BTreeMap<String, f64>,
}

impl Recorder {
    fn record(&mut self, key: &str, file: &str) -> CliResult<()> {
        let path = self.dir.join(file);
        let (sha256, bytes) = sha256_file(&path)?;
        self.artifacts.insert(
            key.to_string(),
            ArtifactRecord {
                path: PathBuf::from(file),
                sha256,
                bytes,
            },
        );
        Ok(())
    }

    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce(&mut Self) -> CliResult<T>) -> CliResult<T> {
        let t0 = Instant::now();
        let out = f(self).map_err(CliError::at(stage));
        self.timings.insert(stage.to_string(), t0.elapsed().as_secs_f64() * 1e3);
        out
    }
}

/// Resolve `spec` and run it into `spec.out_dir`.
pub fn run_experiment(spec: &ExperimentSpec) -> CliResult<RunManifest> {
    let resolved = resolve(spec).map_err(CliError::at("resolve"))?;
    execute(spec, &resolved, &spec.out_dir)
}

/// Run fully resolved parameters into `dir`. On failure the manifest is
/// still written, naming the failed stage and the artifacts produced so
/// far.
pub fn execute(spec: &ExperimentSpec, resolved: &Resolved, dir: &Path) -> CliResult<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::at("setup")(e.into()))?;
    let mut rec = Recorder {
        dir: dir.to_path_buf(),
        artifacts: BTreeMap::new(),
        timings: BTreeMap::new(),
    };
    let outcome = stages(spec, resolved, &mut rec);
    let mut inputs = BTreeMap::new();
    if let Ok(h) = phantom_hash(resolved.phantom.as_deref()) {
        inputs.insert("phantom".to_string(), h);
    }
    if let ResolvedDesign::File { path } = &resolved.design {
        if let Ok((h, _)) = sha256_file(path) {
            inputs.insert("design".to_string(), h);
        }
    }
    let mut seeds = BTreeMap::from([("root".to_string(), spec.seed)]);
    if let ResolvedDesign::Generated { seed, .. } = &resolved.design {
        seeds.insert("design".to_string(), *seed);
    }
    let manifest = RunManifest {
        tool: "fsamp".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        spec: spec.clone(),
        resolved: resolved.clone(),
        seeds,
        inputs,
        artifacts: rec.artifacts,
        timings_ms: rec.timings,
        tolerance: REPORT_TOLERANCE,
        failed_stage: outcome.as_ref().err().and_then(|e| e.stage()).map(str::to_string),
    };
    manifest.write(&dir.join("manifest.json")).map_err(CliError::at("manifest"))?;
    outcome.map(|_| manifest)
}

fn stages(spec: &ExperimentSpec, resolved: &Resolved, rec: &mut Recorder) -> CliResult<RunReport> {
    let phantom = rec.time("phantom", |_| load_phantom(resolved.phantom.as_deref()))?;
    let design = rec.time("design", |r| {
        let d = build_design(&resolved.design)?;
        d.write(&r.dir.join("design.txt"))?;
        r.record("design", "design.txt")?;
        Ok(d)
    })?;
    let meas = rec.time("measure", |r| {
        let m = Measurements::from_source(&design, &phantom, "phantom", true)?;
        if m.len() != design.len() {
            return Err(CliError::Input(format!("{} measurements for {} frequencies", m.len(), design.len())));
        }
        m.write(&r.dir.join("measurements.csv"))?;
        r.record("measurements", "measurements.csv")?;
        Ok(m)
    })?;
    let (recon, conv) = rec.time("reconstruct", |r| {
        let (f, conv) = reconstruct(&resolved.method, &meas)?;
        fio::write_coefficients(&r.dir.join("coefficients.csv"), &f)?;
        r.record("coefficients", "coefficients.csv")?;
        if let Some(c) = &conv {
            let mut c = c.clone();
            r.timings.insert("solver".into(), c.wall_time_ms);
            c.wall_time_ms = 0.0;
            std::fs::write(r.dir.join("convergence.json"), serde_json::to_string_pretty(&c)?)?;
            r.record("convergence", "convergence.json")?;
        }
        Ok((f, conv))
    })?;
    let g = resolved.metric_grid;
    let overshoot = rec.time("render", |r| {
        let truth = phantom.render(g)?;
        let field = evaluate_on_grid(&recon, g)?;
        let (tlo, thi) = value_range(&truth);
        let (rlo, rhi) = value_range(&field);
        let range = Some((tlo.min(rlo), thi.max(rhi)));
        fio::write_pgm(&r.dir.join("truth.pgm"), &truth, range)?;
        fio::write_pgm(&r.dir.join("recon.pgm"), &field, range)?;
        for (key, file) in [
            ("truth_image", "truth.pgm"),
            ("truth_image_range", "truth.pgm.json"),
            ("recon_image", "recon.pgm"),
            ("recon_image_range", "recon.pgm.json"),
        ] {
            r.record(key, file)?;
        }
        Ok((rhi - thi).max(tlo - rlo).max(0.0))
    })?;
    rec.time("metrics", |r| {
        let metrics = recovery_report(&recon, &phantom, &design, g)?;
        let report = RunReport {
            name: spec.name.clone(),
            n: design.len(),
            scheme: design.scheme().name().to_string(),
            method: resolved.method.name().to_string(),
            degree: recon.degree(),
            max_sampled_frequency: design.max_sup_norm(),
            overshoot,
            metrics,
            solver: conv.map(|c| SolverSummary {
                iterations: c.iterations,
                converged: c.converged,
                final_objective: c.final_objective,
                primal_res: c.primal_res,
                dual_res: c.dual_res,
                rho_final: c.rho_final,
                best_iteration: c.best_iteration,
                grid_points: c.grid_points,
            }),
        };
        std::fs::write(r.dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        r.record("report", "report.json")?;
        Ok(report)
    })
}
