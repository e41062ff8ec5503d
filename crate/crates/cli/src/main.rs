//! `anosov` — certification CLI for symmetric sets of unimodular
//! matrices: Schottky power search, projective-Anosov verdicts, limit-set
//! point clouds, JSJ graph validation and registering witnesses.

mod formats;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use anosov_core::cert::resolve_power_and_c;
use anosov_core::jsj::GraphOfGroups;
use anosov_core::words::ReducedWordIter;
use anosov_core::{
    certify_projective_anosov, certify_registering, check_well_positioned, estimate_c_epsilon,
    limit_map, ping_pong_base, validate_jsj, CEps, Error as CoreError, RunConfig, SchottkyData,
    SymmetricSet,
};

use formats::{
    read_json, write_json, CertificateFile, FailureInfo, RegisterFile, SetFile, ToolInfo,
};

#[derive(Parser)]
#[command(
    name = "anosov",
    version,
    about = "Certify projective Anosov Schottky data for symmetric matrix sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Configuration: defaults, overridden by --config (or $ANOSOV_CONFIG),
/// overridden by explicit flags.
#[derive(Args, Debug, Clone, Default)]
struct ConfigArgs {
    /// JSON run-configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerance on |det - 1| at matrix load
    #[arg(long)]
    det_tol: Option<f64>,
    /// Log spectral-gap tolerance for proximality
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Margin below which well-positionedness fails
    #[arg(long)]
    pos_tol: Option<f64>,
    /// Smallest acceptable transversality singular value
    #[arg(long)]
    transv_tol: Option<f64>,
    /// Norm-ratio constant in (0,1), or "estimate"
    #[arg(long)]
    c_eps: Option<String>,
    /// Word-length bound L for the word scans
    #[arg(long)]
    max_word_length: Option<usize>,
    /// Limit-map iteration depth
    #[arg(long)]
    depth: Option<usize>,
    /// Monte-Carlo samples per contraction condition
    #[arg(long)]
    samples: Option<u32>,
    /// Sampled prefix pairs for transversality/injectivity
    #[arg(long)]
    pairs: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Upper bound of the power scan
    #[arg(long)]
    n_max: Option<u32>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os("ANOSOV_CONFIG").map(PathBuf::from));
        let mut cfg = match path {
            Some(p) => read_json::<RunConfig>(&p)?.0,
            None => RunConfig::default(),
        };
        if let Some(v) = self.det_tol {
            cfg.det_tol = v;
        }
        if let Some(v) = self.gap_tol {
            cfg.gap_tol = v;
        }
        if let Some(v) = self.pos_tol {
            cfg.pos_tol = v;
        }
        if let Some(v) = self.transv_tol {
            cfg.transv_tol = v;
        }
        if let Some(s) = &self.c_eps {
            cfg.c_eps = if s == "estimate" {
                CEps::Estimate
            } else {
                CEps::Fixed(
                    s.parse::<f64>()
                        .with_context(|| format!("invalid c_eps {s:?}"))?,
                )
            };
        }
        if let Some(v) = self.max_word_length {
            cfg.max_word_length = v;
        }
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.pairs {
            cfg.pairs = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full certification pipeline and write a certificate
    Certify {
        /// Matrix-set JSON file
        #[arg(long)]
        input: PathBuf,
        /// Certificate path (default: <input>.cert.json)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Find the least power making the set and its dual epsilon-Schottky
    PowerSearch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Emit limit-map samples for all prefixes up to the word bound (CSV)
    LimitSet {
        #[arg(long)]
        input: PathBuf,
        /// CSV output path
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Estimate the norm-ratio constant on the certified power
    EstimateC {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Check the vertex-type rules of a JSJ graph of groups
    JsjValidate {
        /// Graph JSON file
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a registering subgroup from a graph plus matrix data
    Register {
        /// Registering JSON file
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

/// Stage name for errors that constitute a certified negative answer;
/// `None` marks input/configuration errors (exit 2).
fn failure_stage(e: &CoreError) -> Option<&'static str> {
    match e {
        CoreError::NotBiproximal { .. } => Some("biproximality"),
        CoreError::NotWellPositioned(_) => Some("well-positioned"),
        CoreError::ConditionFailed { .. } => Some("epsilon-proximality"),
        CoreError::PairTooClose { .. } => Some("epsilon-schottky"),
        CoreError::Exhausted { .. } => Some("power-search"),
        CoreError::BasePointNotFound { .. } => Some("ping-pong-base"),
        CoreError::Numerical(_) => Some("numerical"),
        _ => None,
    }
}

fn default_out(input: &Path, suffix: &str) -> PathBuf {
    let mut name = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    name.push_str(suffix);
    input.with_file_name(name)
}

fn cmd_certify(input: &Path, out: Option<PathBuf>, config: &ConfigArgs) -> Result<ExitCode> {
    let cfg = config.resolve()?;
    let (file, digest) = read_json::<SetFile>(input)?;
    let set = file.to_symmetric_set(cfg.det_tol)?;
    let out = out.unwrap_or_else(|| default_out(input, ".cert.json"));

    let start = Instant::now();
    let well_positioned = check_well_positioned(&set, cfg.gap_tol, cfg.pos_tol).ok();
    let mut certificate = CertificateFile {
        tool: ToolInfo::default(),
        input_digest: digest,
        config: cfg.clone(),
        well_positioned,
        power_search: None,
        anosov: None,
        registering: None,
        verdict: "fail".into(),
        failure: None,
        timing_ms: 0,
    };
    let code = match certify_projective_anosov(&set, &cfg) {
        Ok(verdict) => {
            let pass = verdict.pass();
            println!(
                "power {}, eps {:.6}, c_eps {:.6}{}, grade {:?}: {}",
                verdict.power,
                verdict.epsilon,
                verdict.c_eps_used,
                if verdict.c_eps_estimated {
                    " (estimated)"
                } else {
                    ""
                },
                verdict.grade,
                if pass { "PASS" } else { "FAIL" }
            );
            certificate.verdict = if pass { "pass" } else { "fail" }.into();
            certificate.anosov = Some(verdict);
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => match failure_stage(&e) {
            Some(stage) => {
                eprintln!("certified failure at {stage}: {e}");
                certificate.failure = Some(FailureInfo {
                    stage: stage.into(),
                    message: e.to_string(),
                });
                ExitCode::from(1)
            }
            None => return Err(e.into()),
        },
    };
    certificate.timing_ms = start.elapsed().as_millis() as u64;
    write_json(&out, &certificate)?;
    println!("certificate written to {}", out.display());
    Ok(code)
}

#[derive(serde::Serialize)]
struct PowerSearchFile {
    tool: ToolInfo,
    input_digest: String,
    config: RunConfig,
    c_eps_used: f64,
    c_eps_estimated: bool,
    result: anosov_core::PowerSearchResult,
}

fn cmd_power_search(input: &Path, out: Option<PathBuf>, config: &ConfigArgs) -> Result<ExitCode> {
    let cfg = config.resolve()?;
    let (file, digest) = read_json::<SetFile>(input)?;
    let set = file.to_symmetric_set(cfg.det_tol)?;
    match resolve_power_and_c(&set, &cfg) {
        Ok((result, c_eps, estimated)) => {
            println!(
                "minimal power n = {}, eps = {:.6}, c_eps = {:.6}{}",
                result.power,
                result.epsilon,
                c_eps,
                if estimated { " (estimated)" } else { "" }
            );
            if let Some(out) = out {
                write_json(
                    &out,
                    &PowerSearchFile {
                        tool: ToolInfo::default(),
                        input_digest: digest,
                        config: cfg,
                        c_eps_used: c_eps,
                        c_eps_estimated: estimated,
                        result,
                    },
                )?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => match failure_stage(&e) {
            Some(stage) => {
                eprintln!("certified failure at {stage}: {e}");
                Ok(ExitCode::from(1))
            }
            None => Err(e.into()),
        },
    }
}

fn cmd_limit_set(input: &Path, out: &Path, config: &ConfigArgs) -> Result<ExitCode> {
    let cfg = config.resolve()?;
    let (file, _) = read_json::<SetFile>(input)?;
    let set = file.to_symmetric_set(cfg.det_tol)?;
    let (result, _, _) = match resolve_power_and_c(&set, &cfg) {
        Ok(r) => r,
        Err(e) => match failure_stage(&e) {
            Some(stage) => {
                eprintln!("set is not certified ({stage}): {e}");
                return Ok(ExitCode::from(1));
            }
            None => return Err(e.into()),
        },
    };
    let data = SchottkyData::from_power_search(&set, &result, cfg.gap_tol)?;
    let base = ping_pong_base(&data, cfg.seed)?;

    let mut csv = String::new();
    csv.push_str("word,depth,depth_gap");
    for i in 0..set.dim() {
        csv.push_str(&format!(",xi_{i}"));
    }
    csv.push('\n');
    let mut rows = 0u64;
    for prefix in ReducedWordIter::new(set.rank(), cfg.max_word_length) {
        let depth = prefix.len();
        let sample = limit_map(&data, &base, &prefix, depth)?;
        csv.push_str(&format!(
            "{},{},{}",
            prefix.display(&set),
            depth,
            sample.depth_gap
        ));
        for x in sample.xi.rep().iter() {
            csv.push_str(&format!(",{x}"));
        }
        csv.push('\n');
        rows += 1;
    }
    std::fs::write(out, csv)
        .with_context(|| format!("cannot write point cloud to {}", out.display()))?;
    println!(
        "{rows} prefixes (length <= {}) written to {}",
        cfg.max_word_length,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(serde::Serialize)]
struct EstimateFile {
    tool: ToolInfo,
    input_digest: String,
    power: u32,
    epsilon: f64,
    estimate: anosov_core::CEpsEstimate,
}

fn cmd_estimate_c(input: &Path, out: Option<PathBuf>, config: &ConfigArgs) -> Result<ExitCode> {
    let cfg = config.resolve()?;
    let (file, digest) = read_json::<SetFile>(input)?;
    let set = file.to_symmetric_set(cfg.det_tol)?;
    match resolve_power_and_c(&set, &cfg) {
        Ok((result, _, _)) => {
            let estimate = estimate_c_epsilon(&set.powered(result.power), cfg.max_word_length)?;
            println!(
                "c_hat = {:.9} at power {} (extremal word {}, {} words scanned)",
                estimate.c_hat, result.power, estimate.extremal_word, estimate.words_scanned
            );
            if let Some(out) = out {
                write_json(
                    &out,
                    &EstimateFile {
                        tool: ToolInfo::default(),
                        input_digest: digest,
                        power: result.power,
                        epsilon: result.epsilon,
                        estimate,
                    },
                )?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => match failure_stage(&e) {
            Some(stage) => {
                eprintln!("set is not certified ({stage}): {e}");
                Ok(ExitCode::from(1))
            }
            None => Err(e.into()),
        },
    }
}

fn cmd_jsj_validate(input: &Path, out: Option<PathBuf>) -> Result<ExitCode> {
    let (graph, _) = read_json::<GraphOfGroups>(input)?;
    let verdict = validate_jsj(&graph);
    if verdict.valid {
        println!("valid JSJ graph: {} vertices, {} edges", graph.vertices.len(), graph.edges.len());
    } else {
        for v in &verdict.violations {
            eprintln!("violation: {v}");
        }
    }
    let valid = verdict.valid;
    if let Some(out) = out {
        write_json(&out, &verdict)?;
    }
    Ok(if valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_register(input: &Path, out: Option<PathBuf>, config: &ConfigArgs) -> Result<ExitCode> {
    let cfg = config.resolve()?;
    let (file, digest) = read_json::<RegisterFile>(input)?;
    let spec = file.to_spec(cfg.det_tol)?;
    let graph_verdict = validate_jsj(&spec.graph);
    if !graph_verdict.valid {
        for v in &graph_verdict.violations {
            eprintln!("graph violation: {v}");
        }
        anyhow::bail!("input graph is not a valid JSJ shape");
    }
    let out = out.unwrap_or_else(|| default_out(input, ".cert.json"));

    let start = Instant::now();
    let mut certificate = CertificateFile {
        tool: ToolInfo::default(),
        input_digest: digest,
        config: cfg.clone(),
        well_positioned: None,
        power_search: None,
        anosov: None,
        registering: None,
        verdict: "fail".into(),
        failure: None,
        timing_ms: 0,
    };
    let code = match certify_registering(&spec, &cfg) {
        Ok((verdict, report)) => {
            let pass = verdict.pass();
            println!(
                "registering subgroup <{}> certified at power {}: {}",
                report.subgroup_generators.join(", "),
                report.power,
                if pass { "PASS" } else { "FAIL" }
            );
            certificate.verdict = if pass { "pass" } else { "fail" }.into();
            certificate.anosov = Some(verdict);
            certificate.registering = Some(report);
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => match failure_stage(&e) {
            Some(stage) => {
                eprintln!("certified failure at {stage}: {e}");
                certificate.failure = Some(FailureInfo {
                    stage: stage.into(),
                    message: e.to_string(),
                });
                ExitCode::from(1)
            }
            None => return Err(e.into()),
        },
    };
    certificate.timing_ms = start.elapsed().as_millis() as u64;
    write_json(&out, &certificate)?;
    println!("certificate written to {}", out.display());
    Ok(code)
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Certify { input, out, config } => cmd_certify(input, out.clone(), config),
        Command::PowerSearch { input, out, config } => cmd_power_search(input, out.clone(), config),
        Command::LimitSet { input, out, config } => cmd_limit_set(input, out, config),
        Command::EstimateC { input, out, config } => cmd_estimate_c(input, out.clone(), config),
        Command::JsjValidate { input, out } => cmd_jsj_validate(input, out.clone()),
        Command::Register { input, out, config } => cmd_register(input, out.clone(), config),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
