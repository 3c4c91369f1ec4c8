//! Command-line front end.
//!
//! Every subcommand writes CSV to `--output` (or stdout). Output starts with
//! `#` comment lines holding the subcommand, the full configuration as JSON
//! and the master seed, so a run can be repeated from its header alone.

use crate::airs::{capacity, db_to_linear, rate_under_policy, required_snr, DistPolicy, MetricKind};
use crate::analysis::{de_threshold, run_fer, DeConfig, DeEnsemble, FerConfig, Shaping, StopRule};
use crate::code::NbLdpcCode;
use crate::error::{Error, Result};
use crate::galois::Field;
use crate::mapping::{mb_fit, Constellation};
use crate::pas::{CodedModulation, PasConfig, RateTarget, UniformSystem};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser, Debug)]
#[command(name = "nbpas", version, about = "NB-LDPC coded modulation with probabilistic amplitude shaping")]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Master seed for code construction and simulation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep SMD/BMD rates and capacity over an SNR grid.
    Rates(RatesArgs),
    /// SNR at which a rate reaches a target spectral efficiency.
    RequiredSnr(RequiredSnrArgs),
    /// Maxwell–Boltzmann distribution with a given amplitude entropy.
    MbFit(MbFitArgs),
    /// Construct a code and save it in the q-ary alist format.
    Codegen(CodegenArgs),
    /// Density-evolution threshold from an experiment config.
    DeThreshold(ConfigArgs),
    /// Frame error rate simulation from an experiment config.
    Fer(ConfigArgs),
}

/// Channel input distribution for the rate subcommands.
#[derive(Args, Debug, Clone, Serialize)]
#[group(multiple = false)]
pub struct ShapingArgs {
    /// Uniform input (the default).
    #[arg(long)]
    pub uniform: bool,
    /// Maxwell–Boltzmann input with this amplitude entropy H(A).
    #[arg(long)]
    pub entropy: Option<f64>,
    /// PAS input for code rate R_c: H(A) = rate - 1 + (1 - R_c)·m.
    #[arg(long)]
    pub code_rate: Option<f64>,
    /// Maxwell–Boltzmann input with the rate-maximizing ν at each SNR.
    #[arg(long)]
    pub optimize_nu: bool,
}

impl ShapingArgs {
    fn policy(&self, rate: Option<f64>, m: u32) -> Result<DistPolicy> {
        if let Some(h) = self.entropy {
            return Ok(DistPolicy::FixedEntropy(h));
        }
        if let Some(r_c) = self.code_rate {
            let eta = rate.ok_or_else(|| Error::Config("--code-rate needs --rate".into()))?;
            return Ok(DistPolicy::pas(eta, r_c, m));
        }
        if self.optimize_nu {
            return Ok(DistPolicy::OptimizedNu);
        }
        Ok(DistPolicy::Uniform)
    }
}

fn policy_name(p: DistPolicy) -> String {
    match p {
        DistPolicy::Uniform => "uniform".into(),
        DistPolicy::FixedEntropy(h) => format!("mb-h{h}"),
        DistPolicy::OptimizedNu => "mb-opt".into(),
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RatesArgs {
    /// Bits per ASK symbol (8-ASK = 3).
    #[arg(long)]
    pub ask: u32,
    /// Explicit SNR grid in dB.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub snr_db: Vec<f64>,
    /// Grid start (dB), used with --to and --step.
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Transmission rate, needed with --code-rate.
    #[arg(long)]
    pub rate: Option<f64>,
    #[command(flatten)]
    pub shaping: ShapingArgs,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RatesArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        let mut g = self.snr_db.clone();
        if let (Some(a), Some(b)) = (self.from, self.to) {
            if !(self.step > 0.0) {
                return Err(Error::Config("--step must be positive".into()));
            }
            let n = ((b - a) / self.step + 1e-9).floor();
            if n >= 0.0 {
                g.extend((0..=n as usize).map(|i| a + i as f64 * self.step));
            }
        } else if self.from.is_some() || self.to.is_some() {
            return Err(Error::Config("--from and --to go together".into()));
        }
        validate_grid(&g)?;
        Ok(g)
    }
}

fn validate_grid(g: &[f64]) -> Result<()> {
    if g.is_empty() {
        return Err(Error::Config("empty SNR grid".into()));
    }
    if let Some(x) = g.iter().find(|x| !x.is_finite()) {
        return Err(Error::Config(format!("non-finite SNR {x}")));
    }
    Ok(())
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RequiredSnrArgs {
    /// smd, bmd, or both when omitted.
    #[arg(long)]
    pub metric: Option<MetricKind>,
    /// Target rate in bits per channel use.
    #[arg(long)]
    pub rate: f64,
    #[arg(long)]
    pub ask: u32,
    #[command(flatten)]
    pub shaping: ShapingArgs,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MbFitArgs {
    #[arg(long)]
    pub ask: u32,
    /// Target amplitude entropy H(A) in bits.
    #[arg(long)]
    pub entropy: f64,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CodegenArgs {
    /// Field GF(2^p).
    #[arg(long)]
    pub field: u32,
    /// Primitive polynomial (default table entry when omitted).
    #[arg(long)]
    pub poly: Option<u32>,
    /// Code length in symbols.
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub check_degree: usize,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Signaling of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Uniform,
    Pas,
}

/// Where the code comes from: constructed from parameters, or loaded from a file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_degree: Option<usize>,
    /// Construction seed; defaults to the master seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Code file, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

/// PAS rate target: exactly one of the two.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matcher_rate: Option<f64>,
}

fn default_max_iter() -> usize {
    crate::decoder::DEFAULT_MAX_ITER
}

/// The JSON experiment description used by `de-threshold` and `fer`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub metric: MetricKind,
    /// Bits per ASK symbol.
    pub ask_bits: u32,
    /// Field GF(2^p).
    pub field_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_poly: Option<u32>,
    pub code: CodeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shaping: Option<ShapingSpec>,
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub de: DeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn field(&self) -> Result<Arc<Field>> {
        Ok(Arc::new(Field::new(self.field_bits, self.field_poly)?))
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::ask(self.ask_bits)
    }

    fn rate_target(&self) -> Result<Option<RateTarget>> {
        match (self.mode, self.shaping) {
            (Mode::Uniform, None) => Ok(None),
            (Mode::Uniform, Some(_)) => Err(Error::Config("uniform mode takes no shaping target".into())),
            (Mode::Pas, None) => Err(Error::Config("PAS mode needs a shaping target".into())),
            (Mode::Pas, Some(s)) => match (s.eta, s.matcher_rate) {
                (Some(e), None) => Ok(Some(RateTarget::Eta(e))),
                (None, Some(r)) => Ok(Some(RateTarget::MatcherRate(r))),
                _ => Err(Error::Config("shaping needs exactly one of eta and matcher_rate".into())),
            },
        }
    }

    /// Constructs or loads the code.
    pub fn build_code(&self, base: &Path, master_seed: u64) -> Result<Arc<NbLdpcCode>> {
        let spec = &self.code;
        let code = match &spec.file {
            Some(file) => {
                if spec.length.is_some() || spec.seed.is_some() {
                    return Err(Error::Config("a code file excludes length and seed".into()));
                }
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let code = NbLdpcCode::from_alist(&text)?;
                if code.field().bits() != self.field_bits {
                    return Err(Error::Config(format!(
                        "code file is over GF(2^{}), config says GF(2^{})",
                        code.field().bits(),
                        self.field_bits
                    )));
                }
                if let Some(dc) = spec.check_degree {
                    if dc != code.check_degree() {
                        return Err(Error::Config(format!(
                            "code file has check degree {}, config says {dc}",
                            code.check_degree()
                        )));
                    }
                }
                code
            }
            None => {
                let (n, dc) = match (spec.length, spec.check_degree) {
                    (Some(n), Some(dc)) => (n, dc),
                    _ => return Err(Error::Config("code needs length and check_degree, or a file".into())),
                };
                NbLdpcCode::construct(self.field()?, n, dc, spec.seed.unwrap_or(master_seed))?
            }
        };
        Ok(Arc::new(code))
    }

    /// Builds the coded modulation scheme and checks the metric against it.
    pub fn build_system(&self, base: &Path, master_seed: u64) -> Result<Box<dyn CodedModulation>> {
        let target = self.rate_target()?;
        let c = self.constellation()?;
        let code = self.build_code(base, master_seed)?;
        let sys: Box<dyn CodedModulation> = match target {
            None => Box::new(UniformSystem::new(c, code)?),
            Some(t) => Box::new(PasConfig::build(c, code, t)?),
        };
        sys.supports(self.metric)?;
        Ok(sys)
    }

    /// The ensemble analyzed by density evolution.
    pub fn ensemble(&self) -> Result<DeEnsemble> {
        let target = self.rate_target()?;
        let c = self.constellation()?;
        let dc = self
            .code
            .check_degree
            .ok_or_else(|| Error::Config("density evolution needs code.check_degree".into()))?;
        let shaping = match target {
            None => Shaping::Uniform,
            Some(RateTarget::MatcherRate(r)) => Shaping::Pas { matcher_rate: r },
            Some(RateTarget::Eta(eta)) => {
                let r_c = 1.0 - 2.0 / dc as f64;
                Shaping::Pas {
                    matcher_rate: eta - 1.0 + (1.0 - r_c) * c.bits() as f64,
                }
            }
        };
        Ok(DeEnsemble {
            field: self.field()?,
            check_degree: dc,
            constellation: c,
            shaping,
            metric: self.metric,
        })
    }
}

/// CSV document with the reproducibility header.
struct Report {
    text: String,
    columns: Option<String>,
}

impl Report {
    fn new(command: &str, config_json: &str, seed: Option<u64>, columns: &str) -> Report {
        let mut text = String::new();
        let _ = writeln!(text, "# nbpas {} {command}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(text, "# config: {config_json}");
        match seed {
            Some(s) => {
                let _ = writeln!(text, "# seed: {s}");
            }
            None => text.push_str("# seed: none\n"),
        }
        Report {
            text,
            columns: Some(columns.to_string()),
        }
    }

    fn finish_header(&mut self) {
        if let Some(c) = self.columns.take() {
            self.text.push_str(&c);
            self.text.push('\n');
        }
    }

    /// Extra header line; only valid before the first row.
    fn comment(&mut self, line: &str) {
        debug_assert!(self.columns.is_some());
        let _ = writeln!(self.text, "# {line}");
    }

    fn row(&mut self, fields: &[String]) {
        self.finish_header();
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    fn write(mut self, output: Option<&Path>) -> Result<()> {
        self.finish_header();
        match output {
            Some(p) => std::fs::write(p, &self.text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.text.as_bytes())?;
                Ok(out.flush()?)
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("arguments serialize")
}

const DEFAULT_SEED: u64 = 1;

fn rates(args: &RatesArgs) -> Result<Report> {
    let grid = args.grid()?;
    let c = Constellation::ask(args.ask)?;
    let policy = args.shaping.policy(args.rate, args.ask)?;
    let mut rep = Report::new("rates", &json(args), None, "snr_db,smd,bmd,capacity");
    rep.comment(&format!("distribution: {}", policy_name(policy)));
    for &s in &grid {
        let smd = rate_under_policy(MetricKind::Smd, s, &c, policy)?;
        let bmd = rate_under_policy(MetricKind::Bmd, s, &c, policy)?;
        let cap = capacity(db_to_linear(s))?;
        rep.row(&[s.to_string(), format!("{smd:.6}"), format!("{bmd:.6}"), format!("{cap:.6}")]);
    }
    Ok(rep)
}

fn required(args: &RequiredSnrArgs) -> Result<Report> {
    let c = Constellation::ask(args.ask)?;
    let policy = args.shaping.policy(Some(args.rate), args.ask)?;
    let metrics = match args.metric {
        Some(m) => vec![m],
        None => vec![MetricKind::Bmd, MetricKind::Smd],
    };
    let mut rep = Report::new(
        "required-snr",
        &json(args),
        None,
        "metric,rate,ask_bits,distribution,snr_db",
    );
    for m in metrics {
        let s = required_snr(m, args.rate, &c, policy)?;
        rep.row(&[
            m.to_string(),
            args.rate.to_string(),
            args.ask.to_string(),
            policy_name(policy),
            format!("{s:.4}"),
        ]);
    }
    Ok(rep)
}

fn mbfit(args: &MbFitArgs) -> Result<Report> {
    let c = Constellation::ask(args.ask)?;
    let d = mb_fit(&c, args.entropy)?;
    let mut rep = Report::new("mb-fit", &json(args), None, "amplitude,probability");
    rep.comment(&format!("nu: {}", d.nu));
    rep.comment(&format!("entropy: {}", d.entropy_amp));
    rep.comment(&format!("scale: {}", d.scale));
    for (a, p) in c.amplitudes().iter().zip(&d.p_amp) {
        rep.row(&[a.to_string(), p.to_string()]);
    }
    Ok(rep)
}

fn codegen(args: &CodegenArgs, seed: u64) -> Result<Report> {
    let field = Arc::new(Field::new(args.field, args.poly)?);
    let code = NbLdpcCode::construct(field, args.length, args.check_degree, seed)?;
    let mut text = String::new();
    let _ = writeln!(text, "# nbpas {} codegen", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "# config: {}", json(args));
    let _ = writeln!(text, "# seed: {seed}");
    let _ = writeln!(
        text,
        "# rank {} of {} checks, girth {}",
        code.rank(),
        code.checks(),
        code.girth()
    );
    text.push_str(&code.to_alist());
    Ok(Report { text, columns: None })
}

fn config_base(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Config JSON recorded in headers: as parsed, with the effective seed filled in.
fn resolved(cfg: &ExperimentConfig, seed: u64) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.seed = Some(seed);
    c.output = None;
    c
}

fn de(args: &ConfigArgs, seed_flag: Option<u64>) -> Result<(Report, Option<PathBuf>)> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let seed = seed_flag.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let ens = cfg.ensemble()?;
    cfg.de.validate()?;
    let limit = ens.rate_limit_db()?;
    let t = de_threshold(&ens, &cfg.de, seed)?;
    let mut rep = Report::new(
        "de-threshold",
        &resolved(&cfg, seed).to_json(),
        Some(seed),
        "field_bits,ask_bits,check_degree,mode,metric,eta,rate_limit_db,threshold_db,lo_db,hi_db",
    );
    for r in &t.runs {
        rep.comment(&format!(
            "run {} dB: converged={} iterations={} error={:e}",
            r.snr_db, r.converged, r.iterations, r.error
        ));
    }
    rep.row(&[
        cfg.field_bits.to_string(),
        cfg.ask_bits.to_string(),
        ens.check_degree.to_string(),
        json(&cfg.mode).trim_matches('"').to_string(),
        cfg.metric.to_string(),
        format!("{:.6}", ens.eta()),
        format!("{limit:.4}"),
        format!("{:.4}", t.snr_db),
        format!("{:.4}", t.lo),
        format!("{:.4}", t.hi),
    ]);
    Ok((rep, cfg.output.clone().map(|o| config_base(&args.config).join(o))))
}

fn fer(args: &ConfigArgs, seed_flag: Option<u64>) -> Result<(Report, Option<PathBuf>)> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let seed = seed_flag.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    validate_grid(&cfg.snr_db)?;
    let sys = cfg.build_system(&config_base(&args.config), seed)?;
    let fc = FerConfig {
        metric: cfg.metric,
        stop: cfg.stop,
        max_iter: cfg.max_iter,
        seed,
    };
    let points = run_fer(sys.as_ref(), &cfg.snr_db, &fc)?;
    let mut rep = Report::new(
        "fer",
        &resolved(&cfg, seed).to_json(),
        Some(seed),
        "snr_db,frames,errors,fer,ci_low,ci_high",
    );
    rep.comment(&format!(
        "channel uses {}, info bits per frame {}",
        sys.channel_uses(),
        sys.info_bits_per_frame()
    ));
    for p in &points {
        rep.row(&[
            p.snr_db.to_string(),
            p.frames.to_string(),
            p.errors.to_string(),
            format!("{:e}", p.fer),
            format!("{:e}", p.ci_low),
            format!("{:e}", p.ci_high),
        ]);
    }
    Ok((rep, cfg.output.clone().map(|o| config_base(&args.config).join(o))))
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    let (rep, out) = match &cli.command {
        Command::Rates(a) => (rates(a)?, a.output.clone()),
        Command::RequiredSnr(a) => (required(a)?, a.output.clone()),
        Command::MbFit(a) => (mbfit(a)?, a.output.clone()),
        Command::Codegen(a) => (codegen(a, cli.seed.unwrap_or(DEFAULT_SEED))?, a.output.clone()),
        Command::DeThreshold(a) => {
            let (rep, from_cfg) = de(a, cli.seed)?;
            (rep, a.output.clone().or(from_cfg))
        }
        Command::Fer(a) => {
            let (rep, from_cfg) = fer(a, cli.seed)?;
            (rep, a.output.clone().or(from_cfg))
        }
    };
    rep.write(out.as_deref())
}

/// Parses `argv` (program name first), runs it and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
