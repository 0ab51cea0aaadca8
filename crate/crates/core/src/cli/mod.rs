//! The `fairvec` command line.
//!
//! [`run`] parses arguments, executes one command and returns the process
//! exit status: 0 on success, 2 on usage errors, 3 on data errors. The
//! command's JSON result goes to `stdout`; warnings and errors go to
//! `stderr`.

mod args;

use std::collections::HashSet;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::debias::{hard_debias, hsr_debias, ran_debias, DebiasOutcome, HardDebiasConfig, HsrConfig, RanConfig};
use crate::embedding::registry::{fetch_pretrained, FetchError, Registry};
use crate::embedding::{Embedding, Format};
use crate::geometry::{BiasDirection, DirectionSource};
use crate::lexicons::{self, load_lexicon, LexiconKind, LoadOptions};
use crate::metrics::{
    self, direct_bias, gipe, indirect_bias, neighbours_analysis, pmn, proximity_bias, sembias, weat, MetricResult,
    WeatSpec, METRIC_NAMES,
};
use crate::numerics::{OptimizerConfig, Projection};
use crate::report::{global_report, render, word_report, RenderFormat, WordReportOptions};
use crate::viz;

pub use args::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

fn data(e: impl Display) -> CliError {
    CliError::Data(e.to_string())
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

type Result<T> = std::result::Result<T, CliError>;

/// RAN weights and optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RanSettings {
    pub lambda_repulsion: f64,
    pub lambda_attraction: f64,
    pub lambda_neutralization: f64,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for RanSettings {
    fn default() -> Self {
        let d = RanConfig::default();
        RanSettings {
            lambda_repulsion: d.lambda_repulsion,
            lambda_attraction: d.lambda_attraction,
            lambda_neutralization: d.lambda_neutralization,
            learning_rate: d.optimizer.learning_rate,
            max_iterations: d.optimizer.max_iterations,
            tolerance: d.optimizer.tolerance,
        }
    }
}

/// Resolved settings of one run: defaults, then the `--config` file, then
/// flags. Echoed in every command's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub embedding: Option<PathBuf>,
    pub format: Format,
    pub normalize: bool,
    pub direction: DirectionChoice,
    /// Pair-list file for the PCA direction; bundled pairs when absent.
    pub pairs: Option<PathBuf>,
    pub pair: (String, String),
    pub k: usize,
    pub theta: f64,
    pub c: f64,
    pub permutations: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub hsr_alpha: f64,
    pub ran: RanSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            embedding: None,
            format: Format::Auto,
            normalize: true,
            direction: DirectionChoice::Pca,
            pairs: None,
            pair: ("she".into(), "he".into()),
            k: metrics::DEFAULT_K,
            theta: metrics::DEFAULT_THETA,
            c: 1.0,
            permutations: 10_000,
            seed: 0,
            threads: None,
            out_dir: None,
            hsr_alpha: 1.0,
            ran: RanSettings::default(),
        }
    }
}

fn split_pair(text: &str, flag: &str) -> Result<(String, String)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(usage(format!("{flag} expects two comma-separated words, got {text:?}"))),
    }
}

impl RunConfig {
    fn resolve(common: &Common) -> Result<RunConfig> {
        let mut cfg = match &common.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| data(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(p) = &common.emb {
            cfg.embedding = Some(p.clone());
        }
        if let Some(f) = common.format {
            cfg.format = f;
        }
        if common.no_normalize {
            cfg.normalize = false;
        }
        if let Some(d) = common.direction {
            cfg.direction = d;
        }
        if let Some(p) = &common.pairs {
            cfg.pairs = Some(p.clone());
        }
        if let Some(p) = &common.pair {
            cfg.pair = split_pair(p, "--pair")?;
        }
        if let Some(s) = common.seed {
            cfg.seed = s;
        }
        if let Some(t) = common.threads {
            if t == 0 {
                return Err(usage("--threads must be at least 1"));
            }
            cfg.threads = Some(t);
        }
        Ok(cfg)
    }

    fn ran_config(&self) -> RanConfig {
        RanConfig {
            lambda_repulsion: self.ran.lambda_repulsion,
            lambda_attraction: self.ran.lambda_attraction,
            lambda_neutralization: self.ran.lambda_neutralization,
            k: self.k,
            theta: self.theta,
            optimizer: OptimizerConfig {
                learning_rate: self.ran.learning_rate,
                max_iterations: self.ran.max_iterations,
                tolerance: self.ran.tolerance,
                projection: Projection::UnitSphere,
            },
        }
    }
}

fn load_path(path: &Path, format: Format, normalize: bool) -> Result<Embedding> {
    let e = Embedding::load(path, format).map_err(data)?;
    if normalize {
        e.normalize().map_err(data)
    } else {
        Ok(e)
    }
}

fn load(cfg: &RunConfig) -> Result<Embedding> {
    let path = cfg.embedding.as_ref().ok_or_else(|| usage("--emb is required"))?;
    load_path(path, cfg.format, cfg.normalize)
}

fn direction_source(cfg: &RunConfig) -> Result<DirectionSource> {
    Ok(match cfg.direction {
        DirectionChoice::Pca => {
            let pairs = match &cfg.pairs {
                Some(path) => load_lexicon(path, LexiconKind::PairList, LoadOptions::default())
                    .map_err(data)?
                    .as_pairs()
                    .map(<[_]>::to_vec)
                    .unwrap_or_default(),
                None => lexicons::definitional_pairs(),
            };
            DirectionSource::PcaPairs { pairs }
        }
        DirectionChoice::PairDiff => DirectionSource::PairDiff {
            female: cfg.pair.0.clone(),
            male: cfg.pair.1.clone(),
        },
    })
}

fn direction(e: &Embedding, cfg: &RunConfig) -> Result<BiasDirection> {
    direction_source(cfg)?.build(e).map_err(data)
}

fn word_list(path: &Path) -> Result<Vec<String>> {
    Ok(load_lexicon(path, LexiconKind::WordList, LoadOptions::default())
        .map_err(data)?
        .as_words()
        .map(<[_]>::to_vec)
        .unwrap_or_default())
}

fn pair_list(path: &Path) -> Result<Vec<(String, String)>> {
    Ok(load_lexicon(path, LexiconKind::PairList, LoadOptions::default())
        .map_err(data)?
        .as_pairs()
        .map(<[_]>::to_vec)
        .unwrap_or_default())
}

fn words(args: &WordArgs) -> Result<Option<Vec<String>>> {
    let mut out: Option<Vec<String>> = None;
    if let Some(list) = &args.words {
        out.get_or_insert_with(Vec::new).extend(
            list.split(',')
                .map(str::trim)
                .filter(|w| !w.is_empty())
                .map(String::from),
        );
    }
    if let Some(path) = &args.words_file {
        out.get_or_insert_with(Vec::new).extend(word_list(path)?);
    }
    Ok(out)
}

fn require_words(args: &WordArgs, what: &str) -> Result<Vec<String>> {
    match words(args)? {
        Some(w) if !w.is_empty() => Ok(w),
        _ => Err(usage(format!("{what} needs --words or --words-file"))),
    }
}

struct Output {
    json: Value,
    warnings: Vec<String>,
}

impl Output {
    fn new(json: Value) -> Self {
        Output {
            json,
            warnings: Vec::new(),
        }
    }
}

fn echo(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("run config serializes")
}

fn metric_output(cfg: &RunConfig, result: MetricResult) -> Output {
    Output::new(json!({"command": "metric", "config": echo(cfg), "result": result}))
}

fn cmd_metric(args: &MetricArgs, mut cfg: RunConfig) -> Result<Output> {
    let name = args.name.as_str();
    if !METRIC_NAMES.contains(&name) {
        return Err(usage(format!(
            "unknown metric {name:?}; available metrics: {}",
            METRIC_NAMES.join(", ")
        )));
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(t) = args.theta {
        cfg.theta = t;
    }
    if let Some(c) = args.c {
        cfg.c = c;
    }
    if let Some(p) = args.permutations {
        cfg.permutations = p;
    }
    let word = || args.word.clone().ok_or_else(|| usage(format!("{name} needs --word")));

    let result = match name {
        "direct-bias" => {
            let w = require_words(&args.words, name)?;
            let e = load(&cfg)?;
            direct_bias(&e, &direction(&e, &cfg)?, &w, cfg.c)
        }
        "indirect-bias" => {
            let w = require_words(&args.words, name)?;
            let [a, b] = w.as_slice() else {
                return Err(usage("indirect-bias needs exactly two words: --words w,v"));
            };
            let e = load(&cfg)?;
            indirect_bias(&e, &direction(&e, &cfg)?, a, b)
        }
        "weat" => {
            let spec: WeatSpec = match &args.weat {
                Some(path) => load_lexicon(path, LexiconKind::WeatSpec, LoadOptions::default())
                    .map_err(data)?
                    .as_weat()
                    .cloned()
                    .ok_or_else(|| data("not a WEAT specification"))?,
                None => lexicons::weat_career_family(),
            };
            let e = load(&cfg)?;
            weat(&e, &spec, cfg.permutations, cfg.seed)
        }
        "pmn" => {
            let w = word()?;
            let e = load(&cfg)?;
            pmn(&e, &direction(&e, &cfg)?, &w, cfg.k)
        }
        "proximity-bias" => {
            let w = word()?;
            let e = load(&cfg)?;
            proximity_bias(&e, &direction(&e, &cfg)?, &w, cfg.k, cfg.theta)
        }
        "neighbours-analysis" => {
            let w = word()?;
            let e = load(&cfg)?;
            neighbours_analysis(&e, &direction(&e, &cfg)?, &w, cfg.k)
        }
        "gipe" => {
            let w = require_words(&args.words, name)?;
            let e = load(&cfg)?;
            gipe(&e, &direction(&e, &cfg)?, &w, cfg.k, cfg.theta)
        }
        "sembias" => {
            let anchors = match &args.anchors {
                Some(a) => split_pair(a, "--anchors")?,
                None => (
                    metrics::DEFAULT_ANCHORS.0.to_string(),
                    metrics::DEFAULT_ANCHORS.1.to_string(),
                ),
            };
            let dataset = match &args.sembias {
                Some(path) => load_lexicon(path, LexiconKind::SembiasSet, LoadOptions::default())
                    .map_err(data)?
                    .as_sembias()
                    .map(<[_]>::to_vec)
                    .unwrap_or_default(),
                None => lexicons::sembias_sample(),
            };
            let e = load(&cfg)?;
            sembias(&e, &dataset, (&anchors.0, &anchors.1))
        }
        _ => unreachable!("checked against METRIC_NAMES"),
    };
    Ok(metric_output(&cfg, result.map_err(data)?))
}

fn cmd_debias(args: &DebiasArgs, mut cfg: RunConfig) -> Result<Output> {
    let out = args.out.clone().ok_or_else(|| usage("debias needs --out"))?;
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(t) = args.theta {
        cfg.theta = t;
    }
    if let Some(a) = args.alpha {
        cfg.hsr_alpha = a;
    }
    for (flag, slot) in [
        (args.lambda1, &mut cfg.ran.lambda_repulsion),
        (args.lambda2, &mut cfg.ran.lambda_attraction),
        (args.lambda3, &mut cfg.ran.lambda_neutralization),
        (args.learning_rate, &mut cfg.ran.learning_rate),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    if let Some(n) = args.iterations {
        cfg.ran.max_iterations = n;
    }
    let targets = words(&args.words)?;
    let e = load(&cfg)?;
    let gender_specific = match &args.gender_specific {
        Some(path) => word_list(path)?,
        None => lexicons::gender_specific(),
    };

    let outcome: DebiasOutcome = match args.method {
        Method::Hard => {
            let config = HardDebiasConfig {
                equalize_pairs: match &args.equalize {
                    Some(path) => pair_list(path)?,
                    None => lexicons::equalize_pairs(),
                },
                gender_specific,
                direction: direction_source(&cfg)?,
            };
            hard_debias(&e, targets.as_deref(), &config).map_err(data)?
        }
        Method::Ran => {
            let g = direction(&e, &cfg)?;
            let list = targets.unwrap_or_else(|| {
                let exempt: HashSet<&String> = gender_specific.iter().collect();
                e.vocab().iter().filter(|w| !exempt.contains(w)).cloned().collect()
            });
            ran_debias(&e, Some(&list), &g, &cfg.ran_config()).map_err(data)?
        }
        Method::Hsr => {
            let mut config = HsrConfig {
                alpha: cfg.hsr_alpha,
                ..HsrConfig::default()
            };
            if let Some(path) = &args.definitional {
                config.definitional = word_list(path)?;
            }
            hsr_debias(&e, targets.as_deref(), &config).map_err(data)?
        }
    };

    let format = match args.out_format {
        Some(Format::Auto) | None => Format::sniff(&out).unwrap_or(match cfg.format {
            Format::Auto => Format::Text,
            f => f,
        }),
        Some(f) => f,
    };
    outcome.embedding.save(&out, format).map_err(data)?;
    let method = match args.method {
        Method::Hard => "hard",
        Method::Ran => "ran",
        Method::Hsr => "hsr",
    };
    Ok(Output {
        warnings: outcome.report.warnings.clone(),
        json: json!({
            "command": "debias",
            "method": method,
            "config": echo(&cfg),
            "output": out,
            "format": format,
            "report": outcome.report,
        }),
    })
}

fn cmd_report(command: &ReportCommand, mut cfg: RunConfig) -> Result<Output> {
    match command {
        ReportCommand::Word(args) => {
            if let Some(k) = args.k {
                cfg.k = k;
            }
            if let Some(t) = args.theta {
                cfg.theta = t;
            }
            if let Some(d) = &args.out_dir {
                cfg.out_dir = Some(d.clone());
            }
            let e = load(&cfg)?;
            let g = direction(&e, &cfg)?;
            let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let options = WordReportOptions {
                k: cfg.k,
                theta: cfg.theta,
            };
            let mut doc = word_report(&e, &g, &args.word, &options, Some(&dir)).map_err(data)?;
            doc.metadata.insert("config".into(), echo(&cfg));
            Ok(rendered(&doc, args.text))
        }
        ReportCommand::Global(args) => {
            let e = load(&cfg)?;
            let g = direction(&e, &cfg)?;
            let subject = cfg
                .embedding
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default();
            let mut doc = global_report(&e, &g, args.n, &subject).map_err(|e| match e {
                crate::report::ReportError::InvalidArgument(m) => usage(m),
                other => data(other),
            })?;
            doc.metadata.insert("config".into(), echo(&cfg));
            Ok(rendered(&doc, args.text))
        }
    }
}

fn rendered(doc: &crate::report::ReportDocument, text: bool) -> Output {
    if text {
        Output::new(Value::String(render(doc, RenderFormat::Text)))
    } else {
        Output::new(serde_json::to_value(doc).expect("report serializes"))
    }
}

fn cmd_compare(args: &CompareArgs, mut cfg: RunConfig) -> Result<Output> {
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(t) = args.theta {
        cfg.theta = t;
    }
    if let Some(p) = args.permutations {
        cfg.permutations = p;
    }
    let other_path = args.other.clone().ok_or_else(|| usage("compare needs --other"))?;
    let before = load(&cfg)?;
    let after = load_path(&other_path, args.other_format.unwrap_or(cfg.format), cfg.normalize)?;
    if before.dim() != after.dim() {
        return Err(data(format!(
            "dimension mismatch: {} has {} dimensions, {} has {}",
            cfg.embedding
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            before.dim(),
            other_path.display(),
            after.dim()
        )));
    }
    let g = direction(&before, &cfg)?;
    let list = match words(&args.words)? {
        Some(w) => w,
        None => {
            let mut fixed: HashSet<String> = lexicons::gender_specific().into_iter().collect();
            for (f, m) in lexicons::definitional_pairs()
                .into_iter()
                .chain(lexicons::equalize_pairs())
            {
                fixed.insert(f);
                fixed.insert(m);
            }
            before.vocab().iter().filter(|w| !fixed.contains(*w)).cloned().collect()
        }
    };

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut add = |metric: &str, label: &str, f: &dyn Fn(&Embedding) -> metrics::Result<MetricResult>| match (
        f(&before),
        f(&after),
    ) {
        (Ok(b), Ok(a)) => {
            let (b, a) = (b.get(label), a.get(label));
            if let (Some(b), Some(a)) = (b, a) {
                rows.push(json!({"metric": metric, "value": label, "before": b, "after": a, "delta": a - b}));
            }
        }
        (Err(e), _) | (_, Err(e)) => notes.push(format!("{metric} skipped: {e}")),
    };
    add("direct-bias", "value", &|e| direct_bias(e, &g, &list, cfg.c));
    add("gipe", "value", &|e| gipe(e, &g, &list, cfg.k, cfg.theta));
    let spec = lexicons::weat_career_family();
    add("weat", "effect_size", &|e| weat(e, &spec, cfg.permutations, cfg.seed));
    let sample = lexicons::sembias_sample();
    add("sembias", "definition", &|e| {
        sembias(e, &sample, metrics::DEFAULT_ANCHORS)
    });
    Ok(Output {
        json: json!({
            "command": "compare",
            "config": echo(&cfg),
            "other": other_path,
            "words": list.len(),
            "metrics": rows,
            "notes": notes,
        }),
        warnings: notes.clone(),
    })
}

fn cmd_viz(command: &VizCommand, mut cfg: RunConfig) -> Result<Output> {
    let (plot, args) = match command {
        VizCommand::Neighbors(a) => ("neighbors", a),
        VizCommand::BiasBar(a) => ("bias-bar", a),
        VizCommand::Pca(a) => ("pca", a),
        VizCommand::Cloud(a) => ("cloud", a),
    };
    let out = args
        .out
        .clone()
        .ok_or_else(|| usage(format!("viz {plot} needs --out")))?;
    if let Some(k) = args.k {
        cfg.k = k;
    }
    let word = || {
        args.word
            .clone()
            .ok_or_else(|| usage(format!("viz {plot} needs --word")))
    };
    let path = match plot {
        "neighbors" => {
            let w = word()?;
            let e = load(&cfg)?;
            viz::neighbor_scatter(&e, &direction(&e, &cfg)?, &w, cfg.k, &out)
        }
        "bias-bar" => {
            let w = require_words(&args.words, "viz bias-bar")?;
            let e = load(&cfg)?;
            viz::bias_bar(&e, &direction(&e, &cfg)?, &w, &out)
        }
        "pca" => {
            let w = require_words(&args.words, "viz pca")?;
            let e = load(&cfg)?;
            viz::pca_scatter(&e, &w, &out, &direction(&e, &cfg)?)
        }
        _ => match (&args.word, words(&args.words)?) {
            (Some(w), _) => {
                let e = load(&cfg)?;
                let g = direction(&e, &cfg)?;
                let table = neighbours_analysis(&e, &g, w, cfg.k).map_err(data)?;
                let items: Vec<(String, f64)> = table
                    .breakdown
                    .iter()
                    .map(|b| (b.item.clone(), b.scores["cosine"].max(0.0)))
                    .collect();
                viz::word_cloud(&items, &out)
            }
            (None, Some(list)) if !list.is_empty() => {
                let e = load(&cfg)?;
                let g = direction(&e, &cfg)?;
                let items: Vec<(String, f64)> = viz::bias_values(&e, &g, &list)
                    .map_err(data)?
                    .into_iter()
                    .map(|(w, c)| (w, c.abs()))
                    .collect();
                viz::word_cloud(&items, &out)
            }
            _ => return Err(usage("viz cloud needs --word or --words")),
        },
    }
    .map_err(data)?;
    Ok(Output::new(
        json!({"command": "viz", "plot": plot, "config": echo(&cfg), "output": path}),
    ))
}

fn cmd_fetch(args: &FetchArgs) -> Result<Output> {
    let registry = Registry::load(&args.registry).map_err(data)?;
    let path = fetch_pretrained(&args.name, &registry).map_err(|e| match e {
        FetchError::UnknownName { .. } => usage(e.to_string()),
        other => data(other),
    })?;
    Ok(Output::new(
        json!({"command": "fetch", "name": args.name, "path": path}),
    ))
}

fn common(command: &Command) -> Option<&Common> {
    Some(match command {
        Command::Metric(a) => &a.common,
        Command::Debias(a) => &a.common,
        Command::Report(ReportCommand::Word(a)) => &a.common,
        Command::Report(ReportCommand::Global(a)) => &a.common,
        Command::Compare(a) => &a.common,
        Command::Viz(VizCommand::Neighbors(a) | VizCommand::BiasBar(a) | VizCommand::Pca(a) | VizCommand::Cloud(a)) => {
            &a.common
        }
        Command::Fetch(_) => return None,
    })
}

fn execute(command: &Command) -> Result<Output> {
    let Some(common) = common(command) else {
        if let Command::Fetch(a) = command {
            return cmd_fetch(a);
        }
        unreachable!("only fetch has no common options");
    };
    let cfg = RunConfig::resolve(common)?;
    let job = |cfg: RunConfig| match command {
        Command::Metric(a) => cmd_metric(a, cfg),
        Command::Debias(a) => cmd_debias(a, cfg),
        Command::Report(r) => cmd_report(r, cfg),
        Command::Compare(a) => cmd_compare(a, cfg),
        Command::Viz(v) => cmd_viz(v, cfg),
        Command::Fetch(a) => cmd_fetch(a),
    };
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| data(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| job(cfg))
        }
        None => job(cfg),
    }
}

/// Runs the command line given by `args` (program name first).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return if e.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(&cli.command) {
        Ok(output) => {
            for w in &output.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let text = match &output.json {
                Value::String(s) => s.clone(),
                v => {
                    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
                    s.push('\n');
                    s
                }
            };
            if let Err(e) = stdout.write_all(text.as_bytes()) {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Data(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_DATA
        }
    }
}
