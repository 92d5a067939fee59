//! Command-line interface. `main` only parses arguments and calls [`run`].

use crate::annotation::{self, AnnotationService, EventLog, ExportFilter};
use crate::baseline::{correct_sentence, BaselineConfig, Lexicon};
use crate::corpus::{read_corpus, read_lines, Cefr};
use crate::dataset::{distribution, likert_table, load_annotations, nld_report};
use crate::error::{Error, Result};
use crate::lm::{ExternalScorer, LanguageModel, NgramModel, NoModel};
use crate::metrics::{
    edit_counts, gleu_corpus, render_distribution, scribendi_report, Dimension, EditCounts, FBetaConfig, GleuConfig,
    GleuSentence, Level, MetricReport, ScribendiConfig, ScribendiItem,
};
use crate::text::{extract_edits, normalize, tokenize, TokenSequence};
use crate::tree::{build_tree, mds_embed_with, pairwise_nld_matrix, read_version_sets, MdsConfig, Provenance};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::collections::BTreeSet;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

#[derive(Debug, Parser)]
#[command(name = "gec-eval", version, about = "Evaluate and annotate grammatical error correction output")]
pub struct Cli {
    /// Seed for every random choice (reference sampling, MDS starts,
    /// annotation order).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Decimal places in text reports.
    #[arg(long, global = true, default_value_t = 4)]
    pub decimals: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score system outputs (GLEU, F-beta, Scribendi) or summarize human
    /// annotations (post-edit NLD, Likert means, score distributions).
    Score(ScoreArgs),
    /// Quadratically weighted kappa between two annotators.
    Agree(AgreeArgs),
    /// Pairwise NLD matrix, MDS embedding and provenance tree.
    Tree(TreeArgs),
    /// Run the LM-guided correction baseline.
    Correct(CorrectArgs),
    /// Train a character n-gram language model.
    TrainLm(TrainLmArgs),
    /// Run the annotation HTTP service.
    Serve(ServeArgs),
    /// Export finished annotations from an event log.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    Gleu,
    Fbeta,
    Scribendi,
    Nld,
    Likert,
    Distribution,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long = "metric", value_enum, required = true)]
    pub metrics: Vec<MetricName>,

    /// JSON-lines corpus with sources, levels and references.
    #[arg(long, conflicts_with_all = ["src", "refs", "cefr"])]
    pub corpus: Option<PathBuf>,

    /// Source sentences, one per line.
    #[arg(long)]
    pub src: Option<PathBuf>,

    /// Reference file, one sentence per line; repeat for more references.
    #[arg(long = "ref")]
    pub refs: Vec<PathBuf>,

    /// CEFR level per line, aligned with --src.
    #[arg(long)]
    pub cefr: Option<PathBuf>,

    /// System output as [NAME=]PATH, one sentence per line; repeatable.
    #[arg(long = "hyp")]
    pub hyps: Vec<String>,

    /// Annotation export or table, or a directory of them (nld, likert,
    /// distribution).
    #[arg(long)]
    pub annotations: Option<PathBuf>,

    /// Likert dimension for likert and distribution; likert defaults to
    /// all three, distribution to meaning.
    #[arg(long)]
    pub dimension: Option<String>,

    /// F-beta weight of precision (0.18 gives a strong precision bias).
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,

    /// Scribendi similarity threshold in [0, 1].
    #[arg(long, default_value_t = 0.8)]
    pub threshold: f64,

    /// GLEU source-penalty weight.
    #[arg(long, default_value_t = 1.0)]
    pub penalty: f64,

    /// GLEU reference draws when sentences have several references.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,

    /// Character n-gram model for Scribendi.
    #[arg(long, conflicts_with = "scorer_url")]
    pub lm: Option<PathBuf>,

    /// External scoring service for Scribendi.
    #[arg(long)]
    pub scorer_url: Option<String>,

    /// Timeout in seconds for the external scorer.
    #[arg(long, default_value_t = 60)]
    pub scorer_timeout: u64,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    /// Annotation export as [ROUND=]PATH; each file is one table row.
    #[arg(long = "annotations", required = true)]
    pub annotations: Vec<String>,

    /// First annotator; with --b omitted, the two annotators present.
    #[arg(long)]
    pub a: Option<String>,

    #[arg(long)]
    pub b: Option<String>,

    #[arg(long)]
    pub dimension: Option<String>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// sentence_id<TAB>label<TAB>text lines.
    #[arg(long)]
    pub versions: PathBuf,

    /// label<TAB>parent<TAB>kind lines; defaults to the twelve-version
    /// layout when the labels match it.
    #[arg(long)]
    pub provenance: Option<PathBuf>,

    #[arg(long, default_value_t = 300)]
    pub iterations: usize,

    #[arg(long, default_value_t = 4)]
    pub restarts: usize,

    /// Directory for tree.json, tree.dot, tree.svg and matrix.tsv.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[arg(long)]
    pub lm: PathBuf,

    /// word[<TAB>frequency] lines.
    #[arg(long)]
    pub lexicon: PathBuf,

    /// Sentences to correct, one per line.
    #[arg(long)]
    pub input: PathBuf,

    /// Corrected sentences; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Per-sentence JSON-lines trace of accepted edits.
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Minimum log-probability gain (nats) to accept an edit.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,

    #[arg(long, default_value_t = 10)]
    pub max_iterations: usize,

    #[arg(long, default_value_t = 20)]
    pub max_candidates: usize,
}

#[derive(Debug, Args)]
pub struct TrainLmArgs {
    /// Training text, one sentence per line; repeatable.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,

    #[arg(long, default_value_t = crate::lm::DEFAULT_ORDER)]
    pub order: usize,

    /// Add-k smoothing constant.
    #[arg(long, default_value_t = crate::lm::DEFAULT_K)]
    pub k: f64,

    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    /// JSON-lines corpus; the first reference of each sentence is shown in
    /// the meaning check.
    #[arg(long)]
    pub corpus: PathBuf,

    /// JSON lines {sentence_id, system, output[, batch, item_id]}.
    #[arg(long)]
    pub outputs: PathBuf,

    /// Append-only event log.
    #[arg(long)]
    pub log: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub pool: PoolArgs,

    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub pool: PoolArgs,

    #[arg(long)]
    pub annotator: Option<String>,

    #[arg(long)]
    pub system: Option<String>,

    /// Destination file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command, writing reports to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let threads = match cli.jobs {
        Some(0) => return Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
    // Reports are buffered so the worker pool never touches `out`.
    let mut buf: Vec<u8> = Vec::new();
    pool.install(|| match &cli.command {
        Command::Score(a) => score(cli, a, &mut buf),
        Command::Agree(a) => agree(cli, a, &mut buf),
        Command::Tree(a) => tree(cli, a, &mut buf),
        Command::Correct(a) => correct(a, &mut buf),
        Command::TrainLm(a) => train_lm(a, &mut buf),
        Command::Serve(a) => serve(cli, a),
        Command::Export(a) => export(cli, a, &mut buf),
    })?;
    out.write_all(&buf).and_then(|_| out.flush()).map_err(|e| Error::io("<stdout>", e))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Splits `NAME=PATH`; without a name the file stem is used.
fn named_path(arg: &str) -> (String, PathBuf) {
    if let Some((name, path)) = arg.split_once('=') {
        if !name.is_empty() && !name.contains(['/', '\\']) {
            return (name.to_string(), PathBuf::from(path));
        }
    }
    let path = PathBuf::from(arg);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| arg.to_string());
    (name, path)
}

fn parse_dimension(raw: &Option<String>) -> Result<Option<Dimension>> {
    raw.as_deref().map(str::parse).transpose()
}

struct EvalSet {
    ids: Vec<String>,
    sources: Vec<String>,
    cefr: Vec<Cefr>,
    references: Vec<Vec<String>>,
}

fn load_eval_set(a: &ScoreArgs) -> Result<EvalSet> {
    if let Some(path) = &a.corpus {
        let records = read_corpus(path)?;
        return Ok(EvalSet {
            ids: records.iter().map(|r| r.id.clone()).collect(),
            sources: records.iter().map(|r| r.source.clone()).collect(),
            cefr: records.iter().map(|r| r.cefr).collect(),
            references: records.into_iter().map(|r| r.references).collect(),
        });
    }
    let src = a
        .src
        .as_ref()
        .ok_or_else(|| Error::Input("give either --corpus or --src".into()))?;
    let sources = read_lines(src)?;
    let n = sources.len();
    let check_len = |path: &Path, len: usize| {
        if len == n {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "{}: {len} lines, but {} has {n}",
                path.display(),
                src.display()
            )))
        }
    };
    let mut references = vec![Vec::new(); n];
    for path in &a.refs {
        let lines = read_lines(path)?;
        check_len(path, lines.len())?;
        for (slot, line) in references.iter_mut().zip(lines) {
            slot.push(line);
        }
    }
    let cefr = match &a.cefr {
        Some(path) => {
            let lines = read_lines(path)?;
            check_len(path, lines.len())?;
            lines
                .iter()
                .enumerate()
                .map(|(i, l)| l.parse().map_err(|e: Error| Error::parse(path, i + 1, e.to_string())))
                .collect::<Result<_>>()?
        }
        None => vec![Cefr::Unknown; n],
    };
    Ok(EvalSet {
        ids: (1..=n).map(|i| i.to_string()).collect(),
        sources,
        cefr,
        references,
    })
}

fn load_hyps(a: &ScoreArgs, set: &EvalSet) -> Result<Vec<(String, Vec<String>)>> {
    if a.hyps.is_empty() {
        return Err(Error::Input("give at least one --hyp".into()));
    }
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    for arg in &a.hyps {
        let (name, path) = named_path(arg);
        let lines = read_lines(&path)?;
        if lines.len() != set.sources.len() {
            return Err(Error::Input(format!(
                "{}: {} lines, expected {} (one per source sentence)",
                path.display(),
                lines.len(),
                set.sources.len()
            )));
        }
        if out.iter().any(|(n, _)| *n == name) {
            return Err(Error::Input(format!("system name {name:?} given twice")));
        }
        out.push((name, lines));
    }
    Ok(out)
}

/// Levels with at least one sentence; empty when no level is known.
fn levels_present(cefr: &[Cefr]) -> Vec<Cefr> {
    if cefr.iter().all(|c| *c == Cefr::Unknown) {
        return Vec::new();
    }
    Cefr::LEVELS
        .into_iter()
        .chain([Cefr::Unknown])
        .filter(|l| cefr.contains(l))
        .collect()
}

fn toks(text: &str) -> TokenSequence {
    tokenize(&normalize(text))
}

fn gleu_table(set: &EvalSet, hyps: &[(String, Vec<String>)], cfg: &GleuConfig) -> Result<MetricReport> {
    if let Some(i) = set.references.iter().position(Vec::is_empty) {
        return Err(Error::Input(format!("sentence {} has no reference", set.ids[i])));
    }
    let mut report = MetricReport::new("GLEU");
    let levels = levels_present(&set.cefr);
    for (system, lines) in hyps {
        let sentences: Vec<GleuSentence> = (0..lines.len())
            .map(|i| GleuSentence {
                id: set.ids[i].clone(),
                source: toks(&set.sources[i]),
                hypothesis: toks(&lines[i]),
                references: set.references[i].iter().map(|r| toks(r)).collect(),
            })
            .collect();
        report.set(system, Level::All, Some(gleu_corpus(&sentences, cfg)?));
        for &level in &levels {
            let subset: Vec<GleuSentence> = sentences
                .iter()
                .zip(&set.cefr)
                .filter(|(_, c)| **c == level)
                .map(|(s, _)| s.clone())
                .collect();
            report.set(system, Level::Cefr(level), Some(gleu_corpus(&subset, cfg)?));
        }
    }
    Ok(report)
}

fn fbeta_table(set: &EvalSet, hyps: &[(String, Vec<String>)], cfg: &FBetaConfig) -> Result<MetricReport> {
    cfg.validate()?;
    let mut report = MetricReport::new(format!("F{}", cfg.beta));
    let levels = levels_present(&set.cefr);
    for (system, lines) in hyps {
        let mut counts = Vec::with_capacity(lines.len());
        for (i, hyp) in lines.iter().enumerate() {
            let reference = set.references[i]
                .first()
                .ok_or_else(|| Error::Input(format!("sentence {} has no reference", set.ids[i])))?;
            let src = toks(&set.sources[i]);
            let gold = extract_edits(&src, &toks(reference));
            let proposed = extract_edits(&src, &toks(hyp));
            counts.push(edit_counts(&gold, &proposed)?);
        }
        let pooled = |pick: &dyn Fn(Cefr) -> bool| {
            let mut total = EditCounts::default();
            for (c, level) in counts.iter().zip(&set.cefr) {
                if pick(*level) {
                    total.add(*c);
                }
            }
            total.score(cfg).f_beta
        };
        report.set(system, Level::All, Some(pooled(&|_| true)));
        for &level in &levels {
            report.set(system, Level::Cefr(level), Some(pooled(&|c| c == level)));
        }
    }
    Ok(report)
}

fn scribendi_table(
    set: &EvalSet,
    hyps: &[(String, Vec<String>)],
    lm: &dyn LanguageModel,
    cfg: &ScribendiConfig,
) -> Result<MetricReport> {
    let mut report = MetricReport::new("Scribendi");
    let with_levels = !levels_present(&set.cefr).is_empty();
    for (system, lines) in hyps {
        let items: Vec<ScribendiItem> = lines
            .iter()
            .enumerate()
            .map(|(i, hyp)| ScribendiItem {
                id: set.ids[i].clone(),
                cefr: set.cefr[i],
                source: set.sources[i].clone(),
                hypothesis: hyp.clone(),
            })
            .collect();
        if with_levels {
            scribendi_report(&mut report, system, &items, lm, cfg)?;
        } else {
            report.set(system, Level::All, Some(crate::metrics::scribendi_corpus(&items, lm, cfg)?));
        }
    }
    Ok(report)
}

enum Output {
    Report(MetricReport),
    Distribution(String, Vec<crate::metrics::ScoreHistogram>),
}

fn render_report(r: &MetricReport, decimals: usize) -> String {
    let levels = r.levels();
    if r.systems().len() == 1 && levels == [Level::All] {
        return match r.get(&r.systems()[0], Level::All) {
            Some(v) => format!("{v:.decimals$}\n"),
            None => "-\n".to_string(),
        };
    }
    r.render_text(decimals)
}

fn score(cli: &Cli, a: &ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let needs_set = a
        .metrics
        .iter()
        .any(|m| matches!(m, MetricName::Gleu | MetricName::Fbeta | MetricName::Scribendi));
    let set_and_hyps = if needs_set {
        let set = load_eval_set(a)?;
        let hyps = load_hyps(a, &set)?;
        Some((set, hyps))
    } else {
        None
    };
    let annotations = match &a.annotations {
        Some(p) => Some(load_annotations(p)?),
        None => None,
    };
    let need_annotations = || {
        annotations
            .as_deref()
            .ok_or_else(|| Error::Input("this metric needs --annotations".into()))
    };
    let dimension = parse_dimension(&a.dimension)?;
    let mut outputs = Vec::new();
    let mut seen = BTreeSet::new();
    for &metric in &a.metrics {
        if !seen.insert(metric as u8) {
            continue;
        }
        match metric {
            MetricName::Gleu => {
                let cfg = GleuConfig {
                    penalty_weight: a.penalty,
                    num_reference_samples: a.samples,
                    seed: cli.seed,
                    ..GleuConfig::default()
                };
                let (set, hyps) = set_and_hyps.as_ref().expect("loaded above");
                outputs.push(Output::Report(gleu_table(set, hyps, &cfg)?));
            }
            MetricName::Fbeta => {
                let (set, hyps) = set_and_hyps.as_ref().expect("loaded above");
                outputs.push(Output::Report(fbeta_table(set, hyps, &FBetaConfig { beta: a.beta })?));
            }
            MetricName::Scribendi => {
                let cfg = ScribendiConfig {
                    similarity_threshold: a.threshold,
                };
                cfg.validate()?;
                let lm: Box<dyn LanguageModel> = match (&a.lm, &a.scorer_url) {
                    (Some(p), _) => Box::new(NgramModel::load(p)?),
                    (None, Some(url)) => Box::new(ExternalScorer::new(url, Duration::from_secs(a.scorer_timeout))),
                    (None, None) => Box::new(NoModel),
                };
                let (set, hyps) = set_and_hyps.as_ref().expect("loaded above");
                outputs.push(Output::Report(scribendi_table(set, hyps, lm.as_ref(), &cfg)?));
            }
            MetricName::Nld => outputs.push(Output::Report(nld_report(need_annotations()?)?)),
            MetricName::Likert => {
                let dims = dimension.map_or(Dimension::ALL.to_vec(), |d| vec![d]);
                for d in dims {
                    outputs.push(Output::Report(likert_table(need_annotations()?, d)?));
                }
            }
            MetricName::Distribution => {
                let d = dimension.unwrap_or(Dimension::Meaning);
                let title = format!("Distribution of {} scores", d.title().to_lowercase());
                outputs.push(Output::Distribution(title, distribution(need_annotations()?, d)?));
            }
        }
    }
    let text = match cli.format {
        Format::Text => outputs
            .iter()
            .map(|o| match o {
                Output::Report(r) => render_report(r, cli.decimals),
                Output::Distribution(title, h) => render_distribution(title, h),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => {
            let items: Vec<serde_json::Value> = outputs
                .iter()
                .map(|o| match o {
                    Output::Report(r) => json!({ "metric": r.metric, "entries": r.entries() }),
                    Output::Distribution(title, h) => json!({ "metric": title, "histograms": h }),
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "reports": items })).expect("reports serialize") + "\n"
        }
    };
    write_out(out, &text)
}

fn agree(cli: &Cli, a: &AgreeArgs, out: &mut dyn Write) -> Result<()> {
    let multiple = a.annotations.len() > 1;
    let mut ratings = Vec::new();
    let mut rounds: Vec<String> = Vec::new();
    for arg in &a.annotations {
        let (name, path) = named_path(arg);
        if rounds.contains(&name) {
            return Err(Error::Input(format!("round {name:?} given twice")));
        }
        for mut r in annotation::read_export(&path)? {
            // Item ids only need to be unique within a round.
            r.item_id = format!("{name}\u{1f}{}", r.item_id);
            ratings.push(r);
        }
        rounds.push(name);
    }
    let (ann_a, ann_b) = match (&a.a, &a.b) {
        (Some(x), Some(y)) => (x.clone(), y.clone()),
        (None, None) => {
            let names: BTreeSet<&str> = ratings.iter().map(|r| r.annotator.as_str()).collect();
            let names: Vec<&str> = names.into_iter().collect();
            if names.len() != 2 {
                return Err(Error::Input(format!(
                    "found {} annotators ({}); choose two with --a and --b",
                    names.len(),
                    names.join(", ")
                )));
            }
            (names[0].to_string(), names[1].to_string())
        }
        _ => return Err(Error::Input("give both --a and --b".into())),
    };
    let dims = parse_dimension(&a.dimension)?.map_or(Dimension::ALL.to_vec(), |d| vec![d]);
    let batch_of = |id: &str| {
        multiple.then(|| id.split('\u{1f}').next().unwrap_or_default().to_string())
    };
    let mut report = annotation::agreement_report(&ratings, batch_of, &ann_a, &ann_b, &dims)?;
    // Rows follow the order the rounds were given in.
    report
        .rows
        .sort_by_key(|r| rounds.iter().position(|n| *n == r.batch).unwrap_or(usize::MAX));
    let text = match cli.format {
        Format::Text => report.render_text(cli.decimals),
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
    };
    write_out(out, &text)
}

fn tree(cli: &Cli, a: &TreeArgs, out: &mut dyn Write) -> Result<()> {
    let sets = read_version_sets(&a.versions)?;
    let matrix = pairwise_nld_matrix(&sets)?;
    let cfg = MdsConfig {
        max_iterations: a.iterations,
        n_init: a.restarts,
        seed: cli.seed,
        ..MdsConfig::default()
    };
    let embedding = mds_embed_with(&matrix, &cfg)?;
    let provenance = match &a.provenance {
        Some(p) => Some(Provenance::load(p)?),
        None => {
            let default = Provenance::default_layout();
            let want: BTreeSet<&String> = default.labels().iter().collect();
            let have: BTreeSet<&String> = matrix.labels().iter().collect();
            (want == have).then_some(default)
        }
    };
    let tree = provenance.as_ref().map(|p| build_tree(p, &embedding)).transpose()?;
    let d = cli.decimals;
    let mut matrix_tsv = String::from("label");
    for l in matrix.labels() {
        matrix_tsv.push('\t');
        matrix_tsv.push_str(l);
    }
    matrix_tsv.push('\n');
    for (i, l) in matrix.labels().iter().enumerate() {
        matrix_tsv.push_str(l);
        for j in 0..matrix.len() {
            matrix_tsv.push_str(&format!("\t{:.d$}", matrix.get(i, j)));
        }
        matrix_tsv.push('\n');
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join("matrix.tsv"), &matrix_tsv)?;
        if let Some(t) = &tree {
            write_file(&dir.join("tree.json"), &t.to_json())?;
            write_file(&dir.join("tree.dot"), &t.to_dot())?;
            write_file(&dir.join("tree.svg"), &t.to_svg())?;
        }
    }
    let text = match cli.format {
        Format::Json => {
            let v = json!({
                "labels": matrix.labels(),
                "distances": matrix.rows(),
                "embedding": embedding.labels.iter().zip(&embedding.coords)
                    .map(|(l, c)| json!({ "label": l, "x": c[0], "y": c[1] }))
                    .collect::<Vec<_>>(),
                "stress": embedding.stress,
                "iterations": embedding.stress_history.len() - 1,
                "tree": tree,
            });
            serde_json::to_string_pretty(&v).expect("tree output serializes") + "\n"
        }
        Format::Text => {
            let mut s = format!("Mean normalized Levenshtein distance over {} sentences\n{matrix_tsv}\n", sets.len());
            s.push_str(&format!(
                "MDS stress {:.3e} after {} iterations\n",
                embedding.stress,
                embedding.stress_history.len() - 1
            ));
            for (l, c) in embedding.labels.iter().zip(&embedding.coords) {
                s.push_str(&format!("{l}\t{:.d$}\t{:.d$}\n", c[0], c[1]));
            }
            match &tree {
                Some(t) => {
                    s.push_str(&format!("\nTree: {} nodes, {} edges\n", t.nodes.len(), t.edges.len()));
                    for e in &t.edges {
                        s.push_str(&format!("{} -> {}\t{}\n", e.from, e.to, e.kind));
                    }
                }
                None => s.push_str("\nNo provenance given; tree not built\n"),
            }
            s
        }
    };
    write_out(out, &text)
}

fn correct(a: &CorrectArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = BaselineConfig {
        min_improvement: a.delta,
        max_iterations: a.max_iterations,
        max_candidates_per_token: a.max_candidates,
    };
    cfg.validate()?;
    let model = NgramModel::load(&a.lm)?;
    let lexicon = Lexicon::load(&a.lexicon)?;
    let lines = read_lines(&a.input)?;
    let mut corrected = String::new();
    let mut trace = String::new();
    for (i, line) in lines.iter().enumerate() {
        let (text, t) = correct_sentence(line, &model, &lexicon, &cfg);
        corrected.push_str(&text);
        corrected.push('\n');
        let entry = json!({ "line": i + 1, "input": line, "output": text, "steps": t.steps });
        trace.push_str(&entry.to_string());
        trace.push('\n');
    }
    if let Some(p) = &a.trace {
        write_file(p, &trace)?;
    }
    match &a.output {
        Some(p) => write_file(p, &corrected),
        None => write_out(out, &corrected),
    }
}

fn train_lm(a: &TrainLmArgs, out: &mut dyn Write) -> Result<()> {
    let mut corpus = Vec::new();
    for p in &a.inputs {
        corpus.extend(read_lines(p)?.into_iter().filter(|l| !l.trim().is_empty()));
    }
    let model = NgramModel::train(&corpus, a.order, a.k)?;
    model.save(&a.output)?;
    write_out(
        out,
        &format!(
            "trained order-{} model on {} sentences ({} characters in vocabulary), wrote {}\n",
            model.order(),
            corpus.len(),
            model.vocabulary().len(),
            a.output.display()
        ),
    )
}

fn serve(cli: &Cli, a: &ServeArgs) -> Result<()> {
    let pool = annotation::load_pool(&a.pool.corpus, &a.pool.outputs)?;
    let service = Arc::new(AnnotationService::with_log(pool, cli.seed, &a.pool.log)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::Config(format!("cannot start runtime: {e}")))?;
    runtime
        .block_on(annotation::http::serve(service, a.addr))
        .map_err(|e| Error::Input(format!("cannot serve on {}: {e}", a.addr)))
}

fn export(cli: &Cli, a: &ExportArgs, out: &mut dyn Write) -> Result<()> {
    let pool = annotation::load_pool(&a.pool.corpus, &a.pool.outputs)?;
    let records = EventLog::read(&a.pool.log)?;
    let service = AnnotationService::replay(pool, cli.seed, &records)?;
    let text = service.export(&ExportFilter {
        annotator: a.annotator.clone(),
        system: a.system.clone(),
    });
    match &a.output {
        Some(p) => write_file(p, &text),
        None => write_out(out, &text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_paths() {
        assert_eq!(named_path("MT=out/mt.txt"), ("MT".to_string(), PathBuf::from("out/mt.txt")));
        assert_eq!(named_path("out/gpt3.txt"), ("gpt3".to_string(), PathBuf::from("out/gpt3.txt")));
        assert_eq!(named_path("dir/a=b.txt").0, "a=b");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn bare_value_for_single_cell() {
        let mut r = MetricReport::new("GLEU");
        r.set("hyp", Level::All, Some(1.0));
        assert_eq!(render_report(&r, 4), "1.0000\n");
        r.set("other", Level::All, Some(0.5));
        assert!(render_report(&r, 4).starts_with("GLEU\n"));
    }
}
