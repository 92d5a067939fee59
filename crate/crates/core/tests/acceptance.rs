//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use gec_eval::annotation::{AnnotationItem, AnnotationService, EventLog, ExportFilter, StepView};
use gec_eval::baseline::{correct_sentence, BaselineConfig, Lexicon};
use gec_eval::corpus::Cefr;
use gec_eval::dataset::{distribution, load_annotations, nld_report};
use gec_eval::lm::{LanguageModel, LmScore, NgramModel, ScorerError};
use gec_eval::metrics::{
    gleu_corpus, qwk, scribendi_corpus, scribendi_report, scribendi_scores, Dimension, GleuConfig, GleuSentence, Level,
    LikertScore, MetricReport, RatingMatrix, ScoreTriple, ScribendiConfig, ScribendiItem,
};
use gec_eval::text::{apply_edits, extract_edits, levenshtein, tokenize, TokenSequence};
use gec_eval::tree::{mds_embed_with, DistanceMatrix, MdsConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_string(r: &mut ChaCha8Rng, max_len: usize) -> String {
    const ALPHABET: [char; 6] = ['a', 'b', 'c', 'å', 'ä', 'ö'];
    let n = r.random_range(0..=max_len);
    (0..n).map(|_| ALPHABET[r.random_range(0..ALPHABET.len())]).collect()
}

/// Textbook recursive definition with a memo table.
fn brute_levenshtein(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let cost = usize::from(a[i - 1] != b[j - 1]);
        let v = (go(a, b, i - 1, j, memo) + 1)
            .min(go(a, b, i, j - 1, memo) + 1)
            .min(go(a, b, i - 1, j - 1, memo) + cost);
        memo.insert((i, j), v);
        v
    }
    go(a, b, a.len(), b.len(), &mut HashMap::new())
}

fn edit_distance_oracle() -> Check {
    let start = Instant::now();
    let mut r = rng(1);
    for k in 0..1000 {
        let (a, b) = (random_string(&mut r, 8), random_string(&mut r, 8));
        let ac: Vec<char> = a.chars().collect();
        let bc: Vec<char> = b.chars().collect();
        let (got, want) = (levenshtein(&a, &b), brute_levenshtein(&ac, &bc));
        ensure!(got == want, "pair {k} ({a:?}, {b:?}): {got} != {want}");
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "took {t:?}");
    Ok(format!("1000 pairs in {t:.2?}"))
}

fn edit_set_round_trip() -> Check {
    const VOCAB: [&str; 6] = ["han", "går", "gå", "hem", ".", "till"];
    let mut r = rng(2);
    let seq = |r: &mut ChaCha8Rng| {
        let n = r.random_range(0..=12);
        TokenSequence::from_strs(&(0..n).map(|_| VOCAB[r.random_range(0..VOCAB.len())]).collect::<Vec<_>>())
            .expect("vocabulary tokens are valid")
    };
    for k in 0..10_000 {
        let (s, t) = (seq(&mut r), seq(&mut r));
        let edits = extract_edits(&s, &t);
        let back = apply_edits(&s, &edits).map_err(|e| format!("pair {k}: {e}"))?;
        ensure!(back == t, "pair {k}: {s} -> {t} came back as {back}");
    }
    Ok("10000 pairs".into())
}

fn gleu_sentence(id: &str, src: &str, hyp: &str, refs: &[&str]) -> GleuSentence {
    GleuSentence {
        id: id.into(),
        source: tokenize(src),
        hypothesis: tokenize(hyp),
        references: refs.iter().map(|r| tokenize(r)).collect(),
    }
}

fn gleu_checks() -> Check {
    let cfg = GleuConfig::default();
    let identical = vec![
        gleu_sentence("1", "han gå hem", "han går hem", &["han går hem"]),
        gleu_sentence("2", "jag gillar att spela fotboll med min kompisar", "jag gillar att spela fotboll med mina kompisar", &["jag gillar att spela fotboll med mina kompisar"]),
    ];
    let one = gleu_corpus(&identical, &cfg).map_err(|e| e.to_string())?;
    ensure!(one == 1.0, "hyp == ref scored {one}");

    let hand = vec![
        gleu_sentence("1", "he go to school", "he goes to school", &["he goes to school"]),
        gleu_sentence("2", "he go to school", "he go to school", &["he goes to school"]),
    ];
    let v = gleu_corpus(&hand, &cfg).map_err(|e| e.to_string())?;
    ensure!((v - 0.5534).abs() <= 1e-4, "two-sentence corpus scored {v}");

    let mut r = rng(3);
    let words = ["jag", "du", "går", "gå", "hem", "till", "skolan", "nu", "."];
    let text = |r: &mut ChaCha8Rng| {
        let n = r.random_range(1..=9);
        (0..n).map(|_| words[r.random_range(0..words.len())]).collect::<Vec<_>>().join(" ")
    };
    let mut corpus = Vec::new();
    for i in 0..60 {
        let (s, h) = (text(&mut r), text(&mut r));
        let refs: Vec<String> = (0..r.random_range(1..=3)).map(|_| text(&mut r)).collect();
        let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
        corpus.push(gleu_sentence(&format!("s{i}"), &s, &h, &refs));
    }
    let cfg = GleuConfig {
        num_reference_samples: 200,
        seed: 9,
        ..GleuConfig::default()
    };
    let base = gleu_corpus(&corpus, &cfg).map_err(|e| e.to_string())?;
    for _ in 0..20 {
        corpus.shuffle(&mut r);
        let p = gleu_corpus(&corpus, &cfg).map_err(|e| e.to_string())?;
        ensure!(p.to_bits() == base.to_bits(), "permuted corpus scored {p}, original {base}");
    }
    Ok(format!("identity 1.0, hand corpus {v:.6}, 20 permutations exact"))
}

/// Fails the check if the gate lets anything through to the model.
struct ForbiddenLm;

impl LanguageModel for ForbiddenLm {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError> {
        Err(ScorerError::Transport(format!("model queried for {text:?}")))
    }
}

/// Scores that depend only on text length.
struct FixedLm(f64);

impl LanguageModel for FixedLm {
    fn score(&self, text: &str) -> Result<LmScore, ScorerError> {
        Ok(LmScore {
            log_prob: -self.0 * (1.0 + text.len() as f64 % 7.0),
            token_count: 1 + text.chars().count() as u64,
        })
    }
}

fn scribendi_checks() -> Check {
    let cfg = ScribendiConfig::default();
    let sources = [
        ("1", Cefr::A, "han gå till skolan varje dag"),
        ("2", Cefr::A, "jag gillar att spela fotboll med min kompisar"),
        ("3", Cefr::B, "igår jag åkte till stockholm med tåget"),
        ("4", Cefr::B, "det är viktigt att man lär sig svenska språk"),
        ("5", Cefr::C, "trots att hon var trött hon fortsatte arbeta"),
        ("6", Cefr::C, "många människor tycker att klimatet är en stor problem"),
    ];
    let unchanged: Vec<ScribendiItem> = sources
        .iter()
        .map(|(id, c, s)| ScribendiItem {
            id: id.to_string(),
            cefr: *c,
            source: s.to_string(),
            hypothesis: s.to_string(),
        })
        .collect();
    let mut report = MetricReport::new("Scribendi");
    scribendi_report(&mut report, "Uncorrected", &unchanged, &ForbiddenLm, &cfg).map_err(|e| e.to_string())?;
    for level in [Level::All, Level::Cefr(Cefr::A), Level::Cefr(Cefr::B), Level::Cefr(Cefr::C)] {
        let v = report.get("Uncorrected", level);
        ensure!(v == Some(0.0), "unchanged corpus at {level:?}: {v:?}");
    }

    let he = vec![ScribendiItem {
        id: "he".into(),
        cefr: Cefr::Unknown,
        source: "He is going school.".into(),
        hypothesis: "He He He He He He.".into(),
    }];
    for lm in [&ForbiddenLm as &dyn LanguageModel, &FixedLm(0.1), &FixedLm(50.0)] {
        let s = scribendi_corpus(&he, lm, &cfg).map_err(|e| e.to_string())?;
        ensure!(s == -1.0, "\"He He He He He He.\" scored {s}");
    }

    let mut r = rng(4);
    let corpus_lines = ["han går hem", "hon går till skolan", "vi går hem nu", "han är hemma"];
    let model = NgramModel::train(&corpus_lines, 4, 0.1).map_err(|e| e.to_string())?;
    let words = ["han", "hon", "går", "gå", "hem", "hemma", "till", "skolan", "nu", "är"];
    let items: Vec<ScribendiItem> = (0..500)
        .map(|i| {
            let n = r.random_range(2..=6);
            let src: Vec<&str> = (0..n).map(|_| words[r.random_range(0..words.len())]).collect();
            let mut hyp = src.clone();
            if r.random_bool(0.8) {
                let k = r.random_range(0..hyp.len());
                hyp[k] = words[r.random_range(0..words.len())];
            }
            ScribendiItem {
                id: i.to_string(),
                cefr: [Cefr::A, Cefr::B, Cefr::C][i % 3],
                source: src.join(" "),
                hypothesis: hyp.join(" "),
            }
        })
        .collect();
    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = serial_pool
        .install(|| scribendi_corpus(&items, &model, &cfg))
        .map_err(|e| e.to_string())?;
    // Shards scored on separate threads, then pooled.
    let shards: Vec<Vec<i8>> = std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(37)
            .map(|chunk| s.spawn(|| scribendi_scores(chunk, &model, &cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect::<Result<_, _>>()
    })
    .map_err(|e| e.to_string())?;
    let sum: i64 = shards.iter().flatten().map(|&v| i64::from(v)).sum();
    let sharded = sum as f64 / items.len() as f64;
    ensure!(sharded.to_bits() == serial.to_bits(), "sharded {sharded} != serial {serial}");
    Ok(format!("unchanged 0 at all levels, repetition -1, shard score {serial:.4} == serial"))
}

fn qwk_checks() -> Check {
    let kappa = |k, pairs| qwk(&RatingMatrix::new(k, pairs).map_err(|e| e.to_string())?).map_err(|e| e.to_string());
    let same: Vec<(u32, u32)> = (0..40).map(|i| (i % 4 + 1, i % 4 + 1)).collect();
    let one = kappa(4, same)?;
    ensure!(one == 1.0, "identical raters: {one}");
    let anti = kappa(2, vec![(1, 2), (2, 1)])?;
    ensure!(anti == -1.0, "k=2 antisymmetric: {anti}");
    let mut r = rng(5);
    let random: Vec<(u32, u32)> = (0..10_000)
        .map(|_| (r.random_range(1..=4), r.random_range(1..=4)))
        .collect();
    let mc = kappa(4, random)?;
    ensure!(mc.abs() < 0.05, "independent raters: {mc}");
    Ok(format!("1.0, -1.0, Monte-Carlo {mc:+.4}"))
}

fn released_data_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("GEC_EVAL_RELEASED_DATA") {
        return Some(PathBuf::from(p));
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/released");
    root.exists().then_some(root)
}

fn system_key(name: &str) -> String {
    let k: String = name.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect();
    match k.as_str() {
        "free" | "humanfree" => "humanfree".into(),
        "fluent" | "humanfluent" => "humanfluent".into(),
        "gpt3" | "gpt" => "gpt3".into(),
        other => other.into(),
    }
}

fn dataset_reproduction() -> Check {
    let start = Instant::now();
    let path = released_data_path().ok_or_else(|| {
        "released annotation data not found (set GEC_EVAL_RELEASED_DATA or place it under data/released)".to_string()
    })?;
    let records = load_annotations(&path).map_err(|e| e.to_string())?;
    let report = nld_report(&records).map_err(|e| e.to_string())?;
    let lookup = |want: &str| {
        report
            .systems()
            .iter()
            .find(|s| system_key(s) == system_key(want))
            .cloned()
            .ok_or_else(|| format!("system {want} not in data (found {:?})", report.systems()))
    };
    let table4 = [
        ("Granska", [0.126, 0.119, 0.180, 0.079]),
        ("MT", [0.113, 0.095, 0.158, 0.087]),
        ("GPT-3", [0.076, 0.068, 0.112, 0.050]),
        ("Human fluent", [0.034, 0.034, 0.045, 0.022]),
        ("Human free", [0.029, 0.030, 0.034, 0.025]),
    ];
    let levels = [Level::All, Level::Cefr(Cefr::A), Level::Cefr(Cefr::B), Level::Cefr(Cefr::C)];
    for (system, values) in table4 {
        let name = lookup(system)?;
        for (level, want) in levels.iter().zip(values) {
            let got = report.get(&name, *level).ok_or_else(|| format!("{system} has no {level:?} value"))?;
            ensure!((got - want).abs() <= 0.005, "{system} {level:?}: NLD {got:.4}, expected {want}");
        }
    }
    let hist = distribution(&records, Dimension::Meaning).map_err(|e| e.to_string())?;
    let granska = hist
        .iter()
        .find(|h| system_key(&h.system) == "granska")
        .ok_or("no Granska meaning scores")?;
    let row = [granska.levels[0], granska.levels[1], granska.levels[2], granska.levels[3], granska.other];
    ensure!(row == [125, 34, 11, 13, 9], "Granska meaning distribution {row:?}");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!("{} records in {t:.2?}", records.len()))
}

fn matrix(points: &[[f64; 2]]) -> DistanceMatrix {
    let rows = points
        .iter()
        .map(|p| points.iter().map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()).collect())
        .collect();
    DistanceMatrix::new((0..points.len()).map(|i| format!("p{i}")).collect(), rows).expect("valid matrix")
}

fn monotone(history: &[f64]) -> bool {
    history.windows(2).all(|w| w[1] <= w[0])
}

fn mds_checks() -> Check {
    let collinear = matrix(&[[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]);
    let cfg = MdsConfig {
        max_iterations: 500,
        ..MdsConfig::default()
    };
    let e = mds_embed_with(&collinear, &cfg).map_err(|e| e.to_string())?;
    let iters = e.stress_history.len() - 1;
    ensure!(e.stress < 1e-9 && iters <= 500, "collinear stress {} after {iters} iterations", e.stress);

    let mut r = rng(6);
    let planar: Vec<[f64; 2]> = (0..10).map(|_| [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]).collect();
    let d = matrix(&planar);
    let p = mds_embed_with(&d, &cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            worst = worst.max((p.distance(i, j) - d.get(i, j)).abs());
        }
    }
    ensure!(worst <= 1e-3, "planar distances off by {worst}");

    let mut fixtures = vec![collinear, d, matrix(&[[0.0, 0.0], [1.0, 0.0]])];
    for seed in 0..5 {
        let mut r = rng(100 + seed);
        let n = r.random_range(3..12);
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = r.random_range(0.0..1.0);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        fixtures.push(DistanceMatrix::new((0..n).map(|i| i.to_string()).collect(), rows).unwrap());
    }
    for (k, m) in fixtures.iter().enumerate() {
        for seed in 0..4 {
            let single = MdsConfig {
                n_init: 1,
                seed,
                ..cfg.clone()
            };
            let e = mds_embed_with(m, &single).map_err(|e| e.to_string())?;
            ensure!(monotone(&e.stress_history), "fixture {k} seed {seed}: stress increased");
        }
    }
    Ok(format!("collinear stress {:.1e} in {iters} iterations, planar error {worst:.1e}", e.stress))
}

fn baseline_checks() -> Check {
    let mut corpus = vec!["han går hem"; 50];
    corpus.extend(["hon går till skolan", "vi går hem nu", "han är hemma"]);
    let model = NgramModel::train(&corpus, 5, 0.1).map_err(|e| e.to_string())?;
    let lexicon = Lexicon::from_words(&["han", "går", "gå", "hem"]).map_err(|e| e.to_string())?;
    let cfg = BaselineConfig::default();
    let (out, trace) = correct_sentence("han gå hem", &model, &lexicon, &cfg);
    ensure!(out == "han går hem", "corrected to {out:?}");
    ensure!(trace.len() == 1, "{} accepted steps", trace.len());
    let (again, trace2) = correct_sentence(&out, &model, &lexicon, &cfg);
    ensure!(again == out && trace2.is_empty(), "second pass changed {out:?} to {again:?}");

    let mut r = rng(7);
    let words: Vec<&str> = vec!["han", "går", "gå", "hem", "hen", "gr", "hemm", "hang", "å", "x"];
    let small = BaselineConfig {
        min_improvement: 0.01,
        max_iterations: 4,
        ..BaselineConfig::default()
    };
    for k in 0..1000 {
        let n = r.random_range(1..=6);
        let s: Vec<&str> = (0..n).map(|_| words[r.random_range(0..words.len())]).collect();
        let s = s.join(" ");
        let (_, t) = correct_sentence(&s, &model, &lexicon, &small);
        ensure!(t.len() <= small.max_iterations, "input {k} {s:?}: {} steps", t.len());
    }
    Ok("one-step correction, idempotent, 1000 random inputs terminate".into())
}

fn item(i: usize) -> AnnotationItem {
    AnnotationItem {
        item_id: format!("{i}/MT"),
        sentence_id: i.to_string(),
        system: "MT".into(),
        cefr: Cefr::B,
        output: format!("utdata {i}"),
        reference: format!("referens {i}"),
        source: format!("källa {i}"),
        batch: None,
    }
}

#[derive(Clone, Copy, Debug)]
enum Call {
    Next,
    Postedit,
    EmptyPostedit,
    Confirm,
    Reject,
    Scores,
}

fn triple(v: u8) -> ScoreTriple {
    let s = LikertScore::Level(v);
    ScoreTriple {
        grammaticality: s,
        fluency: s,
        meaning: s,
    }
}

/// Runs one call sequence and checks the workflow rules after every call.
fn check_sequence(seq: &[Call]) -> Result<(), String> {
    use gec_eval::annotation::WorkflowState as W;
    let svc = AnnotationService::new(vec![item(1)], 0).map_err(|e| e.to_string())?;
    let sid = svc.open_session("a", None).map_err(|e| e.to_string())?;
    let (mut confirmed, mut scored) = (false, false);
    for c in seq {
        let before = svc.progress("a", "1/MT");
        let ok = match c {
            Call::Next => svc.next_item(&sid).is_ok(),
            Call::Postedit => svc.submit_postedit(&sid, "1/MT", "text").is_ok(),
            Call::EmptyPostedit => svc.submit_postedit(&sid, "1/MT", " ").is_ok(),
            Call::Confirm => svc.confirm_meaning(&sid, "1/MT", true).is_ok(),
            Call::Reject => svc.confirm_meaning(&sid, "1/MT", false).is_ok(),
            Call::Scores => svc.submit_scores(&sid, "1/MT", triple(2)).is_ok(),
        };
        let after = svc.progress("a", "1/MT");
        let state = after.as_ref().map(|p| p.state);
        if ok {
            match c {
                Call::Confirm => confirmed = true,
                Call::Postedit | Call::Reject => confirmed = false,
                Call::Scores => scored = true,
                _ => {}
            }
        } else {
            ensure!(before == after, "{seq:?}: rejected {c:?} changed state");
        }
        ensure!(!(matches!(c, Call::EmptyPostedit) && ok), "{seq:?}: empty post-edit accepted");
        ensure!(state != Some(W::Scoring) || confirmed, "{seq:?}: scoring without confirmation");
        ensure!(state != Some(W::Done) || scored, "{seq:?}: done without scores");
        if let Some(p) = &after {
            ensure!(p.state == W::PostEditing || p.postedit.is_some(), "{seq:?}: {:?} without a post-edit", p.state);
        }
    }
    Ok(())
}

fn annotation_checks() -> Check {
    const CALLS: [Call; 6] = [Call::Next, Call::Postedit, Call::EmptyPostedit, Call::Confirm, Call::Reject, Call::Scores];
    let mut frontier: Vec<Vec<Call>> = vec![Vec::new()];
    let mut checked = 0usize;
    for _ in 0..6 {
        let mut next = Vec::with_capacity(frontier.len() * CALLS.len());
        for s in &frontier {
            for c in CALLS {
                let mut t = s.clone();
                t.push(c);
                check_sequence(&t)?;
                checked += 1;
                next.push(t);
            }
        }
        frontier = next;
    }

    // Crash replay: kill mid-item with a torn final write, restart, compare.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let log = dir.path().join("events.jsonl");
    let pool: Vec<AnnotationItem> = (0..8).map(item).collect();
    let before = {
        let svc = AnnotationService::with_log(pool.clone(), 5, &log).map_err(|e| e.to_string())?;
        for who in ["a", "b"] {
            let sid = svc.open_session(who, None).map_err(|e| e.to_string())?;
            for k in 0..4u8 {
                let next = svc.next_item(&sid).map_err(|e| e.to_string())?;
                let id = next.view().ok_or("pool ran out")?.item_id().to_string();
                svc.submit_postedit(&sid, &id, "rättad").map_err(|e| e.to_string())?;
                svc.confirm_meaning(&sid, &id, k % 2 == 0).map_err(|e| e.to_string())?;
                if k % 2 == 1 {
                    svc.submit_postedit(&sid, &id, "rättad igen").map_err(|e| e.to_string())?;
                    svc.confirm_meaning(&sid, &id, true).map_err(|e| e.to_string())?;
                }
                svc.submit_scores(&sid, &id, triple(k % 4 + 1)).map_err(|e| e.to_string())?;
            }
            let next = svc.next_item(&sid).map_err(|e| e.to_string())?;
            let id = next.view().ok_or("pool ran out")?.item_id().to_string();
            svc.submit_postedit(&sid, &id, "halvvägs").map_err(|e| e.to_string())?;
        }
        svc.export(&ExportFilter::default())
    };
    let mut raw = std::fs::read(&log).map_err(|e| e.to_string())?;
    raw.extend_from_slice(b"{\"seq\":999,\"timestamp_ms\":1,\"sess");
    std::fs::write(&log, &raw).map_err(|e| e.to_string())?;
    let revived = AnnotationService::with_log(pool.clone(), 5, &log).map_err(|e| e.to_string())?;
    let after = revived.export(&ExportFilter::default());
    ensure!(after.as_bytes() == before.as_bytes(), "export differs after crash replay");
    let records = EventLog::read(&log).map_err(|e| e.to_string())?;
    let replayed = AnnotationService::replay(pool, 5, &records).map_err(|e| e.to_string())?;
    ensure!(replayed.export(&ExportFilter::default()) == before, "read-only replay differs");

    // Step-one payloads over a full pool, including revisits after rejection.
    let pool: Vec<AnnotationItem> = (0..50).map(item).collect();
    let svc = AnnotationService::new(pool, 11).map_err(|e| e.to_string())?;
    let sid = svc.open_session("c", None).map_err(|e| e.to_string())?;
    let mut step_one = 0usize;
    let inspect = |v: &StepView| -> Result<(), String> {
        let json: serde_json::Value = serde_json::to_value(v).map_err(|e| e.to_string())?;
        ensure!(json.get("reference").is_none() && json.get("source").is_none(), "step one shows {json}");
        let text = json.to_string();
        ensure!(!text.contains("referens") && !text.contains("källa"), "step one leaks text: {text}");
        Ok(())
    };
    while let Some(v) = svc.next_item(&sid).map_err(|e| e.to_string())?.view().cloned() {
        inspect(&v)?;
        let id = v.item_id().to_string();
        svc.submit_postedit(&sid, &id, "försök").map_err(|e| e.to_string())?;
        let back = svc.confirm_meaning(&sid, &id, false).map_err(|e| e.to_string())?;
        inspect(&back)?;
        step_one += 2;
        svc.submit_postedit(&sid, &id, "försök två").map_err(|e| e.to_string())?;
        svc.confirm_meaning(&sid, &id, true).map_err(|e| e.to_string())?;
        svc.submit_scores(&sid, &id, triple(3)).map_err(|e| e.to_string())?;
    }
    Ok(format!("{checked} sequences, crash replay identical, {step_one} step-one views clean"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gec-eval"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Ok(out.stdout)
}

fn cli_determinism() -> Check {
    let (corpus, versions) = (fixture("corpus.jsonl"), fixture("versions.tsv"));
    let (g, m, t) = (
        format!("Granska={}", fixture("granska.txt")),
        format!("MT={}", fixture("mt.txt")),
        format!("GPT-3={}", fixture("gpt3.txt")),
    );
    let commands: Vec<Vec<&str>> = vec![
        vec!["score", "--metric", "gleu", "--metric", "fbeta", "--corpus", &corpus, "--hyp", &g, "--hyp", &m, "--hyp", &t],
        vec!["--format", "json", "score", "--metric", "gleu", "--corpus", &corpus, "--hyp", &g, "--hyp", &t],
        vec!["tree", "--versions", &versions],
        vec!["--format", "json", "tree", "--versions", &versions],
    ];
    let mut runs = 0;
    for cmd in &commands {
        let first = cli(cmd)?;
        for jobs in [None, Some("1"), Some("2"), Some("7")] {
            let mut args: Vec<&str> = Vec::new();
            if let Some(j) = jobs {
                args.extend(["--jobs", j]);
            }
            args.extend(cmd.iter().copied());
            args.extend(["--seed", "0"]);
            ensure!(cli(&args)? == first, "{args:?} differs from first run");
            runs += 1;
        }
    }
    Ok(format!("{runs} repeated runs byte-identical"))
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] = [
        ("edit-distance oracle equivalence", edit_distance_oracle),
        ("EditSet round trip", edit_set_round_trip),
        ("GLEU", gleu_checks),
        ("Scribendi", scribendi_checks),
        ("QWK", qwk_checks),
        ("dataset reproduction", dataset_reproduction),
        ("MDS", mds_checks),
        ("baseline", baseline_checks),
        ("annotation service", annotation_checks),
        ("end-to-end determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
