//! Version sets, pairwise distance matrices, metric MDS and the provenance
//! tree drawn over the embedding.

use crate::corpus::read_to_string;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::text::nld;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

pub const ROOT_LABEL: &str = "original";

/// All versions of one sentence, in label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionSet {
    pub sentence_id: String,
    versions: Vec<(String, String)>,
}

impl VersionSet {
    pub fn new(sentence_id: impl Into<String>, versions: Vec<(String, String)>) -> Result<Self> {
        let sentence_id = sentence_id.into();
        let mut seen = BTreeSet::new();
        for (label, _) in &versions {
            if label.is_empty() {
                return Err(Error::Input(format!("sentence {sentence_id}: empty version label")));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::Input(format!("sentence {sentence_id}: duplicate label {label:?}")));
            }
        }
        Ok(VersionSet { sentence_id, versions })
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.versions.iter().map(|(l, _)| l.as_str())
    }

    pub fn text(&self, label: &str) -> Option<&str> {
        self.versions.iter().find(|(l, _)| l == label).map(|(_, t)| t.as_str())
    }

    pub fn len(&self) -> usize {
        self.versions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }
}

/// Reads `sentence_id<TAB>label<TAB>text` lines. Rows of one sentence may be
/// interleaved with others; label order is the order of first appearance.
pub fn parse_version_sets(path: &Path, content: &str) -> Result<Vec<VersionSet>> {
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(String, String)>> = HashMap::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.splitn(3, '\t').collect();
        if parts.len() != 3 {
            return Err(Error::parse(path, i + 1, "expected sentence_id, label and text separated by tabs"));
        }
        let (id, label, text) = (parts[0].trim(), parts[1].trim(), parts[2]);
        if id.is_empty() || label.is_empty() {
            return Err(Error::parse(path, i + 1, "empty sentence id or label"));
        }
        let entry = rows.entry(id.to_string()).or_insert_with(|| {
            order.push(id.to_string());
            Vec::new()
        });
        if entry.iter().any(|(l, _)| l == label) {
            return Err(Error::parse(path, i + 1, format!("duplicate label {label:?} for sentence {id}")));
        }
        entry.push((label.to_string(), text.to_string()));
    }
    order
        .into_iter()
        .map(|id| {
            let versions = rows.remove(&id).unwrap_or_default();
            VersionSet::new(id, versions)
        })
        .collect()
}

pub fn read_version_sets(path: &Path) -> Result<Vec<VersionSet>> {
    parse_version_sets(path, &read_to_string(path)?)
}

/// Square symmetric matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input(format!("distance matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(Error::Input(format!("diagonal entry {i} is {}", rows[i][i])));
            }
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Input(format!("entry ({i}, {j}) is {v}")));
                }
                if (v - rows[j][i]).abs() > 1e-12 {
                    return Err(Error::Input(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix {
            labels,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.labels.len().max(1)).map(<[f64]>::to_vec).collect()
    }
}

/// Mean per-sentence NLD between every pair of labels. Labels follow the
/// order of the first set; every set must have the same label inventory.
pub fn pairwise_nld_matrix(sets: &[VersionSet]) -> Result<DistanceMatrix> {
    let first = sets
        .first()
        .ok_or_else(|| Error::Input("no version sets given".into()))?;
    let labels: Vec<String> = first.labels().map(str::to_string).collect();
    let inventory: BTreeSet<&str> = first.labels().collect();
    let bad: Vec<&str> = sets
        .iter()
        .filter(|s| s.labels().collect::<BTreeSet<_>>() != inventory)
        .map(|s| s.sentence_id.as_str())
        .collect();
    if !bad.is_empty() {
        return Err(Error::Input(format!(
            "label inventory differs from sentence {} in: {}",
            first.sentence_id,
            bad.join(", ")
        )));
    }
    let n = labels.len();
    let per_sentence: Vec<Vec<f64>> = sets
        .par_iter()
        .map(|s| {
            let texts: Vec<&str> = labels.iter().map(|l| s.text(l).unwrap_or_default()).collect();
            let mut upper = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    upper.push(nld(texts[i], texts[j]));
                }
            }
            upper
        })
        .collect();
    let mut sums = vec![0.0; n * (n.saturating_sub(1)) / 2];
    for upper in &per_sentence {
        for (acc, v) in sums.iter_mut().zip(upper) {
            *acc += v;
        }
    }
    let count = sets.len() as f64;
    let mut rows = vec![vec![0.0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let v = sums[k] / count;
            rows[i][j] = v;
            rows[j][i] = v;
            k += 1;
        }
    }
    DistanceMatrix::new(labels, rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdsConfig {
    pub max_iterations: usize,
    /// Stop once a step improves stress by no more than this fraction of
    /// the current stress.
    pub tolerance: f64,
    /// Number of random starts; the lowest final stress wins.
    pub n_init: usize,
    pub seed: u64,
}

impl Default for MdsConfig {
    fn default() -> Self {
        MdsConfig {
            max_iterations: 300,
            tolerance: 1e-9,
            n_init: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding2D {
    pub labels: Vec<String>,
    pub coords: Vec<[f64; 2]>,
    pub stress: f64,
    /// Stress of the initial configuration followed by one value per
    /// accepted iteration.
    pub stress_history: Vec<f64>,
}

impl Embedding2D {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(&self.coords[i], &self.coords[j])
    }

    pub fn coord(&self, label: &str) -> Option<[f64; 2]> {
        self.labels.iter().position(|l| l == label).map(|i| self.coords[i])
    }
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Raw stress: sum over i < j of (d_ij - |x_i - x_j|)^2.
pub fn raw_stress(d: &DistanceMatrix, x: &[[f64; 2]]) -> f64 {
    let n = d.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = d.get(i, j) - dist(&x[i], &x[j]);
            s += r * r;
        }
    }
    s
}

fn guttman_transform(d: &DistanceMatrix, x: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let n = d.len();
    let mut out = vec![[0.0; 2]; n];
    for i in 0..n {
        let mut acc = [0.0; 2];
        for j in 0..n {
            if i == j {
                continue;
            }
            let dij = dist(&x[i], &x[j]);
            let b = if dij > 0.0 { d.get(i, j) / dij } else { 0.0 };
            acc[0] += b * (x[i][0] - x[j][0]);
            acc[1] += b * (x[i][1] - x[j][1]);
        }
        out[i] = [acc[0] / n as f64, acc[1] / n as f64];
    }
    out
}

fn center(x: &mut [[f64; 2]]) {
    let n = x.len() as f64;
    let cx = x.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = x.iter().map(|p| p[1]).sum::<f64>() / n;
    for p in x.iter_mut() {
        p[0] -= cx;
        p[1] -= cy;
    }
}

fn smacof_run(d: &DistanceMatrix, cfg: &MdsConfig, seed: u64) -> (Vec<[f64; 2]>, Vec<f64>) {
    let n = d.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
        .collect();
    center(&mut x);
    let mut stress = raw_stress(d, &x);
    let mut history = vec![stress];
    for _ in 0..cfg.max_iterations {
        if stress == 0.0 {
            break;
        }
        let mut next = guttman_transform(d, &x);
        center(&mut next);
        let mut s = raw_stress(d, &next);
        // Extrapolate along the Guttman direction X + a(G(X) - X) with
        // a = 2, 4, 8, ... while that keeps lowering stress. Near a
        // degenerate (lower-rank) optimum the plain step crawls.
        let guttman = next.clone();
        let mut alpha = 2.0;
        while alpha <= 1e9 {
            let trial: Vec<[f64; 2]> = guttman
                .iter()
                .zip(&x)
                .map(|(g, p)| [p[0] + alpha * (g[0] - p[0]), p[1] + alpha * (g[1] - p[1])])
                .collect();
            let ts = raw_stress(d, &trial);
            if ts >= s {
                break;
            }
            next = trial;
            s = ts;
            alpha *= 2.0;
        }
        // The transform never increases stress in exact arithmetic; a rise
        // here is rounding noise at convergence.
        if s > stress {
            break;
        }
        let improvement = stress - s;
        x = next;
        stress = s;
        history.push(stress);
        if improvement <= cfg.tolerance * history[history.len() - 2] {
            break;
        }
    }
    (x, history)
}

/// Metric MDS into two dimensions by stress majorization (SMACOF) from
/// seeded random starts. Coordinates are centred at the origin.
pub fn mds_embed_with(d: &DistanceMatrix, cfg: &MdsConfig) -> Result<Embedding2D> {
    let n = d.len();
    if n < 2 {
        return Err(Error::Input(format!("MDS needs at least 2 labels, got {n}")));
    }
    if cfg.n_init == 0 || !(cfg.tolerance >= 0.0) {
        return Err(Error::Config("MDS needs n_init >= 1 and a non-negative tolerance".into()));
    }
    if d.values.iter().all(|&v| v == 0.0) {
        return Ok(Embedding2D {
            labels: d.labels.clone(),
            coords: vec![[0.0; 2]; n],
            stress: 0.0,
            stress_history: vec![0.0],
        });
    }
    let mut best: Option<(Vec<[f64; 2]>, Vec<f64>)> = None;
    for run in 0..cfg.n_init {
        let (x, history) = smacof_run(d, cfg, derive_seed(cfg.seed, &format!("mds-start-{run}")));
        let better = match &best {
            Some((_, h)) => history.last() < h.last(),
            None => true,
        };
        if better {
            best = Some((x, history));
        }
    }
    let (coords, stress_history) = best.expect("n_init >= 1");
    Ok(Embedding2D {
        labels: d.labels.clone(),
        coords,
        stress: *stress_history.last().expect("history starts with the initial stress"),
        stress_history,
    })
}

pub fn mds_embed(d: &DistanceMatrix, iterations: usize, seed: u64) -> Result<Embedding2D> {
    mds_embed_with(
        d,
        &MdsConfig {
            max_iterations: iterations,
            seed,
            ..MdsConfig::default()
        },
    )
}

/// Who made a transformation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Machine,
    Human(String),
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Machine => f.write_str("machine"),
            EdgeKind::Human(a) => write!(f, "human:{a}"),
        }
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "machine" {
            return Ok(EdgeKind::Machine);
        }
        match s.strip_prefix("human:") {
            Some(a) if !a.trim().is_empty() => Ok(EdgeKind::Human(a.trim().to_string())),
            _ => Err(Error::Input(format!("edge kind must be \"machine\" or \"human:<annotator>\", got {s:?}"))),
        }
    }
}

impl Serialize for EdgeKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Parent of every non-root label and the kind of the edge into it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    labels: Vec<String>,
    parents: BTreeMap<String, (String, EdgeKind)>,
}

impl Provenance {
    pub fn new() -> Self {
        Provenance {
            labels: vec![ROOT_LABEL.to_string()],
            parents: BTreeMap::new(),
        }
    }

    /// Declares `label` as derived from `parent`. Structural checks happen
    /// in [`Provenance::validate`].
    pub fn add(&mut self, label: &str, parent: &str, kind: EdgeKind) -> &mut Self {
        if !self.labels.iter().any(|l| l == label) {
            self.labels.push(label.to_string());
        }
        self.parents.insert(label.to_string(), (parent.to_string(), kind));
        self
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parent(&self, label: &str) -> Option<(&str, &EdgeKind)> {
        self.parents.get(label).map(|(p, k)| (p.as_str(), k))
    }

    pub fn validate(&self) -> Result<()> {
        if self.parents.contains_key(ROOT_LABEL) {
            return Err(Error::InvalidTree(format!("root {ROOT_LABEL:?} cannot have a parent")));
        }
        let known: BTreeSet<&str> = self.labels.iter().map(String::as_str).collect();
        for (label, (parent, _)) in &self.parents {
            if !known.contains(parent.as_str()) {
                return Err(Error::InvalidTree(format!("{label:?} has missing parent {parent:?}")));
            }
        }
        for label in &self.labels {
            let mut cur = label.as_str();
            let mut steps = 0;
            while let Some((parent, _)) = self.parents.get(cur) {
                cur = parent;
                steps += 1;
                if steps > self.labels.len() {
                    return Err(Error::InvalidTree(format!("cycle through {label:?}")));
                }
            }
            if cur != ROOT_LABEL {
                return Err(Error::InvalidTree(format!("{label:?} is not connected to {ROOT_LABEL:?}")));
            }
        }
        Ok(())
    }

    /// `label<TAB>parent<TAB>kind` lines; the root may be listed with an
    /// empty parent.
    pub fn parse(path: &Path, content: &str) -> Result<Self> {
        let mut p = Provenance::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').map(str::trim).collect();
            match parts.as_slice() {
                [label] | [label, ""] | [label, "", ""] if *label == ROOT_LABEL => {}
                [label, parent, kind] if !label.is_empty() && !parent.is_empty() => {
                    let kind = kind.parse().map_err(|e: Error| Error::parse(path, i + 1, e.to_string()))?;
                    p.add(label, parent, kind);
                }
                _ => return Err(Error::parse(path, i + 1, "expected label, parent and kind separated by tabs")),
            }
        }
        p.validate().map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(path, &read_to_string(path)?)
    }

    /// Twelve versions: the original, its minimal human correction, three
    /// system outputs, two fluency rewrites of the minimal correction, and a
    /// post-edit of each system output and rewrite.
    pub fn default_layout() -> Self {
        let mut p = Provenance::new();
        p.add("grammatical", ROOT_LABEL, EdgeKind::Human("swell".into()));
        for system in ["Granska", "MT", "GPT-3"] {
            p.add(system, ROOT_LABEL, EdgeKind::Machine);
        }
        p.add("fluent", "grammatical", EdgeKind::Human("fluent".into()));
        p.add("free", "grammatical", EdgeKind::Human("free".into()));
        for parent in ["Granska", "MT", "GPT-3", "fluent", "free"] {
            p.add(&format!("{parent} post-edit"), parent, EdgeKind::Human("post-editor".into()));
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeNode {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionTree {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
}

/// Places provenance nodes at their embedding coordinates. Every provenance
/// label must be embedded and every embedded label must have provenance.
pub fn build_tree(provenance: &Provenance, e: &Embedding2D) -> Result<CorrectionTree> {
    provenance.validate()?;
    let embedded: BTreeSet<&str> = e.labels.iter().map(String::as_str).collect();
    let declared: BTreeSet<&str> = provenance.labels.iter().map(String::as_str).collect();
    if embedded != declared {
        let missing: Vec<&str> = declared.difference(&embedded).copied().collect();
        let extra: Vec<&str> = embedded.difference(&declared).copied().collect();
        return Err(Error::InvalidTree(format!(
            "labels differ: not embedded [{}], no provenance [{}]",
            missing.join(", "),
            extra.join(", ")
        )));
    }
    let nodes = provenance
        .labels
        .iter()
        .map(|label| {
            let [x, y] = e.coord(label).expect("checked above");
            TreeNode {
                label: label.clone(),
                x,
                y,
            }
        })
        .collect();
    let edges = provenance
        .labels
        .iter()
        .filter_map(|label| {
            provenance.parent(label).map(|(parent, kind)| TreeEdge {
                from: parent.to_string(),
                to: label.clone(),
                kind: kind.clone(),
            })
        })
        .collect();
    Ok(CorrectionTree { nodes, edges })
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const DASHES: [&str; 3] = ["dashed", "dotted", "bold"];

impl CorrectionTree {
    fn annotators(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.edges {
            if let EdgeKind::Human(a) = &e.kind {
                if !out.contains(&a.as_str()) {
                    out.push(a);
                }
            }
        }
        out
    }

    fn edge_style(&self, kind: &EdgeKind) -> (&'static str, &'static str) {
        match kind {
            EdgeKind::Machine => ("#000000", "solid"),
            EdgeKind::Human(a) => {
                let i = self.annotators().iter().position(|x| x == a).unwrap_or(0);
                (PALETTE[i % PALETTE.len()], DASHES[i % DASHES.len()])
            }
        }
    }

    fn node(&self, label: &str) -> &TreeNode {
        self.nodes.iter().find(|n| n.label == label).expect("edge endpoints are nodes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes") + "\n"
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph correction_tree {\n  node [shape=ellipse, fontsize=10];\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {} [pos=\"{:.4},{:.4}!\"];", quote(&n.label), n.x * 10.0, n.y * 10.0);
        }
        for e in &self.edges {
            let (color, style) = self.edge_style(&e.kind);
            let _ = writeln!(
                out,
                "  {} -> {} [class={}, color=\"{color}\", style={style}];",
                quote(&e.from),
                quote(&e.to),
                quote(&e.kind.to_string()),
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 600.0;
        const MARGIN: f64 = 60.0;
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for n in &self.nodes {
            lo_x = lo_x.min(n.x);
            hi_x = hi_x.max(n.x);
            lo_y = lo_y.min(n.y);
            hi_y = hi_y.max(n.y);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y);
        let scale = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 0.0 };
        let px = |n: &TreeNode| (MARGIN + (n.x - lo_x) * scale, SIZE - MARGIN - (n.y - lo_y) * scale);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        );
        for e in &self.edges {
            let (x1, y1) = px(self.node(&e.from));
            let (x2, y2) = px(self.node(&e.to));
            let (color, style) = self.edge_style(&e.kind);
            let dash = match style {
                "dashed" => " stroke-dasharray=\"6,4\"",
                "dotted" => " stroke-dasharray=\"2,3\"",
                _ => "",
            };
            let _ = writeln!(
                out,
                "<line class=\"{}\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>",
                xml_escape(&e.kind.to_string())
            );
        }
        for n in &self.nodes {
            let (x, y) = px(n);
            let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"#333333\"/>");
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                x + 6.0,
                y - 6.0,
                xml_escape(&n.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
