use super::export::{agreement_report, render_export, AgreementReport, ExportFilter};
use super::{
    AnnotationError, AnnotationItem, Event, EventLog, EventRecord, ItemProgress, NextItem, RatingRecord, StepView,
    WorkflowState,
};
use crate::metrics::{Dimension, ScoreTriple};
use crate::seed::derive_seed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

type Outcome<T> = std::result::Result<T, AnnotationError>;

#[derive(Debug, Clone)]
struct Session {
    annotator: String,
    order: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
struct State {
    sessions: HashMap<String, Session>,
    /// Keyed by (annotator, item_id).
    progress: BTreeMap<(String, String), ItemProgress>,
    in_flight: HashMap<String, String>,
}

#[derive(Debug)]
struct Inner {
    state: State,
    log: Option<EventLog>,
    next_seq: u64,
}

/// The post-edit, meaning check and scoring workflow over a fixed pool.
///
/// All state is derived from the event stream: every accepted call appends
/// one event and reopening the same log replays it.
#[derive(Debug)]
pub struct AnnotationService {
    pool: Vec<AnnotationItem>,
    index: HashMap<String, usize>,
    seed: u64,
    inner: Mutex<Inner>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

impl AnnotationService {
    /// An in-memory service; nothing is persisted.
    pub fn new(pool: Vec<AnnotationItem>, seed: u64) -> Outcome<Self> {
        let mut index = HashMap::with_capacity(pool.len());
        for (i, item) in pool.iter().enumerate() {
            if item.item_id.is_empty() {
                return Err(AnnotationError::Pool(format!("item {i} has an empty id")));
            }
            if index.insert(item.item_id.clone(), i).is_some() {
                return Err(AnnotationError::Pool(format!("duplicate item id {}", item.item_id)));
            }
            if item.reference.trim().is_empty() || item.source.trim().is_empty() {
                return Err(AnnotationError::Pool(format!(
                    "item {} lacks a source or reference",
                    item.item_id
                )));
            }
        }
        Ok(AnnotationService {
            pool,
            index,
            seed,
            inner: Mutex::new(Inner {
                state: State::default(),
                log: None,
                next_seq: 1,
            }),
        })
    }

    /// A service persisted to `log_path`, restored from any events already
    /// in it.
    pub fn with_log(pool: Vec<AnnotationItem>, seed: u64, log_path: &Path) -> Outcome<Self> {
        let service = Self::new(pool, seed)?;
        let (log, records) = EventLog::open(log_path)?;
        {
            let mut inner = service.lock();
            for rec in &records {
                service.check(&inner.state, &rec.session_id, &rec.annotator_id, &rec.event).map_err(|e| {
                    AnnotationError::Log {
                        path: log_path.display().to_string(),
                        message: format!("event {} does not replay: {e}", rec.seq),
                    }
                })?;
                service.commit(&mut inner.state, &rec.session_id, &rec.annotator_id, &rec.event);
                inner.next_seq = rec.seq + 1;
            }
            inner.log = Some(log);
        }
        tracing::info!(events = records.len(), path = %log_path.display(), "annotation log replayed");
        Ok(service)
    }

    /// Rebuilds state from records without a backing file.
    pub fn replay(pool: Vec<AnnotationItem>, seed: u64, records: &[EventRecord]) -> Outcome<Self> {
        let service = Self::new(pool, seed)?;
        {
            let mut inner = service.lock();
            for rec in records {
                service.check(&inner.state, &rec.session_id, &rec.annotator_id, &rec.event)?;
                service.commit(&mut inner.state, &rec.session_id, &rec.annotator_id, &rec.event);
                inner.next_seq = rec.seq + 1;
            }
        }
        Ok(service)
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn pool(&self) -> &[AnnotationItem] {
        &self.pool
    }

    pub fn item(&self, item_id: &str) -> Option<&AnnotationItem> {
        self.index.get(item_id).map(|&i| &self.pool[i])
    }

    fn check(&self, state: &State, session_id: &str, annotator: &str, event: &Event) -> Outcome<()> {
        if let Event::SessionOpened { .. } = event {
            if state.sessions.contains_key(session_id) {
                return Err(AnnotationError::Validation(format!("session {session_id} already exists")));
            }
            if annotator.trim().is_empty() {
                return Err(AnnotationError::Validation("annotator id is empty".into()));
            }
            return Ok(());
        }
        let session = state
            .sessions
            .get(session_id)
            .ok_or_else(|| AnnotationError::UnknownSession(session_id.to_string()))?;
        if session.annotator != annotator {
            return Err(AnnotationError::Validation(format!(
                "session {session_id} belongs to {}",
                session.annotator
            )));
        }
        let item_id = event.item_id().expect("non-session events name an item");
        if !self.index.contains_key(item_id) {
            return Err(AnnotationError::UnknownItem(item_id.to_string()));
        }
        let key = (annotator.to_string(), item_id.to_string());
        if let Event::ItemAssigned { .. } = event {
            if let Some(current) = state.in_flight.get(annotator) {
                return Err(AnnotationError::InFlight {
                    annotator: annotator.to_string(),
                    item_id: current.clone(),
                });
            }
            if state.progress.contains_key(&key) {
                return Err(AnnotationError::Validation(format!(
                    "item {item_id} was already assigned to {annotator}"
                )));
            }
            return Ok(());
        }
        let progress = state.progress.get(&key).ok_or_else(|| AnnotationError::NotAssigned {
            item_id: item_id.to_string(),
            annotator: annotator.to_string(),
        })?;
        let (required, action) = match event {
            Event::PosteditSubmitted { text, .. } => {
                if progress.state == WorkflowState::PostEditing && text.trim().is_empty() {
                    return Err(AnnotationError::Validation("post-edit text is empty".into()));
                }
                (WorkflowState::PostEditing, "submit a post-edit for")
            }
            Event::MeaningConfirmed { .. } | Event::MeaningRejected { .. } => {
                (WorkflowState::MeaningCheck, "confirm the meaning of")
            }
            Event::ScoresSubmitted { .. } => (WorkflowState::Scoring, "score"),
            Event::SessionOpened { .. } | Event::ItemAssigned { .. } => unreachable!("handled above"),
        };
        if progress.state != required {
            return Err(AnnotationError::StateViolation {
                item_id: item_id.to_string(),
                state: progress.state,
                action,
            });
        }
        Ok(())
    }

    /// Applies an event that passed `check`.
    fn commit(&self, state: &mut State, session_id: &str, annotator: &str, event: &Event) {
        if let Event::SessionOpened { seed } = event {
            state.sessions.insert(
                session_id.to_string(),
                Session {
                    annotator: annotator.to_string(),
                    order: shuffled(self.pool.len(), *seed),
                },
            );
            return;
        }
        let item_id = event.item_id().expect("non-session events name an item").to_string();
        let key = (annotator.to_string(), item_id.clone());
        if let Event::ItemAssigned { .. } = event {
            state.progress.insert(key, ItemProgress::assigned(session_id));
            state.in_flight.insert(annotator.to_string(), item_id);
            return;
        }
        let p = state.progress.get_mut(&key).expect("checked");
        match event {
            Event::PosteditSubmitted { text, .. } => {
                p.postedit = Some(text.trim().to_string());
                p.state = WorkflowState::MeaningCheck;
            }
            Event::MeaningConfirmed { .. } => p.state = WorkflowState::Scoring,
            Event::MeaningRejected { .. } => {
                p.state = WorkflowState::PostEditing;
                p.revisions += 1;
            }
            Event::ScoresSubmitted { scores, .. } => {
                p.scores = Some(*scores);
                p.state = WorkflowState::Done;
                state.in_flight.remove(annotator);
            }
            Event::SessionOpened { .. } | Event::ItemAssigned { .. } => unreachable!("handled above"),
        }
    }

    fn record(&self, inner: &mut Inner, session_id: &str, annotator: &str, event: Event) -> Outcome<()> {
        self.check(&inner.state, session_id, annotator, &event)?;
        let rec = EventRecord {
            seq: inner.next_seq,
            timestamp_ms: now_ms(),
            session_id: session_id.to_string(),
            annotator_id: annotator.to_string(),
            event,
        };
        if let Some(log) = inner.log.as_mut() {
            log.append(&rec)?;
        }
        self.commit(&mut inner.state, session_id, annotator, &rec.event);
        inner.next_seq += 1;
        Ok(())
    }

    fn annotator_of(inner: &Inner, session_id: &str) -> Outcome<String> {
        inner
            .state
            .sessions
            .get(session_id)
            .map(|s| s.annotator.clone())
            .ok_or_else(|| AnnotationError::UnknownSession(session_id.to_string()))
    }

    /// Opens a session. Without an explicit seed the shuffle seed is derived
    /// from the service seed, the annotator and the session id.
    pub fn open_session(&self, annotator_id: &str, seed: Option<u64>) -> Outcome<String> {
        let annotator = annotator_id.trim();
        let mut inner = self.lock();
        let session_id = format!("s{}", inner.next_seq);
        let seed = seed.unwrap_or_else(|| derive_seed(self.seed, &format!("{annotator}/{session_id}")));
        self.record(&mut inner, &session_id, annotator, Event::SessionOpened { seed })?;
        Ok(session_id)
    }

    /// The annotator's in-flight item at its current step, or else the next
    /// unserved item in this session's shuffled order.
    pub fn next_item(&self, session_id: &str) -> Outcome<NextItem> {
        let mut inner = self.lock();
        let annotator = Self::annotator_of(&inner, session_id)?;
        if let Some(item_id) = inner.state.in_flight.get(&annotator) {
            let p = &inner.state.progress[&(annotator.clone(), item_id.clone())];
            let item = self.item(item_id).expect("in-flight items are in the pool");
            return Ok(NextItem::Item(StepView::build(item, p)));
        }
        let session = &inner.state.sessions[session_id];
        let next = session
            .order
            .iter()
            .map(|&i| &self.pool[i])
            .find(|it| !inner.state.progress.contains_key(&(annotator.clone(), it.item_id.clone())));
        let Some(item) = next else {
            return Ok(NextItem::complete());
        };
        let item_id = item.item_id.clone();
        self.record(&mut inner, session_id, &annotator, Event::ItemAssigned { item_id: item_id.clone() })?;
        let p = &inner.state.progress[&(annotator, item_id)];
        Ok(NextItem::Item(StepView::build(item, p)))
    }

    fn step(&self, session_id: &str, item_id: &str, make: impl FnOnce() -> Event) -> Outcome<StepView> {
        let mut inner = self.lock();
        let annotator = Self::annotator_of(&inner, session_id)?;
        self.record(&mut inner, session_id, &annotator, make())?;
        let p = &inner.state.progress[&(annotator, item_id.to_string())];
        Ok(StepView::build(self.item(item_id).expect("checked"), p))
    }

    /// Stores the post-edit and reveals the reference.
    pub fn submit_postedit(&self, session_id: &str, item_id: &str, text: &str) -> Outcome<StepView> {
        self.step(session_id, item_id, || Event::PosteditSubmitted {
            item_id: item_id.to_string(),
            text: text.to_string(),
        })
    }

    /// On a match moves to scoring; otherwise hides the reference again and
    /// returns to post-editing.
    pub fn confirm_meaning(&self, session_id: &str, item_id: &str, matches: bool) -> Outcome<StepView> {
        self.step(session_id, item_id, || {
            let item_id = item_id.to_string();
            if matches {
                Event::MeaningConfirmed { item_id }
            } else {
                Event::MeaningRejected { item_id }
            }
        })
    }

    pub fn submit_scores(&self, session_id: &str, item_id: &str, scores: ScoreTriple) -> Outcome<StepView> {
        self.step(session_id, item_id, || Event::ScoresSubmitted {
            item_id: item_id.to_string(),
            scores,
        })
    }

    pub fn progress(&self, annotator: &str, item_id: &str) -> Option<ItemProgress> {
        self.lock()
            .state
            .progress
            .get(&(annotator.to_string(), item_id.to_string()))
            .cloned()
    }

    /// Finished annotations sorted by (annotator, item_id).
    pub fn ratings(&self, filter: &ExportFilter) -> Vec<RatingRecord> {
        let inner = self.lock();
        inner
            .state
            .progress
            .iter()
            .filter(|(_, p)| p.state == WorkflowState::Done)
            .filter_map(|((annotator, item_id), p)| {
                let item = self.item(item_id)?;
                let rec = RatingRecord {
                    item_id: item_id.clone(),
                    sentence_id: item.sentence_id.clone(),
                    system: item.system.clone(),
                    cefr: item.cefr,
                    source: item.source.clone(),
                    output: item.output.clone(),
                    postedit: p.postedit.clone().unwrap_or_default(),
                    scores: p.scores?,
                    revisions: p.revisions,
                    annotator: annotator.clone(),
                };
                filter.matches(&rec).then_some(rec)
            })
            .collect()
    }

    pub fn export(&self, filter: &ExportFilter) -> String {
        render_export(&self.ratings(filter))
    }

    pub fn agreement(&self, a: &str, b: &str, dimensions: &[Dimension]) -> Outcome<AgreementReport> {
        let ratings = self.ratings(&ExportFilter::default());
        agreement_report(&ratings, |id| self.item(id).and_then(|it| it.batch.clone()), a, b, dimensions)
    }
}
