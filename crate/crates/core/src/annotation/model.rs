use crate::corpus::Cefr;
use crate::metrics::ScoreTriple;
use serde::{Deserialize, Serialize};
use std::fmt;

/// One system output to be post-edited and scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub item_id: String,
    pub sentence_id: String,
    pub system: String,
    pub cefr: Cefr,
    pub output: String,
    /// The minimal human correction, hidden until the post-edit is in.
    pub reference: String,
    pub source: String,
    /// Optional grouping used as rows of the agreement table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkflowState {
    PostEditing,
    MeaningCheck,
    Scoring,
    Done,
}

impl fmt::Display for WorkflowState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkflowState::PostEditing => "post_editing",
            WorkflowState::MeaningCheck => "meaning_check",
            WorkflowState::Scoring => "scoring",
            WorkflowState::Done => "done",
        })
    }
}

/// Progress of one annotator on one item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemProgress {
    pub session_id: String,
    pub state: WorkflowState,
    pub postedit: Option<String>,
    pub revisions: u32,
    pub scores: Option<ScoreTriple>,
}

impl ItemProgress {
    pub(crate) fn assigned(session_id: &str) -> Self {
        ItemProgress {
            session_id: session_id.to_string(),
            state: WorkflowState::PostEditing,
            postedit: None,
            revisions: 0,
            scores: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    SessionOpened { seed: u64 },
    ItemAssigned { item_id: String },
    PosteditSubmitted { item_id: String, text: String },
    MeaningConfirmed { item_id: String },
    MeaningRejected { item_id: String },
    ScoresSubmitted { item_id: String, scores: ScoreTriple },
}

impl Event {
    pub fn item_id(&self) -> Option<&str> {
        match self {
            Event::SessionOpened { .. } => None,
            Event::ItemAssigned { item_id }
            | Event::PosteditSubmitted { item_id, .. }
            | Event::MeaningConfirmed { item_id }
            | Event::MeaningRejected { item_id }
            | Event::ScoresSubmitted { item_id, .. } => Some(item_id),
        }
    }
}

/// One line of the append-only event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp_ms: u64,
    pub session_id: String,
    pub annotator_id: String,
    #[serde(flatten)]
    pub event: Event,
}

/// What the annotator sees at each step. Step one shows only the system
/// output; the reference appears from step two and the learner's original
/// sentence only in step three.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum StepView {
    Postedit {
        item_id: String,
        output: String,
        /// The annotator's previous attempt after a meaning rejection.
        #[serde(skip_serializing_if = "Option::is_none")]
        draft: Option<String>,
        revisions: u32,
    },
    Meaning {
        item_id: String,
        postedit: String,
        reference: String,
    },
    Scores {
        item_id: String,
        source: String,
        output: String,
        reference: String,
        postedit: String,
    },
    Done {
        item_id: String,
    },
}

impl StepView {
    pub fn item_id(&self) -> &str {
        match self {
            StepView::Postedit { item_id, .. }
            | StepView::Meaning { item_id, .. }
            | StepView::Scores { item_id, .. }
            | StepView::Done { item_id } => item_id,
        }
    }

    pub(crate) fn build(item: &AnnotationItem, p: &ItemProgress) -> StepView {
        let item_id = item.item_id.clone();
        match p.state {
            WorkflowState::PostEditing => StepView::Postedit {
                item_id,
                output: item.output.clone(),
                draft: p.postedit.clone(),
                revisions: p.revisions,
            },
            WorkflowState::MeaningCheck => StepView::Meaning {
                item_id,
                postedit: p.postedit.clone().unwrap_or_default(),
                reference: item.reference.clone(),
            },
            WorkflowState::Scoring => StepView::Scores {
                item_id,
                source: item.source.clone(),
                output: item.output.clone(),
                reference: item.reference.clone(),
                postedit: p.postedit.clone().unwrap_or_default(),
            },
            WorkflowState::Done => StepView::Done { item_id },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NextItem {
    Item(StepView),
    Complete { complete: bool },
}

impl NextItem {
    pub fn complete() -> Self {
        NextItem::Complete { complete: true }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, NextItem::Complete { .. })
    }

    pub fn view(&self) -> Option<&StepView> {
        match self {
            NextItem::Item(v) => Some(v),
            NextItem::Complete { .. } => None,
        }
    }
}

/// A finished annotation as exported. Field order is the file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatingRecord {
    pub item_id: String,
    pub sentence_id: String,
    pub system: String,
    pub cefr: Cefr,
    pub source: String,
    pub output: String,
    pub postedit: String,
    pub scores: ScoreTriple,
    pub revisions: u32,
    pub annotator: String,
}
