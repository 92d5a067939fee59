use super::{AnnotationError, EventRecord};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Append-only JSON-lines event log.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
}

fn log_error(path: &Path, message: impl Into<String>) -> AnnotationError {
    AnnotationError::Log {
        path: path.display().to_string(),
        message: message.into(),
    }
}

impl EventLog {
    /// Opens (or creates) a log and returns the records already in it.
    /// A torn final write left by a crash is cut off.
    pub fn open(path: &Path) -> Result<(Self, Vec<EventRecord>), AnnotationError> {
        let content = match std::fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(log_error(path, e.to_string())),
        };
        let (records, valid_len) = parse_records(path, &content)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| log_error(path, e.to_string()))?;
        if valid_len < content.len() {
            tracing::warn!(path = %path.display(), "dropping torn final log line");
            file.set_len(valid_len as u64).map_err(|e| log_error(path, e.to_string()))?;
        }
        Ok((
            EventLog {
                path: path.to_path_buf(),
                file,
            },
            records,
        ))
    }

    /// Reads the records of an existing log without modifying it.
    pub fn read(path: &Path) -> Result<Vec<EventRecord>, AnnotationError> {
        let content = std::fs::read_to_string(path).map_err(|e| log_error(path, e.to_string()))?;
        Ok(parse_records(path, &content)?.0)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, record: &EventRecord) -> Result<(), AnnotationError> {
        let mut line = serde_json::to_string(record).expect("event records serialize");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|e| log_error(&self.path, e.to_string()))
    }
}

/// Parses log lines and returns them with the byte length of the valid
/// prefix. A final line without a newline that does not parse is a write
/// torn by a crash and is excluded; any other unreadable line is an error.
fn parse_records(path: &Path, content: &str) -> Result<(Vec<EventRecord>, usize), AnnotationError> {
    let mut records: Vec<EventRecord> = Vec::new();
    let mut valid_len = 0usize;
    let mut offset = 0usize;
    for (i, line) in content.split_inclusive('\n').enumerate() {
        offset += line.len();
        let complete = line.ends_with('\n');
        let text = line.trim_end();
        if text.is_empty() {
            valid_len = offset;
            continue;
        }
        match serde_json::from_str::<EventRecord>(text) {
            Ok(rec) => {
                if let Some(prev) = records.last().map(|r| r.seq) {
                    if rec.seq <= prev {
                        return Err(log_error(path, format!("line {}: sequence {} after {prev}", i + 1, rec.seq)));
                    }
                }
                records.push(rec);
                valid_len = offset;
            }
            Err(_) if !complete => break,
            Err(e) => return Err(log_error(path, format!("line {}: {e}", i + 1))),
        }
    }
    Ok((records, valid_len))
}
