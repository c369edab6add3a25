//! Sessions in memory, backed by an append-only event log.
//!
//! Each line of the log is one canonical JSON object
//! `{"event", "revision", "session_id", "timestamp"}`. Opening a store
//! replays the log; an unterminated final line left by a crash mid-write is
//! dropped.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use ivalue_core::format::{history_entry_value, read_event, to_canonical_string, Node};
use ivalue_core::session::{HistoryEntry, Timestamp};
use ivalue_core::ElicitationSession;
use serde_json::{json, Value};

use crate::error::{Result, ServiceError};

pub struct SessionStore {
    path: PathBuf,
    inner: Mutex<Inner>,
}

struct Inner {
    sessions: HashMap<String, ElicitationSession>,
    log: File,
}

fn now() -> Timestamp {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as Timestamp)
}

fn log_line(session_id: &str, revision: u64, entry: &HistoryEntry) -> String {
    let mut v = history_entry_value(entry);
    v["revision"] = json!(revision);
    v["session_id"] = json!(session_id);
    let mut line = to_canonical_string(&v);
    line.push('\n');
    line
}

fn parse_line(line: &str) -> ivalue_core::Result<(String, u64, HistoryEntry)> {
    let value: Value = serde_json::from_str(line).map_err(|e| ivalue_core::Error::Malformed(e.to_string()))?;
    let root = Node::root(&value);
    let entry = HistoryEntry {
        timestamp: root.field("timestamp")?.u64()?,
        event: read_event(&root.field("event")?)?,
    };
    Ok((
        root.field("session_id")?.str()?.to_owned(),
        root.field("revision")?.u64()?,
        entry,
    ))
}

impl SessionStore {
    /// Opens or creates the log at `path` and replays it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut text = String::new();
        if path.exists() {
            File::open(&path)?.read_to_string(&mut text)?;
        }

        let mut histories: HashMap<String, Vec<HistoryEntry>> = HashMap::new();
        let mut good_len = 0;
        let mut torn = false;
        for (number, chunk) in text.split_inclusive('\n').enumerate() {
            let terminated = chunk.ends_with('\n');
            let line = chunk.trim_end_matches('\n');
            if line.trim().is_empty() {
                good_len += chunk.len();
                continue;
            }
            let (id, revision, entry) = match parse_line(line) {
                Ok(parsed) => parsed,
                Err(_) if !terminated => {
                    torn = true;
                    break;
                }
                Err(e) => return Err(ServiceError::Storage(format!("line {}: {e}", number + 1))),
            };
            let history = histories.entry(id.clone()).or_default();
            if revision != history.len() as u64 + 1 {
                return Err(ServiceError::Storage(format!(
                    "line {}: session {id} jumps to revision {revision}",
                    number + 1
                )));
            }
            history.push(entry);
            good_len += chunk.len();
        }

        let mut sessions = HashMap::new();
        for (id, history) in histories {
            let s = ElicitationSession::replay(history)
                .map_err(|e| ServiceError::Storage(format!("session {id}: {e}")))?;
            sessions.insert(id, s);
        }

        let mut log = OpenOptions::new().create(true).append(true).open(&path)?;
        if torn {
            log::warn!("dropping incomplete final line of {}", path.display());
            log.set_len(good_len as u64)?;
        } else if !text.is_empty() && !text.ends_with('\n') {
            // A complete final record that lost only its newline.
            log.write_all(b"\n")?;
        }
        log::info!("replayed {} sessions from {}", sessions.len(), path.display());
        Ok(Self {
            path,
            inner: Mutex::new(Inner { sessions, log }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn len(&self) -> usize {
        self.lock().sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<String> {
        self.lock().sessions.keys().cloned().collect()
    }

    pub fn get(&self, id: &str) -> Result<ElicitationSession> {
        self.lock()
            .sessions
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_owned()))
    }

    pub fn create(&self, objects: Vec<String>) -> Result<ElicitationSession> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = ElicitationSession::start(id.clone(), objects, now())?;
        let mut inner = self.lock();
        Self::persist(&mut inner.log, &session, 0)?;
        inner.sessions.insert(id, session.clone());
        Ok(session)
    }

    /// Runs `f` on a copy of the session and commits the copy once its new
    /// events are on disk.
    ///
    /// With `expected` set, the session must still be at that revision.
    pub fn update<T>(
        &self,
        id: &str,
        expected: Option<u64>,
        f: impl FnOnce(&mut ElicitationSession, Timestamp) -> ivalue_core::Result<T>,
    ) -> Result<(T, ElicitationSession)> {
        let mut inner = self.lock();
        let current = inner
            .sessions
            .get(id)
            .ok_or_else(|| ServiceError::UnknownSession(id.to_owned()))?;
        let actual = current.revision();
        if let Some(expected) = expected {
            if expected != actual {
                return Err(ServiceError::Conflict { expected, actual });
            }
        }
        let mut session = current.clone();
        let out = f(&mut session, now())?;
        if session.revision() != actual {
            Self::persist(&mut inner.log, &session, actual as usize)?;
            inner.sessions.insert(id.to_owned(), session.clone());
        }
        Ok((out, session))
    }

    fn persist(log: &mut File, session: &ElicitationSession, from: usize) -> Result<()> {
        let mut text = String::new();
        for (k, entry) in session.history().iter().enumerate().skip(from) {
            text.push_str(&log_line(session.session_id(), k as u64 + 1, entry));
        }
        log.write_all(text.as_bytes())?;
        log.sync_data()?;
        Ok(())
    }
}
