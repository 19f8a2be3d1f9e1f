//! File-per-session persistence.
//!
//! Each session lives in `<root>/<id>.session`: a header line followed by
//! one line per answer event, appended as answers arrive. Sessions are
//! loaded lazily and cached; each sits behind its own mutex, so writes to
//! one session are serialized while distinct sessions proceed in parallel.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use feaso_core::kb::{Answer, KnowledgeBase};
use feaso_core::session::log::{format_event, LogError};
use feaso_core::session::{AnswerEvent, Session, SessionError};
use parking_lot::Mutex;

pub type SessionHandle = Arc<Mutex<Session>>;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session `{0}`")]
    NotFound(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("corrupt session file {path}: {source}")]
    Corrupt { path: PathBuf, source: LogError },
    #[error("session storage failed: {0}")]
    Io(#[from] io::Error),
}

pub struct SessionStore {
    root: PathBuf,
    kb: Arc<KnowledgeBase>,
    open: Mutex<HashMap<String, SessionHandle>>,
}

/// Session ids are generated as hex; anything else cannot name a session
/// file, which also keeps ids from escaping the store root.
fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

impl SessionStore {
    pub fn open(root: impl Into<PathBuf>, kb: Arc<KnowledgeBase>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, kb, open: Mutex::new(HashMap::new()) })
    }

    pub fn kb(&self) -> &Arc<KnowledgeBase> {
        &self.kb
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, id: &str) -> PathBuf {
        self.root.join(format!("{id}.session"))
    }

    /// Starts a session and writes its header.
    pub fn create(&self) -> Result<SessionHandle, StoreError> {
        let session = Session::start(self.kb.clone());
        let id = session.id().to_string();
        let mut file = OpenOptions::new().write(true).create_new(true).open(self.path(&id))?;
        file.write_all(session.to_log().as_bytes())?;
        file.sync_data()?;
        let handle = Arc::new(Mutex::new(session));
        self.open.lock().insert(id, handle.clone());
        Ok(handle)
    }

    /// The session with `id`, replayed from disk on first access.
    pub fn get(&self, id: &str) -> Result<SessionHandle, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let mut open = self.open.lock();
        if let Some(h) = open.get(id) {
            return Ok(h.clone());
        }
        let path = self.path(id);
        let src = match fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(id.to_string())),
            Err(e) => return Err(e.into()),
        };
        let session = Session::from_log(self.kb.clone(), &src).map_err(|source| StoreError::Corrupt { path, source })?;
        let handle = Arc::new(Mutex::new(session));
        open.insert(id.to_string(), handle.clone());
        Ok(handle)
    }

    /// Records an answer in memory and on disk. If the write fails the
    /// in-memory session is rolled back, so the two never diverge.
    pub fn submit(&self, session: &mut Session, attribute: &str, answer: Answer) -> Result<AnswerEvent, StoreError> {
        let event = session.submit(attribute, answer)?.clone();
        let written = File::options()
            .append(true)
            .open(self.path(session.id()))
            .and_then(|mut f| f.write_all(format_event(&event).as_bytes()).and_then(|()| f.sync_data()));
        if let Err(e) = written {
            session.undo();
            return Err(e.into());
        }
        Ok(event)
    }

    /// Drops every cached session, as after a restart.
    pub fn evict_all(&self) {
        self.open.lock().clear();
    }
}
