use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime};

use compareviz_core::dataset::{load_dataset_with_metadata, Metadata};
use compareviz_core::engine::{Engine, EngineConfig};
use compareviz_core::lexicon::Lexicon;
use compareviz_core::Result;

/// A past query, kept so interpretations can be switched later.
#[derive(Debug, Clone)]
pub struct StoredQuery {
    pub utterance: String,
    pub choices: Vec<(String, usize)>,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub engine: Engine,
    pub created_at: SystemTime,
    last_used: Mutex<Instant>,
    queries: Mutex<HashMap<String, StoredQuery>>,
}

impl Session {
    fn new(id: String, engine: Engine) -> Self {
        Self {
            id,
            engine,
            created_at: SystemTime::now(),
            last_used: Mutex::new(Instant::now()),
            queries: Mutex::new(HashMap::new()),
        }
    }

    fn touch(&self) {
        *self.last_used.lock().unwrap() = Instant::now();
    }

    fn idle_since(&self) -> Instant {
        *self.last_used.lock().unwrap()
    }

    pub fn remember(&self, query_id: &str, q: StoredQuery) {
        self.queries.lock().unwrap().insert(query_id.to_string(), q);
    }

    pub fn recall(&self, query_id: &str) -> Option<StoredQuery> {
        self.queries.lock().unwrap().get(query_id).cloned()
    }
}

/// In-memory sessions with idle-time eviction. With a snapshot directory
/// each upload is also written to disk and reloaded on a cache miss, so
/// sessions survive restarts until they expire.
#[derive(Debug)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    ttl: Duration,
    snapshot_dir: Option<PathBuf>,
    lexicon: Lexicon,
    engine: EngineConfig,
}

impl SessionStore {
    pub fn new(ttl: Duration, snapshot_dir: Option<PathBuf>, lexicon: Lexicon, engine: EngineConfig) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            ttl,
            snapshot_dir,
            lexicon,
            engine,
        }
    }

    pub fn create(&self, csv: &[u8], metadata: Option<&[u8]>) -> Result<Arc<Session>> {
        let meta = metadata.map(Metadata::from_json).transpose()?;
        let dataset = load_dataset_with_metadata(csv, meta.as_ref())?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        if let Some(dir) = &self.snapshot_dir {
            fs::create_dir_all(dir)?;
            fs::write(snapshot_path(dir, &id, "csv"), csv)?;
            if let Some(m) = metadata {
                fs::write(snapshot_path(dir, &id, "json"), m)?;
            }
        }
        let session = Arc::new(Session::new(
            id.clone(),
            Engine::new(dataset, self.lexicon.clone(), self.engine),
        ));
        self.evict_expired();
        self.sessions.write().unwrap().insert(id, session.clone());
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        self.evict_expired();
        let found = self.sessions.read().unwrap().get(id).cloned();
        let session = found.or_else(|| self.restore(id))?;
        session.touch();
        Some(session)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle longer than the TTL, with their snapshots.
    pub fn evict_expired(&self) -> usize {
        let now = Instant::now();
        let mut sessions = self.sessions.write().unwrap();
        let expired: Vec<String> = sessions
            .iter()
            .filter(|(_, s)| now.duration_since(s.idle_since()) > self.ttl)
            .map(|(id, _)| id.clone())
            .collect();
        for id in &expired {
            sessions.remove(id);
            if let Some(dir) = &self.snapshot_dir {
                let _ = fs::remove_file(snapshot_path(dir, id, "csv"));
                let _ = fs::remove_file(snapshot_path(dir, id, "json"));
            }
        }
        expired.len()
    }

    fn restore(&self, id: &str) -> Option<Arc<Session>> {
        let dir = self.snapshot_dir.as_ref()?;
        if !id.chars().all(|c| c.is_ascii_hexdigit()) {
            return None;
        }
        let csv = fs::read(snapshot_path(dir, id, "csv")).ok()?;
        let meta = fs::read(snapshot_path(dir, id, "json")).ok();
        let meta = meta.as_deref().map(Metadata::from_json).transpose().ok()?;
        let dataset = load_dataset_with_metadata(&csv, meta.as_ref()).ok()?;
        let session = Arc::new(Session::new(
            id.to_string(),
            Engine::new(dataset, self.lexicon.clone(), self.engine),
        ));
        self.sessions.write().unwrap().insert(id.to_string(), session.clone());
        Some(session)
    }
}

fn snapshot_path(dir: &Path, id: &str, ext: &str) -> PathBuf {
    dir.join(format!("{id}.{ext}"))
}
