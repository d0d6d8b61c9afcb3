//! Sessions on disk: one pretty-printed JSON file per session under `<data>/sessions/`.
//!
//! Mutations of one session are serialized through a per-session lock; different sessions
//! proceed independently. Files are replaced atomically, so readers never see half a write.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use robofoil_core::scenario::Scenario;

use crate::error::{GatewayError, Result};
use crate::session::{Judgment, Session};

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    next_id: Mutex<()>,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty() || id.len() > 20 || !id.bytes().all(|b| b.is_ascii_digit()) {
        return Err(GatewayError::NotFound(format!("no session {id:?}")));
    }
    Ok(())
}

impl Store {
    pub fn open(data_dir: impl AsRef<Path>) -> Result<Store> {
        let dir = data_dir.as_ref().join("sessions");
        fs::create_dir_all(&dir)?;
        Ok(Store { dir, next_id: Mutex::new(()), locks: Mutex::new(HashMap::new()) })
    }

    pub fn path_of(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }

    fn write(&self, session: &Session) -> Result<()> {
        let path = self.path_of(&session.id);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, session.to_json())?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn ids(&self) -> Result<Vec<String>> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str()?.strip_suffix(".json").map(str::to_string))
            .filter(|id| check_id(id).is_ok())
            .collect();
        ids.sort_by_key(|id| (id.len(), id.clone()));
        Ok(ids)
    }

    /// Solves the scenario and stores a new session under the next free id.
    pub fn create(&self, scenario: &Scenario, initial: Option<Judgment>) -> Result<Session> {
        let _guard = self.next_id.lock().unwrap_or_else(|e| e.into_inner());
        let next = self.ids()?.iter().filter_map(|id| id.parse::<u64>().ok()).max().map_or(1, |n| n + 1);
        let session = Session::create(format!("{next:04}"), scenario, initial)?;
        self.write(&session)?;
        Ok(session)
    }

    pub fn load(&self, id: &str) -> Result<Session> {
        check_id(id)?;
        let bytes = match fs::read(self.path_of(id)) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(GatewayError::NotFound(format!("no session {id:?}")))
            }
            Err(e) => return Err(e.into()),
        };
        Session::from_json(&bytes)
    }

    /// Runs `f` on the stored session under its lock and persists the result if `f` succeeds.
    pub fn update<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        check_id(id)?;
        let lock = self.lock_for(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut session = self.load(id)?;
        let out = f(&mut session)?;
        self.write(&session)?;
        Ok(out)
    }
}
