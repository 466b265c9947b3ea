//! File-backed model store: one `<id>.json` per model, replaced atomically.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qualibd_core::dsl::{parse, ParseError};
use qualibd_core::export::{decode_unchecked, to_json};
use qualibd_core::{EditCommand, EditOutcome, Editor, Model, ModelId};
use serde::Serialize;
use tokio::sync::{Mutex, RwLock};

const TEMP_PREFIX: &str = ".qualibd-";
const TEMP_SUFFIX: &str = ".tmp";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("no model with id `{0}`")]
    NotFound(String),
    #[error("stale base revision, model is at {current}")]
    Stale { current: u64 },
    #[error("document has {} parse error(s)", .0.len())]
    Parse(Vec<ParseError>),
    #[error("store I/O failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Failure to simulate on the next write, for crash-safety tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The temporary file is complete but never renamed into place.
    BeforeRename,
    /// Only half the bytes reach the temporary file.
    TruncatedWrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub id: String,
    pub name: String,
    pub revision: u64,
}

struct Entry {
    editor: Editor,
    deleted: bool,
}

pub struct Store {
    root: PathBuf,
    index: RwLock<BTreeMap<String, Arc<Mutex<Entry>>>>,
    fault: std::sync::Mutex<Option<Fault>>,
}

/// Ids double as file names, so only a conservative alphabet is accepted.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn write_atomic(root: &Path, id: &str, text: &str, fault: Option<Fault>) -> std::io::Result<()> {
    let mut temp = tempfile::Builder::new()
        .prefix(TEMP_PREFIX)
        .suffix(TEMP_SUFFIX)
        .tempfile_in(root)?;
    let bytes = text.as_bytes();
    match fault {
        Some(Fault::TruncatedWrite) => {
            temp.write_all(&bytes[..bytes.len() / 2])?;
            temp.as_file().sync_all()?;
            let (_, path) = temp.keep().map_err(|e| e.error)?;
            log::debug!("fault injected, left {}", path.display());
            return Err(std::io::Error::other("injected fault: truncated write"));
        }
        Some(Fault::BeforeRename) => {
            temp.write_all(bytes)?;
            temp.as_file().sync_all()?;
            let (_, path) = temp.keep().map_err(|e| e.error)?;
            log::debug!("fault injected, left {}", path.display());
            return Err(std::io::Error::other("injected fault: crash before rename"));
        }
        None => {}
    }
    temp.write_all(bytes)?;
    temp.as_file().sync_all()?;
    temp.persist(root.join(format!("{id}.json")))
        .map_err(|e| e.error)?;
    Ok(())
}

impl Store {
    /// Opens (creating if needed) the store directory, loads every model
    /// file and removes temporary files left by interrupted writes.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        let mut index = BTreeMap::new();
        for entry in std::fs::read_dir(&root)? {
            let path = entry?.path();
            let Some(file_name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            if file_name.starts_with(TEMP_PREFIX) && file_name.ends_with(TEMP_SUFFIX) {
                log::info!("removing interrupted write {}", path.display());
                std::fs::remove_file(&path)?;
                continue;
            }
            let Some(id) = file_name.strip_suffix(".json") else {
                continue;
            };
            if !valid_id(id) {
                log::warn!("skipping {}: not a valid model id", path.display());
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let mut model = match decode_unchecked(&text) {
                Ok(model) => model,
                Err(e) => {
                    log::warn!("skipping {}: {e}", path.display());
                    continue;
                }
            };
            if model.id().0 != id {
                model.set_id(ModelId(id.to_owned()));
            }
            index.insert(
                id.to_owned(),
                Arc::new(Mutex::new(Entry {
                    editor: Editor::new(model),
                    deleted: false,
                })),
            );
        }
        log::info!("store {} holds {} model(s)", root.display(), index.len());
        Ok(Store {
            root,
            index: RwLock::new(index),
            fault: std::sync::Mutex::new(None),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Makes the next write fail in the given way.
    pub fn inject_fault(&self, fault: Option<Fault>) {
        *self.fault.lock().unwrap() = fault;
    }

    async fn persist(&self, model: &Model) -> Result<(), StoreError> {
        let fault = self.fault.lock().unwrap().take();
        let root = self.root.clone();
        let id = model.id().0.clone();
        let text = to_json(model);
        tokio::task::spawn_blocking(move || write_atomic(&root, &id, &text, fault))
            .await
            .map_err(std::io::Error::other)??;
        Ok(())
    }

    async fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, StoreError> {
        self.index
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_owned()))
    }

    pub async fn list(&self) -> Vec<ModelSummary> {
        let entries: Vec<_> = self.index.read().await.values().cloned().collect();
        let mut out = Vec::with_capacity(entries.len());
        for entry in entries {
            let entry = entry.lock().await;
            if entry.deleted {
                continue;
            }
            let model = entry.editor.model();
            out.push(ModelSummary {
                id: model.id().0.clone(),
                name: model.name().to_owned(),
                revision: model.revision(),
            });
        }
        out.sort_by(|a, b| (&a.name, &a.id).cmp(&(&b.name, &b.id)));
        out
    }

    pub async fn create(&self, name: &str) -> Result<Model, StoreError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let model = Model::new(id.clone(), name);
        self.persist(&model).await?;
        self.index.write().await.insert(
            id,
            Arc::new(Mutex::new(Entry {
                editor: Editor::new(model.clone()),
                deleted: false,
            })),
        );
        Ok(model)
    }

    /// A consistent snapshot of the model.
    pub async fn get(&self, id: &str) -> Result<Model, StoreError> {
        let entry = self.entry(id).await?;
        let entry = entry.lock().await;
        if entry.deleted {
            return Err(StoreError::NotFound(id.to_owned()));
        }
        Ok(entry.editor.model().clone())
    }

    pub async fn delete(&self, id: &str) -> Result<(), StoreError> {
        let entry = self
            .index
            .write()
            .await
            .remove(id)
            .ok_or_else(|| StoreError::NotFound(id.to_owned()))?;
        let mut entry = entry.lock().await;
        entry.deleted = true;
        match std::fs::remove_file(self.root.join(format!("{id}.json"))) {
            Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(e.into()),
            _ => Ok(()),
        }
    }

    /// Applies one command under the model's exclusive section. Applied
    /// results are on disk before this returns; a failed write leaves the
    /// model as it was.
    pub async fn apply(
        &self,
        id: &str,
        base_revision: u64,
        command: EditCommand,
    ) -> Result<(EditOutcome, u64), StoreError> {
        let entry = self.entry(id).await?;
        let mut entry = entry.lock().await;
        if entry.deleted {
            return Err(StoreError::NotFound(id.to_owned()));
        }
        let current = entry.editor.model().revision();
        if base_revision != current {
            return Err(StoreError::Stale { current });
        }
        let mut editor = entry.editor.clone();
        let outcome = editor.apply(command);
        if outcome.is_applied() {
            self.persist(editor.model()).await?;
            entry.editor = editor;
        }
        Ok((outcome, entry.editor.model().revision()))
    }

    /// Replaces the content of a model with a parsed document. Element
    /// numbers continue after the ones the model has used so far; the undo
    /// journal starts afresh.
    pub async fn replace_from_dsl(
        &self,
        id: &str,
        text: &str,
        base_revision: Option<u64>,
    ) -> Result<Model, StoreError> {
        let entry = self.entry(id).await?;
        let mut entry = entry.lock().await;
        if entry.deleted {
            return Err(StoreError::NotFound(id.to_owned()));
        }
        let old = entry.editor.model();
        if let Some(base) = base_revision {
            if base != old.revision() {
                return Err(StoreError::Stale {
                    current: old.revision(),
                });
            }
        }
        let mut model = parse(text).map_err(StoreError::Parse)?;
        model.rebase_ids(old.next_id() - 1);
        model.set_id(old.id().clone());
        model.set_revision(old.revision() + 1);
        self.persist(&model).await?;
        entry.editor = Editor::new(model.clone());
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qualibd_core::NodeKind;

    fn goal() -> EditCommand {
        EditCommand::CreateNode {
            kind: NodeKind::Goal,
            name: Some("g".into()),
            owner: None,
            attr_kind: None,
            attr_value: None,
        }
    }

    #[test]
    fn ids_are_restricted() {
        assert!(valid_id("0f3a-b_c"));
        assert!(!valid_id(""));
        assert!(!valid_id("../etc"));
        assert!(!valid_id("a.json"));
    }

    #[tokio::test]
    async fn faults_leave_the_file_and_memory_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let model = store.create("m").await.unwrap();
        let id = model.id().0.clone();
        let file = dir.path().join(format!("{id}.json"));
        let before = std::fs::read_to_string(&file).unwrap();
        for fault in [Fault::BeforeRename, Fault::TruncatedWrite] {
            store.inject_fault(Some(fault));
            assert!(matches!(
                store.apply(&id, 0, goal()).await,
                Err(StoreError::Io(_))
            ));
            assert_eq!(std::fs::read_to_string(&file).unwrap(), before);
            assert_eq!(store.get(&id).await.unwrap(), model);
        }
        let reopened = Store::open(dir.path()).unwrap();
        assert_eq!(reopened.get(&id).await.unwrap(), model);
        let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 1);
    }

    #[tokio::test]
    async fn stale_revisions_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let id = store.create("m").await.unwrap().id().0.clone();
        let (outcome, revision) = store.apply(&id, 0, goal()).await.unwrap();
        assert!(outcome.is_applied());
        assert_eq!(revision, 1);
        assert!(matches!(
            store.apply(&id, 0, goal()).await,
            Err(StoreError::Stale { current: 1 })
        ));
    }

    #[tokio::test]
    async fn dsl_replacement_never_reuses_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let id = store.create("m").await.unwrap().id().0.clone();
        store.apply(&id, 0, goal()).await.unwrap();
        let model = store
            .replace_from_dsl(&id, "model \"n\" { goal G \"x\" }", Some(1))
            .await
            .unwrap();
        assert_eq!(model.revision(), 2);
        assert_eq!(model.nodes().next().unwrap().id.0, 2);
        assert_eq!(model.id().0, id);
        assert_eq!(model.name(), "n");
    }
}
