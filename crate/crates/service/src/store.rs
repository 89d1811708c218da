//! Bundle directory with copy-on-write snapshots.
//!
//! Readers clone an `Arc` to the current map and keep it for the whole
//! request. A writer takes the map's write lock, edits a private copy,
//! validates it, persists it atomically and only then swaps the `Arc`. A
//! reader therefore sees the map either before or after an edit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use floorwalk::gridmap::{load_bundle, save_bundle, EditError};
use floorwalk::BuildingMap;

use crate::protocol::{ErrorCode, FloorSummary, MapSummary, ServiceError};

struct Slot {
    path: PathBuf,
    current: RwLock<(Arc<BuildingMap>, u64)>,
    writer: Mutex<()>,
}

pub struct MapStore {
    slots: BTreeMap<String, Slot>,
}

/// Map id for a bundle file: its file stem.
pub fn map_id(path: &Path) -> Option<String> {
    path.file_stem().and_then(|s| s.to_str()).map(str::to_owned)
}

impl MapStore {
    /// Loads every `*.json` bundle in `dir`. Any invalid bundle is an error.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let dir = dir.as_ref();
        let entries = std::fs::read_dir(dir).map_err(|e| {
            ServiceError::new(ErrorCode::PersistFailed, format!("{}: {e}", dir.display()))
        })?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        Self::from_files(paths)
    }

    pub fn from_files(paths: impl IntoIterator<Item = PathBuf>) -> Result<Self, ServiceError> {
        let mut slots = BTreeMap::new();
        for path in paths {
            let id = map_id(&path).ok_or_else(|| {
                ServiceError::new(
                    ErrorCode::BadRequest,
                    format!("bad bundle name {}", path.display()),
                )
            })?;
            let map: BuildingMap = load_bundle(&path).map_err(|e| {
                let mut err = ServiceError::from(e);
                err.message = format!("{}: {}", path.display(), err.message);
                err
            })?;
            log::info!("loaded map '{id}' from {}", path.display());
            slots.insert(
                id,
                Slot {
                    path,
                    current: RwLock::new((Arc::new(map), 0)),
                    writer: Mutex::new(()),
                },
            );
        }
        Ok(Self { slots })
    }

    fn slot(&self, id: &str) -> Result<&Slot, ServiceError> {
        self.slots
            .get(id)
            .ok_or_else(|| ServiceError::new(ErrorCode::UnknownMap, format!("no map '{id}'")))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.slots.keys().map(String::as_str)
    }

    /// Current snapshot of a map.
    pub fn snapshot(&self, id: &str) -> Result<Arc<BuildingMap>, ServiceError> {
        Ok(self
            .slot(id)?
            .current
            .read()
            .expect("snapshot lock")
            .0
            .clone())
    }

    pub fn revision(&self, id: &str) -> Result<u64, ServiceError> {
        Ok(self.slot(id)?.current.read().expect("snapshot lock").1)
    }

    pub fn summaries(&self) -> Vec<MapSummary> {
        self.slots
            .iter()
            .map(|(id, slot)| {
                let m = slot.current.read().expect("snapshot lock").0.clone();
                MapSummary {
                    id: id.clone(),
                    name: m.name.clone(),
                    floors: m
                        .floors
                        .iter()
                        .map(|f| FloorSummary {
                            id: f.id.0,
                            label: f.label.clone(),
                            rows: f.grid.rows(),
                            cols: f.grid.cols(),
                        })
                        .collect(),
                    pois: m.pois.len(),
                    portals: m.portals.len(),
                }
            })
            .collect()
    }

    /// Applies `edit` to a copy of the map, validates, persists, then
    /// publishes the copy. On any failure the published map is unchanged.
    /// Returns the new revision.
    pub fn edit<T>(
        &self,
        id: &str,
        edit: impl FnOnce(&mut BuildingMap) -> Result<T, EditError>,
    ) -> Result<u64, ServiceError> {
        let slot = self.slot(id)?;
        let _writer = slot.writer.lock().expect("writer lock");
        let (base, revision) = slot.current.read().expect("snapshot lock").clone();
        let mut next = (*base).clone();
        edit(&mut next)?;
        let violations = next.validate();
        if !violations.is_empty() {
            return Err(EditError::Invalid(violations).into());
        }
        save_bundle(&next, &slot.path)?;
        let revision = revision + 1;
        *slot.current.write().expect("snapshot lock") = (Arc::new(next), revision);
        Ok(revision)
    }
}
