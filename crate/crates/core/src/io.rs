//! File helpers: atomic writes and JSON / JSONL readers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::episode::{Trajectory, TRAJECTORY_FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::sim::{Scene, SCENE_FORMAT_VERSION};

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes through a `.partial` sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let tmp = partial_path(path);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        line: source.line(),
        source,
    })
}

pub fn trajectories_to_jsonl(trajs: &[Trajectory]) -> String {
    let mut out = String::new();
    for t in trajs {
        out.push_str(&serde_json::to_string(t).expect("trajectory serializes"));
        out.push('\n');
    }
    out
}

pub fn write_trajectories(path: &Path, trajs: &[Trajectory]) -> Result<()> {
    write_atomic(path, trajectories_to_jsonl(trajs).as_bytes())
}

pub fn parse_trajectories(text: &str, origin: &str) -> Result<Vec<Trajectory>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let t: Trajectory = serde_json::from_str(line).map_err(|source| Error::Json {
            path: origin.to_owned(),
            line: i + 1,
            source,
        })?;
        if t.format_version != TRAJECTORY_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                what: "trajectory",
                found: t.format_version,
                expected: TRAJECTORY_FORMAT_VERSION,
            });
        }
        out.push(t);
    }
    Ok(out)
}

pub fn read_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trajectories(&text, &path.display().to_string())
}

pub fn scene_file_name(seed: u64) -> String {
    format!("scene_{seed:08}.json")
}

pub fn read_scene(path: &Path) -> Result<Scene> {
    let s: Scene = read_json(path)?;
    if s.format_version != SCENE_FORMAT_VERSION {
        return Err(Error::FormatVersion {
            what: "scene",
            found: s.format_version,
            expected: SCENE_FORMAT_VERSION,
        });
    }
    Ok(s)
}

/// Reads every `scene_*.json` in a directory, ordered by seed.
pub fn read_scene_dir(dir: &Path) -> Result<Vec<Scene>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut scenes = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_scene = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(|n| n.starts_with("scene_") && n.ends_with(".json"))
            .unwrap_or(false);
        if is_scene {
            scenes.push(read_scene(&path)?);
        }
    }
    if scenes.is_empty() {
        return Err(Error::EmptyInput("scene directory"));
    }
    scenes.sort_by_key(|s| (s.seed, s.difficulty));
    Ok(scenes)
}
