//! Transactional output. Every artifact is rendered in memory, staged as a
//! hidden temp file in the output directory, and renamed into place only once
//! all of them were written. A failed run leaves no files behind.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            bytes,
        }
    }
}

fn temp_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!(".{name}.tmp-{}", std::process::id()))
}

fn stage(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = File::create(path)?;
    f.write_all(bytes)?;
    f.sync_all()
}

/// Writes every artifact or none. Returns the final paths in input order.
pub fn commit(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let mut staged: Vec<PathBuf> = Vec::with_capacity(artifacts.len());
    let cleanup = |staged: &[PathBuf]| {
        for p in staged {
            let _ = fs::remove_file(p);
        }
    };
    for a in artifacts {
        let tmp = temp_path(dir, &a.name);
        if let Err(e) = stage(&tmp, &a.bytes) {
            let _ = fs::remove_file(&tmp);
            cleanup(&staged);
            return Err(CliError::io(dir.join(&a.name).display(), e));
        }
        staged.push(tmp);
    }
    let mut done = Vec::with_capacity(artifacts.len());
    for (a, tmp) in artifacts.iter().zip(&staged) {
        let target = dir.join(&a.name);
        if let Err(e) = fs::rename(tmp, &target) {
            cleanup(&staged);
            for p in &done {
                let _ = fs::remove_file(p);
            }
            return Err(CliError::io(target.display(), e));
        }
        done.push(target);
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_all_and_leaves_no_temps() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        let paths = commit(
            &out,
            &[Artifact::new("a.csv", b"x\n".to_vec()), Artifact::new("b.csv", vec![])],
        )
        .unwrap();
        assert_eq!(paths.len(), 2);
        let names: Vec<String> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(names.len(), 2, "{names:?}");
        assert_eq!(fs::read(out.join("a.csv")).unwrap(), b"x\n");
    }

    #[test]
    fn failure_removes_staged_files() {
        let dir = tempfile::tempdir().unwrap();
        let bad = Artifact::new("missing/sub.csv", b"y".to_vec());
        let err = commit(dir.path(), &[Artifact::new("a.csv", b"x".to_vec()), bad]).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
