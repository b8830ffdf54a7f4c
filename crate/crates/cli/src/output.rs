//! Atomic file emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// A declared output. The temporary file is created next to the target up
/// front, so an unwritable destination fails before any computation, and a
/// failed run leaves nothing behind.
pub struct Pending {
    tmp: NamedTempFile,
    path: PathBuf,
}

impl Pending {
    pub fn new(path: &Path) -> Result<Self> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let tmp = NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot write to {}", path.display()))?;
        Ok(Self {
            tmp,
            path: path.to_path_buf(),
        })
    }

    pub fn commit(mut self, bytes: &[u8]) -> Result<()> {
        let ctx = || format!("writing {}", self.path.display());
        self.tmp.write_all(bytes).with_context(ctx)?;
        self.tmp.as_file().sync_all().with_context(ctx)?;
        let path = self.path.clone();
        self.tmp
            .persist(&path)
            .map_err(|e| e.error)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dropped_pending_leaves_no_file() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.csv");
        drop(Pending::new(&target).unwrap());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn commit_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out.csv");
        std::fs::write(&target, "old").unwrap();
        Pending::new(&target).unwrap().commit(b"new").unwrap();
        assert_eq!(std::fs::read_to_string(&target).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn missing_directory_is_io() {
        let err = Pending::new(Path::new("/nonexistent-dir/x.csv")).err().unwrap();
        assert!(err.chain().any(|c| c.is::<std::io::Error>()));
    }
}
