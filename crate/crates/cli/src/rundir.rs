use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Output directory of a single invocation.
#[derive(Debug)]
pub struct RunDir {
    path: PathBuf,
}

impl RunDir {
    /// Creates `root/name`. An existing non-empty directory is an error unless
    /// `force` is set, in which case it is cleared first.
    pub fn create(root: &Path, name: &str, force: bool) -> Result<Self, CliError> {
        let path = root.join(name);
        if path.exists() {
            let occupied = fs::read_dir(&path)?.next().is_some();
            if occupied && !force {
                return Err(CliError::Usage(format!(
                    "{} already exists; pass --force to overwrite",
                    path.display()
                )));
            }
            if occupied {
                fs::remove_dir_all(&path)?;
            }
        }
        fs::create_dir_all(&path)?;
        Ok(Self { path })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write<F, E>(&self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), E>,
        CliError: From<E>,
    {
        let target = self.path.join(name);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut w = BufWriter::new(File::create(&target)?);
        body(&mut w)?;
        w.flush()?;
        Ok(target)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        self.write(name, |w| w.write_all(text.as_bytes()))
    }
}

/// `<name>-seed<seed>`, or just `<name>` for deterministic runs.
pub fn run_name(name: &str, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("{name}-seed{s}"),
        None => name.to_string(),
    }
}
