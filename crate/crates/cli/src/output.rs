use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

use crate::UsageError;

/// Refuses to replace an existing file unless `force` is set.
pub fn check_target(path: &Path, force: bool) -> anyhow::Result<()> {
    if !force && path.exists() {
        return Err(UsageError(format!("{} already exists (use --force to overwrite)", path.display())).into());
    }
    Ok(())
}

/// Writes `content` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, force: bool, content: &str) -> anyhow::Result<()> {
    match path {
        Some(path) => {
            check_target(path, force)?;
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes()).context("writing standard output")?;
            stdout.flush().context("writing standard output")
        }
    }
}
