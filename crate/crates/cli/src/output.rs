//! Output-directory handling, deterministic file writing, JSON helpers.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;
use spinchain::format::round_sig6;

/// Creates the output directory if needed.
pub fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Writes a text artifact and reports the path on stdout.
pub fn write_text(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Serializes a JSON value (pretty, trailing newline) and writes it.
pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).context("JSON serialization")?;
    text.push('\n');
    write_text(dir, name, &text)
}

/// JSON number rounded to the crate-wide six significant digits.
pub fn num(x: f64) -> Value {
    Value::from(round_sig6(x))
}

/// Runs `f` inside a rayon pool with the requested worker count; `None`
/// uses the global default pool.
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("cannot build worker pool")?;
            Ok(pool.install(f))
        }
    }
}
