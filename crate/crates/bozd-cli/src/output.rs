//! Output files: CSV with a commented header carrying the canonical run
//! configuration, and pretty-printed JSON reports.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bozd::config::RunConfig;
use serde::Serialize;

/// Fixed 17-significant-digit scientific notation (round-trips any double).
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes `# bozd <subcommand>` followed by the canonical configuration,
/// one `# `-prefixed line each.
fn write_header<W: Write>(w: &mut W, cfg: &RunConfig) -> std::io::Result<()> {
    writeln!(w, "# bozd {}", cfg.subcommand)?;
    for line in cfg.canonical().lines() {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// A CSV file in the output directory.
pub struct CsvOut {
    pub path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, cfg: &RunConfig, columns: &[&str]) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let path = dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut buf = BufWriter::new(file);
        write_header(&mut buf, cfg)?;
        let mut writer = csv::Writer::from_writer(buf);
        writer.write_record(columns)?;
        Ok(Self { path, writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// Writes `value` as JSON together with the canonical configuration.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, cfg: &RunConfig, value: &T) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        config: String,
        result: &'a T,
    }
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(&Wrapped { config: cfg.canonical(), result: value })?;
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
