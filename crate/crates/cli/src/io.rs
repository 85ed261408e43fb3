//! Atomic file output and small CSV readers.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> anyhow::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| -> anyhow::Result<()> {
        let file = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        let mut w = BufWriter::new(file);
        body(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        w.get_ref().sync_all()?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}

/// Header plus rows of a small numeric CSV.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .with_context(|| format!("{} is empty", path.display()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if row.len() != header.len() {
                bail!("{} line {}: {} fields, header has {}", path.display(), i + 2, row.len(), header.len());
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> anyhow::Result<usize> {
        self.header.iter().position(|h| h == name).with_context(|| format!("missing column {name:?}"))
    }

    pub fn f64_at(&self, row: usize, col: usize) -> anyhow::Result<f64> {
        self.rows[row][col]
            .parse()
            .with_context(|| format!("row {}: {:?} is not a number", row + 2, self.rows[row][col]))
    }

    pub fn usize_at(&self, row: usize, col: usize) -> anyhow::Result<usize> {
        self.rows[row][col]
            .parse()
            .with_context(|| format!("row {}: {:?} is not an index", row + 2, self.rows[row][col]))
    }
}

/// `node_index,value` (or `node,value`) into a map.
pub fn read_node_values(path: &Path) -> anyhow::Result<BTreeMap<usize, f64>> {
    let t = Table::read(path)?;
    let node = t.column("node_index").or_else(|_| t.column("node"))?;
    let value = t.column("value")?;
    let mut out = BTreeMap::new();
    for r in 0..t.rows.len() {
        if out.insert(t.usize_at(r, node)?, t.f64_at(r, value)?).is_some() {
            bail!("{}: duplicate node {}", path.display(), t.rows[r][node]);
        }
    }
    Ok(out)
}

/// Checks that a written CSV parses with the expected header and row count.
pub fn verify_csv(path: &Path, header_prefix: &[&str], rows: usize) -> anyhow::Result<()> {
    let t = Table::read(path)?;
    if t.header.len() < header_prefix.len() || t.header[..header_prefix.len()] != *header_prefix {
        bail!("{}: unexpected header {:?}", path.display(), t.header);
    }
    if t.rows.len() != rows {
        bail!("{}: {} rows written, expected {rows}", path.display(), t.rows.len());
    }
    Ok(())
}
