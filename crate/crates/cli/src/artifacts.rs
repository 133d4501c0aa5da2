//! Artifact layout: `report.json`, `summary.txt`, `config.json`, one CSV per
//! report table, and field snapshots. Files are first written to a staging
//! directory and moved into place only once all of them exist.

use crate::config::Resolved;
use crate::experiments::Outcome;
use std::fs;
use std::io;
use std::path::Path;

pub fn write(cfg: &Resolved, outcome: &Outcome) -> io::Result<()> {
    let out = &cfg.output_dir;
    fs::create_dir_all(out)?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    let result = stage(cfg, outcome, &staging).and_then(|_| publish(&staging, out));
    let _ = fs::remove_dir_all(&staging);
    result
}

fn to_io(e: biharm::Error) -> io::Error {
    io::Error::other(e.to_string())
}

fn stage(cfg: &Resolved, outcome: &Outcome, dir: &Path) -> io::Result<()> {
    if dir.exists() {
        fs::remove_dir_all(dir)?;
    }
    fs::create_dir_all(dir)?;
    let report = &outcome.report;
    fs::write(dir.join("report.json"), report.to_json() + "\n")?;
    fs::write(dir.join("summary.txt"), report.summary())?;
    let config = serde_json::to_string_pretty(cfg).map_err(io::Error::other)?;
    fs::write(dir.join("config.json"), config + "\n")?;
    for t in &report.tables {
        fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
    }
    for (stem, field) in &outcome.fields {
        field.write_snapshot(dir, stem).map_err(to_io)?;
    }
    if let Some(traj) = &outcome.trajectory {
        traj.write(&dir.join("trajectory")).map_err(to_io)?;
    }
    Ok(())
}

fn publish(staging: &Path, out: &Path) -> io::Result<()> {
    for entry in fs::read_dir(staging)? {
        let entry = entry?;
        let target = out.join(entry.file_name());
        if target.is_dir() {
            fs::remove_dir_all(&target)?;
        }
        fs::rename(entry.path(), target)?;
    }
    Ok(())
}
