//! Persistent rep cache.
//!
//! ```text
//! CSATOWER-CACHE v1
//! <fingerprint>
//! rep <stage> <index> <word>
//! ```

use std::io::Write;
use std::path::Path;

use crate::error::{GroupError, Result};
use crate::text::parse_word;
use crate::tower::Tower;
use crate::word::Word;

pub const HEADER: &str = "CSATOWER-CACHE v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Missing,
    /// Reps adopted, total count.
    Loaded(usize),
    /// Fingerprint differs; nothing adopted.
    Ignored {
        found: String,
    },
}

/// Rep lists by stage, in file order.
pub type StageReps = Vec<(u32, Vec<Word>)>;

/// Fingerprint and records of a cache file.
pub fn parse(text: &str) -> Result<(String, StageReps)> {
    let bad = |line: usize, msg: &str| GroupError::Cache(format!("line {}: {}", line, msg));
    if !text.ends_with('\n') {
        return Err(GroupError::Cache("truncated file (no final newline)".into()));
    }
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(bad(1, "corrupt header"));
    }
    let fingerprint = lines
        .next()
        .ok_or_else(|| bad(2, "missing fingerprint"))?
        .trim()
        .to_string();
    if fingerprint.len() != 64 || !fingerprint.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(bad(2, "malformed fingerprint"));
    }
    let mut stages: StageReps = Vec::new();
    for (n, line) in lines.enumerate() {
        let n = n + 3;
        let mut parts = line.splitn(4, ' ');
        let (Some("rep"), Some(stage), Some(index), Some(word)) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad(n, "expected `rep <stage> <index> <word>`"));
        };
        let stage: u32 = stage.parse().map_err(|_| bad(n, "bad stage"))?;
        let index: usize = index.parse().map_err(|_| bad(n, "bad index"))?;
        let word = parse_word(word).map_err(|e| bad(n, &e.to_string()))?;
        match stages.last_mut() {
            Some((s, reps)) if *s == stage => {
                if index != reps.len() {
                    return Err(bad(n, "indices out of order"));
                }
                reps.push(word);
            }
            last => {
                let expected = last.map_or(1, |(s, _)| *s + 1);
                if stage != expected || index != 0 {
                    return Err(bad(n, "stages out of order"));
                }
                stages.push((stage, vec![word]));
            }
        }
    }
    Ok((fingerprint, stages))
}

/// Adopt cached reps into `tower`. A corrupt file is an error and nothing is
/// adopted.
pub fn load(path: &Path, tower: &Tower, fingerprint: &str) -> Result<CacheStatus> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(CacheStatus::Missing),
        Err(e) => return Err(GroupError::Cache(format!("{}: {}", path.display(), e))),
    };
    let (found, stages) = parse(&text)?;
    if found != fingerprint {
        return Ok(CacheStatus::Ignored { found });
    }
    for (stage, reps) in &stages {
        for w in reps {
            tower.check_letters(w, *stage)?;
        }
    }
    let mut total = 0;
    for (stage, reps) in stages {
        total += reps.len();
        tower.adopt_reps(stage, reps)?;
    }
    Ok(CacheStatus::Loaded(total))
}

pub fn render(tower: &Tower, fingerprint: &str) -> String {
    let mut out = format!("{}\n{}\n", HEADER, fingerprint);
    for (stage, reps) in tower.materialized_reps() {
        for (i, w) in reps.iter().enumerate() {
            out.push_str(&format!("rep {} {} {}\n", stage, i, w));
        }
    }
    out
}

/// Write via a sibling temp file and rename.
pub fn save(path: &Path, tower: &Tower, fingerprint: &str) -> Result<()> {
    let io = |e: std::io::Error| GroupError::Cache(format!("{}: {}", path.display(), e));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(render(tower, fingerprint).as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}
