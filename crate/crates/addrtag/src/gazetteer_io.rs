//! Street and municipality list files: UTF-8, one name per line.

use std::fs;
use std::path::{Path, PathBuf};

use addrtag_core::{Gazetteer, NameKind};
use serde::Serialize;

use crate::error::{Error, Result};

pub const STREETS_ENV: &str = "ADDRTAG_STREETS";
pub const MUNICIPALITIES_ENV: &str = "ADDRTAG_MUNICIPALITIES";

/// Sample lists shipped with the crate.
pub const BUNDLED_STREETS: &str = include_str!("../data/streets.txt");
pub const BUNDLED_MUNICIPALITIES: &str = include_str!("../data/municipalities.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListStats {
    pub path: Option<PathBuf>,
    /// Non-blank lines read.
    pub lines: usize,
    /// Distinct names kept.
    pub entries: usize,
    pub multi_word: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GazetteerStats {
    pub streets: ListStats,
    pub municipalities: ListStats,
}

/// Decode line by line so invalid UTF-8 is reported with its line number.
pub fn read_name_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bytes = bytes.strip_prefix(b"\xef\xbb\xbf").unwrap_or(&bytes);
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            std::str::from_utf8(raw).map(str::to_string).map_err(|_| Error::Record {
                path: path.to_path_buf(),
                line: i + 1,
                reason: "invalid UTF-8".into(),
            })
        })
        .collect()
}

fn stats(path: Option<&Path>, lines: &[String], g: &Gazetteer, kind: NameKind) -> ListStats {
    ListStats {
        path: path.map(Path::to_path_buf),
        lines: lines.iter().filter(|l| !l.trim().is_empty()).count(),
        entries: g.len(kind),
        multi_word: g.entries(kind).iter().filter(|e| e.contains(' ')).count(),
    }
}

fn text_lines(text: &str) -> Vec<String> {
    text.lines().map(str::to_string).collect()
}

/// Load both lists; blank lines and duplicates are dropped, an empty list
/// is an error naming its file.
pub fn load_gazetteer(streets: &Path, municipalities: &Path) -> Result<(Gazetteer, GazetteerStats)> {
    let s = read_name_lines(streets)?;
    let m = read_name_lines(municipalities)?;
    let g = Gazetteer::new(&s, &m);
    if g.is_empty(NameKind::Street) {
        return Err(Error::EmptyGazetteer { path: streets.to_path_buf() });
    }
    if g.is_empty(NameKind::Municipality) {
        return Err(Error::EmptyGazetteer { path: municipalities.to_path_buf() });
    }
    let st = GazetteerStats {
        streets: stats(Some(streets), &s, &g, NameKind::Street),
        municipalities: stats(Some(municipalities), &m, &g, NameKind::Municipality),
    };
    Ok((g, st))
}

pub fn bundled_gazetteer() -> (Gazetteer, GazetteerStats) {
    let s = text_lines(BUNDLED_STREETS);
    let m = text_lines(BUNDLED_MUNICIPALITIES);
    let g = Gazetteer::new(&s, &m);
    let st = GazetteerStats {
        streets: stats(None, &s, &g, NameKind::Street),
        municipalities: stats(None, &m, &g, NameKind::Municipality),
    };
    (g, st)
}

/// Explicit paths win; a missing path falls back to the bundled list. Both
/// lists must come from the same place.
pub fn resolve_gazetteer(streets: Option<&Path>, municipalities: Option<&Path>) -> Result<(Gazetteer, GazetteerStats)> {
    match (streets, municipalities) {
        (Some(s), Some(m)) => load_gazetteer(s, m),
        (None, None) => Ok(bundled_gazetteer()),
        _ => Err(Error::Config("give both gazetteer lists or neither".into())),
    }
}
