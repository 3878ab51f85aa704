//! Line reader shared by the flat-file formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// One non-comment, non-blank line with its 1-based line number and the byte
/// offset at which it starts.
pub(crate) struct Line<'a> {
    pub number: usize,
    pub offset: u64,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    pub fn fields(&self) -> Vec<&'a str> {
        self.text.split('\t').collect()
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Splits `content` into data lines, dropping `#` comments and blank lines.
pub(crate) fn data_lines(content: &str) -> impl Iterator<Item = Line<'_>> {
    let mut offset = 0u64;
    content.split_inclusive('\n').enumerate().filter_map(move |(i, raw)| {
        let start = offset;
        offset += raw.len() as u64;
        let text = raw.trim_end_matches(['\n', '\r']);
        if text.trim().is_empty() || text.starts_with('#') {
            None
        } else {
            Some(Line {
                number: i + 1,
                offset: start,
                text,
            })
        }
    })
}

pub(crate) fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(content.as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Empty string for `None`.
pub(crate) fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

pub(crate) fn non_empty(s: &str) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_lowercase())
}
