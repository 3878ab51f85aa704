use std::collections::BTreeMap;
use std::path::Path;

use crate::corpus::VerbKey;
use crate::tsv::{self, data_lines, non_empty};
use crate::{Error, Result};

/// One extracted (subject, verb, preposition, object) kernel of a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelRecord {
    pub message_id: String,
    pub subject_np: Option<String>,
    pub verb: String,
    pub preposition: Option<String>,
    pub object_np: Option<String>,
}

impl KernelRecord {
    pub fn new(
        message_id: &str,
        subject_np: Option<&str>,
        verb: &str,
        preposition: Option<&str>,
        object_np: Option<&str>,
    ) -> Result<Self> {
        let verb = verb.trim().to_lowercase();
        if verb.is_empty() {
            return Err(Error::contract("kernel with empty verb"));
        }
        Ok(Self {
            message_id: message_id.trim().to_string(),
            subject_np: subject_np.and_then(non_empty),
            verb,
            preposition: preposition.and_then(non_empty),
            object_np: object_np.and_then(non_empty),
        })
    }

    pub fn verb_key(&self) -> VerbKey {
        VerbKey::new(self.verb.clone(), self.preposition.clone())
    }
}

/// Parses a kernel TSV: message_id, subject, verb, preposition, object.
pub fn parse_kernels(content: &str) -> std::result::Result<Vec<KernelRecord>, (u64, String)> {
    data_lines(content)
        .map(|line| {
            let f = line.fields();
            if f.len() != 5 {
                return Err((line.offset, format!("line {}: expected 5 fields", line.number)));
            }
            KernelRecord::new(f[0], Some(f[1]), f[2], Some(f[3]), Some(f[4]))
                .map_err(|e| (line.offset, format!("line {}: {e}", line.number)))
        })
        .collect()
}

pub fn load_kernels(path: impl AsRef<Path>) -> Result<Vec<KernelRecord>> {
    let path = path.as_ref();
    let content = tsv::read_to_string(path)?;
    parse_kernels(&content).map_err(|(offset, msg)| Error::format(path, offset, msg))
}

/// Kernels grouped by message id, in id order.
pub fn group_by_message(kernels: &[KernelRecord]) -> BTreeMap<&str, Vec<&KernelRecord>> {
    let mut groups: BTreeMap<&str, Vec<&KernelRecord>> = BTreeMap::new();
    for k in kernels {
        groups.entry(k.message_id.as_str()).or_default().push(k);
    }
    groups
}
