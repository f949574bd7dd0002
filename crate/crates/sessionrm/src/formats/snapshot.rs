//! Versioned JSON snapshot of an [`InvertedIndex`].

use std::path::Path;

use serde::{Deserialize, Serialize};
use sessionrm_core::InvertedIndex;

use super::{read_to_string, write_bytes};
use crate::{Error, Result};

pub const MAGIC: &str = "sessionrm-index";
pub const VERSION: u32 = 1;

#[derive(Serialize)]
struct SnapshotRef<'a> {
    magic: &'a str,
    version: u32,
    index: &'a InvertedIndex,
}

#[derive(Deserialize)]
struct Header {
    magic: String,
    version: u32,
}

#[derive(Deserialize)]
struct Snapshot {
    index: InvertedIndex,
}

pub fn to_json(index: &InvertedIndex) -> String {
    serde_json::to_string(&SnapshotRef {
        magic: MAGIC,
        version: VERSION,
        index,
    })
    .expect("index serializes")
}

pub fn from_json(text: &str, path: &Path) -> Result<InvertedIndex> {
    let header: Header = serde_json::from_str(text).map_err(|e| Error::format(path, format!("not an index snapshot: {e}")))?;
    if header.magic != MAGIC {
        return Err(Error::format(path, format!("bad magic `{}`", header.magic)));
    }
    if header.version != VERSION {
        return Err(Error::format(path, format!("unsupported snapshot version {}", header.version)));
    }
    let snap: Snapshot = serde_json::from_str(text).map_err(|e| Error::format(path, e.to_string()))?;
    snap.index.validate().map_err(|msg| Error::format(path, msg))?;
    Ok(snap.index)
}

pub fn write_index(index: &InvertedIndex, path: &Path) -> Result<()> {
    write_bytes(path, to_json(index).as_bytes())
}

pub fn read_index(path: &Path) -> Result<InvertedIndex> {
    from_json(&read_to_string(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use sessionrm_core::lm::query_log_likelihood;
    use sessionrm_core::{analyze, build_index};

    #[test]
    fn rejects_foreign_or_future_files() {
        let p = Path::new("x.idx");
        assert!(from_json("{\"magic\":\"other\",\"version\":1,\"index\":{}}", p).is_err());
        let future = to_json(&InvertedIndex::default()).replace("\"version\":1", "\"version\":99");
        assert!(from_json(&future, p).unwrap_err().to_string().contains("version 99"));
        assert!(from_json("[1,2]", p).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_preserves_index_and_scores(
            docs in proptest::collection::btree_map("[a-z]{1,4}", "[a-z ]{0,40}", 0..6),
            query in "[a-z ]{1,12}",
        ) {
            let idx = build_index(docs.iter().map(|(k, v)| (k.clone(), v.clone()))).unwrap();
            let back = from_json(&to_json(&idx), Path::new("mem")).unwrap();
            prop_assert_eq!(&idx, &back);
            let q = analyze(&query);
            for d in idx.docs() {
                let a = query_log_likelihood(&q, d, idx.stats(), 2500.0);
                let b = query_log_likelihood(&q, back.doc(&d.doc_id).unwrap(), back.stats(), 2500.0);
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
