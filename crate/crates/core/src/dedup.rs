//! Byte-identical duplicate detection across multi-year train/test corpora:
//! content fingerprinting, digest grouping, the two-rule removal policy
//! (collapse duplicates across training sets, then purge train entries that
//! leak into any test set), and a per-set audit summary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest as _, Sha256};

use crate::error::{Error, Result};
use crate::fmt::csv_field;

/// 256-bit content hash of a file's exact bytes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContentDigest([u8; 32]);

impl ContentDigest {
    /// Raw digest bytes.
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for ContentDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ContentDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContentDigest({self})")
    }
}

/// Whether a dataset participates in training, evaluation, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Train,
    Test,
    /// Neither prefix: left untouched by the removal policy and never a
    /// source of leak removals.
    Other,
}

/// A dataset name like `train2019` or `test2020`: the `train`/`test` prefix
/// (case-insensitive) classifies it, a trailing run of digits is its year,
/// and any other name is user-defined.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetId {
    name: String,
}

impl SetId {
    pub fn new(name: impl Into<String>) -> Self {
        SetId { name: name.into() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SetKind {
        let lower = self.name.to_ascii_lowercase();
        if lower.starts_with("train") {
            SetKind::Train
        } else if lower.starts_with("test") {
            SetKind::Test
        } else {
            SetKind::Other
        }
    }

    /// The trailing digit run parsed as a year, if any: `train2019` → 2019,
    /// `train` and `train2019b` → none.
    pub fn year(&self) -> Option<u32> {
        let start = self
            .name
            .char_indices()
            .rev()
            .take_while(|(_, c)| c.is_ascii_digit())
            .last()
            .map(|(i, _)| i)?;
        self.name[start..].parse().ok()
    }
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// One file in the corpus: where it lives and what its bytes hash to.
/// `(set_id, file_id)` identifies it uniquely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub set_id: SetId,
    pub file_id: String,
    pub digest: ContentDigest,
    pub byte_length: u64,
}

/// Why the removal policy dropped an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovalReason {
    /// A byte-identical copy exists in the training sets and another copy
    /// was kept.
    CrossTrainDuplicate,
    /// The entry's bytes also appear in a test set.
    TrainTestLeak,
}

impl fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RemovalReason::CrossTrainDuplicate => "cross-train-duplicate",
            RemovalReason::TrainTestLeak => "train-test-leak",
        })
    }
}

/// One removed file and the rule that removed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedEntry {
    pub set_id: SetId,
    pub file_id: String,
    pub reason: RemovalReason,
}

/// The audit trail of one policy application: every digest group of size
/// ≥ 2, every removal with its reason, and per-set removal counts covering
/// every set in the corpus (zeros included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateReport {
    pub groups: Vec<Vec<CorpusEntry>>,
    pub removed: Vec<RemovedEntry>,
    pub summary: BTreeMap<String, usize>,
}

/// SHA-256 of everything the reader yields.
pub fn fingerprint(mut reader: impl Read) -> Result<ContentDigest> {
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(ContentDigest(hasher.finalize().into()))
}

/// SHA-256 of an in-memory byte slice.
pub fn fingerprint_bytes(bytes: &[u8]) -> ContentDigest {
    ContentDigest(Sha256::digest(bytes).into())
}

/// Fingerprints a file on disk, returning its digest and byte length.
pub fn fingerprint_file(path: impl AsRef<Path>) -> Result<(ContentDigest, u64)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::file_io(path, e))?;
    let len = file.metadata().map_err(|e| Error::file_io(path, e))?.len();
    let digest = fingerprint(std::io::BufReader::new(file))
        .map_err(|e| match e {
            Error::Io(io) => Error::file_io(path, io),
            other => other,
        })?;
    Ok((digest, len))
}

/// Groups entries sharing a digest. Only groups of size ≥ 2 are returned,
/// ordered by digest, with each group's entries ordered by
/// `(set_id, file_id)` — so the result is independent of input order.
pub fn find_duplicates(corpus: &[CorpusEntry]) -> Vec<Vec<CorpusEntry>> {
    let mut by_digest: BTreeMap<ContentDigest, Vec<&CorpusEntry>> = BTreeMap::new();
    for entry in corpus {
        by_digest.entry(entry.digest).or_default().push(entry);
    }
    by_digest
        .into_values()
        .filter(|group| group.len() >= 2)
        .map(|mut group| {
            group.sort_by(|a, b| {
                (a.set_id.name(), &a.file_id).cmp(&(b.set_id.name(), &b.file_id))
            });
            group.into_iter().cloned().collect()
        })
        .collect()
}

/// Survivor preference for duplicate training copies: earliest year (sets
/// without a year come last), then lexicographic file id, then set name.
fn keep_rank(entry: &CorpusEntry) -> (u32, &str, &str) {
    (
        entry.set_id.year().unwrap_or(u32::MAX),
        &entry.file_id,
        entry.set_id.name(),
    )
}

/// Applies the two-rule cleanup and reports what happened.
///
/// Rule 1: within each digest group, all training copies but one (the
/// [`keep_rank`] minimum) are removed as cross-train duplicates. Rule 2:
/// after that, any remaining training entry whose digest also appears in a
/// test set is removed as a train–test leak — including a copy rule 1 kept.
/// Test and user-defined sets are never modified. The cleaned corpus
/// preserves input order.
pub fn apply_removal_policy(corpus: &[CorpusEntry]) -> (Vec<CorpusEntry>, DuplicateReport) {
    let groups = find_duplicates(corpus);

    let mut reasons: BTreeMap<(SetId, String), RemovalReason> = BTreeMap::new();
    for group in &groups {
        let train: Vec<&CorpusEntry> = group
            .iter()
            .filter(|e| e.set_id.kind() == SetKind::Train)
            .collect();
        if train.len() < 2 {
            continue;
        }
        let survivor = train
            .iter()
            .min_by(|a, b| keep_rank(a).cmp(&keep_rank(b)))
            .expect("group has at least two training entries");
        for entry in &train {
            if (entry.set_id.name(), &entry.file_id)
                != (survivor.set_id.name(), &survivor.file_id)
            {
                reasons.insert(
                    (entry.set_id.clone(), entry.file_id.clone()),
                    RemovalReason::CrossTrainDuplicate,
                );
            }
        }
    }

    let test_digests: BTreeSet<ContentDigest> = corpus
        .iter()
        .filter(|e| e.set_id.kind() == SetKind::Test)
        .map(|e| e.digest)
        .collect();
    for entry in corpus {
        if entry.set_id.kind() == SetKind::Train && test_digests.contains(&entry.digest) {
            reasons
                .entry((entry.set_id.clone(), entry.file_id.clone()))
                .or_insert(RemovalReason::TrainTestLeak);
        }
    }

    let cleaned: Vec<CorpusEntry> = corpus
        .iter()
        .filter(|e| !reasons.contains_key(&(e.set_id.clone(), e.file_id.clone())))
        .cloned()
        .collect();

    let mut summary: BTreeMap<String, usize> = corpus
        .iter()
        .map(|e| (e.set_id.name().to_string(), 0))
        .collect();
    let removed: Vec<RemovedEntry> = reasons
        .into_iter()
        .map(|((set_id, file_id), reason)| {
            *summary
                .get_mut(set_id.name())
                .expect("removed entries come from the corpus") += 1;
            RemovedEntry {
                set_id,
                file_id,
                reason,
            }
        })
        .collect();

    (
        cleaned,
        DuplicateReport {
            groups,
            removed,
            summary,
        },
    )
}

/// Renders the per-set audit table: for each set in the corpus, how many of
/// its files sit in duplicate groups and how many the policy removed, with
/// a Total row. Training sets come first, then test sets, then user-defined
/// ones, each block ordered by year then name.
pub fn summarize(report: &DuplicateReport) -> String {
    let mut rows: BTreeMap<&str, (usize, usize)> = report
        .summary
        .keys()
        .map(|name| (name.as_str(), (0, 0)))
        .collect();
    for group in &report.groups {
        for entry in group {
            rows.entry(entry.set_id.name()).or_default().0 += 1;
        }
    }
    for (name, count) in &report.summary {
        rows.entry(name.as_str()).or_default().1 = *count;
    }

    let kind_rank = |kind: SetKind| match kind {
        SetKind::Train => 0u8,
        SetKind::Test => 1,
        SetKind::Other => 2,
    };
    let mut ordered: Vec<(SetId, usize, usize)> = rows
        .into_iter()
        .map(|(name, (members, removed))| (SetId::new(name), members, removed))
        .collect();
    ordered.sort_by(|a, b| {
        (kind_rank(a.0.kind()), a.0.year().unwrap_or(u32::MAX), a.0.name()).cmp(&(
            kind_rank(b.0.kind()),
            b.0.year().unwrap_or(u32::MAX),
            b.0.name(),
        ))
    });

    let name_width = ordered
        .iter()
        .map(|(set, _, _)| set.name().len())
        .chain(["set".len(), "Total".len()])
        .max()
        .unwrap_or(5);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<name_width$}  {:>10}  {:>7}\n",
        "set", "duplicates", "removed"
    ));
    let mut total = (0usize, 0usize);
    for (set, members, removed) in &ordered {
        out.push_str(&format!(
            "{:<name_width$}  {members:>10}  {removed:>7}\n",
            set.name()
        ));
        total.0 += members;
        total.1 += removed;
    }
    out.push_str(&format!(
        "{:<name_width$}  {:>10}  {:>7}\n",
        "Total", total.0, total.1
    ));
    out
}

/// Loads a corpus manifest: CSV with header `set_id,file_id,path`, one file
/// per row. Relative paths resolve against the manifest's directory; every
/// file is read and fingerprinted. `(set_id, file_id)` pairs must be unique.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::file_io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?
        .clone();
    if header.iter().collect::<Vec<_>>() != ["set_id", "file_id", "path"] {
        return Err(Error::ParseError(format!(
            "{}: expected header set_id,file_id,path got {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>()
        )));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut corpus = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(Error::ParseError(format!(
                "{}:{line}: expected 3 fields, got {}",
                path.display(),
                record.len()
            )));
        }
        let (set_name, file_id, file_path) = (&record[0], &record[1], &record[2]);
        if !seen.insert((set_name.to_string(), file_id.to_string())) {
            return Err(Error::InvalidSpec(format!(
                "{}:{line}: duplicate corpus key ({set_name}, {file_id})",
                path.display()
            )));
        }
        let resolved = {
            let p = Path::new(file_path);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let (digest, byte_length) = fingerprint_file(&resolved)?;
        corpus.push(CorpusEntry {
            set_id: SetId::new(set_name),
            file_id: file_id.to_string(),
            digest,
            byte_length,
        });
    }
    Ok(corpus)
}

/// Writes the removed-file list as CSV with header `set_id,file_id,reason`.
pub fn write_removed_csv<W: Write>(report: &DuplicateReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "set_id,file_id,reason")?;
    for r in &report.removed {
        writeln!(
            w,
            "{},{},{}",
            csv_field(r.set_id.name()),
            csv_field(&r.file_id),
            r.reason
        )?;
    }
    Ok(())
}
