//! The `dedup` subcommand: hash a manifest's files, drop duplicate training
//! copies and train→test leaks, report what happened.
//!
//! The removed-entry CSV goes to stdout (pipe it straight into a cleanup
//! script); the per-set summary table goes to stderr. `--out` additionally
//! writes `removed.csv`, `cleaned.csv`, and `summary.txt`.

use std::borrow::Cow;
use std::path::Path;

use selftrain::dedup::{apply_removal_policy, load_manifest, summarize, CorpusEntry};
use selftrain::error::{Error, Result};

pub fn dedup(manifest: &Path, out: Option<&Path>) -> Result<u8> {
    let corpus = load_manifest(manifest)?;
    let (cleaned, report) = apply_removal_policy(&corpus);

    let mut removed_csv = Vec::new();
    selftrain::dedup::write_removed_csv(&report, &mut removed_csv)?;
    let removed_csv = String::from_utf8(removed_csv).expect("CSV output is UTF-8");
    let summary = summarize(&report);

    print!("{removed_csv}");
    eprint!("{summary}");

    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::file_io(dir, e))?;
        let write = |name: &str, contents: &str| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|e| Error::file_io(&path, e))
        };
        write("removed.csv", &removed_csv)?;
        write("cleaned.csv", &cleaned_csv(&cleaned))?;
        write("summary.txt", &summary)?;
    }
    Ok(0)
}

fn cleaned_csv(cleaned: &[CorpusEntry]) -> String {
    let mut out = String::from("set_id,file_id,digest,bytes\n");
    for entry in cleaned {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(entry.set_id.name()),
            csv_field(&entry.file_id),
            entry.digest,
            entry.byte_length
        ));
    }
    out
}

/// Quotes a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        Cow::Owned(format!("\"{}\"", s.replace('"', "\"\"")))
    } else {
        Cow::Borrowed(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use selftrain::dedup::{fingerprint_bytes, SetId};

    #[test]
    fn cleaned_csv_lists_survivors_with_digests() {
        let entry = CorpusEntry {
            set_id: SetId::new("train2019"),
            file_id: "img01".to_string(),
            digest: fingerprint_bytes(b"abc"),
            byte_length: 3,
        };
        let csv = cleaned_csv(&[entry]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("set_id,file_id,digest,bytes"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("train2019,img01,ba7816bf"));
        assert!(row.ends_with(",3"));
    }

    #[test]
    fn csv_fields_with_delimiters_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
