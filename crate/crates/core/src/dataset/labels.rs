//! Diagnosis-string → target-class mapping for the 2018/2019/2020 releases.

use crate::error::{Error, Result};

/// The nine target classes the multi-year corpora are harmonized onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetClass {
    Nv,
    Mel,
    Bcc,
    Bkl,
    Ak,
    Scc,
    Vasc,
    Df,
    Unknown,
}

impl TargetClass {
    /// All targets, in canonical order (also the class-index order).
    pub const ALL: [TargetClass; 9] = [
        TargetClass::Nv,
        TargetClass::Mel,
        TargetClass::Bcc,
        TargetClass::Bkl,
        TargetClass::Ak,
        TargetClass::Scc,
        TargetClass::Vasc,
        TargetClass::Df,
        TargetClass::Unknown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetClass::Nv => "NV",
            TargetClass::Mel => "MEL",
            TargetClass::Bcc => "BCC",
            TargetClass::Bkl => "BKL",
            TargetClass::Ak => "AK",
            TargetClass::Scc => "SCC",
            TargetClass::Vasc => "VASC",
            TargetClass::Df => "DF",
            TargetClass::Unknown => "Unknown",
        }
    }

    /// Position in [`TargetClass::ALL`], usable as a class index.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).expect("member of ALL")
    }
}

impl std::fmt::Display for TargetClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps a raw diagnosis string from the given release year onto its target
/// class. Matching is case-insensitive and whitespace-trimmed; the mapping
/// is total over each year's published vocabulary and errors on anything
/// else.
pub fn map_diagnosis_label(raw: &str, year: u16) -> Result<TargetClass> {
    use TargetClass::*;
    let normalized = raw.trim().to_ascii_lowercase();
    let mapped = match year {
        2018 => match normalized.as_str() {
            "nv" => Some(Nv),
            "mel" => Some(Mel),
            "bcc" => Some(Bcc),
            "bkl" => Some(Bkl),
            "akiec" => Some(Ak),
            "vasc" => Some(Vasc),
            "df" => Some(Df),
            _ => None,
        },
        2019 => match normalized.as_str() {
            "nv" => Some(Nv),
            "mel" => Some(Mel),
            "bcc" => Some(Bcc),
            "bkl" => Some(Bkl),
            "ak" => Some(Ak),
            "scc" => Some(Scc),
            "vasc" => Some(Vasc),
            "df" => Some(Df),
            _ => None,
        },
        2020 => match normalized.as_str() {
            "naevusn" => Some(Nv),
            "melanoma" => Some(Mel),
            // The NOS table cell covers the seborrheic/lentigo family listed
            // in its footnote.
            "nos" | "seborrheic keratosis" | "lichenoid keratosis" | "solar lentigo"
            | "lentigo nos" => Some(Bkl),
            // The Atypical cell covers the indeterminate family in its
            // footnote.
            "atypical" | "cafe-au-lait macule" | "atypical melanocytic proliferation"
            | "unknown" => Some(Unknown),
            _ => None,
        },
        other => return Err(Error::UnknownYear(other)),
    };
    mapped.ok_or_else(|| Error::UnknownDiagnosis {
        label: raw.to_string(),
        year,
    })
}
