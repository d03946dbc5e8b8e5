//! Utterance statistics and skill summaries over CHAT records.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use taskforge_telemetry::{LogRecord, RecordBody};

/// Whitespace tokenizer.
pub fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
}

/// The chat texts of a log, in order.
pub fn utterances(records: &[LogRecord]) -> Vec<&str> {
    records
        .iter()
        .filter_map(|r| match &r.body {
            RecordBody::Chat { text, .. } => Some(text.as_str()),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UtteranceStats {
    pub utterances: usize,
    /// Distinct lowercased tokens.
    pub vocabulary: usize,
    /// `None` when there are no utterances.
    pub mean_tokens: Option<f64>,
}

pub fn utterance_stats(records: &[LogRecord]) -> UtteranceStats {
    let texts = utterances(records);
    let mut vocab = HashSet::new();
    let mut total = 0usize;
    for text in &texts {
        for tok in tokens(text) {
            total += 1;
            vocab.insert(tok.to_lowercase());
        }
    }
    UtteranceStats {
        utterances: texts.len(),
        vocabulary: vocab.len(),
        mean_tokens: (!texts.is_empty()).then(|| total as f64 / texts.len() as f64),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Social,
    Cognitive,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Social => "SOCIAL",
            Dimension::Cognitive => "COGNITIVE",
        }
    }
}

/// The eight collaborative problem-solving skills, in table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Skill {
    MaintainingCommunication,
    SharingInformation,
    EstablishingSharedUnderstanding,
    Negotiating,
    RepresentingFormulating,
    Planning,
    ExecutingActions,
    Monitoring,
}

impl Skill {
    pub const ALL: [Skill; 8] = [
        Skill::MaintainingCommunication,
        Skill::SharingInformation,
        Skill::EstablishingSharedUnderstanding,
        Skill::Negotiating,
        Skill::RepresentingFormulating,
        Skill::Planning,
        Skill::ExecutingActions,
        Skill::Monitoring,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Skill::MaintainingCommunication => "MAINTAINING_COMMUNICATION",
            Skill::SharingInformation => "SHARING_INFORMATION",
            Skill::EstablishingSharedUnderstanding => "ESTABLISHING_SHARED_UNDERSTANDING",
            Skill::Negotiating => "NEGOTIATING",
            Skill::RepresentingFormulating => "REPRESENTING_FORMULATING",
            Skill::Planning => "PLANNING",
            Skill::ExecutingActions => "EXECUTING_ACTIONS",
            Skill::Monitoring => "MONITORING",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Skill::MaintainingCommunication
            | Skill::SharingInformation
            | Skill::EstablishingSharedUnderstanding
            | Skill::Negotiating => Dimension::Social,
            _ => Dimension::Cognitive,
        }
    }
}

impl fmt::Display for Skill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown skill {0:?}")]
pub struct UnknownSkill(pub String);

impl FromStr for Skill {
    type Err = UnknownSkill;

    /// Accepts the upper-case names and readable forms such as
    /// "Representing and formulating".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .to_uppercase()
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|w| !w.is_empty() && *w != "AND")
            .collect::<Vec<_>>()
            .join("_");
        Skill::ALL.into_iter().find(|k| k.as_str() == norm).ok_or_else(|| UnknownSkill(s.to_string()))
    }
}

/// Skills per utterance, keyed by index into the CHAT subsequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotationSet {
    pub entries: BTreeMap<usize, BTreeSet<Skill>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnnotationError {
    #[error("line {line}: expected `index<TAB>skill[,skill...]`")]
    Shape { line: usize },
    #[error("line {line}: bad utterance index {value:?}")]
    BadIndex { line: usize, value: String },
    #[error("line {line}: {source}")]
    Skill { line: usize, source: UnknownSkill },
    #[error("line {line}: no skills listed")]
    Empty { line: usize },
    #[error("line {line}: utterance {index} is annotated twice")]
    Duplicate { line: usize, index: usize },
}

impl AnnotationSet {
    /// Reads `index<TAB>skill[,skill...]` lines. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, AnnotationError> {
        let mut set = AnnotationSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let (idx, skills) = raw.split_once('\t').ok_or(AnnotationError::Shape { line })?;
            let index: usize =
                idx.trim().parse().map_err(|_| AnnotationError::BadIndex { line, value: idx.to_string() })?;
            let mut labels = BTreeSet::new();
            for s in skills.split(',').filter(|s| !s.trim().is_empty()) {
                labels.insert(s.parse().map_err(|source| AnnotationError::Skill { line, source })?);
            }
            if labels.is_empty() {
                return Err(AnnotationError::Empty { line });
            }
            if set.entries.insert(index, labels).is_some() {
                return Err(AnnotationError::Duplicate { line, index });
            }
        }
        Ok(set)
    }

    pub fn insert(&mut self, index: usize, skills: impl IntoIterator<Item = Skill>) {
        self.entries.entry(index).or_default().extend(skills);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (index, skills) in &self.entries {
            let names: Vec<&str> = skills.iter().map(|s| s.as_str()).collect();
            out.push_str(&format!("{index}\t{}\n", names.join(",")));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkillRow {
    pub skill: Skill,
    /// Labels, so a multi-label utterance counts once per skill.
    pub count: u64,
    pub mean_tokens: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkillSummary {
    /// One row per skill in table order.
    pub rows: Vec<SkillRow>,
    pub annotated_utterances: usize,
}

impl SkillSummary {
    pub fn total_labels(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn row(&self, skill: Skill) -> &SkillRow {
        self.rows.iter().find(|r| r.skill == skill).expect("every skill has a row")
    }

    /// Fraction of all labels carried by `skills`; `None` with no labels.
    pub fn share(&self, skills: &[Skill]) -> Option<f64> {
        let total = self.total_labels();
        let part: u64 = self.rows.iter().filter(|r| skills.contains(&r.skill)).map(|r| r.count).sum();
        (total > 0).then(|| part as f64 / total as f64)
    }

    pub fn dimension_share(&self, dim: Dimension) -> Option<f64> {
        let skills: Vec<Skill> = Skill::ALL.into_iter().filter(|s| s.dimension() == dim).collect();
        self.share(&skills)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("annotation refers to utterance {index}, but the log has {utterances}")]
pub struct DanglingIndex {
    pub index: usize,
    pub utterances: usize,
}

pub fn skill_summary(records: &[LogRecord], annotations: &AnnotationSet) -> Result<SkillSummary, DanglingIndex> {
    let texts = utterances(records);
    let mut sums: BTreeMap<Skill, (u64, usize)> = BTreeMap::new();
    for (&index, skills) in &annotations.entries {
        let text = texts.get(index).ok_or(DanglingIndex { index, utterances: texts.len() })?;
        let n = tokens(text).count();
        for skill in skills {
            let e = sums.entry(*skill).or_default();
            e.0 += 1;
            e.1 += n;
        }
    }
    let rows = Skill::ALL
        .into_iter()
        .map(|skill| {
            let (count, toks) = sums.get(&skill).copied().unwrap_or_default();
            SkillRow { skill, count, mean_tokens: (count > 0).then(|| toks as f64 / count as f64) }
        })
        .collect();
    Ok(SkillSummary { rows, annotated_utterances: annotations.entries.len() })
}
