//! Labeled corpora: TSV loading, synthetic generation, byte-budgeted
//! prefix subsets, holdout and stratified k-fold splitting.
//!
//! The on-disk format is one document per line, `label TAB text`, UTF-8
//! with LF line endings. A document's byte size is the length of that
//! serialized line including the trailing newline, so `total_bytes` of a
//! loaded corpus equals the file size.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDocument {
    pub label: String,
    pub text: String,
}

impl LabeledDocument {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        LabeledDocument { label: label.into(), text: text.into() }
    }

    /// Bytes of the serialized record: `label \t text \n`.
    pub fn byte_size(&self) -> u64 {
        self.label.len() as u64 + 1 + self.text.len() as u64 + 1
    }

    pub fn serialize_line(&self, out: &mut String) {
        out.push_str(&self.label);
        out.push('\t');
        out.push_str(&self.text);
        out.push('\n');
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    documents: Vec<LabeledDocument>,
    classes: Vec<String>,
    total_bytes: u64,
}

impl Corpus {
    /// Build a corpus from documents, computing the class set and byte total.
    pub fn from_documents(documents: Vec<LabeledDocument>) -> Self {
        let classes: BTreeSet<&str> = documents.iter().map(|d| d.label.as_str()).collect();
        let classes = classes.into_iter().map(String::from).collect();
        let total_bytes = documents.iter().map(|d| d.byte_size()).sum();
        Corpus { documents, classes, total_bytes }
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn total_bytes(&self) -> u64 {
        self.total_bytes
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.label.clone()).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(self.total_bytes as usize);
        for doc in &self.documents {
            doc.serialize_line(&mut out);
        }
        out
    }
}

/// Strictly increasing subset sizes in megabytes (1 MB = 10^6 bytes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSchedule {
    sizes_mb: Vec<f64>,
}

impl SizeSchedule {
    pub fn new(sizes_mb: Vec<f64>) -> Result<Self> {
        if sizes_mb.is_empty() {
            return Err(Error::InvalidConfig("size schedule is empty".into()));
        }
        for w in sizes_mb.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidConfig(format!(
                    "size schedule must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if sizes_mb[0] <= 0.0 {
            return Err(Error::InvalidConfig("size schedule entries must be positive".into()));
        }
        Ok(SizeSchedule { sizes_mb })
    }

    /// Entries applicable to `corpus`: anything above its total size is dropped.
    pub fn applicable(&self, corpus: &Corpus) -> Vec<f64> {
        self.sizes_mb
            .iter()
            .copied()
            .filter(|mb| mb_to_bytes(*mb) <= corpus.total_bytes())
            .collect()
    }

    pub fn sizes_mb(&self) -> &[f64] {
        &self.sizes_mb
    }
}

pub fn mb_to_bytes(mb: f64) -> u64 {
    (mb * 1_000_000.0).round() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub vocab_per_class: usize,
    pub shared_vocab: usize,
    pub signal_prob: f64,
    pub doc_len_range: (usize, usize),
    pub target_bytes: u64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::InvalidSyntheticSpec("num_classes must be >= 2".into()));
        }
        if self.vocab_per_class < 10 {
            return Err(Error::InvalidSyntheticSpec("vocab_per_class must be >= 10".into()));
        }
        if !(0.0..=1.0).contains(&self.signal_prob) {
            return Err(Error::InvalidSyntheticSpec("signal_prob must be in [0,1]".into()));
        }
        if self.doc_len_range.0 < 1 || self.doc_len_range.0 > self.doc_len_range.1 {
            return Err(Error::InvalidSyntheticSpec("doc_len_range must be 1 <= lo <= hi".into()));
        }
        if self.target_bytes == 0 {
            return Err(Error::InvalidSyntheticSpec("target_bytes must be positive".into()));
        }
        Ok(())
    }
}

/// Load a TSV corpus from disk. Each line is `label TAB text`.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let raw = std::fs::read_to_string(path)?;
    parse_corpus(&raw)
}

pub fn parse_corpus(raw: &str) -> Result<Corpus> {
    if raw.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut documents = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let (label, text) = line.split_once('\t').ok_or_else(|| Error::MalformedLine {
            line: i + 1,
            reason: "no tab separator".into(),
        })?;
        if label.is_empty() {
            return Err(Error::MalformedLine { line: i + 1, reason: "empty label".into() });
        }
        documents.push(LabeledDocument::new(label, text));
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let corpus = Corpus::from_documents(documents);
    if corpus.classes().len() < 2 {
        return Err(Error::TooFewClasses);
    }
    Ok(corpus)
}

/// Generate a reproducible synthetic corpus.
///
/// Class labels are `c0..c{K-1}` assigned round-robin. Each token is drawn
/// from the document's class-specific vocabulary slice with probability
/// `signal_prob`, otherwise from the shared slice. Generation stops at the
/// first document that reaches or exceeds `target_bytes`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut documents = Vec::new();
    let mut total: u64 = 0;
    let mut class = 0usize;
    let mut text = String::new();
    while total < spec.target_bytes {
        let len = rng.next_range(spec.doc_len_range.0 as u64, spec.doc_len_range.1 as u64);
        text.clear();
        for t in 0..len {
            if t > 0 {
                text.push(' ');
            }
            let from_class = spec.shared_vocab == 0 || rng.next_f64() < spec.signal_prob;
            if from_class {
                let i = rng.next_below(spec.vocab_per_class as u64);
                let _ = write!(text, "c{}t{}", class, i);
            } else {
                let i = rng.next_below(spec.shared_vocab as u64);
                let _ = write!(text, "sh{}", i);
            }
        }
        let doc = LabeledDocument::new(format!("c{}", class), text.clone());
        total += doc.byte_size();
        documents.push(doc);
        class = (class + 1) % spec.num_classes;
    }
    Ok(Corpus::from_documents(documents))
}

/// Longest document prefix whose byte total fits in `budget_bytes`, except
/// that at least one document is always included. Prefixes nest: a smaller
/// budget always yields a prefix of a larger budget's result.
pub fn take_prefix(corpus: &Corpus, budget_bytes: u64) -> Corpus {
    let mut taken = Vec::new();
    let mut total: u64 = 0;
    for doc in corpus.documents() {
        let size = doc.byte_size();
        if !taken.is_empty() && total + size > budget_bytes {
            break;
        }
        total += size;
        taken.push(doc.clone());
        if total > budget_bytes {
            break;
        }
    }
    Corpus::from_documents(taken)
}

/// Seeded permutation then split; both sides non-empty.
pub fn holdout_split(corpus: &Corpus, test_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    assert!(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must be in (0,1)");
    let n = corpus.len();
    if n < 2 {
        return Err(Error::TooFewDocuments);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut order);
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let test: Vec<_> = order[..n_test].iter().map(|&i| corpus.documents()[i].clone()).collect();
    let train: Vec<_> = order[n_test..].iter().map(|&i| corpus.documents()[i].clone()).collect();
    Ok((Corpus::from_documents(train), Corpus::from_documents(test)))
}

/// Stratified k-fold: per class (in sorted order) documents are shuffled and
/// dealt round-robin into k folds; fold i's test set is fold i.
pub fn k_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<(Corpus, Corpus)>> {
    assert!(k >= 2, "k must be >= 2");
    assert!(k <= corpus.len(), "k must be <= number of documents");
    let mut rng = SplitMix64::new(seed);
    // fold assignment per document index
    let mut fold_of = vec![0usize; corpus.len()];
    for class in corpus.classes() {
        let mut members: Vec<usize> = corpus
            .documents()
            .iter()
            .enumerate()
            .filter(|(_, d)| &d.label == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < k {
            return Err(Error::ClassTooSmallForFolds { class: class.clone(), k });
        }
        rng.shuffle(&mut members);
        for (pos, &doc_idx) in members.iter().enumerate() {
            fold_of[doc_idx] = pos % k;
        }
    }
    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, doc) in corpus.documents().iter().enumerate() {
            if fold_of[i] == fold {
                test.push(doc.clone());
            } else {
                train.push(doc.clone());
            }
        }
        folds.push((Corpus::from_documents(train), Corpus::from_documents(test)));
    }
    Ok(folds)
}
