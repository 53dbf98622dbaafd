//! Corpus ingestion: tokenization, vocabulary construction, and encoding
//! documents as token-id sequences.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default frequency threshold below which tokens are dropped.
pub const DEFAULT_MIN_COUNT: u64 = 20;

/// A raw document before encoding: a title plus its whitespace text.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub title: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(title: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            title: title.into(),
            text: text.into(),
        }
    }
}

/// Lowercase and split a document into the tokens the models train on.
///
/// Rules: split on Unicode whitespace, lowercase, then drop a token if it is
/// made entirely of ASCII digits or contains any character outside ASCII
/// letters, digits, hyphen, and apostrophe.
pub fn tokenize_document(raw_text: &str) -> Vec<String> {
    raw_text
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .filter(|t| !t.is_empty() && !is_pure_digits(t) && is_allowed_token(t))
        .collect()
}

fn is_pure_digits(token: &str) -> bool {
    token.chars().all(|c| c.is_ascii_digit())
}

fn is_allowed_token(token: &str) -> bool {
    token
        .chars()
        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '\'')
}

/// Token <-> id map with corpus frequencies.
///
/// Ids are dense `0..len` and assigned in descending frequency order, ties
/// broken by first occurrence in the corpus.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    freqs: Vec<u64>,
    min_count: u64,
}

impl Vocabulary {
    /// Count tokens over `docs` and keep those occurring at least `min_count` times.
    ///
    /// Fails if nothing survives the threshold, which almost always means the
    /// corpus and the threshold do not belong together.
    pub fn build<'a, I>(docs: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a RawDocument>,
    {
        if min_count < 1 {
            return Err(Error::Param("min_count must be >= 1".into()));
        }
        // First-occurrence order doubles as the tie-break key below.
        let mut order: Vec<String> = Vec::new();
        let mut counts: HashMap<String, u64> = HashMap::new();
        for doc in docs {
            for token in tokenize_document(&doc.text) {
                match counts.get_mut(&token) {
                    Some(n) => *n += 1,
                    None => {
                        counts.insert(token.clone(), 1);
                        order.push(token);
                    }
                }
            }
        }

        let mut kept: Vec<(String, u64)> = order
            .into_iter()
            .map(|t| {
                let n = counts[&t];
                (t, n)
            })
            .filter(|(_, n)| *n >= min_count)
            .collect();
        // Stable sort keeps first-occurrence order among equal frequencies.
        kept.sort_by_key(|(_, n)| std::cmp::Reverse(*n));

        if kept.is_empty() {
            return Err(Error::Corpus(format!(
                "empty vocabulary: no token occurs at least {min_count} times"
            )));
        }

        let mut tokens = Vec::with_capacity(kept.len());
        let mut freqs = Vec::with_capacity(kept.len());
        let mut ids = HashMap::with_capacity(kept.len());
        for (i, (token, freq)) in kept.into_iter().enumerate() {
            ids.insert(token.clone(), i as u32);
            tokens.push(token);
            freqs.push(freq);
        }
        Ok(Vocabulary {
            tokens,
            ids,
            freqs,
            min_count,
        })
    }

    /// Rebuild from `(token, freq)` pairs already in id order (vocabulary file import).
    pub fn from_entries(entries: Vec<(String, u64)>, min_count: u64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Corpus("empty vocabulary".into()));
        }
        let mut tokens = Vec::with_capacity(entries.len());
        let mut freqs = Vec::with_capacity(entries.len());
        let mut ids = HashMap::with_capacity(entries.len());
        for (i, (token, freq)) in entries.into_iter().enumerate() {
            if ids.insert(token.clone(), i as u32).is_some() {
                return Err(Error::Corpus(format!(
                    "duplicate vocabulary token `{token}`"
                )));
            }
            tokens.push(token);
            freqs.push(freq);
        }
        Ok(Vocabulary {
            tokens,
            ids,
            freqs,
            min_count,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn freq(&self, id: u32) -> u64 {
        self.freqs[id as usize]
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Frequencies in id order.
    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }
}

/// One encoded document: dense id, lowercased unique title, kept token ids.
#[derive(Debug, Clone)]
pub struct EncodedDocument {
    pub doc_id: u32,
    pub title: String,
    pub tokens: Vec<u32>,
}

/// An encoded corpus: documents in ingestion order with dense ids.
#[derive(Debug, Clone)]
pub struct DocumentCorpus {
    docs: Vec<EncodedDocument>,
    total_tokens: u64,
}

impl DocumentCorpus {
    /// Encode `docs` against `vocab`, silently dropping out-of-vocabulary
    /// tokens. Empty documents are kept so the doc-id space stays dense.
    ///
    /// Titles are lowercased and must be unique; a collision aborts ingestion.
    pub fn encode<'a, I>(docs: I, vocab: &Vocabulary) -> Result<Self>
    where
        I: IntoIterator<Item = &'a RawDocument>,
    {
        let mut encoded = Vec::new();
        let mut seen_titles: HashMap<String, u32> = HashMap::new();
        let mut total_tokens = 0u64;
        for (i, doc) in docs.into_iter().enumerate() {
            let title = doc.title.to_lowercase();
            if let Some(prev) = seen_titles.insert(title.clone(), i as u32) {
                return Err(Error::Corpus(format!(
                    "duplicate title `{title}` (documents {prev} and {i})"
                )));
            }
            let tokens: Vec<u32> = tokenize_document(&doc.text)
                .into_iter()
                .filter_map(|t| vocab.id(&t))
                .collect();
            total_tokens += tokens.len() as u64;
            encoded.push(EncodedDocument {
                doc_id: i as u32,
                title,
                tokens,
            });
        }
        Ok(DocumentCorpus {
            docs: encoded,
            total_tokens,
        })
    }

    /// Reassemble from already-encoded documents (artifact import).
    pub fn from_documents(docs: Vec<EncodedDocument>) -> Result<Self> {
        let mut seen: HashMap<&str, u32> = HashMap::new();
        let mut total_tokens = 0u64;
        for (i, doc) in docs.iter().enumerate() {
            if doc.doc_id != i as u32 {
                return Err(Error::Corpus(format!(
                    "doc ids must be dense: expected {i}, found {}",
                    doc.doc_id
                )));
            }
            if let Some(prev) = seen.insert(&doc.title, doc.doc_id) {
                return Err(Error::Corpus(format!(
                    "duplicate title `{}` (documents {prev} and {i})",
                    doc.title
                )));
            }
            total_tokens += doc.tokens.len() as u64;
        }
        Ok(DocumentCorpus { docs, total_tokens })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn doc(&self, id: u32) -> &EncodedDocument {
        &self.docs[id as usize]
    }

    pub fn docs(&self) -> &[EncodedDocument] {
        &self.docs
    }

    /// Sum of kept token counts over all documents.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.docs.iter().map(|d| d.title.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(title: &str, text: &str) -> RawDocument {
        RawDocument::new(title, text)
    }

    #[test]
    fn tokenize_drops_digits_and_non_ascii() {
        assert_eq!(tokenize_document("The 2010 Café"), vec!["the"]);
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize_document("").is_empty());
    }

    #[test]
    fn tokenize_keeps_hyphens_and_mixed_alnum() {
        assert_eq!(
            tokenize_document("state-of-the-art models 42a"),
            vec!["state-of-the-art", "models", "42a"]
        );
    }

    #[test]
    fn tokenize_keeps_apostrophes() {
        assert_eq!(tokenize_document("it's fine"), vec!["it's", "fine"]);
    }

    #[test]
    fn min_count_boundary() {
        let below: Vec<RawDocument> = (0..19).map(|i| doc(&format!("d{i}"), "apple")).collect();
        assert!(Vocabulary::build(&below, 20).is_err()); // nothing survives

        let at: Vec<RawDocument> = (0..20).map(|i| doc(&format!("d{i}"), "apple")).collect();
        let vocab = Vocabulary::build(&at, 20).unwrap();
        assert_eq!(vocab.id("apple"), Some(0));
        assert_eq!(vocab.freq(0), 20);
    }

    #[test]
    fn ids_order_by_freq_then_first_occurrence() {
        let docs = vec![doc("d0", "a a b b c a b a b"), doc("d1", "a b")];
        // a: 5, b: 5, c: 1; a seen first.
        let vocab = Vocabulary::build(&docs, 2).unwrap();
        assert_eq!(vocab.id("a"), Some(0));
        assert_eq!(vocab.id("b"), Some(1));
        assert_eq!(vocab.id("c"), None);
        assert_eq!(vocab.len(), 2);
    }

    #[test]
    fn encode_drops_oov_and_keeps_empty_docs() {
        let build = vec![doc("x", "the the the cat cat cat")];
        let vocab = Vocabulary::build(&build, 1).unwrap();
        let docs = vec![
            doc("A", "the cat"),
            doc("B", "the zyzzyva"),
            doc("C", "1234"),
        ];
        let corpus = DocumentCorpus::encode(&docs, &vocab).unwrap();
        assert_eq!(
            corpus.doc(0).tokens,
            vec![vocab.id("the").unwrap(), vocab.id("cat").unwrap()]
        );
        assert_eq!(corpus.doc(1).tokens, vec![vocab.id("the").unwrap()]);
        assert!(corpus.doc(2).tokens.is_empty());
        assert_eq!(corpus.total_tokens(), 3);
        assert_eq!(corpus.doc(0).title, "a");
    }

    #[test]
    fn duplicate_titles_rejected() {
        let vocab = Vocabulary::build(&[doc("x", "w w")], 1).unwrap();
        let docs = vec![doc("Paris", "w"), doc("paris", "w")];
        let err = DocumentCorpus::encode(&docs, &vocab).unwrap_err();
        assert!(err.to_string().contains("paris"), "{err}");
    }

    #[test]
    fn vocab_roundtrip_decodes_kept_tokens_in_order() {
        let docs = vec![doc("d", "red green red blue green red")];
        let vocab = Vocabulary::build(&docs, 2).unwrap();
        let corpus = DocumentCorpus::encode(&docs, &vocab).unwrap();
        let decoded: Vec<&str> = corpus
            .doc(0)
            .tokens
            .iter()
            .map(|&id| vocab.token(id))
            .collect();
        assert_eq!(decoded, vec!["red", "green", "red", "green", "red"]);
    }

    #[test]
    fn raising_min_count_never_adds_tokens() {
        let docs = vec![doc("d", "a a a b b c")];
        let low = Vocabulary::build(&docs, 1).unwrap();
        let high = Vocabulary::build(&docs, 2).unwrap();
        for t in high.tokens() {
            assert!(low.id(t).is_some());
        }
        assert!(high.len() <= low.len());
    }
}
