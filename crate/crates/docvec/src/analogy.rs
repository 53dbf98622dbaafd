//! The document-analogy task: build a test set by matching question items to
//! document titles, then answer questions with the vector-offset method.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::vectors::{normalize_rows, DenseVectorSet};
use crate::weighting::SparseDocTermMatrix;

/// One question: `a` is to `b` as `c` is to `answer`, all document ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub answer: u32,
}

impl AnalogyQuestion {
    pub fn ids(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.answer]
    }

    fn distinct(&self) -> bool {
        let ids = self.ids();
        ids.iter()
            .enumerate()
            .all(|(i, x)| ids[..i].iter().all(|y| y != x))
    }
}

/// A named group of questions sharing one semantic relation.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    pub questions: Vec<AnalogyQuestion>,
}

/// Relation-grouped questions over document ids.
#[derive(Debug, Clone)]
pub struct AnalogyTestSet {
    relations: Vec<Relation>,
}

impl AnalogyTestSet {
    pub fn new(relations: Vec<Relation>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, rel) in relations.iter().enumerate() {
            if rel.name.is_empty() {
                return Err(Error::Param("relation names must be non-empty".into()));
            }
            if seen.insert(rel.name.clone(), i).is_some() {
                return Err(Error::Param(format!(
                    "duplicate relation name `{}`",
                    rel.name
                )));
            }
            for q in &rel.questions {
                if !q.distinct() {
                    return Err(Error::Param(format!(
                        "question in `{}` repeats a document id: {:?}",
                        rel.name,
                        q.ids()
                    )));
                }
            }
        }
        Ok(AnalogyTestSet { relations })
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn n_questions(&self) -> usize {
        self.relations.iter().map(|r| r.questions.len()).sum()
    }
}

/// String-level questions as read from a questions file, before title matching.
#[derive(Debug, Clone, Default)]
pub struct RawTestSet {
    pub relations: Vec<RawRelation>,
}

#[derive(Debug, Clone)]
pub struct RawRelation {
    pub name: String,
    pub questions: Vec<[String; 4]>,
}

/// Why a raw question was dropped during test-set construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    /// An item matched no document title.
    NoMatch { item: String },
    /// All four items matched but the ids were not distinct.
    DuplicateIds,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::NoMatch { item } => write!(f, "no-match:{item}"),
            SkipReason::DuplicateIds => f.write_str("duplicate-ids"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SkippedQuestion {
    pub relation: String,
    pub items: [String; 4],
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Default)]
pub struct SkipReport {
    pub skipped: Vec<SkippedQuestion>,
}

impl SkipReport {
    pub fn no_match_count(&self) -> usize {
        self.skipped
            .iter()
            .filter(|s| matches!(s.reason, SkipReason::NoMatch { .. }))
            .count()
    }

    pub fn duplicate_count(&self) -> usize {
        self.skipped
            .iter()
            .filter(|s| s.reason == SkipReason::DuplicateIds)
            .count()
    }
}

/// Match question items against document titles by exact string equality
/// after lowercasing. A question survives only if all four items match and
/// the four ids are distinct; everything else lands in the skip report.
pub fn build_testset<T: AsRef<str>>(
    raw: &RawTestSet,
    titles: &[T],
) -> Result<(AnalogyTestSet, SkipReport)> {
    let mut by_title: HashMap<String, u32> = HashMap::with_capacity(titles.len());
    for (i, t) in titles.iter().enumerate() {
        if by_title
            .insert(t.as_ref().to_lowercase(), i as u32)
            .is_some()
        {
            return Err(Error::Corpus(format!(
                "duplicate title `{}` in corpus",
                t.as_ref()
            )));
        }
    }

    let mut relations = Vec::with_capacity(raw.relations.len());
    let mut report = SkipReport::default();
    for rel in &raw.relations {
        let mut questions = Vec::new();
        for items in &rel.questions {
            let lowered: [String; 4] = [
                items[0].to_lowercase(),
                items[1].to_lowercase(),
                items[2].to_lowercase(),
                items[3].to_lowercase(),
            ];
            let ids: Vec<Option<u32>> = lowered.iter().map(|i| by_title.get(i).copied()).collect();
            if let Some(miss) = ids.iter().position(|i| i.is_none()) {
                report.skipped.push(SkippedQuestion {
                    relation: rel.name.clone(),
                    items: lowered.clone(),
                    reason: SkipReason::NoMatch {
                        item: lowered[miss].clone(),
                    },
                });
                continue;
            }
            let q = AnalogyQuestion {
                a: ids[0].unwrap(),
                b: ids[1].unwrap(),
                c: ids[2].unwrap(),
                answer: ids[3].unwrap(),
            };
            if !q.distinct() {
                report.skipped.push(SkippedQuestion {
                    relation: rel.name.clone(),
                    items: lowered,
                    reason: SkipReason::DuplicateIds,
                });
                continue;
            }
            questions.push(q);
        }
        relations.push(Relation {
            name: rel.name.clone(),
            questions,
        });
    }
    Ok((AnalogyTestSet::new(relations)?, report))
}

/// Resolve a string-level test set against vector-file labels. Unlike
/// [`build_testset`] this does not skip: a label missing from the vector set
/// is an error listing the missing labels, since the test set was presumably
/// built for this corpus.
pub fn resolve_testset(raw: &RawTestSet, labels: &[String]) -> Result<AnalogyTestSet> {
    let mut by_label: HashMap<&str, u32> = HashMap::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        by_label.insert(label.as_str(), i as u32);
    }
    let mut missing: Vec<String> = Vec::new();
    let mut relations = Vec::with_capacity(raw.relations.len());
    for rel in &raw.relations {
        let mut questions = Vec::new();
        for items in &rel.questions {
            let mut ids = [0u32; 4];
            let mut ok = true;
            for (slot, item) in ids.iter_mut().zip(items) {
                let key = item.to_lowercase();
                match by_label.get(key.as_str()) {
                    Some(&id) => *slot = id,
                    None => {
                        ok = false;
                        if !missing.contains(&key) {
                            missing.push(key);
                        }
                    }
                }
            }
            if ok {
                questions.push(AnalogyQuestion {
                    a: ids[0],
                    b: ids[1],
                    c: ids[2],
                    answer: ids[3],
                });
            }
        }
        relations.push(Relation {
            name: rel.name.clone(),
            questions,
        });
    }
    if !missing.is_empty() {
        missing.sort();
        let shown: Vec<_> = missing.iter().take(10).cloned().collect();
        return Err(Error::Eval(format!(
            "{} test-set labels are absent from the vector file: {}{}",
            missing.len(),
            shown.join(", "),
            if missing.len() > shown.len() {
                ", ..."
            } else {
                ""
            }
        )));
    }
    AnalogyTestSet::new(relations)
}

/// Sparse document vectors in CSR form, L2-normalized per row; the streaming
/// backend BOW evaluation uses instead of densifying |V|-wide rows.
#[derive(Debug, Clone)]
pub struct SparseVectors {
    labels: Vec<String>,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_ids: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVectors {
    pub fn from_matrix(matrix: &SparseDocTermMatrix, labels: Vec<String>) -> Result<Self> {
        if labels.len() != matrix.n_docs() {
            return Err(Error::Param(format!(
                "{} labels for {} matrix rows",
                labels.len(),
                matrix.n_docs()
            )));
        }
        let mut row_offsets = Vec::with_capacity(matrix.n_docs() + 1);
        let mut col_ids = Vec::with_capacity(matrix.nnz());
        let mut values = Vec::with_capacity(matrix.nnz());
        row_offsets.push(0);
        for i in 0..matrix.n_docs() {
            let norm = matrix.row(i).map(|(_, w)| w * w).sum::<f64>().sqrt();
            for (j, w) in matrix.row(i) {
                col_ids.push(j);
                values.push(if norm > 0.0 { w / norm } else { w });
            }
            row_offsets.push(col_ids.len());
        }
        Ok(SparseVectors {
            labels,
            n_cols: matrix.n_words(),
            row_offsets,
            col_ids,
            values,
        })
    }

    /// Rebuild from raw normalized rows (vector-file import).
    pub fn from_raw_rows(
        labels: Vec<String>,
        n_cols: usize,
        rows: Vec<Vec<(u32, f64)>>,
    ) -> Result<Self> {
        let matrix_like = rows;
        let mut row_offsets = Vec::with_capacity(matrix_like.len() + 1);
        let mut col_ids = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for (i, row) in matrix_like.iter().enumerate() {
            let mut last = None;
            for &(j, w) in row {
                if (j as usize) >= n_cols {
                    return Err(Error::Param(format!("row {i}: column {j} out of range")));
                }
                if let Some(prev) = last {
                    if j <= prev {
                        return Err(Error::Param(format!(
                            "row {i}: columns must be strictly increasing"
                        )));
                    }
                }
                last = Some(j);
                col_ids.push(j);
                values.push(w);
            }
            row_offsets.push(col_ids.len());
        }
        if labels.len() + 1 != row_offsets.len() {
            return Err(Error::Param("label/row count mismatch".into()));
        }
        Ok(SparseVectors {
            labels,
            n_cols,
            row_offsets,
            col_ids,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        self.col_ids[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&j, &v)| (j, v))
    }

    /// Sorted sparse combination `rows[b] + rows[c] - rows[a]`.
    fn offset_query(&self, a: usize, b: usize, c: usize) -> Vec<(u32, f64)> {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        for (row, sign) in [(b, 1.0), (c, 1.0), (a, -1.0)] {
            for (j, v) in self.row(row) {
                *acc.entry(j).or_insert(0.0) += sign * v;
            }
        }
        let mut q: Vec<(u32, f64)> = acc.into_iter().collect();
        q.sort_unstable_by_key(|&(j, _)| j);
        q
    }

    fn dot_query(&self, query: &[(u32, f64)], row: usize) -> f64 {
        let lo = self.row_offsets[row];
        let hi = self.row_offsets[row + 1];
        let cols = &self.col_ids[lo..hi];
        let vals = &self.values[lo..hi];
        let mut qi = 0;
        let mut ri = 0;
        let mut dot = 0.0;
        while qi < query.len() && ri < cols.len() {
            match query[qi].0.cmp(&cols[ri]) {
                std::cmp::Ordering::Less => qi += 1,
                std::cmp::Ordering::Greater => ri += 1,
                std::cmp::Ordering::Equal => {
                    dot += query[qi].1 * vals[ri];
                    qi += 1;
                    ri += 1;
                }
            }
        }
        dot
    }
}

/// Normalized document vectors behind one interface: dense sets and streamed
/// sparse rows answer questions the same way.
#[derive(Debug, Clone)]
pub enum VectorStore {
    Dense(DenseVectorSet),
    Sparse(SparseVectors),
}

impl VectorStore {
    /// Wrap and row-normalize a dense vector set.
    pub fn dense(set: DenseVectorSet) -> Self {
        VectorStore::Dense(normalize_rows(&set))
    }

    /// Wrap a sparse matrix, normalizing each row.
    pub fn sparse(matrix: &SparseDocTermMatrix, labels: Vec<String>) -> Result<Self> {
        Ok(VectorStore::Sparse(SparseVectors::from_matrix(
            matrix, labels,
        )?))
    }

    pub fn rows(&self) -> usize {
        match self {
            VectorStore::Dense(d) => d.rows(),
            VectorStore::Sparse(s) => s.rows(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            VectorStore::Dense(d) => d.labels(),
            VectorStore::Sparse(s) => s.labels(),
        }
    }

    /// `(v_b + v_c - v_a) . v_x` for every row x.
    pub fn offset_scores(&self, a: usize, b: usize, c: usize) -> Vec<f64> {
        match self {
            VectorStore::Dense(d) => {
                let dim = d.dim();
                let mut query = vec![0.0; dim];
                for (q, ((&vb, &vc), &va)) in query
                    .iter_mut()
                    .zip(d.row(b).iter().zip(d.row(c)).zip(d.row(a)))
                {
                    *q = vb + vc - va;
                }
                (0..d.rows())
                    .map(|x| d.row(x).iter().zip(&query).map(|(v, q)| v * q).sum())
                    .collect()
            }
            VectorStore::Sparse(s) => {
                let query = s.offset_query(a, b, c);
                (0..s.rows()).map(|x| s.dot_query(&query, x)).collect()
            }
        }
    }
}

/// Vector-offset answer: the document maximizing `(v_b + v_c - v_a) . v_x`
/// over all x outside {a, b, c}. Ties go to the smallest document id.
///
/// The store must hold at least four vectors so a candidate exists.
pub fn answer_question(store: &VectorStore, a: u32, b: u32, c: u32) -> u32 {
    let scores = store.offset_scores(a as usize, b as usize, c as usize);
    let mut best: Option<(u32, f64)> = None;
    for (x, &score) in scores.iter().enumerate() {
        let x = x as u32;
        if x == a || x == b || x == c {
            continue;
        }
        match best {
            // Strict improvement only: the first maximum (smallest id) wins.
            Some((_, s)) if score <= s => {}
            _ => best = Some((x, score)),
        }
    }
    best.expect("store must hold at least four vectors").0
}

/// Per-relation answered/correct counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationResult {
    pub name: String,
    pub asked: usize,
    pub correct: usize,
}

impl RelationResult {
    pub fn accuracy(&self) -> f64 {
        if self.asked == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.asked as f64
        }
    }
}

/// Evaluation outcome across all relations, in test-set order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub relations: Vec<RelationResult>,
}

impl EvalReport {
    pub fn total_asked(&self) -> usize {
        self.relations.iter().map(|r| r.asked).sum()
    }

    pub fn total_correct(&self) -> usize {
        self.relations.iter().map(|r| r.correct).sum()
    }

    pub fn total_accuracy(&self) -> f64 {
        let asked = self.total_asked();
        if asked == 0 {
            0.0
        } else {
            100.0 * self.total_correct() as f64 / asked as f64
        }
    }
}

/// Score a test set: a question counts iff `answer_question` returns exactly
/// the labeled answer document.
pub fn evaluate(testset: &AnalogyTestSet, store: &VectorStore) -> Result<EvalReport> {
    let n = store.rows() as u32;
    let mut relations = Vec::with_capacity(testset.relations().len());
    for rel in testset.relations() {
        let mut correct = 0;
        for q in &rel.questions {
            if q.ids().iter().any(|&id| id >= n) {
                return Err(Error::Eval(format!(
                    "question {:?} in `{}` references a document id outside the vector set (N = {n})",
                    q.ids(),
                    rel.name
                )));
            }
            if answer_question(store, q.a, q.b, q.c) == q.answer {
                correct += 1;
            }
        }
        relations.push(RelationResult {
            name: rel.name.clone(),
            asked: rel.questions.len(),
            correct,
        });
    }
    Ok(EvalReport { relations })
}
