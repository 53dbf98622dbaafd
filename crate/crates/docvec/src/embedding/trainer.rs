//! The shared negative-sampling SGD loop and its three model wirings.
//!
//! Parameters live in f64 matrices stored as atomic bit cells so that
//! multiple workers can update them without locks (the asynchronous SGD
//! contract: lost updates are tolerated). With one worker the same code path
//! is fully deterministic and bit-reproducible.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{DocumentCorpus, Vocabulary};
use crate::embedding::{EmbeddingParams, ModelKind, LR_FLOOR};
use crate::error::{Error, Result};
use crate::vectors::DenseVectorSet;

use super::sampler::{build_negative_table, NegativeSampler};

/// Linearly decayed learning rate, floored at `LR_FLOOR * initial_lr` so late
/// updates never reach exactly zero.
pub fn learning_rate_at(words_processed: u64, total_words: u64, initial_lr: f64) -> f64 {
    let remaining = 1.0 - words_processed as f64 / total_words.max(1) as f64;
    initial_lr * remaining.max(LR_FLOOR)
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Loss and gradients of one negative-sampling objective
/// `sum_j [ label_j ln s(u_j . h) + (1 - label_j) ln s(-u_j . h) ]`.
///
/// Returns `(loss, dL/dh, dL/du_j per sample)`. The trainer ascends this
/// objective; the finite-difference suite checks these gradients against the
/// loss directly.
pub fn negative_sampling_gradients(
    h: &[f64],
    samples: &[(f64, Vec<f64>)],
) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let dim = h.len();
    let mut loss = 0.0;
    let mut grad_h = vec![0.0; dim];
    let mut grad_us = Vec::with_capacity(samples.len());
    for (label, u) in samples {
        let dot: f64 = u.iter().zip(h).map(|(a, b)| a * b).sum();
        let p = sigmoid(dot);
        loss += if *label > 0.5 {
            p.max(f64::MIN_POSITIVE).ln()
        } else {
            (1.0 - p).max(f64::MIN_POSITIVE).ln()
        };
        let g = label - p;
        let mut grad_u = Vec::with_capacity(dim);
        for c in 0..dim {
            grad_u.push(g * h[c]);
            grad_h[c] += g * u[c];
        }
        grad_us.push(grad_u);
    }
    (loss, grad_h, grad_us)
}

/// f64 matrix in atomic bit cells; relaxed loads and stores everywhere.
pub(crate) struct AtomicMatrix {
    dim: usize,
    cells: Vec<AtomicU64>,
}

impl AtomicMatrix {
    fn zeros(rows: usize, dim: usize) -> Self {
        let cells = (0..rows * dim).map(|_| AtomicU64::new(0)).collect();
        AtomicMatrix { dim, cells }
    }

    /// Input-row convention: uniform in (-0.5/dim, 0.5/dim).
    fn uniform(rows: usize, dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let m = AtomicMatrix::zeros(rows, dim);
        let bound = 0.5 / dim as f64;
        for cell in &m.cells {
            let v = (rng.random::<f64>() - 0.5) * 2.0 * bound;
            cell.store(v.to_bits(), Ordering::Relaxed);
        }
        m
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> f64 {
        f64::from_bits(self.cells[row * self.dim + col].load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, row: usize, col: usize, value: f64) {
        self.cells[row * self.dim + col].store(value.to_bits(), Ordering::Relaxed);
    }

    fn add_to_row(&self, row: usize, delta: &[f64]) {
        for (c, d) in delta.iter().enumerate() {
            self.set(row, c, self.get(row, c) + d);
        }
    }

    fn accumulate_row(&self, row: usize, acc: &mut [f64]) {
        for (c, a) in acc.iter_mut().enumerate() {
            *a += self.get(row, c);
        }
    }

    fn snapshot(&self, what: &str) -> Result<Vec<f64>> {
        let data: Vec<f64> = self
            .cells
            .iter()
            .map(|c| f64::from_bits(c.load(Ordering::Relaxed)))
            .collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged(format!(
                "{what} contains non-finite values; lower the learning rate"
            )));
        }
        Ok(data)
    }
}

/// One SGD step of the negative-sampling objective against the output matrix.
///
/// `input_delta` receives the accumulated `lr * g * u` term that the caller
/// adds (in full, not averaged) to every contributing input row.
#[allow(clippy::too_many_arguments)]
fn ns_step(
    out: &AtomicMatrix,
    h: &[f64],
    target: u32,
    negatives: usize,
    lr: f64,
    sampler: &NegativeSampler,
    rng: &mut ChaCha8Rng,
    input_delta: &mut [f64],
) -> Result<()> {
    input_delta.fill(0.0);
    for d in 0..=negatives {
        let (row, label) = if d == 0 {
            (target, 1.0)
        } else {
            (sampler.sample_excluding(rng, target)?, 0.0)
        };
        let row = row as usize;
        let mut dot = 0.0;
        for (c, &hc) in h.iter().enumerate() {
            dot += out.get(row, c) * hc;
        }
        if !dot.is_finite() {
            return Err(Error::Diverged(
                "non-finite activation during training; lower the learning rate".into(),
            ));
        }
        let g = (label - sigmoid(dot)) * lr;
        for (c, &hc) in h.iter().enumerate() {
            let old = out.get(row, c);
            input_delta[c] += g * old;
            out.set(row, c, old + g * hc);
        }
    }
    Ok(())
}

struct Shared<'a> {
    corpus: &'a DocumentCorpus,
    params: &'a EmbeddingParams,
    model: ModelKind,
    word_in: Option<AtomicMatrix>,
    doc_in: Option<AtomicMatrix>,
    out: AtomicMatrix,
    sampler: NegativeSampler,
    initial_lr: f64,
    total_words: u64,
    processed: AtomicU64,
    started: Instant,
    /// Raw corpus frequencies, used by the subsampling filter.
    word_freqs: Vec<f64>,
}

impl Shared<'_> {
    fn worker(&self, worker_id: usize, doc_lo: usize, doc_hi: usize) -> Result<()> {
        let params = self.params;
        let dim = params.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(
            params
                .seed
                .wrapping_add((worker_id as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut h = vec![0.0; dim];
        let mut delta = vec![0.0; dim];
        // (original position, word) pairs surviving subsampling.
        let mut kept: Vec<(u32, u32)> = Vec::new();
        let mut last_report = 0u64;

        for _epoch in 0..params.epochs {
            for doc in &self.corpus.docs()[doc_lo..doc_hi] {
                let base = self
                    .processed
                    .fetch_add(doc.tokens.len() as u64, Ordering::Relaxed);

                kept.clear();
                match params.subsample {
                    None => kept.extend(doc.tokens.iter().enumerate().map(|(p, &w)| (p as u32, w))),
                    Some(threshold) => {
                        let cut = threshold * self.corpus.total_tokens() as f64;
                        for (p, &w) in doc.tokens.iter().enumerate() {
                            let f = self.word_freqs[w as usize];
                            let keep = ((f / cut).sqrt() + 1.0) * cut / f;
                            if keep >= 1.0 || rng.random::<f64>() < keep {
                                kept.push((p as u32, w));
                            }
                        }
                    }
                }

                for i in 0..kept.len() {
                    let (orig_pos, target) = kept[i];
                    let lr =
                        learning_rate_at(base + orig_pos as u64, self.total_words, self.initial_lr);

                    h.fill(0.0);
                    let mut n_inputs = 0usize;
                    let mut ctx_lo = 0usize;
                    let mut ctx_hi = 0usize;
                    match self.model {
                        ModelKind::Cbow | ModelKind::PvDm => {
                            let reach = rng.random_range(1..=params.window);
                            ctx_lo = i.saturating_sub(reach);
                            ctx_hi = (i + reach + 1).min(kept.len());
                            let words = self.word_in.as_ref().unwrap();
                            for (j, &(_, w)) in kept[ctx_lo..ctx_hi].iter().enumerate() {
                                if ctx_lo + j == i {
                                    continue;
                                }
                                words.accumulate_row(w as usize, &mut h);
                                n_inputs += 1;
                            }
                            if self.model == ModelKind::PvDm {
                                let docs = self.doc_in.as_ref().unwrap();
                                docs.accumulate_row(doc.doc_id as usize, &mut h);
                                n_inputs += 1;
                            }
                        }
                        ModelKind::PvDbow => {
                            let docs = self.doc_in.as_ref().unwrap();
                            docs.accumulate_row(doc.doc_id as usize, &mut h);
                            n_inputs = 1;
                        }
                    }
                    if n_inputs == 0 {
                        continue; // CBOW position with no context
                    }
                    if n_inputs > 1 {
                        let inv = 1.0 / n_inputs as f64;
                        for v in h.iter_mut() {
                            *v *= inv;
                        }
                    }

                    ns_step(
                        &self.out,
                        &h,
                        target,
                        params.negatives,
                        lr,
                        &self.sampler,
                        &mut rng,
                        &mut delta,
                    )?;

                    match self.model {
                        ModelKind::Cbow | ModelKind::PvDm => {
                            let words = self.word_in.as_ref().unwrap();
                            for (j, &(_, w)) in kept[ctx_lo..ctx_hi].iter().enumerate() {
                                if ctx_lo + j == i {
                                    continue;
                                }
                                words.add_to_row(w as usize, &delta);
                            }
                            if self.model == ModelKind::PvDm {
                                self.doc_in
                                    .as_ref()
                                    .unwrap()
                                    .add_to_row(doc.doc_id as usize, &delta);
                            }
                        }
                        ModelKind::PvDbow => {
                            self.doc_in
                                .as_ref()
                                .unwrap()
                                .add_to_row(doc.doc_id as usize, &delta);
                        }
                    }
                }

                if params.log_progress {
                    let done = self.processed.load(Ordering::Relaxed);
                    if done - last_report >= 100_000 {
                        last_report = done;
                        let secs = self.started.elapsed().as_secs_f64().max(1e-9);
                        let lr = learning_rate_at(done, self.total_words, self.initial_lr);
                        eprint!(
                            "\rlr {lr:.6}  progress {:5.1}%  {:.0} words/s   ",
                            100.0 * done as f64 / self.total_words as f64,
                            done as f64 / secs
                        );
                    }
                }
            }
        }
        Ok(())
    }
}

/// CBOW: averaged context word vectors predict the center word. Returns the
/// input word matrix, one labeled row per vocabulary token.
pub fn train_cbow(
    corpus: &DocumentCorpus,
    vocab: &Vocabulary,
    params: &EmbeddingParams,
) -> Result<DenseVectorSet> {
    let shared = train(corpus, vocab, params, ModelKind::Cbow)?;
    let data = shared.word_in.as_ref().unwrap().snapshot("word vectors")?;
    DenseVectorSet::new(vocab.tokens().to_vec(), params.dim, data)
}

/// PV-DM: the document vector joins the averaged context words. Returns
/// (document vectors labeled by title, word vectors labeled by token).
pub fn train_pv_dm(
    corpus: &DocumentCorpus,
    vocab: &Vocabulary,
    params: &EmbeddingParams,
) -> Result<(DenseVectorSet, DenseVectorSet)> {
    let shared = train(corpus, vocab, params, ModelKind::PvDm)?;
    let docs = shared
        .doc_in
        .as_ref()
        .unwrap()
        .snapshot("document vectors")?;
    let words = shared.word_in.as_ref().unwrap().snapshot("word vectors")?;
    let titles = corpus.titles().map(String::from).collect();
    Ok((
        DenseVectorSet::new(titles, params.dim, docs)?,
        DenseVectorSet::new(vocab.tokens().to_vec(), params.dim, words)?,
    ))
}

/// PV-DBOW: the document vector alone predicts each of the document's words.
/// No input word vectors are trained.
pub fn train_pv_dbow(
    corpus: &DocumentCorpus,
    vocab: &Vocabulary,
    params: &EmbeddingParams,
) -> Result<DenseVectorSet> {
    let shared = train(corpus, vocab, params, ModelKind::PvDbow)?;
    let docs = shared
        .doc_in
        .as_ref()
        .unwrap()
        .snapshot("document vectors")?;
    let titles = corpus.titles().map(String::from).collect();
    DenseVectorSet::new(titles, params.dim, docs)
}

fn train<'a>(
    corpus: &'a DocumentCorpus,
    vocab: &'a Vocabulary,
    params: &'a EmbeddingParams,
    model: ModelKind,
) -> Result<Shared<'a>> {
    params.validate(model)?;
    if corpus.is_empty() || corpus.total_tokens() == 0 {
        return Err(Error::Corpus("empty corpus: nothing to train on".into()));
    }
    if params.negatives > 0 && vocab.len() < 2 {
        return Err(Error::Param(
            "negative sampling needs at least two vocabulary words".into(),
        ));
    }

    let mut init_rng = ChaCha8Rng::seed_from_u64(params.seed);
    let word_in = match model {
        ModelKind::Cbow | ModelKind::PvDm => Some(AtomicMatrix::uniform(
            vocab.len(),
            params.dim,
            &mut init_rng,
        )),
        ModelKind::PvDbow => None,
    };
    let doc_in = match model {
        ModelKind::PvDm | ModelKind::PvDbow => Some(AtomicMatrix::uniform(
            corpus.len(),
            params.dim,
            &mut init_rng,
        )),
        ModelKind::Cbow => None,
    };

    let word_freqs: Vec<f64> = vocab.freqs().iter().map(|&f| f as f64).collect();
    let shared = Shared {
        corpus,
        params,
        model,
        word_in,
        doc_in,
        out: AtomicMatrix::zeros(vocab.len(), params.dim),
        sampler: build_negative_table(vocab, params.unigram_power)?,
        initial_lr: params.effective_lr(model),
        total_words: params.epochs as u64 * corpus.total_tokens(),
        processed: AtomicU64::new(0),
        started: Instant::now(),
        word_freqs,
    };

    let workers = params.workers.min(corpus.len().max(1));
    if workers <= 1 {
        shared.worker(0, 0, corpus.len())?;
    } else {
        let n = corpus.len();
        std::thread::scope(|scope| -> Result<()> {
            let mut handles = Vec::new();
            for w in 0..workers {
                let lo = n * w / workers;
                let hi = n * (w + 1) / workers;
                let shared = &shared;
                handles.push(scope.spawn(move || shared.worker(w, lo, hi)));
            }
            for handle in handles {
                handle.join().expect("training worker panicked")?;
            }
            Ok(())
        })?;
    }
    if params.log_progress {
        eprintln!();
    }
    Ok(shared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RawDocument;

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    fn encode(texts: &[(&str, &str)]) -> (DocumentCorpus, Vocabulary) {
        let docs: Vec<RawDocument> = texts
            .iter()
            .map(|(t, x)| RawDocument::new(*t, *x))
            .collect();
        let vocab = Vocabulary::build(&docs, 1).unwrap();
        let corpus = DocumentCorpus::encode(&docs, &vocab).unwrap();
        (corpus, vocab)
    }

    fn small_params(dim: usize, epochs: usize, seed: u64) -> EmbeddingParams {
        EmbeddingParams {
            dim,
            window: 4,
            negatives: 3,
            epochs,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn learning_rate_schedule_endpoints() {
        assert_eq!(learning_rate_at(0, 1000, 0.05), 0.05);
        assert!((learning_rate_at(500, 1000, 0.05) - 0.025).abs() < 1e-15);
        assert!((learning_rate_at(1000, 1000, 0.05) - 5e-6).abs() < 1e-18);
    }

    #[test]
    fn learning_rate_is_non_increasing() {
        let mut prev = f64::INFINITY;
        for wp in (0..=2000).step_by(37) {
            let lr = learning_rate_at(wp, 2000, 0.025);
            assert!(lr <= prev && lr > 0.0);
            prev = lr;
        }
    }

    #[test]
    fn repeated_steps_saturate_sigmoid() {
        // One (h, target) pair, no negatives: sigma(u . h) must approach 1.
        let out = AtomicMatrix::zeros(1, 4);
        let sampler = {
            let vocab =
                Vocabulary::from_entries(vec![("a".into(), 1), ("b".into(), 1)], 1).unwrap();
            build_negative_table(&vocab, 0.75).unwrap()
        };
        let h = [0.5, -0.25, 0.125, 0.75];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut delta = vec![0.0; 4];
        for _ in 0..10_000 {
            ns_step(&out, &h, 0, 0, 0.1, &sampler, &mut rng, &mut delta).unwrap();
        }
        let dot: f64 = (0..4).map(|c| out.get(0, c) * h[c]).sum();
        assert!(sigmoid(dot) > 0.99, "sigma = {}", sigmoid(dot));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = vec![0.3, -0.7, 0.2];
        let samples = vec![
            (1.0, vec![0.1, 0.4, -0.2]),
            (0.0, vec![-0.3, 0.2, 0.5]),
            (0.0, vec![0.6, -0.1, 0.05]),
        ];
        let loss_of = |h: &[f64], samples: &[(f64, Vec<f64>)]| -> f64 {
            samples
                .iter()
                .map(|(label, u)| {
                    let dot: f64 = u.iter().zip(h).map(|(a, b)| a * b).sum();
                    if *label > 0.5 {
                        sigmoid(dot).ln()
                    } else {
                        sigmoid(-dot).ln()
                    }
                })
                .sum()
        };
        let (_, grad_h, grad_us) = negative_sampling_gradients(&h, &samples);
        let step = 1e-5;
        for c in 0..h.len() {
            let mut hp = h.clone();
            let mut hm = h.clone();
            hp[c] += step;
            hm[c] -= step;
            let fd = (loss_of(&hp, &samples) - loss_of(&hm, &samples)) / (2.0 * step);
            assert!((fd - grad_h[c]).abs() / fd.abs().max(1e-6) < 1e-4);
        }
        for (s, grad_u) in grad_us.iter().enumerate() {
            for c in 0..h.len() {
                let mut sp = samples.clone();
                let mut sm = samples.clone();
                sp[s].1[c] += step;
                sm[s].1[c] -= step;
                let fd = (loss_of(&h, &sp) - loss_of(&h, &sm)) / (2.0 * step);
                assert!((fd - grad_u[c]).abs() / fd.abs().max(1e-6) < 1e-4);
            }
        }
    }

    #[test]
    fn cbow_cooccurring_words_align() {
        // One sentence repeats "a b"; filler documents keep the noise
        // distribution from collapsing onto the pair itself. Short smoke
        // training: long runs on this two-token loop eventually separate the
        // pair because parity genuinely predicts the center word.
        let fillers = "c d e f g h ".repeat(25);
        let (corpus, vocab) = encode(&[("d0", &"a b ".repeat(30)), ("d1", &fillers)]);
        let params = small_params(8, 5, 3);
        let vecs = train_cbow(&corpus, &vocab, &params).unwrap();
        let a = vecs.row(vocab.id("a").unwrap() as usize);
        let b = vecs.row(vocab.id("b").unwrap() as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let random: Vec<f64> = (0..8).map(|_| rng.random::<f64>() - 0.5).collect();
            assert!(
                cosine(a, b) > cosine(a, &random),
                "cos(a,b) = {}, cos(a,random) = {}",
                cosine(a, b),
                cosine(a, &random)
            );
        }
        assert!(cosine(a, b) > 0.5, "cos(a,b) = {}", cosine(a, b));
    }

    #[test]
    fn single_worker_runs_are_bit_identical() {
        let (corpus, vocab) = encode(&[
            ("d0", "red green blue red green"),
            ("d1", "blue blue green red"),
        ]);
        let params = small_params(6, 3, 11);
        let a = train_cbow(&corpus, &vocab, &params).unwrap();
        let b = train_cbow(&corpus, &vocab, &params).unwrap();
        assert_eq!(a.data(), b.data());

        let (da, wa) = train_pv_dm(&corpus, &vocab, &params).unwrap();
        let (db, wb) = train_pv_dm(&corpus, &vocab, &params).unwrap();
        assert_eq!(da.data(), db.data());
        assert_eq!(wa.data(), wb.data());
    }

    #[test]
    fn pv_dm_and_pv_dbow_differ() {
        let (corpus, vocab) =
            encode(&[("d0", "one two three four"), ("d1", "three four five six")]);
        let params = small_params(6, 3, 7);
        let (dm_docs, _) = train_pv_dm(&corpus, &vocab, &params).unwrap();
        let dbow_docs = train_pv_dbow(&corpus, &vocab, &params).unwrap();
        assert_ne!(dm_docs.data(), dbow_docs.data());
    }

    #[test]
    fn empty_document_vector_is_never_touched() {
        // Same seed and shape, different text in the other document: the
        // empty document's row must come out identical because training
        // never selects it as an input.
        let (corpus_a, vocab_a) = encode(&[("empty", ""), ("full", "x y x y x")]);
        let (corpus_b, vocab_b) = encode(&[("empty", ""), ("full", "y x y y x")]);
        let params = small_params(5, 4, 13);
        let a = train_pv_dbow(&corpus_a, &vocab_a, &params).unwrap();
        let b = train_pv_dbow(&corpus_b, &vocab_b, &params).unwrap();
        assert_eq!(a.row(0), b.row(0));
        assert_ne!(a.row(1), b.row(1));
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let (corpus, vocab) = encode(&[("d0", "only-oov-here")]);
        // Re-encode against a vocabulary that drops everything.
        let other_docs = vec![RawDocument::new("v", "keep keep")];
        let vocab2 = Vocabulary::build(&other_docs, 1).unwrap();
        let empty =
            DocumentCorpus::encode(&[RawDocument::new("d0", "only-oov-here")], &vocab2).unwrap();
        assert!(train_cbow(&empty, &vocab2, &small_params(4, 1, 1)).is_err());
        // Sanity: the non-empty original trains fine with negatives = 0.
        let mut params = small_params(4, 1, 1);
        params.negatives = 0;
        assert!(train_cbow(&corpus, &vocab, &params).is_ok());
    }
}
