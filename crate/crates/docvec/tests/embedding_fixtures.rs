//! Seeded fixture runs for the paragraph-vector trainers beyond what the
//! acceptance suite pins down.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use docvec::corpus::{DocumentCorpus, RawDocument, Vocabulary};
use docvec::embedding::{train_pv_dbow, train_pv_dm, EmbeddingParams};
use docvec::vectors::DenseVectorSet;

fn two_class_corpus(
    docs_per_class: usize,
    words_per_class: usize,
    doc_len: usize,
    seed: u64,
) -> (DocumentCorpus, Vocabulary, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = Vec::new();
    let mut classes = Vec::new();
    for d in 0..docs_per_class * 2 {
        let class = d % 2;
        classes.push(class);
        let words: Vec<String> = (0..doc_len)
            .map(|_| format!("class{class}word{}", rng.random_range(0..words_per_class)))
            .collect();
        raw.push(RawDocument::new(format!("doc {d:03}"), words.join(" ")));
    }
    let vocab = Vocabulary::build(&raw, 1).unwrap();
    let corpus = DocumentCorpus::encode(&raw, &vocab).unwrap();
    (corpus, vocab, classes)
}

fn one_nn_accuracy(vectors: &DenseVectorSet, classes: &[usize]) -> f64 {
    let n = vectors.rows();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let r = vectors.row(i);
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            r.iter()
                .map(|v| if norm > 0.0 { v / norm } else { 0.0 })
                .collect()
        })
        .collect();
    let mut hits = 0;
    for i in 0..n {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for j in 0..n {
            if i == j {
                continue;
            }
            let sim: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            if sim > best.1 {
                best = (j, sim);
            }
        }
        if classes[best.0] == classes[i] {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

#[test]
fn pv_dm_separates_the_two_class_corpus() {
    let (corpus, vocab, classes) = two_class_corpus(100, 30, 40, 42);
    // The document row is one of ~window averaged inputs, so PV-DM needs
    // more passes than PV-DBOW to move its document vectors.
    let params = EmbeddingParams {
        dim: 50,
        epochs: 20,
        seed: 7,
        ..Default::default()
    };
    let (docs, _words) = train_pv_dm(&corpus, &vocab, &params).unwrap();
    let accuracy = one_nn_accuracy(&docs, &classes);
    assert!(accuracy >= 0.9, "pv-dm 1-NN accuracy {accuracy:.3}");
}

#[test]
fn subsampling_drops_frequent_words_but_stays_deterministic() {
    // One word dominates; aggressive subsampling must change the trajectory.
    let glue = "stopword ".repeat(200);
    let spice = "alpha beta gamma delta epsilon zeta";
    let raw = vec![
        RawDocument::new("d0", format!("{glue} {spice}")),
        RawDocument::new("d1", format!("{spice} {glue}")),
    ];
    let vocab = Vocabulary::build(&raw, 1).unwrap();
    let corpus = DocumentCorpus::encode(&raw, &vocab).unwrap();

    let base = EmbeddingParams {
        dim: 8,
        epochs: 2,
        seed: 3,
        ..Default::default()
    };
    let with_subsample = EmbeddingParams {
        subsample: Some(1e-3),
        ..base.clone()
    };
    let plain = train_pv_dbow(&corpus, &vocab, &base).unwrap();
    let sub_a = train_pv_dbow(&corpus, &vocab, &with_subsample).unwrap();
    let sub_b = train_pv_dbow(&corpus, &vocab, &with_subsample).unwrap();
    assert_eq!(
        sub_a.data(),
        sub_b.data(),
        "subsampled runs must be seeded-deterministic"
    );
    assert_ne!(
        plain.data(),
        sub_a.data(),
        "subsampling must change training"
    );
}
