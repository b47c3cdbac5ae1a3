//! Multi-threaded skip-gram training.
//!
//! Workers share both matrices without locks. Each worker owns a byte range
//! of the corpus file and walks it once per epoch; every update reads a
//! snapshot of the rows it touches and then adds its deltas back, so
//! concurrent writers may lose updates but never corrupt a value.

use std::fs::File;
use std::io::{BufRead, BufReader, Seek, SeekFrom};
use std::path::Path;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::StepScratch;
use super::{EmbeddingModel, NoiseDistribution, TrainingConfig, Vocabulary};
use crate::{Error, Result};

const MIN_LR_FRACTION: f32 = 1e-4;
const PROGRESS_CHUNK: u64 = 10_000;
const MAX_NOISE_REDRAWS: usize = 64;
const WORKER_SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

struct SharedMatrix {
    cells: Vec<AtomicU32>,
    dim: usize,
}

impl SharedMatrix {
    fn new(values: &[f32], dim: usize) -> Self {
        SharedMatrix {
            cells: values.iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
            dim,
        }
    }

    fn read_row(&self, row: usize, out: &mut [f32]) {
        let cells = &self.cells[row * self.dim..(row + 1) * self.dim];
        for (o, c) in out.iter_mut().zip(cells) {
            *o = f32::from_bits(c.load(Ordering::Relaxed));
        }
    }

    /// `row += scale * delta`.
    fn add_row(&self, row: usize, scale: f32, delta: &[f32]) {
        let cells = &self.cells[row * self.dim..(row + 1) * self.dim];
        for (c, &d) in cells.iter().zip(delta) {
            let x = f32::from_bits(c.load(Ordering::Relaxed)) + scale * d;
            c.store(x.to_bits(), Ordering::Relaxed);
        }
    }

    fn into_values(self) -> Vec<f32> {
        self.cells
            .into_iter()
            .map(|c| f32::from_bits(c.into_inner()))
            .collect()
    }
}

struct Shared<'a> {
    vocab: &'a Vocabulary,
    noise: NoiseDistribution,
    config: &'a TrainingConfig,
    input: SharedMatrix,
    output: SharedMatrix,
    processed: AtomicU64,
    scheduled: u64,
}

impl Shared<'_> {
    fn learning_rate(&self) -> f32 {
        let done = self.processed.load(Ordering::Relaxed) as f64 / self.scheduled.max(1) as f64;
        let lr0 = self.config.lr_initial;
        (lr0 * (1.0 - done) as f32).max(lr0 * MIN_LR_FRACTION)
    }

    /// Probability of keeping one occurrence of `index`.
    fn keep_probability(&self, index: usize) -> f64 {
        let t = self.config.subsample_t;
        if t == 0.0 {
            return 1.0;
        }
        let threshold = t * self.vocab.total_tokens() as f64;
        let f = self.vocab.count(index) as f64;
        ((f / threshold).sqrt() + 1.0) * threshold / f
    }
}

/// Trains `model` on the corpus file for `config.epochs` passes.
///
/// The learning rate decays linearly from `lr_initial` to
/// `lr_initial * 1e-4` over `epochs * total_tokens` processed tokens.
/// Tokens absent from the model vocabulary are skipped. With a single
/// worker the result depends only on the inputs and `config.seed`.
pub fn train(
    corpus: &Path,
    model: EmbeddingModel,
    config: &TrainingConfig,
) -> Result<EmbeddingModel> {
    config.validate()?;
    if config.dim != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: config.dim,
        });
    }
    if config.epochs == 0 {
        return Ok(model);
    }
    let len = std::fs::metadata(corpus)
        .map_err(|e| Error::file(corpus, e))?
        .len();

    let EmbeddingModel {
        vocab,
        dim,
        input,
        output,
    } = model;
    let shared = Shared {
        noise: NoiseDistribution::new(&vocab)?,
        vocab: &vocab,
        config,
        input: SharedMatrix::new(&input, dim),
        output: SharedMatrix::new(&output, dim),
        processed: AtomicU64::new(0),
        scheduled: config.epochs as u64 * vocab.total_tokens(),
    };
    drop((input, output));

    let workers = config.workers as u64;
    let results: Vec<Result<()>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (len * w / workers, len * (w + 1) / workers);
                let shared = &shared;
                scope.spawn(move || run_worker(shared, corpus, range, w))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|panic| {
                    let message = panic
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| panic.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "worker panicked".to_string());
                    Err(Error::TrainingAborted(message))
                })
            })
            .collect()
    });
    results.into_iter().collect::<Result<()>>()?;

    let Shared { input, output, .. } = shared;
    let model = EmbeddingModel {
        vocab,
        dim,
        input: input.into_values(),
        output: output.into_values(),
    };
    model.check_finite()?;
    Ok(model)
}

/// Positions `reader` at the first line starting in `start..`.
fn seek_to_line(reader: &mut BufReader<File>, start: u64, buf: &mut Vec<u8>) -> Result<u64> {
    if start == 0 {
        reader.seek(SeekFrom::Start(0))?;
        return Ok(0);
    }
    reader.seek(SeekFrom::Start(start - 1))?;
    buf.clear();
    let skipped = reader.read_until(b'\n', buf)?;
    Ok(start - 1 + skipped as u64)
}

fn run_worker(
    shared: &Shared<'_>,
    corpus: &Path,
    (start, end): (u64, u64),
    worker: u64,
) -> Result<()> {
    let config = shared.config;
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(
        config
            .seed
            .wrapping_add(worker.wrapping_mul(WORKER_SEED_STRIDE)),
    );
    let file = File::open(corpus).map_err(|e| Error::file(corpus, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let mut buf = Vec::new();
    let mut sentence: Vec<usize> = Vec::new();
    let mut negatives: Vec<usize> = Vec::with_capacity(config.negatives);
    let mut scratch = StepScratch::new(dim, config.negatives + 1);
    let mut pending = 0u64;
    let mut lr = shared.learning_rate();

    for _ in 0..config.epochs {
        let mut pos = seek_to_line(&mut reader, start, &mut buf)?;
        while pos < end {
            buf.clear();
            let n = reader.read_until(b'\n', &mut buf)?;
            if n == 0 {
                break;
            }
            pos += n as u64;
            let line = std::str::from_utf8(&buf).map_err(|_| {
                Error::InvalidConfig(format!("corpus is not UTF-8 near byte {pos}"))
            })?;

            sentence.clear();
            for token in line.split_ascii_whitespace() {
                let Some(index) = shared.vocab.index(token) else {
                    continue;
                };
                let index = index as usize;
                pending += 1;
                let keep = shared.keep_probability(index);
                if keep >= 1.0 || rng.random::<f64>() < keep {
                    sentence.push(index);
                }
            }
            if pending >= PROGRESS_CHUNK {
                shared.processed.fetch_add(pending, Ordering::Relaxed);
                pending = 0;
                lr = shared.learning_rate();
            }

            for (i, &center) in sentence.iter().enumerate() {
                let radius = rng.random_range(1..=config.window);
                let lo = i.saturating_sub(radius);
                let hi = (i + radius).min(sentence.len() - 1);
                for (j, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i || context == center {
                        continue;
                    }
                    negatives.clear();
                    for _ in 0..config.negatives {
                        let draw = (0..MAX_NOISE_REDRAWS)
                            .map(|_| shared.noise.sample(&mut rng))
                            .find(|&n| n != context);
                        if let Some(n) = draw {
                            negatives.push(n);
                        }
                    }
                    update(shared, &mut scratch, center, context, &negatives, lr);
                }
            }
        }
    }
    shared.processed.fetch_add(pending, Ordering::Relaxed);
    Ok(())
}

fn update(
    shared: &Shared<'_>,
    scratch: &mut StepScratch,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f32,
) {
    let dim = shared.config.dim;
    let rows = negatives.len() + 1;
    shared.input.read_row(center, &mut scratch.center);
    for (t, &row) in std::iter::once(&context).chain(negatives).enumerate() {
        shared
            .output
            .read_row(row, &mut scratch.targets[t * dim..(t + 1) * dim]);
    }
    let full = scratch.coeffs.len();
    if rows < full {
        // Fewer noise rows than configured; compute over the used prefix.
        let mut partial = StepScratch::new(dim, rows);
        partial.center.copy_from_slice(&scratch.center);
        partial
            .targets
            .copy_from_slice(&scratch.targets[..rows * dim]);
        partial.compute();
        apply(shared, &partial, center, context, negatives, lr);
    } else {
        scratch.compute();
        apply(shared, scratch, center, context, negatives, lr);
    }
}

fn apply(
    shared: &Shared<'_>,
    scratch: &StepScratch,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f32,
) {
    for (t, &row) in std::iter::once(&context).chain(negatives).enumerate() {
        shared
            .output
            .add_row(row, -lr * scratch.coeffs[t], &scratch.center);
    }
    shared.input.add_row(center, -lr, &scratch.grad);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_vocab, init_model};
    use crate::vectors::cosine;
    use std::io::Write;

    fn corpus_file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn two_cluster_corpus() -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut out = String::new();
        for _ in 0..2000 {
            let cluster = if rng.random::<bool>() {
                ["a1", "a2", "a3"]
            } else {
                ["b1", "b2", "b3"]
            };
            let words: Vec<&str> = (0..8).map(|_| cluster[rng.random_range(0..3)]).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    fn small_config() -> TrainingConfig {
        TrainingConfig {
            dim: 20,
            window: 3,
            negatives: 3,
            epochs: 3,
            subsample_t: 0.0,
            min_count: 1,
            seed: 11,
            ..TrainingConfig::default()
        }
    }

    fn run(text: &str, config: &TrainingConfig) -> EmbeddingModel {
        let file = corpus_file(text);
        let vocab = build_vocab(text.as_bytes(), config.min_count).unwrap();
        let model = init_model(&vocab, config, None).unwrap();
        train(file.path(), model, config).unwrap()
    }

    #[test]
    fn clusters_separate() {
        let config = small_config();
        let model = run(&two_cluster_corpus(), &config);
        let set = model.to_vector_set();
        let cos = |x: &str, y: &str| cosine(set.get(x).unwrap(), set.get(y).unwrap()).unwrap();
        assert!(cos("a1", "a2") > cos("a1", "b1"));
        assert!(cos("b2", "b3") > cos("b2", "a3"));
    }

    #[test]
    fn zero_epochs_is_identity() {
        let text = two_cluster_corpus();
        let config = TrainingConfig {
            epochs: 0,
            ..small_config()
        };
        let file = corpus_file(&text);
        let vocab = build_vocab(text.as_bytes(), 1).unwrap();
        let model = init_model(&vocab, &config, None).unwrap();
        let trained = train(file.path(), model.clone(), &config).unwrap();
        assert_eq!(trained, model);
    }

    #[test]
    fn single_worker_is_reproducible() {
        let text = two_cluster_corpus();
        let a = run(&text, &small_config());
        let b = run(&text, &small_config());
        let bits = |m: &EmbeddingModel| {
            m.input_vectors()
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        let c = run(
            &text,
            &TrainingConfig {
                seed: 12,
                ..small_config()
            },
        );
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn parallel_training_stays_finite_and_learns() {
        let config = TrainingConfig {
            workers: 4,
            ..small_config()
        };
        let model = run(&two_cluster_corpus(), &config);
        model.check_finite().unwrap();
        let set = model.to_vector_set();
        let cos = |x: &str, y: &str| cosine(set.get(x).unwrap(), set.get(y).unwrap()).unwrap();
        assert!(cos("a1", "a2") > cos("a1", "b1"));
    }

    #[test]
    fn worker_ranges_cover_every_line_once() {
        // A line can only be trained on by the worker whose range holds its
        // first byte; check the boundary logic directly.
        let text = "aa bb\ncc\n\ndd ee ff\ng\n";
        let file = corpus_file(text);
        let len = text.len() as u64;
        for workers in 1..=6u64 {
            let mut seen = Vec::new();
            for w in 0..workers {
                let (start, end) = (len * w / workers, len * (w + 1) / workers);
                let mut reader = BufReader::new(File::open(file.path()).unwrap());
                let mut buf = Vec::new();
                let mut pos = seek_to_line(&mut reader, start, &mut buf).unwrap();
                while pos < end {
                    buf.clear();
                    let n = reader.read_until(b'\n', &mut buf).unwrap();
                    if n == 0 {
                        break;
                    }
                    pos += n as u64;
                    seen.push(String::from_utf8(buf.clone()).unwrap());
                }
            }
            assert_eq!(seen.concat(), text, "workers = {workers}");
        }
    }

    #[test]
    fn unknown_tokens_are_skipped() {
        let text = "x y x y x y\nrare\n";
        let config = TrainingConfig {
            min_count: 2,
            epochs: 1,
            ..small_config()
        };
        let model = run(text, &config);
        assert_eq!(model.vocab().len(), 2);
        model.check_finite().unwrap();
    }

    #[test]
    fn dimension_must_match() {
        let text = "x y x y";
        let file = corpus_file(text);
        let vocab = build_vocab(text.as_bytes(), 1).unwrap();
        let model = init_model(&vocab, &small_config(), None).unwrap();
        let config = TrainingConfig {
            dim: 7,
            ..small_config()
        };
        assert!(matches!(
            train(file.path(), model, &config),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
