//! Executable achievability for the destination-key feedback scheme.
//!
//! The destination feeds back random symbols that the channel itself mixes
//! into the wiretapper's observation; the destination cancels its own key
//! before decoding. This module runs that scheme end to end over seeded
//! trials, computes the wiretapper's information exactly by enumeration at
//! small block lengths, and estimates equivocation from transcripts.
//!
//! Randomness is split into three named ChaCha streams (codebook, noise,
//! key); each trial derives its own substream, so results are independent
//! of how trials are scheduled across workers.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::channels::{ChannelError, WiretapChannel};
use crate::infotheory::{cyclic_convolve, entropy_of, InfoError, Pmf};

/// Enumeration budget for [`exact_wiretap_mi`]: `M * |Z|^n` must not exceed
/// this.
pub const ENUMERATION_BUDGET: u128 = 1 << 22;

/// Block-length cap for exact-enumeration paths.
pub const MAX_EXACT_BLOCK: usize = 20;

const CODEBOOK_TAG: u64 = 0x636f_6465_626f_6f6b; // "codebook"
const NOISE_TAG: u64 = 0x0000_0000_6e6f_6973; // "nois"
const KEY_TAG: u64 = 0x0000_0000_006b_6579; // "key"

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{m} messages exceed |X|^n = {cap}")]
    TooManyMessages { m: usize, cap: u128 },
    #[error("message count must be at least 1")]
    NoMessages,
    #[error("block length must be at least 1")]
    EmptyBlock,
    #[error("block length {n} exceeds exact-enumeration cap {max}")]
    BlockTooLong { n: usize, max: usize },
    #[error("enumeration cost M * |Z|^n = {cost} exceeds budget {budget}")]
    EnumerationBudget { cost: u128, budget: u128 },
    #[error("key law over {got} symbols, feedback alphabet has {want}")]
    KeyLawSizeMismatch { got: usize, want: usize },
    #[error("feedback probability {t} outside [0, 1]")]
    FeedbackProbabilityOutOfRange { t: f64 },
    #[error("no transcripts to estimate from")]
    EmptyTranscripts,
    #[error("alphabet size {size} too wide for hex-packed dumps (max 16)")]
    AlphabetTooWideForHex { size: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Whether the destination can listen while feeding back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuplexMode {
    FullDuplex,
    HalfDuplex,
}

/// Configuration of one `(M, n)` scheme instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Block length.
    pub n: usize,
    /// Number of messages `M`; the code rate is `log2(M) / n`.
    pub num_messages: usize,
    pub mode: DuplexMode,
    /// Half-duplex feedback probability (ignored in full duplex).
    pub t: f64,
    /// Override for the feedback-symbol law. `None` uses the scheme default:
    /// uniform over the wiretapper alphabet in full duplex; in half duplex,
    /// `1 - t` on the listen symbol 0 and `t` spread evenly over the rest.
    /// Diagnostics can force e.g. an all-zero key here.
    pub key_law: Option<Pmf>,
    pub codebook_seed: u64,
    pub noise_seed: u64,
    pub key_seed: u64,
    /// When set, each trial re-encodes with a zeroed feedback history and
    /// checks the codeword is unchanged (the encoder ignores feedback).
    pub probe_feedback_independence: bool,
}

impl SchemeConfig {
    pub fn full_duplex(n: usize, num_messages: usize) -> Self {
        Self {
            n,
            num_messages,
            mode: DuplexMode::FullDuplex,
            t: 0.0,
            key_law: None,
            codebook_seed: 0,
            noise_seed: 1,
            key_seed: 2,
            probe_feedback_independence: false,
        }
    }

    pub fn half_duplex(n: usize, num_messages: usize, t: f64) -> Self {
        Self {
            t,
            mode: DuplexMode::HalfDuplex,
            ..Self::full_duplex(n, num_messages)
        }
    }

    /// Code rate `log2(M) / n` in bits per use.
    pub fn rate(&self) -> f64 {
        (self.num_messages as f64).log2() / self.n as f64
    }

    fn validate(&self, ch: &WiretapChannel) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::EmptyBlock);
        }
        if self.num_messages == 0 {
            return Err(SimError::NoMessages);
        }
        let cap = (ch.x_size() as u128).checked_pow(self.n as u32);
        match cap {
            Some(cap) if (self.num_messages as u128) <= cap => {}
            Some(cap) => {
                return Err(SimError::TooManyMessages {
                    m: self.num_messages,
                    cap,
                })
            }
            // |X|^n overflowed u128; any practical M fits.
            None => {}
        }
        if let Some(law) = &self.key_law {
            if law.alphabet_size() != ch.x1_size() {
                return Err(SimError::KeyLawSizeMismatch {
                    got: law.alphabet_size(),
                    want: ch.x1_size(),
                });
            }
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(SimError::FeedbackProbabilityOutOfRange { t: self.t });
        }
        Ok(())
    }
}

/// Per-trial record of everything each party saw.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub w: usize,
    pub x_seq: Vec<usize>,
    pub x1_seq: Vec<usize>,
    pub y_seq: Vec<usize>,
    pub z_seq: Vec<usize>,
    pub decoded_w: usize,
    /// `true` where the destination transmitted (half duplex only).
    pub erasure_mask: Vec<bool>,
}

/// Aggregate of a batch of trials.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub error_rate: f64,
    pub erasure_fraction: f64,
    pub transcripts: Vec<Transcript>,
}

/// The i.i.d.-uniform random codebook shared by all trials of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    words: Vec<Vec<usize>>,
}

impl Codebook {
    /// Draws `M` codewords of length `n`, i.i.d. uniform over the input
    /// alphabet, from the codebook stream.
    pub fn generate(ch: &WiretapChannel, cfg: &SchemeConfig) -> Result<Self, SimError> {
        cfg.validate(ch)?;
        let mut rng = stream_rng(cfg.codebook_seed ^ CODEBOOK_TAG, 0);
        let words = (0..cfg.num_messages)
            .map(|_| {
                (0..cfg.n)
                    .map(|_| rng.random_range(0..ch.x_size()))
                    .collect()
            })
            .collect();
        Ok(Self { words })
    }

    pub fn word(&self, w: usize) -> &[usize] {
        &self.words[w]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// The feedback-symbol law actually used by a configuration.
pub fn effective_key_law(ch: &WiretapChannel, cfg: &SchemeConfig) -> Result<Pmf, SimError> {
    if let Some(law) = &cfg.key_law {
        if law.alphabet_size() != ch.x1_size() {
            return Err(SimError::KeyLawSizeMismatch {
                got: law.alphabet_size(),
                want: ch.x1_size(),
            });
        }
        return Ok(law.clone());
    }
    let m = ch.x1_size();
    match cfg.mode {
        DuplexMode::FullDuplex => Ok(Pmf::uniform(m)),
        DuplexMode::HalfDuplex => {
            if !(0.0..=1.0).contains(&cfg.t) {
                return Err(SimError::FeedbackProbabilityOutOfRange { t: cfg.t });
            }
            let mut probs = vec![cfg.t / (m - 1) as f64; m];
            probs[0] = 1.0 - cfg.t;
            Ok(Pmf::new(probs)?)
        }
    }
}

fn sample_from(law: &Pmf, rng: &mut ChaCha12Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (symbol, &p) in law.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return symbol;
        }
    }
    law.alphabet_size() - 1
}

/// Source encoder: slot `i` of the codeword for message `w`. The feedback
/// history is part of the interface but never consulted.
fn encode(codebook: &Codebook, w: usize, i: usize, _y0_history: &[usize]) -> usize {
    codebook.word(w)[i]
}

/// Runs one seeded trial. Trial indices address disjoint RNG substreams, so
/// any scheduling of trials over workers reproduces the same transcripts.
fn run_trial(
    ch: &WiretapChannel,
    cfg: &SchemeConfig,
    codebook: &Codebook,
    log_main_noise: &[f64],
    trial: u64,
) -> Transcript {
    let mut noise_rng = stream_rng(cfg.noise_seed ^ NOISE_TAG, trial);
    let mut key_rng = stream_rng(cfg.key_seed ^ KEY_TAG, trial);
    let key_law = effective_key_law(ch, cfg).expect("validated config");

    let w = noise_rng.random_range(0..cfg.num_messages);
    let n = cfg.n;
    let mut x_seq = Vec::with_capacity(n);
    let mut x1_seq = Vec::with_capacity(n);
    let mut y_seq = Vec::with_capacity(n);
    let mut z_seq = Vec::with_capacity(n);
    let mut erasure_mask = Vec::with_capacity(n);
    let mut y0_history = Vec::with_capacity(n);

    for i in 0..n {
        let x = encode(codebook, w, i, &y0_history);
        if cfg.probe_feedback_independence {
            let zeroed = vec![0; y0_history.len()];
            assert_eq!(
                x,
                encode(codebook, w, i, &zeroed),
                "encoder output must not depend on feedback"
            );
        }
        let x1 = sample_from(&key_law, &mut key_rng);
        let noise = ch.sample_noise(&mut noise_rng);
        let (y0, y, z) = ch.transmit(x, x1, noise).expect("symbols in alphabet");
        erasure_mask.push(cfg.mode == DuplexMode::HalfDuplex && x1 != 0);
        y0_history.push(y0);
        x_seq.push(x);
        x1_seq.push(x1);
        y_seq.push(y);
        z_seq.push(z);
    }

    let decoded_w = match cfg.mode {
        DuplexMode::FullDuplex => {
            // Key cancellation: y - x1 mod |Y| restores x + n1.
            let y_size = ch.y_size();
            let cancelled: Vec<usize> = y_seq
                .iter()
                .zip(&x1_seq)
                .map(|(&y, &x1)| (y + y_size - x1 % y_size) % y_size)
                .collect();
            ml_decode(codebook, log_main_noise, y_size, &cancelled, |_| true)
        }
        DuplexMode::HalfDuplex => ml_decode(codebook, log_main_noise, ch.y_size(), &y_seq, |i| {
            !erasure_mask[i]
        }),
    };

    Transcript {
        w,
        x_seq,
        x1_seq,
        y_seq,
        z_seq,
        decoded_w,
        erasure_mask,
    }
}

/// Maximum-likelihood decoding over the codebook, restricted to the slots
/// selected by `keep`. Ties resolve to the lowest message index.
fn ml_decode(
    codebook: &Codebook,
    log_noise: &[f64],
    y_size: usize,
    observed: &[usize],
    keep: impl Fn(usize) -> bool,
) -> usize {
    let mut best_w = 0;
    let mut best_score = f64::NEG_INFINITY;
    for w in 0..codebook.len() {
        let word = codebook.word(w);
        let mut score = 0.0;
        for (i, (&y, &c)) in observed.iter().zip(word).enumerate() {
            if keep(i) {
                score += log_noise[(y + y_size - c % y_size) % y_size];
            }
        }
        if score > best_score {
            best_score = score;
            best_w = w;
        }
    }
    best_w
}

fn log_probs(law: &Pmf) -> Vec<f64> {
    law.probs()
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect()
}

/// Prepared state for running trials: the seeded codebook plus cached
/// decoder tables. Immutable, so trials can be dispatched from any number
/// of workers; trial `k` yields the same transcript regardless of
/// scheduling.
#[derive(Debug, Clone)]
pub struct TrialRunner<'a> {
    ch: &'a WiretapChannel,
    cfg: SchemeConfig,
    codebook: Codebook,
    log_main_noise: Vec<f64>,
}

impl<'a> TrialRunner<'a> {
    pub fn new(ch: &'a WiretapChannel, cfg: &SchemeConfig) -> Result<Self, SimError> {
        let codebook = Codebook::generate(ch, cfg)?;
        effective_key_law(ch, cfg)?;
        Ok(Self {
            ch,
            cfg: cfg.clone(),
            codebook,
            log_main_noise: log_probs(&ch.main_noise()),
        })
    }

    pub fn run(&self, trial: u64) -> Transcript {
        run_trial(
            self.ch,
            &self.cfg,
            &self.codebook,
            &self.log_main_noise,
            trial,
        )
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// Folds transcripts into the aggregate counts; pure tallying, so the
    /// result does not depend on how the transcripts were produced.
    pub fn aggregate(&self, transcripts: Vec<Transcript>) -> SimOutcome {
        let trials = transcripts.len();
        let errors = transcripts.iter().filter(|t| t.decoded_w != t.w).count();
        let erased: usize = transcripts
            .iter()
            .map(|t| t.erasure_mask.iter().filter(|&&e| e).count())
            .sum();
        SimOutcome {
            error_rate: errors as f64 / trials.max(1) as f64,
            erasure_fraction: erased as f64 / (trials.max(1) * self.cfg.n) as f64,
            transcripts,
        }
    }
}

fn run_scheme(
    ch: &WiretapChannel,
    cfg: &SchemeConfig,
    trials: usize,
) -> Result<SimOutcome, SimError> {
    let runner = TrialRunner::new(ch, cfg)?;
    let transcripts: Vec<Transcript> = (0..trials).map(|trial| runner.run(trial as u64)).collect();
    Ok(runner.aggregate(transcripts))
}

/// Full-duplex scheme: random key every slot, key cancellation, then ML
/// decoding over the whole block.
pub fn run_full_duplex(
    ch: &WiretapChannel,
    cfg: &SchemeConfig,
    trials: usize,
) -> Result<SimOutcome, SimError> {
    let cfg = SchemeConfig {
        mode: DuplexMode::FullDuplex,
        ..cfg.clone()
    };
    run_scheme(ch, &cfg, trials)
}

/// Half-duplex scheme: feedback slots erase the destination's own
/// observation; ML decoding uses the surviving slots only.
pub fn run_half_duplex(
    ch: &WiretapChannel,
    cfg: &SchemeConfig,
    trials: usize,
) -> Result<SimOutcome, SimError> {
    let cfg = SchemeConfig {
        mode: DuplexMode::HalfDuplex,
        ..cfg.clone()
    };
    run_scheme(ch, &cfg, trials)
}

/// Exact `I(W; Z^n)` in bits for the configured scheme, conditioned on the
/// seeded codebook: sums over messages and wiretap sequences with exact
/// probabilities (the key and noise laws enter through the exact per-slot
/// law `key conv N2`, shifted by the codeword symbol). No sampling.
pub fn exact_wiretap_mi(ch: &WiretapChannel, cfg: &SchemeConfig) -> Result<f64, SimError> {
    if cfg.n > MAX_EXACT_BLOCK {
        return Err(SimError::BlockTooLong {
            n: cfg.n,
            max: MAX_EXACT_BLOCK,
        });
    }
    let z_size = ch.z_size() as u128;
    let cost = (cfg.num_messages as u128).saturating_mul(z_size.saturating_pow(cfg.n as u32));
    if cost > ENUMERATION_BUDGET {
        return Err(SimError::EnumerationBudget {
            cost,
            budget: ENUMERATION_BUDGET,
        });
    }

    let codebook = Codebook::generate(ch, cfg)?;
    let key_law = effective_key_law(ch, cfg)?;
    let slot_law = cyclic_convolve(&key_law, &ch.wiretap_noise())?;
    let m = cfg.num_messages;
    let z = ch.z_size();
    let n = cfg.n;

    // Per-message per-slot law of Z(i): slot_law shifted by the codeword
    // symbol.
    let q = |w: usize, i: usize, zi: usize| -> f64 {
        let c = codebook.word(w)[i] % z;
        slot_law.get((zi + z - c) % z)
    };

    // H(Z^n | W): each message gives a product law, so entropies add.
    let mut h_z_given_w = 0.0;
    for w in 0..m {
        for i in 0..n {
            let probs: Vec<f64> = (0..z).map(|zi| q(w, i, zi)).collect();
            h_z_given_w += entropy_of(&probs);
        }
    }
    h_z_given_w /= m as f64;

    // H(Z^n): full enumeration of wiretap sequences. Compensated summation
    // keeps the rounding error flat in the number of terms (up to 2^22 of
    // them), well inside the 1e-12 secrecy tolerance.
    let total = (z as u128).pow(n as u32) as usize;
    let mut h_z = NeumaierSum::default();
    let mut digits = vec![0usize; n];
    for flat in 0..total {
        let mut rest = flat;
        for i in (0..n).rev() {
            digits[i] = rest % z;
            rest /= z;
        }
        let mut p = 0.0;
        for w in 0..m {
            let mut pw = 1.0 / m as f64;
            for (i, &zi) in digits.iter().enumerate() {
                pw *= q(w, i, zi);
                if pw == 0.0 {
                    break;
                }
            }
            p += pw;
        }
        if p > 0.0 {
            h_z.add(-p * p.log2());
        }
    }

    Ok((h_z.total() - h_z_given_w).max(0.0))
}

/// Plug-in estimate of the equivocation rate `H(W | Z^n) / n` in bits per
/// use, from empirical transcript frequencies. This is an estimate; when the
/// enumeration budget allows, cross-check against [`exact_wiretap_mi`].
/// A stable estimate wants roughly `trials >= 50 * M * |Z|^n`.
pub fn plug_in_equivocation(
    transcripts: &[Transcript],
    cfg: &SchemeConfig,
) -> Result<f64, SimError> {
    if transcripts.is_empty() {
        return Err(SimError::EmptyTranscripts);
    }
    let total = transcripts.len() as f64;
    let mut joint: HashMap<(usize, &[usize]), f64> = HashMap::new();
    let mut z_only: HashMap<&[usize], f64> = HashMap::new();
    for t in transcripts {
        *joint.entry((t.w, t.z_seq.as_slice())).or_insert(0.0) += 1.0;
        *z_only.entry(t.z_seq.as_slice()).or_insert(0.0) += 1.0;
    }
    let h = |counts: &[f64]| -> f64 {
        counts
            .iter()
            .map(|&c| {
                let p = c / total;
                -p * p.log2()
            })
            .sum::<f64>()
    };
    let h_wz = h(&joint.values().copied().collect::<Vec<_>>());
    let h_z = h(&z_only.values().copied().collect::<Vec<_>>());
    Ok(((h_wz - h_z) / cfg.n as f64).max(0.0))
}

/// Writes transcripts in the stable dump format, one record per line:
///
/// ```text
/// trial w x x1 y z decoded_w mask
/// ```
///
/// Symbol sequences are hex-packed (one digit per slot, alphabets up to 16);
/// the erasure mask is a 0/1 string. Identical seeds produce byte-identical
/// dumps.
pub fn write_transcripts<W: Write>(out: &mut W, transcripts: &[Transcript]) -> io::Result<()> {
    for (trial, t) in transcripts.iter().enumerate() {
        let pack = |seq: &[usize]| -> String {
            seq.iter()
                .map(|&s| char::from_digit(s as u32, 16).expect("alphabet checked <= 16"))
                .collect()
        };
        let mask: String = t
            .erasure_mask
            .iter()
            .map(|&e| if e { '1' } else { '0' })
            .collect();
        writeln!(
            out,
            "{} {} {} {} {} {} {} {}",
            trial,
            t.w,
            pack(&t.x_seq),
            pack(&t.x1_seq),
            pack(&t.y_seq),
            pack(&t.z_seq),
            t.decoded_w,
            mask
        )?;
    }
    Ok(())
}

/// Checks all alphabets fit the hex-packed dump format.
pub fn check_dumpable(ch: &WiretapChannel) -> Result<(), SimError> {
    for size in [ch.x_size(), ch.x1_size(), ch.y_size(), ch.z_size()] {
        if size > 16 {
            return Err(SimError::AlphabetTooWideForHex { size });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{build_bsc_case, BscCase};
    use crate::infotheory::JointPmf;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} (tol {tol})"
        );
    }

    fn bsc(eps: f64, delta: f64) -> WiretapChannel {
        build_bsc_case(&BscCase::Independent {
            epsilon: eps,
            delta,
        })
        .unwrap()
    }

    fn ternary() -> WiretapChannel {
        let pair = JointPmf::product(&[
            &Pmf::new(vec![0.8, 0.1, 0.1]).unwrap(),
            &Pmf::new(vec![0.7, 0.2, 0.1]).unwrap(),
        ]);
        WiretapChannel::from_wiretap_pair(3, 3, 3, pair).unwrap()
    }

    #[test]
    fn uniformity_lemma_bijection() {
        for m in 2..=5 {
            for x in 0..m {
                for n2 in 0..m {
                    let mut seen = vec![false; m];
                    for x1 in 0..m {
                        let z = (x + x1 + n2) % m;
                        assert!(!seen[z], "collision for m={m} x={x} n2={n2}");
                        seen[z] = true;
                    }
                }
            }
        }
    }

    #[test]
    fn key_cancellation_is_exact() {
        let ch = bsc(0.3, 0.1);
        for x in 0..2 {
            for x1 in 0..2 {
                for n1 in 0..2 {
                    let (_, y, _) = ch.transmit(x, x1, (0, n1, 0)).unwrap();
                    let cancelled = (y + 2 - x1) % 2;
                    assert_eq!(cancelled, (x + n1) % 2);
                }
            }
        }
    }

    #[test]
    fn noiseless_full_duplex_never_errs() {
        let ch = build_bsc_case(&BscCase::Noiseless).unwrap();
        let cfg = SchemeConfig::full_duplex(8, 4);
        let out = run_full_duplex(&ch, &cfg, 200).unwrap();
        assert_close(out.error_rate, 0.0, 0.0);
        assert_close(out.erasure_fraction, 0.0, 0.0);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let ch = bsc(0.1, 0.3);
        let cfg = SchemeConfig::full_duplex(6, 4);
        let a = run_full_duplex(&ch, &cfg, 50).unwrap();
        let b = run_full_duplex(&ch, &cfg, 50).unwrap();
        assert_eq!(a.transcripts, b.transcripts);

        let mut other = cfg.clone();
        other.key_seed += 1;
        let c = run_full_duplex(&ch, &other, 50).unwrap();
        assert_ne!(a.transcripts, c.transcripts);
        // Same noise stream: messages and noise agree, only the key moved.
        for (ta, tc) in a.transcripts.iter().zip(&c.transcripts) {
            assert_eq!(ta.w, tc.w);
            assert_eq!(ta.x_seq, tc.x_seq);
        }
    }

    #[test]
    fn two_codeword_error_rate_matches_pairwise_oracle() {
        let eps = 0.1;
        let ch = bsc(eps, 0.3);
        let cfg = SchemeConfig::full_duplex(16, 2);
        let codebook = Codebook::generate(&ch, &cfg).unwrap();
        let d = codebook
            .word(0)
            .iter()
            .zip(codebook.word(1))
            .filter(|(a, b)| a != b)
            .count();
        assert!(d > 0, "seeded codewords must differ");

        // Exact ML pairwise error: flips within the d differing slots decide.
        // Sent w: error when the other word is strictly closer, plus ties,
        // which resolve to index 0 (error only for w = 1).
        let binom = |k: usize| -> f64 {
            let mut log_c = 0.0;
            for j in 0..k {
                log_c += ((d - j) as f64).ln() - ((j + 1) as f64).ln();
            }
            (log_c + (k as f64) * eps.ln() + ((d - k) as f64) * (1.0 - eps).ln()).exp()
        };
        let mut p_err = 0.0;
        for k in 0..=d {
            let p = binom(k);
            if 2 * k > d {
                p_err += p; // strictly closer to the wrong word: both senders err
            } else if 2 * k == d {
                p_err += 0.5 * p; // tie: only the sender of word 1 errs
            }
        }

        let trials = 10_000;
        let out = run_full_duplex(&ch, &cfg, trials).unwrap();
        let sigma = (p_err * (1.0 - p_err) / trials as f64).sqrt();
        assert!(
            (out.error_rate - p_err).abs() <= 4.0 * sigma.max(1e-4),
            "empirical {} vs exact {p_err}",
            out.error_rate
        );
        assert!(out.error_rate <= 0.01);
    }

    #[test]
    fn exact_mi_is_zero_for_the_scheme() {
        let channels: Vec<WiretapChannel> = vec![
            build_bsc_case(&BscCase::Noiseless).unwrap(),
            bsc(0.3, 0.1),
            build_bsc_case(&BscCase::MainDegraded {
                epsilon: 0.2,
                delta: 0.1,
            })
            .unwrap(),
            ternary(),
        ];
        for ch in &channels {
            for n in 1..=6 {
                for m in 1..=4usize.min(ch.x_size().pow(n as u32)) {
                    let cfg = SchemeConfig::full_duplex(n, m);
                    let mi = exact_wiretap_mi(ch, &cfg).unwrap();
                    assert!(
                        mi <= 1e-12,
                        "leak {mi} for n={n} m={m} on |Z|={}",
                        ch.z_size()
                    );
                }
            }
        }
    }

    #[test]
    fn exact_mi_detects_a_disabled_key() {
        // Key forced to zero on the noiseless channel: the wiretapper reads
        // the codeword directly, so with two distinct codewords of length 1
        // the leak is the full bit.
        let ch = build_bsc_case(&BscCase::Noiseless).unwrap();
        let mut cfg = SchemeConfig::full_duplex(1, 2);
        cfg.key_law = Some(Pmf::point_mass(2, 0));
        // Find a codebook seed with distinct length-1 words.
        for seed in 0..64 {
            cfg.codebook_seed = seed;
            let cb = Codebook::generate(&ch, &cfg).unwrap();
            if cb.word(0) != cb.word(1) {
                let mi = exact_wiretap_mi(&ch, &cfg).unwrap();
                assert_close(mi, 1.0, 1e-12);
                return;
            }
        }
        panic!("no seed below 64 produced distinct codewords");
    }

    #[test]
    fn exact_mi_matches_hand_enumeration_for_biased_key() {
        // Biased binary key (0.9, 0.1) on the noiseless channel, n=1, M=2,
        // distinct codewords: Z = C_w xor K, so
        //   H(Z) = 1 (the mixture is uniform), H(Z|W) = H(0.1),
        //   I(W;Z) = 1 - H(0.1).
        let ch = build_bsc_case(&BscCase::Noiseless).unwrap();
        let mut cfg = SchemeConfig::full_duplex(1, 2);
        cfg.key_law = Some(Pmf::new(vec![0.9, 0.1]).unwrap());
        for seed in 0..64 {
            cfg.codebook_seed = seed;
            let cb = Codebook::generate(&ch, &cfg).unwrap();
            if cb.word(0) != cb.word(1) {
                let mi = exact_wiretap_mi(&ch, &cfg).unwrap();
                let hand = {
                    // Four-term direct sum over (w, z).
                    let pz = |z: usize| -> f64 {
                        (0..2)
                            .map(|w| {
                                let c = cb.word(w)[0];
                                0.5 * if z == c { 0.9 } else { 0.1 }
                            })
                            .sum()
                    };
                    let mut h_z = 0.0;
                    for z in 0..2 {
                        h_z -= pz(z) * pz(z).log2();
                    }
                    let h_z_w = -(0.9f64 * 0.9f64.log2() + 0.1f64 * 0.1f64.log2());
                    h_z - h_z_w
                };
                assert_close(mi, hand, 1e-12);
                assert!(mi > 0.5);
                return;
            }
        }
        panic!("no seed below 64 produced distinct codewords");
    }

    #[test]
    fn exact_mi_rejects_blown_budget() {
        let ch = bsc(0.1, 0.1);
        let cfg = SchemeConfig::full_duplex(30, 2);
        assert!(matches!(
            exact_wiretap_mi(&ch, &cfg),
            Err(SimError::BlockTooLong { .. })
        ));
        let cfg = SchemeConfig::full_duplex(20, 16);
        assert!(matches!(
            exact_wiretap_mi(&ch, &cfg),
            Err(SimError::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn half_duplex_extremes() {
        let ch = bsc(0.0, 0.0);
        let m = 4;

        let silent = SchemeConfig::half_duplex(8, m, 0.0);
        let out = run_half_duplex(&ch, &silent, 100).unwrap();
        assert_close(out.erasure_fraction, 0.0, 0.0);
        assert_close(out.error_rate, 0.0, 0.0);

        let always = SchemeConfig::half_duplex(8, m, 1.0);
        let out = run_half_duplex(&ch, &always, 2_000).unwrap();
        assert_close(out.erasure_fraction, 1.0, 0.0);
        // Decoder is reduced to guessing message 0.
        let guess = (m - 1) as f64 / m as f64;
        let sigma = (guess * (1.0 - guess) / 2_000f64).sqrt();
        assert!((out.error_rate - guess).abs() <= 4.0 * sigma);
    }

    #[test]
    fn half_duplex_erasure_fraction_concentrates() {
        let ch = bsc(0.1, 0.1);
        let cfg = SchemeConfig::half_duplex(100, 2, 0.5);
        let out = run_half_duplex(&ch, &cfg, 1_000).unwrap();
        let slots = 100_000f64;
        let sigma = (0.25f64 / slots).sqrt();
        assert!(
            (out.erasure_fraction - 0.5).abs() <= 3.0 * sigma,
            "erasure fraction {}",
            out.erasure_fraction
        );
    }

    #[test]
    fn half_duplex_uniform_key_hides_input_on_ternary() {
        let ch = ternary();
        // t = 2/3 spreads (1/3, 1/3, 1/3): the scheme default equals uniform.
        let cfg = SchemeConfig::half_duplex(4, 3, 2.0 / 3.0);
        let law = effective_key_law(&ch, &cfg).unwrap();
        for s in 0..3 {
            assert_close(law.get(s), 1.0 / 3.0, 1e-15);
        }
        let mi = exact_wiretap_mi(&ch, &cfg).unwrap();
        assert!(mi <= 1e-12, "leak {mi}");
        let out = run_half_duplex(&ch, &cfg, 2_000).unwrap();
        let want = 1.0 - 1.0 / 3.0;
        assert!((out.erasure_fraction - want).abs() < 0.02);
    }

    #[test]
    fn equivocation_estimate_tracks_exact_value() {
        let ch = bsc(0.2, 0.3);
        let cfg = SchemeConfig::full_duplex(2, 2);
        // MI is exactly zero, so H(W|Z)/n = log2(M)/n = 1/2.
        assert!(exact_wiretap_mi(&ch, &cfg).unwrap() <= 1e-12);
        let out = run_full_duplex(&ch, &cfg, 4_000).unwrap();
        let est = plug_in_equivocation(&out.transcripts, &cfg).unwrap();
        assert_close(est, 0.5, 0.02);
    }

    #[test]
    fn equivocation_of_deterministic_leak_is_zero() {
        let ch = build_bsc_case(&BscCase::Noiseless).unwrap();
        let mut cfg = SchemeConfig::full_duplex(4, 2);
        cfg.key_law = Some(Pmf::point_mass(2, 0));
        let out = run_full_duplex(&ch, &cfg, 500).unwrap();
        let cb = Codebook::generate(&ch, &cfg).unwrap();
        assert_ne!(cb.word(0), cb.word(1));
        let est = plug_in_equivocation(&out.transcripts, &cfg).unwrap();
        assert_close(est, 0.0, 1e-12);
    }

    #[test]
    fn equivocation_of_single_message_is_zero() {
        let ch = bsc(0.1, 0.1);
        let cfg = SchemeConfig::full_duplex(3, 1);
        let out = run_full_duplex(&ch, &cfg, 200).unwrap();
        let est = plug_in_equivocation(&out.transcripts, &cfg).unwrap();
        assert_close(est, 0.0, 1e-12);
    }

    #[test]
    fn equivocation_needs_transcripts() {
        let cfg = SchemeConfig::full_duplex(3, 2);
        assert!(matches!(
            plug_in_equivocation(&[], &cfg),
            Err(SimError::EmptyTranscripts)
        ));
    }

    #[test]
    fn dump_format_is_stable() {
        let t = Transcript {
            w: 1,
            x_seq: vec![0, 1, 1],
            x1_seq: vec![1, 0, 1],
            y_seq: vec![1, 1, 0],
            z_seq: vec![0, 0, 1],
            decoded_w: 1,
            erasure_mask: vec![false, true, false],
        };
        let mut buf = Vec::new();
        write_transcripts(&mut buf, &[t]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "0 1 011 101 110 001 1 010\n"
        );
    }

    #[test]
    fn probe_confirms_encoder_ignores_feedback() {
        let ch = bsc(0.1, 0.2);
        let mut cfg = SchemeConfig::full_duplex(8, 4);
        cfg.probe_feedback_independence = true;
        let out = run_full_duplex(&ch, &cfg, 20).unwrap();
        assert_eq!(out.transcripts.len(), 20);
    }

    #[test]
    fn config_validation_catches_bad_parameters() {
        let ch = bsc(0.1, 0.1);
        let cfg = SchemeConfig::full_duplex(2, 5); // 5 > 2^2
        assert!(matches!(
            run_full_duplex(&ch, &cfg, 1),
            Err(SimError::TooManyMessages { .. })
        ));
        let mut cfg = SchemeConfig::half_duplex(2, 2, 1.5);
        assert!(run_half_duplex(&ch, &cfg, 1).is_err());
        cfg.t = 0.5;
        cfg.key_law = Some(Pmf::uniform(3));
        assert!(matches!(
            run_half_duplex(&ch, &cfg, 1),
            Err(SimError::KeyLawSizeMismatch { .. })
        ));
    }

    /// Error rate should fall with block length at a fixed rate below
    /// capacity (random-coding trend).
    #[test]
    fn longer_blocks_decode_better_at_fixed_rate() {
        let ch = bsc(0.1, 0.3);
        let err = |n: usize, m: usize, trials: usize| -> f64 {
            let cfg = SchemeConfig::full_duplex(n, m);
            run_full_duplex(&ch, &cfg, trials).unwrap().error_rate
        };
        // Rate pinned at exactly 1/4 (the dyadic rate nearest half of the
        // 0.531-bit capacity; fractional M cannot equalize 0.2655 itself):
        // M = 2^(n/4) keeps the rate identical across block lengths.
        let e8 = err(8, 4, 10_000);
        let e12 = err(12, 8, 10_000);
        let e16 = err(16, 16, 10_000);
        assert!(
            e8 > e12 && e12 > e16,
            "no monotone trend at fixed rate 1/4: {e8}, {e12}, {e16}"
        );
    }
}
