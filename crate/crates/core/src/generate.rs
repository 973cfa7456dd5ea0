//! Order-3 Markov-chain text generation for building synthetic corpora.
//!
//! The model records, for every 3-token window of the training corpus, the
//! multiset of words that follow it. Generation picks a start window
//! uniformly among all windows, then repeatedly samples a successor of the
//! last three emitted tokens with probability proportional to its corpus
//! count, until exactly the requested number of tokens is out. The only
//! window with no successors is the final one; hitting it mid-generation
//! restarts from a fresh uniformly-chosen window, and such restart positions
//! are reported alongside the text.
//!
//! Randomness comes from ChaCha8 seeded with a caller-supplied 64-bit value,
//! and successors are kept in first-occurrence order, so equal
//! (corpus, length, seed) triples reproduce byte-identical output on every
//! platform.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::text::{Text, Token};

/// Seed for the deterministic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub u64);

/// Markov order: a successor is conditioned on this many preceding tokens.
pub const ORDER: usize = 3;

/// Order-3 context model over a training corpus.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    vocab: Vec<Token>,
    corpus: Vec<u32>,
    /// Successor tokens and counts per context, in first-occurrence order.
    contexts: HashMap<[u32; ORDER], Vec<(u32, u32)>>,
}

/// A generated text plus the positions where generation had to restart
/// after a dead end.
#[derive(Debug, Clone)]
pub struct Generated {
    pub text: Text,
    pub restarts: Vec<usize>,
}

impl MarkovModel {
    /// Trains on the concatenation of `corpus` in the given order.
    pub fn from_corpus(corpus: &[Text]) -> Result<MarkovModel> {
        let mut vocab: Vec<Token> = Vec::new();
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut stream: Vec<u32> = Vec::new();
        for text in corpus {
            for token in text.tokens() {
                let id = match ids.get(token.as_str()) {
                    Some(&id) => id,
                    None => {
                        let id = vocab.len() as u32;
                        ids.insert(token.as_str().to_owned(), id);
                        vocab.push(token.clone());
                        id
                    }
                };
                stream.push(id);
            }
        }
        if stream.len() < ORDER + 1 {
            return Err(Error::CorpusTooShort {
                tokens: stream.len(),
                min: ORDER + 1,
            });
        }
        let mut contexts: HashMap<[u32; ORDER], Vec<(u32, u32)>> = HashMap::new();
        for window in stream.windows(ORDER + 1) {
            let key = [window[0], window[1], window[2]];
            let successor = window[ORDER];
            let entry = contexts.entry(key).or_default();
            match entry.iter_mut().find(|(tok, _)| *tok == successor) {
                Some((_, count)) => *count += 1,
                None => entry.push((successor, 1)),
            }
        }
        Ok(MarkovModel {
            vocab,
            corpus: stream,
            contexts,
        })
    }

    /// Number of 3-token start windows (every window of the corpus).
    pub fn start_windows(&self) -> usize {
        self.corpus.len() - (ORDER - 1)
    }

    /// Successor counts of a context, empty for unseen or final windows.
    pub fn successors(&self, context: [&Token; ORDER]) -> Vec<(Token, u32)> {
        let mut ids = [0u32; ORDER];
        for (slot, token) in ids.iter_mut().zip(context) {
            match self.vocab.iter().position(|v| v == token) {
                Some(pos) => *slot = pos as u32,
                None => return Vec::new(),
            }
        }
        self.contexts
            .get(&ids)
            .map(|succ| {
                succ.iter()
                    .map(|&(tok, count)| (self.vocab[tok as usize].clone(), count))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Emits exactly `length` tokens (at least 3), deterministically for a
    /// given seed. The text id is `gen-<seed>`.
    pub fn generate(&self, length: usize, seed: Seed) -> Result<Generated> {
        if length < ORDER {
            return Err(Error::GenerationTooShort {
                len: length,
                min: ORDER,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
        let mut out: Vec<u32> = Vec::with_capacity(length);
        let mut restarts = Vec::new();

        // Sampling arithmetic stays in u64 so output does not depend on the
        // platform's pointer width.
        let emit_window = |out: &mut Vec<u32>, rng: &mut ChaCha8Rng| {
            let start = rng.gen_range(0..self.start_windows() as u64) as usize;
            for offset in 0..ORDER {
                if out.len() == length {
                    break;
                }
                out.push(self.corpus[start + offset]);
            }
        };

        emit_window(&mut out, &mut rng);
        while out.len() < length {
            let context = [out[out.len() - 3], out[out.len() - 2], out[out.len() - 1]];
            match self.contexts.get(&context) {
                Some(successors) => {
                    let total: u64 = successors.iter().map(|&(_, c)| u64::from(c)).sum();
                    let mut pick = rng.gen_range(0..total);
                    let mut chosen = successors[0].0;
                    for &(tok, count) in successors {
                        if pick < u64::from(count) {
                            chosen = tok;
                            break;
                        }
                        pick -= u64::from(count);
                    }
                    out.push(chosen);
                }
                None => {
                    // Dead end: only the corpus's final window has no
                    // successors. Start over from a fresh window.
                    restarts.push(out.len());
                    emit_window(&mut out, &mut rng);
                }
            }
        }

        let tokens: Vec<Token> = out
            .iter()
            .map(|&id| self.vocab[id as usize].clone())
            .collect();
        Ok(Generated {
            text: Text::new(format!("gen-{}", seed.0), tokens),
            restarts,
        })
    }
}
