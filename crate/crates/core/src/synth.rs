//! Seeded synthetic corpora and random rule generators.
//!
//! The planted-pattern corpus embeds a concept the rule dialect can express
//! exactly: an inquiry belongs to the target category iff a left marker
//! word precedes a right marker word within a bounded token gap and a veto
//! word is absent. Labels are computed from the generated tokens by an
//! independent position check, so the concept holds by construction no
//! matter what sequence the recipes produced.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Inquiry, LabeledCorpus, ReferenceTokenizer};
use crate::rule::{FeatureWord, GapRange, Negative, Proximity, Rule, RuleVector, WordGroup};

pub const LEFT_MARKER: &str = "alpha";
pub const RIGHT_MARKER: &str = "bravo";
pub const VETO_WORD: &str = "vetox";
pub const TARGET_CATEGORY: &str = "target";
pub const OTHER_CATEGORY: &str = "other";

#[derive(Debug, Clone)]
pub struct PlantedConfig {
    /// Total inquiries to generate.
    pub inquiries: usize,
    /// Vocabulary size including the three marker words.
    pub vocab_size: usize,
    /// Maximum token gap of the planted concept.
    pub gap_limit: u32,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            inquiries: 5000,
            vocab_size: 200,
            gap_limit: 8,
            seed: 0,
        }
    }
}

#[derive(Debug)]
pub struct PlantedCorpus {
    pub corpus: LabeledCorpus,
    /// The rule vector that classifies the target category perfectly.
    pub ideal: RuleVector,
}

/// True iff `left` occurs before `right` within `gap_limit` intervening
/// tokens and `veto` is absent. Plain position arithmetic, independent of
/// the rule matcher.
fn concept_holds(tokens: &[String], gap_limit: u32) -> bool {
    if tokens.iter().any(|t| t == VETO_WORD) {
        return false;
    }
    let lefts: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| *t == LEFT_MARKER)
        .map(|(i, _)| i)
        .collect();
    let rights: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| *t == RIGHT_MARKER)
        .map(|(i, _)| i)
        .collect();
    lefts.iter().any(|&i| {
        rights
            .iter()
            .any(|&j| j > i && (j - i - 1) as u32 <= gap_limit)
    })
}

/// Generates a corpus around the planted concept. Deterministic per seed.
pub fn planted_corpus(cfg: &PlantedConfig) -> PlantedCorpus {
    assert!(cfg.vocab_size > 3, "need room for fillers");
    assert!(cfg.inquiries > 0);
    let fillers: Vec<String> = (0..cfg.vocab_size - 3)
        .map(|i| format!("w{i:03}"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tokenizer = ReferenceTokenizer::default();
    let mut inquiries = Vec::with_capacity(cfg.inquiries);

    for n in 0..cfg.inquiries {
        let tokens = generate_tokens(&fillers, cfg.gap_limit, &mut rng);
        let label = if concept_holds(&tokens, cfg.gap_limit) {
            TARGET_CATEGORY
        } else {
            OTHER_CATEGORY
        };
        let text = format!("{}.", tokens.join(" "));
        let inquiry = Inquiry::from_text(format!("q{n:06}"), text, label, &tokenizer)
            .expect("generated text has tokens");
        debug_assert_eq!(inquiry.tokens.len(), tokens.len());
        inquiries.push(inquiry);
    }

    let ideal = RuleVector::new(
        TARGET_CATEGORY,
        vec![Rule::new(
            Proximity::new(
                WordGroup::of(&[LEFT_MARKER]),
                WordGroup::of(&[RIGHT_MARKER]),
                GapRange::new(0, cfg.gap_limit),
            ),
            vec![Negative::Word(FeatureWord::new(VETO_WORD).unwrap())],
        )],
    );
    PlantedCorpus {
        corpus: LabeledCorpus::new(inquiries),
        ideal,
    }
}

fn generate_tokens(fillers: &[String], gap_limit: u32, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut tokens: Vec<String> = (0..rng.random_range(8..=16))
        .map(|_| fillers.choose(rng).unwrap().clone())
        .collect();
    let roll: f64 = rng.random();
    if roll < 0.45 {
        // Concept instance: marker pair within the gap.
        let gap = rng.random_range(0..=gap_limit) as usize;
        plant_pair(&mut tokens, gap, rng);
    } else if roll < 0.51 {
        // The pair is present but so is the veto word.
        let gap = rng.random_range(0..=gap_limit) as usize;
        plant_pair(&mut tokens, gap, rng);
        let at = rng.random_range(0..=tokens.len());
        tokens.insert(at, VETO_WORD.to_owned());
    } else if roll < 0.58 {
        // Pair too far apart.
        let gap = rng.random_range(gap_limit + 1..=gap_limit + 6) as usize;
        while tokens.len() < gap {
            tokens.push(fillers.choose(rng).unwrap().clone());
        }
        plant_pair(&mut tokens, gap, rng);
    } else if roll < 0.65 {
        // Pair in the wrong order.
        let at = rng.random_range(0..tokens.len());
        tokens.insert(at, RIGHT_MARKER.to_owned());
        let behind = rng.random_range(at + 1..=tokens.len());
        tokens.insert(behind, LEFT_MARKER.to_owned());
    } else if roll < 0.93 {
        // Veto word on its own, doubled half the time. This keeps it the
        // most frequent word of the complement by a clear margin, so it is
        // what initial negative parts get seeded with.
        let at = rng.random_range(0..=tokens.len());
        tokens.insert(at, VETO_WORD.to_owned());
        if rng.random::<f64>() < 0.5 {
            let at = rng.random_range(0..=tokens.len());
            tokens.insert(at, VETO_WORD.to_owned());
        }
    }
    // else: plain filler noise
    tokens
}

/// Inserts the marker pair with exactly `gap` tokens between them.
fn plant_pair(tokens: &mut Vec<String>, gap: usize, rng: &mut ChaCha8Rng) {
    let left_at = rng.random_range(0..=tokens.len() - gap);
    tokens.insert(left_at, LEFT_MARKER.to_owned());
    tokens.insert(left_at + 1 + gap, RIGHT_MARKER.to_owned());
}

/// A uniformly random token sequence over a vocabulary, up to `max_len`
/// tokens. Used to exercise the matcher against its reference oracle.
pub fn random_tokens(vocab: &[String], max_len: usize, rng: &mut impl Rng) -> Vec<String> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| vocab.choose(rng).unwrap().clone())
        .collect()
}

/// A random valid rule over a vocabulary: word groups of 1-3 distinct
/// words, gap bounds within [0, 12], up to two negatives mixing words and
/// proximity pairs.
pub fn random_rule(vocab: &[String], rng: &mut impl Rng) -> Rule {
    let positive = random_proximity(vocab, rng);
    let negative_count = rng.random_range(0..=2);
    let negatives = (0..negative_count)
        .map(|_| {
            if rng.random::<f64>() < 0.6 {
                Negative::Word(FeatureWord::new(vocab.choose(rng).unwrap()).unwrap())
            } else {
                Negative::Proximity(random_proximity(vocab, rng))
            }
        })
        .collect();
    Rule::new(positive, negatives)
}

fn random_proximity(vocab: &[String], rng: &mut impl Rng) -> Proximity {
    let min = rng.random_range(0..=4);
    let max = rng.random_range(min..=min + 8);
    Proximity::new(
        random_group(vocab, rng),
        random_group(vocab, rng),
        GapRange::new(min, max),
    )
}

fn random_group(vocab: &[String], rng: &mut impl Rng) -> WordGroup {
    let size = rng.random_range(1..=3usize.min(vocab.len()));
    let indices = rand::seq::index::sample(rng, vocab.len(), size);
    WordGroup::new(
        indices
            .iter()
            .map(|i| FeatureWord::new(&vocab[i]).unwrap())
            .collect(),
    )
}
