//! Shared fixtures for the benchmarks.

use regevo_core::synth::{planted_corpus, PlantedConfig, PlantedCorpus};

pub fn planted(inquiries: usize) -> PlantedCorpus {
    planted_corpus(&PlantedConfig {
        inquiries,
        vocab_size: 200,
        gap_limit: 8,
        seed: 0xBE,
    })
}

/// A long synthetic document with the marker pair buried near the end.
pub fn long_document(tokens: usize) -> Vec<String> {
    let mut doc: Vec<String> = (0..tokens).map(|i| format!("w{:03}", i % 180)).collect();
    doc.insert(tokens - 10, "alpha".to_owned());
    doc.insert(tokens - 4, "bravo".to_owned());
    doc
}
