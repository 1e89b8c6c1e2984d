use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use regevo_bench::planted;
use regevo_core::corpus::{
    build_cooccurrence, build_feature_dictionary, build_negative_dictionary, split_by_category,
    InvertedIndex, ReferenceTokenizer,
};
use regevo_core::engine::{evolve, EvolutionContext, GpConfig};
use regevo_core::synth::TARGET_CATEGORY;

/// A fixed-length evolution run (the stall window exceeds the cap, so
/// every iteration does the same number of generations).
fn bench_evolve(c: &mut Criterion) {
    let planted = planted(500);
    let split = split_by_category(&planted.corpus, TARGET_CATEGORY).unwrap();
    let index = InvertedIndex::build(split.all());
    let positive_dict = build_feature_dictionary(&split, 0.01).unwrap();
    let negative_dict = build_negative_dictionary(&split);
    let vocabulary: Vec<String> = positive_dict.words().map(str::to_owned).collect();
    let cooccurrence = build_cooccurrence(&split.positive, &vocabulary);
    let tokenizer = ReferenceTokenizer::default();
    let ctx = EvolutionContext {
        split: &split,
        index: &index,
        positive_dict: &positive_dict,
        negative_dict: &negative_dict,
        cooccurrence: &cooccurrence,
        tokenizer: &tokenizer,
    };
    let cfg = GpConfig {
        population_size: 10,
        max_generations: 20,
        stall_window: 21,
        rng_seed: 7,
        ..GpConfig::default()
    };
    let mut group = c.benchmark_group("evolve");
    group.sample_size(10);
    group.bench_function("500_docs_20_generations", |b| {
        b.iter(|| black_box(evolve(TARGET_CATEGORY, &ctx, &cfg).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_evolve);
criterion_main!(benches);
