//! Population initialization and the periodic rule-insertion schedule.
//!
//! Category names carry domain knowledge, so the first individuals are
//! seeded from the name's words; the rest come from the most frequent
//! feature words. Every seed rule has the shape
//! `NOT(AD(word, word, {0, d}), OR(top-negative-word))` with `d` drawn
//! from the configured initial gap range.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::corpus::{Tokenize, WordDictionary};
use crate::rule::{FeatureWord, GapRange, Negative, Proximity, Rule, WordGroup};

use super::{EngineError, GpConfig, Individual, Population};

/// Words of a dictionary that are representable as feature words. A
/// pluggable tokenizer could emit words the exchange format cannot carry;
/// those can never appear in rules and are skipped.
fn representable_words(dict: &WordDictionary) -> Vec<FeatureWord> {
    dict.words()
        .filter_map(|w| FeatureWord::new(w).ok())
        .collect()
}

fn seed_rule(
    word: &FeatureWord,
    negative_seed: Option<&FeatureWord>,
    cfg: &GpConfig,
    rng: &mut impl Rng,
) -> Rule {
    let d = rng.random_range(cfg.init_gap_min..=cfg.init_gap_max);
    Rule::new(
        Proximity::new(
            WordGroup::new(vec![word.clone()]),
            WordGroup::new(vec![word.clone()]),
            GapRange::new(0, d),
        ),
        negative_seed
            .map(|w| vec![Negative::Word(w.clone())])
            .unwrap_or_default(),
    )
}

/// Builds the initial population of single-rule individuals: one per
/// category-name word, the rest seeded from the top feature words (cycling
/// through the dictionary if it is smaller than the remainder).
pub fn initialize_population(
    category_name: &str,
    tokenizer: &dyn Tokenize,
    positive_dict: &WordDictionary,
    negative_dict: &WordDictionary,
    cfg: &GpConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Individual>, EngineError> {
    let dict_words = representable_words(positive_dict);
    if dict_words.is_empty() {
        return Err(EngineError::EmptyFeatureDictionary);
    }
    let negative_seed = negative_dict
        .top_word()
        .and_then(|w| FeatureWord::new(w).ok());

    let mut seeds: Vec<FeatureWord> = tokenizer
        .tokenize(category_name)
        .into_iter()
        .flatten()
        .filter_map(|t| FeatureWord::new(&t.text).ok())
        .take(cfg.population_size)
        .collect();
    let mut cycle = dict_words.iter().cycle();
    while seeds.len() < cfg.population_size {
        seeds.push(cycle.next().expect("non-empty dictionary").clone());
    }

    Ok(seeds
        .iter()
        .map(|word| Individual::new(vec![seed_rule(word, negative_seed.as_ref(), cfg, rng)]))
        .collect())
}

/// One freshly seeded rule for the insertion schedule: a random feature
/// word paired with the top negative word.
pub fn insertion_rule(
    positive_dict: &WordDictionary,
    negative_dict: &WordDictionary,
    cfg: &GpConfig,
    rng: &mut impl Rng,
) -> Result<Rule, EngineError> {
    let words = representable_words(positive_dict);
    let word = words
        .choose(rng)
        .ok_or(EngineError::EmptyFeatureDictionary)?;
    let negative_seed = negative_dict
        .top_word()
        .and_then(|w| FeatureWord::new(w).ok());
    Ok(seed_rule(word, negative_seed.as_ref(), cfg, rng))
}

/// In-place insertion event: when the population's generation counter is a
/// positive multiple of the insertion period, every individual gains one
/// freshly seeded rule (each drawing its own word) and loses its cached
/// fitness. Off-schedule calls are no-ops. Returns whether rules were
/// inserted.
///
/// Note: [`super::evolve`] injects the same rules as offspring copies
/// instead of mutating the selected population, so the reserved best
/// individual can never regress.
pub fn insert_rule_schedule(
    pop: &mut Population,
    positive_dict: &WordDictionary,
    negative_dict: &WordDictionary,
    cfg: &GpConfig,
    rng: &mut impl Rng,
) -> Result<bool, EngineError> {
    if pop.generation == 0 || !pop.generation.is_multiple_of(cfg.insertion_period) {
        return Ok(false);
    }
    for ind in &mut pop.individuals {
        let rule = insertion_rule(positive_dict, negative_dict, cfg, rng)?;
        ind.rules.push(rule);
        ind.fitness = None;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DictEntry, ReferenceTokenizer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dict(words: &[(&str, u64)]) -> WordDictionary {
        WordDictionary {
            entries: words
                .iter()
                .map(|(w, f)| DictEntry {
                    word: w.to_string(),
                    frequency: *f,
                    average_frequency: *f as f64,
                })
                .collect(),
        }
    }

    fn cfg(n: usize) -> GpConfig {
        GpConfig {
            population_size: n,
            ..GpConfig::default()
        }
    }

    #[test]
    fn seeds_name_words_then_top_dictionary_words() {
        let tok = ReferenceTokenizer::default();
        let pos = dict(&[("cold", 9), ("cough", 7), ("ache", 2)]);
        let neg = dict(&[("noise", 5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pop =
            initialize_population("Flu consultation", &tok, &pos, &neg, &cfg(4), &mut rng).unwrap();
        assert_eq!(pop.len(), 4);
        let seed_word = |ind: &Individual| ind.rules[0].positive.left.words[0].as_str().to_owned();
        let words: Vec<String> = pop.iter().map(seed_word).collect();
        assert_eq!(words, vec!["flu", "consultation", "cold", "cough"]);
        for ind in &pop {
            assert!(ind.is_valid());
            assert_eq!(ind.rules.len(), 1);
            let rule = &ind.rules[0];
            assert_eq!(rule.positive.left, rule.positive.right);
            assert_eq!(rule.positive.gap.min, 0);
            assert!((1..=10).contains(&rule.positive.gap.max));
            assert_eq!(
                rule.negatives,
                vec![Negative::Word(FeatureWord::new("noise").unwrap())]
            );
        }
    }

    #[test]
    fn long_names_are_truncated_to_population_size() {
        let tok = ReferenceTokenizer::default();
        let pos = dict(&[("w", 1)]);
        let neg = dict(&[("n", 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = initialize_population(
            "bitten by mammals and reptiles",
            &tok,
            &pos,
            &neg,
            &cfg(2),
            &mut rng,
        )
        .unwrap();
        assert_eq!(pop.len(), 2);
        assert_eq!(pop[0].rules[0].positive.left.words[0].as_str(), "bitten");
        assert_eq!(pop[1].rules[0].positive.left.words[0].as_str(), "by");
    }

    #[test]
    fn small_dictionaries_cycle() {
        let tok = ReferenceTokenizer::default();
        let pos = dict(&[("alpha", 3), ("beta", 1)]);
        let neg = dict(&[("n", 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pop = initialize_population("", &tok, &pos, &neg, &cfg(5), &mut rng).unwrap();
        let words: Vec<&str> = pop
            .iter()
            .map(|i| i.rules[0].positive.left.words[0].as_str())
            .collect();
        assert_eq!(words, vec!["alpha", "beta", "alpha", "beta", "alpha"]);
    }

    #[test]
    fn empty_positive_dictionary_is_an_error() {
        let tok = ReferenceTokenizer::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            initialize_population(
                "name",
                &tok,
                &WordDictionary::default(),
                &dict(&[("n", 1)]),
                &cfg(2),
                &mut rng
            ),
            Err(EngineError::EmptyFeatureDictionary)
        ));
    }

    #[test]
    fn empty_negative_dictionary_yields_pure_positive_seeds() {
        let tok = ReferenceTokenizer::default();
        let pos = dict(&[("w", 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pop = initialize_population(
            "x",
            &tok,
            &pos,
            &WordDictionary::default(),
            &cfg(2),
            &mut rng,
        )
        .unwrap();
        assert!(pop.iter().all(|i| i.rules[0].negatives.is_empty()));
    }

    #[test]
    fn insertion_fires_only_on_schedule() {
        let pos = dict(&[("w1", 3), ("w2", 2)]);
        let neg = dict(&[("n", 1)]);
        let config = cfg(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let individual = Individual::new(vec![seed_rule(
            &FeatureWord::new("w1").unwrap(),
            None,
            &config,
            &mut rng,
        )]);
        let mut pop = Population {
            individuals: vec![individual; 3],
            generation: 499,
            history: Vec::new(),
        };
        assert!(!insert_rule_schedule(&mut pop, &pos, &neg, &config, &mut rng).unwrap());
        assert!(pop.individuals.iter().all(|i| i.rules.len() == 1));

        pop.generation = 500;
        assert!(insert_rule_schedule(&mut pop, &pos, &neg, &config, &mut rng).unwrap());
        for ind in &pop.individuals {
            assert_eq!(ind.rules.len(), 2);
            assert!(ind.is_valid());
            assert_eq!(ind.fitness, None);
            let inserted = &ind.rules[1];
            assert_eq!(
                inserted.negatives,
                vec![Negative::Word(FeatureWord::new("n").unwrap())]
            );
        }

        pop.generation = 0;
        assert!(!insert_rule_schedule(&mut pop, &pos, &neg, &config, &mut rng).unwrap());
    }
}
