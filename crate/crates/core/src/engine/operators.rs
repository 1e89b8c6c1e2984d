//! Genetic operators. All of them are constraint-preserving: applied to
//! valid individuals they produce valid individuals.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::corpus::{CooccurrenceMatrix, WordDictionary};
use crate::rule::{FeatureWord, Negative, WordGroup};

use super::{EngineError, Individual};

/// Logistic sigmoid.
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Adaptive per-individual operator probability.
///
/// Maps the individual's fitness shortfall `(f_max - f) / (f_max - f_avg)`
/// through a sigmoid scaled by `speed`, so weaker individuals are operated
/// on more often. The best individual always gets probability 0.5; a
/// uniform population (`f_max == f_avg`) degenerates to `sigmoid(speed)`
/// for everyone.
pub fn operator_probability(fitness: f64, f_max: f64, f_avg: f64, speed: f64) -> f64 {
    let ratio = if f_max == f_avg {
        1.0
    } else {
        (f_max - fitness) / (f_max - f_avg)
    };
    logistic(speed * ratio)
}

/// Which operand of a proximity pair is being worked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperandSlot {
    Left,
    Right,
}

/// Selection distribution over the dictionary for replacing a word in one
/// proximity operand, guided by ordered co-occurrence with the counterpart
/// operand.
///
/// For a candidate word `w` the weight is the summed co-occurrence of `w`
/// with every counterpart word, oriented by slot: a left-slot candidate
/// must precede the counterpart, a right-slot candidate must follow it.
/// Weights are normalized to probabilities; if all weights are zero the
/// distribution is uniform.
pub fn cooccurrence_word_distribution(
    slot: OperandSlot,
    counterpart: &WordGroup,
    dict: &WordDictionary,
    matrix: &CooccurrenceMatrix,
) -> Vec<f64> {
    let weights: Vec<f64> = dict
        .entries
        .iter()
        .map(|entry| {
            counterpart
                .words
                .iter()
                .map(|w| match slot {
                    OperandSlot::Left => matrix.count_words(&entry.word, w.as_str()) as f64,
                    OperandSlot::Right => matrix.count_words(w.as_str(), &entry.word) as f64,
                })
                .sum::<f64>()
        })
        .collect();
    normalize_or_uniform(weights)
}

fn normalize_or_uniform(mut weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in &mut weights {
            *w /= total;
        }
    } else {
        let n = weights.len();
        if n > 0 {
            let uniform = 1.0 / n as f64;
            weights.iter_mut().for_each(|w| *w = uniform);
        }
    }
    weights
}

/// Draws an index from a probability vector by inverse-CDF walk.
fn weighted_index(probabilities: &[f64], rng: &mut impl Rng) -> usize {
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if draw < acc {
            return i;
        }
    }
    probabilities.len() - 1
}

/// A structural slot present in both parents at which subtrees can be
/// exchanged.
#[derive(Debug, Clone, Copy)]
enum CrossoverSlot {
    /// Swap the whole rule at this index.
    Rule(usize),
    /// Swap one operand group of the positive pair of the rule at this
    /// index; gap ranges stay put.
    PositiveGroup(usize, OperandSlot),
    /// Swap the negative-list tails of the rule at this index, cutting at
    /// the given position.
    NegativesTail(usize, usize),
}

/// Single-point crossover: one slot is chosen uniformly among the
/// compatible slots of both parents and the subtrees there are swapped.
/// A rule slot always exists, so the operator cannot fail.
pub fn crossover(
    parent_a: &Individual,
    parent_b: &Individual,
    rng: &mut impl Rng,
) -> (Individual, Individual) {
    let common_rules = parent_a.rules.len().min(parent_b.rules.len());
    let mut slots: Vec<CrossoverSlot> = Vec::new();
    for i in 0..common_rules {
        slots.push(CrossoverSlot::Rule(i));
        slots.push(CrossoverSlot::PositiveGroup(i, OperandSlot::Left));
        slots.push(CrossoverSlot::PositiveGroup(i, OperandSlot::Right));
        let common_negatives = parent_a.rules[i]
            .negatives
            .len()
            .min(parent_b.rules[i].negatives.len());
        for cut in 0..=common_negatives {
            slots.push(CrossoverSlot::NegativesTail(i, cut));
        }
    }
    let slot = *slots.choose(rng).expect("rule slot always exists");

    let mut child_a = parent_a.clone();
    let mut child_b = parent_b.clone();
    child_a.fitness = None;
    child_b.fitness = None;
    match slot {
        CrossoverSlot::Rule(i) => {
            std::mem::swap(&mut child_a.rules[i], &mut child_b.rules[i]);
        }
        CrossoverSlot::PositiveGroup(i, OperandSlot::Left) => {
            std::mem::swap(
                &mut child_a.rules[i].positive.left,
                &mut child_b.rules[i].positive.left,
            );
        }
        CrossoverSlot::PositiveGroup(i, OperandSlot::Right) => {
            std::mem::swap(
                &mut child_a.rules[i].positive.right,
                &mut child_b.rules[i].positive.right,
            );
        }
        CrossoverSlot::NegativesTail(i, cut) => {
            let tail_a = child_a.rules[i].negatives.split_off(cut);
            let tail_b = child_b.rules[i].negatives.split_off(cut);
            child_a.rules[i].negatives.extend(tail_b);
            child_b.rules[i].negatives.extend(tail_a);
        }
    }
    (child_a, child_b)
}

/// Corpus artifacts consulted by mutation.
pub struct MutationContext<'a> {
    pub positive_dict: &'a WordDictionary,
    pub negative_dict: &'a WordDictionary,
    pub cooccurrence: &'a CooccurrenceMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MutationKind {
    Shrink,
    Gap,
    ReplacePositive,
    ReplaceNegative,
}

#[derive(Debug, Clone, Copy)]
enum ShrinkTarget {
    /// Delete a word from a positive operand with at least two words.
    PositiveWord(usize, OperandSlot),
    /// Delete a word from an operand of a proximity-shaped negative.
    NegativeWord(usize, usize, OperandSlot),
    /// Delete a whole negative expression.
    Negative(usize, usize),
    /// Delete a whole rule; only when more than one remains.
    Rule(usize),
}

/// Mutates one individual. The kind is drawn uniformly among the
/// applicable ones:
///
/// - shrink: delete a word, a negative expression or a whole rule,
/// - gap: redraw the positive gap bounds within `[0, 2·max + 1]`,
/// - positive word replacement guided by co-occurrence,
/// - negative word replacement sampled by dictionary frequency.
///
/// If nothing is applicable the individual is returned unchanged.
pub fn mutate(ind: &Individual, ctx: &MutationContext, rng: &mut impl Rng) -> Individual {
    let mut child = ind.clone();
    child.fitness = None;

    let mut kinds = Vec::with_capacity(4);
    if !shrink_targets(&child).is_empty() {
        kinds.push(MutationKind::Shrink);
    }
    if !child.rules.is_empty() {
        kinds.push(MutationKind::Gap);
    }
    if !child.rules.is_empty() && !ctx.positive_dict.is_empty() {
        kinds.push(MutationKind::ReplacePositive);
    }
    if !ctx.negative_dict.is_empty() && has_word_negative(&child) {
        kinds.push(MutationKind::ReplaceNegative);
    }
    let Some(&kind) = kinds.choose(rng) else {
        return child;
    };
    match kind {
        MutationKind::Shrink => apply_shrink(&mut child, rng),
        MutationKind::Gap => apply_gap(&mut child, rng),
        MutationKind::ReplacePositive => apply_replace_positive(&mut child, ctx, rng),
        MutationKind::ReplaceNegative => apply_replace_negative(&mut child, ctx, rng),
    }
    child
}

fn shrink_targets(ind: &Individual) -> Vec<ShrinkTarget> {
    let mut targets = Vec::new();
    for (r, rule) in ind.rules.iter().enumerate() {
        if rule.positive.left.words.len() >= 2 {
            targets.push(ShrinkTarget::PositiveWord(r, OperandSlot::Left));
        }
        if rule.positive.right.words.len() >= 2 {
            targets.push(ShrinkTarget::PositiveWord(r, OperandSlot::Right));
        }
        for (n, negative) in rule.negatives.iter().enumerate() {
            if let Negative::Proximity(p) = negative {
                if p.left.words.len() >= 2 {
                    targets.push(ShrinkTarget::NegativeWord(r, n, OperandSlot::Left));
                }
                if p.right.words.len() >= 2 {
                    targets.push(ShrinkTarget::NegativeWord(r, n, OperandSlot::Right));
                }
            }
            targets.push(ShrinkTarget::Negative(r, n));
        }
        if ind.rules.len() >= 2 {
            targets.push(ShrinkTarget::Rule(r));
        }
    }
    targets
}

fn apply_shrink(ind: &mut Individual, rng: &mut impl Rng) {
    let targets = shrink_targets(ind);
    let Some(&target) = targets.choose(rng) else {
        return;
    };
    match target {
        ShrinkTarget::PositiveWord(r, slot) => {
            let group = match slot {
                OperandSlot::Left => &mut ind.rules[r].positive.left,
                OperandSlot::Right => &mut ind.rules[r].positive.right,
            };
            let victim = rng.random_range(0..group.words.len());
            group.words.remove(victim);
        }
        ShrinkTarget::NegativeWord(r, n, slot) => {
            if let Negative::Proximity(p) = &mut ind.rules[r].negatives[n] {
                let group = match slot {
                    OperandSlot::Left => &mut p.left,
                    OperandSlot::Right => &mut p.right,
                };
                let victim = rng.random_range(0..group.words.len());
                group.words.remove(victim);
            }
        }
        ShrinkTarget::Negative(r, n) => {
            ind.rules[r].negatives.remove(n);
        }
        ShrinkTarget::Rule(r) => {
            ind.rules.remove(r);
        }
    }
}

/// Redraws the positive gap of one rule: the maximum within
/// `[0, 2·max + 1]`, the minimum within `[0, max]`, or both. Touching one
/// bound at a time lets the window walk to a target without a lucky
/// simultaneous draw.
fn apply_gap(ind: &mut Individual, rng: &mut impl Rng) {
    let r = rng.random_range(0..ind.rules.len());
    let gap = &mut ind.rules[r].positive.gap;
    match rng.random_range(0..3u8) {
        0 => {
            gap.max = rng.random_range(0..=2 * gap.max + 1);
            gap.min = gap.min.min(gap.max);
        }
        1 => {
            gap.min = rng.random_range(0..=gap.max);
        }
        _ => {
            gap.max = rng.random_range(0..=2 * gap.max + 1);
            gap.min = rng.random_range(0..=gap.max);
        }
    }
}

const REPLACEMENT_ATTEMPTS: usize = 8;

fn apply_replace_positive(ind: &mut Individual, ctx: &MutationContext, rng: &mut impl Rng) {
    let r = rng.random_range(0..ind.rules.len());
    let slot = if rng.random::<f64>() < 0.5 {
        OperandSlot::Left
    } else {
        OperandSlot::Right
    };
    let positive = &ind.rules[r].positive;
    let (group_len, counterpart) = match slot {
        OperandSlot::Left => (positive.left.words.len(), positive.right.clone()),
        OperandSlot::Right => (positive.right.words.len(), positive.left.clone()),
    };
    if group_len == 0 {
        return;
    }
    let victim = rng.random_range(0..group_len);
    let distribution =
        cooccurrence_word_distribution(slot, &counterpart, ctx.positive_dict, ctx.cooccurrence);
    for _ in 0..REPLACEMENT_ATTEMPTS {
        let pick = weighted_index(&distribution, rng);
        let Ok(word) = FeatureWord::new(&ctx.positive_dict.entries[pick].word) else {
            continue;
        };
        let group = match slot {
            OperandSlot::Left => &mut ind.rules[r].positive.left,
            OperandSlot::Right => &mut ind.rules[r].positive.right,
        };
        let duplicate = group
            .words
            .iter()
            .enumerate()
            .any(|(i, w)| i != victim && *w == word);
        if !duplicate {
            group.words[victim] = word;
            return;
        }
    }
}

fn has_word_negative(ind: &Individual) -> bool {
    ind.rules
        .iter()
        .any(|r| r.negatives.iter().any(|n| matches!(n, Negative::Word(_))))
}

fn apply_replace_negative(ind: &mut Individual, ctx: &MutationContext, rng: &mut impl Rng) {
    let spots: Vec<(usize, usize)> = ind
        .rules
        .iter()
        .enumerate()
        .flat_map(|(r, rule)| {
            rule.negatives
                .iter()
                .enumerate()
                .filter(|(_, n)| matches!(n, Negative::Word(_)))
                .map(move |(n, _)| (r, n))
        })
        .collect();
    let Some(&(r, n)) = spots.choose(rng) else {
        return;
    };
    let weights: Vec<f64> = ctx
        .negative_dict
        .entries
        .iter()
        .map(|e| e.frequency as f64)
        .collect();
    let distribution = normalize_or_uniform(weights);
    for _ in 0..REPLACEMENT_ATTEMPTS {
        let pick = weighted_index(&distribution, rng);
        if let Ok(word) = FeatureWord::new(&ctx.negative_dict.entries[pick].word) {
            ind.rules[r].negatives[n] = Negative::Word(word);
            return;
        }
    }
}

/// Elitist replacement: keeps the single highest-fitness individual (ties
/// break toward the lower index) and fills the remaining `n - 1` places
/// uniformly without replacement from the rest.
pub fn select_next_generation(
    mut combined: Vec<Individual>,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Individual>, EngineError> {
    if combined.len() < n {
        return Err(EngineError::PopulationTooSmall {
            need: n,
            have: combined.len(),
        });
    }
    if combined.iter().any(|i| i.fitness.is_none()) {
        return Err(EngineError::MissingFitness);
    }
    let mut best = 0usize;
    for i in 1..combined.len() {
        if combined[i].fitness > combined[best].fitness {
            best = i;
        }
    }
    let elite = combined.swap_remove(best);
    combined.partial_shuffle(rng, n - 1);
    combined.truncate(n - 1);
    let mut next = Vec::with_capacity(n);
    next.push(elite);
    next.extend(combined);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_cooccurrence, DictEntry, Inquiry, ReferenceTokenizer};
    use crate::rule::{GapRange, Proximity, Rule};
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

    fn single_rule_individual(left: &[&str], right: &[&str], negatives: &[&str]) -> Individual {
        Individual::new(vec![Rule::new(
            Proximity::new(
                WordGroup::of(left),
                WordGroup::of(right),
                GapRange::new(0, 4),
            ),
            negatives
                .iter()
                .map(|w| Negative::Word(FeatureWord::new(*w).unwrap()))
                .collect(),
        )])
    }

    fn matrix_from(texts: &[&str], vocab: &[&str]) -> CooccurrenceMatrix {
        let tok = ReferenceTokenizer::default();
        let qs: Vec<Inquiry> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Inquiry::from_text(format!("q{i}"), *t, "c", &tok).unwrap())
            .collect();
        let refs: Vec<&Inquiry> = qs.iter().collect();
        build_cooccurrence(
            &refs,
            &vocab.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn probability_is_half_at_the_top_and_sigmoid_elsewhere() {
        assert!((operator_probability(0.9, 0.9, 0.5, 2.0) - 0.5).abs() < 1e-12);
        // f == f_avg -> ratio 1 -> sigmoid(speed)
        let p = operator_probability(0.5, 0.9, 0.5, 2.0);
        assert!((p - 0.8808).abs() < 1e-4);
        // uniform population degenerates to sigmoid(speed) for everyone
        let q = operator_probability(0.7, 0.7, 0.7, 2.0);
        assert!((q - p).abs() < 1e-12);
    }

    #[test]
    fn probability_strictly_decreases_with_fitness() {
        let mut last = f64::INFINITY;
        for step in 0..=100 {
            let f = step as f64 / 100.0;
            let p = operator_probability(f, 1.0, 0.4, 3.0);
            assert!(p < last, "not strictly decreasing at f = {f}");
            assert!(p > 0.0 && p < 1.0);
            last = p;
        }
    }

    #[test]
    fn distribution_normalizes_counts_toward_the_counterpart() {
        // M(w1,b) = 3, M(w2,b) = 1, M(w3,b) = 0
        let m = matrix_from(
            &["w1 b", "w1 b", "w1 b", "w2 b", "b w3"],
            &["w1", "w2", "w3", "b"],
        );
        let d = dict(&[("w1", 5), ("w2", 5), ("w3", 5)]);
        let probs =
            cooccurrence_word_distribution(OperandSlot::Left, &WordGroup::of(&["b"]), &d, &m);
        assert_eq!(probs, vec![0.75, 0.25, 0.0]);
    }

    #[test]
    fn all_zero_correlations_fall_back_to_uniform() {
        let m = matrix_from(&["x y"], &["x", "y"]);
        let d = dict(&[("a", 1), ("b", 1), ("c", 1)]);
        let probs =
            cooccurrence_word_distribution(OperandSlot::Left, &WordGroup::of(&["q"]), &d, &m);
        assert_eq!(probs, vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn multi_word_counterpart_sums_columns() {
        // M(w,b) = 2, M(w,c) = 2 -> C(w) = 4
        let m = matrix_from(&["w b", "w b c", "w c"], &["w", "b", "c"]);
        let d = dict(&[("w", 1)]);
        let probs =
            cooccurrence_word_distribution(OperandSlot::Left, &WordGroup::of(&["b", "c"]), &d, &m);
        assert_eq!(probs, vec![1.0]);
        // And the right slot uses the transposed orientation.
        let right = cooccurrence_word_distribution(
            OperandSlot::Right,
            &WordGroup::of(&["b"]),
            &dict(&[("c", 1), ("w", 1)]),
            &m,
        );
        // M(b,c) = 1, M(b,w) = 0
        assert_eq!(right, vec![1.0, 0.0]);
    }

    #[test]
    fn rule_slot_crossover_swaps_whole_rules() {
        let a = single_rule_individual(&["a"], &["b"], &[]);
        let b = single_rule_individual(&["x"], &["y"], &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Single-rule parents with no negatives have slots: Rule(0),
        // PositiveGroup(0, L), PositiveGroup(0, R), NegativesTail(0, 0).
        // Whatever is chosen, children must be valid and complementary.
        for _ in 0..32 {
            let (ca, cb) = crossover(&a, &b, &mut rng);
            assert!(ca.is_valid() && cb.is_valid());
            assert_eq!(ca.rules.len(), 1);
            assert_eq!(cb.rules.len(), 1);
        }
    }

    #[test]
    fn group_crossover_keeps_gap_ranges() {
        let mut a = single_rule_individual(&["a1", "a2"], &["b"], &[]);
        let mut b = single_rule_individual(&["x"], &["y"], &[]);
        a.rules[0].positive.gap = GapRange::new(1, 3);
        b.rules[0].positive.gap = GapRange::new(2, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..64 {
            let (ca, cb) = crossover(&a, &b, &mut rng);
            let gaps: Vec<GapRange> = [&ca, &cb].iter().map(|i| i.rules[0].positive.gap).collect();
            // Gap ranges never migrate, whichever slot was picked.
            assert!(gaps.contains(&GapRange::new(1, 3)));
            assert!(gaps.contains(&GapRange::new(2, 9)));
        }
    }

    #[test]
    fn shrink_deletes_one_element() {
        let d = dict(&[("a", 1)]);
        let m = matrix_from(&["a b"], &["a", "b"]);
        let ctx = MutationContext {
            positive_dict: &d,
            negative_dict: &d,
            cooccurrence: &m,
        };
        let ind = single_rule_individual(&["fever", "cough"], &["flu"], &["cold"]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut saw_word_shrink = false;
        let mut saw_negative_shrink = false;
        for _ in 0..200 {
            let child = mutate(&ind, &ctx, &mut rng);
            assert!(child.is_valid());
            if child.rules[0].positive.left.words.len() == 1 {
                saw_word_shrink = true;
            }
            if child.rules[0].negatives.is_empty() {
                saw_negative_shrink = true;
            }
        }
        assert!(saw_word_shrink);
        assert!(saw_negative_shrink);
    }

    #[test]
    fn minimal_individual_never_shrinks_to_invalid() {
        let d = dict(&[("a", 1), ("b", 1)]);
        let m = matrix_from(&["a b"], &["a", "b"]);
        let ctx = MutationContext {
            positive_dict: &d,
            negative_dict: &d,
            cooccurrence: &m,
        };
        // One rule, one-word groups, no negatives: shrink has no target
        // except... nothing. Other kinds still apply.
        let ind = single_rule_individual(&["a"], &["b"], &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let child = mutate(&ind, &ctx, &mut rng);
            assert!(child.is_valid());
            assert_eq!(child.rules.len(), 1);
            assert!(!child.rules[0].positive.left.words.is_empty());
            assert!(!child.rules[0].positive.right.words.is_empty());
        }
    }

    #[test]
    fn gap_mutation_keeps_bounds_ordered() {
        let d = dict(&[("a", 1)]);
        let m = matrix_from(&["a b"], &["a", "b"]);
        let ctx = MutationContext {
            positive_dict: &d,
            negative_dict: &d,
            cooccurrence: &m,
        };
        let ind = single_rule_individual(&["a"], &["b"], &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let child = mutate(&ind, &ctx, &mut rng);
            let gap = child.rules[0].positive.gap;
            assert!(gap.min <= gap.max);
            assert!(gap.max <= 2 * 4 + 1);
        }
    }

    #[test]
    fn elitism_always_keeps_the_best() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut combined: Vec<Individual> = [0.9, 0.5, 0.5, 0.2]
            .iter()
            .map(|&f| {
                let mut i = single_rule_individual(&["a"], &["b"], &[]);
                i.fitness = Some(f);
                i
            })
            .collect();
        combined[0].rules[0].positive.gap = GapRange::new(0, 99); // marker
        for _ in 0..100 {
            let next = select_next_generation(combined.clone(), 2, &mut rng).unwrap();
            assert_eq!(next.len(), 2);
            assert_eq!(next[0].fitness, Some(0.9));
            assert_eq!(next[0].rules[0].positive.gap.max, 99);
        }
    }

    #[test]
    fn selection_with_n_equal_to_combined_keeps_everyone() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let combined: Vec<Individual> = [0.1, 0.2, 0.3]
            .iter()
            .map(|&f| {
                let mut i = single_rule_individual(&["a"], &["b"], &[]);
                i.fitness = Some(f);
                i
            })
            .collect();
        let next = select_next_generation(combined, 3, &mut rng).unwrap();
        assert_eq!(next.len(), 3);
        let mut fs: Vec<f64> = next.iter().map(|i| i.fitness.unwrap()).collect();
        fs.sort_by(f64::total_cmp);
        assert_eq!(fs, vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn selection_ties_break_toward_the_lower_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut combined: Vec<Individual> = (0..4)
            .map(|gap| {
                let mut i = single_rule_individual(&["a"], &["b"], &[]);
                i.rules[0].positive.gap = GapRange::new(0, gap);
                i.fitness = Some(0.5);
                i
            })
            .collect();
        combined[2].fitness = Some(0.9);
        combined[3].fitness = Some(0.9);
        let next = select_next_generation(combined, 1, &mut rng).unwrap();
        assert_eq!(next[0].rules[0].positive.gap.max, 2);
    }

    #[test]
    fn non_best_individuals_are_sampled_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let combined: Vec<Individual> = (0..5)
            .map(|k| {
                let mut i = single_rule_individual(&["a"], &["b"], &[]);
                i.rules[0].positive.gap = GapRange::new(0, k);
                i.fitness = Some(if k == 0 { 0.9 } else { 0.1 });
                i
            })
            .collect();
        let trials = 10_000usize;
        let n = 3usize;
        let mut appearances = [0usize; 5];
        for _ in 0..trials {
            let next = select_next_generation(combined.clone(), n, &mut rng).unwrap();
            for ind in &next[1..] {
                appearances[ind.rules[0].positive.gap.max as usize] += 1;
            }
        }
        assert_eq!(appearances[0], 0); // the elite is not part of the draw
        let p = (n - 1) as f64 / 4.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for &count in &appearances[1..] {
            let freq = count as f64 / trials as f64;
            assert!(
                (freq - p).abs() <= 3.0 * sigma,
                "frequency {freq} outside {p} ± {}",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn selection_errors_are_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ind = single_rule_individual(&["a"], &["b"], &[]);
        ind.fitness = Some(0.5);
        assert!(matches!(
            select_next_generation(vec![ind.clone()], 2, &mut rng),
            Err(EngineError::PopulationTooSmall { need: 2, have: 1 })
        ));
        ind.fitness = None;
        assert!(matches!(
            select_next_generation(vec![ind], 1, &mut rng),
            Err(EngineError::MissingFitness)
        ));
    }
}
