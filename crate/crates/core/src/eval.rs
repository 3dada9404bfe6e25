//! Scoring of pipeline output against gold annotations: strict recognition
//! F1, lemma normalization accuracy, and pairwise linking F1 over entity
//! clusters.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::hash::Hash;

use crate::corpus::Category;

/// Precision/recall/F1 with the underlying counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl EvalScores {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        EvalScores {
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// One mention for recognition scoring. The `language` groups the
/// per-language breakdown; leave it empty for aggregate-only scoring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecItem {
    pub language: String,
    pub doc_id: String,
    pub surface: String,
    pub category: Category,
}

/// Per-language and aggregate scores.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub per_language: BTreeMap<String, EvalScores>,
    pub overall: EvalScores,
}

/// Strict recognition: mentions compared as (document, case-folded
/// surface, category) set elements; both surface and category must match.
pub fn strict_recognition_f1(gold: &[RecItem], pred: &[RecItem]) -> EvalReport {
    let fold = |item: &RecItem| {
        (
            item.language.clone(),
            item.doc_id.clone(),
            item.surface.to_lowercase(),
            item.category,
        )
    };
    let gold_set: BTreeSet<_> = gold.iter().map(fold).collect();
    let pred_set: BTreeSet<_> = pred.iter().map(fold).collect();

    let mut languages: BTreeSet<&String> = BTreeSet::new();
    for item in gold_set.iter().chain(&pred_set) {
        languages.insert(&item.0);
    }

    let mut per_language = BTreeMap::new();
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for lang in languages {
        let g: BTreeSet<_> = gold_set.iter().filter(|i| &i.0 == lang).collect();
        let p: BTreeSet<_> = pred_set.iter().filter(|i| &i.0 == lang).collect();
        let l_tp = g.intersection(&p).count() as u64;
        let l_fp = p.difference(&g).count() as u64;
        let l_fn = g.difference(&p).count() as u64;
        tp += l_tp;
        fp += l_fp;
        fn_ += l_fn;
        per_language.insert(lang.clone(), EvalScores::from_counts(l_tp, l_fp, l_fn));
    }
    EvalReport {
        per_language,
        overall: EvalScores::from_counts(tp, fp, fn_),
    }
}

/// Normalization accuracy report. Accuracy is undefined (not zero) when no
/// mention matched.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub per_language: BTreeMap<String, Option<f64>>,
    pub overall: Option<f64>,
    pub matched: u64,
    pub correct: u64,
}

/// Fraction of mentions, matched exactly by (document, surface, category),
/// whose predicted lemma equals the gold lemma (case-sensitive).
pub fn normalization_accuracy(
    gold: &[(RecItem, String)],
    pred: &[(RecItem, String)],
) -> NormReport {
    let mut pred_map: HashMap<&RecItem, &str> = HashMap::new();
    for (item, lemma) in pred {
        pred_map.entry(item).or_insert(lemma.as_str());
    }

    let mut by_lang: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut seen: HashSet<&RecItem> = HashSet::new();
    let (mut matched, mut correct) = (0u64, 0u64);
    for (item, lemma) in gold {
        if !seen.insert(item) {
            continue;
        }
        let Some(predicted) = pred_map.get(item) else {
            continue;
        };
        matched += 1;
        let counts = by_lang.entry(item.language.clone()).or_insert((0, 0));
        counts.0 += 1;
        if *predicted == lemma.as_str() {
            correct += 1;
            counts.1 += 1;
        }
    }

    NormReport {
        per_language: by_lang
            .into_iter()
            .map(|(lang, (m, c))| (lang, Some(c as f64 / m as f64)))
            .collect(),
        overall: (matched > 0).then(|| correct as f64 / matched as f64),
        matched,
        correct,
    }
}

fn cluster_pairs<K: Ord + Clone + Hash + Eq>(clusters: &[Vec<K>]) -> HashSet<(K, K)> {
    let mut pairs = HashSet::new();
    for cluster in clusters {
        let mut members: Vec<&K> = cluster.iter().collect();
        members.sort();
        members.dedup();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                pairs.insert((members[i].clone(), members[j].clone()));
            }
        }
    }
    pairs
}

/// Raw pairwise counts between two partitions.
pub fn linking_counts<K: Ord + Clone + Hash + Eq>(
    gold: &[Vec<K>],
    pred: &[Vec<K>],
) -> (u64, u64, u64) {
    let gold_pairs = cluster_pairs(gold);
    let pred_pairs = cluster_pairs(pred);
    let tp = gold_pairs.intersection(&pred_pairs).count() as u64;
    let fp = pred_pairs.difference(&gold_pairs).count() as u64;
    let fn_ = gold_pairs.difference(&pred_pairs).count() as u64;
    (tp, fp, fn_)
}

/// Two all-singleton partitions carry no pairs and agree perfectly; with
/// any pairs present the usual zero-denominator convention reports 0.
fn scores_from_pair_counts(tp: u64, fp: u64, fn_: u64) -> EvalScores {
    if tp + fp + fn_ == 0 {
        return EvalScores {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
            tp,
            fp,
            fn_,
        };
    }
    EvalScores::from_counts(tp, fp, fn_)
}

/// Pairwise-link scoring: a true positive is an unordered mention pair
/// co-clustered in both partitions.
pub fn linking_f1<K: Ord + Clone + Hash + Eq>(gold: &[Vec<K>], pred: &[Vec<K>]) -> EvalScores {
    let (tp, fp, fn_) = linking_counts(gold, pred);
    scores_from_pair_counts(tp, fp, fn_)
}

/// Micro-averaged pairwise linking over scope units (documents or
/// languages): counts are summed across units before scoring.
pub fn linking_f1_grouped<K: Ord + Clone + Hash + Eq, S: Ord>(
    gold_by_scope: &BTreeMap<S, Vec<Vec<K>>>,
    pred_by_scope: &BTreeMap<S, Vec<Vec<K>>>,
) -> EvalScores {
    let empty: Vec<Vec<K>> = Vec::new();
    let mut totals = (0u64, 0u64, 0u64);
    let scopes: BTreeSet<&S> = gold_by_scope.keys().chain(pred_by_scope.keys()).collect();
    for scope in scopes {
        let g = gold_by_scope.get(scope).unwrap_or(&empty);
        let p = pred_by_scope.get(scope).unwrap_or(&empty);
        let (tp, fp, fn_) = linking_counts(g, p);
        totals.0 += tp;
        totals.1 += fp;
        totals.2 += fn_;
    }
    scores_from_pair_counts(totals.0, totals.1, totals.2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(doc: &str, surface: &str, category: Category) -> RecItem {
        RecItem {
            language: "cs".into(),
            doc_id: doc.into(),
            surface: surface.into(),
            category,
        }
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let gold = vec![
            item("1", "Praha", Category::Loc),
            item("1", "Václav Havel", Category::Per),
        ];
        let report = strict_recognition_f1(&gold, &gold);
        assert_eq!(report.overall.f1, 1.0);
        assert_eq!(report.per_language["cs"].precision, 1.0);
    }

    #[test]
    fn empty_prediction_scores_zero() {
        let gold = vec![item("1", "Praha", Category::Loc)];
        let report = strict_recognition_f1(&gold, &[]);
        assert_eq!(report.overall.recall, 0.0);
        assert_eq!(report.overall.f1, 0.0);
    }

    #[test]
    fn partial_match_arithmetic() {
        let gold = vec![
            item("1", "a", Category::Per),
            item("1", "b", Category::Per),
            item("1", "c", Category::Per),
            item("1", "d", Category::Per),
        ];
        let pred = vec![
            item("1", "a", Category::Per),
            item("1", "b", Category::Per),
            item("1", "x", Category::Per),
        ];
        let report = strict_recognition_f1(&gold, &pred);
        assert!((report.overall.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((report.overall.recall - 0.5).abs() < 1e-12);
        assert!((report.overall.f1 - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn category_must_match_strictly() {
        let gold = vec![item("1", "Praha", Category::Loc)];
        let pred = vec![item("1", "Praha", Category::Org)];
        assert_eq!(strict_recognition_f1(&gold, &pred).overall.f1, 0.0);
    }

    #[test]
    fn recognition_surface_folds_case() {
        let gold = vec![item("1", "PRAHA", Category::Loc)];
        let pred = vec![item("1", "Praha", Category::Loc)];
        assert_eq!(strict_recognition_f1(&gold, &pred).overall.f1, 1.0);
    }

    #[test]
    fn recognition_is_permutation_invariant() {
        let gold = vec![
            item("1", "a", Category::Per),
            item("2", "b", Category::Loc),
            item("1", "c", Category::Org),
        ];
        let mut pred = gold.clone();
        pred.reverse();
        let a = strict_recognition_f1(&gold, &pred);
        assert_eq!(a.overall.f1, 1.0);
    }

    #[test]
    fn normalization_identity_baseline_shape() {
        // 63 of 100 phrases are their own lemma; identity predicts 0.63.
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for i in 0..100 {
            let it = item("1", &format!("w{i}"), Category::Per);
            let lemma = if i < 63 {
                format!("w{i}")
            } else {
                format!("l{i}")
            };
            gold.push((it.clone(), lemma));
            pred.push((it, format!("w{i}")));
        }
        let report = normalization_accuracy(&gold, &pred);
        assert_eq!(report.overall, Some(0.63));
    }

    #[test]
    fn normalization_counts_exact_lemma_matches() {
        let gold: Vec<_> = (0..4)
            .map(|i| (item("1", &format!("s{i}"), Category::Per), format!("g{i}")))
            .collect();
        let mut pred = gold.clone();
        pred[3].1 = "wrong".into();
        let report = normalization_accuracy(&gold, &pred);
        assert_eq!(report.overall, Some(0.75));
        assert_eq!(report.matched, 4);

        let all_right = normalization_accuracy(&gold, &gold);
        assert_eq!(all_right.overall, Some(1.0));
    }

    #[test]
    fn normalization_without_matches_is_undefined() {
        let gold = vec![(item("1", "a", Category::Per), "a".to_string())];
        let pred = vec![(item("2", "b", Category::Per), "b".to_string())];
        let report = normalization_accuracy(&gold, &pred);
        assert_eq!(report.overall, None);
        assert_eq!(report.matched, 0);
    }

    fn clusters(spec: &[&[&str]]) -> Vec<Vec<String>> {
        spec.iter()
            .map(|c| c.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn equal_partitions_score_one() {
        let g = clusters(&[&["a", "b"], &["c", "d", "e"], &["f"]]);
        let scores = linking_f1(&g, &g);
        assert_eq!(scores.f1, 1.0);
    }

    #[test]
    fn one_big_cluster_against_singletons() {
        let gold = clusters(&[&["a"], &["b"], &["c"], &["d"]]);
        let pred = clusters(&[&["a", "b", "c", "d"]]);
        let scores = linking_f1(&gold, &pred);
        assert_eq!(scores.precision, 0.0);
        assert_eq!(scores.recall, 0.0);
        assert_eq!(scores.f1, 0.0);
        assert_eq!(scores.fp, 6);
    }

    #[test]
    fn pair_level_arithmetic() {
        let gold = clusters(&[&["a", "b"], &["c"]]);
        let pred = clusters(&[&["a", "b", "c"]]);
        let scores = linking_f1(&gold, &pred);
        assert_eq!(scores.tp, 1);
        assert_eq!(scores.fp, 2);
        assert_eq!(scores.fn_, 0);
        assert!((scores.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(scores.recall, 1.0);
        assert!((scores.f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grouped_linking_sums_counts() {
        let mut gold = BTreeMap::new();
        let mut pred = BTreeMap::new();
        gold.insert("cs", clusters(&[&["a", "b"], &["c"]]));
        pred.insert("cs", clusters(&[&["a", "b", "c"]]));
        gold.insert("pl", clusters(&[&["x", "y"]]));
        pred.insert("pl", clusters(&[&["x", "y"]]));
        let scores = linking_f1_grouped(&gold, &pred);
        assert_eq!(scores.tp, 2);
        assert_eq!(scores.fp, 2);
        assert_eq!(scores.fn_, 0);
    }

    #[test]
    fn self_score_is_one_for_random_partitions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..30);
            let k = rng.gen_range(1..=n);
            let mut parts: Vec<Vec<String>> = vec![Vec::new(); k];
            for i in 0..n {
                let c = rng.gen_range(0..k);
                parts[c].push(format!("m{i}"));
            }
            let parts: Vec<Vec<String>> =
                parts.into_iter().filter(|c| !c.is_empty()).collect();
            let scores = linking_f1(&parts, &parts);
            assert_eq!(scores.f1, 1.0, "partition {parts:?}");
            assert_eq!(scores.fp, 0);
            assert_eq!(scores.fn_, 0);
        }
    }
}
