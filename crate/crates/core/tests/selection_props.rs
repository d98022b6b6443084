use std::collections::BTreeSet;

use cpa_core::features::{FeatureName, Stage};
use cpa_core::selection::{select_features, SelectionOptions};
use proptest::prelude::*;

fn pool(k: usize) -> BTreeSet<FeatureName> {
    FeatureName::ALL[..k].iter().copied().collect()
}

proptest! {
    #[test]
    fn monotone_evaluator_accepts_everything(seed in any::<u64>(), k in 1usize..20) {
        let initial: BTreeSet<FeatureName> = [FeatureName::ConPathToVerbLength].into();
        let run = select_features(Stage::ArgId, &initial, &pool(k), |t| Ok(0.1 * t.len() as f64), seed, &SelectionOptions::default()).unwrap();
        prop_assert!(run.trace.iter().all(|e| e.accepted));
        prop_assert_eq!(run.selected.len(), k + 1);
    }

    #[test]
    fn single_useful_feature(seed in any::<u64>(), k in 2usize..30, pick in 0usize..30) {
        let pool = pool(k);
        let useful = *pool.iter().nth(pick % k).unwrap();
        let run = select_features(Stage::Sem, &BTreeSet::new(), &pool, |t| Ok(if t.contains(&useful) { 1.0 } else { 0.0 }), seed, &SelectionOptions::default()).unwrap();
        prop_assert_eq!(run.selected, BTreeSet::from([useful]));
        let accepted: Vec<_> = run.trace.iter().filter(|e| e.accepted).collect();
        prop_assert_eq!(accepted.len(), 1);
    }

    #[test]
    fn runs_are_reproducible_and_monotone(seed in any::<u64>(), k in 1usize..25) {
        let pool = pool(k);
        // A bumpy but deterministic evaluator.
        let eval = |t: &BTreeSet<FeatureName>| Ok(t.iter().map(|f| (f.as_str().len() % 7) as f64).sum::<f64>() / 50.0 - 0.01 * t.len() as f64);
        let a = select_features(Stage::Syn, &BTreeSet::new(), &pool, eval, seed, &SelectionOptions::default()).unwrap();
        let b = select_features(Stage::Syn, &BTreeSet::new(), &pool, eval, seed, &SelectionOptions::default()).unwrap();
        prop_assert_eq!(&a, &b);
        let mut best = 0.0;
        for e in &a.trace {
            if e.accepted {
                prop_assert!(e.fscore > best);
                best = e.fscore;
            } else {
                prop_assert!(e.fscore <= best);
            }
        }
        prop_assert_eq!(a.best, best);
        let accepted: BTreeSet<FeatureName> = a.trace.iter().filter(|e| e.accepted).map(|e| e.feature).collect();
        prop_assert_eq!(a.selected, accepted);
        prop_assert_eq!(a.trace.len(), k);
    }
}
