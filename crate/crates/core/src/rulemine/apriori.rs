use std::collections::{BTreeSet, HashSet};

use super::{support_of, FrequentItemset, MineError};
use crate::exec::Execution;

/// Transaction ids of one item as a bitset.
#[derive(Clone)]
struct TidSet(Vec<u64>);

impl TidSet {
    fn empty(n: usize) -> Self {
        TidSet(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, t: usize) {
        self.0[t / 64] |= 1 << (t % 64);
    }

    fn count_and(sets: &[&TidSet]) -> usize {
        let words = sets[0].0.len();
        (0..words)
            .map(|w| {
                sets.iter()
                    .fold(u64::MAX, |acc, s| acc & s.0[w])
                    .count_ones() as usize
            })
            .sum()
    }
}

pub fn frequent_itemsets(
    transactions: &[Vec<String>],
    min_support: f64,
) -> Result<Vec<FrequentItemset>, MineError> {
    frequent_itemsets_with(transactions, min_support, Execution::default())
}

/// Level-wise Apriori. Items are interned in lexicographic order; level `k`
/// candidates join two frequent `(k-1)`-itemsets sharing their first `k-2`
/// items, are pruned unless every `(k-1)`-subset is frequent, then counted
/// exactly by intersecting per-item transaction bitsets. Output is sorted by
/// size, then lexicographically.
pub fn frequent_itemsets_with(
    transactions: &[Vec<String>],
    min_support: f64,
    exec: Execution,
) -> Result<Vec<FrequentItemset>, MineError> {
    if transactions.is_empty() {
        return Err(MineError::EmptyDataset);
    }
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(MineError::InvalidSupport(min_support));
    }
    let n = transactions.len();
    let frequent = |count: usize| support_of(count, n) >= min_support;

    let vocabulary: Vec<&str> = transactions
        .iter()
        .flatten()
        .map(String::as_str)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut tids = vec![TidSet::empty(n); vocabulary.len()];
    for (t, tx) in transactions.iter().enumerate() {
        for item in tx {
            let id = vocabulary.binary_search(&item.as_str()).expect("interned");
            tids[id].set(t);
        }
    }

    let mut out = Vec::new();
    let emit = |out: &mut Vec<FrequentItemset>, items: &[usize], count: usize| {
        out.push(FrequentItemset {
            items: items.iter().map(|&i| vocabulary[i].to_string()).collect(),
            support_count: count,
            support: support_of(count, n),
        })
    };

    let mut level: Vec<Vec<usize>> = Vec::new();
    for (id, set) in tids.iter().enumerate() {
        let count = TidSet::count_and(&[set]);
        if frequent(count) {
            emit(&mut out, &[id], count);
            level.push(vec![id]);
        }
    }

    while level.len() > 1 {
        let known: HashSet<&[usize]> = level.iter().map(Vec::as_slice).collect();
        let mut candidates = Vec::new();
        for (i, a) in level.iter().enumerate() {
            let prefix = &a[..a.len() - 1];
            for b in &level[i + 1..] {
                // level is sorted, so equal prefixes are contiguous
                if &b[..b.len() - 1] != prefix {
                    break;
                }
                let mut cand = a.clone();
                cand.push(*b.last().expect("non-empty"));
                let closed = (0..cand.len()).all(|skip| {
                    let sub: Vec<usize> = cand
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    known.contains(sub.as_slice())
                });
                if closed {
                    candidates.push(cand);
                }
            }
        }
        let counts = exec.map(&candidates, |cand| {
            let sets: Vec<&TidSet> = cand.iter().map(|&i| &tids[i]).collect();
            TidSet::count_and(&sets)
        });
        level = Vec::new();
        for (cand, count) in candidates.into_iter().zip(counts) {
            if frequent(count) {
                emit(&mut out, &cand, count);
                level.push(cand);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tx(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    /// Every non-empty itemset over the vocabulary, counted directly.
    fn brute_force(transactions: &[Vec<String>], min_support: f64) -> Vec<(Vec<String>, usize)> {
        let vocab: Vec<String> = transactions
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut out = Vec::new();
        for mask in 1u32..(1 << vocab.len()) {
            let items: Vec<String> = (0..vocab.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| vocab[i].clone())
                .collect();
            let count = transactions
                .iter()
                .filter(|t| items.iter().all(|i| t.contains(i)))
                .count();
            if count as f64 / transactions.len() as f64 >= min_support {
                out.push((items, count));
            }
        }
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    #[test]
    fn four_transaction_example() {
        let data = tx(&[&["A", "B"], &["A", "C"], &["A", "B"], &["B"]]);
        let got = frequent_itemsets(&data, 0.5).unwrap();
        let summary: Vec<(Vec<String>, usize, f64)> = got
            .iter()
            .map(|f| (f.items.clone(), f.support_count, f.support))
            .collect();
        assert_eq!(
            summary,
            vec![
                (vec!["A".to_string()], 3, 0.75),
                (vec!["B".to_string()], 3, 0.75),
                (vec!["A".to_string(), "B".to_string()], 2, 0.5),
            ]
        );
        let oracle = brute_force(&data, 0.5);
        assert_eq!(
            oracle,
            summary.iter().map(|(i, c, _)| (i.clone(), *c)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn full_support_with_no_common_item() {
        let data = tx(&[&["A"], &["B"]]);
        assert!(frequent_itemsets(&data, 1.0).unwrap().is_empty());
    }

    #[test]
    fn single_transaction() {
        let got = frequent_itemsets(&tx(&[&["A"]]), 0.5).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].support, 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(frequent_itemsets(&[], 0.5), Err(MineError::EmptyDataset));
        let data = tx(&[&["A"]]);
        assert_eq!(frequent_itemsets(&data, 0.0), Err(MineError::InvalidSupport(0.0)));
        assert_eq!(frequent_itemsets(&data, 1.5), Err(MineError::InvalidSupport(1.5)));
    }

    #[test]
    fn wide_transactions_cross_word_boundary() {
        let rows: Vec<Vec<String>> = (0..130)
            .map(|i| {
                let mut r = vec!["common".to_string()];
                if i % 2 == 0 {
                    r.push("even".into());
                }
                r
            })
            .collect();
        let got = frequent_itemsets(&rows, 0.5).unwrap();
        assert_eq!(got.iter().find(|f| f.items == ["common"]).unwrap().support_count, 130);
        assert_eq!(got.iter().find(|f| f.items == ["common", "even"]).unwrap().support_count, 65);
    }

    fn dataset() -> impl Strategy<Value = Vec<Vec<String>>> {
        prop::collection::vec(prop::collection::btree_set(0u8..8, 0..8), 1..=12).prop_map(|rows| {
            rows.into_iter()
                .map(|r| r.into_iter().map(|i| format!("i{i}")).collect())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn matches_exhaustive_enumeration(data in dataset(), s in 1u32..=9) {
            let min_support = f64::from(s) / 10.0;
            let got: Vec<(Vec<String>, usize)> = frequent_itemsets(&data, min_support)
                .unwrap()
                .into_iter()
                .map(|f| (f.items, f.support_count))
                .collect();
            prop_assert_eq!(got, brute_force(&data, min_support));
        }

        #[test]
        fn downward_closed(data in dataset(), s in 1u32..=9) {
            let got = frequent_itemsets(&data, f64::from(s) / 10.0).unwrap();
            for f in &got {
                for skip in 0..f.items.len() {
                    if f.items.len() == 1 { break; }
                    let mut sub = f.items.clone();
                    sub.remove(skip);
                    let parent = got.iter().find(|g| g.items == sub);
                    prop_assert!(parent.is_some_and(|p| p.support_count >= f.support_count));
                }
            }
        }

        #[test]
        fn raising_support_never_adds(data in dataset(), s in 1u32..9) {
            let lo = frequent_itemsets(&data, f64::from(s) / 10.0).unwrap();
            let hi = frequent_itemsets(&data, f64::from(s + 1) / 10.0).unwrap();
            prop_assert!(hi.iter().all(|h| lo.iter().any(|l| l.items == h.items)));
        }

        #[test]
        fn parallel_equals_sequential(data in dataset(), s in 1u32..=9) {
            let ms = f64::from(s) / 10.0;
            prop_assert_eq!(
                frequent_itemsets_with(&data, ms, Execution::Sequential).unwrap(),
                frequent_itemsets_with(&data, ms, Execution::Parallel).unwrap()
            );
        }
    }
}
