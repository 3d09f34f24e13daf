//! Slow, obviously-correct reference implementations.

use std::collections::{BTreeMap, BTreeSet};

use ldq::numeric::{ratio, Rational};

/// (antecedent, consequent) -> (support, confidence)
pub type RuleTable = BTreeMap<(BTreeSet<usize>, usize), (Rational, Rational)>;

/// Every rule X -> c with X nonempty, found by enumerating all itemsets of
/// the universe `0..universe`.
pub fn brute_force_rules(
    transactions: &[BTreeSet<usize>],
    universe: usize,
    min_support: &Rational,
    min_confidence: &Rational,
) -> RuleTable {
    let n = transactions.len() as u64;
    let count = |set: &BTreeSet<usize>| transactions.iter().filter(|t| set.is_subset(t)).count() as u64;
    let mut out = BTreeMap::new();
    if n == 0 {
        return out;
    }
    for mask in 1u32..(1 << universe) {
        let set: BTreeSet<usize> = (0..universe).filter(|i| mask & (1 << i) != 0).collect();
        if set.len() < 2 {
            continue;
        }
        let c_set = count(&set);
        let support = ratio(c_set, n);
        if c_set == 0 || &support < min_support {
            continue;
        }
        for &c in &set {
            let mut ante = set.clone();
            ante.remove(&c);
            let confidence = ratio(c_set, count(&ante));
            if &confidence >= min_confidence {
                out.insert((ante, c), (support.clone(), confidence));
            }
        }
    }
    out
}

/// Ordinary least squares fit `y = a + b x`; returns (a, b).
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}
