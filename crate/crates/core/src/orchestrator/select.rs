use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

/// What selection needs to know about an accepted test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FocusInput {
    pub name: String,
    pub ledger_len: usize,
    /// Enclosing method (`Class.method`) of each newly killed mutant.
    pub kill_methods: Vec<String>,
}

impl FocusInput {
    /// Kill count per method, busiest first, then by name.
    pub fn method_counts(&self) -> Vec<(&str, usize)> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for m in &self.kill_methods {
            *counts.entry(m.as_str()).or_default() += 1;
        }
        let mut v: Vec<(&str, usize)> = counts.into_iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        v
    }

    pub fn max_method_kills(&self) -> usize {
        self.method_counts().first().map_or(0, |(_, n)| *n)
    }
}

/// A test chosen for review.
#[derive(Clone, Debug, PartialEq)]
pub struct Focused {
    /// Index into the selection input.
    pub index: usize,
    pub focus_method: String,
    pub focus_ratio: f64,
}

/// Ranking order: kills per modification descending (compared exactly),
/// then the largest same-method kill count descending, then name.
pub fn rank_order(a: &FocusInput, b: &FocusInput) -> Ordering {
    let lhs = a.kill_methods.len() as u128 * b.ledger_len.max(1) as u128;
    let rhs = b.kill_methods.len() as u128 * a.ledger_len.max(1) as u128;
    rhs.cmp(&lhs).then(b.max_method_kills().cmp(&a.max_method_kills())).then(a.name.cmp(&b.name))
}

/// Ranks the inputs and keeps those with at least half of their kills in a
/// single method that no better-ranked test already covers.
pub fn select_focused(inputs: &[FocusInput]) -> Vec<Focused> {
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    order.sort_by(|&a, &b| rank_order(&inputs[a], &inputs[b]));
    let mut specified: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for index in order {
        let input = &inputs[index];
        let total = input.kill_methods.len();
        if total == 0 {
            continue;
        }
        let pick = input.method_counts().into_iter().find(|(m, n)| n * 2 >= total && !specified.contains(m));
        if let Some((method, n)) = pick {
            specified.insert(method);
            out.push(Focused { index, focus_method: method.to_string(), focus_ratio: n as f64 / total as f64 });
        }
    }
    out
}
