use super::MutationReport;

/// `100 × killed / executed`, or 0 when nothing was executed.
pub fn mutation_score(killed: usize, executed: usize) -> f64 {
    if executed == 0 {
        0.0
    } else {
        100.0 * killed as f64 / executed as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("increase in killed mutants is undefined when the original suite kills none")]
pub struct UndefinedIncrease;

/// Relative increase `(amplified − original) / original`.
pub fn increase_killed_counts(original: usize, amplified: usize) -> Result<f64, UndefinedIncrease> {
    if original == 0 {
        return Err(UndefinedIncrease);
    }
    Ok((amplified as f64 - original as f64) / original as f64)
}

/// [`increase_killed_counts`] over two reports of the same mutant list.
pub fn increase_killed(original: &MutationReport, amplified: &MutationReport) -> Result<f64, UndefinedIncrease> {
    debug_assert_eq!(original.results.len(), amplified.results.len());
    increase_killed_counts(original.killed_count(), amplified.killed_count())
}
