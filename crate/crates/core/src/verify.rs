//! Report objects shared by every checker.

use rayon::prelude::*;

/// Failures kept per report; the total count is tracked separately.
const MAX_KEPT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub input: String,
    pub detail: String,
    /// Word length plus support size, used to pick the smallest witness.
    pub size: usize,
}

impl Counterexample {
    pub fn new(input: impl Into<String>, detail: impl Into<String>, size: usize) -> Self {
        Self { input: input.into(), detail: detail.into(), size }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    pub failures: Vec<Counterexample>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), checked: 0, failed: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn record(&mut self, outcome: Option<Counterexample>) {
        self.checked += 1;
        if let Some(c) = outcome {
            self.fail(c);
        }
    }

    pub fn fail(&mut self, c: Counterexample) {
        self.failed += 1;
        if self.failures.len() < MAX_KEPT {
            self.failures.push(c);
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failed += other.failed;
        for c in other.failures {
            if self.failures.len() < MAX_KEPT {
                self.failures.push(c);
            }
        }
    }

    pub fn smallest_failure(&self) -> Option<&Counterexample> {
        self.failures.iter().min_by_key(|c| c.size)
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            format!("{}: ok ({} cases)", self.name, self.checked)
        } else {
            let first = self.smallest_failure().map(|c| format!("{} -> {}", c.input, c.detail));
            format!(
                "{}: FAILED {}/{} (smallest: {})",
                self.name,
                self.failed,
                self.checked,
                first.unwrap_or_default()
            )
        }
    }
}

/// Runs `check` on every item in parallel; failures come back in input order.
pub fn check_all<T, F>(name: &str, items: &[T], check: F) -> CheckReport
where
    T: Sync,
    F: Fn(&T) -> Option<Counterexample> + Sync,
{
    let outcomes: Vec<Option<Counterexample>> = items.par_iter().map(&check).collect();
    let mut report = CheckReport::new(name);
    for o in outcomes {
        report.record(o);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_counted_and_capped() {
        let items: Vec<usize> = (0..40).collect();
        let r = check_all("odd", &items, |i| (i % 2 == 1).then(|| Counterexample::new(i.to_string(), "odd", *i)));
        assert_eq!(r.checked, 40);
        assert_eq!(r.failed, 20);
        assert_eq!(r.failures.len(), MAX_KEPT);
        assert_eq!(r.smallest_failure().unwrap().input, "1");
        assert!(!r.passed());
    }
}
