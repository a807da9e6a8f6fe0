//! Wall-clock instrumentation with fixed bucket labels.
//!
//! Scopes nest; elapsed time is attributed to the innermost open scope
//! only, so the leaf buckets never overlap. Aggregate rows of the report
//! (`mom-rhs`, `momentum`, `sum`, ...) are sums of leaf buckets.

use std::collections::BTreeMap;
use std::time::Instant;

/// Report rows for linear problems.
pub const LINEAR_LABELS: [&str; 5] = ["init", "copy", "rhs", "solve", "sum"];

/// Report rows for the Navier-Stokes solver: setup plus the rows of the
/// paper-style timing table, in table order.
pub const NS_LABELS: [&str; 15] = [
    "init",
    "mom-rhs-nonlin",
    "mom-rhs-p",
    "mom-rhs-visc",
    "mom-rhs",
    "mom-solve",
    "momentum",
    "pres-rhs",
    "pres-solve",
    "pres",
    "pres-up.rhs",
    "pres-up.solve",
    "pres-up",
    "sum",
    "copy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Linear,
    NavierStokes,
}

impl ReportKind {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            ReportKind::Linear => &LINEAR_LABELS,
            ReportKind::NavierStokes => &NS_LABELS,
        }
    }

    /// Leaf buckets that make up an aggregate row; a leaf maps to itself.
    fn parts(self, label: &str) -> &'static [&'static str] {
        match (self, label) {
            (ReportKind::Linear, "sum") => &["init", "rhs", "solve"],
            (ReportKind::NavierStokes, "mom-rhs") => &["mom-rhs", "mom-rhs-nonlin", "mom-rhs-p", "mom-rhs-visc"],
            (ReportKind::NavierStokes, "momentum") => {
                &["mom-rhs", "mom-rhs-nonlin", "mom-rhs-p", "mom-rhs-visc", "mom-solve"]
            }
            (ReportKind::NavierStokes, "pres") => &["pres-rhs", "pres-solve"],
            (ReportKind::NavierStokes, "pres-up") => &["pres-up.rhs", "pres-up.solve"],
            (ReportKind::NavierStokes, "sum") => &[
                "mom-rhs",
                "mom-rhs-nonlin",
                "mom-rhs-p",
                "mom-rhs-visc",
                "mom-solve",
                "pres-rhs",
                "pres-solve",
                "pres-up.rhs",
                "pres-up.solve",
            ],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub label: &'static str,
    pub seconds: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub kind: ReportKind,
    pub rows: Vec<TimingRow>,
}

impl TimingReport {
    pub fn get(&self, label: &str) -> Option<&TimingRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

#[derive(Debug)]
pub struct Timer {
    kind: ReportKind,
    leaves: BTreeMap<&'static str, (f64, u64)>,
    stack: Vec<(&'static str, Instant)>,
}

impl Timer {
    pub fn new(kind: ReportKind) -> Self {
        Self {
            kind,
            leaves: BTreeMap::new(),
            stack: Vec::new(),
        }
    }

    pub fn kind(&self) -> ReportKind {
        self.kind
    }

    fn charge(&mut self, label: &'static str, secs: f64, calls: u64) {
        let e = self.leaves.entry(label).or_insert((0.0, 0));
        e.0 += secs;
        e.1 += calls;
    }

    /// Opens a scope. Panics on a label outside the report's fixed set.
    pub fn start(&mut self, label: &'static str) {
        assert!(
            self.kind.labels().contains(&label),
            "unknown timing bucket {label:?}"
        );
        let now = Instant::now();
        if let Some(&(outer, since)) = self.stack.last() {
            self.charge(outer, (now - since).as_secs_f64(), 0);
        }
        self.stack.push((label, now));
    }

    /// Closes the innermost scope.
    pub fn stop(&mut self) {
        let now = Instant::now();
        let (label, since) = self.stack.pop().expect("no open timing scope");
        self.charge(label, (now - since).as_secs_f64(), 1);
        if let Some(top) = self.stack.last_mut() {
            top.1 = now;
        }
    }

    /// Runs `f` inside a scope.
    pub fn time<T>(&mut self, label: &'static str, f: impl FnOnce(&mut Self) -> T) -> T {
        self.start(label);
        let out = f(self);
        self.stop();
        out
    }

    /// All rows in fixed order; aggregate rows sum their parts.
    pub fn report(&self) -> TimingReport {
        let rows = self
            .kind
            .labels()
            .iter()
            .map(|&label| {
                let parts = self.kind.parts(label);
                let (seconds, count) = if parts.is_empty() || parts == [label] {
                    self.leaves.get(label).copied().unwrap_or((0.0, 0))
                } else {
                    let secs = parts
                        .iter()
                        .map(|p| self.leaves.get(p).map_or(0.0, |e| e.0))
                        .sum();
                    let count = self.leaves.get(label).map_or(0, |e| e.1);
                    (secs, count)
                };
                TimingRow { label, seconds, count }
            })
            .collect();
        TimingReport { kind: self.kind, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_has_every_bucket() {
        let r = Timer::new(ReportKind::Linear).report();
        assert_eq!(r.labels(), LINEAR_LABELS);
        assert!(r.rows.iter().all(|row| row.seconds == 0.0 && row.count == 0));
        assert_eq!(Timer::new(ReportKind::NavierStokes).report().labels(), NS_LABELS);
    }

    #[test]
    fn nested_scopes_charge_innermost() {
        let mut t = Timer::new(ReportKind::NavierStokes);
        t.time("mom-rhs", |t| {
            t.time("mom-rhs-nonlin", |_| std::thread::sleep(std::time::Duration::from_millis(5)));
        });
        let r = t.report();
        let nonlin = r.get("mom-rhs-nonlin").unwrap().seconds;
        let total = r.get("mom-rhs").unwrap().seconds;
        assert!(nonlin >= 0.005);
        assert!(total >= nonlin);
        assert!(total - nonlin < 0.005);
        let sum = r.get("sum").unwrap().seconds;
        let parts: f64 = ["momentum", "pres", "pres-up"].iter().map(|l| r.get(l).unwrap().seconds).sum();
        assert!((sum - parts).abs() < 1e-6);
        assert_eq!(r.get("copy").unwrap().seconds, 0.0);
    }

    #[test]
    #[should_panic(expected = "unknown timing bucket")]
    fn foreign_label_rejected() {
        Timer::new(ReportKind::Linear).start("pres-rhs");
    }
}
