//! Identity bookkeeping for the verification suites.

use crate::graded::Elem;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Display;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub identity: String,
    pub input: String,
    pub residual: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
}

/// Collects identity evaluations: a residual must be exactly zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Checker {
    pub identities: BTreeMap<String, Tally>,
    pub failures: Vec<Witness>,
    /// recorded, not asserted
    pub observations: BTreeMap<String, Tally>,
}

/// At most this many witnesses are kept per identity.
const MAX_WITNESSES: usize = 3;

impl Checker {
    pub fn new() -> Checker {
        Checker::default()
    }

    pub fn zero(&mut self, identity: &str, input: impl Display, residual: &Elem) {
        let ok = residual.is_zero();
        self.record(identity, ok, || (input.to_string(), residual.to_string()));
    }

    pub fn equal(&mut self, identity: &str, input: impl Display, lhs: &Elem, rhs: &Elem) {
        self.zero(identity, input, &lhs.sub(rhs));
    }

    /// A non-algebraic check (for instance an error returned by a builder).
    pub fn truth(&mut self, identity: &str, input: impl Display, ok: bool, detail: impl Display) {
        self.record(identity, ok, || (input.to_string(), detail.to_string()));
    }

    fn record(&mut self, identity: &str, ok: bool, wit: impl FnOnce() -> (String, String)) {
        let t = self.identities.entry(identity.to_string()).or_default();
        t.checked += 1;
        if !ok {
            t.failed += 1;
            if t.failed <= MAX_WITNESSES {
                let (input, residual) = wit();
                self.failures.push(Witness {
                    identity: identity.to_string(),
                    input,
                    residual,
                });
            }
        }
    }

    /// Record a measured property that is not part of pass/fail.
    pub fn observe(&mut self, what: &str, holds: bool) {
        let t = self.observations.entry(what.to_string()).or_default();
        t.checked += 1;
        if !holds {
            t.failed += 1;
        }
    }

    pub fn merge(&mut self, o: Checker) {
        for (k, t) in o.observations {
            let e = self.observations.entry(k).or_default();
            e.checked += t.checked;
            e.failed += t.failed;
        }
        for (k, t) in o.identities {
            let e = self.identities.entry(k.clone()).or_default();
            e.checked += t.checked;
            let room = MAX_WITNESSES.saturating_sub(e.failed);
            e.failed += t.failed;
            self.failures
                .extend(o.failures.iter().filter(|w| w.identity == k).take(room).cloned());
        }
    }

    pub fn passed(&self) -> bool {
        self.identities.values().all(|t| t.failed == 0)
    }

    pub fn checked(&self) -> usize {
        self.identities.values().map(|t| t.checked).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference, Space};

    #[test]
    fn merge_keeps_counts_and_caps_witnesses() {
        let sp = Space::new(&reference::get("flat-r2"), 2, 1);
        let bad = sp.parse("x1");
        let mut a = Checker::new();
        let mut b = Checker::new();
        for _ in 0..3 {
            a.zero("id", "in", &bad);
            b.zero("id", "in", &bad);
        }
        b.zero("other", "in", &sp.zero());
        a.merge(b);
        assert_eq!(a.identities["id"], Tally { checked: 6, failed: 6 });
        assert_eq!(a.failures.len(), 3);
        assert!(!a.passed());
        assert_eq!(a.checked(), 7);
    }
}
