//! Claim-by-claim verification reports.
//!
//! Each registered claim is checked on one `(q, n)` instance, either by
//! comparing a closed form with an exact oracle or by running a property
//! sweep. Reports are deterministic for a fixed seed unless timings are
//! requested.

mod claims;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::budget::Deadline;
use crate::error::{Error, Result};
use crate::graph::LfGraph;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Instances checked when no instance is given.
pub const DEFAULT_MATRIX: [(usize, usize); 5] = [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3)];

/// Claim ids with a short description of the result each one checks,
/// sorted by id.
pub const REGISTRY: [(&str, &str); 14] = [
    ("CARD-GEN", "automorphism count for n >= 3"),
    ("CARD-N2", "automorphism count for n = 2"),
    ("CARD-STAB", "order of the twin-class stabilizer"),
    ("COMP-ISO", "isomorphisms between n = 2 components"),
    ("CONN", "component structure"),
    ("DECOMP", "factorization of automorphisms into generators"),
    ("DOM-SIDE", "one-sided domination number"),
    ("DOM-WHOLE-STD", "whole-graph domination number (standard)"),
    ("DOM-WHOLE-TOT", "whole-graph domination number (total)"),
    ("REG", "regularity"),
    ("SIGMA-CARD", "number of lines per side"),
    (
        "STRUCT-GEN",
        "neighborhood commutation, intersection identity, side purity",
    ),
    ("STRUCT-N2", "component action for n = 2"),
    ("TWIN", "twin classes are the lines"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    PropertyPass,
    PropertyFail,
    Skipped(String),
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Mismatch | Verdict::PropertyFail)
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::Match => "match".into(),
            Verdict::Mismatch => "mismatch".into(),
            Verdict::PropertyPass => "property-pass".into(),
            Verdict::PropertyFail => "property-fail".into(),
            Verdict::Skipped(reason) => format!("skipped({reason})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimResult {
    pub id: &'static str,
    pub paper_locus: &'static str,
    pub formula: Option<String>,
    pub oracle: Option<String>,
    pub verdict: Verdict,
    pub witness: Option<Value>,
    pub ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub q: usize,
    pub n: usize,
    pub seed: u64,
    pub claims: Vec<ClaimResult>,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Claim ids to run; all when `None`. Others are reported as skipped.
    pub claims: Option<Vec<String>>,
    pub seed: u64,
    pub budget: Option<Duration>,
    /// Record per-claim wall time. Makes reports non-reproducible.
    pub timings: bool,
    /// Run oracles that are off by default because of their cost.
    pub full: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            claims: None,
            seed: DEFAULT_SEED,
            budget: None,
            timings: false,
            full: false,
        }
    }
}

/// Outcome of one claim before it is wrapped into a [`ClaimResult`].
pub(crate) struct Outcome {
    pub formula: Option<String>,
    pub oracle: Option<String>,
    pub verdict: Verdict,
    pub witness: Option<Value>,
}

impl Outcome {
    pub(crate) fn compare(
        formula: impl ToString,
        oracle: impl ToString,
        witness: Option<Value>,
    ) -> Self {
        let (f, o) = (formula.to_string(), oracle.to_string());
        let verdict = if f == o {
            Verdict::Match
        } else {
            Verdict::Mismatch
        };
        Outcome {
            formula: Some(f),
            oracle: Some(o),
            verdict,
            witness,
        }
    }

    pub(crate) fn property(ok: bool, witness: Option<Value>) -> Self {
        let verdict = if ok {
            Verdict::PropertyPass
        } else {
            Verdict::PropertyFail
        };
        Outcome {
            formula: None,
            oracle: None,
            verdict,
            witness,
        }
    }

    pub(crate) fn skipped(reason: impl Into<String>) -> Self {
        Outcome {
            formula: None,
            oracle: None,
            verdict: Verdict::Skipped(reason.into()),
            witness: None,
        }
    }
}

pub fn locus(id: &str) -> Option<&'static str> {
    REGISTRY.iter().find(|(c, _)| *c == id).map(|(_, l)| *l)
}

fn validate_filter(filter: &Option<Vec<String>>) -> Result<()> {
    if let Some(ids) = filter {
        if let Some(bad) = ids.iter().find(|id| locus(id).is_none()) {
            return Err(Error::Invalid(format!("unknown claim id {bad}")));
        }
    }
    Ok(())
}

pub fn run_verify(q: usize, n: usize, opts: &VerifyOptions) -> Result<VerificationReport> {
    validate_filter(&opts.claims)?;
    let g = LfGraph::for_order(q, n)?;
    let until = opts.budget.map(|b| Instant::now() + b);

    let run_one = |index: usize| -> ClaimResult {
        let (id, paper_locus) = REGISTRY[index];
        let selected = opts
            .claims
            .as_ref()
            .is_none_or(|c| c.iter().any(|x| x == id));
        let start = Instant::now();
        let outcome = if !selected {
            Outcome::skipped("not selected")
        } else {
            let ctx = claims::Context {
                g: &g,
                seed: opts.seed,
                stream: index as u64,
                deadline: Deadline::at(until),
                full: opts.full,
            };
            match claims::run(id, &ctx) {
                Ok(o) => o,
                Err(Error::Timeout) => Outcome::skipped("timeout"),
                Err(e @ Error::SizeGuard { .. }) => Outcome::skipped(e.to_string()),
                Err(e) => Outcome {
                    verdict: Verdict::PropertyFail,
                    witness: Some(Value::String(e.to_string())),
                    formula: None,
                    oracle: None,
                },
            }
        };
        ClaimResult {
            id,
            paper_locus,
            formula: outcome.formula,
            oracle: outcome.oracle,
            verdict: outcome.verdict,
            witness: outcome.witness,
            ms: opts.timings.then(|| start.elapsed().as_millis() as u64),
        }
    };

    #[cfg(feature = "parallel")]
    let results: Vec<ClaimResult> = {
        use rayon::prelude::*;
        (0..REGISTRY.len()).into_par_iter().map(run_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<ClaimResult> = (0..REGISTRY.len()).map(run_one).collect();

    Ok(VerificationReport {
        q,
        n,
        seed: opts.seed,
        claims: results,
    })
}

impl VerificationReport {
    /// No claim ended in a mismatch or a failed property.
    pub fn passed(&self) -> bool {
        !self.claims.iter().any(|c| c.verdict.is_failure())
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("q={} n={} seed={}\n", self.q, self.n, self.seed);
        let mut tally = [0usize; 4];
        for c in &self.claims {
            let mut line = format!("{:<14} {:<14}", c.id, c.verdict.label());
            if let Some(f) = &c.formula {
                let _ = write!(line, " formula={f}");
            }
            if let Some(o) = &c.oracle {
                let _ = write!(line, " oracle={o}");
            }
            if let Some(ms) = c.ms {
                let _ = write!(line, " {ms}ms");
            }
            out.push_str(line.trim_end());
            out.push('\n');
            if c.verdict.is_failure() {
                if let Some(w) = &c.witness {
                    let _ = writeln!(out, "  witness: {w}");
                }
            }
            tally[match c.verdict {
                Verdict::Match | Verdict::PropertyPass => 0,
                Verdict::Mismatch => 1,
                Verdict::PropertyFail => 2,
                Verdict::Skipped(_) => 3,
            }] += 1;
        }
        let _ = writeln!(
            out,
            "{} passed, {} mismatched, {} failed, {} skipped",
            tally[0], tally[1], tally[2], tally[3]
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_unique() {
        let ids: Vec<&str> = REGISTRY.iter().map(|(id, _)| *id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn every_claim_reported_once() {
        let opts = VerifyOptions {
            claims: Some(vec!["REG".into()]),
            ..Default::default()
        };
        let r = run_verify(2, 2, &opts).unwrap();
        assert_eq!(r.claims.len(), REGISTRY.len());
        assert_eq!(r.claim("REG").unwrap().verdict, Verdict::PropertyPass);
        assert_eq!(
            r.claim("CARD-N2").unwrap().verdict,
            Verdict::Skipped("not selected".into())
        );
        assert!(r.passed());
    }

    #[test]
    fn unknown_claims_rejected() {
        let opts = VerifyOptions {
            claims: Some(vec!["NOPE".into()]),
            ..Default::default()
        };
        assert!(run_verify(2, 2, &opts).is_err());
        assert!(run_verify(6, 2, &VerifyOptions::default()).is_err());
    }

    #[test]
    fn json_shape() {
        let opts = VerifyOptions {
            claims: Some(vec!["CARD-N2".into()]),
            ..Default::default()
        };
        let r = run_verify(2, 2, &opts).unwrap();
        let text = r.to_json();
        assert!(
            text.starts_with("{\n  \"q\": 2,\n  \"n\": 2,\n  \"seed\": "),
            "{text}"
        );
        let v: Value = serde_json::from_str(&text).unwrap();
        let c = &v["claims"][1];
        assert_eq!(c["id"], "CARD-N2");
        assert_eq!(c["formula"], "48");
        assert_eq!(c["oracle"], "48");
        assert_eq!(c["verdict"], "match");
        assert_eq!(c["ms"], Value::Null);
    }

    #[test]
    fn text_rendering() {
        let opts = VerifyOptions {
            claims: Some(vec!["DOM-WHOLE-STD".into()]),
            ..Default::default()
        };
        let r = run_verify(2, 2, &opts).unwrap();
        let t = r.render_text();
        assert!(
            t.contains("DOM-WHOLE-STD  mismatch       formula=6 oracle=3"),
            "{t}"
        );
        assert!(t.contains("witness:"));
        assert!(t.ends_with("0 passed, 1 mismatched, 0 failed, 13 skipped\n"));
    }
}
