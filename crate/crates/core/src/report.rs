use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of a verification run.
///
/// `max_defect` is the worst violation seen over all trials; the report passes
/// when it does not exceed `tol`. Suites whose failure is the expected outcome
/// (the direct-sum composite under the local observability audit) set
/// `expected_failure` and count as passing when `pass` is false.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub expected_failure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl VerificationReport {
    pub fn from_defect(
        suite: impl Into<String>,
        seed: u64,
        trials: usize,
        max_defect: f64,
        tol: f64,
    ) -> Self {
        VerificationReport {
            suite: suite.into(),
            seed,
            trials,
            max_defect,
            tol,
            // NaN never passes
            pass: max_defect <= tol,
            expected_failure: false,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expected_failure = true;
        self
    }

    /// True when the outcome matches expectation.
    pub fn as_expected(&self) -> bool {
        self.pass != self.expected_failure
    }

    /// Folds sub-reports into one: worst defect, pass only if every part is as expected.
    pub fn aggregate(
        suite: impl Into<String>,
        seed: u64,
        tol: f64,
        parts: Vec<VerificationReport>,
    ) -> Self {
        let trials = parts.iter().map(|p| p.trials).sum();
        let max_defect = parts
            .iter()
            .filter(|p| !p.expected_failure)
            .map(|p| p.max_defect)
            .fold(0.0, f64::max);
        let pass = parts.iter().all(VerificationReport::as_expected);
        let witness = serde_json::to_value(&parts).ok();
        VerificationReport {
            suite: suite.into(),
            seed,
            trials,
            max_defect,
            tol,
            pass,
            expected_failure: false,
            witness,
        }
    }
}

/// Running worst-case tracker; `NaN` defects poison the result.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worst(pub f64);

impl Worst {
    pub fn push(&mut self, defect: f64) {
        if defect.is_nan() || defect > self.0 {
            self.0 = if self.0.is_nan() { self.0 } else { defect };
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Order-independent max reduction used by parallel trial loops.
pub fn max_defect(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_fields() {
        let r = VerificationReport::from_defect("x", 3, 10, 1e-12, 1e-8);
        let v = serde_json::to_value(&r).unwrap();
        for key in ["suite", "seed", "trials", "max_defect", "tol", "pass"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v.get("witness").is_none());
        assert_eq!(v["pass"], Value::Bool(true));
    }

    #[test]
    fn nan_fails() {
        let r = VerificationReport::from_defect("x", 0, 1, f64::NAN, 1.0);
        assert!(!r.pass);
        let mut w = Worst::default();
        w.push(1.0);
        w.push(f64::NAN);
        w.push(2.0);
        assert!(w.value().is_nan());
    }

    #[test]
    fn aggregate_respects_expected_failures() {
        let ok = VerificationReport::from_defect("a", 0, 1, 0.0, 1e-8);
        let xf = VerificationReport::from_defect("b", 0, 1, 1.0, 1e-8).expecting_failure();
        let agg = VerificationReport::aggregate("all", 0, 1e-8, vec![ok.clone(), xf]);
        assert!(agg.pass);
        assert_eq!(agg.max_defect, 0.0);
        let bad = VerificationReport::from_defect("c", 0, 1, 1.0, 1e-8);
        assert!(!VerificationReport::aggregate("all", 0, 1e-8, vec![ok, bad]).pass);
    }
}
