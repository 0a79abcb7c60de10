//! Uniform result record for every inequality check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Tag naming the estimate a report checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckKind {
    #[serde(rename = "eq_2_1")]
    Eq2_1,
    #[serde(rename = "eq_1_3")]
    Eq1_3,
    #[serde(rename = "eq_1_4")]
    Eq1_4,
    #[serde(rename = "eq_1_5")]
    Eq1_5,
    #[serde(rename = "lemma_2_4_i")]
    Lemma2_4I,
    #[serde(rename = "lemma_2_4_ii")]
    Lemma2_4Ii,
    #[serde(rename = "lemma_2_5")]
    Lemma2_5,
    #[serde(rename = "lemma_2_2")]
    Lemma2_2,
    #[serde(rename = "lemma_4_1")]
    Lemma4_1,
    #[serde(rename = "eq_3_5")]
    Eq3_5,
    #[serde(rename = "eq_2_3a")]
    Eq2_3a,
    #[serde(rename = "eq_r4_3")]
    EqR4_3,
    #[serde(rename = "eq_r5_12")]
    EqR5_12,
    #[serde(rename = "eq_r5_14")]
    EqR5_14,
    #[serde(rename = "uc_probe")]
    UcProbe,
}

impl CheckKind {
    pub fn tag(&self) -> &'static str {
        match self {
            CheckKind::Eq2_1 => "eq_2_1",
            CheckKind::Eq1_3 => "eq_1_3",
            CheckKind::Eq1_4 => "eq_1_4",
            CheckKind::Eq1_5 => "eq_1_5",
            CheckKind::Lemma2_4I => "lemma_2_4_i",
            CheckKind::Lemma2_4Ii => "lemma_2_4_ii",
            CheckKind::Lemma2_5 => "lemma_2_5",
            CheckKind::Lemma2_2 => "lemma_2_2",
            CheckKind::Lemma4_1 => "lemma_4_1",
            CheckKind::Eq3_5 => "eq_3_5",
            CheckKind::Eq2_3a => "eq_2_3a",
            CheckKind::EqR4_3 => "eq_r4_3",
            CheckKind::EqR5_12 => "eq_r5_12",
            CheckKind::EqR5_14 => "eq_r5_14",
            CheckKind::UcProbe => "uc_probe",
        }
    }
}

/// Empirical constants of a fitted inequality `lhs ≤ C·a^{1-β}·b^β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: f64,
}

/// One inequality check: left-hand side, named right-hand-side factors,
/// optional fitted constants, verdict, and an echo of the parameters used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs_factors: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted: Option<Fitted>,
    pub pass: bool,
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl EstimateReport {
    pub fn new(kind: CheckKind, lhs: f64, pass: bool) -> Self {
        Self {
            kind,
            lhs,
            rhs_factors: BTreeMap::new(),
            fitted: None,
            pass,
            meta: BTreeMap::new(),
        }
    }

    pub fn factor(mut self, name: &str, value: f64) -> Self {
        self.rhs_factors.insert(name.to_string(), value);
        self
    }

    pub fn fitted(mut self, c: f64, beta: f64) -> Self {
        self.fitted = Some(Fitted { c, beta });
        self
    }

    pub fn meta(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    /// Non-finite values are stored as strings so the JSON stays lossless.
    pub fn meta_f64(self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            self.meta(key, value)
        } else {
            self.meta(key, format!("{value}"))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = EstimateReport::new(CheckKind::Eq1_3, 1.5, true)
            .factor("a", 2.0)
            .fitted(0.5, 0.7)
            .meta("T", 0.5);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["kind"], "eq_1_3");
        assert_eq!(v["rhs_factors"]["a"], 2.0);
        assert_eq!(v["fitted"]["C"], 0.5);
        assert_eq!(v["fitted"]["beta"], 0.7);
        assert_eq!(v["pass"], true);
        assert_eq!(v["meta"]["T"], 0.5);
        let back: EstimateReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn fitted_omitted_when_absent() {
        let r = EstimateReport::new(CheckKind::Eq2_1, 0.0, true);
        assert!(!r.to_json().contains("fitted"));
    }

    #[test]
    fn tags_match_serde_names() {
        for k in [CheckKind::Eq2_1, CheckKind::Lemma2_4Ii, CheckKind::EqR5_14, CheckKind::Eq2_3a] {
            assert_eq!(serde_json::to_value(k).unwrap(), k.tag());
        }
    }
}
