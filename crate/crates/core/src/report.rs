use serde::{Deserialize, Serialize};

/// One verified inequality: what was asserted, the bound, the measured value,
/// an optional witness, and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub assertion: String,
    #[serde(with = "real")]
    pub bound: f64,
    #[serde(with = "real")]
    pub measured: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    pub pass: bool,
    /// Soft checks are reported but do not fail a verification run.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub hard: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl CheckReport {
    pub fn new(assertion: impl Into<String>, bound: f64, measured: f64, pass: bool) -> Self {
        Self { assertion: assertion.into(), bound, measured, witness: None, pass, hard: true, note: None }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn soft(mut self) -> Self {
        self.hard = false;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Serde helpers writing non-finite reals as the strings `"inf"`, `"-inf"`
/// and `"nan"` (JSON has no literal for them).
pub mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a real: {other}"))),
            },
        }
    }
}

/// The first hard check that failed.
pub fn first_hard_failure(reports: &[CheckReport]) -> Option<&CheckReport> {
    reports.iter().find(|r| r.hard && !r.pass)
}

/// `assertion,bound,measured,witness,pass,hard` rows.
pub fn checks_csv(reports: &[CheckReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["assertion", "bound", "measured", "witness", "pass", "hard"]).expect("in-memory csv");
    for r in reports {
        w.write_record([
            r.assertion.clone(),
            r.bound.to_string(),
            r.measured.to_string(),
            r.witness.clone().unwrap_or_default(),
            r.pass.to_string(),
            r.hard.to_string(),
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}
