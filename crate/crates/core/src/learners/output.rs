use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learners::{AssumptionReport, Identification, InfiniteOutcome, ReconstructedType};
use crate::model::{Transcript, TypeId};

/// Serialized learner result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerReport {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identified_type: Option<TypeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<ReconstructedType>,
    pub rounds: usize,
    pub transcript: Transcript,
    pub assumption_report: AssumptionReport,
}

impl LearnerReport {
    pub fn identified(algorithm: &str, id: &Identification, assumption_report: AssumptionReport) -> Self {
        LearnerReport {
            algorithm: algorithm.to_string(),
            identified_type: Some(id.type_id.clone()),
            reconstruction: None,
            rounds: id.transcript.round_count(),
            transcript: id.transcript.clone(),
            assumption_report,
        }
    }

    pub fn reconstructed(algorithm: &str, out: &InfiniteOutcome, assumption_report: AssumptionReport) -> Self {
        LearnerReport {
            algorithm: algorithm.to_string(),
            identified_type: None,
            reconstruction: Some(out.reconstruction.clone()),
            rounds: out.transcript.round_count(),
            transcript: out.transcript.clone(),
            assumption_report,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identified_report_keys() {
        let id = Identification {
            type_id: TypeId::from("t3"),
            transcript: Transcript::default(),
            survivors: vec![],
            count_steps: vec![],
        };
        let r = LearnerReport::identified("menu", &id, AssumptionReport::default());
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        let obj = v.as_object().unwrap();
        for key in [
            "algorithm",
            "identified_type",
            "rounds",
            "transcript",
            "assumption_report",
        ] {
            assert!(obj.contains_key(key), "{key}");
        }
        assert!(!obj.contains_key("reconstruction"));
        assert_eq!(LearnerReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    }
}
