//! Error classification into exit codes, reported as JSON on stderr.

use ompath::bvp::BvpError;
use ompath::expr::{EvalError, ParseError};
use ompath::io::CsvError;
use ompath::levy::LevyError;
use ompath::mcsim::SimError;
use ompath::om::{OmError, PathError};
use ompath::oracle::OracleError;
use ompath::varmin::{CompareError, VarminError};
use serde_json::{json, Value};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub details: Value,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, kind: "config", message: message.into(), details: Value::Null }
    }

    pub fn numerical(kind: &'static str, message: impl Into<String>) -> Self {
        Failure { code: EXIT_NUMERICAL, kind, message: message.into(), details: Value::Null }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": self.kind,
                "message": self.message,
                "exit_code": self.code,
                "details": self.details,
            }
        })
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::config(format!("drift expression: {e}")).with_details(json!({ "offset": e.offset() }))
    }
}

impl From<OmError> for Failure {
    fn from(e: OmError) -> Self {
        Failure::config(e.to_string())
    }
}

impl From<LevyError> for Failure {
    fn from(e: LevyError) -> Self {
        Failure::config(e.to_string())
    }
}

impl From<PathError> for Failure {
    fn from(e: PathError) -> Self {
        Failure::config(e.to_string())
    }
}

impl From<CsvError> for Failure {
    fn from(e: CsvError) -> Self {
        Failure::config(format!("path CSV: {e}"))
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::numerical("domain", e.to_string()).with_details(json!({ "z": e.z, "argument": e.arg }))
    }
}

impl From<BvpError> for Failure {
    fn from(e: BvpError) -> Self {
        match e {
            BvpError::NoRootInBracket { lo, hi } => Failure {
                code: EXIT_NO_SOLUTION,
                kind: "no-root-in-bracket",
                message: e.to_string(),
                details: json!({ "bracket": [lo, hi] }),
            },
            BvpError::AllShotsDivergent { lo, hi } => Failure {
                code: EXIT_NO_SOLUTION,
                kind: "all-shots-divergent",
                message: e.to_string(),
                details: json!({ "bracket": [lo, hi] }),
            },
            BvpError::Invalid(m) => Failure::config(m),
            BvpError::Lagrangian(e) => e.into(),
            other => Failure::numerical("integration", other.to_string()),
        }
    }
}

impl From<VarminError> for Failure {
    fn from(e: VarminError) -> Self {
        match e {
            VarminError::Config(m) => Failure::config(m),
            VarminError::Domain(e) => e.into(),
            VarminError::Path(e) => e.into(),
        }
    }
}

impl From<CompareError> for Failure {
    fn from(e: CompareError) -> Self {
        match e {
            CompareError::Shoot(e) => e.into(),
            CompareError::Minimize(e) => e.into(),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Spec(m) => Failure::config(m),
            SimError::Levy(e) => e.into(),
            SimError::Path(e) => e.into(),
            SimError::Lagrangian(e) => e.into(),
            SimError::Domain(z) => Failure::numerical("domain", e.to_string()).with_details(json!({ "z": z })),
            SimError::Divergence(step) => {
                Failure::numerical("divergence", e.to_string()).with_details(json!({ "step": step }))
            }
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Horizon(_) | OracleError::TooFewIntervals(_) => Failure::config(e.to_string()),
            OracleError::Domain(e) => e.into(),
            OracleError::Path(e) => e.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::numerical("io", e.to_string())
    }
}
