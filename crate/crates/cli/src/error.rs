use nlcore::bounds::BoundsError;
use nlcore::discform::DiscError;
use nlcore::eisenstein::EisensteinError;
use nlcore::lattice::LatticeError;
use nlcore::nlpic::NlpicError;
use nlcore::qexp::QExpError;
use nlcore::theta::ThetaError;
use serde::Serialize;

/// The error object printed on standard output before a nonzero exit.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub module: String,
    #[serde(skip)]
    pub exit: i32,
}

pub const BAD_INPUT: i32 = 2;
pub const COMPUTATION: i32 = 3;
pub const PRECONDITION: i32 = 4;

impl CliError {
    pub fn new(exit: i32, module: &str, code: &str, message: impl Into<String>) -> Self {
        CliError {
            code: code.into(),
            message: message.into(),
            module: module.into(),
            exit,
        }
    }

    pub fn bad_input(message: impl Into<String>) -> Self {
        Self::new(BAD_INPUT, "cli", "bad_input", message)
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        use LatticeError::*;
        let (exit, code) = match &e {
            UnknownName(_) | BadDescription(_) | NotSymmetric | OddDiagonal | BadRank1(_) => (BAD_INPUT, "bad_lattice"),
            DegenerateLattice | NotDefinite | NotPrimitive => (PRECONDITION, "precondition"),
            NoVectorFound(_) => (PRECONDITION, "no_vector_found"),
            EnumerationBudgetExceeded { .. } => (COMPUTATION, "enumeration_budget_exceeded"),
            Overflow => (COMPUTATION, "overflow"),
        };
        Self::new(exit, "lattice", code, e.to_string())
    }
}

impl From<DiscError> for CliError {
    fn from(e: DiscError) -> Self {
        match e {
            DiscError::Lattice(l) => l.into(),
            DiscError::BadElement(_) => Self::new(BAD_INPUT, "discform", "bad_element", e.to_string()),
            other => Self::new(COMPUTATION, "discform", "discform", other.to_string()),
        }
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        match e {
            ThetaError::Lattice(l) => l.into(),
            ThetaError::Disc(d) => d.into(),
            ThetaError::IndefiniteLattice => Self::new(PRECONDITION, "theta", "indefinite_lattice", e.to_string()),
        }
    }
}

impl From<QExpError> for CliError {
    fn from(e: QExpError) -> Self {
        let exit = match e {
            QExpError::Unsupported { .. } | QExpError::Malformed(_) => BAD_INPUT,
            _ => COMPUTATION,
        };
        Self::new(exit, "qexp", "qexp", e.to_string())
    }
}

impl From<EisensteinError> for CliError {
    fn from(e: EisensteinError) -> Self {
        use EisensteinError::*;
        match e {
            Lattice(l) => l.into(),
            Disc(d) => d.into(),
            PreconditionFailed(_) => Self::new(PRECONDITION, "eisenstein", "precondition", e.to_string()),
            other => Self::new(COMPUTATION, "eisenstein", "eisenstein", other.to_string()),
        }
    }
}

impl From<NlpicError> for CliError {
    fn from(e: NlpicError) -> Self {
        use NlpicError::*;
        match e {
            Lattice(l) => l.into(),
            Disc(d) => d.into(),
            Theta(t) => t.into(),
            Eisenstein(x) => x.into(),
            QExp(q) => q.into(),
            UnsupportedIndex { .. } => Self::new(BAD_INPUT, "nlpic", "unsupported_index", e.to_string()),
            HypothesisNotSatisfied(_) | WeightMismatch { .. } | NoPartner(_) | NoCompatibleGenerator => {
                Self::new(PRECONDITION, "nlpic", "hypothesis_not_satisfied", e.to_string())
            }
            other => Self::new(COMPUTATION, "nlpic", "nlpic", other.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        use BoundsError::*;
        match e {
            Disc(d) => d.into(),
            EnumerationBudgetExceeded { .. } => Self::new(COMPUTATION, "bounds", "enumeration_budget_exceeded", e.to_string()),
            MissingSlopeEntry(_) | FixedSlope => Self::new(BAD_INPUT, "bounds", "slope_table", e.to_string()),
            other => Self::new(PRECONDITION, "bounds", "precondition", other.to_string()),
        }
    }
}
