use gwt_core::GwtError;
use serde_json::json;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("syntax error at {position}: expected {}", expected.join(" | "))]
    Syntax { position: usize, expected: Vec<String> },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown ordering `{0}`")]
    UnknownOrdering(String),
    #[error("bracket kind does not match operand statistics: {0}")]
    StatisticsMismatch(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Gwt(#[from] GwtError),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "SyntaxError",
            CliError::UnknownSymbol(_) => "UnknownSymbol",
            CliError::UnknownOrdering(_) => "UnknownOrdering",
            CliError::StatisticsMismatch(_) => "StatisticsMismatch",
            CliError::Config(_) => "ConfigError",
            CliError::Io(_) => "IoError",
            CliError::Gwt(e) => gwt_kind(e),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Syntax { position, expected } = self {
            body["position"] = json!(position);
            body["expected"] = json!(expected);
        }
        json!({ "error": body })
    }
}

fn gwt_kind(e: &GwtError) -> &'static str {
    match e {
        GwtError::UnassignedSymbol(_) => "UnassignedSymbol",
        GwtError::MissingEntry(..) => "MissingEntry",
        GwtError::RegistryMismatch => "RegistryMismatch",
        GwtError::UnknownSymbol(_) => "UnknownSymbol",
        GwtError::InvalidTable(_) => "InvalidTable",
        GwtError::IncomparableKeys { .. } => "IncomparableKeys",
        GwtError::SymmetricOnFermions(_) => "SymmetricOnFermions",
        GwtError::SymbolNotInBasis(_) => "SymbolNotInBasis",
        GwtError::NotCNumber(..) => "NotCNumber",
        GwtError::NotPermutationOrdering => "NotPermutationOrdering",
        GwtError::NotApplicable(_) => "NotApplicable",
        GwtError::RelationViolated(_) => "RelationViolated",
        GwtError::FamilyAxiomViolated(..) => "FamilyAxiomViolated",
        GwtError::FlavorMismatch(_) => "FlavorMismatch",
        GwtError::ContractionMismatch => "ContractionMismatch",
        GwtError::NotUnivariate(_) => "NotUnivariate",
        GwtError::IndexOutOfRange { .. } => "IndexOutOfRange",
        GwtError::NotSymmetric => "NotSymmetric",
        GwtError::NotDefinite => "NotDefinite",
        GwtError::ResultNotDefinite => "ResultNotDefinite",
        GwtError::Singular => "Singular",
        GwtError::TruncationTooSmall { .. } => "TruncationTooSmall",
        GwtError::NegativeParameter(_) => "NegativeParameter",
        GwtError::UnmappedSymbol(_) => "UnmappedSymbol",
        GwtError::DimensionTooLarge(_) => "DimensionTooLarge",
        GwtError::DimensionMismatch(..) => "DimensionMismatch",
        GwtError::Unsupported(_) => "Unsupported",
    }
}
