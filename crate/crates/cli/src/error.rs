use nforge_core::error::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },

    #[error("{location}: {source}")]
    Core {
        location: String,
        #[source]
        source: CoreError,
    },

    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { location: location.into(), message: message.into() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema { .. } => "SchemaError",
            CliError::Io { .. } => "IoError",
            CliError::Core { source, .. } => core_kind(source),
        }
    }

    pub fn location(&self) -> Option<&str> {
        match self {
            CliError::Schema { location, .. } | CliError::Core { location, .. } => Some(location),
            CliError::Io { .. } => None,
        }
    }
}

pub fn core_kind(e: &CoreError) -> &'static str {
    match e {
        CoreError::UndeclaredVariable(_) | CoreError::Syntax { .. } => "ParseError",
        CoreError::NotDivisible(_) => "NotDivisible",
        CoreError::DegreeBudgetExceeded(_) => "DegreeBudgetExceeded",
        CoreError::NotUnit(_) => "NotUnit",
        CoreError::NotWellDefined { .. } => "NotWellDefined",
        CoreError::ContextMismatch(_) => "ContextMismatch",
        CoreError::SystemNotInIdeal(_) => "SystemNotInIdeal",
        CoreError::CongruenceFails(_) => "CongruenceFails",
        CoreError::IdentityFails(_) => "IdentityFails",
        CoreError::SPrimeNotUnit(_) => "SPrimeNotUnit",
        CoreError::SDoublePrimeNotFound(_) => "SDoublePrimeNotFound",
        CoreError::CannotClear(_) => "CannotClear",
        CoreError::NilpotencyUncertified(_) => "NilpotencyUncertified",
        CoreError::ChainNotIncreasing { .. } => "ChainNotIncreasing",
        CoreError::Invalid(_) => "Invalid",
    }
}

/// Attaches a location to library errors.
pub trait Locate<T> {
    fn at(self, location: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Locate<T> for Result<T, CoreError> {
    fn at(self, location: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { location: location(), source })
    }
}
