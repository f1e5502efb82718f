use std::fmt;

use galdef_core::brauer_recipe::RecipeError;
use galdef_core::cohomology::CohomologyError;
use galdef_core::congruence::CongruenceError;
use galdef_core::defring::DefringError;
use galdef_core::galois_modules::ModuleError;
use galdef_core::lifting::LiftError;
use galdef_core::obstruction_engine::EngineError;
use galdef_core::tame_group::GroupError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    InvalidParameters(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::InvalidParameters(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::InvalidParameters(m) => write!(f, "invalid parameters: {m}"),
        }
    }
}

fn invalid(e: impl ToString) -> CliError {
    let s = e.to_string();
    CliError::InvalidParameters(s.strip_prefix("invalid parameters: ").unwrap_or(&s).to_string())
}

macro_rules! invalid_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                invalid(e)
            }
        })*
    };
}

invalid_from!(RecipeError, CohomologyError, DefringError, ModuleError, LiftError, GroupError);

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Malformed(m) => CliError::Data(format!("malformed instance: {m}")),
            other => invalid(other),
        }
    }
}

impl From<CongruenceError> for CliError {
    fn from(e: CongruenceError) -> Self {
        match e {
            CongruenceError::Io { .. } | CongruenceError::Schema { .. } | CongruenceError::InsufficientCoefficients { .. } => {
                CliError::Data(e.to_string())
            }
            other => invalid(other),
        }
    }
}
