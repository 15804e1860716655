use kestenlab::amenability::AmenabilityError;
use kestenlab::extension::ExtensionError;
use kestenlab::group::GroupError;
use kestenlab::potential::PotentialError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input, tagged with the config field it came from.
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    /// A cap or budget stopped the computation.
    #[error("{field}: budget exhausted: {message}")]
    Budget { field: String, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.to_string(),
        }
    }

    pub fn budget(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Budget {
            field: field.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Budget { .. } => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Prefixes the field path with the config file name.
    pub fn in_file(self, file: &str) -> Self {
        match self {
            CliError::Validation { field, message } => CliError::Validation {
                field: format!("{file}: {field}"),
                message,
            },
            CliError::Budget { field, message } => CliError::Budget {
                field: format!("{file}: {field}"),
                message,
            },
            other => other,
        }
    }
}

fn group_is_budget(e: &GroupError) -> bool {
    matches!(e, GroupError::BallTooLarge { .. })
}

fn potential_is_budget(e: &PotentialError) -> bool {
    matches!(e, PotentialError::NoConvergence { .. })
}

fn extension_is_budget(e: &ExtensionError) -> bool {
    match e {
        ExtensionError::StateCapExceeded { .. } | ExtensionError::TruncationDominates { .. } => true,
        ExtensionError::Group(g) => group_is_budget(g),
        ExtensionError::Potential(p) => potential_is_budget(p),
        _ => false,
    }
}

/// Maps a library error onto the exit-code classes.
pub trait Classify {
    fn at(self, field: &str) -> CliError;
}

impl Classify for GroupError {
    fn at(self, field: &str) -> CliError {
        if group_is_budget(&self) {
            CliError::budget(field, self)
        } else {
            CliError::validation(field, self)
        }
    }
}

impl Classify for PotentialError {
    fn at(self, field: &str) -> CliError {
        if potential_is_budget(&self) {
            CliError::budget(field, self)
        } else {
            CliError::validation(field, self)
        }
    }
}

impl Classify for ExtensionError {
    fn at(self, field: &str) -> CliError {
        if extension_is_budget(&self) {
            CliError::budget(field, self)
        } else {
            CliError::validation(field, self)
        }
    }
}

impl Classify for AmenabilityError {
    fn at(self, field: &str) -> CliError {
        let budget = match &self {
            AmenabilityError::StateCapExceeded { .. } | AmenabilityError::FolnerNotFound { .. } => true,
            AmenabilityError::Group(g) => group_is_budget(g),
            AmenabilityError::Extension(e) => extension_is_budget(e),
            _ => false,
        };
        if budget {
            CliError::budget(field, self)
        } else {
            CliError::validation(field, self)
        }
    }
}

impl Classify for kestenlab::ShiftError {
    fn at(self, field: &str) -> CliError {
        CliError::validation(field, self)
    }
}

/// `result.map_err(|e| e.at(field))`.
pub trait ResultExt<T> {
    fn at(self, field: &str) -> Result<T, CliError>;
}

impl<T, E: Classify> ResultExt<T> for Result<T, E> {
    fn at(self, field: &str) -> Result<T, CliError> {
        self.map_err(|e| e.at(field))
    }
}
