use std::fmt;
use std::path::Path;

/// Process exit categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Dependency,
    Data,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Config => 2,
            Kind::Dependency => 3,
            Kind::Data => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    pub fn dependency(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Dependency,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Data,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<cityforge::Error> for CliError {
    fn from(e: cityforge::Error) -> Self {
        use cityforge::Error as E;
        let kind = match &e {
            E::Invalid(_) | E::Capacity { .. } => Kind::Config,
            E::Io(io) if io.kind() == std::io::ErrorKind::NotFound => Kind::Dependency,
            _ => Kind::Data,
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        cityforge::Error::Io(e).into()
    }
}

/// Fails with a dependency error naming `stage` when `path` is missing.
pub fn require(path: &Path, what: &str, stage: &str) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::dependency(format!(
            "missing {what} {}; run `cityforge {stage}` first",
            path.display()
        )))
    }
}
