use std::fmt;

use ibc_core::IbcError;

/// Input errors exit with status 2, numerical failures with status 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<IbcError> for CliError {
    fn from(e: IbcError) -> Self {
        match e {
            IbcError::ZeroCoupling | IbcError::InvalidParameter(_) | IbcError::InvalidGraph(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
