use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Benchmark family an example, template or episode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Domain {
    Teach,
    Alfred,
    Dialfred,
    Tidy,
}

impl Domain {
    pub const ALL: [Domain; 4] = [Domain::Teach, Domain::Alfred, Domain::Dialfred, Domain::Tidy];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Teach => "TEACH",
            Domain::Alfred => "ALFRED",
            Domain::Dialfred => "DIALFRED",
            Domain::Tidy => "TIDY",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "TEACH" => Ok(Domain::Teach),
            "ALFRED" => Ok(Domain::Alfred),
            "DIALFRED" => Ok(Domain::Dialfred),
            "TIDY" => Ok(Domain::Tidy),
            other => Err(format!("unknown domain `{other}`")),
        }
    }
}
