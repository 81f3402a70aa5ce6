use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Security identifier in its canonical `S-R-I-...` text form.
///
/// Equality, ordering and hashing use the text only; the display name is
/// presentation metadata.
#[derive(Clone)]
pub struct Sid {
    text: Arc<str>,
    display_name: Option<Arc<str>>,
}

impl Sid {
    pub fn parse(text: &str) -> Result<Self> {
        if !is_valid_sid(text) {
            return Err(Error::InvalidSid(text.to_string()));
        }
        Ok(Sid {
            text: Arc::from(text),
            display_name: None,
        })
    }

    pub fn with_display_name(mut self, name: impl Into<String>) -> Self {
        self.display_name = Some(Arc::from(name.into()));
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn display_name(&self) -> Option<&str> {
        self.display_name.as_deref()
    }

    /// Display name when known, SID text otherwise.
    pub fn label(&self) -> &str {
        self.display_name().unwrap_or(&self.text)
    }
}

fn is_valid_sid(text: &str) -> bool {
    let Some(rest) = text.strip_prefix("S-") else {
        return false;
    };
    let parts: Vec<&str> = rest.split('-').collect();
    parts.len() >= 2
        && parts
            .iter()
            .all(|p| !p.is_empty() && p.len() <= 20 && p.bytes().all(|b| b.is_ascii_digit()))
}

impl PartialEq for Sid {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Sid {}

impl Hash for Sid {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}

impl PartialOrd for Sid {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sid {
    fn cmp(&self, other: &Self) -> Ordering {
        self.text.cmp(&other.text)
    }
}

impl fmt::Debug for Sid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.display_name {
            Some(name) => write!(f, "Sid({} {:?})", self.text, name),
            None => write!(f, "Sid({})", self.text),
        }
    }
}

impl fmt::Display for Sid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Sid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sid::parse(s)
    }
}

impl Serialize for Sid {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Sid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Sid::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrincipalKind {
    User,
    Group,
}

/// A user or group. Processes are modelled as users.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Principal {
    sid: Sid,
    kind: PrincipalKind,
}

impl Principal {
    pub fn new(sid: Sid, kind: PrincipalKind) -> Self {
        Principal { sid, kind }
    }

    pub fn user(sid: Sid) -> Self {
        Self::new(sid, PrincipalKind::User)
    }

    pub fn group(sid: Sid) -> Self {
        Self::new(sid, PrincipalKind::Group)
    }

    pub fn sid(&self) -> &Sid {
        &self.sid
    }

    pub fn kind(&self) -> PrincipalKind {
        self.kind
    }

    pub fn is_group(&self) -> bool {
        self.kind == PrincipalKind::Group
    }
}
