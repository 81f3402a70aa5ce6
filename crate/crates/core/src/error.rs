use thiserror::Error;

/// Errors raised by model construction and analysis queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid SID `{0}`")]
    InvalidSid(String),

    #[error("access mask {0:#010x} sets reserved bits 24-27")]
    ReservedBits(u32),

    #[error("access mask is empty")]
    EmptyMask,

    #[error("access mask {0:#010x} still carries generic bits")]
    NotNormalized(u32),

    #[error("invalid inheritance flags: {0}")]
    BadFlags(&'static str),

    #[error("unknown attribute code `{0}`")]
    UnknownCode(String),

    #[error("attribute code `{0}` appears more than once")]
    DuplicateCode(String),

    #[error("path not found: {0}")]
    PathNotFound(String),

    #[error("not a folder: {0}")]
    NotAFolder(String),

    #[error("duplicate child `{name}` under {parent}")]
    DuplicateChild { parent: String, name: String },

    #[error("invalid node name `{0}`")]
    InvalidName(String),

    #[error("unknown principal: {0}")]
    UnknownPrincipal(String),

    #[error("principal {0} is not a group")]
    NotAGroup(String),

    #[error("duplicate principal: {0}")]
    DuplicatePrincipal(String),

    #[error("self-membership edge on {0}")]
    SelfMembership(String),

    #[error("ACE for {principal} not present in the ACL at {path}")]
    AceNotPresent { path: String, principal: String },

    #[error("explicit ACE list may only contain explicit entries ({0})")]
    NotExplicit(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
