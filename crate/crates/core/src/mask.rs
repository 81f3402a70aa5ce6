//! Access-mask bit layout and the human-facing views of it.
//!
//! The 32-bit mask is split into object-specific rights (bits 0-15), standard
//! rights (16-22), the SACL access bit (23), a reserved nibble (24-27) and the
//! four generic bits (28-31). Fourteen fine-grained attributes live in the low
//! 21 bits; everything a user sees (coarse levels, hyphenated code strings) is
//! derived from that attribute set.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::InheritFlags;

/// One of the fourteen fine-grained permission attributes.
///
/// Declaration order is the fixed table order used for compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PermissionAttribute {
    ReadData,
    WriteData,
    AppendData,
    ReadExtendedAttributes,
    WriteExtendedAttributes,
    Execute,
    DeleteChild,
    ReadAttributes,
    WriteAttributes,
    Delete,
    ReadPermissions,
    ChangePermissions,
    TakeOwnership,
    Synchronize,
}

impl PermissionAttribute {
    pub const ALL: [PermissionAttribute; 14] = [
        Self::ReadData,
        Self::WriteData,
        Self::AppendData,
        Self::ReadExtendedAttributes,
        Self::WriteExtendedAttributes,
        Self::Execute,
        Self::DeleteChild,
        Self::ReadAttributes,
        Self::WriteAttributes,
        Self::Delete,
        Self::ReadPermissions,
        Self::ChangePermissions,
        Self::TakeOwnership,
        Self::Synchronize,
    ];

    /// Bit position inside the access mask.
    pub const fn bit(self) -> u32 {
        match self {
            Self::ReadData => 0,
            Self::WriteData => 1,
            Self::AppendData => 2,
            Self::ReadExtendedAttributes => 3,
            Self::WriteExtendedAttributes => 4,
            Self::Execute => 5,
            Self::DeleteChild => 6,
            Self::ReadAttributes => 7,
            Self::WriteAttributes => 8,
            Self::Delete => 16,
            Self::ReadPermissions => 17,
            Self::ChangePermissions => 18,
            Self::TakeOwnership => 19,
            Self::Synchronize => 20,
        }
    }

    pub const fn flag(self) -> u32 {
        1 << self.bit()
    }

    /// Short code used in compressed special-permission strings.
    pub const fn code(self) -> &'static str {
        match self {
            Self::ReadData => "R",
            Self::WriteData => "W",
            Self::AppendData => "Ad",
            Self::ReadExtendedAttributes => "Re",
            Self::WriteExtendedAttributes => "We",
            Self::Execute => "X",
            Self::DeleteChild => "Dc",
            Self::ReadAttributes => "Ra",
            Self::WriteAttributes => "Wa",
            Self::Delete => "D",
            Self::ReadPermissions => "Rp",
            Self::ChangePermissions => "Cp",
            Self::TakeOwnership => "To",
            Self::Synchronize => "Sy",
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::ReadData => "ReadData",
            Self::WriteData => "WriteData",
            Self::AppendData => "AppendData",
            Self::ReadExtendedAttributes => "ReadExtendedAttributes",
            Self::WriteExtendedAttributes => "WriteExtendedAttributes",
            Self::Execute => "Execute",
            Self::DeleteChild => "DeleteChild",
            Self::ReadAttributes => "ReadAttributes",
            Self::WriteAttributes => "WriteAttributes",
            Self::Delete => "Delete",
            Self::ReadPermissions => "ReadPermissions",
            Self::ChangePermissions => "ChangePermissions",
            Self::TakeOwnership => "TakeOwnership",
            Self::Synchronize => "Synchronize",
        }
    }

    /// Human-readable label, as shown in the code key.
    pub const fn label(self) -> &'static str {
        match self {
            Self::ReadData => "Read data / list folder",
            Self::WriteData => "Write data / create files",
            Self::AppendData => "Append data / create folders",
            Self::ReadExtendedAttributes => "Read extended attributes",
            Self::WriteExtendedAttributes => "Write extended attributes",
            Self::Execute => "Execute / traverse folder",
            Self::DeleteChild => "Delete subfolders and files",
            Self::ReadAttributes => "Read attributes",
            Self::WriteAttributes => "Write attributes",
            Self::Delete => "Delete",
            Self::ReadPermissions => "Read permissions",
            Self::ChangePermissions => "Change permissions",
            Self::TakeOwnership => "Take ownership",
            Self::Synchronize => "Synchronize",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.code() == code)
    }
}

impl fmt::Display for PermissionAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// 32-bit NTFS access mask. Reserved bits 24-27 are never set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AccessMask(u32);

impl AccessMask {
    pub const RESERVED: u32 = 0x0F00_0000;
    pub const ACCESS_SYSTEM_SECURITY: u32 = 1 << 23;
    pub const GENERIC_ALL: u32 = 1 << 28;
    pub const GENERIC_EXECUTE: u32 = 1 << 29;
    pub const GENERIC_WRITE: u32 = 1 << 30;
    pub const GENERIC_READ: u32 = 1 << 31;
    pub const GENERIC_BITS: u32 = 0xF000_0000;
    /// Union of the fourteen attribute bits.
    pub const ATTRIBUTE_BITS: u32 = 0x001F_01FF;

    pub const EMPTY: AccessMask = AccessMask(0);

    pub fn new(bits: u32) -> Result<Self> {
        if bits & Self::RESERVED != 0 {
            return Err(Error::ReservedBits(bits));
        }
        Ok(AccessMask(bits))
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_normalized(self) -> bool {
        self.0 & Self::GENERIC_BITS == 0
    }

    pub const fn contains(self, attr: PermissionAttribute) -> bool {
        self.0 & attr.flag() != 0
    }

    /// Attribute bits only; drops bit 23 and anything generic.
    pub const fn attribute_bits(self) -> u32 {
        self.0 & Self::ATTRIBUTE_BITS
    }

    pub const fn union(self, other: AccessMask) -> AccessMask {
        AccessMask(self.0 | other.0)
    }

    pub const fn intersection(self, other: AccessMask) -> AccessMask {
        AccessMask(self.0 & other.0)
    }

    pub const fn difference(self, other: AccessMask) -> AccessMask {
        AccessMask(self.0 & !other.0)
    }

    pub fn attributes(self) -> impl Iterator<Item = PermissionAttribute> {
        PermissionAttribute::ALL
            .into_iter()
            .filter(move |a| self.contains(*a))
    }

    pub fn hex(self) -> String {
        format!("{:#010x}", self.0)
    }
}

impl fmt::Display for AccessMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#010x}", self.0)
    }
}

impl FromIterator<PermissionAttribute> for AccessMask {
    fn from_iter<I: IntoIterator<Item = PermissionAttribute>>(iter: I) -> Self {
        AccessMask(iter.into_iter().fold(0, |acc, a| acc | a.flag()))
    }
}

const fn bits_of(attrs: &[PermissionAttribute]) -> u32 {
    let mut acc = 0;
    let mut i = 0;
    while i < attrs.len() {
        acc |= attrs[i].flag();
        i += 1;
    }
    acc
}

use PermissionAttribute as A;

const EXPAND_READ: u32 = bits_of(&[
    A::ReadData,
    A::ReadExtendedAttributes,
    A::ReadAttributes,
    A::ReadPermissions,
    A::Synchronize,
]);
const EXPAND_WRITE: u32 = bits_of(&[
    A::WriteData,
    A::AppendData,
    A::WriteExtendedAttributes,
    A::WriteAttributes,
    A::Delete,
    A::ReadPermissions,
    A::Synchronize,
]);
const EXPAND_EXECUTE: u32 = bits_of(&[
    A::Execute,
    A::ReadAttributes,
    A::ReadPermissions,
    A::Synchronize,
]);
const EXPAND_ALL: u32 = AccessMask::ATTRIBUTE_BITS;

/// Attribute expansion of one generic bit (28-31).
pub fn generic_expansion(generic_bit: u32) -> Option<AccessMask> {
    let bits = match generic_bit {
        AccessMask::GENERIC_READ => EXPAND_READ,
        AccessMask::GENERIC_WRITE => EXPAND_WRITE,
        AccessMask::GENERIC_EXECUTE => EXPAND_EXECUTE,
        AccessMask::GENERIC_ALL => EXPAND_ALL,
        _ => return None,
    };
    Some(AccessMask(bits))
}

/// Replace generic bits 28-31 by their attribute expansions.
pub fn normalize_generic(mask: AccessMask) -> AccessMask {
    let bits = mask.bits();
    if bits & AccessMask::GENERIC_BITS == 0 {
        return mask;
    }
    let mut out = bits & !AccessMask::GENERIC_BITS;
    for (generic, expansion) in [
        (AccessMask::GENERIC_READ, EXPAND_READ),
        (AccessMask::GENERIC_WRITE, EXPAND_WRITE),
        (AccessMask::GENERIC_EXECUTE, EXPAND_EXECUTE),
        (AccessMask::GENERIC_ALL, EXPAND_ALL),
    ] {
        if bits & generic != 0 {
            out |= expansion;
        }
    }
    AccessMask(out)
}

/// Attributes set in a normalized mask.
pub fn attributes_of(mask: AccessMask) -> Result<BTreeSet<PermissionAttribute>> {
    if !mask.is_normalized() {
        return Err(Error::NotNormalized(mask.bits()));
    }
    Ok(mask.attributes().collect())
}

pub fn mask_of<'a, I>(attrs: I) -> AccessMask
where
    I: IntoIterator<Item = &'a PermissionAttribute>,
{
    attrs.into_iter().copied().collect()
}

/// The six standard coarse-grained levels plus `Special`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoarseLevel {
    Read,
    Write,
    ListFolderContents,
    ReadAndExecute,
    Modify,
    FullControl,
    Special,
}

impl CoarseLevel {
    pub const STANDARD: [CoarseLevel; 6] = [
        Self::Read,
        Self::Write,
        Self::ListFolderContents,
        Self::ReadAndExecute,
        Self::Modify,
        Self::FullControl,
    ];

    pub const fn canonical_mask(self) -> Option<AccessMask> {
        let bits = match self {
            Self::Read => EXPAND_READ,
            Self::Write => EXPAND_WRITE,
            Self::ListFolderContents | Self::ReadAndExecute => EXPAND_READ | EXPAND_EXECUTE,
            Self::Modify => EXPAND_READ | EXPAND_EXECUTE | EXPAND_WRITE | A::Delete.flag(),
            Self::FullControl => EXPAND_ALL,
            Self::Special => return None,
        };
        Some(AccessMask(bits))
    }

    /// Generic bits each standard level is built from.
    pub const fn generic_bits(self) -> Option<u32> {
        let bits = match self {
            Self::Read => AccessMask::GENERIC_READ,
            Self::Write => AccessMask::GENERIC_WRITE,
            Self::ListFolderContents | Self::ReadAndExecute => {
                AccessMask::GENERIC_READ | AccessMask::GENERIC_EXECUTE
            }
            Self::Modify => {
                AccessMask::GENERIC_READ | AccessMask::GENERIC_EXECUTE | AccessMask::GENERIC_WRITE
            }
            Self::FullControl => AccessMask::GENERIC_ALL,
            Self::Special => return None,
        };
        Some(bits)
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::Read => "Read",
            Self::Write => "Write",
            Self::ListFolderContents => "ListFolderContents",
            Self::ReadAndExecute => "ReadAndExecute",
            Self::Modify => "Modify",
            Self::FullControl => "FullControl",
            Self::Special => "Special",
        }
    }

    /// Accepts the canonical names plus the spelled-out forms used in the
    /// Windows security dialog ("Full control", "Read & execute", ...).
    pub fn from_name(name: &str) -> Option<Self> {
        let folded: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let level = match folded.as_str() {
            "read" => Self::Read,
            "write" => Self::Write,
            "listfoldercontents" => Self::ListFolderContents,
            "readandexecute" | "readexecute" => Self::ReadAndExecute,
            "modify" => Self::Modify,
            "fullcontrol" => Self::FullControl,
            _ => return None,
        };
        Some(level)
    }
}

impl fmt::Display for CoarseLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classify a normalized mask against the standard levels.
///
/// Read-and-execute and list-folder-contents share a mask; the latter is the
/// folders-only variant (container inherit without object inherit).
pub fn classify_coarse(mask: AccessMask, flags: InheritFlags) -> CoarseLevel {
    let attrs = normalize_generic(mask).attribute_bits();
    let rx = EXPAND_READ | EXPAND_EXECUTE;
    if attrs == rx {
        return if flags.container_inherit() && !flags.object_inherit() {
            CoarseLevel::ListFolderContents
        } else {
            CoarseLevel::ReadAndExecute
        };
    }
    [
        CoarseLevel::Read,
        CoarseLevel::Write,
        CoarseLevel::Modify,
        CoarseLevel::FullControl,
    ]
    .into_iter()
    .find(|level| level.canonical_mask().map(AccessMask::bits) == Some(attrs))
    .unwrap_or(CoarseLevel::Special)
}

/// Render the attribute set as hyphen-joined codes in table order.
pub fn compress_special(mask: AccessMask) -> Result<String> {
    if !mask.is_normalized() {
        return Err(Error::NotNormalized(mask.bits()));
    }
    let codes: Vec<&str> = mask.attributes().map(PermissionAttribute::code).collect();
    if codes.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(codes.join("-"))
}

/// Inverse of [`compress_special`]. Token order is not significant.
pub fn parse_compressed(s: &str) -> Result<AccessMask> {
    let mut bits = 0u32;
    for token in s.split('-') {
        let token = token.trim();
        let attr = PermissionAttribute::from_code(token)
            .ok_or_else(|| Error::UnknownCode(token.to_string()))?;
        if bits & attr.flag() != 0 {
            return Err(Error::DuplicateCode(token.to_string()));
        }
        bits |= attr.flag();
    }
    Ok(AccessMask(bits))
}

/// Level name for standard masks, the compressed code string otherwise.
/// Masks with no attributes render as `none`.
pub fn render_mask(mask: AccessMask, flags: InheritFlags) -> (CoarseLevel, String) {
    let mask = normalize_generic(mask);
    match classify_coarse(mask, flags) {
        CoarseLevel::Special => {
            let rendered = compress_special(AccessMask(mask.attribute_bits()))
                .unwrap_or_else(|_| "none".to_string());
            (CoarseLevel::Special, rendered)
        }
        level => (level, level.name().to_string()),
    }
}
