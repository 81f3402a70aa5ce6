use std::fmt;
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use super::Sid;
use crate::error::{Error, Result};
use crate::mask::AccessMask;

/// Inheritance flags carried by an ACE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct InheritFlags {
    container_inherit: bool,
    object_inherit: bool,
    no_propagate: bool,
    inherit_only: bool,
}

impl InheritFlags {
    pub const NONE: InheritFlags = InheritFlags::raw(false, false, false, false);
    pub const CI: InheritFlags = InheritFlags::raw(true, false, false, false);
    pub const OI: InheritFlags = InheritFlags::raw(false, true, false, false);
    pub const CI_OI: InheritFlags = InheritFlags::raw(true, true, false, false);

    pub const NAMES: [&'static str; 4] =
        ["container_inherit", "object_inherit", "no_propagate", "inherit_only"];

    const fn raw(ci: bool, oi: bool, np: bool, io: bool) -> Self {
        InheritFlags {
            container_inherit: ci,
            object_inherit: oi,
            no_propagate: np,
            inherit_only: io,
        }
    }

    pub fn new(
        container_inherit: bool,
        object_inherit: bool,
        no_propagate: bool,
        inherit_only: bool,
    ) -> Result<Self> {
        let inherits = container_inherit || object_inherit;
        if inherit_only && !inherits {
            return Err(Error::BadFlags("inherit_only requires container_inherit or object_inherit"));
        }
        if no_propagate && !inherits {
            return Err(Error::BadFlags("no_propagate requires container_inherit or object_inherit"));
        }
        Ok(Self::raw(container_inherit, object_inherit, no_propagate, inherit_only))
    }

    /// Every valid combination of the four flags.
    pub fn all_valid() -> impl Iterator<Item = InheritFlags> {
        (0u8..16).filter_map(|b| {
            InheritFlags::new(b & 1 != 0, b & 2 != 0, b & 4 != 0, b & 8 != 0).ok()
        })
    }

    pub fn from_names<'a, I: IntoIterator<Item = &'a str>>(names: I) -> Result<Self> {
        let mut f = [false; 4];
        for name in names {
            let idx = Self::NAMES
                .iter()
                .position(|n| *n == name)
                .ok_or(Error::BadFlags("unknown flag name"))?;
            if f[idx] {
                return Err(Error::BadFlags("repeated flag"));
            }
            f[idx] = true;
        }
        Self::new(f[0], f[1], f[2], f[3])
    }

    pub fn names(self) -> Vec<&'static str> {
        let set = [
            self.container_inherit,
            self.object_inherit,
            self.no_propagate,
            self.inherit_only,
        ];
        Self::NAMES
            .iter()
            .zip(set)
            .filter_map(|(n, on)| on.then_some(*n))
            .collect()
    }

    pub const fn container_inherit(self) -> bool {
        self.container_inherit
    }

    pub const fn object_inherit(self) -> bool {
        self.object_inherit
    }

    pub const fn no_propagate(self) -> bool {
        self.no_propagate
    }

    pub const fn inherit_only(self) -> bool {
        self.inherit_only
    }

    pub const fn is_inheritable(self) -> bool {
        self.container_inherit || self.object_inherit
    }
}

impl fmt::Display for InheritFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.names();
        if names.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AceKind {
    Deny,
    Allow,
}

impl AceKind {
    pub const fn as_str(self) -> &'static str {
        match self {
            AceKind::Allow => "allow",
            AceKind::Deny => "deny",
        }
    }
}

impl fmt::Display for AceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Explicit,
    /// Levels between the node holding the copy and the explicit source.
    Inherited(NonZeroU32),
}

impl Provenance {
    /// 0 for explicit entries.
    pub fn distance(self) -> u32 {
        match self {
            Provenance::Explicit => 0,
            Provenance::Inherited(d) => d.get(),
        }
    }

    pub fn is_explicit(self) -> bool {
        matches!(self, Provenance::Explicit)
    }

    pub fn inherited(distance: u32) -> Option<Self> {
        NonZeroU32::new(distance).map(Provenance::Inherited)
    }
}

/// Access control entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ace {
    principal: Sid,
    kind: AceKind,
    mask: AccessMask,
    flags: InheritFlags,
    provenance: Provenance,
}

impl Ace {
    pub fn explicit(principal: Sid, kind: AceKind, mask: AccessMask, flags: InheritFlags) -> Result<Self> {
        Self::new(principal, kind, mask, flags, Provenance::Explicit)
    }

    pub fn new(
        principal: Sid,
        kind: AceKind,
        mask: AccessMask,
        flags: InheritFlags,
        provenance: Provenance,
    ) -> Result<Self> {
        let mask = AccessMask::new(mask.bits())?;
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(Ace {
            principal,
            kind,
            mask,
            flags,
            provenance,
        })
    }

    pub fn allow(principal: Sid, mask: AccessMask, flags: InheritFlags) -> Result<Self> {
        Self::explicit(principal, AceKind::Allow, mask, flags)
    }

    pub fn deny(principal: Sid, mask: AccessMask, flags: InheritFlags) -> Result<Self> {
        Self::explicit(principal, AceKind::Deny, mask, flags)
    }

    /// Copy of this entry one level further from its explicit source.
    pub(crate) fn inherited_copy(&self, flags: InheritFlags) -> Ace {
        let distance = self.provenance.distance() + 1;
        Ace {
            principal: self.principal.clone(),
            kind: self.kind,
            mask: self.mask,
            flags,
            provenance: Provenance::inherited(distance).expect("distance >= 1"),
        }
    }

    pub fn principal(&self) -> &Sid {
        &self.principal
    }

    pub fn kind(&self) -> AceKind {
        self.kind
    }

    pub fn is_allow(&self) -> bool {
        self.kind == AceKind::Allow
    }

    pub fn is_deny(&self) -> bool {
        self.kind == AceKind::Deny
    }

    pub fn mask(&self) -> AccessMask {
        self.mask
    }

    pub fn flags(&self) -> InheritFlags {
        self.flags
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_explicit(&self) -> bool {
        self.provenance.is_explicit()
    }

    /// Sort key for canonical order: explicit before inherited, nearer before
    /// farther, deny before allow within a tier.
    pub fn precedence(&self) -> (u32, AceKind) {
        (self.provenance.distance(), self.kind)
    }

    /// Equality on everything but provenance.
    pub fn same_grant(&self, other: &Ace) -> bool {
        self.principal == other.principal
            && self.kind == other.kind
            && self.mask == other.mask
            && self.flags == other.flags
    }
}

/// An ACL in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Acl {
    entries: Vec<Ace>,
}

impl Acl {
    pub fn entries(&self) -> &[Ace] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ace> {
        self.entries.iter()
    }
}

impl<'a> IntoIterator for &'a Acl {
    type Item = &'a Ace;
    type IntoIter = std::slice::Iter<'a, Ace>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Stable sort into canonical order: explicit deny, explicit allow, then
/// inherited entries by ascending distance with deny before allow. Ties
/// within a tier break on principal, mask and flags, so the result does not
/// depend on input order.
pub fn canonicalize_acl(mut entries: Vec<Ace>) -> Acl {
    entries.sort_by(|a, b| {
        a.precedence()
            .cmp(&b.precedence())
            .then_with(|| a.principal.cmp(&b.principal))
            .then_with(|| a.mask.bits().cmp(&b.mask.bits()))
            .then_with(|| a.flags.cmp(&b.flags))
    });
    Acl { entries }
}

/// Elementwise comparison of two canonical ACLs ignoring provenance.
pub fn acl_equal(a: &Acl, b: &Acl) -> bool {
    a.entries.len() == b.entries.len()
        && a.entries.iter().zip(&b.entries).all(|(x, y)| x.same_grant(y))
}
