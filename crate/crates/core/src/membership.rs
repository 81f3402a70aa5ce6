//! Transitive group membership in both directions.
//!
//! Cycles are tolerated: every closure is a plain visited-set search, so it
//! terminates after touching each principal at most once.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Principal, PrincipalKind, Sid};

#[derive(Debug, Clone, Default)]
pub struct GroupGraph {
    principals: BTreeMap<Sid, Principal>,
    /// member -> groups it belongs to directly
    member_of: BTreeMap<Sid, BTreeSet<Sid>>,
    /// group -> direct members
    members: BTreeMap<Sid, BTreeSet<Sid>>,
}

impl GroupGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_principal(&mut self, principal: Principal) -> Result<()> {
        let sid = principal.sid().clone();
        if self.principals.contains_key(&sid) {
            return Err(Error::DuplicatePrincipal(sid.to_string()));
        }
        self.principals.insert(sid, principal);
        Ok(())
    }

    pub fn add_membership(&mut self, member: &Sid, group: &Sid) -> Result<()> {
        let member = self.require(member)?.sid().clone();
        let group_principal = self.require(group)?;
        if !group_principal.is_group() {
            return Err(Error::NotAGroup(group.to_string()));
        }
        let group = group_principal.sid().clone();
        if member == group {
            return Err(Error::SelfMembership(member.to_string()));
        }
        self.member_of.entry(member.clone()).or_default().insert(group.clone());
        self.members.entry(group).or_default().insert(member);
        Ok(())
    }

    pub fn principal(&self, sid: &Sid) -> Option<&Principal> {
        self.principals.get(sid)
    }

    pub fn principals(&self) -> impl Iterator<Item = &Principal> {
        self.principals.values()
    }

    pub fn contains(&self, sid: &Sid) -> bool {
        self.principals.contains_key(sid)
    }

    pub fn edge_count(&self) -> usize {
        self.member_of.values().map(BTreeSet::len).sum()
    }

    /// `(member, group)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (&Sid, &Sid)> {
        self.member_of
            .iter()
            .flat_map(|(m, groups)| groups.iter().map(move |g| (m, g)))
    }

    /// The registered SID, carrying its display name.
    pub fn named<'a>(&'a self, sid: &'a Sid) -> &'a Sid {
        self.principals.get(sid).map(Principal::sid).unwrap_or(sid)
    }

    fn require(&self, sid: &Sid) -> Result<&Principal> {
        self.principals
            .get(sid)
            .ok_or_else(|| Error::UnknownPrincipal(sid.to_string()))
    }

    /// Every group reachable by following member -> group edges.
    pub fn member_of_closure(&self, sid: &Sid) -> Result<BTreeSet<Sid>> {
        self.require(sid)?;
        Ok(reach(&self.member_of, sid))
    }

    /// Every principal reachable by following group -> member edges.
    pub fn members_closure(&self, sid: &Sid) -> Result<BTreeSet<Sid>> {
        if !self.require(sid)?.is_group() {
            return Err(Error::NotAGroup(sid.to_string()));
        }
        Ok(reach(&self.members, sid))
    }

    /// `sid` plus every group it belongs to, directly or transitively.
    pub fn applicable_sids(&self, sid: &Sid) -> Result<BTreeSet<Sid>> {
        let mut set = self.member_of_closure(sid)?;
        set.insert(self.require(sid)?.sid().clone());
        Ok(set)
    }

    /// Shortest member -> group chain from `from` to `to`, both ends included.
    pub fn membership_chain(&self, from: &Sid, to: &Sid) -> Option<Vec<Sid>> {
        if from == to {
            return Some(vec![from.clone()]);
        }
        let mut prev: BTreeMap<&Sid, &Sid> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        while let Some(current) = queue.pop_front() {
            for next in self.member_of.get(current).into_iter().flatten() {
                if next == from || prev.contains_key(next) {
                    continue;
                }
                prev.insert(next, current);
                if next == to {
                    let mut chain = vec![next.clone()];
                    let mut at = next;
                    while let Some(p) = prev.get(at) {
                        chain.push((*p).clone());
                        at = p;
                    }
                    chain.reverse();
                    return Some(chain);
                }
                queue.push_back(next);
            }
        }
        None
    }

    /// Groups that sit on a membership cycle.
    pub fn cyclic_groups(&self) -> BTreeSet<Sid> {
        self.principals
            .values()
            .filter(|p| p.kind() == PrincipalKind::Group)
            .map(Principal::sid)
            .filter(|g| reach_from(&self.member_of, g).contains(*g))
            .cloned()
            .collect()
    }
}

fn reach(adjacency: &BTreeMap<Sid, BTreeSet<Sid>>, start: &Sid) -> BTreeSet<Sid> {
    let mut seen = reach_from(adjacency, start);
    // A cycle back to the start would otherwise include it.
    seen.remove(start);
    seen
}

/// Everything reachable in one or more steps; contains `start` only on a cycle.
fn reach_from(adjacency: &BTreeMap<Sid, BTreeSet<Sid>>, start: &Sid) -> BTreeSet<Sid> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(current) = stack.pop() {
        for next in adjacency.get(current).into_iter().flatten() {
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    seen
}
