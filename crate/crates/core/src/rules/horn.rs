//! Propositional Horn clauses and forward-chaining closure.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub body: BTreeSet<String>,
    pub head: String,
}

impl Clause {
    pub fn new<I, S>(body: I, head: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            body: body.into_iter().map(Into::into).collect(),
            head: head.into(),
        }
    }
}

/// Atoms plus definite clauses over them.
///
/// File form: `{"atoms": [...], "clauses": [{"body": [...], "head": "..."}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRuleBase")]
pub struct RuleBase {
    atoms: BTreeSet<String>,
    clauses: Vec<Clause>,
}

#[derive(Deserialize)]
struct RawRuleBase {
    atoms: Vec<String>,
    #[serde(default)]
    clauses: Vec<Clause>,
}

impl TryFrom<RawRuleBase> for RuleBase {
    type Error = Error;

    fn try_from(raw: RawRuleBase) -> Result<Self> {
        Self::new(raw.atoms, raw.clauses)
    }
}

impl RuleBase {
    pub fn new<I, S>(atoms: I, clauses: Vec<Clause>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: BTreeSet<String> = atoms.into_iter().map(Into::into).collect();
        for c in &clauses {
            if c.head.is_empty() {
                return Err(invalid("clause with empty head"));
            }
            for a in c.body.iter().chain(std::iter::once(&c.head)) {
                if !atoms.contains(a) {
                    return Err(Error::UnknownAtom(a.clone()));
                }
            }
        }
        Ok(Self { atoms, clauses })
    }

    pub fn empty() -> Self {
        Self {
            atoms: BTreeSet::new(),
            clauses: Vec::new(),
        }
    }

    pub fn atoms(&self) -> &BTreeSet<String> {
        &self.atoms
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Same clauses over a larger atom universe.
    pub fn with_atoms<I, S>(&self, extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = self.clone();
        out.atoms.extend(extra.into_iter().map(Into::into));
        out
    }
}

/// Least fixpoint of the clauses above `facts`.
///
/// Each clause keeps a count of body atoms not yet derived; an atom is
/// processed once, so the work is linear in the total clause size.
pub fn forward_chain(rb: &RuleBase, facts: &BTreeSet<String>) -> Result<BTreeSet<String>> {
    if let Some(a) = facts.iter().find(|a| !rb.atoms.contains(*a)) {
        return Err(Error::UnknownAtom(a.clone()));
    }
    let mut watchers: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut missing: Vec<usize> = Vec::with_capacity(rb.clauses.len());
    for (ci, c) in rb.clauses.iter().enumerate() {
        missing.push(c.body.len());
        for a in &c.body {
            watchers.entry(a.as_str()).or_default().push(ci);
        }
    }

    let mut known: BTreeSet<String> = BTreeSet::new();
    let mut queue: Vec<&str> = Vec::new();
    for f in facts {
        if known.insert(f.clone()) {
            queue.push(f.as_str());
        }
    }
    for (ci, c) in rb.clauses.iter().enumerate() {
        if missing[ci] == 0 && known.insert(c.head.clone()) {
            queue.push(c.head.as_str());
        }
    }
    while let Some(a) = queue.pop() {
        if let Some(cs) = watchers.get(a) {
            for &ci in cs {
                missing[ci] -= 1;
                let head = rb.clauses[ci].head.as_str();
                if missing[ci] == 0 && known.insert(head.to_string()) {
                    queue.push(head);
                }
            }
        }
    }
    Ok(known)
}
