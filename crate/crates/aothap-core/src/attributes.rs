//! Attribute universes, attribute lists, access policies, and the
//! conjunctive satisfaction predicate.
//!
//! A universe has `n` attributes; attribute `l` takes one of `n_l` values.
//! A receiver's attribute list picks exactly one value per attribute; a
//! policy allows a non-empty subset of values per attribute and is
//! satisfied when every chosen value is allowed. Labels exist only at the
//! JSON ingestion boundary; everything below works with `(l, t)` index
//! pairs into the CRS constant tables.

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttrError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("universe has no attributes")]
    NoAttributes,
    #[error("attribute `{attribute}` has no values")]
    EmptyValues { attribute: String },
    #[error("duplicate label `{label}` in attribute `{attribute}`")]
    DuplicateLabel { attribute: String, label: String },
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("unknown label `{label}` for attribute `{attribute}`")]
    UnknownLabel { attribute: String, label: String },
    #[error("wrong arity: universe has {expected} attributes, got {got} entries")]
    WrongArity { expected: usize, got: usize },
    #[error("policy allows no value for attribute `{attribute}`")]
    EmptyPolicySlot { attribute: String },
    #[error("attribute list or policy does not fit this universe")]
    UniverseMismatch,
}

/// The attribute universe: labels for `n` attributes and their value sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeUniverse {
    attributes: Vec<AttributeDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDef {
    pub name: String,
    pub values: Vec<String>,
}

impl AttributeUniverse {
    pub fn new(attributes: Vec<AttributeDef>) -> Result<Self, AttrError> {
        if attributes.is_empty() {
            return Err(AttrError::NoAttributes);
        }
        let mut names = std::collections::HashSet::new();
        for attr in &attributes {
            if !names.insert(attr.name.clone()) {
                return Err(AttrError::DuplicateAttribute(attr.name.clone()));
            }
            if attr.values.is_empty() {
                return Err(AttrError::EmptyValues {
                    attribute: attr.name.clone(),
                });
            }
            let mut labels = std::collections::HashSet::new();
            for v in &attr.values {
                if !labels.insert(v.clone()) {
                    return Err(AttrError::DuplicateLabel {
                        attribute: attr.name.clone(),
                        label: v.clone(),
                    });
                }
            }
        }
        Ok(AttributeUniverse { attributes })
    }

    /// n, the number of attributes.
    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    /// n_l, the number of values attribute `l` can take.
    pub fn value_count(&self, l: usize) -> usize {
        self.attributes[l].values.len()
    }

    /// m, the total number of attribute values.
    pub fn total_values(&self) -> usize {
        self.attributes.iter().map(|a| a.values.len()).sum()
    }

    pub fn attributes(&self) -> &[AttributeDef] {
        &self.attributes
    }

    pub fn label(&self, l: usize, t: usize) -> &str {
        &self.attributes[l].values[t]
    }

    fn resolve(&self, l: usize, label: &str) -> Result<usize, AttrError> {
        let attr = &self.attributes[l];
        attr.values
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| AttrError::UnknownLabel {
                attribute: attr.name.clone(),
                label: label.to_string(),
            })
    }

    pub fn validate_list(&self, list: &AttributeList) -> Result<(), AttrError> {
        if list.choices.len() != self.attribute_count() {
            return Err(AttrError::UniverseMismatch);
        }
        for (l, &t) in list.choices.iter().enumerate() {
            if t >= self.value_count(l) {
                return Err(AttrError::UniverseMismatch);
            }
        }
        Ok(())
    }

    pub fn validate_policy(&self, policy: &AccessPolicy) -> Result<(), AttrError> {
        if policy.allow.len() != self.attribute_count() {
            return Err(AttrError::UniverseMismatch);
        }
        for (l, row) in policy.allow.iter().enumerate() {
            if row.len() != self.value_count(l) {
                return Err(AttrError::UniverseMismatch);
            }
            if !row.iter().any(|&b| b) {
                return Err(AttrError::EmptyPolicySlot {
                    attribute: self.attributes[l].name.clone(),
                });
            }
        }
        Ok(())
    }

    /// True iff the list's value is allowed for every attribute. Both
    /// sides are checked against this universe first.
    pub fn satisfies(&self, list: &AttributeList, policy: &AccessPolicy) -> Result<bool, AttrError> {
        self.validate_list(list)?;
        self.validate_policy(policy)?;
        Ok(list
            .choices
            .iter()
            .enumerate()
            .all(|(l, &t)| policy.allow[l][t]))
    }
}

/// One chosen value index per attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeList {
    pub choices: Vec<usize>,
}

/// Allowed-value mask per attribute; row `l` has length `n_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessPolicy {
    pub allow: Vec<Vec<bool>>,
}

impl AccessPolicy {
    /// Policy allowing every value of every attribute.
    pub fn allow_all(universe: &AttributeUniverse) -> Self {
        AccessPolicy {
            allow: (0..universe.attribute_count())
                .map(|l| vec![true; universe.value_count(l)])
                .collect(),
        }
    }

    pub fn allowed_count(&self, l: usize) -> usize {
        self.allow[l].iter().filter(|&&b| b).count()
    }
}

#[derive(Deserialize)]
struct UniverseDto {
    attributes: Vec<AttributeDtoEntry>,
}

#[derive(Deserialize)]
struct AttributeDtoEntry {
    name: String,
    values: Vec<String>,
}

#[derive(Deserialize)]
struct PolicyDto {
    allow: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct ListDto {
    choose: Vec<String>,
}

/// Parses `{"attributes":[{"name":..., "values":[...]}, ...]}`.
pub fn parse_universe(json: &str) -> Result<AttributeUniverse, AttrError> {
    let dto: UniverseDto = serde_json::from_str(json)?;
    AttributeUniverse::new(
        dto.attributes
            .into_iter()
            .map(|a| AttributeDef {
                name: a.name,
                values: a.values,
            })
            .collect(),
    )
}

/// Parses `{"allow":[["label", ...] per attribute]}` against a universe.
pub fn parse_policy(universe: &AttributeUniverse, json: &str) -> Result<AccessPolicy, AttrError> {
    let dto: PolicyDto = serde_json::from_str(json)?;
    policy_from_labels(universe, &dto.allow)
}

/// Resolves per-attribute allowed-label rows into a policy.
pub fn policy_from_labels(
    universe: &AttributeUniverse,
    rows: &[Vec<String>],
) -> Result<AccessPolicy, AttrError> {
    if rows.len() != universe.attribute_count() {
        return Err(AttrError::WrongArity {
            expected: universe.attribute_count(),
            got: rows.len(),
        });
    }
    let mut allow = Vec::with_capacity(rows.len());
    for (l, labels) in rows.iter().enumerate() {
        let mut row = vec![false; universe.value_count(l)];
        for label in labels {
            row[universe.resolve(l, label)?] = true;
        }
        allow.push(row);
    }
    let policy = AccessPolicy { allow };
    universe.validate_policy(&policy)?;
    Ok(policy)
}

/// Parses `{"choose":["label" per attribute]}` against a universe.
pub fn parse_list(universe: &AttributeUniverse, json: &str) -> Result<AttributeList, AttrError> {
    let dto: ListDto = serde_json::from_str(json)?;
    if dto.choose.len() != universe.attribute_count() {
        return Err(AttrError::WrongArity {
            expected: universe.attribute_count(),
            got: dto.choose.len(),
        });
    }
    let choices = dto
        .choose
        .iter()
        .enumerate()
        .map(|(l, label)| universe.resolve(l, label))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AttributeList { choices })
}

/// Every attribute list of the universe (cartesian product of value
/// indices), in lexicographic order.
pub fn all_lists(universe: &AttributeUniverse) -> Vec<AttributeList> {
    let mut lists = vec![AttributeList { choices: vec![] }];
    for l in 0..universe.attribute_count() {
        let mut next = Vec::new();
        for base in &lists {
            for t in 0..universe.value_count(l) {
                let mut choices = base.choices.clone();
                choices.push(t);
                next.push(AttributeList { choices });
            }
        }
        lists = next;
    }
    lists
}
