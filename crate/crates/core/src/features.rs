//! Morphosyntactic features and the constraints attachment sites place on
//! them.
//!
//! Feature values are open strings (the lexicon files decide the vocabulary);
//! what is fixed is the *algebra*: unification treats an unset value as
//! compatible with anything, while a demand is only satisfied by a node that
//! positively carries the exact value.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Feature {
    Num,
    Gender,
    Sem,
    Case,
    VForm,
}

impl Feature {
    pub const ALL: [Feature; 5] = [
        Feature::Num,
        Feature::Gender,
        Feature::Sem,
        Feature::Case,
        Feature::VForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Num => "num",
            Feature::Gender => "gender",
            Feature::Sem => "sem",
            Feature::Case => "case",
            Feature::VForm => "vform",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("{feature} clash: {left} vs {right}")]
    Conflict { feature: Feature, left: String, right: String },
    #[error("{feature} must be {required}, found {found}")]
    DemandUnsatisfied { feature: Feature, required: String, found: String },
}

/// Feature bundle on a node. `reflexive` is a lexical flag rather than a
/// unifiable value: it triggers the binding check at attachment time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSet {
    pub num: Option<String>,
    pub gender: Option<String>,
    pub sem: Option<String>,
    pub case: Option<String>,
    pub vform: Option<String>,
    pub reflexive: bool,
}

impl FeatureSet {
    pub fn get(&self, f: Feature) -> Option<&str> {
        match f {
            Feature::Num => self.num.as_deref(),
            Feature::Gender => self.gender.as_deref(),
            Feature::Sem => self.sem.as_deref(),
            Feature::Case => self.case.as_deref(),
            Feature::VForm => self.vform.as_deref(),
        }
    }

    pub fn set(&mut self, f: Feature, value: impl Into<String>) {
        let slot = match f {
            Feature::Num => &mut self.num,
            Feature::Gender => &mut self.gender,
            Feature::Sem => &mut self.sem,
            Feature::Case => &mut self.case,
            Feature::VForm => &mut self.vform,
        };
        *slot = Some(value.into());
    }

    pub fn is_empty(&self) -> bool {
        !self.reflexive && Feature::ALL.into_iter().all(|f| self.get(f).is_none())
    }

    /// Unset values unify with anything; set values must agree exactly.
    pub fn unify(&self, other: &FeatureSet) -> Result<FeatureSet, FeatureError> {
        let mut out = self.clone();
        for f in Feature::ALL {
            match (self.get(f), other.get(f)) {
                (Some(a), Some(b)) if a != b => {
                    return Err(FeatureError::Conflict {
                        feature: f,
                        left: a.to_string(),
                        right: b.to_string(),
                    });
                }
                (None, Some(b)) => out.set(f, b),
                _ => {}
            }
        }
        out.reflexive = self.reflexive || other.reflexive;
        Ok(out)
    }

    /// Copy values set on `other` but not on `self`; report a clash where
    /// both are set and disagree. Returns whether anything changed. This is
    /// the one-step primitive behind head percolation and agreement links.
    pub fn absorb(&mut self, other: &FeatureSet) -> Result<bool, FeatureError> {
        let merged = self.unify(other)?;
        let changed = merged != *self;
        *self = merged;
        Ok(changed)
    }

    /// A demand requires the value to be positively present and equal.
    pub fn satisfies_demand(&self, f: Feature, required: &str) -> Result<(), FeatureError> {
        match self.get(f) {
            Some(v) if v == required => Ok(()),
            other => Err(FeatureError::DemandUnsatisfied {
                feature: f,
                required: required.to_string(),
                found: other.unwrap_or("<unset>").to_string(),
            }),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Feature::ALL
            .into_iter()
            .filter_map(|feat| self.get(feat).map(|v| format!("{feat}={v}")))
            .collect();
        if self.reflexive {
            parts.push("reflexive".to_string());
        }
        write!(f, "{}", parts.join(","))
    }
}
