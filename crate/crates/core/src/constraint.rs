//! Sensor constraints: atomic propositions, a labeling of extended events and
//! an LTL formula over the resulting traces.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::ConstraintError;
use crate::lasso::Lasso;
use crate::ltl::{eval_lasso, parse_ltl, Formula, Letter};
use crate::model::{ExtendedEvent, PlantModel};
use crate::templates::{self, ScenarioSpec};

static EMPTY: Letter = BTreeSet::new();

/// `label : Σ_e → 2^AP`. Events without an entry are labeled with ∅.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labeling {
    map: BTreeMap<ExtendedEvent, Letter>,
}

impl Labeling {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, e: ExtendedEvent, atom: impl Into<String>) {
        self.map.entry(e).or_default().insert(atom.into());
    }

    pub fn get(&self, e: &ExtendedEvent) -> &Letter {
        self.map.get(e).unwrap_or(&EMPTY)
    }

    /// Non-empty entries in event order.
    pub fn iter(&self) -> impl Iterator<Item = (&ExtendedEvent, &Letter)> {
        self.map.iter().filter(|(_, l)| !l.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorConstraint {
    pub atoms: BTreeSet<String>,
    pub labeling: Labeling,
    pub formula: Formula,
}

impl SensorConstraint {
    /// φ = true: no restriction on sensor behavior.
    pub fn trivial() -> Self {
        Self { atoms: BTreeSet::new(), labeling: Labeling::new(), formula: Formula::True }
    }

    pub fn trace(&self, s: &[ExtendedEvent]) -> Vec<Letter> {
        s.iter().map(|e| self.labeling.get(e).clone()).collect()
    }

    pub fn trace_lasso(&self, s: &Lasso<ExtendedEvent>) -> Lasso<Letter> {
        s.map(|e| self.labeling.get(e).clone())
    }

    /// Whether the labeled trace of an infinite extended string satisfies φ.
    pub fn is_compatible(&self, s: &Lasso<ExtendedEvent>) -> bool {
        eval_lasso(&self.trace_lasso(s), &self.formula)
    }

    pub fn to_raw(&self, model: &PlantModel) -> RawConstraint {
        RawConstraint {
            ltl: self.formula.to_string(),
            ap: self.atoms.iter().cloned().collect(),
            labeling: self
                .labeling
                .iter()
                .map(|(e, l)| LabelEntry {
                    q: model.state_name(e.state).to_string(),
                    sigma: model.event_name(e.event).to_string(),
                    o: model.output_spelling(e.output).to_string(),
                    atoms: l.iter().cloned().collect(),
                })
                .collect(),
        }
    }

    pub fn from_raw(model: &PlantModel, raw: &RawConstraint) -> Result<Self, ConstraintError> {
        let atoms: BTreeSet<String> = raw.ap.iter().cloned().collect();
        let formula = parse_ltl(&raw.ltl, &atoms)?;
        let mut labeling = Labeling::new();
        for entry in &raw.labeling {
            let e = model
                .extended_event(&entry.q, &entry.sigma, &entry.o)
                .filter(|e| model.is_valid_event(e))
                .ok_or_else(|| ConstraintError::UnknownEvent {
                    q: entry.q.clone(),
                    sigma: entry.sigma.clone(),
                    o: entry.o.clone(),
                })?;
            for a in &entry.atoms {
                if !atoms.contains(a) {
                    return Err(ConstraintError::UndeclaredAtom(a.clone()));
                }
                labeling.insert(e, a.clone());
            }
        }
        Ok(Self { atoms, labeling, formula })
    }
}

/// User-written constraint: formula text, declared atoms and the non-empty
/// labels. `o` is `""` for the silent output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstraint {
    pub ltl: String,
    pub ap: Vec<String>,
    #[serde(default)]
    pub labeling: Vec<LabelEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelEntry {
    pub q: String,
    pub sigma: String,
    pub o: String,
    pub atoms: Vec<String>,
}

/// Contents of a constraint file: either a raw constraint or a template.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintFile {
    Raw(RawConstraint),
    Template(ScenarioSpec),
}

impl ConstraintFile {
    pub fn parse(text: &str) -> Result<Self, ConstraintError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("template").is_some() {
            Ok(ConstraintFile::Template(serde_json::from_value(value)?))
        } else {
            Ok(ConstraintFile::Raw(serde_json::from_value(value)?))
        }
    }

    /// Resolve against a plant. Templates may rewrite observation sets, so
    /// the plant the constraint refers to is returned alongside it.
    pub fn resolve(
        &self,
        model: &PlantModel,
    ) -> Result<(PlantModel, SensorConstraint), ConstraintError> {
        match self {
            ConstraintFile::Raw(raw) => Ok((model.clone(), SensorConstraint::from_raw(model, raw)?)),
            ConstraintFile::Template(spec) => {
                let out = templates::build(model, spec)?;
                Ok((out.model, out.constraint))
            }
        }
    }
}
