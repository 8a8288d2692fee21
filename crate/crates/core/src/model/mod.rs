//! Domain types shared by every module: party layout, evaluated solutions and
//! solution sets.
//!
//! Party ids are 1-based in serialized data (`"party": 1`). Library functions
//! that take a party argument use the zero-based position of the party in the
//! problem's party list.

mod dominance;
mod io;

pub(crate) use dominance::dominates_slice;
pub use dominance::{
    compare_values, dominates_multiparty, dominates_multiparty_tol, dominates_party, dominates_party_tol,
    nondominated_filter, nondominated_filter_tol, nondominated_indices, weakly_dominates, DominanceRelation, Scope,
};
pub use io::{fmt_f64, read_solutions_csv, read_solutions_json, write_solutions_csv, write_solutions_json};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One decision maker's objective layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartySpec {
    pub party_id: usize,
    pub num_objectives: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_labels: Option<Vec<String>>,
}

impl PartySpec {
    pub fn new(party_id: usize, num_objectives: usize) -> Self {
        Self { party_id, num_objectives, objective_labels: None }
    }
}

/// Checks that party ids are contiguous from 1 and each party has an objective.
pub fn validate_parties(parties: &[PartySpec]) -> Result<()> {
    if parties.is_empty() {
        return Err(Error::config("a problem needs at least one party"));
    }
    for (i, p) in parties.iter().enumerate() {
        if p.party_id != i + 1 {
            return Err(Error::config(format!(
                "party ids must be contiguous from 1; position {} has id {}",
                i, p.party_id
            )));
        }
        if p.num_objectives == 0 {
            return Err(Error::config(format!("party {} has no objectives", p.party_id)));
        }
        if let Some(labels) = &p.objective_labels {
            if labels.len() != p.num_objectives {
                return Err(Error::config(format!(
                    "party {} declares {} labels for {} objectives",
                    p.party_id,
                    labels.len(),
                    p.num_objectives
                )));
            }
        }
    }
    Ok(())
}

/// Objective values of one party for one solution (minimization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBlock {
    pub party: usize,
    pub values: Vec<f64>,
}

impl ObjectiveBlock {
    pub fn new(party: usize, values: Vec<f64>) -> Self {
        Self { party, values }
    }
}

/// A decision vector with its evaluated objective blocks, ordered by party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub decision: Vec<f64>,
    pub objectives: Vec<ObjectiveBlock>,
}

impl Solution {
    pub fn new(decision: Vec<f64>, objectives: Vec<ObjectiveBlock>) -> Self {
        Self { decision, objectives }
    }

    pub fn num_parties(&self) -> usize {
        self.objectives.len()
    }

    /// Objective values of the party at zero-based position `party`.
    pub fn block(&self, party: usize) -> &[f64] {
        &self.objectives[party].values
    }

    /// All parties' objectives concatenated in party order.
    pub fn joint(&self) -> Vec<f64> {
        self.objectives.iter().flat_map(|b| b.values.iter().copied()).collect()
    }

    /// Checks the solution against a declared layout.
    pub fn validate(&self, dimension: usize, parties: &[PartySpec]) -> Result<()> {
        if self.decision.len() != dimension {
            return Err(Error::contract(format!(
                "decision has length {}, problem dimension is {}",
                self.decision.len(),
                dimension
            )));
        }
        if self.objectives.len() != parties.len() {
            return Err(Error::contract(format!(
                "solution carries {} objective blocks for {} parties",
                self.objectives.len(),
                parties.len()
            )));
        }
        for (block, spec) in self.objectives.iter().zip(parties) {
            if block.party != spec.party_id || block.values.len() != spec.num_objectives {
                return Err(Error::contract(format!(
                    "objective block for party {} with {} values does not match party {} with {} objectives",
                    block.party,
                    block.values.len(),
                    spec.party_id,
                    spec.num_objectives
                )));
            }
            if block.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::contract(format!("non-finite objective value for party {}", block.party)));
            }
        }
        Ok(())
    }

    /// Party layout implied by this solution's blocks.
    pub fn party_layout(&self) -> Vec<PartySpec> {
        self.objectives.iter().map(|b| PartySpec::new(b.party, b.values.len())).collect()
    }
}

/// An ordered candidate set `P`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
}

impl SolutionSet {
    pub fn new(solutions: Vec<Solution>) -> Self {
        Self { solutions }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Solution> {
        self.solutions.iter()
    }

    /// Fails with a contract violation on an empty set.
    pub fn require_non_empty(&self) -> Result<()> {
        if self.solutions.is_empty() {
            Err(Error::contract("solution set is empty"))
        } else {
            Ok(())
        }
    }

    /// Checks that every member shares the same party layout; returns it.
    pub fn common_layout(&self) -> Result<Vec<PartySpec>> {
        self.require_non_empty()?;
        let layout = self.solutions[0].party_layout();
        let n = self.solutions[0].decision.len();
        for s in &self.solutions[1..] {
            s.validate(n, &layout)?;
        }
        Ok(layout)
    }
}

impl FromIterator<Solution> for SolutionSet {
    fn from_iter<I: IntoIterator<Item = Solution>>(iter: I) -> Self {
        Self { solutions: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a SolutionSet {
    type Item = &'a Solution;
    type IntoIter = std::slice::Iter<'a, Solution>;

    fn into_iter(self) -> Self::IntoIter {
        self.solutions.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(x: &[f64], blocks: &[&[f64]]) -> Solution {
        Solution::new(
            x.to_vec(),
            blocks.iter().enumerate().map(|(i, v)| ObjectiveBlock::new(i + 1, v.to_vec())).collect(),
        )
    }

    #[test]
    fn party_ids_must_be_contiguous() {
        assert!(validate_parties(&[PartySpec::new(1, 2), PartySpec::new(2, 2)]).is_ok());
        assert!(validate_parties(&[PartySpec::new(1, 2), PartySpec::new(3, 2)]).is_err());
        assert!(validate_parties(&[PartySpec::new(1, 0)]).is_err());
        assert!(validate_parties(&[]).is_err());
    }

    #[test]
    fn joint_concatenates_in_party_order() {
        let s = sol(&[0.0], &[&[1.0, 2.0], &[3.0]]);
        assert_eq!(s.joint(), vec![1.0, 2.0, 3.0]);
        assert_eq!(s.block(1), &[3.0]);
    }

    #[test]
    fn validate_rejects_wrong_shapes() {
        let parties = [PartySpec::new(1, 2), PartySpec::new(2, 2)];
        let ok = sol(&[0.0, 0.0], &[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(ok.validate(2, &parties).is_ok());
        assert!(ok.validate(3, &parties).is_err());
        let short = sol(&[0.0, 0.0], &[&[1.0, 2.0], &[3.0]]);
        assert!(short.validate(2, &parties).is_err());
        let nan = sol(&[0.0, 0.0], &[&[1.0, f64::NAN], &[3.0, 4.0]]);
        assert!(nan.validate(2, &parties).is_err());
    }

    #[test]
    fn empty_set_is_rejected_by_common_layout() {
        assert!(SolutionSet::default().common_layout().is_err());
    }
}
