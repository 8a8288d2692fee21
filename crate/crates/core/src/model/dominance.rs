//! Party-wise, multi-party and joint Pareto dominance.

use serde::{Deserialize, Serialize};

use super::{ObjectiveBlock, Solution, SolutionSet};
use crate::error::{Error, Result};

/// Outcome of comparing objective vector `a` against `b` (minimization).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceRelation {
    /// `a <= b` componentwise with at least one strict component.
    Dominates,
    /// Componentwise `a <= b`. Never produced by [`compare_values`]: without a
    /// strict component the vectors are [`DominanceRelation::Equal`]. Use
    /// [`weakly_dominates`] for the boolean relation.
    WeaklyDominates,
    Equal,
    /// `b` dominates `a`.
    DominatedBy,
    Incomparable,
}

/// Dominance scope for [`nondominated_filter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// A single party, by zero-based position.
    Party(usize),
    /// Multi-party dominance: weak for every party, strict for at least one.
    Multiparty,
    /// Concatenated objective vector of all parties.
    Joint,
}

/// Compares two equal-length vectors; `tol` is an absolute tolerance (0 for exact).
pub fn compare_values(a: &[f64], b: &[f64], tol: f64) -> DominanceRelation {
    debug_assert_eq!(a.len(), b.len());
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if *x < *y - tol {
            a_better = true;
        } else if *y < *x - tol {
            b_better = true;
        }
        if a_better && b_better {
            return DominanceRelation::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => DominanceRelation::Dominates,
        (false, true) => DominanceRelation::DominatedBy,
        (false, false) => DominanceRelation::Equal,
        (true, true) => DominanceRelation::Incomparable,
    }
}

#[inline]
pub(crate) fn dominates_slice(a: &[f64], b: &[f64], tol: f64) -> bool {
    compare_values(a, b, tol) == DominanceRelation::Dominates
}

#[inline]
fn weakly_le(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= *y + tol)
}

fn check_blocks(a: &ObjectiveBlock, b: &ObjectiveBlock) -> Result<()> {
    if a.party != b.party {
        return Err(Error::contract(format!("cannot compare blocks of parties {} and {}", a.party, b.party)));
    }
    if a.values.len() != b.values.len() {
        return Err(Error::contract(format!(
            "objective blocks have lengths {} and {}",
            a.values.len(),
            b.values.len()
        )));
    }
    Ok(())
}

pub fn dominates_party(a: &ObjectiveBlock, b: &ObjectiveBlock) -> Result<DominanceRelation> {
    dominates_party_tol(a, b, 0.0)
}

pub fn dominates_party_tol(a: &ObjectiveBlock, b: &ObjectiveBlock, tol: f64) -> Result<DominanceRelation> {
    check_blocks(a, b)?;
    Ok(compare_values(&a.values, &b.values, tol))
}

/// Componentwise `a <= b` for one party.
pub fn weakly_dominates(a: &ObjectiveBlock, b: &ObjectiveBlock) -> Result<bool> {
    check_blocks(a, b)?;
    Ok(weakly_le(&a.values, &b.values, 0.0))
}

pub fn dominates_multiparty(a: &Solution, b: &Solution) -> Result<bool> {
    dominates_multiparty_tol(a, b, 0.0)
}

pub fn dominates_multiparty_tol(a: &Solution, b: &Solution, tol: f64) -> Result<bool> {
    if a.objectives.len() != b.objectives.len() {
        return Err(Error::contract(format!(
            "solutions carry {} and {} parties",
            a.objectives.len(),
            b.objectives.len()
        )));
    }
    let mut strict = false;
    for (ba, bb) in a.objectives.iter().zip(&b.objectives) {
        check_blocks(ba, bb)?;
        match compare_values(&ba.values, &bb.values, tol) {
            DominanceRelation::Dominates => strict = true,
            DominanceRelation::Equal | DominanceRelation::WeaklyDominates => {}
            DominanceRelation::DominatedBy | DominanceRelation::Incomparable => return Ok(false),
        }
    }
    Ok(strict)
}

/// Indices of the non-dominated members of `vectors`, in input order.
///
/// Duplicates never dominate each other, so all copies of a non-dominated
/// vector survive.
pub fn nondominated_indices<V: AsRef<[f64]>>(vectors: &[V], tol: f64) -> Vec<usize> {
    let n = vectors.len();
    let mut dominated = vec![false; n];
    for i in 0..n {
        if dominated[i] {
            continue;
        }
        for j in (i + 1)..n {
            if dominated[j] {
                continue;
            }
            match compare_values(vectors[i].as_ref(), vectors[j].as_ref(), tol) {
                DominanceRelation::Dominates => dominated[j] = true,
                DominanceRelation::DominatedBy => {
                    dominated[i] = true;
                    break;
                }
                _ => {}
            }
        }
    }
    // skipping marked vectors is safe: dominance is transitive
    (0..n).filter(|&i| !dominated[i]).collect()
}

pub fn nondominated_filter(pop: &SolutionSet, scope: Scope) -> Result<SolutionSet> {
    nondominated_filter_tol(pop, scope, 0.0)
}

/// Maximal subset with no member dominated by another under `scope`.
/// Survivors keep their input order.
pub fn nondominated_filter_tol(pop: &SolutionSet, scope: Scope, tol: f64) -> Result<SolutionSet> {
    let layout = pop.common_layout()?;
    let keep: Vec<usize> = match scope {
        Scope::Party(m) => {
            if m >= layout.len() {
                return Err(Error::contract(format!("party position {} out of range for {} parties", m, layout.len())));
            }
            let blocks: Vec<&[f64]> = pop.iter().map(|s| s.block(m)).collect();
            nondominated_indices(&blocks, tol)
        }
        Scope::Joint => {
            let joint: Vec<Vec<f64>> = pop.iter().map(Solution::joint).collect();
            nondominated_indices(&joint, tol)
        }
        Scope::Multiparty => {
            let n = pop.len();
            let mut keep = Vec::with_capacity(n);
            for i in 0..n {
                let mut dominated = false;
                for j in 0..n {
                    if i != j && dominates_multiparty_tol(&pop.solutions[j], &pop.solutions[i], tol)? {
                        dominated = true;
                        break;
                    }
                }
                if !dominated {
                    keep.push(i);
                }
            }
            keep
        }
    };
    Ok(keep.into_iter().map(|i| pop.solutions[i].clone()).collect())
}
