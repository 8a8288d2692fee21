use std::collections::BTreeMap;

use super::mpdmp::MpdmpSpec;
use super::problem::{ProblemInstance, ReferenceSet};
use crate::error::{Error, Result};

/// Name under which a problem is addressable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProblemHandle(pub String);

#[derive(Debug, Clone)]
pub struct RegisteredProblem {
    pub problem: ProblemInstance,
    pub reference: ReferenceSet,
}

/// Name-indexed problems with their reference sets.
#[derive(Debug, Clone, Default)]
pub struct ProblemRegistry {
    entries: BTreeMap<String, RegisteredProblem>,
}

/// Relative slack when checking reference samples against objective bounds.
const BOUNDS_SLACK: f64 = 1e-9;

impl ProblemRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with the built-in MPDMP instances at `density`.
    pub fn with_builtins(density: usize) -> Result<Self> {
        let mut reg = Self::new();
        for spec in [MpdmpSpec::case1(), MpdmpSpec::case2(), MpdmpSpec::triangles()] {
            reg.register_mpdmp(&spec, density)?;
        }
        Ok(reg)
    }

    pub fn register_mpdmp(&mut self, spec: &MpdmpSpec, density: usize) -> Result<ProblemHandle> {
        let reference = spec.sample_reference(density)?;
        self.register(spec.to_problem()?, reference)
    }

    /// Registers a problem after checking its reference set for consistency:
    /// party layout, sample dimensions, and that re-evaluating the PS samples
    /// reproduces the PF samples within the declared objective bounds.
    pub fn register(&mut self, problem: ProblemInstance, reference: ReferenceSet) -> Result<ProblemHandle> {
        if self.entries.contains_key(&problem.name) {
            return Err(Error::config(format!("problem {:?} is already registered", problem.name)));
        }
        reference.validate(problem.dimension(), &problem.parties)?;
        for (m, r) in reference.parties.iter().enumerate() {
            let stride = (r.ps_samples.len() / 16).max(1);
            for (x, f) in r.ps_samples.iter().zip(&r.pf_samples).step_by(stride) {
                let s = problem.evaluate(x)?;
                for (k, (v, expected)) in s.block(m).iter().zip(f).enumerate() {
                    let scale = 1.0 + r.f_max[k].abs().max(r.f_min[k].abs());
                    if (v - expected).abs() > BOUNDS_SLACK * scale {
                        return Err(Error::config(format!(
                            "party {} PF sample disagrees with the evaluator ({} vs {})",
                            r.party, expected, v
                        )));
                    }
                    if *v < r.f_min[k] - BOUNDS_SLACK * scale || *v > r.f_max[k] + BOUNDS_SLACK * scale {
                        return Err(Error::config(format!(
                            "party {} objective {} value {} lies outside [{}, {}]",
                            r.party,
                            k + 1,
                            v,
                            r.f_min[k],
                            r.f_max[k]
                        )));
                    }
                }
            }
        }
        let handle = ProblemHandle(problem.name.clone());
        self.entries.insert(problem.name.clone(), RegisteredProblem { problem, reference });
        Ok(handle)
    }

    pub fn get(&self, name: &str) -> Result<&RegisteredProblem> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::config(format!("unknown problem {:?}; registered: {:?}", name, self.names())))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ObjectiveBlock, PartySpec};
    use std::sync::Arc;

    #[test]
    fn registered_problem_is_retrievable() {
        let mut reg = ProblemRegistry::new();
        let h = reg.register_mpdmp(&MpdmpSpec::case1(), 20).unwrap();
        assert_eq!(h, ProblemHandle("case1".into()));
        assert_eq!(reg.get("case1").unwrap().problem.num_parties(), 2);
        assert!(reg.get("nope").is_err());
    }

    #[test]
    fn duplicate_name_is_rejected() {
        let mut reg = ProblemRegistry::new();
        reg.register_mpdmp(&MpdmpSpec::case1(), 20).unwrap();
        assert!(matches!(reg.register_mpdmp(&MpdmpSpec::case1(), 20), Err(Error::Config(_))));
    }

    #[test]
    fn mismatched_objective_count_is_rejected() {
        let reference = MpdmpSpec::case1().sample_reference(20).unwrap();
        let eval = |x: &[f64]| -> crate::Result<Vec<ObjectiveBlock>> {
            Ok(vec![ObjectiveBlock::new(1, vec![x[0], x[1], 0.0]), ObjectiveBlock::new(2, vec![x[0], x[1]])])
        };
        let problem = ProblemInstance::new(
            "bad",
            vec![(0.0, 10.0), (0.0, 10.0)],
            vec![PartySpec::new(1, 3), PartySpec::new(2, 2)],
            Arc::new(eval),
        )
        .unwrap();
        assert!(matches!(ProblemRegistry::new().register(problem, reference), Err(Error::Config(_))));
    }

    #[test]
    fn inconsistent_front_samples_are_rejected() {
        let mut reference = MpdmpSpec::case1().sample_reference(20).unwrap();
        reference.parties[0].pf_samples[0][0] += 1.0;
        let problem = MpdmpSpec::case1().to_problem().unwrap();
        assert!(ProblemRegistry::new().register(problem, reference).is_err());
    }

    #[test]
    fn builtins_are_present() {
        let reg = ProblemRegistry::with_builtins(50).unwrap();
        assert_eq!(reg.names(), vec!["case1", "case2", "triangles"]);
    }
}
