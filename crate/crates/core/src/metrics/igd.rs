use crate::error::{Error, Result};
use crate::model::{Solution, SolutionSet};
use crate::par;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean over `reference` of the distance to the nearest of `images`, with a
/// caller-supplied pairwise distance.
pub(crate) fn igd_with<R, P, D>(reference: &[R], images: &[P], distance: D) -> f64
where
    R: Sync,
    P: Sync,
    D: Fn(&R, &P) -> f64 + Sync + Send,
{
    let nearest = par::map(reference, |v| images.iter().map(|p| distance(v, p)).fold(f64::INFINITY, f64::min));
    nearest.iter().sum::<f64>() / reference.len() as f64
}

/// Plain IGD between a sampled front and a list of objective vectors.
pub fn igd(reference: &[Vec<f64>], images: &[&[f64]]) -> Result<f64> {
    if reference.is_empty() || images.is_empty() {
        return Err(Error::contract("IGD needs non-empty reference and candidate sets"));
    }
    Ok(igd_with(reference, images, |v, p| euclid(v, p)))
}

/// IGD of `pop` against party `party`'s sampled front, in that party's
/// objective space.
pub fn igd_party(pf: &[Vec<f64>], pop: &SolutionSet, party: usize) -> Result<f64> {
    pop.require_non_empty()?;
    let images: Vec<&[f64]> = pop
        .iter()
        .map(|s| {
            s.objectives
                .get(party)
                .map(|b| b.values.as_slice())
                .ok_or_else(|| Error::contract(format!("solution has no block for party position {}", party)))
        })
        .collect::<Result<_>>()?;
    if let Some(v) = pf.iter().find(|v| v.len() != images[0].len()) {
        return Err(Error::contract(format!(
            "reference point has {} objectives, candidates have {}",
            v.len(),
            images[0].len()
        )));
    }
    igd(pf, &images)
}

/// Sum over parties of the per-party Euclidean distance.
fn multiparty_distance(v: &Solution, p: &Solution) -> f64 {
    v.objectives.iter().zip(&p.objectives).map(|(a, b)| euclid(&a.values, &b.values)).sum()
}

/// Multi-party IGD: classical IGD where the distance between a reference
/// point and a candidate is the sum of their per-party Euclidean distances.
pub fn igd_multiparty(refs: &SolutionSet, pop: &SolutionSet) -> Result<f64> {
    let layout = pop.common_layout()?;
    let ref_layout = refs.common_layout()?;
    if layout != ref_layout {
        return Err(Error::contract("reference and candidate sets have different party structures"));
    }
    Ok(igd_with(&refs.solutions, &pop.solutions, multiparty_distance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ObjectiveBlock;
    use crate::oracles::igd_double_loop;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_party(points: &[Vec<f64>]) -> SolutionSet {
        points.iter().map(|v| Solution::new(vec![0.0], vec![ObjectiveBlock::new(1, v.clone())])).collect()
    }

    #[test]
    fn identical_sets_have_zero_igd() {
        let pf = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
        assert_eq!(igd_party(&pf, &one_party(&pf), 0).unwrap(), 0.0);
    }

    #[test]
    fn three_four_five() {
        assert_eq!(igd_party(&[vec![0.0, 0.0]], &one_party(&[vec![3.0, 4.0]]), 0).unwrap(), 5.0);
    }

    #[test]
    fn empty_inputs_are_contract_errors() {
        assert!(igd_party(&[], &one_party(&[vec![1.0, 1.0]]), 0).is_err());
        assert!(igd_party(&[vec![1.0, 1.0]], &SolutionSet::default(), 0).is_err());
        assert!(igd_party(&[vec![1.0]], &one_party(&[vec![1.0, 1.0]]), 0).is_err());
    }

    #[test]
    fn matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let k = rng.random_range(1..5);
            let pf: Vec<Vec<f64>> =
                (0..rng.random_range(1..40)).map(|_| (0..k).map(|_| rng.random()).collect()).collect();
            let pop: Vec<Vec<f64>> =
                (0..rng.random_range(1..40)).map(|_| (0..k).map(|_| rng.random()).collect()).collect();
            let got = igd_party(&pf, &one_party(&pop), 0).unwrap();
            assert!((got - igd_double_loop(&pf, &pop)).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_party_multiparty_reduces_to_party_igd() {
        let pf = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let pop = one_party(&[vec![0.2, 0.9], vec![2.0, 2.0]]);
        let a = igd_multiparty(&one_party(&pf), &pop).unwrap();
        let b = igd_party(&pf, &pop, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(igd_multiparty(&pop, &pop).unwrap(), 0.0);
    }

    #[test]
    fn adding_points_never_increases_igd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pf: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.random(), rng.random()]).collect();
        let mut pop: Vec<Vec<f64>> = vec![vec![rng.random(), rng.random()]];
        let mut last = igd_party(&pf, &one_party(&pop), 0).unwrap();
        for _ in 0..30 {
            pop.push(vec![rng.random(), rng.random()]);
            let now = igd_party(&pf, &one_party(&pop), 0).unwrap();
            assert!(now <= last);
            last = now;
        }
    }
}
