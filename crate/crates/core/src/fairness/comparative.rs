use crate::error::{Error, Result};

/// Reference-free Nash score for a comparison group.
///
/// `gains[s][m]` is the gain of party `m` under candidate set `s` (higher is
/// better). Each party's gains are divided by that party's best gain in the
/// group and the score of a set is the product of its normalized gains.
pub fn comparative_nash(gains: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = gains.first().ok_or_else(|| Error::contract("comparison group is empty"))?;
    let parties = first.len();
    if parties == 0 {
        return Err(Error::contract("gain rows need at least one party"));
    }
    if gains.iter().any(|row| row.len() != parties) {
        return Err(Error::contract("gain matrix is ragged"));
    }
    if let Some(g) = gains.iter().flatten().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::contract(format!("gains must be finite and positive, got {}", g)));
    }
    let best: Vec<f64> =
        (0..parties).map(|m| gains.iter().map(|row| row[m]).fold(f64::NEG_INFINITY, f64::max)).collect();
    Ok(gains.iter().map(|row| row.iter().zip(&best).map(|(g, b)| g / b).product()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_scores_one() {
        assert_eq!(comparative_nash(&[vec![3.0, 0.2, 7.0]]).unwrap(), vec![1.0]);
    }

    #[test]
    fn symmetric_tie() {
        assert_eq!(comparative_nash(&[vec![4.0, 2.0], vec![2.0, 4.0]]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn nonpositive_gains_are_rejected() {
        assert!(comparative_nash(&[vec![1.0, 0.0]]).is_err());
        assert!(comparative_nash(&[vec![1.0, -2.0]]).is_err());
        assert!(comparative_nash(&[]).is_err());
        assert!(comparative_nash(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
