//! Summary statistics and the rank test used to compare optimizers.

/// Mean and sample standard deviation; the deviation is 0 for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Mann-Whitney statistic `#{x > y} + #{x = y} / 2` over all pairs.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> f64 {
    let mut u = 0.0;
    for a in x {
        for b in y {
            if a > b {
                u += 1.0;
            } else if a == b {
                u += 0.5;
            }
        }
    }
    u
}

/// Exact one-sided p-value of the Mann-Whitney test for `x` stochastically
/// larger than `y`, from the permutation distribution of `U` without ties.
pub fn mann_whitney_greater(x: &[f64], y: &[f64]) -> f64 {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return 1.0;
    }
    let u = mann_whitney_u(x, y);
    // counts[i][j][k]: arrangements of i x's and j y's with U = k
    let max_u = n * m;
    let mut prev: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; m + 1];
    for row in prev.iter_mut() {
        row[0] = 1.0;
    }
    for _ in 1..=n {
        let mut cur: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; m + 1];
        cur[0][0] = 1.0;
        for j in 1..=m {
            for k in 0..=max_u {
                // largest element is an x (beats all j y's) or a y
                let from_x = if k >= j { prev[j][k - j] } else { 0.0 };
                cur[j][k] = from_x + cur[j - 1][k];
            }
        }
        prev = cur;
    }
    let counts = &prev[m];
    let total: f64 = counts.iter().sum();
    let tail: f64 = counts.iter().enumerate().filter(|(k, _)| *k as f64 >= u).map(|(_, c)| c).sum();
    tail / total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_matches_definition() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    fn brute_force_p(x: &[f64], y: &[f64]) -> f64 {
        // enumerate every split of the pooled ranks
        let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
        let n = pooled.len();
        let observed = mann_whitney_u(x, y);
        let (mut hits, mut total) = (0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != x.len() {
                continue;
            }
            let a: Vec<f64> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pooled[i]).collect();
            let b: Vec<f64> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| pooled[i]).collect();
            total += 1;
            if mann_whitney_u(&a, &b) >= observed {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn exact_p_matches_enumeration() {
        let cases: [(&[f64], &[f64]); 3] = [
            (&[5.0, 6.0, 7.0, 8.0], &[1.0, 2.0, 3.0, 4.0, 4.5]),
            (&[1.0, 6.0, 3.5], &[2.0, 5.0, 4.0, 0.5]),
            (&[0.1, 0.2], &[0.3, 0.4, 0.5]),
        ];
        for (x, y) in cases {
            assert!((mann_whitney_greater(x, y) - brute_force_p(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_separation_of_ten() {
        let x: Vec<f64> = (10..20).map(f64::from).collect();
        let y: Vec<f64> = (0..10).map(f64::from).collect();
        let p = mann_whitney_greater(&x, &y);
        // 1 / C(20, 10)
        assert!((p - 1.0 / 184_756.0).abs() < 1e-15);
    }
}
