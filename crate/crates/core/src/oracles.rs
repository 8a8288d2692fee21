//! Brute-force reference implementations used only by unit tests.

use rand::Rng;

/// O(N^2) pairwise non-dominance, written independently of the library filter.
pub fn pairwise_nondominated(vectors: &[Vec<f64>]) -> Vec<usize> {
    (0..vectors.len())
        .filter(|&i| {
            !(0..vectors.len()).any(|j| {
                let le = vectors[j].iter().zip(&vectors[i]).all(|(a, b)| a <= b);
                let lt = vectors[j].iter().zip(&vectors[i]).any(|(a, b)| a < b);
                le && lt
            })
        })
        .collect()
}

/// Double-loop IGD.
pub fn igd_double_loop(reference: &[Vec<f64>], images: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for v in reference {
        let mut best = f64::INFINITY;
        for p in images {
            let d = v.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if d < best {
                best = d;
            }
        }
        total += best;
    }
    total / reference.len() as f64
}

/// Monte-Carlo hypervolume estimate and its standard error over the box
/// `[lower, reference]`.
pub fn hv_monte_carlo(
    points: &[Vec<f64>],
    lower: &[f64],
    reference: &[f64],
    samples: usize,
    rng: &mut impl Rng,
) -> (f64, f64) {
    let volume: f64 = lower.iter().zip(reference).map(|(l, r)| r - l).product();
    let mut hits = 0usize;
    let mut z = vec![0.0; lower.len()];
    for _ in 0..samples {
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = lower[k] + rng.random::<f64>() * (reference[k] - lower[k]);
        }
        if points.iter().any(|p| p.iter().zip(&z).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    (volume * frac, volume * (frac * (1.0 - frac) / samples as f64).sqrt())
}
