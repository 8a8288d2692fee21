//! Variation operators for real-coded genomes in a box.

use rand::Rng;

const EPS: f64 = 1e-14;

fn clamp(v: f64, (lo, hi): (f64, f64)) -> f64 {
    v.max(lo).min(hi)
}

fn spread_factor(u: f64, beta: f64, eta: f64) -> f64 {
    let alpha = 2.0 - beta.powf(-(eta + 1.0));
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// Bounded simulated binary crossover. With probability `prob` the pair is
/// recombined; each variable then crosses over with probability 1/2.
pub fn sbx(
    p1: &[f64],
    p2: &[f64],
    bounds: &[(f64, f64)],
    eta: f64,
    prob: f64,
    rng: &mut impl Rng,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() > prob {
        return (c1, c2);
    }
    for i in 0..p1.len() {
        if rng.random::<f64>() > 0.5 || (p1[i] - p2[i]).abs() <= EPS {
            continue;
        }
        let (lo, hi) = bounds[i];
        let (y1, y2) = if p1[i] < p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let u: f64 = rng.random();
        let bq1 = spread_factor(u, 1.0 + 2.0 * (y1 - lo) / (y2 - y1), eta);
        let bq2 = spread_factor(u, 1.0 + 2.0 * (hi - y2) / (y2 - y1), eta);
        let a = clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), bounds[i]);
        let b = clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), bounds[i]);
        if rng.random::<f64>() <= 0.5 {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation, each variable with probability `prob`.
pub fn polynomial_mutation(x: &mut [f64], bounds: &[(f64, f64)], eta: f64, prob: f64, rng: &mut impl Rng) {
    let pow = 1.0 / (eta + 1.0);
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        if rng.random::<f64>() > prob {
            continue;
        }
        let span = hi - lo;
        let d1 = (*v - lo) / span;
        let d2 = (hi - *v) / span;
        let r: f64 = rng.random();
        let dq = if r < 0.5 {
            let val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta + 1.0);
            val.powf(pow) - 1.0
        } else {
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - val.powf(pow)
        };
        *v = clamp(*v + dq * span, (lo, hi));
    }
}
