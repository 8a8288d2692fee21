//! Exact hypervolume: a sweep for two objectives and WFG-style exclusive
//! slicing for three or more.

use crate::error::{Error, Result};
use crate::model::{compare_values, nondominated_indices, DominanceRelation};

/// Hypervolume of the union of boxes `[p, reference]` (minimization).
/// Points that do not strictly dominate the reference contribute nothing.
pub fn hypervolume(points: &[&[f64]], reference: &[f64]) -> Result<f64> {
    let k = reference.len();
    if k == 0 {
        return Err(Error::contract("hypervolume reference point is empty"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != k) {
        return Err(Error::contract(format!("point has {} objectives, reference has {}", p.len(), k)));
    }
    let inside: Vec<Vec<f64>> =
        points.iter().filter(|p| p.iter().zip(reference).all(|(a, r)| a < r)).map(|p| p.to_vec()).collect();
    if inside.is_empty() {
        return Ok(0.0);
    }
    let front = nondominated_set(inside);
    Ok(wfg(front, reference))
}

fn nondominated_set(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let keep = nondominated_indices(&points, 0.0);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(keep.len());
    for i in keep {
        // duplicates add no volume
        if !out.iter().any(|q| compare_values(q, &points[i], 0.0) == DominanceRelation::Equal) {
            out.push(points[i].clone());
        }
    }
    out
}

fn hv2d(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for p in &points {
        if p[1] < ceiling {
            volume += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    volume
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter().zip(reference).map(|(a, r)| r - a).product()
}

/// `points` must be mutually non-dominated and strictly inside the reference.
fn wfg(mut points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    match (points.len(), reference.len()) {
        (0, _) => 0.0,
        (1, _) => box_volume(&points[0], reference),
        (_, 1) => reference[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        (_, 2) => hv2d(points, reference),
        _ => {
            // sorting on the last objective keeps limit sets small
            let last = reference.len() - 1;
            points.sort_by(|a, b| b[last].total_cmp(&a[last]));
            let mut total = 0.0;
            for i in 0..points.len() {
                let limited: Vec<Vec<f64>> = points[i + 1..]
                    .iter()
                    .map(|q| q.iter().zip(&points[i]).map(|(a, b)| a.max(*b)).collect())
                    .collect();
                let excluded = if limited.is_empty() { 0.0 } else { wfg(nondominated_set(limited), reference) };
                total += box_volume(&points[i], reference) - excluded;
            }
            total
        }
    }
}
