//! Multi-party distance minimization problems (MPDMP).
//!
//! Every party minimizes the Euclidean distances from a shared point in the
//! plane to its own target points. For two targets the party's Pareto set is
//! the closed segment between them; for more it is the targets' convex hull.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::problem::{PartyReference, ProblemInstance, ReferenceSet};
use crate::error::{Error, Result};
use crate::model::{nondominated_indices, ObjectiveBlock, PartySpec};

pub const DEFAULT_DENSITY: usize = 500;
pub const DEFAULT_BOUNDS: [[f64; 2]; 2] = [[0.0, 10.0], [0.0, 10.0]];

fn default_bounds() -> [[f64; 2]; 2] {
    DEFAULT_BOUNDS
}

fn default_density() -> usize {
    DEFAULT_DENSITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpdmpParty {
    pub party: usize,
    pub targets: Vec<[f64; 2]>,
}

/// Target geometry of an MPDMP instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpdmpSpec {
    pub name: String,
    /// `[[x_lo, x_hi], [y_lo, y_hi]]`.
    #[serde(default = "default_bounds")]
    pub bounds: [[f64; 2]; 2],
    pub parties: Vec<MpdmpParty>,
    /// Reference samples per Pareto-set segment.
    #[serde(default = "default_density")]
    pub density: usize,
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl MpdmpSpec {
    pub fn new(name: impl Into<String>, parties: Vec<Vec<[f64; 2]>>) -> Self {
        Self {
            name: name.into(),
            bounds: DEFAULT_BOUNDS,
            parties: parties.into_iter().enumerate().map(|(i, targets)| MpdmpParty { party: i + 1, targets }).collect(),
            density: DEFAULT_DENSITY,
        }
    }

    /// Disjoint parallel Pareto sets: A targets (1,1),(3,3); B targets (3,1),(5,3).
    pub fn case1() -> Self {
        Self::new("case1", vec![vec![[1.0, 1.0], [3.0, 3.0]], vec![[3.0, 1.0], [5.0, 3.0]]])
    }

    /// Pareto sets crossing at (3,2): A targets (1,1),(5,3); B targets (2,3),(4,1).
    pub fn case2() -> Self {
        Self::new("case2", vec![vec![[1.0, 1.0], [5.0, 3.0]], vec![[2.0, 3.0], [4.0, 1.0]]])
    }

    /// Two parties with overlapping triangular Pareto sets.
    pub fn triangles() -> Self {
        Self::new("triangles", vec![vec![[1.0, 1.0], [5.0, 1.0], [3.0, 4.0]], vec![[3.0, 0.5], [6.0, 3.0], [2.0, 3.5]]])
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn party_specs(&self) -> Vec<PartySpec> {
        self.parties.iter().map(|p| PartySpec::new(p.party, p.targets.len())).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let [[xl, xh], [yl, yh]] = self.bounds;
        if !(xl < xh && yl < yh) {
            return Err(Error::config(format!("{}: bounds must satisfy lo < hi", self.name)));
        }
        crate::model::validate_parties(&self.party_specs())?;
        for p in &self.parties {
            if p.targets.len() < 2 {
                return Err(Error::config(format!("{}: party {} needs at least two targets", self.name, p.party)));
            }
            for t in &p.targets {
                if !(t[0] >= xl && t[0] <= xh && t[1] >= yl && t[1] <= yh) {
                    return Err(Error::config(format!(
                        "{}: target {:?} of party {} lies outside the bounds",
                        self.name, t, p.party
                    )));
                }
            }
        }
        if self.density < 2 {
            return Err(Error::config(format!("{}: density must be at least 2", self.name)));
        }
        Ok(())
    }

    fn in_bounds(&self, x: &[f64]) -> bool {
        let [[xl, xh], [yl, yh]] = self.bounds;
        x.len() == 2 && x[0] >= xl && x[0] <= xh && x[1] >= yl && x[1] <= yh
    }

    /// Objective `(m, k)` is the distance from `x` to target `k` of party `m`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<ObjectiveBlock>> {
        if !self.in_bounds(x) {
            return Err(Error::Domain(format!("{:?} lies outside the bounds of {}", x, self.name)));
        }
        let p = [x[0], x[1]];
        Ok(self
            .parties
            .iter()
            .map(|party| ObjectiveBlock::new(party.party, party.targets.iter().map(|t| dist(p, *t)).collect()))
            .collect())
    }

    pub fn to_problem(&self) -> Result<ProblemInstance> {
        self.validate()?;
        let spec = self.clone();
        let [[xl, xh], [yl, yh]] = self.bounds;
        ProblemInstance::new(
            self.name.clone(),
            vec![(xl, xh), (yl, yh)],
            self.party_specs(),
            Arc::new(move |x: &[f64]| spec.evaluate(x)),
        )
    }

    fn corners(&self) -> [[f64; 2]; 4] {
        let [[xl, xh], [yl, yh]] = self.bounds;
        [[xl, yl], [xl, yh], [xh, yl], [xh, yh]]
    }

    /// Analytic reference set with `density` samples per Pareto-set segment.
    pub fn sample_reference(&self, density: usize) -> Result<ReferenceSet> {
        self.validate()?;
        if density < 2 {
            return Err(Error::config("reference density must be at least 2"));
        }
        let corners = self.corners();
        let mut parties = Vec::with_capacity(self.parties.len());
        for party in &self.parties {
            let ps = party_pareto_samples(party, density)?;
            let pf: Vec<Vec<f64>> = ps.iter().map(|x| party.targets.iter().map(|t| dist(*x, *t)).collect()).collect();
            let f_max: Vec<f64> =
                party.targets.iter().map(|t| corners.iter().map(|c| dist(*c, *t)).fold(0.0, f64::max)).collect();
            parties.push(PartyReference {
                party: party.party,
                ps_samples: ps.iter().map(|x| x.to_vec()).collect(),
                pf_samples: pf,
                f_min: vec![0.0; party.targets.len()],
                f_max,
            });
        }
        Ok(ReferenceSet { parties, density, bounds_source: "analytic: bounds corners".to_string() })
    }
}

/// Uniform samples on the closed segment `a..b`, endpoints included.
pub fn segment_samples(a: [f64; 2], b: [f64; 2], count: usize) -> Vec<[f64; 2]> {
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| {
            let t = i as f64 / last;
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        })
        .collect()
}

fn party_pareto_samples(party: &MpdmpParty, density: usize) -> Result<Vec<[f64; 2]>> {
    if party.targets.len() == 2 {
        let (a, b) = (party.targets[0], party.targets[1]);
        if dist(a, b) == 0.0 {
            return Err(Error::config(format!("party {} has coincident targets", party.party)));
        }
        return Ok(segment_samples(a, b, density));
    }
    let hull = convex_hull(&party.targets);
    if hull.len() < 3 || polygon_area(&hull) <= 1e-12 {
        // collinear targets: the Pareto set is the segment between the extremes
        let (mut best, mut pair) = (0.0, (party.targets[0], party.targets[0]));
        for (i, a) in party.targets.iter().enumerate() {
            for b in &party.targets[i + 1..] {
                if dist(*a, *b) > best {
                    best = dist(*a, *b);
                    pair = (*a, *b);
                }
            }
        }
        if best == 0.0 {
            return Err(Error::config(format!("party {} has coincident targets", party.party)));
        }
        return Ok(segment_samples(pair.0, pair.1, density));
    }
    let candidates = hull_samples(&hull, density);
    let images: Vec<Vec<f64>> =
        candidates.iter().map(|x| party.targets.iter().map(|t| dist(*x, *t)).collect()).collect();
    Ok(nondominated_indices(&images, 0.0).into_iter().map(|i| candidates[i]).collect())
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], *p) <= 0.0 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross([0.0, 0.0], poly[i], poly[(i + 1) % n])).sum::<f64>().abs() / 2.0
}

fn inside_convex(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], p) >= -1e-12)
}

/// Square-lattice samples inside a convex polygon, about `count` of them,
/// plus the polygon's vertices.
fn hull_samples(hull: &[[f64; 2]], count: usize) -> Vec<[f64; 2]> {
    let step = (polygon_area(hull) / count as f64).sqrt();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in hull {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let nx = ((hi[0] - lo[0]) / step).floor() as usize;
    let ny = ((hi[1] - lo[1]) / step).floor() as usize;
    let mut out: Vec<[f64; 2]> = hull.to_vec();
    for i in 0..=nx {
        for j in 0..=ny {
            let p = [lo[0] + i as f64 * step, lo[1] + j as f64 * step];
            if inside_convex(hull, p) && !hull.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}
