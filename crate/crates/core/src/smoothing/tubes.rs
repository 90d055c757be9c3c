//! Tube parameters and the sampling validator for tube geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chamber::Face;
use crate::error::{Error, Result};
use crate::groups::ReflectionGroup;
use crate::linalg::Point;

use super::chain::{SmoothChain, TubeCoords};

/// Radius parameters per level. `slopes[i - 1]` and `caps[i - 1]` belong to
/// level `i` for `1 <= i < rank`; level 0 is a ball of radius `c0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TubeSpec {
    pub slopes: Vec<f64>,
    pub caps: Vec<f64>,
    pub c0: f64,
    pub softmin_exponent: f64,
}

impl TubeSpec {
    pub fn default_for(group: &ReflectionGroup) -> Self {
        let levels = group.essential_rank.saturating_sub(1);
        let b = 0.1f64.min(group.min_dihedral_angle().sin() / 4.0);
        Self { slopes: vec![b; levels], caps: vec![1.0; levels], c0: 1.0, softmin_exponent: 4.0 }
    }

    /// Same slope and cap on every level.
    pub fn uniform(group: &ReflectionGroup, slope: f64, cap: f64, c0: f64) -> Self {
        let levels = group.essential_rank.saturating_sub(1);
        Self { slopes: vec![slope; levels], caps: vec![cap; levels], c0, softmin_exponent: 4.0 }
    }

    pub fn slope(&self, level: usize) -> f64 {
        self.slopes[level - 1]
    }

    pub fn cap(&self, level: usize) -> f64 {
        self.caps[level - 1]
    }

    pub fn check(&self, rank: usize) -> Result<()> {
        let levels = rank.saturating_sub(1);
        if self.slopes.len() != levels || self.caps.len() != levels {
            return Err(Error::config(format!(
                "expected {levels} slope/cap values, got {}/{}",
                self.slopes.len(),
                self.caps.len()
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !self.slopes.iter().chain(&self.caps).all(|&v| positive(v)) {
            return Err(Error::config("tube slopes and caps must be positive"));
        }
        if !positive(self.c0) {
            return Err(Error::config("c0 must be positive"));
        }
        if !positive(self.softmin_exponent) {
            return Err(Error::config("softmin exponent must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TubeReport {
    pub samples: usize,
    /// Smallest `t / l` of a tube sample measured against a foreign tube of
    /// the same level; disjointness requires this to be at least 1.
    pub min_foreign_depth: f64,
    /// Smallest `<p, n_k> / |p|` over tube samples and walls outside the face.
    pub min_wall_clearance: f64,
    /// `min_i (sin(theta_min) / 4 - b_i)`.
    pub slope_margin: f64,
}

/// Uniformly random point of the open face, at log-uniform scale.
pub(crate) fn sample_open_face<R: Rng>(chain: &SmoothChain, face: &Face, rng: &mut R) -> Point {
    let n = chain.group.dimension;
    let mut x = Point::zeros(n);
    for ray in &face.rays {
        let c: f64 = (rng.random_range(-4.0f64..1.0)).exp();
        x.axpy(c, ray, 1.0);
    }
    for f in &chain.group.fixed_subspace {
        x.axpy(rng.random_range(-1.0..1.0), f, 1.0);
    }
    x
}

/// Unit vector in the normal cone of a face, pointing into the chamber.
pub(crate) fn sample_normal_direction<R: Rng>(face: &Face, rng: &mut R) -> Option<Point> {
    if face.normal_duals.is_empty() {
        return None;
    }
    let n = face.normal_duals[0].len();
    let mut w = Point::zeros(n);
    for u in &face.normal_duals {
        let a: f64 = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.0) };
        w.axpy(a, u, 1.0);
    }
    let norm = w.norm();
    if norm < 1e-12 {
        let u = &face.normal_duals[rng.random_range(0..face.normal_duals.len())];
        return Some(u / u.norm());
    }
    Some(w / norm)
}

pub fn validate_tubes(chain: &SmoothChain, samples_per_face: usize, seed: u64) -> Result<TubeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strat = &chain.stratification;
    let mut min_foreign = f64::INFINITY;
    let mut min_clear = f64::INFINITY;
    let mut count = 0;
    for level in 1..strat.rank {
        for face in strat.faces_at(level) {
            for _ in 0..samples_per_face {
                let x = sample_open_face(chain, face, &mut rng);
                let Some(v) = sample_normal_direction(face, &mut rng) else { continue };
                let l = chain.radius(face.index, &x);
                let frac = if rng.random_bool(0.5) { 1.0 - 1e-9 } else { rng.random_range(0.0..1.0) };
                let p = &x + &v * (l * frac);
                count += 1;
                for other in strat.faces_at(level) {
                    if other.index == face.index {
                        continue;
                    }
                    match chain.coords_on_face(other, &p) {
                        TubeCoords::Inside { t, radius, .. } | TubeCoords::OnStratum { t, radius, .. } => {
                            return Err(Error::config(format!(
                                "tubes of level-{level} faces {:?} and {:?} overlap at {:?} (t/l = {:.3e})",
                                face.walls,
                                other.walls,
                                p.as_slice(),
                                t / radius
                            )));
                        }
                        TubeCoords::Beyond { t, radius } => min_foreign = min_foreign.min(t / radius),
                        TubeCoords::Outside => {}
                    }
                }
                for (k, n) in chain.chamber.simple_normals.iter().enumerate() {
                    if face.walls.contains(&k) {
                        continue;
                    }
                    let c = n.dot(&p) / p.norm();
                    if c <= 0.0 {
                        return Err(Error::config(format!(
                            "tube of level-{level} face {:?} reaches wall {k} at {:?}",
                            face.walls,
                            p.as_slice()
                        )));
                    }
                    min_clear = min_clear.min(c);
                }
            }
        }
    }
    let bound = chain.group.min_dihedral_angle().sin() / 4.0;
    let mut slope_margin = f64::INFINITY;
    for level in 1..strat.rank {
        let b = chain.tubes.slope(level);
        if b > bound {
            return Err(Error::config(format!(
                "slope b_{level} = {b} exceeds sin(theta_min)/4 = {bound:.6}"
            )));
        }
        slope_margin = slope_margin.min(bound - b);
    }
    Ok(TubeReport { samples: count, min_foreign_depth: min_foreign, min_wall_clearance: min_clear, slope_margin })
}
