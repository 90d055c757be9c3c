//! Tube maps `F_i`, their composite `G` on the chamber and `H = G o fold`.

use serde::Serialize;

use crate::chamber::{fold, strata_levels, Chamber, Face, Stratification, ON_WALL_TOL};
use crate::error::{Error, Result};
use crate::groups::ReflectionGroup;
use crate::linalg::Point;

use super::profile::SmoothProfile;
use super::tubes::{validate_tubes, TubeReport, TubeSpec};

/// Slack for accepting points as members of the closed chamber.
const CHAMBER_TOL: f64 = 1e-9;

/// Position of a point relative to the tube of one level.
#[derive(Clone, Debug)]
pub enum TubeCoords {
    /// No face of the level has its open part under the point.
    Outside,
    /// The foot lies in an open face but `t >= l(x)`.
    Beyond { t: f64, radius: f64 },
    OnStratum { face: usize, foot: Point, t: f64, radius: f64 },
    Inside { face: usize, foot: Point, normal: Point, t: f64, radius: f64 },
}

impl TubeCoords {
    pub fn is_inside(&self) -> bool {
        matches!(self, TubeCoords::Inside { .. } | TubeCoords::OnStratum { .. })
    }

    /// `t / l` for points in the tube.
    pub fn depth(&self) -> Option<f64> {
        match self {
            TubeCoords::Inside { t, radius, .. } | TubeCoords::OnStratum { t, radius, .. } => Some(t / radius),
            _ => None,
        }
    }
}

/// One tube met while evaluating `G`.
#[derive(Clone, Debug, Serialize)]
pub struct TubeHit {
    pub level: usize,
    pub face: usize,
    pub depth: f64,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct SmoothChain {
    pub group: ReflectionGroup,
    pub chamber: Chamber,
    pub stratification: Stratification,
    pub profile: SmoothProfile,
    pub tubes: TubeSpec,
}

/// `(sum d_j^-k)^(-1/k)`.
pub fn softmin(distances: &[f64], k: f64) -> f64 {
    if distances.len() == 1 {
        return distances[0];
    }
    if distances.iter().any(|&d| d <= 0.0) {
        return 0.0;
    }
    // Scale by the minimum to keep the powers in range.
    let m = distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let s: f64 = distances.iter().map(|&d| (m / d).powf(k)).sum();
    m * s.powf(-1.0 / k)
}

impl SmoothChain {
    pub fn new(group: ReflectionGroup, profile: SmoothProfile, tubes: TubeSpec) -> Result<Self> {
        let chamber = Chamber::new(&group)?;
        tubes.check(group.essential_rank)?;
        let stratification = strata_levels(&group, &chamber);
        Ok(Self { group, chamber, stratification, profile, tubes })
    }

    pub fn with_defaults(group: ReflectionGroup) -> Result<Self> {
        let tubes = TubeSpec::default_for(&group);
        Self::new(group, SmoothProfile::default(), tubes)
    }

    pub fn rank(&self) -> usize {
        self.stratification.rank
    }

    /// Radius `l` of the tube around `face` at a foot point `x` of that face.
    pub fn radius(&self, face: usize, x: &Point) -> f64 {
        let f = &self.stratification.faces[face];
        if f.level == 0 {
            return self.tubes.c0;
        }
        let d: Vec<f64> = f.facets.iter().map(|&k| self.stratification.dist_to_face(k, x)).collect();
        let u = self.tubes.slope(f.level) * softmin(&d, self.tubes.softmin_exponent);
        let c = self.tubes.cap(f.level);
        let g = self.profile.step((u - c) / c);
        (1.0 - g) * u + g * c
    }

    /// Tube radius at a point of a level-`level` face.
    pub fn eval_l(&self, level: usize, x: &Point) -> Result<f64> {
        self.group.check_dimension(x)?;
        if level >= self.rank() {
            return Err(Error::input(format!("level {level} has no tube")));
        }
        let face = self
            .stratification
            .face_of(x, ON_WALL_TOL)
            .filter(|f| f.level == level)
            .ok_or_else(|| Error::input(format!("point is not on a level-{level} face")))?;
        Ok(self.radius(face.index, x))
    }

    pub fn coords_on_face(&self, face: &Face, p: &Point) -> TubeCoords {
        let w = face.normal_component(p);
        let foot = p - &w;
        if !face.open_contains(&foot, 0.0) {
            return TubeCoords::Outside;
        }
        let radius = self.radius(face.index, &foot);
        let t = w.norm();
        if t >= radius {
            TubeCoords::Beyond { t, radius }
        } else if t == 0.0 {
            TubeCoords::OnStratum { face: face.index, foot, t, radius }
        } else {
            TubeCoords::Inside { face: face.index, foot, normal: w / t, t, radius }
        }
    }

    /// Foot point, unit normal and normal distance of `p` in the level-`level`
    /// tube.
    pub fn tube_coords(&self, level: usize, p: &Point) -> TubeCoords {
        let mut result = TubeCoords::Outside;
        for face in self.stratification.faces_at(level) {
            let c = self.coords_on_face(face, p);
            if c.is_inside() {
                return c;
            }
            if let TubeCoords::Beyond { .. } = c {
                result = c;
            }
        }
        result
    }

    /// Normal part of `F_i` in the slice chart at `x`: `w -> g(|w| / l(x)) w`.
    pub fn slice_map(&self, face: usize, x: &Point, w: &Point) -> Point {
        let l = self.radius(face, x);
        w * self.profile.step(w.norm() / l)
    }

    #[allow(non_snake_case)]
    pub fn apply_F(&self, level: usize, p: &Point) -> Point {
        match self.tube_coords(level, p) {
            TubeCoords::Inside { face, foot, normal, t, .. } => {
                let w = normal * t;
                let moved = self.slice_map(face, &foot, &w);
                foot + moved
            }
            _ => p.clone(),
        }
    }

    /// `G_i = F_i o ... o F_(r-1)`.
    pub fn apply_partial(&self, level: usize, p: &Point) -> Point {
        let mut q = p.clone();
        for i in (level..self.rank()).rev() {
            q = self.apply_F(i, &q);
        }
        q
    }

    #[allow(non_snake_case)]
    pub fn apply_G(&self, p: &Point) -> Result<Point> {
        self.group.check_dimension(p)?;
        let tol = CHAMBER_TOL * (1.0 + p.norm());
        if !self.chamber.contains(p, tol) {
            return Err(Error::input("point is outside the closed chamber"));
        }
        Ok(self.apply_partial(0, p))
    }

    #[allow(non_snake_case)]
    pub fn apply_H(&self, p: &Point) -> Result<Point> {
        let folded = fold(&self.group, &self.chamber, p)?;
        Ok(self.apply_partial(0, &folded.image))
    }

    /// Tubes met along the evaluation of `G`, in application order.
    pub fn trace(&self, p: &Point) -> Vec<TubeHit> {
        let mut hits = Vec::new();
        let mut q = p.clone();
        for level in (0..self.rank()).rev() {
            let c = self.tube_coords(level, &q);
            if let TubeCoords::Inside { face, t, radius, .. } | TubeCoords::OnStratum { face, t, radius, .. } = c {
                hits.push(TubeHit { level, face, depth: t / radius, radius });
            }
            q = self.apply_F(level, &q);
        }
        hits
    }

    /// Smallest tube depth met along `G`, or infinity outside all tubes.
    pub fn min_depth(&self, p: &Point) -> f64 {
        self.trace(p).iter().map(|h| h.depth).fold(f64::INFINITY, f64::min)
    }

    pub fn validate_tubes(&self, samples_per_face: usize, seed: u64) -> Result<TubeReport> {
        validate_tubes(self, samples_per_face, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{generate_group, preset_group, Hyperplane, Preset};

    fn p(xs: &[f64]) -> Point {
        Point::from_column_slice(xs)
    }

    fn z2_chain() -> SmoothChain {
        let g = generate_group(&[Hyperplane::from_slice(&[1.0]).unwrap()], 10).unwrap();
        SmoothChain::with_defaults(g).unwrap()
    }

    #[test]
    fn softmin_single_and_pair() {
        assert_eq!(softmin(&[0.37], 4.0), 0.37);
        let d = 0.8;
        assert!((softmin(&[d, d], 4.0) - d * 2f64.powf(-0.25)).abs() < 1e-15);
        assert!(softmin(&[1.0, 5.0], 4.0) < 1.0);
    }

    #[test]
    fn wall_radius_is_linear_then_capped() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::B2).unwrap()).unwrap();
        let b = chain.tubes.slope(1);
        assert_eq!(b, 0.1);
        let l = chain.eval_l(1, &p(&[2.0, 0.0])).unwrap();
        assert!((l - 0.2).abs() < 1e-15);
        let far = chain.eval_l(1, &p(&[50.0, 0.0])).unwrap();
        assert_eq!(far, 1.0);
        assert!(chain.eval_l(1, &p(&[2.0, 1.0])).is_err());
    }

    #[test]
    fn b3_two_face_equidistant_radius() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::B3).unwrap()).unwrap();
        let s = &chain.stratification;
        for face in s.faces_at(2) {
            // Midpoint direction between the two bounding rays, kept small so
            // the cap is inactive.
            let (a, b) = (&face.rays[0], &face.rays[1]);
            let x = (a / a.norm() + b / b.norm()) * 0.5;
            let d: Vec<f64> = face.facets.iter().map(|&k| s.dist_to_face(k, &x)).collect();
            assert!((d[0] - d[1]).abs() < 1e-12);
            let want = chain.tubes.slope(2) * d[0] * 2f64.powf(-0.25);
            assert!((chain.eval_l(2, &x).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn tube_coords_near_wall() {
        let g = preset_group(Preset::I2(2)).unwrap();
        let tubes = TubeSpec::uniform(&g, 0.2, 1.0, 1.0);
        let chain = SmoothChain::new(g, SmoothProfile::default(), tubes).unwrap();
        let near = p(&[1.0, 0.1]);
        let TubeCoords::Inside { foot, normal, t, .. } = chain.tube_coords(1, &near) else {
            panic!("expected a tube point");
        };
        assert!((foot - p(&[1.0, 0.0])).norm() < 1e-15);
        assert!((normal - p(&[0.0, 1.0])).norm() < 1e-15);
        assert!((t - 0.1).abs() < 1e-15);
        assert!(matches!(chain.tube_coords(1, &p(&[1.0, 0.5])), TubeCoords::Beyond { .. }));
        assert!(matches!(chain.tube_coords(1, &p(&[1.0, 0.0])), TubeCoords::OnStratum { .. }));
    }

    #[test]
    fn wall_map_matches_closed_form() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::B2).unwrap()).unwrap();
        let (x, y) = (3.0, 0.07);
        let l = 0.1 * x;
        let out = chain.apply_F(1, &p(&[x, y]));
        assert_eq!(out[0], x);
        assert!((out[1] - l * chain.profile.h(y / l)).abs() < 1e-15);
        let on = p(&[3.0, 0.0]);
        assert_eq!(chain.apply_F(1, &on), on);
        let outside = p(&[3.0, 1.0]);
        assert_eq!(chain.apply_F(1, &outside), outside);
    }

    #[test]
    fn z2_map_is_radial_profile() {
        let chain = z2_chain();
        for u in [0.0, 0.2, 0.5, 0.9, 1.0, 3.0] {
            let g = chain.apply_G(&p(&[u])).unwrap()[0];
            assert!((g - chain.profile.h(u)).abs() < 1e-15);
            let h_pos = chain.apply_H(&p(&[u])).unwrap()[0];
            let h_neg = chain.apply_H(&p(&[-u])).unwrap()[0];
            assert_eq!(h_pos, h_neg);
        }
        assert_eq!(chain.apply_H(&p(&[-2.5])).unwrap()[0], 2.5);
    }

    #[test]
    fn far_points_are_fixed() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::B2).unwrap()).unwrap();
        let q = p(&[5.0, 2.0]);
        assert_eq!(chain.apply_G(&q).unwrap(), q);
        assert!(chain.apply_G(&p(&[-1.0, 2.0])).is_err());
    }

    #[test]
    fn wall_points_stay_on_walls() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::B3).unwrap()).unwrap();
        let s = &chain.stratification;
        for face in s.faces_at(2) {
            let x = (&face.rays[0] * 0.3 + &face.rays[1] * 0.5) * 0.9;
            let gx = chain.apply_G(&x).unwrap();
            for &j in &face.walls {
                assert!(chain.chamber.simple_normals[j].dot(&gx).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn a2_acts_only_on_essential_part() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::A2).unwrap()).unwrap();
        let diag = p(&[2.0, 2.0, 2.0]);
        assert!((chain.apply_H(&diag).unwrap() - &diag).norm() < 1e-15);
        let q = p(&[0.3, 0.2, -0.1]);
        let hq = chain.apply_H(&q).unwrap();
        assert!((hq.sum() - q.sum()).abs() < 1e-14);
    }

    #[test]
    fn validate_default_and_oversized() {
        let chain = SmoothChain::with_defaults(preset_group(Preset::B2).unwrap()).unwrap();
        let report = chain.validate_tubes(200, 1).unwrap();
        assert!(report.min_foreign_depth >= 1.0);
        assert!(report.slope_margin > 0.0);

        let g = preset_group(Preset::B2).unwrap();
        let tubes = TubeSpec::uniform(&g, 10.0, 1.0, 1.0);
        let bad = SmoothChain::new(g, SmoothProfile::default(), tubes).unwrap();
        let err = bad.validate_tubes(200, 1).unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
        assert!(err.to_string().contains("overlap"), "{err}");

        assert!(z2_chain().validate_tubes(50, 1).is_ok());
    }
}
