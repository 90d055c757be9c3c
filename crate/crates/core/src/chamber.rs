//! Fundamental chamber, the folding projection onto it, and the orbit-type
//! stratification of the closed chamber into faces.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::groups::{generate_group, GroupElement, ReflectionGroup, DEFAULT_CAP};
use crate::linalg::{self, Point};

/// Relative tolerance for strata membership.
pub const ON_WALL_TOL: f64 = 1e-9;

/// Relative slack below which a simple-wall inequality is not treated as
/// violated while folding.
const FOLD_SLACK: f64 = 1e-14;

/// The closed cone `{p : <p, n_i> >= 0}` cut out by the simple system.
#[derive(Clone, Debug)]
pub struct Chamber {
    pub simple_normals: Vec<Point>,
    pub interior_witness: Point,
}

impl Chamber {
    pub fn new(group: &ReflectionGroup) -> Result<Self> {
        let simple_normals: Vec<Point> =
            group.simple_system.iter().map(|h| h.normal().clone()).collect();
        let z = group.interior_point.clone();
        if let Some(j) = simple_normals.iter().position(|n| n.dot(&z) <= 0.0) {
            return Err(Error::InconsistentChamber(format!(
                "witness point violates simple wall {j}"
            )));
        }
        let regenerated = generate_group(&group.simple_system, DEFAULT_CAP)?;
        if regenerated.order() != group.order() {
            return Err(Error::InconsistentChamber(format!(
                "simple reflections generate {} of {} elements",
                regenerated.order(),
                group.order()
            )));
        }
        Ok(Self { simple_normals, interior_witness: z })
    }

    pub fn rank(&self) -> usize {
        self.simple_normals.len()
    }

    /// Smallest value of `<p, n_i>`.
    pub fn min_inequality(&self, p: &Point) -> f64 {
        self.simple_normals.iter().map(|n| n.dot(p)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.simple_normals.is_empty() || self.min_inequality(p) >= -tol
    }
}

/// Result of folding a point into the closed chamber.
#[derive(Clone, Debug)]
pub struct FoldResult {
    pub image: Point,
    /// Group element with `element * input = image`.
    pub element: GroupElement,
    pub element_index: usize,
    /// Number of simple reflections applied.
    pub steps: usize,
}

/// Projection onto the chamber: reflect across the lowest-index violated
/// simple wall until no inequality is violated.
pub fn fold(group: &ReflectionGroup, chamber: &Chamber, p: &Point) -> Result<FoldResult> {
    group.check_dimension(p)?;
    let n = group.dimension;
    let slack = FOLD_SLACK * (1.0 + p.norm());
    let mut q = p.clone();
    let mut transform = DMatrix::<f64>::identity(n, n);
    let mut steps = 0;
    while let Some(j) = chamber.simple_normals.iter().position(|nj| nj.dot(&q) < -slack) {
        let wall = &group.simple_system[j];
        q = wall.reflect_unchecked(&q);
        transform = wall.reflection_matrix() * transform;
        steps += 1;
        if steps > group.order() {
            return Err(Error::InconsistentChamber(format!(
                "fold did not terminate after {steps} reflections"
            )));
        }
    }
    let element_index = group
        .index_of(&transform)
        .ok_or_else(|| Error::InconsistentChamber("fold produced a non-element".into()))?;
    let element = group.elements[element_index].clone();
    let image = if steps == 0 { p.clone() } else { &element.transform * p };
    Ok(FoldResult { image, element, element_index, steps })
}

/// Walls through a point and the level of the stratum containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumDescriptor {
    /// Indices into `group.mirrors` (the set R(x)).
    pub walls_containing: Vec<usize>,
    pub level: usize,
    pub dimension: usize,
}

impl StratumDescriptor {
    pub fn is_regular(&self) -> bool {
        self.walls_containing.is_empty()
    }
}

pub fn classify(group: &ReflectionGroup, p: &Point, tol: f64) -> StratumDescriptor {
    let (_, eff) = group.essential_split(p);
    let scale = tol * (1.0 + eff.norm());
    let walls: Vec<usize> = group
        .mirrors
        .iter()
        .enumerate()
        .filter(|(_, m)| m.normal().dot(&eff).abs() <= scale)
        .map(|(i, _)| i)
        .collect();
    let normals: Vec<Point> = walls.iter().map(|&i| group.mirrors[i].normal().clone()).collect();
    let codim = linalg::rank(&normals, 1e-9);
    StratumDescriptor {
        walls_containing: walls,
        level: group.essential_rank - codim,
        dimension: group.dimension - codim,
    }
}

/// One face of the closed chamber: the points where exactly the simple walls
/// in `walls` vanish.
#[derive(Clone, Debug)]
pub struct Face {
    pub index: usize,
    /// Indices into the simple system.
    pub walls: Vec<usize>,
    pub level: usize,
    /// Orthonormal basis of the face's linear span.
    pub span_basis: Vec<Point>,
    /// Orthonormal basis of the normal space, `span{n_j : j in walls}`.
    pub normal_basis: Vec<Point>,
    /// Vectors `u_j` in the normal space with `<u_j, n_k> = delta_jk`.
    pub normal_duals: Vec<Point>,
    /// Remaining simple walls as (index, inward normal projected into the span).
    pub bounding: Vec<(usize, Point)>,
    /// Extreme rays of the essential part of the face.
    pub rays: Vec<Point>,
    /// Faces one level down in the closure of this face.
    pub facets: Vec<usize>,
}

impl Face {
    /// Normal component of `p` with respect to the face's span.
    pub fn normal_component(&self, p: &Point) -> Point {
        linalg::project(&self.normal_basis, p)
    }

    /// Whether a point of the span lies in the open face.
    pub fn open_contains(&self, x: &Point, tol: f64) -> bool {
        self.bounding.iter().all(|(_, n)| n.dot(x) > tol)
    }

    pub fn closed_contains(&self, x: &Point, tol: f64) -> bool {
        self.bounding.iter().all(|(_, n)| n.dot(x) >= -tol)
    }
}

/// Faces of the chamber grouped by level; level 0 is the fixed subspace and
/// level `rank` is the open chamber.
#[derive(Clone, Debug)]
pub struct Stratification {
    pub dimension: usize,
    pub rank: usize,
    pub faces: Vec<Face>,
    pub levels: Vec<Vec<usize>>,
    pub fixed_subspace: Vec<Point>,
}

pub fn strata_levels(group: &ReflectionGroup, chamber: &Chamber) -> Stratification {
    let r = chamber.rank();
    let n = group.dimension;
    let normals = &chamber.simple_normals;

    // Dual rays: <omega_k, n_j> = delta_kj inside the essential subspace.
    let rays_all: Vec<Point> = if r == 0 {
        Vec::new()
    } else {
        let gram = DMatrix::from_fn(r, r, |i, j| normals[i].dot(&normals[j]));
        let inv = gram.try_inverse().expect("simple normals are independent");
        (0..r)
            .map(|k| {
                let mut w = Point::zeros(n);
                for j in 0..r {
                    w.axpy(inv[(k, j)], &normals[j], 1.0);
                }
                w
            })
            .collect()
    };

    let mut faces: Vec<Face> = Vec::new();
    for mask in 0u32..(1u32 << r) {
        let walls: Vec<usize> = (0..r).filter(|j| mask & (1 << j) != 0).collect();
        let in_s: Vec<Point> = walls.iter().map(|&j| normals[j].clone()).collect();
        let normal_basis = linalg::orthonormalize(&in_s, 1e-12);
        let span_basis = linalg::orthogonal_complement(&in_s, n);
        let normal_duals = if walls.is_empty() {
            Vec::new()
        } else {
            let s = walls.len();
            let gram = DMatrix::from_fn(s, s, |a, b| in_s[a].dot(&in_s[b]));
            let inv = gram.try_inverse().expect("independent normals");
            (0..s)
                .map(|a| {
                    let mut u = Point::zeros(n);
                    for b in 0..s {
                        u.axpy(inv[(a, b)], &in_s[b], 1.0);
                    }
                    u
                })
                .collect()
        };
        let bounding = (0..r)
            .filter(|j| !walls.contains(j))
            .map(|j| (j, &normals[j] - linalg::project(&normal_basis, &normals[j])))
            .collect();
        let rays = (0..r).filter(|k| !walls.contains(k)).map(|k| rays_all[k].clone()).collect();
        faces.push(Face {
            index: 0,
            level: r - walls.len(),
            walls,
            span_basis,
            normal_basis,
            normal_duals,
            bounding,
            rays,
            facets: Vec::new(),
        });
    }
    // Stable order: by level, then by wall set.
    faces.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| b.walls.cmp(&a.walls)));
    for (i, f) in faces.iter_mut().enumerate() {
        f.index = i;
    }
    let wall_sets: Vec<Vec<usize>> = faces.iter().map(|f| f.walls.clone()).collect();
    for face in faces.iter_mut() {
        face.facets = wall_sets
            .iter()
            .enumerate()
            .filter(|(_, w)| w.len() == face.walls.len() + 1 && face.walls.iter().all(|j| w.contains(j)))
            .map(|(i, _)| i)
            .collect();
    }
    let mut levels = vec![Vec::new(); r + 1];
    for f in &faces {
        levels[f.level].push(f.index);
    }
    Stratification { dimension: n, rank: r, faces, levels, fixed_subspace: group.fixed_subspace.clone() }
}

impl Stratification {
    pub fn faces_at(&self, level: usize) -> impl Iterator<Item = &Face> {
        self.levels.get(level).into_iter().flatten().map(move |&i| &self.faces[i])
    }

    /// Face whose relative interior contains the chamber point `p`.
    pub fn face_of(&self, p: &Point, tol: f64) -> Option<&Face> {
        let scale = tol * (1.0 + p.norm());
        let top = self.faces.last()?;
        // The open chamber face has no walls; its bounding are all simple normals.
        let on: Vec<usize> = top
            .bounding
            .iter()
            .filter(|(_, n)| n.dot(p).abs() <= scale)
            .map(|(j, _)| *j)
            .collect();
        self.faces.iter().find(|f| f.walls == on)
    }

    /// Euclidean distance from `p` to the closed face `face`.
    pub fn dist_to_face(&self, face: usize, p: &Point) -> f64 {
        let f = &self.faces[face];
        let w = f.normal_component(p);
        let foot = p - &w;
        if f.closed_contains(&foot, 1e-14 * (1.0 + foot.norm())) {
            return w.norm();
        }
        f.facets
            .iter()
            .map(|&k| self.dist_to_face(k, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the union of closed faces at level `level`.
    pub fn dist_to_level(&self, level: usize, p: &Point) -> f64 {
        self.faces_at(level)
            .map(|f| self.dist_to_face(f.index, p))
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{preset_group, Hyperplane, Preset};

    fn p(xs: &[f64]) -> Point {
        Point::from_column_slice(xs)
    }

    #[test]
    fn z2_fold_is_absolute_value() {
        let g = crate::groups::generate_group(&[Hyperplane::from_slice(&[1.0]).unwrap()], 10).unwrap();
        let c = Chamber::new(&g).unwrap();
        let r = fold(&g, &c, &p(&[-3.0])).unwrap();
        assert_eq!(r.image, p(&[3.0]));
        assert_eq!(r.steps, 1);
    }

    #[test]
    fn b2_fold_example() {
        let g = preset_group(Preset::B2).unwrap();
        let c = Chamber::new(&g).unwrap();
        let r = fold(&g, &c, &p(&[-1.0, 2.0])).unwrap();
        assert!((r.image - p(&[2.0, 1.0])).norm() < 1e-12);
        assert_eq!(r.steps, 2);
        assert_eq!(r.element.word.len(), 2);
    }

    #[test]
    fn fold_fixes_chamber_points() {
        let g = preset_group(Preset::B2).unwrap();
        let c = Chamber::new(&g).unwrap();
        let q = p(&[3.0, 1.0]);
        let r = fold(&g, &c, &q).unwrap();
        assert_eq!(r.image, q);
        assert_eq!(r.steps, 0);
        assert!(r.element.word.is_empty());
    }

    #[test]
    fn fold_dimension_checked() {
        let g = preset_group(Preset::B2).unwrap();
        let c = Chamber::new(&g).unwrap();
        assert!(fold(&g, &c, &p(&[1.0])).is_err());
    }

    #[test]
    fn classify_examples_b2() {
        let g = preset_group(Preset::B2).unwrap();
        let interior = classify(&g, &p(&[2.0, 1.0]), ON_WALL_TOL);
        assert!(interior.is_regular());
        assert_eq!(interior.level, 2);
        let origin = classify(&g, &p(&[0.0, 0.0]), ON_WALL_TOL);
        assert_eq!(origin.walls_containing.len(), g.mirrors.len());
        assert_eq!(origin.level, 0);
        let wall = classify(&g, &p(&[1.0, 0.0]), ON_WALL_TOL);
        assert_eq!(wall.walls_containing.len(), 1);
        assert_eq!(wall.level, 1);
        let m = &g.mirrors[wall.walls_containing[0]];
        assert!(m.same_mirror(&Hyperplane::from_slice(&[0.0, 1.0]).unwrap()));
    }

    #[test]
    fn b2_levels() {
        let g = preset_group(Preset::B2).unwrap();
        let c = Chamber::new(&g).unwrap();
        let s = strata_levels(&g, &c);
        assert_eq!(s.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 1]);
        for f in s.faces_at(1) {
            assert_eq!(f.facets, vec![s.levels[0][0]]);
        }
    }

    #[test]
    fn a3_levels() {
        let g = preset_group(Preset::A3).unwrap();
        let c = Chamber::new(&g).unwrap();
        let s = strata_levels(&g, &c);
        assert_eq!(s.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
        for f in s.faces_at(2) {
            assert_eq!(f.facets.len(), 2);
        }
    }

    #[test]
    fn z2_levels() {
        let g = crate::groups::generate_group(&[Hyperplane::from_slice(&[1.0]).unwrap()], 10).unwrap();
        let c = Chamber::new(&g).unwrap();
        let s = strata_levels(&g, &c);
        assert_eq!(s.levels.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn a2_level_zero_is_the_diagonal() {
        let g = preset_group(Preset::A2).unwrap();
        let c = Chamber::new(&g).unwrap();
        let s = strata_levels(&g, &c);
        let origin = &s.faces[s.levels[0][0]];
        assert_eq!(origin.span_basis.len(), 1);
        let q = p(&[2.0, 2.0, 2.0]);
        assert!(s.dist_to_level(0, &q) < 1e-12);
        assert!(s.face_of(&q, ON_WALL_TOL).unwrap().level == 0);
    }

    #[test]
    fn dist_to_level_examples() {
        let g = preset_group(Preset::B2).unwrap();
        let c = Chamber::new(&g).unwrap();
        let s = strata_levels(&g, &c);
        let q = p(&[1.0, 0.2]);
        assert!((s.dist_to_level(0, &q) - q.norm()).abs() < 1e-15);
        assert!((s.dist_to_level(1, &q) - 0.2).abs() < 1e-15);
        assert!(s.dist_to_level(1, &p(&[3.0, 3.0])) < 1e-15);
    }
}
