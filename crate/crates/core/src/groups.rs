//! Finite reflection groups on R^n: mirrors, exhaustive enumeration and the
//! fixed/essential split.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Point};

/// Entrywise tolerance used to identify group elements.
pub const ELEMENT_TOL: f64 = 1e-9;

/// Default closure cap for [`generate_group`].
pub const DEFAULT_CAP: usize = 10_000;

/// A mirror through the origin, stored by its unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    normal: Point,
}

impl Hyperplane {
    pub fn new(normal: Point) -> Result<Self> {
        let norm = normal.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::input("hyperplane normal must be nonzero and finite"));
        }
        Ok(Self { normal: normal / norm })
    }

    pub fn from_slice(normal: &[f64]) -> Result<Self> {
        Self::new(Point::from_column_slice(normal))
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    /// `p - 2<p, n> n`.
    pub fn reflect(&self, p: &Point) -> Result<Point> {
        if p.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: p.len() });
        }
        Ok(self.reflect_unchecked(p))
    }

    pub(crate) fn reflect_unchecked(&self, p: &Point) -> Point {
        let c = 2.0 * p.dot(&self.normal);
        p - &self.normal * c
    }

    pub fn reflection_matrix(&self) -> DMatrix<f64> {
        let n = self.dimension();
        DMatrix::identity(n, n) - (&self.normal * self.normal.transpose()) * 2.0
    }

    /// Same mirror: normals agree up to sign.
    pub fn same_mirror(&self, other: &Hyperplane) -> bool {
        if self.dimension() != other.dimension() {
            return false;
        }
        let plus = (&self.normal - &other.normal).amax();
        let minus = (&self.normal + &other.normal).amax();
        plus.min(minus) <= 1e-9
    }

    pub(crate) fn flipped(&self) -> Hyperplane {
        Hyperplane { normal: -&self.normal }
    }
}

/// An orthogonal transformation together with one shortest word in the
/// generating reflections (applied right to left: `word[0]` is outermost).
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub transform: DMatrix<f64>,
    pub word: Vec<usize>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        Self { transform: DMatrix::identity(n, n), word: Vec::new() }
    }

    pub fn apply(&self, p: &Point) -> Point {
        &self.transform * p
    }

    pub fn inverse(&self) -> GroupElement {
        let mut word = self.word.clone();
        word.reverse();
        GroupElement { transform: self.transform.transpose(), word }
    }

    /// Orthogonal involution with a single -1 eigenvalue.
    pub fn is_reflection(&self) -> bool {
        let n = self.transform.nrows();
        let sq = &self.transform * &self.transform;
        let involution = linalg::max_abs_diff(&sq, &DMatrix::identity(n, n)) <= ELEMENT_TOL;
        involution && (self.transform.trace() - (n as f64 - 2.0)).abs() <= 1e-6
    }

    /// The mirror of a reflection element.
    pub fn mirror(&self) -> Option<Hyperplane> {
        if !self.is_reflection() {
            return None;
        }
        let n = self.transform.nrows();
        // (I - M) / 2 = n n^T for a reflection.
        let p = (DMatrix::identity(n, n) - &self.transform) * 0.5;
        let col = (0..n).max_by(|&a, &b| p.column(a).norm().total_cmp(&p.column(b).norm()))?;
        Hyperplane::new(p.column(col).into_owned()).ok()
    }
}

/// Named groups built from standard simple-root tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Dihedral group of order 2m acting on R^2.
    I2(u32),
    /// S3 permuting the coordinates of R^3.
    A2,
    /// Signed permutations of R^2.
    B2,
    /// S4 realized on R^3 through the D3 root table.
    A3,
    /// Signed permutations of R^3.
    B3,
}

impl Preset {
    pub fn parse(name: &str, m: Option<u32>) -> Result<Self> {
        let name = name.trim();
        let upper = name.to_ascii_uppercase();
        let preset = match upper.as_str() {
            "A2" => Preset::A2,
            "B2" => Preset::B2,
            "A3" => Preset::A3,
            "B3" => Preset::B3,
            "I2" => Preset::I2(m.ok_or_else(|| Error::input("I2 needs a value for m"))?),
            _ => {
                let inner = upper
                    .strip_prefix("I2(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| Error::input(format!("unknown preset `{name}`")))?;
                let m = inner
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::input(format!("bad dihedral order in `{name}`")))?;
                Preset::I2(m)
            }
        };
        if let Preset::I2(m) = preset {
            if m < 2 {
                return Err(Error::input("I2(m) requires m >= 2"));
            }
        }
        Ok(preset)
    }

    pub fn expected_order(&self) -> usize {
        match *self {
            Preset::I2(m) => 2 * m as usize,
            Preset::A2 => 6,
            Preset::B2 => 8,
            Preset::A3 => 24,
            Preset::B3 => 48,
        }
    }

    pub fn simple_roots(&self) -> Vec<Point> {
        let v = |xs: &[f64]| Point::from_column_slice(xs);
        match *self {
            Preset::I2(m) => {
                let a = PI / m as f64;
                vec![v(&[0.0, 1.0]), v(&[a.sin(), -a.cos()])]
            }
            Preset::A2 => vec![v(&[1.0, -1.0, 0.0]), v(&[0.0, 1.0, -1.0])],
            Preset::B2 => vec![v(&[1.0, -1.0]), v(&[0.0, 1.0])],
            Preset::A3 => vec![v(&[1.0, -1.0, 0.0]), v(&[0.0, 1.0, -1.0]), v(&[0.0, 1.0, 1.0])],
            Preset::B3 => vec![v(&[1.0, -1.0, 0.0]), v(&[0.0, 1.0, -1.0]), v(&[0.0, 0.0, 1.0])],
        }
    }

    pub fn all_fixed() -> Vec<Preset> {
        vec![Preset::I2(3), Preset::I2(4), Preset::A2, Preset::B2, Preset::A3, Preset::B3]
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::I2(m) => write!(f, "I2({m})"),
            Preset::A2 => f.write_str("A2"),
            Preset::B2 => f.write_str("B2"),
            Preset::A3 => f.write_str("A3"),
            Preset::B3 => f.write_str("B3"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::parse(s, None)
    }
}

/// A fully enumerated finite reflection group.
#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    pub dimension: usize,
    pub generators: Vec<Hyperplane>,
    pub elements: Vec<GroupElement>,
    /// All mirrors, normals oriented positively on the fundamental chamber.
    pub mirrors: Vec<Hyperplane>,
    /// Inward normals of the fundamental chamber's walls.
    pub simple_system: Vec<Hyperplane>,
    pub fixed_subspace: Vec<Point>,
    pub essential_rank: usize,
    /// Generic point strictly inside the fundamental chamber.
    pub interior_point: Point,
}

impl ReflectionGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, transform: &DMatrix<f64>) -> Option<usize> {
        find_element(&self.elements, transform)
    }

    pub fn contains(&self, transform: &DMatrix<f64>) -> bool {
        self.index_of(transform).is_some()
    }

    pub fn check_dimension(&self, p: &Point) -> Result<()> {
        if p.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: p.len() });
        }
        Ok(())
    }

    /// Splits `p` into its component in the pointwise-fixed subspace and the
    /// orthogonal (essential) remainder.
    pub fn essential_split(&self, p: &Point) -> (Point, Point) {
        let fixed = linalg::project(&self.fixed_subspace, p);
        let eff = p - &fixed;
        (fixed, eff)
    }

    /// Index of the mirror in `mirrors` equal to `h` up to sign.
    pub fn mirror_index(&self, h: &Hyperplane) -> Option<usize> {
        self.mirrors.iter().position(|m| m.same_mirror(h))
    }

    /// Smallest dihedral angle between two walls of the fundamental chamber
    /// (pi/2 when there is at most one wall).
    pub fn min_dihedral_angle(&self) -> f64 {
        let mut best = PI / 2.0;
        for (i, a) in self.simple_system.iter().enumerate() {
            for b in &self.simple_system[i + 1..] {
                let c = a.normal().dot(b.normal()).clamp(-1.0, 1.0);
                best = best.min(PI - c.acos());
            }
        }
        best
    }

    pub fn dump(&self) -> GroupDump {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
        };
        GroupDump {
            dimension: self.dimension,
            order: self.order(),
            essential_rank: self.essential_rank,
            mirrors: self.mirrors.iter().map(|m| m.normal().as_slice().to_vec()).collect(),
            simple_system: self.simple_system.iter().map(|m| m.normal().as_slice().to_vec()).collect(),
            fixed_subspace: self.fixed_subspace.iter().map(|v| v.as_slice().to_vec()).collect(),
            elements: self
                .elements
                .iter()
                .map(|e| ElementDump { matrix: rows(&e.transform), word: e.word.clone() })
                .collect(),
        }
    }
}

/// JSON-serializable listing of a group.
#[derive(Debug, Serialize)]
pub struct GroupDump {
    pub dimension: usize,
    pub order: usize,
    pub essential_rank: usize,
    pub mirrors: Vec<Vec<f64>>,
    pub simple_system: Vec<Vec<f64>>,
    pub fixed_subspace: Vec<Vec<f64>>,
    pub elements: Vec<ElementDump>,
}

#[derive(Debug, Serialize)]
pub struct ElementDump {
    pub matrix: Vec<Vec<f64>>,
    pub word: Vec<usize>,
}

fn find_element(elements: &[GroupElement], t: &DMatrix<f64>) -> Option<usize> {
    elements.iter().position(|e| linalg::max_abs_diff(&e.transform, t) <= ELEMENT_TOL)
}

/// Breadth-first closure of the reflections in `gens`.
pub fn generate_group(gens: &[Hyperplane], cap: usize) -> Result<ReflectionGroup> {
    let first = gens.first().ok_or_else(|| Error::input("at least one generator is required"))?;
    if cap == 0 {
        return Err(Error::input("cap must be at least 1"));
    }
    let n = first.dimension();
    if let Some(bad) = gens.iter().find(|g| g.dimension() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dimension() });
    }
    let reflections: Vec<DMatrix<f64>> = gens.iter().map(Hyperplane::reflection_matrix).collect();

    let mut elements = vec![GroupElement::identity(n)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for (gi, r) in reflections.iter().enumerate() {
            let t = r * &current.transform;
            if find_element(&elements, &t).is_none() {
                let mut word = Vec::with_capacity(current.word.len() + 1);
                word.push(gi);
                word.extend_from_slice(&current.word);
                elements.push(GroupElement { transform: t, word });
                if elements.len() > cap {
                    return Err(Error::GroupNotFinite { cap });
                }
            }
        }
    }

    let mut mirrors: Vec<Hyperplane> = Vec::new();
    for e in &elements {
        if let Some(m) = e.mirror() {
            if !mirrors.iter().any(|x| x.same_mirror(&m)) {
                mirrors.push(m);
            }
        }
    }
    let normals: Vec<Point> = mirrors.iter().map(|m| m.normal().clone()).collect();
    let fixed_subspace = linalg::orthogonal_complement(&normals, n);
    let essential_rank = n - fixed_subspace.len();

    let interior_point = generic_interior_point(gens, &mirrors, &fixed_subspace);
    let mirrors: Vec<Hyperplane> = mirrors
        .into_iter()
        .map(|m| if m.normal().dot(&interior_point) < 0.0 { m.flipped() } else { m })
        .collect();

    // s_m is a simple reflection iff exactly one mirror separates z and s_m(z).
    let mut simple: Vec<Hyperplane> = mirrors
        .iter()
        .filter(|m| {
            let image = m.reflect_unchecked(&interior_point);
            let separating = mirrors
                .iter()
                .filter(|k| k.normal().dot(&image) < 0.0)
                .count();
            separating == 1
        })
        .cloned()
        .collect();
    // Keep the generators' order when generators are simple.
    simple.sort_by_key(|s| gens.iter().position(|g| g.same_mirror(s)).unwrap_or(usize::MAX));

    if simple.len() != essential_rank {
        return Err(Error::InconsistentChamber(format!(
            "found {} simple walls for essential rank {}",
            simple.len(),
            essential_rank
        )));
    }

    Ok(ReflectionGroup {
        dimension: n,
        generators: gens.to_vec(),
        elements,
        mirrors,
        simple_system: simple,
        fixed_subspace,
        essential_rank,
        interior_point,
    })
}

/// A point off every mirror, inside the chamber where the generators are
/// positive whenever the generators are a simple system.
fn generic_interior_point(gens: &[Hyperplane], mirrors: &[Hyperplane], fixed: &[Point]) -> Point {
    let n = gens[0].dimension();
    let a = DMatrix::from_fn(gens.len(), n, |i, j| gens[i].normal()[j]);
    let ones = nalgebra::DVector::from_element(gens.len(), 1.0);
    let mut z = a
        .clone()
        .svd(true, true)
        .solve(&ones, 1e-12)
        .unwrap_or_else(|_| Point::from_element(n, 1.0));
    z -= linalg::project(fixed, &z);

    let clearance =
        |p: &Point| mirrors.iter().map(|m| m.normal().dot(p).abs()).fold(f64::INFINITY, f64::min) / p.norm().max(1e-300);
    let mut attempt = 0u32;
    while clearance(&z) < 1e-6 && attempt < 64 {
        attempt += 1;
        // Deterministic, irrational-looking perturbation direction.
        let mut w = Point::from_fn(n, |i, _| ((i as f64 + 1.0) * 0.754_877_666 + attempt as f64 * 0.569_840_29).fract() - 0.5);
        w -= linalg::project(fixed, &w);
        let scale = 0.1 * z.norm().max(1.0);
        z += w * scale;
    }
    z
}

/// Builds a preset from its simple roots.
pub fn preset_group(preset: Preset) -> Result<ReflectionGroup> {
    let gens = preset
        .simple_roots()
        .into_iter()
        .map(Hyperplane::new)
        .collect::<Result<Vec<_>>>()?;
    generate_group(&gens, DEFAULT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(xs: &[f64]) -> Point {
        Point::from_column_slice(xs)
    }

    #[test]
    fn reflect_flips_normal_component() {
        let h = Hyperplane::from_slice(&[0.0, 1.0]).unwrap();
        assert_eq!(h.reflect(&p(&[1.0, 2.0])).unwrap(), p(&[1.0, -2.0]));
        assert_eq!(h.reflect(&p(&[3.0, 0.0])).unwrap(), p(&[3.0, 0.0]));
        assert!(matches!(h.reflect(&p(&[1.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(Hyperplane::from_slice(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn orthogonal_mirrors_give_klein_four() {
        let g = generate_group(
            &[Hyperplane::from_slice(&[1.0, 0.0]).unwrap(), Hyperplane::from_slice(&[0.0, 1.0]).unwrap()],
            DEFAULT_CAP,
        )
        .unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.mirrors.len(), 2);
        assert_eq!(g.essential_rank, 2);
    }

    #[test]
    fn single_mirror_in_r1() {
        let g = generate_group(&[Hyperplane::from_slice(&[1.0]).unwrap()], DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 2);
        assert!(g.fixed_subspace.is_empty());
        assert_eq!(g.essential_rank, 1);
    }

    #[test]
    fn cap_catches_infinite_groups() {
        // Mirrors at an irrational angle generate an infinite dihedral group.
        let a = 1.0_f64;
        let g = generate_group(
            &[Hyperplane::from_slice(&[0.0, 1.0]).unwrap(), Hyperplane::from_slice(&[a.sin(), -a.cos()]).unwrap()],
            200,
        );
        assert!(matches!(g, Err(Error::GroupNotFinite { cap: 200 })));
    }

    #[test]
    fn preset_parse() {
        assert_eq!(Preset::parse("I2(5)", None).unwrap(), Preset::I2(5));
        assert_eq!(Preset::parse("i2", Some(7)).unwrap(), Preset::I2(7));
        assert_eq!("b3".parse::<Preset>().unwrap(), Preset::B3);
        assert!(Preset::parse("H3", None).is_err());
        assert!(Preset::parse("I2(1)", None).is_err());
        assert!(Preset::parse("I2", None).is_err());
    }

    #[test]
    fn a2_split_in_permutation_realization() {
        let g = preset_group(Preset::A2).unwrap();
        assert_eq!(g.fixed_subspace.len(), 1);
        let (fixed, eff) = g.essential_split(&p(&[1.0, 1.0, 1.0]));
        assert!(eff.norm() < 1e-12);
        assert!((fixed - p(&[1.0, 1.0, 1.0])).norm() < 1e-12);
        let (fixed, eff) = g.essential_split(&p(&[2.0, 0.0, -2.0]));
        assert!(fixed.norm() < 1e-12);
        assert!((eff - p(&[2.0, 0.0, -2.0])).norm() < 1e-12);
    }

    #[test]
    fn i2_2_matches_orthogonal_pair() {
        let a = preset_group(Preset::I2(2)).unwrap();
        let b = generate_group(
            &[Hyperplane::from_slice(&[1.0, 0.0]).unwrap(), Hyperplane::from_slice(&[0.0, 1.0]).unwrap()],
            DEFAULT_CAP,
        )
        .unwrap();
        assert_eq!(a.order(), b.order());
        for e in &a.elements {
            assert!(b.contains(&e.transform));
        }
    }

    #[test]
    fn b2_simple_system_is_standard() {
        let g = preset_group(Preset::B2).unwrap();
        let s: Vec<_> = g.simple_system.iter().map(|h| h.normal().clone()).collect();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((&s[0] - p(&[r, -r])).norm() < 1e-12);
        assert!((&s[1] - p(&[0.0, 1.0])).norm() < 1e-12);
        assert!((g.min_dihedral_angle() - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn words_reproduce_transforms() {
        let g = preset_group(Preset::B3).unwrap();
        for e in &g.elements {
            let mut m = DMatrix::identity(3, 3);
            for &i in e.word.iter().rev() {
                m = g.generators[i].reflection_matrix() * m;
            }
            assert!(linalg::max_abs_diff(&m, &e.transform) < 1e-9);
        }
    }

    #[test]
    fn redundant_generators_still_find_simple_walls() {
        // All three mirrors of I2(3) given as generators.
        let gens: Vec<_> = (0..3)
            .map(|k| {
                let a = PI / 3.0 * k as f64;
                Hyperplane::from_slice(&[-a.sin(), a.cos()]).unwrap()
            })
            .collect();
        let g = generate_group(&gens, DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.simple_system.len(), 2);
        let z = &g.interior_point;
        for s in &g.simple_system {
            assert!(s.normal().dot(z) > 0.0);
        }
    }
}
