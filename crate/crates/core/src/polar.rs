//! Concrete polar actions: conjugation on symmetric 3x3 matrices and the
//! rotation action on R^n, each with a section map onto a reflection-group
//! section.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{jump_probe, ProbeConfig, ProbeReport};
use crate::chamber::{classify, fold, ON_WALL_TOL};
use crate::error::{Error, Result};
use crate::groups::{generate_group, preset_group, Hyperplane, Preset, ReflectionGroup};
use crate::linalg::{self, Point};
use crate::smoothing::SmoothChain;

const JACOBI_SWEEPS: usize = 64;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, unsorted.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

/// A polar action of `SO(k)` on `M = R^ambient_dim` with a flat section.
pub trait PolarModel {
    fn name(&self) -> &str;
    fn ambient_dim(&self) -> usize;
    fn section_dim(&self) -> usize;
    fn weyl(&self) -> &ReflectionGroup;
    /// Point of the section in the orbit of `p`.
    fn section_map(&self, p: &Point) -> Result<Point>;
    /// Size `k` of the rotations acting on `M`.
    fn motion_size(&self) -> usize;
    fn act(&self, q: &DMatrix<f64>, p: &Point) -> Point;
    /// Inclusion of the section into `M`.
    fn embed(&self, b: &Point) -> Point;
}

/// Symmetric 3x3 matrices in coordinates
/// `(s11, s22, s33, sqrt2 s12, sqrt2 s13, sqrt2 s23)`, under conjugation.
pub struct SymEig3Model {
    weyl: ReflectionGroup,
}

pub fn sym_eig_model() -> SymEig3Model {
    SymEig3Model { weyl: preset_group(Preset::A2).expect("A2 preset") }
}

impl SymEig3Model {
    pub fn unpack(p: &Point) -> DMatrix<f64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_row_slice(
            3,
            3,
            &[p[0], r * p[3], r * p[4], r * p[3], p[1], r * p[5], r * p[4], r * p[5], p[2]],
        )
    }

    pub fn pack(s: &DMatrix<f64>) -> Point {
        let r = std::f64::consts::SQRT_2;
        let sym = |i: usize, j: usize| 0.5 * (s[(i, j)] + s[(j, i)]);
        Point::from_vec(vec![s[(0, 0)], s[(1, 1)], s[(2, 2)], r * sym(0, 1), r * sym(0, 2), r * sym(1, 2)])
    }
}

impl PolarModel for SymEig3Model {
    fn name(&self) -> &str {
        "sym3"
    }

    fn ambient_dim(&self) -> usize {
        6
    }

    fn section_dim(&self) -> usize {
        3
    }

    fn weyl(&self) -> &ReflectionGroup {
        &self.weyl
    }

    fn section_map(&self, p: &Point) -> Result<Point> {
        if p.len() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, got: p.len() });
        }
        let mut ev = jacobi_eigenvalues(&Self::unpack(p));
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(Point::from_vec(ev))
    }

    fn motion_size(&self) -> usize {
        3
    }

    fn act(&self, q: &DMatrix<f64>, p: &Point) -> Point {
        Self::pack(&(q * Self::unpack(p) * q.transpose()))
    }

    fn embed(&self, b: &Point) -> Point {
        Point::from_vec(vec![b[0], b[1], b[2], 0.0, 0.0, 0.0])
    }
}

/// `O(n)` acting on R^n; the section is a line through the origin.
pub struct RadialModel {
    n: usize,
    weyl: ReflectionGroup,
}

pub fn radial_model(n: usize) -> Result<RadialModel> {
    if n < 2 {
        return Err(Error::input("radial model needs n >= 2"));
    }
    let weyl = generate_group(&[Hyperplane::from_slice(&[1.0])?], 2)?;
    Ok(RadialModel { n, weyl })
}

impl PolarModel for RadialModel {
    fn name(&self) -> &str {
        "radial"
    }

    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn section_dim(&self) -> usize {
        1
    }

    fn weyl(&self) -> &ReflectionGroup {
        &self.weyl
    }

    fn section_map(&self, p: &Point) -> Result<Point> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.len() });
        }
        Ok(Point::from_vec(vec![p.norm()]))
    }

    fn motion_size(&self) -> usize {
        self.n
    }

    fn act(&self, q: &DMatrix<f64>, p: &Point) -> Point {
        q * p
    }

    fn embed(&self, b: &Point) -> Point {
        linalg::unit(self.n, 0) * b[0]
    }
}

/// `H = G o fold o section_map`, constant on the orbits in `M`.
#[allow(non_snake_case)]
pub fn model_H(model: &dyn PolarModel, chain: &SmoothChain, p: &Point) -> Result<Point> {
    if chain.group.dimension != model.section_dim() {
        return Err(Error::DimensionMismatch { expected: model.section_dim(), got: chain.group.dimension });
    }
    chain.apply_H(&model.section_map(p)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistanceReport {
    pub distances: Vec<f64>,
    pub spread: f64,
    pub mean: f64,
}

fn is_regular(group: &ReflectionGroup, b: &Point) -> bool {
    classify(group, b, ON_WALL_TOL).is_regular()
}

/// Distance from `p` to the orbit of the section point `b`, minimized over
/// rotations starting at `q0`.
pub fn orbit_distance(model: &dyn PolarModel, p: &Point, b: &Point, q0: &DMatrix<f64>) -> f64 {
    let k = model.motion_size();
    let dim = linalg::skew_dim(k);
    let base = model.embed(b);
    let mut q = q0.clone();
    let cost = |q: &DMatrix<f64>, theta: &[f64]| -> f64 {
        let r = q * linalg::cayley(theta, k);
        (p - model.act(&r, &base)).norm_squared()
    };
    let h = 1e-6;
    let mut f = cost(&q, &vec![0.0; dim]);
    for _ in 0..5000 {
        let mut grad = vec![0.0; dim];
        let mut e = vec![0.0; dim];
        for i in 0..dim {
            e[i] = h;
            let fp = cost(&q, &e);
            e[i] = -h;
            let fm = cost(&q, &e);
            e[i] = 0.0;
            grad[i] = (fp - fm) / (2.0 * h);
        }
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2.sqrt() < 1e-13 {
            break;
        }
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-12 {
            let theta: Vec<f64> = grad.iter().map(|g| -step * g).collect();
            let ft = cost(&q, &theta);
            if ft < f - 1e-4 * step * gnorm2 {
                q = &q * linalg::cayley(&theta, k);
                f = ft;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    f.max(0.0).sqrt()
}

/// Spread of the distances from sampled points of the level set through `b1`
/// to the level set through `b2`.
pub fn equidistance_probe(
    model: &dyn PolarModel,
    chain: &SmoothChain,
    b1: &Point,
    b2: &Point,
    samples: usize,
    seed: u64,
) -> Result<EquidistanceReport> {
    let weyl = model.weyl();
    for b in [b1, b2] {
        weyl.check_dimension(b)?;
        if !is_regular(weyl, b) {
            return Err(Error::input(format!("section value {:?} is not regular", b.as_slice())));
        }
    }
    if chain.group.dimension != model.section_dim() {
        return Err(Error::DimensionMismatch { expected: model.section_dim(), got: chain.group.dimension });
    }
    if samples == 0 {
        return Err(Error::input("equidistance probe needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = model.motion_size();
    let base = model.embed(b1);
    let mut distances = Vec::with_capacity(samples);
    for _ in 0..samples {
        let q1 = linalg::random_rotation(&mut rng, k);
        let p = model.act(&q1, &base);
        let q0 = linalg::random_rotation(&mut rng, k);
        distances.push(orbit_distance(model, &p, b2, &q0));
    }
    let max = distances.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = distances.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = distances.iter().sum::<f64>() / samples as f64;
    Ok(EquidistanceReport { distances, spread: max - min, mean })
}

/// Straight curve `tau -> p0 + tau d` in `M`.
#[derive(Clone, Debug)]
pub struct Curve {
    pub origin: Point,
    pub direction: Point,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveProbe {
    /// Smallest first-derivative jump of the raw section map over the offsets.
    pub raw_jump: f64,
    pub report: ProbeReport,
}

/// First-derivative jump of `H` along a curve crossing a singular orbit at
/// `tau = 0`, with the sorted section map as control.
pub fn curve_jump_probe(model: &dyn PolarModel, chain: &SmoothChain, curve: &Curve, cfg: &ProbeConfig) -> Result<CurveProbe> {
    let b = model.section_map(&curve.origin)?;
    let image = fold(&chain.group, &chain.chamber, &b)?.image;
    let face = chain
        .stratification
        .face_of(&image, ON_WALL_TOL)
        .ok_or_else(|| Error::input("curve base has no face"))?;
    if face.level + 1 != chain.rank() {
        return Err(Error::input("curve must cross a single wall at tau = 0"));
    }
    let scale = chain.radius(face.index, &image);
    let at = |t: &Point| &curve.origin + &curve.direction * t[0];
    let h = |t: &Point| model_H(model, chain, &at(t)).expect("dimensions checked");
    let raw = |t: &Point| model.section_map(&at(t)).expect("dimensions checked");
    let cfg = ProbeConfig { orders: vec![1], ..cfg.clone() };
    let zero = Point::zeros(1);
    let one = Point::from_element(1, 1.0);
    let report = jump_probe(&h, Some(&raw), &zero, &one, scale, &cfg)?;
    let raw_jump = report.control_jumps.as_ref().expect("control requested")[0]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    Ok(CurveProbe { raw_jump, report })
}

/// Random curve through a matrix with a repeated eigenvalue, transversal to
/// the repeated-eigenvalue locus.
pub fn random_transversal_curve<R: Rng>(rng: &mut R) -> Curve {
    let model = SymEig3Model { weyl: preset_group(Preset::A2).expect("A2 preset") };
    let a: f64 = rng.random_range(-1.0..2.0);
    let gap: f64 = rng.random_range(0.5..2.0);
    let (diag, block) = if rng.random_bool(0.5) {
        (vec![a, a, a - gap], (0, 1))
    } else {
        (vec![a + gap, a, a], (1, 2))
    };
    let mut d = DMatrix::zeros(3, 3);
    d[(block.0, block.0)] = 1.0;
    d[(block.1, block.1)] = -1.0;
    let off: f64 = rng.random_range(-1.0..1.0);
    d[(block.0, block.1)] = off;
    d[(block.1, block.0)] = off;
    let other = 3 - block.0 - block.1;
    d[(other, other)] = rng.random_range(-0.5..0.5);
    let q = linalg::random_rotation(rng, 3);
    let origin = model.act(&q, &model.embed(&Point::from_vec(diag)));
    let direction = SymEig3Model::pack(&(&q * d * q.transpose()));
    Curve { origin, direction }
}

/// Random symmetric matrix with Gaussian entries, in packed coordinates.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> Point {
    let a = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    SymEig3Model::pack(&((&a + a.transpose()) * 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(xs: &[f64]) -> Point {
        Point::from_column_slice(xs)
    }

    fn sym_chain() -> SmoothChain {
        SmoothChain::with_defaults(preset_group(Preset::A2).unwrap()).unwrap()
    }

    #[test]
    fn jacobi_matches_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let s = SymEig3Model::unpack(&random_symmetric(&mut rng));
            let mut ours = jacobi_eigenvalues(&s);
            ours.sort_by(|a, b| a.total_cmp(b));
            let mut theirs: Vec<f64> = s.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
            theirs.sort_by(|a, b| a.total_cmp(b));
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pack_preserves_frobenius_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_symmetric(&mut rng);
        assert!((SymEig3Model::unpack(&v).norm() - v.norm()).abs() < 1e-14);
    }

    #[test]
    fn section_map_examples() {
        let m = sym_eig_model();
        let d = m.embed(&p(&[3.0, 1.0, 2.0]));
        assert_eq!(m.section_map(&d).unwrap(), p(&[3.0, 2.0, 1.0]));
        let rep = m.embed(&p(&[2.0, -1.0, 2.0]));
        let b = m.section_map(&rep).unwrap();
        assert_eq!(b, p(&[2.0, 2.0, -1.0]));
        assert_eq!(classify(m.weyl(), &b, ON_WALL_TOL).walls_containing.len(), 1);
    }

    #[test]
    fn conjugation_invariance() {
        let m = sym_eig_model();
        let chain = sym_chain();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_symmetric(&mut rng);
        let h = model_H(&m, &chain, &s).unwrap();
        for _ in 0..10 {
            let q = linalg::random_rotation(&mut rng, 3);
            let hq = model_H(&m, &chain, &m.act(&q, &s)).unwrap();
            assert!((hq - &h).norm() < 1e-9);
        }
    }

    #[test]
    fn identity_matrix_is_fixed() {
        let m = sym_eig_model();
        let chain = sym_chain();
        let id = m.embed(&p(&[1.0, 1.0, 1.0]));
        let h = model_H(&m, &chain, &id).unwrap();
        assert!((h - p(&[1.0, 1.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn radial_examples() {
        let m = radial_model(3).unwrap();
        let chain = SmoothChain::with_defaults(m.weyl().clone()).unwrap();
        assert_eq!(model_H(&m, &chain, &p(&[0.0, 0.0, 0.0])).unwrap()[0], 0.0);
        let two = p(&[0.0, 2.0, 0.0]);
        assert_eq!(model_H(&m, &chain, &two).unwrap()[0], 2.0);
        let half = p(&[0.3, 0.0, 0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = linalg::random_rotation(&mut rng, 3);
        let a = model_H(&m, &chain, &half).unwrap()[0];
        let b = model_H(&m, &chain, &(&q * &half)).unwrap()[0];
        assert!((a - b).abs() < 1e-15);
        assert!((a - chain.profile.h(0.5)).abs() < 1e-15);
        assert!(radial_model(1).is_err());
    }

    #[test]
    fn radial_spheres_are_equidistant() {
        let m = radial_model(3).unwrap();
        let chain = SmoothChain::with_defaults(m.weyl().clone()).unwrap();
        let r = equidistance_probe(&m, &chain, &p(&[1.0]), &p(&[1.5]), 10, 1).unwrap();
        assert!(r.spread <= 1e-8, "{r:?}");
        assert!((r.mean - 0.5).abs() < 1e-8);
        let same = equidistance_probe(&m, &chain, &p(&[1.0]), &p(&[1.0]), 3, 1).unwrap();
        assert!(same.mean < 1e-6);
        assert!(equidistance_probe(&m, &chain, &p(&[0.0]), &p(&[1.0]), 3, 1).is_err());
    }

    #[test]
    fn curve_probe_contrast() {
        let m = sym_eig_model();
        let chain = sym_chain();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let c = random_transversal_curve(&mut rng);
        let r = curve_jump_probe(&m, &chain, &c, &ProbeConfig::default()).unwrap();
        assert!(r.raw_jump >= 0.1, "{r:?}");
        assert!(r.report.slopes[0] >= 0.8, "{r:?}");
    }
}
