//! Finite-difference derivative estimates, jump probes across strata and
//! growth-rate fits for the tube maps.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chamber::{classify, fold, ON_WALL_TOL};
use crate::error::{Error, Result};
use crate::linalg::Point;
use crate::smoothing::tubes::{sample_normal_direction, sample_open_face};
use crate::smoothing::SmoothChain;

pub type Map<'a> = dyn Fn(&Point) -> Point + 'a;

/// Central-difference Jacobian.
pub fn fd_jacobian(f: &Map, p: &Point, step: f64) -> DMatrix<f64> {
    let n = p.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut a = p.clone();
        let mut b = p.clone();
        a[i] += step;
        b[i] -= step;
        cols.push((f(&a) - f(&b)) / (2.0 * step));
    }
    DMatrix::from_columns(&cols)
}

/// Central-difference derivative of order 1, 2 or 3 along `direction`.
pub fn fd_directional(f: &Map, p: &Point, direction: &Point, order: usize, step: f64) -> Result<Point> {
    let at = |s: f64| f(&(p + direction * s));
    match order {
        1 => Ok((at(step) - at(-step)) / (2.0 * step)),
        2 => Ok((at(step) - at(0.0) * 2.0 + at(-step)) / (step * step)),
        3 => Ok((at(2.0 * step) - at(step) * 2.0 + at(-step) * 2.0 - at(-2.0 * step)) / (2.0 * step.powi(3))),
        _ => Err(Error::input(format!("directional order {order} not in 1..=3"))),
    }
}

/// Hessians of every output component, `out[c][(i, j)] = d2 f_c / dx_i dx_j`.
pub fn fd_hessian(f: &Map, p: &Point, step: f64) -> Vec<DMatrix<f64>> {
    let n = p.len();
    let f0 = f(p);
    let m = f0.len();
    let mut out = vec![DMatrix::zeros(n, n); m];
    let shifted = |i: usize, a: f64, j: usize, b: f64| {
        let mut q = p.clone();
        q[i] += a;
        q[j] += b;
        f(&q)
    };
    for i in 0..n {
        let plus = shifted(i, step, i, 0.0);
        let minus = shifted(i, -step, i, 0.0);
        let d = (plus - &f0 * 2.0 + minus) / (step * step);
        for c in 0..m {
            out[c][(i, i)] = d[c];
        }
        for j in (i + 1)..n {
            let d = (shifted(i, step, j, step) - shifted(i, step, j, -step) - shifted(i, -step, j, step)
                + shifted(i, -step, j, -step))
                / (4.0 * step * step);
            for c in 0..m {
                out[c][(i, j)] = d[c];
                out[c][(j, i)] = d[c];
            }
        }
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeConfig {
    /// Offsets as fractions of the local length scale, strictly decreasing.
    pub offsets: Vec<f64>,
    pub orders: Vec<usize>,
    /// Stencil step as a fraction of the offset.
    pub step_ratio: f64,
    /// Resolution floor per order: a jump below
    /// `floors[k - 1] * (delta / L) / L^(k - 1)` is unresolved.
    pub floors: Vec<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            offsets: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
            orders: vec![1, 2],
            step_ratio: 0.25,
            floors: vec![1e-4, 10.0, 1e3],
        }
    }
}

impl ProbeConfig {
    pub fn check(&self) -> Result<()> {
        if self.offsets.is_empty() || self.offsets.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::config("probe offsets must be strictly decreasing"));
        }
        if self.offsets.iter().any(|&o| !(o > 1e-14)) {
            return Err(Error::config("probe offsets must be positive"));
        }
        if self.orders.iter().any(|&k| !(1..=3).contains(&k)) {
            return Err(Error::config("probe orders must lie in 1..=3"));
        }
        if self.floors.len() < 3 || self.floors.iter().any(|&f| !(f > 0.0)) {
            return Err(Error::config("probe floors need three positive values"));
        }
        if !(self.step_ratio > 0.0 && self.step_ratio < 0.5) {
            return Err(Error::config("probe step ratio must lie in (0, 0.5)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    /// Absolute offsets `delta`.
    pub offsets: Vec<f64>,
    pub orders: Vec<usize>,
    /// `jump_norms[k][j]`: order `orders[k]` at offset `offsets[j]`.
    pub jump_norms: Vec<Vec<f64>>,
    pub control_jumps: Option<Vec<Vec<f64>>>,
    /// Resolution floor per order and offset.
    pub floors: Vec<Vec<f64>>,
    pub slopes: Vec<f64>,
    pub control_slopes: Option<Vec<f64>>,
    /// Entries of `jump_norms` above their floor.
    pub resolved: usize,
    pub length_scale: f64,
}

fn jump(f: &Map, x: &Point, v: &Point, delta: f64, order: usize, step: f64) -> f64 {
    let a = x + v * delta;
    let b = x - v * delta;
    match order {
        1 => (fd_jacobian(f, &a, step) - fd_jacobian(f, &b, step)).norm(),
        2 => fd_hessian(f, &a, step)
            .iter()
            .zip(fd_hessian(f, &b, step))
            .map(|(p, q)| (p - q).norm_squared())
            .sum::<f64>()
            .sqrt(),
        _ => {
            let da = fd_directional(f, &a, v, order, step).expect("order checked");
            let db = fd_directional(f, &b, v, order, step).expect("order checked");
            (da - db).norm()
        }
    }
}

fn fitted_slopes(offsets: &[f64], jumps: &[Vec<f64>], floors: &[Vec<f64>]) -> Vec<f64> {
    jumps
        .iter()
        .zip(floors)
        .map(|(js, fs)| {
            let ys: Vec<f64> = js.iter().zip(fs).map(|(j, f)| j.max(*f)).collect();
            loglog_slope(offsets, &ys)
        })
        .collect()
}

/// Derivative mismatch of `f` between `x + delta v` and `x - delta v`.
pub fn jump_probe(
    f: &Map,
    control: Option<&Map>,
    x: &Point,
    v: &Point,
    length_scale: f64,
    cfg: &ProbeConfig,
) -> Result<ProbeReport> {
    cfg.check()?;
    if !(length_scale > 0.0) {
        return Err(Error::input("length scale must be positive"));
    }
    let offsets: Vec<f64> = cfg.offsets.iter().map(|o| o * length_scale).collect();
    let measure = |g: &Map| -> Vec<Vec<f64>> {
        cfg.orders
            .iter()
            .map(|&k| offsets.iter().map(|&d| jump(g, x, v, d, k, cfg.step_ratio * d)).collect())
            .collect()
    };
    let floors: Vec<Vec<f64>> = cfg
        .orders
        .iter()
        .map(|&k| {
            offsets
                .iter()
                .map(|d| cfg.floors[k - 1] * (d / length_scale) / length_scale.powi(k as i32 - 1))
                .collect()
        })
        .collect();
    let jump_norms = measure(f);
    let resolved = jump_norms
        .iter()
        .zip(&floors)
        .map(|(js, fs)| js.iter().zip(fs).filter(|(j, f)| j > f).count())
        .sum();
    let slopes = fitted_slopes(&offsets, &jump_norms, &floors);
    let control_jumps = control.map(measure);
    let control_slopes = control_jumps.as_ref().map(|c| fitted_slopes(&offsets, c, &floors));
    Ok(ProbeReport {
        offsets,
        orders: cfg.orders.clone(),
        jump_norms,
        control_jumps,
        floors,
        slopes,
        control_slopes,
        resolved,
        length_scale,
    })
}

/// Jump probe of `H` across the single mirror through `x`, with the raw fold
/// as control.
pub fn wall_jump_probe(chain: &SmoothChain, x: &Point, cfg: &ProbeConfig) -> Result<ProbeReport> {
    chain.group.check_dimension(x)?;
    let desc = classify(&chain.group, x, ON_WALL_TOL);
    if desc.walls_containing.len() != 1 {
        return Err(Error::input(format!(
            "probe point lies on {} mirrors, expected exactly one",
            desc.walls_containing.len()
        )));
    }
    let v = chain.group.mirrors[desc.walls_containing[0]].normal().clone();
    let image = fold(&chain.group, &chain.chamber, x)?.image;
    let face = chain
        .stratification
        .face_of(&image, ON_WALL_TOL)
        .ok_or_else(|| Error::input("probe point has no face"))?;
    let scale = chain.radius(face.index, &image);
    let h = |q: &Point| chain.apply_H(q).expect("dimension checked");
    let pi = |q: &Point| fold(&chain.group, &chain.chamber, q).expect("dimension checked").image;
    jump_probe(&h, Some(&pi), x, &v, scale, cfg)
}

/// Jump probe of `H` along the line through a fixed point `x0` in direction
/// `u` of the essential subspace; length scale `c0`.
pub fn origin_probe(chain: &SmoothChain, x0: &Point, u: &Point, cfg: &ProbeConfig) -> Result<ProbeReport> {
    chain.group.check_dimension(x0)?;
    let (_, eff) = chain.group.essential_split(x0);
    if eff.norm() > ON_WALL_TOL * (1.0 + x0.norm()) {
        return Err(Error::input("line base is not on the lowest stratum"));
    }
    let (_, ue) = chain.group.essential_split(u);
    if ue.norm() < 1e-12 {
        return Err(Error::input("direction has no essential component"));
    }
    let ue = &ue / ue.norm();
    let h = |q: &Point| chain.apply_H(q).expect("dimension checked");
    let pi = |q: &Point| fold(&chain.group, &chain.chamber, q).expect("dimension checked").image;
    jump_probe(&h, Some(&pi), x0, &ue, chain.tubes.c0, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSchedule {
    /// Distances from the lower strata, decreasing.
    pub distances: Vec<f64>,
    pub samples: usize,
    /// Relative depth of the sample inside the tube.
    pub depth: f64,
    pub seed: u64,
}

impl Default for GrowthSchedule {
    fn default() -> Self {
        Self {
            distances: vec![0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005],
            samples: 8,
            depth: 0.5,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub level: usize,
    /// Mean tube radius per distance.
    pub radii: Vec<f64>,
    /// Largest Frobenius norms of the first and second derivatives per distance.
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Fitted exponents of `d1`, `d2` against `1 / l`.
    pub exponents: [f64; 2],
}

/// Growth of the derivatives of `G_i = F_i o ... o F_(r-1)` as the foot
/// approaches the lower strata.
pub fn growth_bound_check(chain: &SmoothChain, level: usize, schedule: &GrowthSchedule) -> Result<GrowthReport> {
    if level == 0 || level >= chain.rank() {
        return Err(Error::input(format!("level {level} has no variable tube radius")));
    }
    if schedule.distances.len() < 2 || schedule.samples == 0 {
        return Err(Error::config("growth schedule needs two distances and one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed ^ level as u64);
    let strat = &chain.stratification;
    let faces: Vec<_> = strat.faces_at(level).collect();
    // Fixed shapes rescaled to each distance.
    let mut shapes = Vec::new();
    for s in 0..schedule.samples {
        let face = faces[s % faces.len()];
        let mut x = sample_open_face(chain, face, &mut rng);
        let (_, eff) = chain.group.essential_split(&x);
        x = eff;
        let d = face.facets.iter().map(|&k| strat.dist_to_face(k, &x)).fold(f64::INFINITY, f64::min);
        let v = sample_normal_direction(face, &mut rng).expect("level below rank has normals");
        shapes.push((face.index, x / d, v));
    }
    let gi = |q: &Point| chain.apply_partial(level, q);
    let mut radii = Vec::new();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for &dist in &schedule.distances {
        let mut rsum = 0.0;
        let mut m1: f64 = 0.0;
        let mut m2: f64 = 0.0;
        for (face, xhat, v) in &shapes {
            let x = xhat * dist;
            let l = chain.radius(*face, &x);
            rsum += l;
            let p = &x + v * (schedule.depth * l);
            let scale = chain
                .trace(&p)
                .iter()
                .filter(|h| h.level >= level)
                .map(|h| h.radius)
                .fold(l, f64::min);
            m1 = m1.max(fd_jacobian(&gi, &p, 1e-4 * scale).norm());
            let hess = fd_hessian(&gi, &p, 1e-2 * scale);
            m2 = m2.max(hess.iter().map(|h| h.norm_squared()).sum::<f64>().sqrt());
        }
        radii.push(rsum / shapes.len() as f64);
        d1.push(m1);
        d2.push(m2);
    }
    let inv: Vec<f64> = radii.iter().map(|l| 1.0 / l).collect();
    let exponents = [loglog_slope(&inv, &d1), loglog_slope(&inv, &d2.iter().map(|v| v.max(1e-300)).collect::<Vec<_>>())];
    Ok(GrowthReport { level, radii, d1, d2, exponents })
}

/// Random point of the chamber lying on exactly one mirror, with wall tube
/// radius at least `min_radius` and norm at most `max_norm`.
pub fn random_wall_point<R: Rng>(chain: &SmoothChain, min_radius: f64, max_norm: f64, rng: &mut R) -> Point {
    let strat = &chain.stratification;
    let level = chain.rank() - 1;
    let faces: Vec<_> = strat.faces_at(level).collect();
    loop {
        let face = faces[rng.random_range(0..faces.len())];
        let x = sample_open_face(chain, face, rng);
        let desc = classify(&chain.group, &x, ON_WALL_TOL);
        if desc.walls_containing.len() == 1 && x.norm() <= max_norm && chain.radius(face.index, &x) >= min_radius {
            return x;
        }
    }
}
