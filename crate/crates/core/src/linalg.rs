//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type Point = DVector<f64>;

/// Gram-Schmidt with re-orthogonalization; vectors whose residual falls
/// below `tol` are dropped.
pub fn orthonormalize(vectors: &[Point], tol: f64) -> Vec<Point> {
    let mut basis: Vec<Point> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / norm);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)` in R^n.
pub fn orthogonal_complement(vectors: &[Point], n: usize) -> Vec<Point> {
    let span = orthonormalize(vectors, 1e-9);
    let mut all = span.clone();
    all.extend((0..n).map(|i| Point::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })));
    orthonormalize(&all, 1e-9).split_off(span.len())
}

/// Orthogonal projection of `p` onto the span of an orthonormal `basis`.
pub fn project(basis: &[Point], p: &Point) -> Point {
    let mut out = Point::zeros(p.len());
    for b in basis {
        out.axpy(p.dot(b), b, 1.0);
    }
    out
}

/// Rank of a set of vectors at tolerance `tol`.
pub fn rank(vectors: &[Point], tol: f64) -> usize {
    orthonormalize(vectors, tol).len()
}

pub fn unit(n: usize, i: usize) -> Point {
    Point::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })
}

pub fn random_gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Point {
    Point::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Point {
    loop {
        let v = random_gaussian(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Haar-distributed rotation in SO(n) via QR of a Gaussian matrix.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Number of free parameters of a skew-symmetric n x n matrix.
pub fn skew_dim(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Cayley map from skew parameters to SO(n): (I - K)^{-1} (I + K).
pub fn cayley(params: &[f64], n: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = params[idx] * 0.5;
            k[(i, j)] = a;
            k[(j, i)] = -a;
            idx += 1;
        }
    }
    let id = DMatrix::<f64>::identity(n, n);
    let lhs = &id - &k;
    let rhs = &id + &k;
    lhs.lu().solve(&rhs).expect("I - K is invertible for skew K")
}

/// Max absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complement_of_diagonal_in_r3() {
        let d = Point::from_vec(vec![1.0, 1.0, 1.0]);
        let c = orthogonal_complement(&[d.clone()], 3);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(v.dot(&d).abs() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..6 {
            let q = random_rotation(&mut rng, n);
            let qtq = q.transpose() * &q;
            assert!(max_abs_diff(&qtq, &DMatrix::identity(n, n)) < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cayley_is_orthogonal_and_identity_at_zero() {
        let q = cayley(&[0.3, -0.2, 0.9], 3);
        assert!(max_abs_diff(&(q.transpose() * &q), &DMatrix::identity(3, 3)) < 1e-12);
        assert!(max_abs_diff(&cayley(&[0.0; 3], 3), &DMatrix::identity(3, 3)) < 1e-15);
    }
}
