use crate::real::{tol, Real};

use super::hessian::SparseSymmetric;
use super::RicciError;

pub(crate) fn project_mean_zero<T: Real>(x: &mut [T]) {
    if x.is_empty() {
        return;
    }
    let mean = x.iter().copied().sum::<T>() / T::from_count(x.len());
    for v in x.iter_mut() {
        *v = *v - mean;
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Solves `H du = b` on the hyperplane `sum(du) = 0` by conjugate gradients.
///
/// `b` is projected first; the constant kernel is re-projected out of the
/// residual and search direction on every iteration. Stops at relative
/// residual `1e-12` or after `10 * n` iterations.
pub fn newton_step<T: Real>(h: &SparseSymmetric<T>, residual: &[T]) -> Result<Vec<T>, RicciError> {
    let n = h.dim();
    let mut b = residual.to_vec();
    project_mean_zero(&mut b);
    let b_norm = dot(&b, &b).sqrt();
    let mut x = vec![T::zero(); n];
    if b_norm == T::zero() {
        return Ok(x);
    }
    let target = T::lit(tol::CG) * b_norm;
    let mut r = b;
    let mut p = r.clone();
    let mut hp = vec![T::zero(); n];
    let mut rr = dot(&r, &r);
    let max_iter = 10 * n.max(1);
    for _ in 0..max_iter {
        h.mul_vec(&p, &mut hp);
        project_mean_zero(&mut hp);
        let php = dot(&p, &hp);
        if !(php > T::zero()) {
            return Err(RicciError::IndefiniteHessian);
        }
        let alpha = rr / php;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * hp[i];
        }
        project_mean_zero(&mut r);
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            project_mean_zero(&mut x);
            return Ok(x);
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        project_mean_zero(&mut p);
    }
    Err(RicciError::LinearSolve { iterations: max_iter, relative_residual: (rr.sqrt() / b_norm).to_f64_lossy() })
}
