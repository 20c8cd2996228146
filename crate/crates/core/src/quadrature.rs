//! Adaptive Gauss–Legendre panels for vector-valued integrands.

use std::f64::consts::PI;

use crate::{Error, Result};

const POINTS: usize = 20;
const MAX_DEPTH: u32 = 40;
const INITIAL_PANELS: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre three-term recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub(crate) struct Integrator {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rtol: f64,
}

impl Integrator {
    pub(crate) fn new(rtol: f64) -> Self {
        let (nodes, weights) = gauss_legendre(POINTS);
        Self { nodes, weights, rtol }
    }

    fn panel<F>(&self, f: &F, a: f64, b: f64, dim: usize) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = vec![0.0; dim];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let values = f(mid + half * x)?;
            for (slot, v) in acc.iter_mut().zip(values) {
                *slot += w * half * v;
            }
        }
        Ok(acc)
    }

    /// Integrates every component of `f` over `[a, b]`. A panel is accepted
    /// once its two halves change every component by less than `rtol` times
    /// that component's global magnitude.
    pub(crate) fn integrate<F>(&self, f: F, a: f64, b: f64, dim: usize) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        if b <= a {
            return Ok(vec![0.0; dim]);
        }
        let width = (b - a) / INITIAL_PANELS as f64;
        let mut panels = Vec::with_capacity(INITIAL_PANELS);
        let mut scale = vec![0.0f64; dim];
        for i in 0..INITIAL_PANELS {
            let (lo, hi) = (a + i as f64 * width, a + (i + 1) as f64 * width);
            let est = self.panel(&f, lo, hi, dim)?;
            for (s, v) in scale.iter_mut().zip(&est) {
                *s += v.abs();
            }
            panels.push((lo, hi, est, 0u32));
        }
        let tolerance: Vec<f64> = scale.iter().map(|s| self.rtol * s.max(f64::MIN_POSITIVE)).collect();

        let mut total = vec![0.0; dim];
        let mut converged = true;
        while let Some((lo, hi, est, depth)) = panels.pop() {
            let mid = 0.5 * (lo + hi);
            let left = self.panel(&f, lo, mid, dim)?;
            let right = self.panel(&f, mid, hi, dim)?;
            let refined: Vec<f64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
            let ok = refined.iter().zip(&est).zip(&tolerance).all(|((r, e), t)| (r - e).abs() <= *t);
            if ok || depth >= MAX_DEPTH {
                converged &= ok;
                for (t, r) in total.iter_mut().zip(&refined) {
                    *t += r;
                }
            } else {
                panels.push((lo, mid, left, depth + 1));
                panels.push((mid, hi, right, depth + 1));
            }
        }
        if converged {
            Ok(total)
        } else {
            Err(Error::Quadrature { estimate: total })
        }
    }
}
