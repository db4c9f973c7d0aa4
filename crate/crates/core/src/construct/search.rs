//! Multi-start search for unit vectors `π` with `|π⟩⟨π| ⟂ 𝒱`.
//!
//! Restricted to the orthogonal complement `Q` of the constraint vectors,
//! the unknown is `z` with `π = Qz`, and the residuals are
//! `z†(Q†BₖQ)z` for an orthonormal basis `{Bₖ}` of the compressed subspace
//! together with `‖z‖² − 1`. Each restart runs Levenberg-Marquardt on these
//! residuals from a seeded Gaussian start.

use nalgebra::Cholesky;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::geometry::{span_subspace, HermitianBasis};
use crate::linalg::*;

/// Restarts evaluated together; results are reduced by restart index, so
/// the outcome does not depend on the thread count.
const BATCH: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub max_restarts: usize,
    pub max_iters: usize,
    /// Largest accepted `‖P_𝒱(|π⟩⟨π|)‖_F` for a unit `π`.
    pub accept: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_restarts: 64,
            max_iters: 5000,
            accept: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HollowVector {
    pub pi: CVec,
    pub residual: f64,
    pub restart: usize,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(HollowVector),
    Infeasible { best: Option<HollowVector>, restarts: usize },
}

impl SearchOutcome {
    pub fn found(self) -> Option<HollowVector> {
        match self {
            SearchOutcome::Found(h) => Some(h),
            SearchOutcome::Infeasible { .. } => None,
        }
    }
}

/// Deterministic generator for one restart of one search.
pub fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, m: usize) -> CVec {
    loop {
        let v = CVec::from_fn(m, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            c(re, im)
        });
        let n = v.norm();
        if n > 1e-8 {
            return v.unscale(n);
        }
    }
}

struct Problem {
    q: CMat,
    mats: Vec<CMat>,
}

impl Problem {
    fn residuals(&self, z: &CVec) -> RVec {
        let p = self.mats.len();
        let mut r = RVec::zeros(p + 1);
        for (k, a) in self.mats.iter().enumerate() {
            r[k] = expect(z, a).re;
        }
        r[p] = z.norm_squared() - 1.0;
        r
    }

    fn jacobian(&self, z: &CVec) -> RMat {
        let m = z.len();
        let p = self.mats.len();
        let mut j = RMat::zeros(p + 1, 2 * m);
        for (k, a) in self.mats.iter().enumerate() {
            let az = a * z;
            for t in 0..m {
                j[(k, t)] = 2.0 * az[t].re;
                j[(k, m + t)] = 2.0 * az[t].im;
            }
        }
        for t in 0..m {
            j[(p, t)] = 2.0 * z[t].re;
            j[(p, m + t)] = 2.0 * z[t].im;
        }
        j
    }

    /// `‖P(zz†)‖_F` for unit `z`.
    fn hollow_residual(&self, z: &CVec) -> f64 {
        let u = z.unscale(z.norm());
        self.mats
            .iter()
            .map(|a| expect(&u, a).re.powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn to_complex(x: &RVec) -> CVec {
    let m = x.len() / 2;
    CVec::from_fn(m, |t, _| c(x[t], x[m + t]))
}

fn to_real(z: &CVec) -> RVec {
    let m = z.len();
    RVec::from_fn(2 * m, |t, _| if t < m { z[t].re } else { z[t - m].im })
}

fn levenberg_marquardt(prob: &Problem, z0: CVec, max_iters: usize, target: f64) -> CVec {
    let mut x = to_real(&z0);
    let mut r = prob.residuals(&z0);
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = 1e-3;
    let mut nu = 2.0;
    let n = x.len();
    for _ in 0..max_iters {
        if r.norm() <= target {
            break;
        }
        let z = to_complex(&x);
        let jac = prob.jacobian(&z);
        let g = jac.transpose() * &r;
        let h = jac.transpose() * &jac;
        let hmax = (0..n).map(|k| h[(k, k)]).fold(1e-12, f64::max);
        let mut damped = h.clone();
        for k in 0..n {
            damped[(k, k)] += lambda * hmax;
        }
        let Some(chol) = Cholesky::new(damped) else {
            lambda *= nu;
            nu *= 2.0;
            continue;
        };
        let step = chol.solve(&(-&g));
        let x_new = &x + &step;
        let r_new = prob.residuals(&to_complex(&x_new));
        let cost_new = 0.5 * r_new.norm_squared();
        let predicted = -(g.dot(&step) + 0.5 * step.dot(&(&h * &step)));
        if cost_new < cost {
            let actual = cost - cost_new;
            let rho = if predicted > 0.0 { actual / predicted } else { 1.0 };
            x = x_new;
            r = r_new;
            let converged = actual <= 1e-14 * cost;
            cost = cost_new;
            lambda *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
            nu = 2.0;
            if converged {
                break;
            }
        } else {
            lambda *= nu;
            nu *= 2.0;
            if lambda > 1e16 {
                break;
            }
        }
    }
    to_complex(&x)
}

/// Unit `π` orthogonal to every vector in `constraints` with
/// `‖P_𝒱(|π⟩⟨π|)‖_F ≤ opts.accept`, where `v` is an orthonormal basis of 𝒱.
///
/// Restart `k` draws its start from stream `stream_base + k` of `seed`; the
/// lowest-indexed successful restart is returned.
pub fn find_hollow_vector(
    v: &HermitianBasis,
    constraints: &[CVec],
    seed: u64,
    stream_base: u64,
    opts: &SearchOptions,
) -> SearchOutcome {
    let d = v.dim;
    let q = orth_complement(constraints, d);
    let m = q.ncols();
    if m == 0 {
        return SearchOutcome::Infeasible {
            best: None,
            restarts: 0,
        };
    }
    let compressed: Vec<CMat> = v
        .elements
        .iter()
        .map(|b| hermitian_part(&(q.adjoint() * b * &q)))
        .collect();
    let mats = span_subspace(&compressed, m, 1e-12).elements;
    let prob = Problem { q, mats };

    let run = |restart: usize| -> HollowVector {
        let mut rng = restart_rng(seed, stream_base.wrapping_add(restart as u64));
        let z0 = random_unit_vector(&mut rng, m);
        let z = levenberg_marquardt(&prob, z0, opts.max_iters, opts.accept * 1e-4);
        let z = z.unscale(z.norm());
        let residual = prob.hollow_residual(&z);
        HollowVector {
            pi: &prob.q * z,
            residual,
            restart,
        }
    };

    let mut best: Option<HollowVector> = None;
    let mut start = 0;
    while start < opts.max_restarts {
        let end = (start + BATCH).min(opts.max_restarts);
        let batch: Vec<HollowVector> = (start..end).into_par_iter().map(run).collect();
        for h in batch {
            if h.residual <= opts.accept {
                return SearchOutcome::Found(h);
            }
            if best.as_ref().is_none_or(|b| h.residual < b.residual) {
                best = Some(h);
            }
        }
        start = end;
    }
    SearchOutcome::Infeasible {
        best,
        restarts: opts.max_restarts,
    }
}
