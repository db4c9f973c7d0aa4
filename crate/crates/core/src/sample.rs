//! Seeded random instances: states, models, measurements and fixtures with
//! prescribed saturability properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::construct::analyze;
use crate::error::Result;
use crate::hollow::pcc_violation;
use crate::linalg::*;
use crate::model::{EstimationModel, GeneratorModel, PreparedModel, RankOnePovm};
use crate::quasipure::QuasiPureModel;
use crate::tolerances::Tolerances;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> CVec {
    loop {
        let v = CVec::from_fn(d, |_, _| c(gaussian(rng), gaussian(rng)));
        let n = v.norm();
        if n > 1e-6 {
            return v.unscale(n);
        }
    }
}

/// Haar-distributed unitary.
pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let qr = ginibre(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { ONE };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Hermitian with entries of unit scale.
pub fn hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()).unscale(2.0)
}

pub fn traceless_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let h = hermitian(rng, d);
    let t = trace(&h).re / d as f64;
    h - identity(d).scale(t)
}

/// Eigenvalues bounded away from each other and from zero.
pub fn spectrum(rng: &mut ChaCha8Rng, rank: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..rank).map(|k| 1.0 + k as f64 + rng.random::<f64>() * 0.8).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// State of the given rank, with its eigenbasis.
pub fn state(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> (CMat, CMat) {
    let u = unitary(rng, d);
    let p = spectrum(rng, rank);
    let mut rho = zeros(d);
    for (a, &pa) in p.iter().enumerate() {
        let col: CVec = u.column(a).into();
        rho += outer(&col, &col).scale(pa);
    }
    (hermitian_part(&rho), u)
}

/// A model whose derivatives mix a unitary part `−i[Hᵢ, ρ]` with a
/// support-preserving non-unitary part.
pub fn model(rng: &mut ChaCha8Rng, d: usize, s: usize, rank: usize, tol: &Tolerances) -> Result<EstimationModel> {
    let (rho, u) = state(rng, d, rank);
    let support = u.columns(0, rank).into_owned();
    let ps = &support * support.adjoint();
    let drho = (0..s)
        .map(|_| {
            let h = hermitian(rng, d);
            let unitary_part = commutator(&h, &rho).map(|z| -z * I);
            let a = hermitian(rng, d);
            let block = &ps * a * &ps;
            let t = trace(&block).re / rank as f64;
            let nonunitary = (block - ps.scale(t)).scale(0.3 / rank as f64);
            hermitian_part(&(unitary_part + nonunitary))
        })
        .collect();
    EstimationModel::new(rho, drho, vec![0.0; s], tol)
}

/// Pure state under unitary generators.
pub fn pure_generator_model(rng: &mut ChaCha8Rng, d: usize, hamiltonians: Vec<CMat>) -> GeneratorModel {
    let phi = unit_vector(rng, d);
    GeneratorModel {
        rho0: outer(&phi, &phi),
        lambda_point: vec![0.0; hamiltonians.len()],
        hamiltonians,
    }
}

/// Mutually commuting Hermitian generators sharing a random eigenbasis.
pub fn commuting_hamiltonians(rng: &mut ChaCha8Rng, d: usize, s: usize) -> Vec<CMat> {
    let u = unitary(rng, d);
    (0..s)
        .map(|_| {
            let diag = CMat::from_diagonal(&CVec::from_fn(d, |_, _| c(gaussian(rng), 0.0)));
            hermitian_part(&(&u * diag * u.adjoint()))
        })
        .collect()
}

pub fn quasipure_commuting(rng: &mut ChaCha8Rng, dp: usize, r: usize, s: usize) -> QuasiPureModel {
    let p = spectrum(rng, r);
    QuasiPureModel {
        branch_weights: p,
        branch_states: (0..r).map(|_| unit_vector(rng, dp)).collect(),
        generators: commuting_hamiltonians(rng, dp, s),
        lambda_point: vec![0.0; s],
    }
}

/// `m` rank-one elements `S^{-1/2}|vₖ⟩` with `S = Σ|vₖ⟩⟨vₖ|`.
pub fn rank_one_povm(rng: &mut ChaCha8Rng, d: usize, m: usize) -> RankOnePovm {
    assert!(m >= d, "a complete rank-one POVM needs at least d elements");
    loop {
        let raw: Vec<CVec> = (0..m).map(|_| unit_vector(rng, d)).collect();
        let mut s = zeros(d);
        for v in &raw {
            s += outer(v, v);
        }
        let (evals, _) = eigh(&s);
        if evals[0] < 1e-3 * evals[d - 1] {
            continue;
        }
        let t = inv_sqrt_psd(&s);
        return RankOnePovm::new(raw.iter().map(|v| &t * v).collect());
    }
}

/// Random orthonormal basis as a projective measurement.
pub fn projective_povm(rng: &mut ChaCha8Rng, d: usize) -> RankOnePovm {
    let u = unitary(rng, d);
    RankOnePovm::new((0..d).map(|k| u.column(k).into()).collect())
}

/// `d²` rank-one elements spanning the Hermitian operators.
pub fn ic_povm(rng: &mut ChaCha8Rng, d: usize, tol: &Tolerances) -> RankOnePovm {
    loop {
        let povm = rank_one_povm(rng, d, d * d);
        let elements: Vec<CMat> = (0..povm.len()).map(|w| povm.element(w)).collect();
        if crate::geometry::gram_rank(&elements, tol.gs) == d * d {
            return povm;
        }
    }
}

/// Full-rank two-parameter model whose PCC violation exceeds the threshold
/// by at least `margin`.
pub fn pcc_violating_model(rng: &mut ChaCha8Rng, d: usize, margin: f64, tol: &Tolerances) -> Result<PreparedModel> {
    loop {
        let m = model(rng, d, 2, d, tol)?;
        let p = PreparedModel::new(m, tol)?;
        let thr = tol.pcc * p.slds.commutator_scale();
        if pcc_violation(&p.spectral, &p.slds) > margin * thr {
            return Ok(p);
        }
    }
}

/// Model with `n < d − 1`; full-rank multiparameter models fill the
/// operator space.
pub fn dimension_bound_fixture(rng: &mut ChaCha8Rng, d: usize, tol: &Tolerances) -> Result<PreparedModel> {
    loop {
        let m = model(rng, d, 2, d, tol)?;
        let p = PreparedModel::new(m, tol)?;
        if analyze(&p, tol)?.summary.n < d as i64 - 1 {
            return Ok(p);
        }
    }
}

/// Single-parameter family `ρ(λ) = U_λ(ρ₀ + λD)U_λ†`, `U_λ = exp(−iλH)`, with
/// `D` traceless and supported on the support of `ρ₀`.
#[derive(Debug, Clone)]
pub struct ParametricFamily {
    pub rho0: CMat,
    pub hamiltonian: CMat,
    pub direction: CMat,
}

impl ParametricFamily {
    pub fn random(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> Self {
        let (rho0, u) = state(rng, d, rank);
        let support = u.columns(0, rank).into_owned();
        let ps = &support * support.adjoint();
        let a = hermitian(rng, d);
        let block = &ps * a * &ps;
        let t = trace(&block).re / rank as f64;
        ParametricFamily {
            rho0,
            hamiltonian: hermitian(rng, d),
            direction: hermitian_part(&(block - ps.scale(t)).scale(0.1 / rank as f64)),
        }
    }

    pub fn rho_at(&self, lambda: f64) -> CMat {
        let u = unitary_from_hamiltonian(&self.hamiltonian.scale(lambda));
        hermitian_part(&(&u * (&self.rho0 + self.direction.scale(lambda)) * u.adjoint()))
    }

    /// `∂ρ` at `λ = 0`.
    pub fn derivative(&self) -> CMat {
        hermitian_part(&(commutator(&self.hamiltonian, &self.rho0).map(|z| -z * I) + &self.direction))
    }

    pub fn model(&self, tol: &Tolerances) -> Result<EstimationModel> {
        EstimationModel::new(self.rho0.clone(), vec![self.derivative()], vec![0.0], tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(1);
        let u = unitary(&mut r, 5);
        assert!(max_abs(&(u.adjoint() * &u - identity(5))) < 1e-13);
    }

    #[test]
    fn random_povm_is_complete() {
        let mut r = rng(2);
        assert!(rank_one_povm(&mut r, 4, 7).completeness_residual() < 1e-12);
        let ic = ic_povm(&mut r, 3, &Tolerances::default());
        assert_eq!(ic.len(), 9);
        assert!(ic.completeness_residual() < 1e-12);
    }

    #[test]
    fn random_models_validate() {
        let mut r = rng(3);
        let tol = Tolerances::default();
        for (d, s, k) in [(2, 1, 1), (3, 2, 2), (5, 3, 5)] {
            let m = model(&mut r, d, s, k, &tol).unwrap();
            assert_eq!((m.dim, m.num_params), (d, s));
        }
    }

    #[test]
    fn family_derivative_matches_finite_difference() {
        let mut r = rng(4);
        let fam = ParametricFamily::random(&mut r, 3, 2);
        let h = 1e-5;
        let fd = (fam.rho_at(h) - fam.rho_at(-h)).unscale(2.0 * h);
        assert!(max_abs(&(fd - fam.derivative())) < 1e-8);
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = hermitian(&mut rng(9), 3);
        let b = hermitian(&mut rng(9), 3);
        assert_eq!(a, b);
    }
}
