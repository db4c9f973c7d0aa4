//! Parametric density-matrix models, symmetric logarithmic derivatives and
//! Fisher information matrices.
//!
//! A model is a state `ρ` together with its parameter derivatives `∂ᵢρ` at a
//! working point. The SLD `Lᵢ` solves `(Lᵢρ + ρLᵢ)/2 = ∂ᵢρ`; it is unique on
//! everything except the kernel-kernel block, which is fixed to zero.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::*;
use crate::tolerances::Tolerances;

/// A state and its parameter derivatives at one working point.
#[derive(Debug, Clone)]
pub struct EstimationModel {
    pub dim: usize,
    pub num_params: usize,
    pub rho: CMat,
    pub drho: Vec<CMat>,
    /// Informational only.
    pub lambda_point: Vec<f64>,
}

/// A state family `ρ_λ = U_λ ρ₀ U_λ†` with `U_λ = exp(−i Σⱼ λⱼHⱼ)`.
#[derive(Debug, Clone)]
pub struct GeneratorModel {
    pub rho0: CMat,
    pub hamiltonians: Vec<CMat>,
    pub lambda_point: Vec<f64>,
}

/// Spectral data of a state: support eigenpairs in descending order plus an
/// orthonormal kernel basis.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Support eigenvalues `pₐ`, descending.
    pub eigenvalues: Vec<f64>,
    /// `d × r` matrix whose columns are the support eigenvectors `|ψₐ⟩`.
    pub eigenvectors: CMat,
    /// `d × (d − r)` orthonormal kernel basis.
    pub kernel_basis: CMat,
    pub rank: usize,
    pub support_projector: CMat,
    pub kernel_projector: CMat,
    pub tol_rank: f64,
    /// Set when two support eigenvalues are closer than the degeneracy gap.
    pub degenerate: bool,
}

/// The SLDs `L₁ … L_s` of a model.
#[derive(Debug, Clone)]
pub struct SldSet {
    pub operators: Vec<CMat>,
}

/// A rank-one POVM `E_ω = α⁽ω⁾ |π_ω⟩⟨π_ω|`.
///
/// Without weights every `α⁽ω⁾` is 1 and the vectors carry their own norm.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePovm {
    pub vectors: Vec<CVec>,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Qfim {
    pub matrix: RMat,
    pub min_eigenvalue: f64,
    pub singular: bool,
}

#[derive(Debug, Clone)]
pub struct BornData {
    pub probs: Vec<f64>,
    /// `s × |Ω|`, entry `(i, ω)` is `∂ᵢp(ω)`.
    pub dprobs: RMat,
    pub null: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Cfim {
    pub total: RMat,
    pub per_outcome: Vec<RMat>,
    pub null_outcomes: Vec<usize>,
}

impl EstimationModel {
    pub fn new(rho: CMat, drho: Vec<CMat>, lambda_point: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let model = EstimationModel {
            dim: rho.nrows(),
            num_params: drho.len(),
            rho,
            drho,
            lambda_point,
        };
        model.validate(tol)?;
        Ok(model)
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        validate_state(&self.rho, "rho", tol)?;
        if self.dim != self.rho.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "dim = {} but rho is {}x{}",
                self.dim,
                self.rho.nrows(),
                self.rho.ncols()
            )));
        }
        if self.num_params != self.drho.len() || self.num_params == 0 {
            return Err(Error::DimensionMismatch(format!(
                "num_params = {} but {} derivatives supplied",
                self.num_params,
                self.drho.len()
            )));
        }
        for (i, d) in self.drho.iter().enumerate() {
            check_square(d, self.dim, &format!("drho[{i}]"))?;
            let defect = hermitian_defect(d);
            if defect > tol.herm {
                return Err(Error::NonHermitianInput {
                    what: format!("drho[{i}]"),
                    defect,
                });
            }
            let tr = d.trace();
            if tr.norm() > tol.trace * (1.0 + frobenius(d)) {
                return Err(Error::BadTrace {
                    what: format!("drho[{i}]"),
                    trace: tr.re,
                    expected: 0.0,
                });
            }
        }
        Ok(())
    }
}

fn check_square(m: &CMat, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {d}x{d}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Hermitian, unit trace, positive semidefinite.
pub fn validate_state(rho: &CMat, what: &str, tol: &Tolerances) -> Result<()> {
    let d = rho.nrows();
    check_square(rho, d, what)?;
    if d == 0 {
        return Err(Error::DimensionMismatch(format!("{what} is empty")));
    }
    let defect = hermitian_defect(rho);
    if defect > tol.herm {
        return Err(Error::NonHermitianInput {
            what: what.to_string(),
            defect,
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
        return Err(Error::BadTrace {
            what: what.to_string(),
            trace: tr.re,
            expected: 1.0,
        });
    }
    let (vals, _) = eigh(rho);
    if vals[0] < -tol.psd {
        return Err(Error::NegativeEigenvalue(vals[0]));
    }
    Ok(())
}

fn generators_commute(hs: &[CMat], tol: &Tolerances) -> bool {
    for (j, a) in hs.iter().enumerate() {
        for b in &hs[j + 1..] {
            let scale = 1.0f64.max(frobenius(a) * frobenius(b));
            if frobenius(&commutator(a, b)) > tol.herm * scale {
                return false;
            }
        }
    }
    true
}

impl GeneratorModel {
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        validate_state(&self.rho0, "rho0", tol)?;
        let d = self.rho0.nrows();
        if self.hamiltonians.is_empty() {
            return Err(Error::DimensionMismatch("no generators supplied".into()));
        }
        if self.lambda_point.len() != self.hamiltonians.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generators but lambda has {} entries",
                self.hamiltonians.len(),
                self.lambda_point.len()
            )));
        }
        for (j, h) in self.hamiltonians.iter().enumerate() {
            check_square(h, d, &format!("hamiltonians[{j}]"))?;
            let defect = hermitian_defect(h);
            if defect > tol.herm {
                return Err(Error::NonHermitianInput {
                    what: format!("hamiltonians[{j}]"),
                    defect,
                });
            }
        }
        Ok(())
    }

    pub fn unitary_at(&self, lambda: &[f64]) -> CMat {
        let d = self.rho0.nrows();
        let mut h = zeros(d);
        for (hj, &l) in self.hamiltonians.iter().zip(lambda) {
            h += hj.scale(l);
        }
        unitary_from_hamiltonian(&h)
    }

    pub fn rho_at(&self, lambda: &[f64]) -> CMat {
        let u = self.unitary_at(lambda);
        hermitian_part(&(&u * &self.rho0 * u.adjoint()))
    }

    pub fn commuting(&self, tol: &Tolerances) -> bool {
        generators_commute(&self.hamiltonians, tol)
    }

    /// Central differences of `ρ_λ` with one Richardson step (fourth order).
    pub fn finite_difference_derivatives(&self, h: f64) -> Vec<CMat> {
        let lam = &self.lambda_point;
        (0..self.hamiltonians.len())
            .map(|i| {
                let central = |step: f64| {
                    let mut plus = lam.clone();
                    let mut minus = lam.clone();
                    plus[i] += step;
                    minus[i] -= step;
                    (self.rho_at(&plus) - self.rho_at(&minus)).unscale(2.0 * step)
                };
                let coarse = central(h);
                let fine = central(h / 2.0);
                hermitian_part(&(fine.scale(4.0) - coarse).unscale(3.0))
            })
            .collect()
    }
}

/// Realize `ρ_λ` and `∂ᵢρ_λ` at the generator model's working point.
///
/// Commuting generators use `∂ᵢρ = −i[Hᵢ, ρ]`; otherwise derivatives come from
/// Richardson-extrapolated central differences with step `tol.fd_step`.
pub fn materialize(gen: &GeneratorModel, tol: &Tolerances) -> Result<EstimationModel> {
    gen.validate(tol)?;
    let rho = gen.rho_at(&gen.lambda_point);
    let drho = if gen.commuting(tol) {
        gen.hamiltonians
            .iter()
            .map(|h| commutator(h, &rho).scale(-1.0).map(|z| z * I))
            .map(|m| hermitian_part(&m))
            .collect()
    } else {
        gen.finite_difference_derivatives(tol.fd_step)
    };
    EstimationModel::new(rho, drho, gen.lambda_point.clone(), tol)
}

impl SpectralData {
    /// Assemble spectral data from known support eigenpairs (descending
    /// eigenvalues, orthonormal columns).
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: CMat, tol: &Tolerances) -> Self {
        let d = eigenvectors.nrows();
        let rank = eigenvalues.len();
        let support: Vec<CVec> = (0..rank).map(|a| eigenvectors.column(a).into_owned()).collect();
        let kernel_basis = orth_complement(&support, d);
        let support_projector = &eigenvectors * eigenvectors.adjoint();
        let kernel_projector = &kernel_basis * kernel_basis.adjoint();
        let degenerate = eigenvalues.windows(2).any(|w| (w[0] - w[1]).abs() < tol.degen);
        SpectralData {
            eigenvalues,
            eigenvectors,
            kernel_basis,
            rank,
            support_projector,
            kernel_projector,
            tol_rank: tol.rank,
            degenerate,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvectors.nrows()
    }

    pub fn psi(&self, a: usize) -> CVec {
        self.eigenvectors.column(a).into_owned()
    }

    /// `Σₐ pₐ |ψₐ⟩⟨ψₐ|`, kernel eigenvalues taken as exactly zero.
    pub fn reconstruct(&self) -> CMat {
        let mut rho = zeros(self.dim());
        for (a, &p) in self.eigenvalues.iter().enumerate() {
            let psi = self.psi(a);
            rho += outer(&psi, &psi).scale(p);
        }
        rho
    }

    /// Support eigenvectors followed by the kernel basis, as a unitary.
    pub fn full_basis(&self) -> CMat {
        let d = self.dim();
        let mut b = CMat::zeros(d, d);
        for a in 0..self.rank {
            b.set_column(a, &self.eigenvectors.column(a));
        }
        for k in 0..(d - self.rank) {
            b.set_column(self.rank + k, &self.kernel_basis.column(k));
        }
        b
    }

    /// `P_ab = |ψₐ⟩⟨ψ_b|`
    pub fn p(&self, a: usize, b: usize) -> CMat {
        outer(&self.psi(a), &self.psi(b))
    }
}

/// Spectral decomposition with a support cutoff of `tol.rank` relative to
/// the largest eigenvalue.
pub fn spectral_decompose(rho: &CMat, tol: &Tolerances) -> Result<SpectralData> {
    let d = rho.nrows();
    let (vals, vecs) = eigh(rho);
    if vals[0] < -tol.psd {
        return Err(Error::NegativeEigenvalue(vals[0]));
    }
    let largest = vals[d - 1].max(f64::MIN_POSITIVE);
    let cutoff = tol.rank * largest;
    let support: Vec<usize> = (0..d).rev().filter(|&k| vals[k] > cutoff).collect();
    let mut eigenvectors = CMat::zeros(d, support.len());
    let mut eigenvalues = Vec::with_capacity(support.len());
    for (col, &k) in support.iter().enumerate() {
        eigenvectors.set_column(col, &vecs.column(k));
        eigenvalues.push(vals[k]);
    }
    let kernel: Vec<usize> = (0..d).filter(|&k| vals[k] <= cutoff).collect();
    let mut kernel_basis = CMat::zeros(d, kernel.len());
    for (col, &k) in kernel.iter().enumerate() {
        kernel_basis.set_column(col, &vecs.column(k));
    }
    let support_projector = &eigenvectors * eigenvectors.adjoint();
    let kernel_projector = &kernel_basis * kernel_basis.adjoint();
    let degenerate = eigenvalues.windows(2).any(|w| (w[0] - w[1]).abs() < tol.degen);
    Ok(SpectralData {
        rank: eigenvalues.len(),
        eigenvalues,
        eigenvectors,
        kernel_basis,
        support_projector,
        kernel_projector,
        tol_rank: tol.rank,
        degenerate,
    })
}

/// Solve `(Lρ + ρL)/2 = ∂ρ` in the eigenbasis of `ρ`, with the
/// kernel-kernel block of `L` set to zero.
pub fn solve_sld(spec: &SpectralData, drho_i: &CMat, tol: &Tolerances) -> Result<CMat> {
    solve_sld_indexed(spec, drho_i, 0, tol)
}

fn solve_sld_indexed(spec: &SpectralData, drho_i: &CMat, index: usize, tol: &Tolerances) -> Result<CMat> {
    let d = spec.dim();
    let r = spec.rank;
    let basis = spec.full_basis();
    let rotated = basis.adjoint() * drho_i * &basis;
    let scale = 1.0f64.max(frobenius(drho_i));

    let mut kk = 0.0f64;
    for a in r..d {
        for b in r..d {
            kk += rotated[(a, b)].norm_sqr();
        }
    }
    let kk = kk.sqrt();
    if kk > tol.sld * scale {
        return Err(Error::InconsistentDerivative { index, norm: kk });
    }

    let p = |a: usize| if a < r { spec.eigenvalues[a] } else { 0.0 };
    let cutoff = spec.tol_rank * spec.eigenvalues.first().copied().unwrap_or(0.0);
    let mut l = CMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let denom = p(a) + p(b);
            if denom > cutoff {
                l[(a, b)] = rotated[(a, b)].scale(2.0 / denom);
            }
        }
    }
    let l = hermitian_part(&(&basis * l * basis.adjoint()));

    let rho = spec.reconstruct();
    let residual = frobenius(&(anticommutator(&l, &rho).scale(0.5) - drho_i));
    if residual > tol.sld * scale {
        return Err(Error::Internal(format!(
            "SLD {index} Lyapunov residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(l)
}

/// SLDs for every parameter of the model.
pub fn solve_slds(spec: &SpectralData, model: &EstimationModel, tol: &Tolerances) -> Result<SldSet> {
    let operators = model
        .drho
        .par_iter()
        .enumerate()
        .map(|(i, d)| solve_sld_indexed(spec, d, i, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(SldSet { operators })
}

impl SldSet {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `max_i ‖Lᵢ‖²` in spectral norm.
    pub fn commutator_scale(&self) -> f64 {
        self.operators.iter().map(|l| op_norm(l).powi(2)).fold(0.0, f64::max)
    }

    /// Largest Lyapunov residual against `ρ` and the supplied derivatives.
    pub fn lyapunov_residual(&self, rho: &CMat, drho: &[CMat]) -> f64 {
        self.operators
            .iter()
            .zip(drho)
            .map(|(l, d)| frobenius(&(anticommutator(l, rho).scale(0.5) - d)))
            .fold(0.0, f64::max)
    }
}

/// `F^Q_ij = Re Tr(ρ Lᵢ Lⱼ)`.
pub fn qfim(spec: &SpectralData, slds: &SldSet, tol: &Tolerances) -> Qfim {
    let s = slds.len();
    let rho = spec.reconstruct();
    let mut f = RMat::zeros(s, s);
    for i in 0..s {
        let rl = &rho * &slds.operators[i];
        for j in i..s {
            let v = trace_inner(&rl, &slds.operators[j]).re;
            f[(i, j)] = v;
            f[(j, i)] = v;
        }
    }
    let (vals, _) = eigh_real(&f);
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    let scale = 1.0f64.max(max_abs_real(&f));
    Qfim {
        singular: min_eigenvalue < tol.singular * scale,
        matrix: f,
        min_eigenvalue,
    }
}

/// Outcome-wise QFIM `[F^Q_ω]_ij = Re⟨π|Lⱼ ρ Lᵢ|π⟩` for `E_ω = |π⟩⟨π|`.
pub fn qfim_outcome(rho: &CMat, slds: &SldSet, pi: &CVec) -> RMat {
    let s = slds.len();
    let lp: Vec<CVec> = slds.operators.iter().map(|l| l * pi).collect();
    let rlp: Vec<CVec> = lp.iter().map(|v| rho * v).collect();
    let mut f = RMat::zeros(s, s);
    for i in 0..s {
        for j in i..s {
            let v = lp[j].dotc(&rlp[i]).re;
            f[(i, j)] = v;
            f[(j, i)] = v;
        }
    }
    f
}

impl RankOnePovm {
    pub fn new(vectors: Vec<CVec>) -> Self {
        RankOnePovm { vectors, weights: None }
    }

    pub fn weighted(vectors: Vec<CVec>, weights: Vec<f64>) -> Self {
        RankOnePovm {
            vectors,
            weights: Some(weights),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    pub fn weight(&self, omega: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[omega])
    }

    /// `√α⁽ω⁾ |π_ω⟩`, so that `E_ω` is the outer product of this vector.
    pub fn effective_vector(&self, omega: usize) -> CVec {
        self.vectors[omega].scale(self.weight(omega).max(0.0).sqrt())
    }

    pub fn element(&self, omega: usize) -> CMat {
        let v = self.effective_vector(omega);
        outer(&v, &v)
    }

    /// `‖Σ_ω E_ω − 𝕀‖_max`
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let mut sum = zeros(d);
        for omega in 0..self.len() {
            sum += self.element(omega);
        }
        max_abs(&(sum - identity(d)))
    }

    pub fn check_complete(&self, dim: usize, tol: &Tolerances) -> Result<()> {
        if self.is_empty() {
            return Err(Error::IncompletePovm(1.0));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.vectors.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} weights for {} vectors",
                    w.len(),
                    self.vectors.len()
                )));
            }
        }
        if let Some(v) = self.vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "POVM vector of length {} for model dimension {dim}",
                v.len()
            )));
        }
        let res = self.completeness_residual();
        if res > tol.complete {
            return Err(Error::IncompletePovm(res));
        }
        Ok(())
    }
}

/// Born-rule probabilities and their parameter derivatives.
pub fn born_probabilities(model: &EstimationModel, povm: &RankOnePovm, tol: &Tolerances) -> Result<BornData> {
    povm.check_complete(model.dim, tol)?;
    let s = model.num_params;
    let m = povm.len();
    let mut probs = Vec::with_capacity(m);
    let mut dprobs = RMat::zeros(s, m);
    let mut null = Vec::with_capacity(m);
    let grad_bound = tol.grad
        * (1.0 + model.drho.iter().map(frobenius).fold(0.0, f64::max));
    for omega in 0..m {
        let v = povm.effective_vector(omega);
        let p = expect(&v, &model.rho).re;
        probs.push(p);
        let mut max_grad = 0.0f64;
        for i in 0..s {
            let g = expect(&v, &model.drho[i]).re;
            dprobs[(i, omega)] = g;
            max_grad = max_grad.max(g.abs());
        }
        let is_null = p < tol.null;
        if is_null && max_grad > grad_bound {
            return Err(Error::NullOutcomeWithNonzeroDerivative {
                outcome: omega,
                prob: p,
                grad: max_grad,
            });
        }
        null.push(is_null);
    }
    Ok(BornData { probs, dprobs, null })
}

/// Classical Fisher information of a rank-one POVM; null outcomes are left
/// out of the sum.
pub fn cfim(model: &EstimationModel, povm: &RankOnePovm, tol: &Tolerances) -> Result<Cfim> {
    let born = born_probabilities(model, povm, tol)?;
    let s = model.num_params;
    let mut total = RMat::zeros(s, s);
    let mut per_outcome = Vec::with_capacity(povm.len());
    let mut null_outcomes = Vec::new();
    for omega in 0..povm.len() {
        let mut f = RMat::zeros(s, s);
        if born.null[omega] {
            null_outcomes.push(omega);
        } else {
            let g = born.dprobs.column(omega);
            f = (g * g.transpose()).unscale(born.probs[omega]);
            total += &f;
        }
        per_outcome.push(f);
    }
    Ok(Cfim {
        total,
        per_outcome,
        null_outcomes,
    })
}

/// Everything downstream stages need from a model, computed once.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub model: EstimationModel,
    pub spectral: SpectralData,
    pub slds: SldSet,
    pub qfim: Qfim,
}

impl PreparedModel {
    pub fn new(model: EstimationModel, tol: &Tolerances) -> Result<Self> {
        model.validate(tol)?;
        let spectral = spectral_decompose(&model.rho, tol)?;
        let slds = solve_slds(&spectral, &model, tol)?;
        let qfim = qfim(&spectral, &slds, tol);
        Ok(PreparedModel {
            model,
            spectral,
            slds,
            qfim,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn ket0() -> CMat {
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
    }

    #[test]
    fn maximally_mixed_is_invariant() {
        let gen = GeneratorModel {
            rho0: identity(2).scale(0.5),
            hamiltonians: vec![pauli::z()],
            lambda_point: vec![0.3],
        };
        let m = materialize(&gen, &tol()).unwrap();
        assert!(max_abs(&(m.rho - identity(2).scale(0.5))) < 1e-14);
        assert!(max_abs(&m.drho[0]) < 1e-14);
    }

    #[test]
    fn sigma_y_rotation_of_ket0_gives_sigma_x() {
        // -i[σ_y, |0><0|] computed by hand is σ_x.
        let gen = GeneratorModel {
            rho0: ket0(),
            hamiltonians: vec![pauli::y()],
            lambda_point: vec![0.0],
        };
        let m = materialize(&gen, &tol()).unwrap();
        assert!(max_abs(&(&m.drho[0] - pauli::x())) < 1e-14);
    }

    #[test]
    fn non_commuting_generators_use_finite_differences() {
        let gen = GeneratorModel {
            rho0: ket0(),
            hamiltonians: vec![pauli::x(), pauli::y()],
            lambda_point: vec![0.0, 0.0],
        };
        assert!(!gen.commuting(&tol()));
        let m = materialize(&gen, &tol()).unwrap();
        // At λ = 0 the first-order terms are still -i[H_j, ρ₀].
        for (h, d) in gen.hamiltonians.iter().zip(&m.drho) {
            let exact = commutator(h, &gen.rho0).map(|z| -z * I);
            assert!(max_abs(&(d - exact)) < 1e-8);
        }
    }

    #[test]
    fn spectral_examples() {
        let s = spectral_decompose(&identity(2).scale(0.5), &tol()).unwrap();
        assert_eq!(s.rank, 2);
        assert!(s.degenerate);
        assert!(max_abs(&s.kernel_projector) < 1e-14);

        let s = spectral_decompose(&ket0(), &tol()).unwrap();
        assert_eq!(s.rank, 1);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        let k1 = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        assert!(max_abs(&(&s.kernel_projector - k1)) < 1e-14);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let rho = CMat::from_row_slice(2, 2, &[c(1.1, 0.0), ZERO, ZERO, c(-0.1, 0.0)]);
        assert!(matches!(
            spectral_decompose(&rho, &tol()),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn sld_of_maximally_mixed_qubit() {
        let s = spectral_decompose(&identity(2).scale(0.5), &tol()).unwrap();
        let l = solve_sld(&s, &pauli::x().scale(0.5), &tol()).unwrap();
        assert!(max_abs(&(l - pauli::x())) < 1e-14);
    }

    #[test]
    fn sld_of_pure_qubit_and_qfi() {
        let s = spectral_decompose(&ket0(), &tol()).unwrap();
        let l = solve_sld(&s, &pauli::x(), &tol()).unwrap();
        assert!(max_abs(&(&l - pauli::x().scale(2.0))) < 1e-14);
        assert!(l[(1, 1)].norm() < 1e-15);
        let f = qfim(&s, &SldSet { operators: vec![l] }, &tol());
        // Pure-state route: ψ(λ) = e^{-iλσ_y/2}... here ∂ψ = |1⟩, so 4(⟨∂ψ|∂ψ⟩ - |⟨ψ|∂ψ⟩|²) = 4.
        assert!((f.matrix[(0, 0)] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_block_without_sld_solution() {
        let s = spectral_decompose(&ket0(), &tol()).unwrap();
        let bad = CMat::from_row_slice(2, 2, &[c(-1.0, 0.0), ZERO, ZERO, ONE]);
        assert!(matches!(
            solve_sld(&s, &bad, &tol()),
            Err(Error::InconsistentDerivative { .. })
        ));
    }

    #[test]
    fn zero_derivatives_give_zero_qfim() {
        let model = EstimationModel::new(ket0(), vec![zeros(2), zeros(2)], vec![0.0, 0.0], &tol()).unwrap();
        let p = PreparedModel::new(model, &tol()).unwrap();
        assert!(max_abs_real(&p.qfim.matrix) == 0.0);
        assert!(p.qfim.singular);
    }

    #[test]
    fn computational_basis_on_maximally_mixed() {
        let model = EstimationModel::new(identity(2).scale(0.5), vec![zeros(2)], vec![0.0], &tol()).unwrap();
        let povm = RankOnePovm::new(vec![basis_vec(2, 0), basis_vec(2, 1)]);
        let born = born_probabilities(&model, &povm, &tol()).unwrap();
        assert_eq!(born.probs, vec![0.5, 0.5]);
        let f = cfim(&model, &povm, &tol()).unwrap();
        assert_eq!(max_abs_real(&f.total), 0.0);
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let model = EstimationModel::new(identity(2).scale(0.5), vec![zeros(2)], vec![0.0], &tol()).unwrap();
        let povm = RankOnePovm::new(vec![basis_vec(2, 0)]);
        assert!(matches!(
            born_probabilities(&model, &povm, &tol()),
            Err(Error::IncompletePovm(_))
        ));
    }

    #[test]
    fn invalid_states_are_rejected() {
        let t = tol();
        let not_herm = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), ZERO, c(0.5, 0.0)]);
        assert!(matches!(
            validate_state(&not_herm, "rho", &t),
            Err(Error::NonHermitianInput { .. })
        ));
        assert!(matches!(
            validate_state(&identity(2), "rho", &t),
            Err(Error::BadTrace { .. })
        ));
        let traced = EstimationModel::new(ket0(), vec![identity(2)], vec![0.0], &t);
        assert!(matches!(traced, Err(Error::BadTrace { .. })));
    }
}
