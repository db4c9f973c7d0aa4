//! Synthesis of saturating rank-one measurements.
//!
//! With a basis `{𝕀, T₁, …, T_n}` of 𝒱⊥ normalized as `Tr(TₖTₗ) = d δₖₗ`,
//! every optimal rank-one projector has the form `Π = (𝕀 − v·T)/d` where
//! `vₖ = −⟨π|Tₖ|π⟩` and `‖v‖² = d − 1`. A weighted family `αΠ` is complete
//! iff `Σα = d` and `Σ α v = 0`.
//!
//! The projective route builds `π₁ … π_{d−1}` one at a time, each orthogonal
//! to the previous ones and hollow with respect to 𝒱; the last vector is the
//! orthogonal completion, hollow automatically because every member of 𝒱 is
//! traceless.

pub mod search;
pub mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    build_subspaces, dimension_bound_verdict, orthonormalize_real, sufficiency_threshold, HermitianBasis,
    SubspacePair,
};
use crate::hollow::{build_wm_family, check_pcc_with_family, check_povm, outcome_residual, pcc_violation};
use crate::hollow::{SaturationCertificate, Verdict, WMFamily};
use crate::linalg::*;
use crate::model::{cfim, qfim_outcome, PreparedModel, RankOnePovm};
use crate::tolerances::Tolerances;

pub use search::{find_hollow_vector, HollowVector, SearchOptions, SearchOutcome};

/// Relative tolerance on `‖F^C − F^Q‖_max / ‖F^Q‖_max` for a certified
/// construction.
pub const FISHER_REL_TOL: f64 = 1e-8;

const POOL_STREAM: u64 = 1 << 62;

#[derive(Debug, Clone)]
pub struct ProjectorCandidate {
    pub v: Vec<f64>,
    pub pi: CVec,
    pub residual: f64,
    pub stage: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ProjectiveIterative,
    WeightedFeasibility,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Infeasibility {
    /// `n < d − 1`: no saturating measurement exists.
    DimensionBound { n: i64, d: usize },
    /// The partial commutativity condition fails, which rules out saturation.
    PccViolated { violation: f64 },
    /// The PCC check passed but 𝕀 is not numerically orthogonal to 𝒱.
    IdentityLeakage { leakage: f64 },
    /// Greedy construction stalled at `stage` in every chain restart.
    SearchExhausted { stage: usize },
    /// No box-constrained weights complete the candidate pool.
    WeightsInfeasible { pool: usize },
}

#[derive(Debug, Clone)]
pub struct ConstructOptions {
    pub seed: u64,
    pub search: SearchOptions,
    /// Independent restarts of the whole greedy chain.
    pub chain_restarts: usize,
    /// Candidate pool for the weighted route; `None` means `4d`.
    pub pool_size: Option<usize>,
    pub allow_incomplete: bool,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            seed: 0,
            search: SearchOptions::default(),
            chain_restarts: 8,
            pool_size: None,
            allow_incomplete: false,
        }
    }
}

/// Model-level quantities that decide saturability before any search.
#[derive(Debug, Clone, Serialize)]
pub struct GeometrySummary {
    pub d: usize,
    pub s: usize,
    pub r: usize,
    pub degenerate_spectrum: bool,
    pub qfim_singular: bool,
    pub pcc_holds: bool,
    pub pcc_violation: f64,
    pub family_size: usize,
    pub dim_v: usize,
    pub gram_rank: usize,
    pub n: i64,
    pub dimension_bound_ok: bool,
    pub sufficiency_threshold: Option<usize>,
    pub in_sufficiency_regime: bool,
    pub identity_leakage: f64,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub family: WMFamily,
    pub subspaces: SubspacePair,
    pub summary: GeometrySummary,
}

pub fn analyze(prepared: &PreparedModel, tol: &Tolerances) -> Result<Analysis> {
    let family = build_wm_family(&prepared.spectral, &prepared.slds);
    let pcc_holds = check_pcc_with_family(&prepared.spectral, &prepared.slds, &family, tol)?;
    let subspaces = build_subspaces(&family, tol)?;
    let d = prepared.model.dim;
    let threshold = sufficiency_threshold(d).ok();
    let summary = GeometrySummary {
        d,
        s: prepared.model.num_params,
        r: prepared.spectral.rank,
        degenerate_spectrum: prepared.spectral.degenerate,
        qfim_singular: prepared.qfim.singular,
        pcc_holds,
        pcc_violation: pcc_violation(&prepared.spectral, &prepared.slds),
        family_size: subspaces.family_size,
        dim_v: subspaces.dim_v,
        gram_rank: subspaces.gram_rank,
        n: subspaces.n,
        dimension_bound_ok: dimension_bound_verdict(subspaces.n, d),
        sufficiency_threshold: threshold,
        in_sufficiency_regime: pcc_holds && threshold.is_some_and(|t| subspaces.n >= t as i64),
        identity_leakage: subspaces.identity_leakage,
    };
    Ok(Analysis {
        family,
        subspaces,
        summary,
    })
}

/// `Π = (𝕀 − v·T)/d` from a stage-zero basis with `T₀ = 𝕀`.
///
/// Accepted when the spectrum of `v·T` is `{1 − d, 1, …, 1}` within
/// `tol.degen`; `π` is the eigenvector of `1 − d`.
pub fn projector_from_v(v: &[f64], t: &HermitianBasis, tol: &Tolerances) -> Result<ProjectorCandidate> {
    if !t.contains_identity || v.len() + 1 != t.len() {
        return Err(Error::DimensionMismatch(format!(
            "v has {} entries for a basis of {} elements",
            v.len(),
            t.len()
        )));
    }
    let d = t.dim;
    let mut x = zeros(d);
    for (vk, tk) in v.iter().zip(&t.elements[1..]) {
        x += tk.scale(*vk);
    }
    let (vals, vecs) = eigh(&x);
    let gap = vals
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let target = if k == 0 { 1.0 - d as f64 } else { 1.0 };
            (e - target).abs()
        })
        .fold(0.0, f64::max);
    if gap > tol.degen {
        return Err(Error::SpectrumMismatch(gap));
    }
    Ok(ProjectorCandidate {
        v: v.to_vec(),
        pi: vecs.column(0).into_owned(),
        residual: gap,
        stage: 0,
    })
}

/// `vₖ = −⟨π|Tₖ|π⟩` over the traceless elements of `t`.
pub fn v_from_pi(pi: &CVec, t: &HermitianBasis) -> Vec<f64> {
    let u = pi.unscale(pi.norm());
    let skip = usize::from(t.contains_identity);
    t.elements[skip..].iter().map(|tk| -expect(&u, tk).re).collect()
}

/// Basis of `𝒱⊥ ⊖ span{Π₁ … Π_μ, 𝕀 − ΣΠ_q}` normalized to `d − μ`.
pub fn stage_basis(v_perp: &HermitianBasis, prior: &[CVec]) -> Result<HermitianBasis> {
    let d = v_perp.dim;
    let mu = prior.len();
    let mut seed: Vec<RVec> = prior.iter().map(|p| herm_to_real(&outer(p, p))).collect();
    let mut rest = identity(d);
    for p in prior {
        rest -= outer(p, p);
    }
    seed.push(herm_to_real(&rest));
    let seed = orthonormalize_real(&seed, 1e-8);
    let norm = (v_perp.normalization).sqrt();
    let projected: Vec<RVec> = v_perp
        .coords
        .iter()
        .map(|w| {
            let mut w = w.unscale(norm);
            for q in &seed {
                let p = q.dot(&w);
                w.axpy(-p, q, 1.0);
            }
            w
        })
        .collect();
    let basis = orthonormalize_real(&projected, 1e-6);
    let expected = v_perp.len() as i64 - 1 - mu as i64;
    if basis.len() as i64 != expected.max(0) {
        return Err(Error::Internal(format!(
            "stage {} basis has {} elements, expected {expected}",
            mu + 1,
            basis.len()
        )));
    }
    let scale = ((d - mu) as f64).sqrt();
    let coords: Vec<RVec> = basis.into_iter().map(|w| w.scale(scale)).collect();
    let t = HermitianBasis {
        dim: d,
        elements: coords.iter().map(|w| real_to_herm(w, d)).collect(),
        coords,
        normalization: (d - mu) as f64,
        contains_identity: false,
    };
    for tk in &t.elements {
        for p in prior {
            let leak = expect(p, tk).norm();
            if leak > 1e-8 * (d as f64) {
                return Err(Error::Internal(format!(
                    "stage basis element has overlap {leak:.3e} with an earlier projector"
                )));
            }
        }
    }
    Ok(t)
}

/// Stage-normalized `v` for `π_{μ+1}` given the earlier vectors, with the
/// rank-one identities checked.
fn stage_candidate(v_perp: &HermitianBasis, prior: &[CVec], pi: &CVec, residual: f64) -> Result<ProjectorCandidate> {
    let d = v_perp.dim;
    let mu = prior.len();
    let t = stage_basis(v_perp, prior)?;
    let v = v_from_pi(pi, &t);
    let norm2: f64 = v.iter().map(|x| x * x).sum();
    let expected = (d - mu - 1) as f64;
    if (norm2 - expected).abs() > 1e-7 * d as f64 {
        return Err(Error::Internal(format!(
            "stage {} vector has |v|^2 = {norm2:.6e}, expected {expected}",
            mu + 1
        )));
    }
    let mut rest = identity(d);
    for p in prior {
        rest -= outer(p, p);
    }
    let mut pi_rebuilt = rest;
    for (vk, tk) in v.iter().zip(&t.elements) {
        pi_rebuilt -= tk.scale(*vk);
    }
    let pi_rebuilt = pi_rebuilt.unscale((d - mu) as f64);
    let defect = max_abs(&(pi_rebuilt - outer(pi, pi)));
    if defect > 1e-7 {
        return Err(Error::Internal(format!(
            "stage {} projector does not lie in the complement (defect {defect:.3e})",
            mu + 1
        )));
    }
    Ok(ProjectorCandidate {
        v,
        pi: pi.clone(),
        residual,
        stage: mu,
    })
}

#[derive(Debug, Clone)]
pub enum IterativeOutcome {
    Complete { candidates: Vec<ProjectorCandidate>, chain: usize },
    Stalled { stage: usize, partial: Vec<CVec> },
}

/// Stage at which a chain stalled, with the vectors accepted before it.
type Stall = (usize, Vec<CVec>);

fn run_chain(
    analysis: &Analysis,
    opts: &ConstructOptions,
    chain: usize,
    tol: &Tolerances,
) -> std::result::Result<Vec<(CVec, f64)>, Stall> {
    let fam = &analysis.family;
    let v = &analysis.subspaces.v;
    let d = fam.dim;
    let threshold = fam.threshold(tol);
    let mut found: Vec<(CVec, f64)> = Vec::with_capacity(d);
    for stage in 0..d.saturating_sub(1) {
        let prior: Vec<CVec> = found.iter().map(|(p, _)| p.clone()).collect();
        let stream = ((chain as u64) << 40) | ((stage as u64) << 24);
        let hit = find_hollow_vector(v, &prior, opts.seed, stream, &opts.search)
            .found()
            .map(|h| {
                let res = outcome_residual(&h.pi, fam);
                (h.pi, res)
            })
            .filter(|(_, res)| *res <= threshold);
        match hit {
            Some(h) => found.push(h),
            None => return Err((stage, prior)),
        }
    }
    let prior: Vec<CVec> = found.iter().map(|(p, _)| p.clone()).collect();
    let last = orth_complement(&prior, d);
    if last.ncols() != 1 {
        return Err((d - 1, prior));
    }
    let pi = last.column(0).into_owned();
    let res = outcome_residual(&pi, fam);
    if res > threshold {
        return Err((d - 1, prior));
    }
    found.push((pi, res));
    Ok(found)
}

/// Greedy rank-one projective construction with whole-chain restarts.
pub fn iterative_projective_construction(
    analysis: &Analysis,
    opts: &ConstructOptions,
    tol: &Tolerances,
) -> Result<IterativeOutcome> {
    let mut deepest: (usize, Vec<CVec>) = (0, Vec::new());
    for chain in 0..opts.chain_restarts.max(1) {
        match run_chain(analysis, opts, chain, tol) {
            Ok(found) => {
                let v_perp = &analysis.subspaces.v_perp;
                let mut candidates = Vec::with_capacity(found.len());
                for (mu, (pi, res)) in found.iter().enumerate() {
                    let prior: Vec<CVec> = found[..mu].iter().map(|(p, _)| p.clone()).collect();
                    candidates.push(stage_candidate(v_perp, &prior, pi, *res)?);
                }
                return Ok(IterativeOutcome::Complete { candidates, chain });
            }
            Err((stage, partial)) => {
                if stage >= deepest.0 && partial.len() >= deepest.1.len() {
                    deepest = (stage, partial);
                }
            }
        }
    }
    Ok(IterativeOutcome::Stalled {
        stage: deepest.0,
        partial: deepest.1,
    })
}

/// Box-constrained weights completing stage-zero candidates, checked against
/// `Σ α |π⟩⟨π| = 𝕀`.
pub fn completeness_weights(candidates: &[ProjectorCandidate], d: usize, tol: &Tolerances) -> Option<Vec<f64>> {
    let vs: Vec<RVec> = candidates.iter().map(|c| RVec::from_vec(c.v.clone())).collect();
    let weights = simplex::box_weights(&vs, d as f64, 1e-9)?;
    let mut sum = zeros(d);
    for (cand, &w) in candidates.iter().zip(&weights) {
        let u = cand.pi.unscale(cand.pi.norm());
        sum += outer(&u, &u).scale(w);
    }
    let residual = max_abs(&(sum - identity(d)));
    (residual <= tol.complete).then_some(weights)
}

/// `F^C` against `F^Q`, with the outcome-wise QFIM of null outcomes added
/// back to the classical side.
#[derive(Debug, Clone)]
pub struct FisherComparison {
    pub qfim: RMat,
    pub cfim: RMat,
    pub null_outcomes: Vec<usize>,
    /// `Σ_null F^Q_ω`.
    pub null_contribution: RMat,
    /// `‖F^C + Σ_null F^Q_ω − F^Q‖_max`.
    pub gap: f64,
    /// `‖F^C − F^Q‖_max`.
    pub raw_gap: f64,
    pub passes: bool,
}

pub fn fisher_comparison(prepared: &PreparedModel, povm: &RankOnePovm, tol: &Tolerances) -> Result<FisherComparison> {
    let c = cfim(&prepared.model, povm, tol)?;
    let s = prepared.model.num_params;
    let mut null_contribution = RMat::zeros(s, s);
    for &w in &c.null_outcomes {
        null_contribution += qfim_outcome(&prepared.model.rho, &prepared.slds, &povm.effective_vector(w));
    }
    let q = &prepared.qfim.matrix;
    let gap = max_abs_real(&(&c.total + &null_contribution - q));
    let raw_gap = max_abs_real(&(&c.total - q));
    let scale = max_abs_real(q);
    Ok(FisherComparison {
        passes: gap <= FISHER_REL_TOL * scale,
        qfim: q.clone(),
        cfim: c.total,
        null_outcomes: c.null_outcomes,
        null_contribution,
        gap,
        raw_gap,
    })
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub feasible: bool,
    pub method: Option<Method>,
    pub povm: Option<RankOnePovm>,
    pub candidates: Vec<ProjectorCandidate>,
    pub certificate: Option<SaturationCertificate>,
    pub fisher: Option<FisherComparison>,
    pub reason: Option<Infeasibility>,
    /// Outcome-wise saturating vectors that do not form a POVM; only filled
    /// on request when no complete measurement was found.
    pub partial: Option<Vec<CVec>>,
    pub summary: GeometrySummary,
}

impl ConstructionResult {
    fn infeasible(summary: GeometrySummary, reason: Infeasibility) -> Self {
        ConstructionResult {
            feasible: false,
            method: None,
            povm: None,
            candidates: Vec::new(),
            certificate: None,
            fisher: None,
            reason: Some(reason),
            partial: None,
            summary,
        }
    }
}

fn certify(
    prepared: &PreparedModel,
    analysis: &Analysis,
    povm: &RankOnePovm,
    tol: &Tolerances,
) -> Result<(SaturationCertificate, FisherComparison, bool)> {
    let cert = check_povm(povm, &analysis.family, tol)?;
    let fisher = fisher_comparison(prepared, povm, tol)?;
    let ok = cert.verdict == Verdict::Saturating && fisher.passes && cert.completeness_residual <= tol.complete;
    Ok((cert, fisher, ok))
}

/// Full pipeline: geometry, dimension bound, PCC, projective construction,
/// then the weighted route; the result is feasible only with a passing
/// certificate and Fisher comparison.
pub fn construct_optimal_measurement(
    prepared: &PreparedModel,
    opts: &ConstructOptions,
    tol: &Tolerances,
) -> Result<ConstructionResult> {
    let analysis = analyze(prepared, tol)?;
    construct_with_analysis(prepared, &analysis, opts, tol)
}

pub fn construct_with_analysis(
    prepared: &PreparedModel,
    analysis: &Analysis,
    opts: &ConstructOptions,
    tol: &Tolerances,
) -> Result<ConstructionResult> {
    let summary = analysis.summary.clone();
    let d = summary.d;
    if !summary.dimension_bound_ok {
        return Ok(ConstructionResult::infeasible(
            summary.clone(),
            Infeasibility::DimensionBound { n: summary.n, d },
        ));
    }
    if !summary.pcc_holds {
        let mut out = ConstructionResult::infeasible(
            summary.clone(),
            Infeasibility::PccViolated {
                violation: summary.pcc_violation,
            },
        );
        if opts.allow_incomplete {
            let single = ConstructOptions {
                chain_restarts: 1,
                ..opts.clone()
            };
            out.partial = Some(match run_chain(analysis, &single, 0, tol) {
                Ok(found) => found.into_iter().map(|(p, _)| p).collect(),
                Err((_, partial)) => partial,
            });
        }
        return Ok(out);
    }
    if !analysis.subspaces.v_perp.contains_identity {
        return Ok(ConstructionResult::infeasible(
            summary.clone(),
            Infeasibility::IdentityLeakage {
                leakage: summary.identity_leakage,
            },
        ));
    }

    let (stalled_at, partial) = match iterative_projective_construction(analysis, opts, tol)? {
        IterativeOutcome::Complete { candidates, .. } => {
            let povm = RankOnePovm::new(candidates.iter().map(|c| c.pi.clone()).collect());
            let (cert, fisher, ok) = certify(prepared, analysis, &povm, tol)?;
            if ok {
                return Ok(ConstructionResult {
                    feasible: true,
                    method: Some(Method::ProjectiveIterative),
                    povm: Some(povm),
                    candidates,
                    certificate: Some(cert),
                    fisher: Some(fisher),
                    reason: None,
                    partial: None,
                    summary,
                });
            }
            (d, povm.vectors)
        }
        IterativeOutcome::Stalled { stage, partial } => (stage, partial),
    };
    if summary.in_sufficiency_regime {
        return Err(Error::Internal(format!(
            "projective construction failed at stage {} although n = {} meets the sufficiency threshold {}",
            stalled_at + 1,
            summary.n,
            summary.sufficiency_threshold.unwrap_or(0)
        )));
    }

    // Weighted route over a pool of independently found hollow vectors.
    let pool_size = opts.pool_size.unwrap_or(4 * d);
    let t = &analysis.subspaces.v_perp;
    let pool: Vec<ProjectorCandidate> = (0..pool_size)
        .filter_map(|k| {
            let stream = POOL_STREAM | ((k as u64) << 24);
            find_hollow_vector(&analysis.subspaces.v, &[], opts.seed, stream, &opts.search).found()
        })
        .map(|h| {
            let residual = outcome_residual(&h.pi, &analysis.family);
            ProjectorCandidate {
                v: v_from_pi(&h.pi, t),
                pi: h.pi,
                residual,
                stage: 0,
            }
        })
        .filter(|c| c.residual <= analysis.family.threshold(tol))
        .collect();
    if let Some(weights) = completeness_weights(&pool, d, tol) {
        let mut vectors = Vec::new();
        let mut kept_w = Vec::new();
        let mut kept = Vec::new();
        for (cand, w) in pool.into_iter().zip(weights) {
            if w > 1e-12 {
                vectors.push(cand.pi.unscale(cand.pi.norm()));
                kept_w.push(w);
                kept.push(cand);
            }
        }
        let povm = RankOnePovm::weighted(vectors, kept_w);
        let (cert, fisher, ok) = certify(prepared, analysis, &povm, tol)?;
        if ok {
            return Ok(ConstructionResult {
                feasible: true,
                method: Some(Method::WeightedFeasibility),
                povm: Some(povm),
                candidates: kept,
                certificate: Some(cert),
                fisher: Some(fisher),
                reason: None,
                partial: None,
                summary,
            });
        }
    }

    let reason = if stalled_at < d {
        Infeasibility::SearchExhausted { stage: stalled_at }
    } else {
        Infeasibility::WeightsInfeasible { pool: pool_size }
    };
    let mut out = ConstructionResult::infeasible(summary, reason);
    if opts.allow_incomplete {
        out.partial = Some(partial);
    }
    Ok(out)
}

/// Certificate verdict for an informationally complete rank-one POVM; such a
/// measurement never saturates a non-singular multiparameter bound.
pub fn icpovm_nogo_check(prepared: &PreparedModel, povm: &RankOnePovm, tol: &Tolerances) -> Result<Verdict> {
    let d = prepared.model.dim;
    if prepared.model.num_params < 2 {
        return Err(Error::PreconditionNotMet("needs at least two parameters".into()));
    }
    if prepared.qfim.singular {
        return Err(Error::PreconditionNotMet("QFIM is singular".into()));
    }
    if povm.len() != d * d {
        return Err(Error::PreconditionNotMet(format!(
            "{} elements, informational completeness needs {}",
            povm.len(),
            d * d
        )));
    }
    let elements: Vec<CMat> = (0..povm.len()).map(|w| povm.element(w)).collect();
    let rank = crate::geometry::gram_rank(&elements, tol.gs);
    if rank != d * d {
        return Err(Error::PreconditionNotMet(format!(
            "elements span a space of dimension {rank}, not {}",
            d * d
        )));
    }
    let family = build_wm_family(&prepared.spectral, &prepared.slds);
    Ok(check_povm(povm, &family, tol)?.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{complement_basis, span_subspace};
    use crate::linalg::pauli;
    use crate::model::EstimationModel;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn qubit_projector_from_v() {
        let v = span_subspace(&[], 2, 1e-10);
        let (t, _) = complement_basis(&v, 2, &tol());
        // Choose v so that v·T = diag(1, -1) = σ_z.
        let target = herm_to_real(&pauli::z());
        let coeffs: Vec<f64> = t.coords[1..].iter().map(|q| q.dot(&target) / 2.0).collect();
        let cand = projector_from_v(&coeffs, &t, &tol()).unwrap();
        // Π = (𝕀 − σ_z)/2 = |1⟩⟨1|
        assert!((cand.pi[1].norm() - 1.0).abs() < 1e-12);
        let back = v_from_pi(&cand.pi, &t);
        for (a, b) in back.iter().zip(&coeffs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_v_is_rejected() {
        let v = span_subspace(&[], 2, 1e-10);
        let (t, _) = complement_basis(&v, 2, &tol());
        assert!(matches!(
            projector_from_v(&[0.0, 0.0, 0.0], &t, &tol()),
            Err(Error::SpectrumMismatch(_))
        ));
    }

    #[test]
    fn zero_derivative_model_is_trivially_saturable() {
        let rho = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), ZERO, ZERO, c(0.4, 0.0)]);
        let model = EstimationModel::new(rho, vec![zeros(2)], vec![0.0], &tol()).unwrap();
        let p = PreparedModel::new(model, &tol()).unwrap();
        let res = construct_optimal_measurement(&p, &ConstructOptions::default(), &tol()).unwrap();
        assert!(res.feasible);
        assert_eq!(res.method, Some(Method::ProjectiveIterative));
        assert_eq!(res.povm.unwrap().len(), 2);
    }

    #[test]
    fn single_parameter_qubit_saturates() {
        let rho = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.05), c(0.1, -0.05), c(0.4, 0.0)]);
        let drho = pauli::x().scale(0.2) + pauli::z().scale(-0.1);
        let model = EstimationModel::new(rho, vec![drho], vec![0.0], &tol()).unwrap();
        let p = PreparedModel::new(model, &tol()).unwrap();
        let res = construct_optimal_measurement(&p, &ConstructOptions::default(), &tol()).unwrap();
        assert!(res.feasible);
        let f = res.fisher.unwrap();
        assert!(f.gap <= 1e-9 * max_abs_real(&f.qfim));
    }

    #[test]
    fn antipodal_weights() {
        let v = span_subspace(&[], 2, 1e-10);
        let (t, _) = complement_basis(&v, 2, &tol());
        let p0 = basis_vec(2, 0);
        let p1 = basis_vec(2, 1);
        let cands: Vec<ProjectorCandidate> = [p0, p1]
            .into_iter()
            .map(|pi| ProjectorCandidate {
                v: v_from_pi(&pi, &t),
                pi,
                residual: 0.0,
                stage: 0,
            })
            .collect();
        let w = completeness_weights(&cands, 2, &tol()).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    }
}
