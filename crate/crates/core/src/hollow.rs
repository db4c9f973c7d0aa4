//! Saturation conditions on rank-one outcomes.
//!
//! With `P_ab = |ψₐ⟩⟨ψ_b|` the family is
//! `W_{ij,ab} = Lᵢ P_ab Lⱼ − Lⱼ P_ab Lᵢ` and `M_{i,ab} = [Lᵢ, P_ab]`.
//! A rank-one outcome `|π⟩⟨π|` attains its outcome-wise Fisher bound exactly
//! when every member has vanishing expectation in `|π⟩`.
//!
//! Every expectation factors through `xᵢₐ = ⟨π|Lᵢ|ψₐ⟩` and `yₐ = ⟨π|ψₐ⟩`:
//! `⟨π|W_{ij,ab}|π⟩ = xᵢₐ x̄ⱼ_b − xⱼₐ x̄ᵢ_b` and
//! `⟨π|M_{i,ab}|π⟩ = xᵢₐ ȳ_b − yₐ x̄ᵢ_b`, which is what the outcome checks use.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::*;
use crate::model::{RankOnePovm, SldSet, SpectralData};
use crate::tolerances::Tolerances;

/// Residuals within this factor of the threshold are reported as inconclusive
/// rather than as a violation.
pub const GREY_ZONE: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct WEntry {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub op: CMat,
}

#[derive(Debug, Clone)]
pub struct MEntry {
    pub i: usize,
    pub a: usize,
    pub b: usize,
    pub op: CMat,
}

/// The `W` (only `i < j`) and `M` operators of a model.
#[derive(Debug, Clone)]
pub struct WMFamily {
    pub dim: usize,
    pub num_params: usize,
    pub rank: usize,
    pub w: Vec<WEntry>,
    pub m: Vec<MEntry>,
    /// Support eigenvectors `|ψₐ⟩`.
    pub psi: Vec<CVec>,
    /// `lpsi[i][a] = Lᵢ|ψₐ⟩`.
    pub lpsi: Vec<Vec<CVec>>,
    /// Largest operator norm over the family.
    pub scale: f64,
    /// `max_i ‖Lᵢ‖²`, the natural scale of commutators.
    pub pcc_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Saturating,
    NotSaturating,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeCheck {
    pub saturates: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReducedCheck {
    /// Every `⟨ψₐ|Lᵢ|π⟩` vanishes, so the outcome carries no information and
    /// saturates trivially.
    Trivial,
    Checked {
        saturates: bool,
        residual: f64,
        central_pair: (usize, usize),
    },
}

impl ReducedCheck {
    pub fn saturates(&self) -> bool {
        match self {
            ReducedCheck::Trivial => true,
            ReducedCheck::Checked { saturates, .. } => *saturates,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaturationCertificate {
    pub outcome_residuals: Vec<f64>,
    pub max_residual: f64,
    pub pcc_holds: bool,
    pub completeness_residual: f64,
    pub verdict: Verdict,
    /// Absolute threshold the residuals were compared against.
    pub tol_sat: f64,
}

pub fn build_wm_family(spec: &SpectralData, slds: &SldSet) -> WMFamily {
    let s = slds.len();
    let r = spec.rank;
    let psi: Vec<CVec> = (0..r).map(|a| spec.psi(a)).collect();
    let lpsi: Vec<Vec<CVec>> = slds
        .operators
        .iter()
        .map(|l| psi.iter().map(|p| l * p).collect())
        .collect();

    let mut w_idx = Vec::new();
    for i in 0..s {
        for j in (i + 1)..s {
            for a in 0..r {
                for b in 0..r {
                    w_idx.push((i, j, a, b));
                }
            }
        }
    }
    let w: Vec<WEntry> = w_idx
        .par_iter()
        .map(|&(i, j, a, b)| WEntry {
            i,
            j,
            a,
            b,
            op: outer(&lpsi[i][a], &lpsi[j][b]) - outer(&lpsi[j][a], &lpsi[i][b]),
        })
        .collect();

    let mut m_idx = Vec::new();
    for i in 0..s {
        for a in 0..r {
            for b in 0..r {
                m_idx.push((i, a, b));
            }
        }
    }
    let m: Vec<MEntry> = m_idx
        .par_iter()
        .map(|&(i, a, b)| MEntry {
            i,
            a,
            b,
            op: outer(&lpsi[i][a], &psi[b]) - outer(&psi[a], &lpsi[i][b]),
        })
        .collect();

    let scale = w
        .par_iter()
        .map(|e| op_norm(&e.op))
        .chain(m.par_iter().map(|e| op_norm(&e.op)))
        .reduce(|| 0.0, f64::max);

    WMFamily {
        dim: spec.dim(),
        num_params: s,
        rank: r,
        w,
        m,
        psi,
        lpsi,
        scale,
        pcc_scale: slds.commutator_scale(),
    }
}

impl WMFamily {
    /// `W_{ij,ab}` for any `i, j`, using `W_{ji,ab} = −W_{ij,ab}`.
    pub fn w_op(&self, i: usize, j: usize, a: usize, b: usize) -> CMat {
        let r = self.rank;
        let s = self.num_params;
        if i == j {
            return zeros(self.dim);
        }
        let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        // Entries are laid out by (i, j) pair in lexicographic order, then a, b.
        let pair = lo * s - lo * (lo + 1) / 2 + (hi - lo - 1);
        let e = &self.w[pair * r * r + a * r + b];
        debug_assert!(e.i == lo && e.j == hi && e.a == a && e.b == b);
        e.op.scale(sign)
    }

    pub fn m_op(&self, i: usize, a: usize, b: usize) -> &CMat {
        let r = self.rank;
        &self.m[i * r * r + a * r + b].op
    }

    /// Absolute saturation threshold for this family.
    pub fn threshold(&self, tol: &Tolerances) -> f64 {
        tol.sat_threshold(self.scale)
    }

    /// Absolute PCC threshold for this family.
    pub fn pcc_threshold(&self, tol: &Tolerances) -> f64 {
        tol.pcc * self.pcc_scale.max(f64::MIN_POSITIVE)
    }

    /// `(x, y)` with `x[i][a] = ⟨π|Lᵢ|ψₐ⟩`, `y[a] = ⟨π|ψₐ⟩` for a unit `π`.
    fn overlaps(&self, pi: &CVec) -> (Vec<Vec<C64>>, Vec<C64>) {
        let n = pi.norm();
        let u = if n > 0.0 { pi.unscale(n) } else { pi.clone() };
        let x = self
            .lpsi
            .iter()
            .map(|row| row.iter().map(|v| u.dotc(v)).collect())
            .collect();
        let y = self.psi.iter().map(|p| u.dotc(p)).collect();
        (x, y)
    }

    /// Largest `|Tr W_{ij,ab}|`; nonzero exactly when the PCC fails.
    pub fn max_trace_w(&self) -> f64 {
        self.w.iter().map(|e| e.op.trace().norm()).fold(0.0, f64::max)
    }

    pub fn pcc_holds(&self, tol: &Tolerances) -> bool {
        self.max_trace_w() <= self.pcc_threshold(tol)
    }
}

/// Largest `|⟨π|X|π⟩|/‖π‖²` over the family.
pub fn outcome_residual(pi: &CVec, fam: &WMFamily) -> f64 {
    let (x, y) = fam.overlaps(pi);
    let s = fam.num_params;
    let r = fam.rank;
    let mut worst = 0.0f64;
    for i in 0..s {
        for j in (i + 1)..s {
            for a in 0..r {
                for b in 0..r {
                    let v = x[i][a] * x[j][b].conj() - x[j][a] * x[i][b].conj();
                    worst = worst.max(v.norm());
                }
            }
        }
        for a in 0..r {
            for b in 0..r {
                let v = x[i][a] * y[b].conj() - y[a] * x[i][b].conj();
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

/// Same quantity as [`outcome_residual`], evaluated on the materialized
/// operators.
pub fn outcome_residual_dense(pi: &CVec, fam: &WMFamily) -> f64 {
    let n2 = pi.norm_squared();
    fam.w
        .iter()
        .map(|e| &e.op)
        .chain(fam.m.iter().map(|e| &e.op))
        .map(|op| expect(pi, op).norm() / n2)
        .fold(0.0, f64::max)
}

pub fn check_outcome(pi: &CVec, fam: &WMFamily, tol_sat: f64) -> OutcomeCheck {
    let residual = outcome_residual(pi, fam);
    OutcomeCheck {
        saturates: residual <= tol_sat,
        residual,
    }
}

/// The check restricted to the conditions anchored at the central pair
/// `(ī, ā) = argmax |⟨ψₐ|Lᵢ|π⟩|`.
///
/// When `xᵢ̄ₐ̄ ≠ 0` these conditions force every row of `[y; x]` to be a real
/// multiple of row `ī`, which in turn implies all remaining conditions, so the
/// verdict agrees with [`check_outcome`].
pub fn check_outcome_reduced(pi: &CVec, fam: &WMFamily, tol_sat: f64, tol: &Tolerances) -> ReducedCheck {
    let (x, y) = fam.overlaps(pi);
    let s = fam.num_params;
    let r = fam.rank;
    let mut best = (0usize, 0usize);
    let mut best_val = -1.0f64;
    for (i, row) in x.iter().enumerate() {
        for (a, v) in row.iter().enumerate() {
            // Strict comparison keeps the lexicographically first maximizer.
            if v.norm() > best_val {
                best_val = v.norm();
                best = (i, a);
            }
        }
    }
    let info_scale = fam.pcc_scale.sqrt().max(f64::MIN_POSITIVE);
    if best_val <= tol.sat * 1e-3 * info_scale {
        return ReducedCheck::Trivial;
    }
    let (ib, ab) = best;
    let mut worst = 0.0f64;
    for j in 0..s {
        if j == ib {
            continue;
        }
        for b in 0..r {
            let v = x[ib][ab] * x[j][b].conj() - x[j][ab] * x[ib][b].conj();
            worst = worst.max(v.norm());
        }
    }
    for b in 0..r {
        let v = x[ib][ab] * y[b].conj() - y[ab] * x[ib][b].conj();
        worst = worst.max(v.norm());
    }
    ReducedCheck::Checked {
        saturates: worst <= tol_sat,
        residual: worst,
        central_pair: best,
    }
}

/// Largest `|⟨ψₐ|[Lᵢ,Lⱼ]|ψ_b⟩|` over `i < j` and support indices.
pub fn pcc_violation(spec: &SpectralData, slds: &SldSet) -> f64 {
    let s = slds.len();
    let r = spec.rank;
    let psi: Vec<CVec> = (0..r).map(|a| spec.psi(a)).collect();
    let mut worst = 0.0f64;
    for i in 0..s {
        for j in (i + 1)..s {
            let comm = commutator(&slds.operators[i], &slds.operators[j]);
            for a in 0..r {
                for b in 0..r {
                    worst = worst.max(sandwich(&psi[a], &comm, &psi[b]).norm());
                }
            }
        }
    }
    worst
}

/// Partial commutativity, cross-checked against `Tr W_{ij,ab}`.
pub fn check_pcc(spec: &SpectralData, slds: &SldSet, tol: &Tolerances) -> Result<bool> {
    let fam = build_wm_family(spec, slds);
    check_pcc_with_family(spec, slds, &fam, tol)
}

pub fn check_pcc_with_family(spec: &SpectralData, slds: &SldSet, fam: &WMFamily, tol: &Tolerances) -> Result<bool> {
    let direct = pcc_violation(spec, slds);
    let via_trace = fam.max_trace_w();
    let scale = fam.pcc_scale.max(1.0);
    if (direct - via_trace).abs() > 1e-10 * scale {
        return Err(Error::Internal(format!(
            "PCC violation {direct:.3e} disagrees with max |Tr W| {via_trace:.3e}"
        )));
    }
    Ok(direct <= fam.pcc_threshold(tol))
}

/// Saturation certificate for a complete rank-one POVM.
pub fn check_povm(povm: &RankOnePovm, fam: &WMFamily, tol: &Tolerances) -> Result<SaturationCertificate> {
    povm.check_complete(fam.dim, tol)?;
    let threshold = fam.threshold(tol);
    let outcome_residuals: Vec<f64> = povm
        .vectors
        .par_iter()
        .map(|v| if v.norm() == 0.0 { 0.0 } else { outcome_residual(v, fam) })
        .collect();
    let max_residual = outcome_residuals.iter().copied().fold(0.0, f64::max);
    let verdict = verdict_for(max_residual, threshold);
    Ok(SaturationCertificate {
        outcome_residuals,
        max_residual,
        pcc_holds: fam.pcc_holds(tol),
        completeness_residual: povm.completeness_residual(),
        verdict,
        tol_sat: threshold,
    })
}

pub fn verdict_for(residual: f64, threshold: f64) -> Verdict {
    if residual <= threshold {
        Verdict::Saturating
    } else if residual <= GREY_ZONE * threshold {
        Verdict::Inconclusive
    } else {
        Verdict::NotSaturating
    }
}

/// Unitary `U` with `diag(U†AU) = 0` for a traceless `A`.
///
/// Each step takes the largest remaining diagonal entry `zᵢ` and moves it to
/// zero with 2×2 rotations: directly against an entry on the opposite ray, or
/// against a point of an edge `[zⱼ, z_k]` that the ray from `zᵢ` through 0
/// crosses. Zeroed indices are never touched again.
pub fn hollowize_single(a: &CMat, tol: &Tolerances) -> Result<CMat> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix", d, a.ncols())));
    }
    let norm = 1.0f64.max(frobenius(a));
    let tr = a.trace().norm();
    if tr > tol.trace * norm {
        return Err(Error::NotTraceless(tr));
    }
    let thr = tol.hollow * norm;
    let mut u = identity(d);
    let mut b = a.clone();
    for _sweep in 0..(100 * d.max(1)) {
        if max_diag(&b) <= thr {
            return Ok(u);
        }
        let mut done = vec![false; d];
        loop {
            let live: Vec<usize> = (0..d).filter(|&k| !done[k] && b[(k, k)].norm() > thr).collect();
            if live.len() < 2 {
                break;
            }
            let i = *live
                .iter()
                .max_by(|&&p, &&q| b[(p, p)].norm().total_cmp(&b[(q, q)].norm()).then(q.cmp(&p)))
                .unwrap();
            if !zero_entry(&mut b, &mut u, i, &live) {
                break;
            }
            done[i] = true;
        }
    }
    let worst = max_diag(&b);
    if worst <= thr {
        Ok(u)
    } else {
        Err(Error::Internal(format!(
            "hollowization stalled with diagonal magnitude {worst:.3e}"
        )))
    }
}

fn max_diag(b: &CMat) -> f64 {
    (0..b.nrows()).map(|k| b[(k, k)].norm()).fold(0.0, f64::max)
}

/// Zero `B_ii` using indices from `live`; returns false when no admissible
/// partner exists.
fn zero_entry(b: &mut CMat, u: &mut CMat, i: usize, live: &[usize]) -> bool {
    let zi = b[(i, i)];
    let others: Vec<usize> = live.iter().copied().filter(|&k| k != i).collect();

    // Partner on the opposite ray through the origin.
    let opposite = others
        .iter()
        .copied()
        .filter(|&k| {
            let zk = b[(k, k)];
            let cross = (zk * zi.conj()).im.abs();
            cross <= 1e-12 * zi.norm() * zk.norm() && (zk * zi.conj()).re < 0.0
        })
        .max_by(|&p, &q| b[(p, p)].norm().total_cmp(&b[(q, q)].norm()).then(q.cmp(&p)));
    if let Some(j) = opposite {
        rotate_to(b, u, i, j, ZERO);
        return true;
    }

    // Edge [z_j, z_k] hit by the ray z_i + t(0 - z_i), t >= 1.
    let mut best: Option<(usize, usize, C64, f64)> = None;
    for (n, &j) in others.iter().enumerate() {
        for &k in &others[n + 1..] {
            let zj = b[(j, j)];
            let zk = b[(k, k)];
            let e = zk - zj;
            // Solve zi(1 - t) = zj + m(zk - zj) for real t, m.
            let det = zi.re * e.im - zi.im * e.re;
            if det.abs() <= 1e-14 * zi.norm() * e.norm().max(f64::MIN_POSITIVE) {
                continue;
            }
            let rhs = zi - zj;
            // -t zi - m e = zj - zi  =>  t zi + m e = rhs
            let t = (rhs.re * e.im - rhs.im * e.re) / det;
            let m = (zi.re * rhs.im - zi.im * rhs.re) / det;
            if t >= 1.0 - 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&m) {
                let w = zj + e.scale(m.clamp(0.0, 1.0));
                let quality = det.abs();
                if best.is_none_or(|(_, _, _, q)| quality > q) {
                    best = Some((j, k, w, quality));
                }
            }
        }
    }
    match best {
        Some((j, k, w, _)) => {
            rotate_to(b, u, j, k, w);
            rotate_to(b, u, i, j, ZERO);
            true
        }
        None => false,
    }
}

/// Rotate in the `(p, q)` plane so that the new `B_pp` equals `target`, which
/// must lie on the segment `[B_pp, B_qq]`.
fn rotate_to(b: &mut CMat, u: &mut CMat, p: usize, q: usize, target: C64) {
    let d1 = b[(p, p)] - target;
    let d2 = b[(q, q)] - target;
    let (cs, sn) = if d1.norm() == 0.0 {
        (ONE, ZERO)
    } else if d2.norm() == 0.0 {
        (ZERO, ONE)
    } else {
        let phase = d1.unscale(d1.norm()).conj();
        let s1 = d1.norm();
        let s2 = (-(d2 * phase).re).max(0.0);
        let c12 = b[(p, q)] * phase;
        let c21 = b[(q, p)] * phase;
        // Pick φ so that c12 e^{iφ} + c21 e^{-iφ} is real.
        let ca = c12.im + c21.im;
        let cb = c12.re - c21.re;
        let phi = if ca == 0.0 && cb == 0.0 { 0.0 } else { (-ca).atan2(cb) };
        let e = C64::from_polar(1.0, phi);
        let x = (c12 * e + c21 * e.conj()).re;
        let root = (x * x + 4.0 * s1 * s2).sqrt();
        let t = if x >= 0.0 {
            if s2 == 0.0 {
                f64::INFINITY
            } else {
                (x + root) / (2.0 * s2)
            }
        } else {
            2.0 * s1 / (root - x)
        };
        if t.is_infinite() {
            (ZERO, e)
        } else {
            let cos = 1.0 / (1.0 + t * t).sqrt();
            (c(cos, 0.0), e.scale(t * cos))
        }
    };
    // Columns p, q of G: (cs e_p + sn e_q), (-conj(sn) e_p + conj(cs) e_q).
    let d = b.nrows();
    let mut g = identity(d);
    g[(p, p)] = cs;
    g[(q, p)] = sn;
    g[(p, q)] = -sn.conj();
    g[(q, q)] = cs.conj();
    *b = g.adjoint() * &*b * &g;
    *u = &*u * g;
}

/// If every `M_{j,ab}` vanishes, returns `Some(αⱼ)` with `Lⱼ = αⱼ Π_s`.
pub fn vanishing_m_structure(
    slds: &SldSet,
    spec: &SpectralData,
    j: usize,
    tol: &Tolerances,
) -> Result<Option<f64>> {
    let l = &slds.operators[j];
    let r = spec.rank;
    let scale = 1.0f64.max(frobenius(l));
    let thr = tol.sat * scale;
    for a in 0..r {
        let pa = spec.psi(a);
        let lpa = l * &pa;
        for b in 0..r {
            let pb = spec.psi(b);
            let m = outer(&lpa, &pb) - outer(&pa, &(l * &pb));
            if max_abs(&m) > thr {
                return Ok(None);
            }
        }
    }
    let alpha = if r == 0 {
        0.0
    } else {
        trace_inner(&spec.support_projector, l).re / r as f64
    };
    let gap = frobenius(&(l - spec.support_projector.scale(alpha)));
    if gap > thr.max(tol.sld * scale) * (spec.dim() as f64) {
        return Err(Error::Internal(format!(
            "vanishing M but L_{j} differs from a multiple of the support projector by {gap:.3e}"
        )));
    }
    Ok(Some(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::model::spectral_decompose;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn full_rank_qubit() -> SpectralData {
        let rho = CMat::from_row_slice(2, 2, &[c(0.7, 0.0), ZERO, ZERO, c(0.3, 0.0)]);
        spectral_decompose(&rho, &tol()).unwrap()
    }

    #[test]
    fn commuting_diagonal_slds_give_zero_w() {
        let spec = full_rank_qubit();
        let slds = SldSet {
            operators: vec![pauli::z(), pauli::z().scale(2.0)],
        };
        let fam = build_wm_family(&spec, &slds);
        assert_eq!(fam.w.len(), 4);
        assert_eq!(fam.m.len(), 8);
        for e in &fam.w {
            assert!(max_abs(&e.op) < 1e-15);
        }
    }

    #[test]
    fn single_parameter_has_no_w() {
        let spec = full_rank_qubit();
        let fam = build_wm_family(&spec, &SldSet { operators: vec![pauli::x()] });
        assert!(fam.w.is_empty());
        assert_eq!(fam.m.len(), 4);
    }

    #[test]
    fn antisymmetric_lookup() {
        let spec = full_rank_qubit();
        let slds = SldSet {
            operators: vec![pauli::x(), pauli::y(), pauli::z()],
        };
        let fam = build_wm_family(&spec, &slds);
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        let lhs = fam.w_op(i, j, a, b);
                        let l = &slds.operators;
                        let p = spec.p(a, b);
                        let direct = &l[i] * &p * &l[j] - &l[j] * &p * &l[i];
                        assert!(max_abs(&(lhs - direct)) < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn sld_eigenbasis_saturates_single_parameter() {
        let spec = full_rank_qubit();
        let l = pauli::x().scale(1.3) + pauli::z().scale(0.4);
        let fam = build_wm_family(&spec, &SldSet { operators: vec![l.clone()] });
        let (_, vecs) = eigh(&l);
        for k in 0..2 {
            let chk = check_outcome(&vecs.column(k).into_owned(), &fam, 1e-12);
            assert!(chk.saturates, "residual {}", chk.residual);
        }
    }

    #[test]
    fn factorized_residual_matches_dense() {
        let spec = full_rank_qubit();
        let slds = SldSet {
            operators: vec![pauli::x(), pauli::y()],
        };
        let fam = build_wm_family(&spec, &slds);
        let pi = CVec::from_vec(vec![c(0.3, 0.2), c(-0.1, 0.9)]);
        let f = outcome_residual(&pi, &fam);
        let g = outcome_residual_dense(&pi, &fam);
        assert!((f - g).abs() < 1e-14);
        assert!(f > 1e-3);
    }

    #[test]
    fn hollowize_already_hollow() {
        let u = hollowize_single(&pauli::x(), &tol()).unwrap();
        assert!(max_abs(&(u - identity(2))) == 0.0);
    }

    #[test]
    fn hollowize_pauli_z() {
        let u = hollowize_single(&pauli::z(), &tol()).unwrap();
        let b = u.adjoint() * pauli::z() * &u;
        assert!(b[(0, 0)].norm() < 1e-15 && b[(1, 1)].norm() < 1e-15);
        assert!((b[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hollowize_non_hermitian() {
        // Diagonal 1, ω, ω² of the cube roots of unity: no opposite pairs.
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut a = zeros(3);
        a[(0, 0)] = ONE;
        a[(1, 1)] = w;
        a[(2, 2)] = w * w;
        a[(0, 2)] = c(0.3, -0.7);
        a[(1, 0)] = c(0.2, 0.1);
        let u = hollowize_single(&a, &tol()).unwrap();
        let b = u.adjoint() * &a * &u;
        assert!(max_diag(&b) < 1e-12);
        assert!(max_abs(&(u.adjoint() * &u - identity(3))) < 1e-13);
    }

    #[test]
    fn hollowize_rejects_trace() {
        assert!(matches!(
            hollowize_single(&identity(2), &tol()),
            Err(Error::NotTraceless(_))
        ));
    }

    #[test]
    fn vanishing_m_for_projector_multiple() {
        let spec = full_rank_qubit();
        let slds = SldSet {
            operators: vec![identity(2).scale(3.0), pauli::x()],
        };
        assert_eq!(vanishing_m_structure(&slds, &spec, 0, &tol()).unwrap(), Some(3.0));
        assert_eq!(vanishing_m_structure(&slds, &spec, 1, &tol()).unwrap(), None);
    }

    #[test]
    fn grey_zone_verdicts() {
        assert_eq!(verdict_for(1e-10, 1e-9), Verdict::Saturating);
        assert_eq!(verdict_for(1e-8, 1e-9), Verdict::Inconclusive);
        assert_eq!(verdict_for(1e-3, 1e-9), Verdict::NotSaturating);
    }
}
