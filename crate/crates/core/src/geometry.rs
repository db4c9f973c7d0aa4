//! The real subspace 𝒱 ⊂ Herm(d) spanned by the Hermitianized saturation
//! family, and its trace-orthogonal complement 𝒱⊥.
//!
//! Rank-one optimal outcomes are exactly the pure projectors lying in 𝒱⊥.
//! Internally every Hermitian matrix is handled through
//! [`herm_to_real`], where `Tr(AB)` is the Euclidean inner product.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hollow::{WMFamily, GREY_ZONE};
use crate::linalg::*;
use crate::tolerances::Tolerances;

/// Trace-orthogonal basis with `Tr(T_k T_l) = normalization · δ_kl`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    pub dim: usize,
    pub elements: Vec<CMat>,
    /// Real coordinates of `elements`, same order.
    pub coords: Vec<RVec>,
    pub normalization: f64,
    /// The first element is 𝕀 and the rest are traceless.
    pub contains_identity: bool,
}

#[derive(Debug, Clone)]
pub struct SubspacePair {
    /// Orthonormal basis of 𝒱.
    pub v: HermitianBasis,
    /// Basis of 𝒱⊥ normalized to `d`, with `T₀ = 𝕀` when 𝕀 ∈ 𝒱⊥.
    pub v_perp: HermitianBasis,
    pub dim_v: usize,
    /// `dim 𝒱⊥ − 1`.
    pub n: i64,
    /// Number of Hermitianized family members before removing dependencies.
    pub family_size: usize,
    /// Numerical rank of the family Gram matrix, computed independently of
    /// the Gram-Schmidt pass.
    pub gram_rank: usize,
    /// `‖P_𝒱 𝕀‖_F / ‖𝕀‖_F`.
    pub identity_leakage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FamilyKind {
    W,
    M,
}

/// One Hermitianized family member together with its origin.
#[derive(Debug, Clone)]
pub struct HermitianMember {
    pub kind: FamilyKind,
    /// `(i, j)` for `W`, `(i, i)` for `M`.
    pub params: (usize, usize),
    pub pair: (usize, usize),
    /// `'x'`, `'y'` or `'z'`.
    pub component: char,
    pub op: CMat,
}

/// `iW^(α)` and `iM^(α)` for `a < b` with `α ∈ {x, y}` and for `a = b` with
/// `α = z`, where `σ^(x)_ab = P_ab + P_ba`, `σ^(y)_ab = −i(P_ab − P_ba)`,
/// `σ^(z)_aa = P_aa` and `M^(α) = [Lᵢ, σ^(α)]`.
pub fn hermitianize_family(fam: &WMFamily, tol: &Tolerances) -> Result<Vec<HermitianMember>> {
    let r = fam.rank;
    let s = fam.num_params;
    let mut out = Vec::with_capacity(s * (s + 1) * r * r / 2);
    let mut push = |kind, params, pair, component, anti: CMat| -> Result<()> {
        let op = anti.map(|z| z * I);
        let defect = hermitian_defect(&op);
        if defect > tol.herm * fam.scale.max(1.0) {
            return Err(Error::Internal(format!(
                "Hermitianized {kind:?} member has defect {defect:.3e}"
            )));
        }
        out.push(HermitianMember {
            kind,
            params,
            pair,
            component,
            op: hermitian_part(&op),
        });
        Ok(())
    };
    for i in 0..s {
        for j in (i + 1)..s {
            for a in 0..r {
                push(FamilyKind::W, (i, j), (a, a), 'z', fam.w_op(i, j, a, a))?;
                for b in (a + 1)..r {
                    let wab = fam.w_op(i, j, a, b);
                    let wba = fam.w_op(i, j, b, a);
                    push(FamilyKind::W, (i, j), (a, b), 'x', &wab + &wba)?;
                    push(FamilyKind::W, (i, j), (a, b), 'y', (&wab - &wba).map(|z| -z * I))?;
                }
            }
        }
        for a in 0..r {
            push(FamilyKind::M, (i, i), (a, a), 'z', fam.m_op(i, a, a).clone())?;
            for b in (a + 1)..r {
                let mab = fam.m_op(i, a, b);
                let mba = fam.m_op(i, b, a);
                push(FamilyKind::M, (i, i), (a, b), 'x', mab + mba)?;
                push(FamilyKind::M, (i, i), (a, b), 'y', (mab - mba).map(|z| -z * I))?;
            }
        }
    }
    Ok(out)
}

/// Modified Gram-Schmidt in real coordinates, two passes; a vector is
/// discarded when its residual norm falls below `abs_tol`.
pub fn orthonormalize_real(vectors: &[RVec], abs_tol: f64) -> Vec<RVec> {
    let mut basis: Vec<RVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = q.dot(&w);
                w.axpy(-p, q, 1.0);
            }
        }
        let n = w.norm();
        if n > abs_tol && n > 0.0 {
            basis.push(w.unscale(n));
        }
    }
    basis
}

/// Orthonormal basis of the real span of `mats`.
///
/// Vectors whose residual after projection is below `tol_gs` times the
/// largest input norm are dropped, so exact zeros polluted by rounding do not
/// enter the basis.
pub fn span_subspace(mats: &[CMat], d: usize, tol_gs: f64) -> HermitianBasis {
    let coords: Vec<RVec> = mats.iter().map(herm_to_real).collect();
    let scale = coords.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ortho = orthonormalize_real(&coords, tol_gs * scale);
    HermitianBasis {
        dim: d,
        elements: ortho.iter().map(|v| real_to_herm(v, d)).collect(),
        coords: ortho,
        normalization: 1.0,
        contains_identity: false,
    }
}

/// Numerical rank of the real span of `mats` via singular values of the
/// coordinate matrix, with the same cutoff as [`span_subspace`].
pub fn gram_rank(mats: &[CMat], tol_gs: f64) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let coords: Vec<RVec> = mats.iter().map(herm_to_real).collect();
    let scale = coords.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let sv = RMat::from_columns(&coords).singular_values();
    let cutoff = tol_gs * scale;
    sv.iter().filter(|&&s| s > cutoff).count()
}

impl HermitianBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Projection of a Hermitian matrix onto the span, in real coordinates.
    pub fn project_coords(&self, x: &RVec) -> RVec {
        let mut out = RVec::zeros(x.len());
        for q in &self.coords {
            out.axpy(q.dot(x) / self.normalization, q, 1.0);
        }
        out
    }

    /// `‖P X‖_F` for the orthogonal projector `P` onto the span.
    pub fn projection_norm(&self, x: &CMat) -> f64 {
        let v = herm_to_real(x);
        self.coords
            .iter()
            .map(|q| (q.dot(&v)).powi(2) / self.normalization)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation of `Tr(T_k T_l)` from `normalization · δ_kl`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, a) in self.coords.iter().enumerate() {
            for (l, b) in self.coords.iter().enumerate() {
                let target = if k == l { self.normalization } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }
}

/// Basis of the orthogonal complement of `v` in Herm(d), normalized to `d`.
///
/// When 𝕀 is orthogonal to 𝒱 (relative leakage within the PCC grey zone),
/// `T₀ = 𝕀` and all other elements are traceless.
pub fn complement_basis(v: &HermitianBasis, d: usize, tol: &Tolerances) -> (HermitianBasis, f64) {
    let n2 = d * d;
    let id = herm_to_real(&identity(d));
    let leak = v
        .coords
        .iter()
        .map(|q| q.dot(&id).powi(2))
        .sum::<f64>()
        .sqrt()
        / (d as f64).sqrt();
    let identity_first = leak <= GREY_ZONE * tol.pcc;

    let mut seed: Vec<RVec> = v.coords.clone();
    if identity_first {
        seed.push(id.unscale((d as f64).sqrt()));
    }
    let mut proj = RMat::identity(n2, n2);
    for q in &seed {
        proj -= q * q.transpose();
    }
    let (vals, vecs) = eigh_real(&proj);
    let mut rest: Vec<RVec> = (0..n2)
        .filter(|&k| vals[k] > 0.5)
        .map(|k| vecs.column(k).into_owned())
        .collect();
    // The eigensolver is accurate to rounding; one more pass against the seed
    // keeps the complement orthogonal to 𝒱 at the 1e-15 level.
    rest = orthonormalize_real(
        &rest
            .iter()
            .map(|w| {
                let mut w = w.clone();
                for q in &seed {
                    let p = q.dot(&w);
                    w.axpy(-p, q, 1.0);
                }
                w
            })
            .collect::<Vec<_>>(),
        1e-8,
    );
    let scale = (d as f64).sqrt();
    let mut coords = Vec::with_capacity(rest.len() + 1);
    if identity_first {
        coords.push(id);
    }
    coords.extend(rest.into_iter().map(|w| w.scale(scale)));
    let basis = HermitianBasis {
        dim: d,
        elements: coords.iter().map(|w| real_to_herm(w, d)).collect(),
        coords,
        normalization: d as f64,
        contains_identity: identity_first,
    };
    (basis, leak)
}

/// 𝒱 and 𝒱⊥ for a saturation family.
pub fn build_subspaces(fam: &WMFamily, tol: &Tolerances) -> Result<SubspacePair> {
    let d = fam.dim;
    let members = hermitianize_family(fam, tol)?;
    let mats: Vec<CMat> = members.into_iter().map(|m| m.op).collect();
    let v = span_subspace(&mats, d, tol.gs);
    let gram_rank = gram_rank(&mats, tol.gs);
    let (v_perp, identity_leakage) = complement_basis(&v, d, tol);
    let dim_v = v.len();
    if dim_v + v_perp.len() != d * d {
        return Err(Error::Internal(format!(
            "dim V ({dim_v}) + dim V_perp ({}) != d^2 ({})",
            v_perp.len(),
            d * d
        )));
    }
    Ok(SubspacePair {
        n: v_perp.len() as i64 - 1,
        v,
        v_perp,
        dim_v,
        family_size: mats.len(),
        gram_rank,
        identity_leakage,
    })
}

/// `false` when `n < d − 1`, in which case no measurement saturates the bound.
pub fn dimension_bound_verdict(n: i64, d: usize) -> bool {
    n >= d as i64 - 1
}

/// `max_{μ=1..d−2} 2μ(d + ½ − μ) + (d − 2)`; with the PCC, `n` at or above this
/// value guarantees a saturating projective measurement.
pub fn sufficiency_threshold(d: usize) -> Result<usize> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    Ok((1..=d - 2)
        .map(|mu| 2 * mu * d + mu - 2 * mu * mu + d - 2)
        .max()
        .unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn collinear_span() {
        let b = span_subspace(&[pauli::x(), pauli::x().scale(2.0)], 2, 1e-10);
        assert_eq!(b.len(), 1);
        assert_eq!(gram_rank(&[pauli::x(), pauli::x().scale(2.0)], 1e-10), 1);
    }

    #[test]
    fn full_qubit_span() {
        let mats = [pauli::x(), pauli::y(), pauli::z(), identity(2)];
        let b = span_subspace(&mats, 2, 1e-10);
        assert_eq!(b.len(), 4);
        assert!(b.orthogonality_defect() < 1e-14);
    }

    #[test]
    fn complement_of_zero() {
        let v = span_subspace(&[], 2, 1e-10);
        let (c, leak) = complement_basis(&v, 2, &tol());
        assert_eq!(leak, 0.0);
        assert!(c.contains_identity);
        assert_eq!(c.len() as i64 - 1, 3);
        assert!(c.orthogonality_defect() < 1e-13);
        for t in &c.elements[1..] {
            assert!(t.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn complement_of_sigma_z() {
        let v = span_subspace(&[pauli::z()], 2, 1e-10);
        let (c, _) = complement_basis(&v, 2, &tol());
        assert_eq!(c.len() as i64 - 1, 2);
        for t in &c.elements {
            assert!(trace_inner(t, &pauli::z()).norm() < 1e-14);
        }
    }

    #[test]
    fn complement_without_identity() {
        let v = span_subspace(&[pauli::z() + identity(2)], 2, 1e-10);
        let (c, leak) = complement_basis(&v, 2, &tol());
        assert!(leak > 0.1);
        assert!(!c.contains_identity);
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn dimension_bound_boundary() {
        assert!(dimension_bound_verdict(3, 2));
        assert!(!dimension_bound_verdict(0, 2));
        assert!(dimension_bound_verdict(4, 5));
        assert!(!dimension_bound_verdict(3, 5));
        assert!(!dimension_bound_verdict(-1, 2));
    }

    #[test]
    fn sufficiency_values() {
        assert_eq!(sufficiency_threshold(3).unwrap(), 6);
        assert_eq!(sufficiency_threshold(4).unwrap(), 12);
        // Brute-force enumeration in floating point.
        for d in 3..12usize {
            let df = d as f64;
            let oracle = (1..=d - 2)
                .map(|m| {
                    let m = m as f64;
                    2.0 * m * (df + 0.5 - m) + (df - 2.0)
                })
                .fold(f64::MIN, f64::max);
            assert_eq!(sufficiency_threshold(d).unwrap() as f64, oracle);
        }
        assert!(matches!(sufficiency_threshold(2), Err(Error::DimensionTooSmall(2))));
    }
}
