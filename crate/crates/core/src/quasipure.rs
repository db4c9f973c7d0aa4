//! Quasi-pure states `ρ_λ = Σₐ qₐ |φₐ(λ)⟩⟨φₐ(λ)| ⊗ |a⟩⟨a|` with
//! `|φₐ(λ)⟩ = U_λ|φₐ⟩` acting on the primary factor only.
//!
//! Tensor ordering is primary ⊗ ancilla throughout. The SLDs are block
//! diagonal over the ancilla labels, so saturating measurements can be built
//! branch by branch and glued with the ancilla basis.

use rayon::prelude::*;

use crate::construct::{construct_optimal_measurement, ConstructOptions};
use crate::error::{Error, Result};
use crate::linalg::*;
use crate::model::{EstimationModel, GeneratorModel, PreparedModel, RankOnePovm};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone)]
pub struct QuasiPureModel {
    pub branch_weights: Vec<f64>,
    pub branch_states: Vec<CVec>,
    pub generators: Vec<CMat>,
    pub lambda_point: Vec<f64>,
}

/// Per-branch states and derivatives at the working point; indices are
/// `[branch][parameter]`.
#[derive(Debug, Clone)]
pub struct BranchDerivatives {
    pub phi: Vec<CVec>,
    pub dphi: Vec<Vec<CVec>>,
    /// `|Dᵢφₐ⟩ = (𝕀 − |φₐ⟩⟨φₐ|)|∂ᵢφₐ⟩`
    pub dcov: Vec<Vec<CVec>>,
}

impl QuasiPureModel {
    pub fn primary_dim(&self) -> usize {
        self.branch_states.first().map_or(0, |v| v.len())
    }

    pub fn rank(&self) -> usize {
        self.branch_weights.len()
    }

    pub fn dim(&self) -> usize {
        self.primary_dim() * self.rank()
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let r = self.rank();
        if r == 0 || self.branch_states.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} branch states",
                r,
                self.branch_states.len()
            )));
        }
        if self.generators.is_empty() || self.generators.len() != self.lambda_point.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} generators for {} lambda entries",
                self.generators.len(),
                self.lambda_point.len()
            )));
        }
        let dp = self.primary_dim();
        for (a, (&q, phi)) in self.branch_weights.iter().zip(&self.branch_states).enumerate() {
            if phi.len() != dp {
                return Err(Error::DimensionMismatch(format!("branch {a} has dimension {}", phi.len())));
            }
            if q <= 0.0 {
                return Err(Error::BadTrace {
                    what: format!("branch weight {a}"),
                    trace: q,
                    expected: 1.0,
                });
            }
            if (phi.norm() - 1.0).abs() > tol.trace {
                return Err(Error::BadTrace {
                    what: format!("branch state {a}"),
                    trace: phi.norm_squared(),
                    expected: 1.0,
                });
            }
        }
        let total: f64 = self.branch_weights.iter().sum();
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::BadTrace {
                what: "branch weights".into(),
                trace: total,
                expected: 1.0,
            });
        }
        for (j, h) in self.generators.iter().enumerate() {
            if h.nrows() != dp || h.ncols() != dp {
                return Err(Error::DimensionMismatch(format!("primary generator {j} has wrong shape")));
            }
            let defect = hermitian_defect(h);
            if defect > tol.herm {
                return Err(Error::NonHermitianInput {
                    what: format!("primary_generators[{j}]"),
                    defect,
                });
            }
        }
        Ok(())
    }

    fn generator_model(&self, phi: &CVec) -> GeneratorModel {
        GeneratorModel {
            rho0: outer(phi, phi),
            hamiltonians: self.generators.clone(),
            lambda_point: self.lambda_point.clone(),
        }
    }
}

fn ancilla_projector(r: usize, a: usize) -> CMat {
    let e = basis_vec(r, a);
    outer(&e, &e)
}

pub fn branch_derivatives(qp: &QuasiPureModel, tol: &Tolerances) -> Result<BranchDerivatives> {
    qp.validate(tol)?;
    let gen0 = qp.generator_model(&qp.branch_states[0]);
    let commuting = gen0.commuting(tol);
    let u = gen0.unitary_at(&qp.lambda_point);
    let mut phi = Vec::new();
    let mut dphi = Vec::new();
    let mut dcov = Vec::new();
    for state in &qp.branch_states {
        let p = &u * state;
        let derivs: Vec<CVec> = if commuting {
            qp.generators.iter().map(|h| (h * &p).map(|z| -z * I)).collect()
        } else {
            let h = tol.fd_step;
            (0..qp.generators.len())
                .map(|i| {
                    let central = |step: f64| {
                        let mut plus = qp.lambda_point.clone();
                        let mut minus = qp.lambda_point.clone();
                        plus[i] += step;
                        minus[i] -= step;
                        (gen0.unitary_at(&plus) * state - gen0.unitary_at(&minus) * state).unscale(2.0 * step)
                    };
                    (central(h / 2.0).scale(4.0) - central(h)).unscale(3.0)
                })
                .collect()
        };
        let cov: Vec<CVec> = derivs
            .iter()
            .map(|dp| {
                let overlap = p.dotc(dp);
                dp - p.scale(1.0).map(|z| z * overlap)
            })
            .collect();
        phi.push(p);
        dphi.push(derivs);
        dcov.push(cov);
    }
    Ok(BranchDerivatives { phi, dphi, dcov })
}

/// Block-diagonal state and derivatives on primary ⊗ ancilla.
pub fn build_quasipure(qp: &QuasiPureModel, tol: &Tolerances) -> Result<EstimationModel> {
    let br = branch_derivatives(qp, tol)?;
    let r = qp.rank();
    let dp = qp.primary_dim();
    let s = qp.generators.len();
    let d = dp * r;
    let mut rho = zeros(d);
    let mut drho = vec![zeros(d); s];
    for a in 0..r {
        let q = qp.branch_weights[a];
        let anc = ancilla_projector(r, a);
        let p = &br.phi[a];
        rho += kron(&outer(p, p), &anc).scale(q);
        for (d_i, dpi) in drho.iter_mut().zip(&br.dphi[a]) {
            let block = outer(dpi, p) + outer(p, dpi);
            *d_i += kron(&block, &anc).scale(q);
        }
    }
    let rho = hermitian_part(&rho);
    let drho = drho.iter().map(hermitian_part).collect();
    EstimationModel::new(rho, drho, qp.lambda_point.clone(), tol)
}

/// `Im⟨Dᵢφₐ|Dⱼφₐ⟩ = 0` for all `i < j` and branches.
pub fn check_qp_pcc(br: &BranchDerivatives, tol: &Tolerances) -> bool {
    qp_pcc_violation(br) <= tol.pcc * qp_pcc_scale(br)
}

pub fn qp_pcc_violation(br: &BranchDerivatives) -> f64 {
    let mut worst = 0.0f64;
    for d in &br.dcov {
        for i in 0..d.len() {
            for j in (i + 1)..d.len() {
                worst = worst.max(d[i].dotc(&d[j]).im.abs());
            }
        }
    }
    worst
}

/// Matches the PCC threshold of the assembled model, whose SLD blocks have
/// norm `2‖Dᵢφₐ‖`.
fn qp_pcc_scale(br: &BranchDerivatives) -> f64 {
    let m = br
        .dcov
        .iter()
        .flatten()
        .map(|v| v.norm_squared())
        .fold(0.0, f64::max);
    (4.0 * m).max(f64::MIN_POSITIVE)
}

/// `2(|Dφ⟩⟨φ| + |φ⟩⟨Dφ|)`
pub fn branch_sld(phi: &CVec, dphi_i: &CVec) -> CMat {
    let overlap = phi.dotc(dphi_i);
    let dcov = dphi_i - phi.map(|z| z * overlap);
    (outer(&dcov, phi) + outer(phi, &dcov)).scale(2.0)
}

/// Full-model SLDs `Σₐ L_{i,a} ⊗ |a⟩⟨a|`.
pub fn assembled_slds(br: &BranchDerivatives) -> Vec<CMat> {
    let r = br.phi.len();
    let s = br.dphi.first().map_or(0, |v| v.len());
    (0..s)
        .map(|i| {
            let mut l = zeros(br.phi[0].len() * r);
            for a in 0..r {
                l += kron(&branch_sld(&br.phi[a], &br.dphi[a][i]), &ancilla_projector(r, a));
            }
            l
        })
        .collect()
}

/// Pure-state model of one branch.
pub fn branch_model(br: &BranchDerivatives, a: usize, lambda: &[f64], tol: &Tolerances) -> Result<EstimationModel> {
    let p = &br.phi[a];
    let rho = outer(p, p);
    let drho = br.dcov[a].iter().map(|dv| outer(dv, p) + outer(p, dv)).collect();
    EstimationModel::new(rho, drho, lambda.to_vec(), tol)
}

/// Local measurement with classical communication: the ancilla label is read
/// first and branch `a` is measured in a saturating basis of its pure state.
pub fn lmcc_measurement(qp: &QuasiPureModel, opts: &ConstructOptions, tol: &Tolerances) -> Result<RankOnePovm> {
    let br = branch_derivatives(qp, tol)?;
    if !check_qp_pcc(&br, tol) {
        return Err(Error::PreconditionNotMet(format!(
            "branch PCC fails (max |Im<D_i phi|D_j phi>| = {:.3e})",
            qp_pcc_violation(&br)
        )));
    }
    let r = qp.rank();
    let branch_bases: Vec<Vec<CVec>> = (0..r)
        .into_par_iter()
        .map(|a| -> Result<Vec<CVec>> {
            let fail = |reason: String| Error::BranchConstructionFailed { branch: a, reason };
            let model = branch_model(&br, a, &qp.lambda_point, tol)?;
            let prepared = PreparedModel::new(model, tol).map_err(|e| fail(e.to_string()))?;
            let branch_opts = ConstructOptions {
                seed: opts.seed.wrapping_add(a as u64),
                ..opts.clone()
            };
            let res = construct_optimal_measurement(&prepared, &branch_opts, tol).map_err(|e| fail(e.to_string()))?;
            match (res.feasible, res.povm) {
                (true, Some(povm)) if povm.weights.is_none() => Ok(povm.vectors),
                (true, Some(povm)) => Ok((0..povm.len()).map(|w| povm.effective_vector(w)).collect()),
                _ => Err(fail(format!("{:?}", res.reason))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut vectors = Vec::new();
    for (a, basis) in branch_bases.iter().enumerate() {
        let anc = basis_vec(r, a);
        for e in basis {
            vectors.push(kron_vec(e, &anc));
        }
    }
    Ok(RankOnePovm::new(vectors))
}

/// The two-qubit primary system with a qubit ancilla:
/// `ρ₀ = q|0,+⟩⟨0,+| ⊗ |0⟩⟨0| + (1 − q)|1,φ⟩⟨1,φ| ⊗ |1⟩⟨1|`,
/// `|φ⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩`, `H₁ = σ_z ⊗ σ_z`, `H₂ = σ_x ⊗ σ_x`,
/// evaluated at `λ = 0`.
pub fn two_qubit_example(q: f64, theta: f64) -> QuasiPureModel {
    let ket0 = basis_vec(2, 0);
    let ket1 = basis_vec(2, 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVec::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
    let varphi = CVec::from_vec(vec![c((theta / 2.0).cos(), 0.0), c((theta / 2.0).sin(), 0.0)]);
    use crate::linalg::pauli;
    QuasiPureModel {
        branch_weights: vec![q, 1.0 - q],
        branch_states: vec![kron_vec(&ket0, &plus), kron_vec(&ket1, &varphi)],
        generators: vec![kron(&pauli::z(), &pauli::z()), kron(&pauli::x(), &pauli::x())],
        lambda_point: vec![0.0, 0.0],
    }
}

/// The hand-built LMCC vectors `|e^(a)_ν⟩ ⊗ |a⟩` for [`two_qubit_example`].
pub fn two_qubit_lmcc_povm(theta: f64) -> RankOnePovm {
    let k0 = basis_vec(2, 0);
    let k1 = basis_vec(2, 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVec::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
    let minus = CVec::from_vec(vec![c(s, 0.0), c(-s, 0.0)]);
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let varphi = CVec::from_vec(vec![c(ch, 0.0), c(sh, 0.0)]);
    let varphi_perp = CVec::from_vec(vec![c(sh, 0.0), c(-ch, 0.0)]);
    let varphi_x = CVec::from_vec(vec![c(sh, 0.0), c(ch, 0.0)]);
    let varphi_x_perp = CVec::from_vec(vec![c(-ch, 0.0), c(sh, 0.0)]);

    let r3 = 1.0 / 3f64.sqrt();
    let i_sqrt2 = c(0.0, 2f64.sqrt());
    let i_inv_sqrt2 = c(0.0, s);
    let i_sqrt32 = c(0.0, 1.5f64.sqrt());

    let branch = |main: &CVec, partner: &CVec, perp: &CVec, null: &CVec| -> Vec<CVec> {
        vec![
            (main + partner.map(|z| z * i_sqrt2)).scale(r3),
            (main - partner.map(|z| z * i_inv_sqrt2) + perp.map(|z| z * i_sqrt32)).scale(r3),
            (main - partner.map(|z| z * i_inv_sqrt2) - perp.map(|z| z * i_sqrt32)).scale(r3),
            null.clone(),
        ]
    };
    let e0 = branch(
        &kron_vec(&k0, &plus),
        &kron_vec(&k1, &plus),
        &kron_vec(&k0, &minus),
        &kron_vec(&k1, &minus),
    );
    let e1 = branch(
        &kron_vec(&k1, &varphi),
        &kron_vec(&k0, &varphi_x),
        &kron_vec(&k1, &varphi_perp),
        &kron_vec(&k0, &varphi_x_perp),
    );
    let mut vectors = Vec::with_capacity(8);
    for e in e0 {
        vectors.push(kron_vec(&e, &k0));
    }
    for e in e1 {
        vectors.push(kron_vec(&e, &k1));
    }
    RankOnePovm::new(vectors)
}
