use proptest::prelude::*;
use rand::Rng;

use qmetro::construct::{analyze, find_hollow_vector, SearchOptions};
use qmetro::geometry::{build_subspaces, complement_basis, hermitianize_family, span_subspace, FamilyKind};
use qmetro::hollow::{
    build_wm_family, check_outcome, check_outcome_reduced, hollowize_single, outcome_residual, outcome_residual_dense,
};
use qmetro::io::ModelFile;
use qmetro::linalg::*;
use qmetro::model::{
    cfim, materialize, qfim, qfim_outcome, solve_slds, EstimationModel, PreparedModel, SpectralData,
};
use qmetro::sample;
use qmetro::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn prepared(seed: u64, dmax: usize, smax: usize) -> PreparedModel {
    let t = tol();
    let mut rng = sample::rng(seed);
    let d = rng.random_range(2..=dmax);
    let s = rng.random_range(1..=smax);
    let k = rng.random_range(1..=d);
    PreparedModel::new(sample::model(&mut rng, d, s, k, &t).unwrap(), &t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcome_fisher_gap_is_psd(seed in any::<u64>()) {
        let p = prepared(seed, 6, 3);
        let mut rng = sample::rng(seed ^ 1);
        let pi = sample::unit_vector(&mut rng, p.model.dim);
        let prob = expect(&pi, &p.model.rho).re;
        prop_assume!(prob > 1e-10);
        let g = RVec::from_fn(p.model.num_params, |i, _| expect(&pi, &p.model.drho[i]).re);
        let fc = (&g * g.transpose()).unscale(prob);
        let (evals, _) = eigh_real(&(qfim_outcome(&p.model.rho, &p.slds, &pi) - fc));
        prop_assert!(evals[0] >= -1e-9 * (1.0 + evals.last().unwrap().abs()));
    }

    #[test]
    fn outcome_qfims_sum_to_qfim(seed in any::<u64>()) {
        let p = prepared(seed, 6, 3);
        let mut rng = sample::rng(seed ^ 2);
        let d = p.model.dim;
        let m = rng.random_range(d..=2 * d);
        let povm = sample::rank_one_povm(&mut rng, d, m);
        let mut sum = RMat::zeros(p.model.num_params, p.model.num_params);
        for w in 0..povm.len() {
            sum += qfim_outcome(&p.model.rho, &p.slds, &povm.effective_vector(w));
        }
        prop_assert!(max_abs_real(&(sum - &p.qfim.matrix)) < 1e-10);
        let c = cfim(&p.model, &povm, &tol()).unwrap();
        let parts = c.per_outcome.iter().fold(RMat::zeros(c.total.nrows(), c.total.ncols()), |a, b| a + b);
        prop_assert!(max_abs_real(&(parts - &c.total)) < 1e-12 * (1.0 + max_abs_real(&c.total)));
    }

    #[test]
    fn residual_is_rephasing_invariant(seed in any::<u64>(), phase in 0.0f64..std::f64::consts::TAU) {
        let p = prepared(seed, 5, 3);
        let fam = build_wm_family(&p.spectral, &p.slds);
        let pi = sample::unit_vector(&mut sample::rng(seed ^ 3), p.model.dim);
        let rotated = pi.map(|z| z * C64::from_polar(1.0, phase));
        let (a, b) = (outcome_residual(&pi, &fam), outcome_residual(&rotated, &fam));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn factorized_residual_matches_dense_operators(seed in any::<u64>()) {
        let p = prepared(seed, 5, 3);
        let fam = build_wm_family(&p.spectral, &p.slds);
        let pi = sample::unit_vector(&mut sample::rng(seed ^ 4), p.model.dim);
        let (a, b) = (outcome_residual(&pi, &fam), outcome_residual_dense(&pi, &fam));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn w_adjoint_identity(seed in any::<u64>()) {
        let p = prepared(seed, 4, 3);
        let fam = build_wm_family(&p.spectral, &p.slds);
        let (s, r) = (fam.num_params, fam.rank);
        for i in 0..s {
            for j in 0..s {
                for a in 0..r {
                    for b in 0..r {
                        let w = fam.w_op(i, j, a, b);
                        prop_assert!(max_abs(&(w.adjoint() - fam.w_op(j, i, b, a))) < 1e-12);
                        prop_assert!(max_abs(&(w.adjoint() + fam.w_op(i, j, b, a))) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn hermitianized_members_reconstruct_family(seed in any::<u64>()) {
        let p = prepared(seed, 4, 3);
        let t = tol();
        let fam = build_wm_family(&p.spectral, &p.slds);
        let members = hermitianize_family(&fam, &t).unwrap();
        let (s, r) = (fam.num_params, fam.rank);
        prop_assert_eq!(members.len(), s * (s + 1) * r * r / 2);
        for m in &members {
            prop_assert!(hermitian_defect(&m.op) < 1e-12);
        }
        // Members are i·X^(α); W_ab = (W^x + i W^y)/2 and W_aa = W^z.
        let original = |m: &qmetro::geometry::HermitianMember| match m.kind {
            FamilyKind::W => fam.w_op(m.params.0, m.params.1, m.pair.0, m.pair.1),
            FamilyKind::M => fam.m_op(m.params.0, m.pair.0, m.pair.1).clone(),
        };
        for x in &members {
            let rebuilt = match x.component {
                'z' => x.op.map(|z| -z * I),
                'x' => {
                    let y = members
                        .iter()
                        .find(|m| m.component == 'y' && m.kind == x.kind && m.params == x.params && m.pair == x.pair)
                        .unwrap();
                    (x.op.map(|z| -z * I) + &y.op).unscale(2.0)
                }
                _ => continue,
            };
            prop_assert!(max_abs(&(rebuilt - original(x))) < 1e-12);
        }
    }

    #[test]
    fn subspace_and_complement_span_everything(seed in any::<u64>()) {
        let p = prepared(seed, 5, 2);
        let t = tol();
        let fam = build_wm_family(&p.spectral, &p.slds);
        let pair = build_subspaces(&fam, &t).unwrap();
        let d = p.model.dim;
        prop_assert_eq!(pair.dim_v + pair.v_perp.len(), d * d);
        let mut rng = sample::rng(seed ^ 5);
        for _ in 0..3 {
            let h = sample::hermitian(&mut rng, d);
            let x = herm_to_real(&h);
            let back = pair.v.project_coords(&x) + pair.v_perp.project_coords(&x);
            prop_assert!((back - x).norm() < 1e-10 * (1.0 + h.norm()));
        }
    }

    #[test]
    fn reduced_check_agrees_with_full_check(seed in any::<u64>()) {
        let p = prepared(seed, 5, 3);
        let t = tol();
        let fam = build_wm_family(&p.spectral, &p.slds);
        let pi = sample::unit_vector(&mut sample::rng(seed ^ 6), p.model.dim);
        let thr = fam.threshold(&t);
        prop_assert_eq!(check_outcome(&pi, &fam, thr).saturates, check_outcome_reduced(&pi, &fam, thr, &t).saturates());
    }

    #[test]
    fn hollowization_zeroes_diagonal(seed in any::<u64>(), d in 2usize..=8) {
        let a = sample::traceless_hermitian(&mut sample::rng(seed), d);
        let u = hollowize_single(&a, &tol()).unwrap();
        let b = u.adjoint() * &a * &u;
        prop_assert!((0..d).all(|i| b[(i, i)].norm() < 1e-10));
        prop_assert!(max_abs(&(u.adjoint() * &u - identity(d))) < 1e-10);
    }

    #[test]
    fn real_coordinates_are_isometric(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = sample::rng(seed);
        let (a, b) = (sample::hermitian(&mut rng, d), sample::hermitian(&mut rng, d));
        let inner = trace_inner(&a, &b).re;
        prop_assert!((herm_to_real(&a).dot(&herm_to_real(&b)) - inner).abs() < 1e-10 * (1.0 + inner.abs()));
        prop_assert!(max_abs(&(real_to_herm(&herm_to_real(&a), d) - a)) < 1e-14);
    }

    #[test]
    fn lyapunov_equation_holds(seed in any::<u64>()) {
        let p = prepared(seed, 6, 3);
        prop_assert!(p.slds.lyapunov_residual(&p.model.rho, &p.model.drho) < 1e-10);
    }

    #[test]
    fn commuting_derivatives_match_finite_differences(seed in any::<u64>()) {
        let t = tol();
        let mut rng = sample::rng(seed);
        let d = rng.random_range(2..=5);
        let hs = sample::commuting_hamiltonians(&mut rng, d, 2);
        let mut gen = sample::pure_generator_model(&mut rng, d, hs);
        gen.lambda_point = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let analytic = materialize(&gen, &t).unwrap();
        for (a, b) in analytic.drho.iter().zip(gen.finite_difference_derivatives(t.fd_step)) {
            prop_assert!(max_abs(&(a - b)) < 1e-6);
        }
    }

    #[test]
    fn model_files_round_trip(seed in any::<u64>()) {
        let p = prepared(seed, 5, 3);
        let text = serde_json::to_string(&ModelFile::from_model(&p.model, None)).unwrap();
        let back: ModelFile = serde_json::from_str(&text).unwrap();
        let m = back.load(&tol()).unwrap().model;
        prop_assert_eq!(m.rho, p.model.rho);
        prop_assert_eq!(m.drho, p.model.drho);
    }
}

/// Rank-`k` state with a doubly degenerate top eigenvalue.
fn degenerate_model(seed: u64, d: usize) -> EstimationModel {
    let t = tol();
    let mut rng = sample::rng(seed);
    let u = sample::unitary(&mut rng, d);
    let p = [0.4, 0.4, 0.2];
    let mut rho = zeros(d);
    for (a, &pa) in p.iter().enumerate() {
        let col: CVec = u.column(a).into();
        rho += outer(&col, &col).scale(pa);
    }
    let drho = (0..2)
        .map(|_| {
            let h = sample::hermitian(&mut rng, d);
            hermitian_part(&commutator(&h, &rho).map(|z| -z * I))
        })
        .collect();
    EstimationModel::new(hermitian_part(&rho), drho, vec![0.0, 0.0], &t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn degenerate_cluster_remixing_keeps_geometry(seed in any::<u64>(), angle in 0.0f64..3.1, phase in 0.0f64..6.2) {
        let t = tol();
        let model = degenerate_model(seed, 4);
        let p = PreparedModel::new(model.clone(), &t).unwrap();
        prop_assert!(p.spectral.degenerate);
        let mut vecs = p.spectral.eigenvectors.clone();
        let (a, b) = (p.spectral.psi(0), p.spectral.psi(1));
        let rot = C64::from_polar(1.0, phase);
        let a2 = a.scale(angle.cos()) + b.map(|z| z * rot * angle.sin());
        let b2 = b.scale(angle.cos()) - a.map(|z| z * rot.conj() * angle.sin());
        vecs.set_column(0, &a2);
        vecs.set_column(1, &b2);
        let remixed = SpectralData::from_parts(p.spectral.eigenvalues.clone(), vecs, &t);
        let slds = solve_slds(&remixed, &model, &t).unwrap();
        for (l1, l2) in slds.operators.iter().zip(&p.slds.operators) {
            prop_assert!(max_abs(&(l1 - l2)) < 1e-9);
        }
        prop_assert!(max_abs_real(&(qfim(&remixed, &slds, &t).matrix - &p.qfim.matrix)) < 1e-10);
        let v1 = build_subspaces(&build_wm_family(&p.spectral, &p.slds), &t).unwrap();
        let v2 = build_subspaces(&build_wm_family(&remixed, &slds), &t).unwrap();
        prop_assert_eq!(v1.dim_v, v2.dim_v);
        let pi = sample::unit_vector(&mut sample::rng(seed ^ 7), 4);
        let proj = outer(&pi, &pi);
        prop_assert!((v1.v.projection_norm(&proj) - v2.v.projection_norm(&proj)).abs() < 1e-9);
    }
}

#[test]
fn hollow_vectors_lie_outside_the_span() {
    let t = tol();
    for seed in 0..10 {
        let mut rng = sample::rng(seed);
        let hs = sample::commuting_hamiltonians(&mut rng, 4, 2);
        let gen = sample::pure_generator_model(&mut rng, 4, hs);
        let p = PreparedModel::new(materialize(&gen, &t).unwrap(), &t).unwrap();
        let a = analyze(&p, &t).unwrap();
        let h = find_hollow_vector(&a.subspaces.v, &[], seed, 0, &SearchOptions::default())
            .found()
            .unwrap();
        assert!(a.subspaces.v.projection_norm(&outer(&h.pi, &h.pi)) < 1e-9);
        assert!(check_outcome(&h.pi, &a.family, a.family.threshold(&t)).saturates);
    }
}

#[test]
fn complement_of_empty_span_is_everything() {
    let t = tol();
    for d in 1..=4 {
        let v = span_subspace(&[], d, t.gs);
        let (perp, leak) = complement_basis(&v, d, &t);
        assert_eq!(perp.len(), d * d);
        assert!(perp.contains_identity);
        assert!(leak < 1e-14);
    }
}
