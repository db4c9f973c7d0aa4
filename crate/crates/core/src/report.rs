//! Machine-readable reports for the analysis, construction and verification
//! pipelines. Every report embeds the configuration that produced it, and
//! serializing the same report twice gives the same bytes.

use serde::{Deserialize, Serialize};

use crate::construct::{
    analyze, construct_optimal_measurement, fisher_comparison, ConstructOptions, ConstructionResult, FisherComparison,
    GeometrySummary, Infeasibility, Method, SearchOptions,
};
use crate::error::Result;
use crate::hollow::{build_wm_family, check_povm, SaturationCertificate, Verdict};
use crate::io::{real_matrix_to_rows, vector_to_pairs, Pair, PovmFile};
use crate::model::{born_probabilities, PreparedModel, RankOnePovm};
use crate::tolerances::Tolerances;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything besides the model that determines a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub max_restarts: usize,
    pub max_iters: usize,
    pub chain_restarts: usize,
    pub pool_size: Option<usize>,
    pub allow_incomplete: bool,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        let o = ConstructOptions::default();
        RunConfig {
            seed: o.seed,
            max_restarts: o.search.max_restarts,
            max_iters: o.search.max_iters,
            chain_restarts: o.chain_restarts,
            pool_size: o.pool_size,
            allow_incomplete: o.allow_incomplete,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn construct_options(&self) -> ConstructOptions {
        ConstructOptions {
            seed: self.seed,
            search: SearchOptions {
                max_restarts: self.max_restarts,
                max_iters: self.max_iters,
                ..SearchOptions::default()
            },
            chain_restarts: self.chain_restarts,
            pool_size: self.pool_size,
            allow_incomplete: self.allow_incomplete,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

fn tool() -> ToolInfo {
    ToolInfo {
        name: "qmetro",
        version: VERSION,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelVerdict {
    /// The QFIM vanishes; any measurement attains it.
    TriviallySaturable,
    /// PCC holds and `n` meets the sufficiency threshold.
    Saturable,
    /// Necessary conditions hold; only a construction can decide.
    Undetermined,
    NotSaturable,
}

#[derive(Debug, Clone, Serialize)]
pub struct QfimReport {
    pub matrix: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
    pub singular: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PccReport {
    pub holds: bool,
    pub violation: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub qfim: QfimReport,
    pub pcc: PccReport,
    pub geometry: GeometrySummary,
    pub verdict: ModelVerdict,
    pub notes: Vec<String>,
}

pub fn analysis_report(prepared: &PreparedModel, config: &RunConfig) -> Result<AnalysisReport> {
    let tol = &config.tolerances;
    let analysis = analyze(prepared, tol)?;
    let g = analysis.summary;
    let q = &prepared.qfim;
    let zero_qfim = q.matrix.iter().all(|&x| x.abs() <= tol.singular);
    let mut notes = Vec::new();
    let verdict = if zero_qfim {
        notes.push("QFIM vanishes: every measurement is trivially optimal".to_string());
        ModelVerdict::TriviallySaturable
    } else if !g.dimension_bound_ok || !g.pcc_holds {
        if !g.dimension_bound_ok {
            notes.push(format!(
                "not saturable: n = {} is below d - 1 = {}",
                g.n,
                g.d as i64 - 1
            ));
        }
        if !g.pcc_holds {
            notes.push("not saturable (necessary condition): partial commutativity fails".to_string());
        }
        ModelVerdict::NotSaturable
    } else if g.in_sufficiency_regime {
        notes.push(format!(
            "saturable: PCC holds and n = {} reaches the sufficiency threshold {}",
            g.n,
            g.sufficiency_threshold.unwrap_or(0)
        ));
        ModelVerdict::Saturable
    } else {
        notes.push("necessary conditions hold; run construct to decide".to_string());
        ModelVerdict::Undetermined
    };
    if g.degenerate_spectrum {
        notes.push("state spectrum is degenerate; residuals are worst case over the returned basis".to_string());
    }
    if q.singular && !zero_qfim {
        notes.push("QFIM is singular".to_string());
    }
    Ok(AnalysisReport {
        tool: tool(),
        config: config.clone(),
        qfim: QfimReport {
            matrix: real_matrix_to_rows(&q.matrix),
            min_eigenvalue: q.min_eigenvalue,
            singular: q.singular,
        },
        pcc: PccReport {
            holds: g.pcc_holds,
            violation: g.pcc_violation,
            threshold: analysis.family.pcc_threshold(tol),
        },
        geometry: g,
        verdict,
        notes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FisherReport {
    pub qfim: Vec<Vec<f64>>,
    pub cfim: Vec<Vec<f64>>,
    pub null_outcomes: Vec<usize>,
    pub null_contribution: Vec<Vec<f64>>,
    pub max_gap: f64,
    pub raw_gap: f64,
    pub passes: bool,
}

impl From<&FisherComparison> for FisherReport {
    fn from(f: &FisherComparison) -> Self {
        FisherReport {
            qfim: real_matrix_to_rows(&f.qfim),
            cfim: real_matrix_to_rows(&f.cfim),
            null_outcomes: f.null_outcomes.clone(),
            null_contribution: real_matrix_to_rows(&f.null_contribution),
            max_gap: f.gap,
            raw_gap: f.raw_gap,
            passes: f.passes,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRow {
    pub index: usize,
    pub probability: f64,
    pub null: bool,
    pub residual: f64,
}

fn outcome_table(prepared: &PreparedModel, povm: &RankOnePovm, cert: &SaturationCertificate, tol: &Tolerances) -> Result<Vec<OutcomeRow>> {
    let born = born_probabilities(&prepared.model, povm, tol)?;
    Ok(cert
        .outcome_residuals
        .iter()
        .enumerate()
        .map(|(index, &residual)| OutcomeRow {
            index,
            probability: born.probs[index],
            null: born.null[index],
            residual,
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructReport {
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub feasible: bool,
    pub method: Option<Method>,
    pub reason: Option<Infeasibility>,
    pub povm: Option<PovmFile>,
    pub certificate: Option<SaturationCertificate>,
    pub fisher: Option<FisherReport>,
    pub outcomes: Vec<OutcomeRow>,
    /// Outcome-wise saturating vectors that do not complete to a POVM.
    pub partial: Option<Vec<Vec<Pair>>>,
    pub geometry: GeometrySummary,
}

pub fn construct_report(prepared: &PreparedModel, config: &RunConfig) -> Result<(ConstructReport, ConstructionResult)> {
    let tol = &config.tolerances;
    let res = construct_optimal_measurement(prepared, &config.construct_options(), tol)?;
    let outcomes = match (&res.povm, &res.certificate) {
        (Some(p), Some(c)) => outcome_table(prepared, p, c, tol)?,
        _ => Vec::new(),
    };
    let report = ConstructReport {
        tool: tool(),
        config: config.clone(),
        feasible: res.feasible,
        method: res.method,
        reason: res.reason.clone(),
        povm: res.povm.as_ref().map(PovmFile::from_povm),
        certificate: res.certificate.clone(),
        fisher: res.fisher.as_ref().map(FisherReport::from),
        outcomes,
        partial: res.partial.as_ref().map(|vs| vs.iter().map(vector_to_pairs).collect()),
        geometry: res.summary.clone(),
    };
    Ok((report, res))
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub certificate: SaturationCertificate,
    pub fisher: FisherReport,
    pub outcomes: Vec<OutcomeRow>,
}

pub fn verify_report(prepared: &PreparedModel, povm: &RankOnePovm, config: &RunConfig) -> Result<VerifyReport> {
    let tol = &config.tolerances;
    let family = build_wm_family(&prepared.spectral, &prepared.slds);
    let certificate = check_povm(povm, &family, tol)?;
    let fisher = fisher_comparison(prepared, povm, tol)?;
    let outcomes = outcome_table(prepared, povm, &certificate, tol)?;
    Ok(VerifyReport {
        tool: tool(),
        config: config.clone(),
        verdict: certificate.verdict,
        fisher: FisherReport::from(&fisher),
        certificate,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasipure::{build_quasipure, two_qubit_example, two_qubit_lmcc_povm};

    fn prepared(q: f64, theta: f64) -> PreparedModel {
        let tol = Tolerances::default();
        PreparedModel::new(build_quasipure(&two_qubit_example(q, theta), &tol).unwrap(), &tol).unwrap()
    }

    #[test]
    fn saturable_verdict_is_consistent() {
        let r = analysis_report(&prepared(0.3, 1.0), &RunConfig::default()).unwrap();
        assert!(r.pcc.holds);
        assert_eq!(r.verdict, ModelVerdict::Saturable);
        assert!(r.geometry.n >= r.geometry.d as i64 - 1);
    }

    #[test]
    fn verify_report_of_hand_built_measurement() {
        let p = prepared(0.3, 1.0);
        let r = verify_report(&p, &two_qubit_lmcc_povm(1.0), &RunConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Saturating);
        assert!(r.fisher.passes);
        assert_eq!(r.outcomes.len(), 8);
    }

    #[test]
    fn config_round_trips() {
        let c = RunConfig {
            seed: 17,
            pool_size: Some(9),
            ..RunConfig::default()
        };
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
