//! Deterministic JSON report document. Rationals are serialized as "p/q"
//! strings; struct field order fixes the key order.

use crate::cy::{check_cy_type, CYVerdict, PropertyResult};
use crate::error::Result;
use crate::frobenius::mum_flag;
use crate::galois::{galois_classify, GaloisVerdict, Order7Report};
use crate::normal_form::{lambert_coefficients, normal_form_data};
use crate::operator::DOperator;
use crate::poly::rat_to_text;
use crate::series::Series;
use serde::Serialize;

#[derive(Serialize, Clone)]
pub struct SeriesDoc {
    pub valuation: i64,
    pub coefficients: Vec<String>,
    pub truncation: i64,
}

impl SeriesDoc {
    pub fn new(s: &Series, up_to: i64) -> Self {
        let t = s.truncation().min(up_to);
        let v = s.valuation().min(t);
        SeriesDoc {
            valuation: v,
            coefficients: (v..t).map(|k| rat_to_text(&s.coeff(k))).collect(),
            truncation: t,
        }
    }
}

#[derive(Serialize, Clone)]
pub struct PropDoc {
    pub pass: bool,
    pub witness: Option<String>,
    pub note: String,
}

impl From<&PropertyResult> for PropDoc {
    fn from(p: &PropertyResult) -> Self {
        PropDoc { pass: p.pass, witness: p.witness.clone(), note: p.note.clone() }
    }
}

#[derive(Serialize, Clone)]
pub struct VerdictDoc {
    pub order: usize,
    pub property_p: PropDoc,
    pub property_m: PropDoc,
    pub property_n: PropDoc,
    pub property_q: PropDoc,
    pub property_s: PropDoc,
    pub irreducibility: String,
    pub overall: bool,
}

impl From<&CYVerdict> for VerdictDoc {
    fn from(v: &CYVerdict) -> Self {
        VerdictDoc {
            order: v.order,
            property_p: (&v.property_p).into(),
            property_m: (&v.property_m).into(),
            property_n: (&v.property_n).into(),
            property_q: (&v.property_q).into(),
            property_s: (&v.property_s).into(),
            irreducibility: v.irreducibility.to_string(),
            overall: v.overall,
        }
    }
}

#[derive(Serialize, Clone)]
pub struct NormalFormDoc {
    pub mum_exponent: i64,
    pub q: SeriesDoc,
    pub alphas: Vec<SeriesDoc>,
    pub y_invariants: Vec<SeriesDoc>,
}

#[derive(Serialize, Clone)]
pub struct LambertDoc {
    pub y_index: usize,
    pub ell: u32,
    pub coefficients: Vec<String>,
    pub all_integral: bool,
}

#[derive(Serialize, Clone)]
pub struct Order7Doc {
    pub p_relations: Vec<bool>,
    pub a3_relation: bool,
    pub a1_relation: bool,
    pub twist_log_derivative: String,
}

impl From<&Order7Report> for Order7Doc {
    fn from(r: &Order7Report) -> Self {
        Order7Doc {
            p_relations: r.p_relations.to_vec(),
            a3_relation: r.a3_relation,
            a1_relation: r.a1_relation,
            twist_log_derivative: r.twist.render(),
        }
    }
}

#[derive(Serialize, Clone)]
pub struct GaloisDoc {
    pub ambient: String,
    pub classification: String,
    pub evidence: Vec<String>,
    pub reconstructed_order2: Option<Vec<String>>,
    pub sym_square_order: Option<usize>,
    pub order7_relations: Option<Order7Doc>,
}

impl From<&GaloisVerdict> for GaloisDoc {
    fn from(g: &GaloisVerdict) -> Self {
        GaloisDoc {
            ambient: g.ambient.clone(),
            classification: g.classification.label().to_string(),
            evidence: g.evidence.clone(),
            reconstructed_order2: g
                .reconstructed
                .as_ref()
                .map(|p| p.coeffs().iter().map(|c| c.render()).collect()),
            sym_square_order: g.sym_square_order,
            order7_relations: g.order7.as_ref().map(Order7Doc::from),
        }
    }
}

#[derive(Serialize, Clone)]
pub struct OperatorEcho {
    pub name: Option<String>,
    pub theta_form: String,
    pub monic_d_form: Vec<String>,
}

#[derive(Serialize, Clone)]
pub struct ParamsDoc {
    pub truncation: i64,
    pub depth: usize,
    pub prime_bound: u64,
    pub ell: u32,
}

#[derive(Serialize, Clone)]
pub struct ReportDocument {
    pub operator: OperatorEcho,
    pub verdict: VerdictDoc,
    pub normal_form: Option<NormalFormDoc>,
    pub lambert: Vec<LambertDoc>,
    pub galois: Option<GaloisDoc>,
    pub params: ParamsDoc,
    pub version: String,
}

/// Assemble the full analysis document for one operator.
pub fn build_report(
    name: Option<String>,
    op: &DOperator,
    truncation: i64,
    depth: usize,
    prime_bound: u64,
    ell: u32,
) -> Result<ReportDocument> {
    let theta = op.to_theta_form();
    let verdict = check_cy_type(&theta, truncation, prime_bound, depth)?;
    let echo_depth = truncation.min(verdict.truncation);
    let mut normal_form = None;
    let mut lambert = Vec::new();
    if verdict.order >= 2 && verdict.property_m.pass {
        let flag = mum_flag(&theta, verdict.truncation)?;
        let data = normal_form_data(&flag)?;
        normal_form = Some(NormalFormDoc {
            mum_exponent: flag.mum_exponent,
            q: SeriesDoc::new(&data.q, echo_depth),
            alphas: data.alphas.iter().map(|a| SeriesDoc::new(a, echo_depth)).collect(),
            y_invariants: data
                .y_invariants
                .iter()
                .map(|y| SeriesDoc::new(y, echo_depth)).collect(),
        });
        let lam_depth = (echo_depth - 1).max(1) as usize;
        for (i, y) in data.y_invariants.iter().enumerate() {
            if y.truncation() >= lam_depth as i64 + 1 {
                let exp = lambert_coefficients(y, ell, lam_depth)?;
                lambert.push(LambertDoc {
                    y_index: i + 1,
                    ell,
                    all_integral: exp.coefficients.iter().all(|c| c.denom() == &crate::Int::from(1)),
                    coefficients: exp.coefficients.iter().map(rat_to_text).collect(),
                });
            }
        }
    }
    let galois = if verdict.property_m.pass && verdict.property_p.pass {
        Some(GaloisDoc::from(&galois_classify(&theta, truncation)?))
    } else {
        None
    };
    Ok(ReportDocument {
        operator: OperatorEcho {
            name,
            theta_form: theta.render(),
            monic_d_form: op.monic().coeffs().iter().map(|c| c.render()).collect(),
        },
        verdict: VerdictDoc::from(&verdict),
        normal_form,
        lambert,
        galois,
        params: ParamsDoc { truncation, depth, prime_bound, ell },
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}
