//! Report documents: one structured record per analyzed input, rendered as
//! human-readable text or JSON. Every scalar is printed in the expression
//! grammar, so values round-trip through the parser.

use crate::analysis::{darboux_class, detect_special_form, linearizable, log_linearizable, Verdict};
use crate::dist::{DistError, Distribution2, MaeCoefficients};
use crate::exterior::{KForm, VectorField, VectorValuedForm};
use crate::invariants::{
    contact_ratios, invariants_of, j_invariants, operator_invariants, primed_invariants,
    special_form_view, special_invariants, zij_fields, InvariantError,
};
use crate::parse::{parse, ParseError};
use crate::poly::Coeff;
use crate::scalar::{Scalar, VariableContext};
use crate::symplectic::SymplecticStructure;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

pub const UNDEFINED: &str = "undefined (denominator = 0)";

#[derive(Clone, Debug)]
pub enum ReportError {
    Parse(ParseError),
    Dist(DistError),
    Invariant(InvariantError),
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Parse(e) => write!(f, "{e}"),
            ReportError::Dist(e) => write!(f, "{e}"),
            ReportError::Invariant(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ReportError {}

impl From<ParseError> for ReportError {
    fn from(e: ParseError) -> Self {
        ReportError::Parse(e)
    }
}

impl From<DistError> for ReportError {
    fn from(e: DistError) -> Self {
        ReportError::Dist(e)
    }
}

impl From<InvariantError> for ReportError {
    fn from(e: InvariantError) -> Self {
        ReportError::Invariant(e)
    }
}

// ---------------------------------------------------------------------------
// Document schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportDocument {
    pub input: InputEcho,
    pub objects: ObjectsSection,
    pub invariants: InvariantsSection,
    pub classes: ClassesSection,
    pub verdicts: VerdictsSection,
    pub meta: MetaSection,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InputEcho {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ObjectsSection {
    pub z: Vec<String>,
    pub z_dual: Vec<String>,
    pub omega: String,
    pub omega_dual: String,
    pub rho: String,
    pub rho_dual: String,
    pub sigma: String,
    pub zij: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InvariantsSection {
    pub i: Vec<String>,
    pub i_primed: Vec<String>,
    pub j: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_tilde: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contact_ratios: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub special: Option<SpecialSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpecialSection {
    pub d: String,
    pub i12: String,
    pub i21: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassesSection {
    pub r: usize,
    pub r_primed: usize,
    pub i6_nonzero: bool,
    pub i6_dual_nonzero: bool,
    pub prolongation_integrable: bool,
    pub dual_prolongation_integrable: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerdictsSection {
    pub special_form: String,
    pub linearizable: VerdictEcho,
    pub log_linearizable: VerdictEcho,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerdictEcho {
    pub verdict: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetaSection {
    pub tool_version: String,
    pub elapsed_ms: u128,
    pub scale: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn verdict_echo(v: &Verdict) -> VerdictEcho {
    let (verdict, reason) = match v {
        Verdict::Yes(r) => ("yes", r),
        Verdict::No(r) => ("no", r),
        Verdict::Undecided(r) => ("undecided", r),
    };
    VerdictEcho {
        verdict: verdict.to_string(),
        reason: reason.clone(),
    }
}

fn field_strings(f: &VectorField) -> Vec<String> {
    f.components.iter().map(|c| c.to_string()).collect()
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

pub struct ReportOptions {
    pub candidate_phi: Option<Scalar>,
    pub degree_bound: u32,
    pub seed: Option<u64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            candidate_phi: None,
            degree_bound: 2,
            seed: None,
        }
    }
}

/// The full report for a distribution input.
pub fn build_report(
    d: &Distribution2,
    input: InputEcho,
    opts: &ReportOptions,
) -> Result<ReportDocument, ReportError> {
    let start = Instant::now();
    let sympl = d.sympl().clone();
    let att = d.attach()?;
    let i = invariants_of(d)?;
    let ip = primed_invariants(d)?;
    let j = j_invariants(&i, &ip);
    let zij = zij_fields(&att, &sympl);

    // Operator-based family: defined whenever A = P − P' is admissible.
    let (j_tilde, ratios) = match d.operator_a() {
        Ok(a) => match operator_invariants(&a, &sympl) {
            Ok(oi) => {
                let ratios = contact_ratios(&oi.values)
                    .map(|r| r.iter().map(|s| s.to_string()).collect::<Vec<_>>())
                    .ok();
                (
                    Some(oi.values.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                    ratios,
                )
            }
            Err(_) => (None, None),
        },
        Err(_) => (None, None),
    };

    let special = special_form_view(d).map(|view| {
        let (i12, i21) = special_invariants(&view);
        SpecialSection {
            d: view.d.to_string(),
            i12: i12.map(|s| s.to_string()).unwrap_or_else(|_| UNDEFINED.to_string()),
            i21: i21.map(|s| s.to_string()).unwrap_or_else(|_| UNDEFINED.to_string()),
        }
    });

    let (special_yes, cert) = detect_special_form(d)?;
    let classes = ClassesSection {
        r: darboux_class(&att.rho),
        r_primed: darboux_class(&att.rho_dual),
        i6_nonzero: !i[5].is_zero(),
        i6_dual_nonzero: !ip[5].is_zero(),
        prolongation_integrable: cert.prolongation_integrable,
        dual_prolongation_integrable: cert.dual_prolongation_integrable,
    };

    let lin = linearizable(d, opts.candidate_phi.as_ref(), opts.degree_bound)?;
    let log_lin = log_linearizable(d)?;
    let verdicts = VerdictsSection {
        special_form: if special_yes { "yes" } else { "no" }.to_string(),
        linearizable: verdict_echo(&lin),
        log_linearizable: verdict_echo(&log_lin),
    };

    Ok(ReportDocument {
        input,
        objects: ObjectsSection {
            z: field_strings(&att.z),
            z_dual: field_strings(&att.z_dual),
            omega: att.omega.render(),
            omega_dual: att.omega_dual.render(),
            rho: att.rho.render(),
            rho_dual: att.rho_dual.render(),
            sigma: att.sigma.render(),
            zij: zij.iter().map(field_strings).collect(),
        },
        invariants: InvariantsSection {
            i: i.iter().map(|s| s.to_string()).collect(),
            i_primed: ip.iter().map(|s| s.to_string()).collect(),
            j: j.iter().map(|s| s.to_string()).collect(),
            j_tilde,
            contact_ratios: ratios,
            special,
        },
        classes,
        verdicts,
        meta: MetaSection {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: start.elapsed().as_millis(),
            scale: Scalar::rational(d.ctx(), sympl.scale().clone()).to_string(),
            seed: opts.seed,
        },
    })
}

/// A reduced report for a user-supplied operator (the elliptic path): only
/// the operator family and its contact ratios are defined.
pub fn build_operator_report(
    a: &VectorValuedForm,
    sympl: &SymplecticStructure,
    input: InputEcho,
) -> Result<ReportDocument, ReportError> {
    let start = Instant::now();
    let ctx = a.ctx().clone();
    let oi = operator_invariants(a, sympl)?;
    let ratios = contact_ratios(&oi.values)
        .map(|r| r.iter().map(|s| s.to_string()).collect::<Vec<_>>())
        .ok();
    let zeros = vec!["0".to_string(); 4];
    let zero_form = KForm::zero(&ctx, 2).render();
    let empty = VerdictEcho {
        verdict: "undecided".to_string(),
        reason: "operator input: distribution-level verdicts not applicable".to_string(),
    };
    Ok(ReportDocument {
        input,
        objects: ObjectsSection {
            z: zeros.clone(),
            z_dual: zeros,
            omega: zero_form.clone(),
            omega_dual: zero_form,
            rho: oi.sigma.render(),
            rho_dual: oi.varrho.render(),
            sigma: oi.theta.render(),
            zij: Vec::new(),
        },
        invariants: InvariantsSection {
            i: Vec::new(),
            i_primed: Vec::new(),
            j: Vec::new(),
            j_tilde: Some(oi.values.iter().map(|s| s.to_string()).collect()),
            contact_ratios: ratios,
            special: None,
        },
        classes: ClassesSection {
            r: 0,
            r_primed: 0,
            i6_nonzero: false,
            i6_dual_nonzero: false,
            prolongation_integrable: false,
            dual_prolongation_integrable: false,
        },
        verdicts: VerdictsSection {
            special_form: "n/a".to_string(),
            linearizable: empty.clone(),
            log_linearizable: empty,
        },
        meta: MetaSection {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: start.elapsed().as_millis(),
            scale: Scalar::rational(&ctx, sympl.scale().clone()).to_string(),
            seed: None,
        },
    })
}

// ---------------------------------------------------------------------------
// Input parsing (CLI surface)
// ---------------------------------------------------------------------------

/// Parse "Xx,Xp,Xy,Xq ; Yx,Yp,Yy,Yq" into a distribution.
pub fn parse_distribution_input(
    text: &str,
    ctx: &Arc<VariableContext>,
    scale: Coeff,
) -> Result<Distribution2, ReportError> {
    let halves: Vec<&str> = text.split(';').collect();
    if halves.len() != 2 {
        return Err(ReportError::Parse(ParseError {
            pos: 0,
            message: "expected two ';'-separated vector fields".to_string(),
        }));
    }
    let mut fields = Vec::new();
    for half in halves {
        let comps: Vec<&str> = half.split(',').collect();
        if comps.len() != 4 {
            return Err(ReportError::Parse(ParseError {
                pos: 0,
                message: "each field needs 4 ','-separated components".to_string(),
            }));
        }
        let parsed: Result<Vec<Scalar>, ParseError> =
            comps.iter().map(|c| parse(c.trim(), ctx)).collect();
        let parsed = parsed?;
        fields.push(VectorField::new(std::array::from_fn(|i| parsed[i].clone())));
    }
    let sympl = SymplecticStructure::with_scale(ctx, scale);
    let x2 = fields.pop().unwrap();
    let x1 = fields.pop().unwrap();
    Ok(Distribution2::new(x1, x2, &sympl)?)
}

/// Parse "S;A;B;C;D" into Monge-Ampère coefficients.
pub fn parse_mae_input(
    text: &str,
    ctx: &Arc<VariableContext>,
) -> Result<MaeCoefficients, ReportError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 5 {
        return Err(ReportError::Parse(ParseError {
            pos: 0,
            message: "expected 5 ';'-separated coefficients S;A;B;C;D".to_string(),
        }));
    }
    let parsed: Result<Vec<Scalar>, ParseError> =
        parts.iter().map(|c| parse(c.trim(), ctx)).collect();
    let p = parsed?;
    Ok(MaeCoefficients::new(
        p[0].clone(),
        p[1].clone(),
        p[2].clone(),
        p[3].clone(),
        p[4].clone(),
    ))
}

/// Parse 16 expressions (rows separated by ';', entries by ','), row-major
/// over the basis (∂x, ∂p, ∂y, ∂q): A(∂_j) = Σ_i m[i][j] ∂_i.
pub fn parse_operator_input(
    text: &str,
    ctx: &Arc<VariableContext>,
) -> Result<VectorValuedForm, ReportError> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 4 {
        return Err(ReportError::Parse(ParseError {
            pos: 0,
            message: "expected 4 ';'-separated rows".to_string(),
        }));
    }
    let mut m: Vec<Vec<Scalar>> = Vec::new();
    for row in rows {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != 4 {
            return Err(ReportError::Parse(ParseError {
                pos: 0,
                message: "each row needs 4 ','-separated entries".to_string(),
            }));
        }
        let parsed: Result<Vec<Scalar>, ParseError> =
            entries.iter().map(|c| parse(c.trim(), ctx)).collect();
        m.push(parsed?);
    }
    let values = (0..4)
        .map(|j| VectorField::new(std::array::from_fn(|i| m[i][j].clone())))
        .collect();
    Ok(VectorValuedForm { degree: 1, values })
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

impl ReportDocument {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let push = |out: &mut String, s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        push(&mut out, format!("input ({})", self.input.kind));
        if let Some(d) = &self.input.distribution {
            push(&mut out, format!("  X1 = [{}]", d[0].join(", ")));
            push(&mut out, format!("  X2 = [{}]", d[1].join(", ")));
        }
        if let Some(m) = &self.input.mae {
            push(&mut out, format!("  S;A;B;C;D = {}", m.join(" ; ")));
        }
        if !self.invariants.i.is_empty() {
            push(&mut out, "objects".to_string());
            push(&mut out, format!("  Z     = [{}]", self.objects.z.join(", ")));
            push(
                &mut out,
                format!("  Z'    = [{}]", self.objects.z_dual.join(", ")),
            );
            push(&mut out, format!("  omega  = {}", self.objects.omega));
            push(&mut out, format!("  omega' = {}", self.objects.omega_dual));
            push(&mut out, format!("  rho    = {}", self.objects.rho));
            push(&mut out, format!("  rho'   = {}", self.objects.rho_dual));
            push(&mut out, format!("  sigma  = {}", self.objects.sigma));
            push(&mut out, "invariants".to_string());
            for (k, v) in self.invariants.i.iter().enumerate() {
                push(&mut out, format!("  I{} = {}", k + 1, v));
            }
            for (k, v) in self.invariants.i_primed.iter().enumerate() {
                push(&mut out, format!("  I{}' = {}", k + 1, v));
            }
            for (k, v) in self.invariants.j.iter().enumerate() {
                push(&mut out, format!("  J{} = {}", k + 1, v));
            }
        }
        if let Some(jt) = &self.invariants.j_tilde {
            for (k, v) in jt.iter().enumerate() {
                push(&mut out, format!("  Jt{} = {}", k + 1, v));
            }
        }
        if let Some(r) = &self.invariants.contact_ratios {
            push(&mut out, format!("  contact ratios = [{}]", r.join(", ")));
        }
        if let Some(sp) = &self.invariants.special {
            push(&mut out, "special form u_xy + D = 0".to_string());
            push(&mut out, format!("  D   = {}", sp.d));
            push(&mut out, format!("  I12 = {}", sp.i12));
            push(&mut out, format!("  I21 = {}", sp.i21));
        }
        push(
            &mut out,
            format!(
                "classes: (r, r') = ({}, {})",
                self.classes.r, self.classes.r_primed
            ),
        );
        push(
            &mut out,
            format!(
                "verdicts: special form = {}; linearizable = {} ({}); log-linearizable = {} ({})",
                self.verdicts.special_form,
                self.verdicts.linearizable.verdict,
                self.verdicts.linearizable.reason,
                self.verdicts.log_linearizable.verdict,
                self.verdicts.log_linearizable.reason,
            ),
        );
        push(
            &mut out,
            format!(
                "meta: version {}; scale {}; {} ms",
                self.meta.tool_version, self.meta.scale, self.meta.elapsed_ms
            ),
        );
        out
    }
}
