//! The scalar differential invariants of a non-Lagrangian 2-distribution and
//! of the symplectic Monge-Ampère equation it encodes: the nine star-built
//! scalars and their duals, the seven equation-level combinations, the
//! operator-based family with its contact ratios, the special invariants of
//! the mixed normal form, and the invariant vector fields with e-structures.

use crate::dist::{AttachedObjects, DistError, Distribution2};
use crate::exterior::{lie_bracket, subset_index, KForm, VectorField, VectorValuedForm};
use crate::linalg::ScalarMatrix;
use crate::scalar::{Scalar, VariableContext, VAR_P, VAR_Q, VAR_X, VAR_Y};
use crate::symplectic::SymplecticStructure;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantError {
    /// Operator input failed the validation Ω(AX,Y) = Ω(X,AY).
    NotSelfadjoint,
    /// Operator input squared to neither id nor −id, or is ±id.
    BadSquare,
    /// A requested quantity has an identically vanishing denominator.
    Undefined(&'static str),
    Dist(DistError),
}

impl fmt::Display for InvariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantError::NotSelfadjoint => write!(f, "operator is not Ω-selfadjoint"),
            InvariantError::BadSquare => {
                write!(f, "operator must satisfy A² = ±id with A ≠ ±id")
            }
            InvariantError::Undefined(what) => write!(f, "undefined (denominator = 0): {what}"),
            InvariantError::Dist(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for InvariantError {}

impl From<DistError> for InvariantError {
    fn from(e: DistError) -> Self {
        InvariantError::Dist(e)
    }
}

// ---------------------------------------------------------------------------
// The nine distribution invariants
// ---------------------------------------------------------------------------

/// The nine scalars attached to one distribution, in order I¹…I⁹.
pub type Nine = [Scalar; 9];

/// I¹…I⁹ from the attached objects:
/// I¹ = ∗(ω∧dσ), I² = ∗(σ∧ρ∧dσ), I³ = ∗(σ∧ρ∧dρ), I⁴ = ∗((dσ)²),
/// I⁵ = ∗(dσ∧dρ), I⁶ = ∗((dρ)²), I⁷ = ∗(σ∧dρ∧∗(σ∧dσ)),
/// I⁸ = ∗(σ∧dρ∧∗(ρ∧dσ)), I⁹ = ∗(σ∧dσ∧∗(ρ∧dρ)).
pub fn scalar_invariants(att: &AttachedObjects, sympl: &SymplecticStructure) -> Nine {
    let dsigma = att.sigma.ext_d();
    let drho = att.rho.ext_d();
    let star0 = |f: &KForm| sympl.hodge_star(f).as_scalar().clone();
    let i1 = star0(&att.omega.wedge(&dsigma));
    let i2 = star0(&att.sigma.wedge(&att.rho).wedge(&dsigma));
    let i3 = star0(&att.sigma.wedge(&att.rho).wedge(&drho));
    let i4 = star0(&dsigma.wedge(&dsigma));
    let i5 = star0(&dsigma.wedge(&drho));
    let i6 = star0(&drho.wedge(&drho));
    let i7 = star0(
        &att.sigma
            .wedge(&drho)
            .wedge(&sympl.hodge_star(&att.sigma.wedge(&dsigma))),
    );
    let i8 = star0(
        &att.sigma
            .wedge(&drho)
            .wedge(&sympl.hodge_star(&att.rho.wedge(&dsigma))),
    );
    let i9 = star0(
        &att.sigma
            .wedge(&dsigma)
            .wedge(&sympl.hodge_star(&att.rho.wedge(&drho))),
    );
    [i1, i2, i3, i4, i5, i6, i7, i8, i9]
}

pub fn invariants_of(d: &Distribution2) -> Result<Nine, DistError> {
    Ok(scalar_invariants(&d.attach()?, d.sympl()))
}

/// The dual invariants: the same nine scalars evaluated on the orthogonal
/// complement.
pub fn primed_invariants(d: &Distribution2) -> Result<Nine, DistError> {
    invariants_of(&d.ortho_complement()?)
}

/// The seven equation-level invariants:
/// J¹ = I¹, J² = I², J³ = I³I³′, J⁴ = I⁴, J⁵ = I⁵I⁵′, J⁶ = I⁶ − I⁵,
/// J⁷ = I⁷I⁷′. Each is unchanged under swapping the primed and unprimed
/// inputs.
pub fn j_invariants(i: &Nine, ip: &Nine) -> [Scalar; 7] {
    [
        i[0].clone(),
        i[1].clone(),
        i[2].mul(&ip[2]),
        i[3].clone(),
        i[4].mul(&ip[4]),
        i[5].sub(&i[4]),
        i[6].mul(&ip[6]),
    ]
}

// ---------------------------------------------------------------------------
// Operator-based invariants
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// A² = id (hyperbolic).
    Hyperbolic,
    /// A² = −id (elliptic).
    Elliptic,
}

/// The invariant forms of an admissible operator A and the nine derived
/// scalars.
#[derive(Clone, Debug)]
pub struct OperatorInvariants {
    pub kind: OperatorKind,
    /// θ = ½ A⌟Ω.
    pub theta: KForm,
    /// σ = ¼ ∗d(A⌟Ω).
    pub sigma: KForm,
    /// ϱ = −¼ Γ A Γ⁻¹ ∗d(A⌟Ω).
    pub varrho: KForm,
    /// J̃¹…J̃⁹.
    pub values: [Scalar; 9],
}

/// Validate A (Ω-selfadjoint, A² = ±id, A ≠ ±id) and compute the nine
/// operator invariants. Every value is unchanged under A ↦ −A.
pub fn operator_invariants(
    a: &VectorValuedForm,
    sympl: &SymplecticStructure,
) -> Result<OperatorInvariants, InvariantError> {
    assert_eq!(a.degree, 1, "operator input must be a degree-1 form");
    let ctx = a.ctx().clone();
    // Selfadjointness on all basis pairs.
    for i in 0..4 {
        for j in 0..4 {
            let bi = VectorField::basis(&ctx, i);
            let bj = VectorField::basis(&ctx, j);
            if sympl.omega_on(&a.apply1(&bi), &bj) != sympl.omega_on(&bi, &a.apply1(&bj)) {
                return Err(InvariantError::NotSelfadjoint);
            }
        }
    }
    let id = VectorValuedForm::identity(&ctx);
    let sq = a.compose(a);
    let kind = if sq == id {
        OperatorKind::Hyperbolic
    } else if sq == id.neg() {
        OperatorKind::Elliptic
    } else {
        return Err(InvariantError::BadSquare);
    };
    if *a == id || *a == id.neg() {
        return Err(InvariantError::BadSquare);
    }

    let a_omega = a.insert_into(sympl.omega());
    let half = Scalar::rational(&ctx, crate::scalar::rat_frac(1, 2));
    let quarter = Scalar::rational(&ctx, crate::scalar::rat_frac(1, 4));
    let theta = a_omega.scale(&half);
    let star_d = sympl.hodge_star(&a_omega.ext_d());
    let sigma = star_d.scale(&quarter);
    let varrho = sympl
        .gamma(&a.apply1(&sympl.gamma_inv(&star_d)))
        .scale(&quarter)
        .neg();

    let dsigma = sigma.ext_d();
    let dvarrho = varrho.ext_d();
    let star0 = |f: &KForm| sympl.hodge_star(f).as_scalar().clone();
    let j1 = star0(&theta.wedge(&dsigma));
    let j2 = star0(&sigma.wedge(&varrho).wedge(&dsigma));
    let j3 = star0(&sigma.wedge(&varrho).wedge(&dvarrho)).pow(2);
    let j4 = star0(&dsigma.wedge(&dsigma));
    let j5 = star0(&dsigma.wedge(&dvarrho)).pow(2);
    let j6 = star0(&dvarrho.wedge(&dvarrho));
    let j7 = star0(
        &sigma
            .wedge(&dvarrho)
            .wedge(&sympl.hodge_star(&sigma.wedge(&dsigma))),
    )
    .pow(2);
    let j8 = star0(
        &sigma
            .wedge(&dvarrho)
            .wedge(&sympl.hodge_star(&varrho.wedge(&dsigma))),
    );
    let j9 = star0(
        &sigma
            .wedge(&dsigma)
            .wedge(&sympl.hodge_star(&varrho.wedge(&dvarrho))),
    );
    Ok(OperatorInvariants {
        kind,
        theta,
        sigma,
        varrho,
        values: [j1, j2, j3, j4, j5, j6, j7, j8, j9],
    })
}

/// The six contact ratios J̃²/(J̃¹)², J̃³/(J̃¹)⁴, J̃⁴/(J̃¹)², J̃⁵/(J̃¹)⁴,
/// J̃⁶/(J̃¹)², J̃⁷/(J̃¹)⁶; unchanged under Ω ↦ cΩ.
pub fn contact_ratios(jt: &[Scalar; 9]) -> Result<[Scalar; 6], InvariantError> {
    if jt[0].is_zero() {
        return Err(InvariantError::Undefined("contact ratios need J̃¹ ≠ 0"));
    }
    let j1_2 = jt[0].pow(2);
    let j1_4 = jt[0].pow(4);
    let j1_6 = jt[0].pow(6);
    let div = |n: &Scalar, d: &Scalar| n.try_div(d).expect("nonzero power of J̃¹");
    Ok([
        div(&jt[1], &j1_2),
        div(&jt[2], &j1_4),
        div(&jt[3], &j1_2),
        div(&jt[4], &j1_4),
        div(&jt[5], &j1_2),
        div(&jt[6], &j1_6),
    ])
}

// ---------------------------------------------------------------------------
// Special invariants of the mixed normal form
// ---------------------------------------------------------------------------

/// A distribution recognized in the span form ⟨∂p, ∂x − D∂q⟩.
#[derive(Clone, Debug)]
pub struct SpecialFormView {
    pub d: Scalar,
}

/// Recognize the span form ⟨∂p, ∂x − D∂q⟩ exactly (membership of ∂p and of a
/// field ∂x + 0·∂p + 0·∂y − D·∂q in the span).
pub fn special_form_view(dist: &Distribution2) -> Option<SpecialFormView> {
    let ctx = dist.ctx().clone();
    let [x1, x2] = dist.span().clone();
    let m = ScalarMatrix::from_rows(
        (0..4)
            .map(|i| vec![x1.components[i].clone(), x2.components[i].clone()])
            .collect(),
    );
    // a·X₁ + b·X₂ = ∂p: solve on components (x, p, y), then demand q-comp 0.
    let solve3 = |target: [Scalar; 3]| -> Option<(Scalar, Scalar)> {
        let rows = vec![
            vec![m.at(0, 0).clone(), m.at(0, 1).clone(), target[0].clone()],
            vec![m.at(1, 0).clone(), m.at(1, 1).clone(), target[1].clone()],
            vec![m.at(2, 0).clone(), m.at(2, 1).clone(), target[2].clone()],
        ];
        let aug = ScalarMatrix::from_rows(rows);
        let (r, pivots) = aug.rref().ok()?;
        if pivots.contains(&2) {
            return None; // inconsistent
        }
        if pivots != vec![0, 1] {
            return None;
        }
        Some((r.at(0, 2).clone(), r.at(1, 2).clone()))
    };
    let zero = Scalar::zero(&ctx);
    let one = Scalar::one(&ctx);
    // ∂p ∈ span, with vanishing q-component of the combination.
    let (a, b) = solve3([zero.clone(), one.clone(), zero.clone()])?;
    let qcomp = x1.components[3].mul(&a).add(&x2.components[3].mul(&b));
    if !qcomp.is_zero() {
        return None;
    }
    // ∂x − D∂q ∈ span: x-comp 1, p-comp 0, y-comp 0.
    let (c, e) = solve3([one, zero.clone(), zero])?;
    let d = x1.components[3]
        .mul(&c)
        .add(&x2.components[3].mul(&e))
        .neg();
    Some(SpecialFormView { d })
}

/// The two special invariants of the mixed normal form:
/// I¹² = −D_p D_qq / D_q (undefined when D_q ≡ 0) and
/// I²¹ = −D_q D_pp / D_p (undefined when D_p ≡ 0).
pub fn special_invariants(
    view: &SpecialFormView,
) -> (Result<Scalar, InvariantError>, Result<Scalar, InvariantError>) {
    let d = &view.d;
    let dp = d.derive(VAR_P);
    let dq = d.derive(VAR_Q);
    let i12 = if dq.is_zero() {
        Err(InvariantError::Undefined("I12 needs D_q ≠ 0"))
    } else {
        Ok(dp
            .mul(&dq.derive(VAR_Q))
            .try_div(&dq)
            .expect("nonzero divisor")
            .neg())
    };
    let i21 = if dp.is_zero() {
        Err(InvariantError::Undefined("I21 needs D_p ≠ 0"))
    } else {
        Ok(dq
            .mul(&dp.derive(VAR_P))
            .try_div(&dp)
            .expect("nonzero divisor")
            .neg())
    };
    (i12, i21)
}

/// The eigenfactor λ with ℒ_X(α) = λ·α, when the Lie derivative is
/// proportional to α (exact proportionality over the scalar field).
pub fn lie_eigenfactor(x: &VectorField, alpha: &KForm) -> Option<Scalar> {
    let lie = crate::exterior::lie_derivative(x, alpha);
    let ctx = alpha.ctx().clone();
    if alpha.is_zero() {
        return if lie.is_zero() {
            Some(Scalar::zero(&ctx))
        } else {
            None
        };
    }
    let pivot = alpha.coeffs.iter().position(|c| !c.is_zero())?;
    let lambda = lie.coeffs[pivot].try_div(&alpha.coeffs[pivot]).ok()?;
    if lie == alpha.scale(&lambda) {
        Some(lambda)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Invariant vector fields and e-structures
// ---------------------------------------------------------------------------

/// The four second-order invariant fields
/// Z₀₀ = Γ⁻¹∗(ρ∧dρ), Z₀₁ = Γ⁻¹∗(ρ∧dρ′), Z₁₀ = Γ⁻¹∗(ρ′∧dρ),
/// Z₁₁ = Γ⁻¹∗(ρ′∧dρ′).
pub fn zij_fields(att: &AttachedObjects, sympl: &SymplecticStructure) -> [VectorField; 4] {
    let drho = att.rho.ext_d();
    let drho_dual = att.rho_dual.ext_d();
    let make = |a: &KForm, db: &KForm| sympl.gamma_inv(&sympl.hodge_star(&a.wedge(db)));
    [
        make(&att.rho, &drho),
        make(&att.rho, &drho_dual),
        make(&att.rho_dual, &drho),
        make(&att.rho_dual, &drho_dual),
    ]
}

/// The same fields through the alternative characterization
/// Z_ij ⌟ ½Ω² = (3-form); agreement with [`zij_fields`] is exact.
pub fn zij_fields_by_volume(
    att: &AttachedObjects,
    sympl: &SymplecticStructure,
) -> [VectorField; 4] {
    let drho = att.rho.ext_d();
    let drho_dual = att.rho_dual.ext_d();
    let solve = |beta: &KForm| solve_insert_volume(beta, sympl);
    [
        solve(&att.rho.wedge(&drho)),
        solve(&att.rho.wedge(&drho_dual)),
        solve(&att.rho_dual.wedge(&drho)),
        solve(&att.rho_dual.wedge(&drho_dual)),
    ]
}

/// Solve Z ⌟ V = β for a 3-form β, where V is the volume form.
fn solve_insert_volume(beta: &KForm, sympl: &SymplecticStructure) -> VectorField {
    assert_eq!(beta.degree, 3);
    let ctx = beta.ctx().clone();
    let vc = sympl.volume().coeffs[0].clone();
    // ∂x⌟V = Vc·e_{pyq}, ∂p⌟V = −Vc·e_{xyq}, ∂y⌟V = Vc·e_{xpq}, ∂q⌟V = −Vc·e_{xpy}
    let comp = |s: &[usize], sign: i64| {
        let c = beta.coeffs[subset_index(3, s)].try_div(&vc).expect("unit volume");
        if sign < 0 {
            c.neg()
        } else {
            c
        }
    };
    VectorField::new([
        comp(&[1, 2, 3], 1),
        comp(&[0, 2, 3], -1),
        comp(&[0, 1, 3], 1),
        comp(&[0, 1, 2], -1),
    ])
    .scale(&Scalar::one(&ctx))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EStructureKind {
    /// The quadruple (Z₀₀, Z₀₁, Z₁₀, Z₁₁).
    PairingFields,
    /// (−2Z, −2Z′, P([Z,Z′])/(2I³−2I²), P′([Z,Z′])/(2I³)).
    BracketFrame,
}

pub fn e_structure(
    d: &Distribution2,
    kind: EStructureKind,
) -> Result<[VectorField; 4], InvariantError> {
    let att = d.attach()?;
    match kind {
        EStructureKind::PairingFields => Ok(zij_fields(&att, d.sympl())),
        EStructureKind::BracketFrame => {
            let i = scalar_invariants(&att, d.sympl());
            let two = Scalar::int(d.ctx(), 2);
            let d23 = two.mul(&i[2]).sub(&two.mul(&i[1]));
            if d23.is_zero() {
                return Err(InvariantError::Undefined("frame needs I³ ≠ I²"));
            }
            if i[2].is_zero() {
                return Err(InvariantError::Undefined("frame needs I³ ≠ 0"));
            }
            let bracket = lie_bracket(&att.z, &att.z_dual);
            Ok([
                att.z.scale(&two).neg(),
                att.z_dual.scale(&two).neg(),
                att.projector
                    .apply1(&bracket)
                    .scale(&d23.inv().expect("checked nonzero")),
                att.projector_dual
                    .apply1(&bracket)
                    .scale(&two.mul(&i[2]).inv().expect("checked nonzero")),
            ])
        }
    }
}

/// Poisson bracket of two of the nine invariants (a third-order invariant).
pub fn poisson_of_invariants(
    d: &Distribution2,
    k: usize,
    l: usize,
) -> Result<Scalar, InvariantError> {
    assert!((1..=9).contains(&k) && (1..=9).contains(&l), "indices 1..=9");
    let i = invariants_of(d)?;
    Ok(d.sympl().poisson(&i[k - 1], &i[l - 1]))
}

/// Linear independence of four fields over the scalar field: the 4×4
/// component determinant is not identically zero.
pub fn fields_independent(fields: &[VectorField; 4]) -> Result<bool, InvariantError> {
    let m = ScalarMatrix::from_rows(
        fields
            .iter()
            .map(|f| f.components.to_vec())
            .collect(),
    );
    let det = m.det().map_err(|e| InvariantError::Dist(DistError::Scalar(e)))?;
    Ok(!det.is_zero())
}

/// A constant Ω-selfadjoint complex structure (A² = −id), handy as an
/// elliptic operator input: ∂x ↦ ∂y, ∂y ↦ −∂x, ∂p ↦ −∂q, ∂q ↦ ∂p.
pub fn standard_complex_structure(ctx: &Arc<VariableContext>) -> VectorValuedForm {
    VectorValuedForm {
        degree: 1,
        values: vec![
            VectorField::basis(ctx, VAR_Y),
            VectorField::basis(ctx, VAR_Q).neg(),
            VectorField::basis(ctx, VAR_X).neg(),
            VectorField::basis(ctx, VAR_P),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::scalar::rat_int;

    fn setup() -> (Arc<VariableContext>, SymplecticStructure) {
        let ctx = VariableContext::base();
        let s = SymplecticStructure::standard(&ctx);
        (ctx, s)
    }

    fn special_form(ctx: &Arc<VariableContext>, s: &SymplecticStructure, d: &str) -> Distribution2 {
        let d = parse(d, ctx).unwrap();
        Distribution2::new(
            VectorField::basis(ctx, VAR_P),
            VectorField::basis(ctx, VAR_X).sub(&VectorField::basis(ctx, VAR_Q).scale(&d)),
            s,
        )
        .unwrap()
    }

    #[test]
    fn special_form_invariant_formulas() {
        let (ctx, s) = setup();
        // D = pq: I¹ = -D_pq = -1, I⁴ = -2, I⁵ = -1, I²=I³=I⁶=I⁷=0
        let d = special_form(&ctx, &s, "p*q");
        let i = invariants_of(&d).unwrap();
        assert_eq!(i[0], Scalar::int(&ctx, -1));
        assert_eq!(i[3], Scalar::int(&ctx, -2));
        assert_eq!(i[4], Scalar::int(&ctx, -1));
        for k in [1, 2, 5, 6] {
            assert!(i[k].is_zero(), "I{} should vanish", k + 1);
        }
    }

    #[test]
    fn special_view_and_invariants() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p^2+q");
        let view = special_form_view(&d).unwrap();
        assert_eq!(view.d, parse("p^2+q", &ctx).unwrap());
        let (i12, i21) = special_invariants(&view);
        // D_q = 1, D_qq = 0 -> I12 = 0; D_p = 2p, D_pp = 2 -> I21 = -2/(2p) = -1/p
        assert!(i12.unwrap().is_zero());
        assert_eq!(i21.unwrap(), parse("-1/p", &ctx).unwrap());
        // undefined branch: D independent of q
        let d = special_form(&ctx, &s, "p^2");
        let view = special_form_view(&d).unwrap();
        let (i12, _) = special_invariants(&view);
        assert!(matches!(i12, Err(InvariantError::Undefined(_))));
        // a distribution not in special form
        let other = Distribution2::new(
            VectorField::new([
                parse("0", &ctx).unwrap(),
                parse("x*y+1", &ctx).unwrap(),
                parse("1", &ctx).unwrap(),
                parse("p*q", &ctx).unwrap(),
            ]),
            VectorField::new([
                parse("1", &ctx).unwrap(),
                parse("1", &ctx).unwrap(),
                parse("0", &ctx).unwrap(),
                parse("x*y", &ctx).unwrap(),
            ]),
            &s,
        )
        .unwrap();
        assert!(special_form_view(&other).is_none());
    }

    #[test]
    fn lie_eigen_relations_on_special_form() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p*q + p^2 + q");
        let att = d.attach().unwrap();
        let i = scalar_invariants(&att, &s);
        // L_Z(ρ) = I¹ρ and L_{Z'}(ρ') = I¹ρ'
        assert_eq!(lie_eigenfactor(&att.z, &att.rho).unwrap(), i[0]);
        assert_eq!(lie_eigenfactor(&att.z_dual, &att.rho_dual).unwrap(), i[0]);
        // L_Z(ρ') = I¹²ρ', L_{Z'}(ρ) = I²¹ρ
        let view = special_form_view(&d).unwrap();
        let (i12, i21) = special_invariants(&view);
        assert_eq!(lie_eigenfactor(&att.z, &att.rho_dual).unwrap(), i12.unwrap());
        assert_eq!(lie_eigenfactor(&att.z_dual, &att.rho).unwrap(), i21.unwrap());
    }

    #[test]
    fn involution_relations_hold() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p*q + q^2");
        let i = invariants_of(&d).unwrap();
        let ip = primed_invariants(&d).unwrap();
        assert_eq!(ip[0], i[0]);
        assert_eq!(ip[1], i[1]);
        assert_eq!(ip[2], i[1].sub(&i[2]));
        assert_eq!(ip[3], i[3]);
        assert_eq!(ip[4], i[3].sub(&i[4]));
        let two = Scalar::int(&ctx, 2);
        assert_eq!(ip[5], i[3].sub(&two.mul(&i[4])).add(&i[5]));
        assert_eq!(ip[6], i[6].neg());
        let _ = ctx;
    }

    #[test]
    fn j_invariants_swap_symmetry() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p*q + p^2");
        let i = invariants_of(&d).unwrap();
        let ip = primed_invariants(&d).unwrap();
        let j = j_invariants(&i, &ip);
        let j_swapped = j_invariants(&ip, &i);
        for k in 0..7 {
            assert_eq!(j[k], j_swapped[k], "J{} swap symmetry", k + 1);
        }
        // J³ = I²I³ − (I³)², J⁷ = −(I⁷)²
        assert_eq!(j[2], i[1].mul(&i[2]).sub(&i[2].mul(&i[2])));
        assert_eq!(j[6], i[6].mul(&i[6]).neg());
        let _ = ctx;
    }

    #[test]
    fn operator_invariants_flat_and_elliptic() {
        let (ctx, s) = setup();
        let flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_P),
            VectorField::basis(&ctx, VAR_X),
            &s,
        )
        .unwrap();
        let a = flat.operator_a().unwrap();
        let oi = operator_invariants(&a, &s).unwrap();
        assert_eq!(oi.kind, OperatorKind::Hyperbolic);
        assert!(oi.values.iter().all(|v| v.is_zero()));
        // constant complex structure: selfadjoint, elliptic, all values zero
        let j = standard_complex_structure(&ctx);
        let oj = operator_invariants(&j, &s).unwrap();
        assert_eq!(oj.kind, OperatorKind::Elliptic);
        assert!(oj.values.iter().all(|v| v.is_zero()));
        // sign invariance J̃(−A) = J̃(A) on a nontrivial hyperbolic operator
        let d = special_form(&ctx, &s, "p*q + q^2");
        let a = d.operator_a().unwrap();
        let plus = operator_invariants(&a, &s).unwrap();
        let minus = operator_invariants(&a.neg(), &s).unwrap();
        assert_eq!(plus.values, minus.values);
        // identity rejected
        let id = VectorValuedForm::identity(&ctx);
        assert!(matches!(
            operator_invariants(&id, &s),
            Err(InvariantError::BadSquare)
        ));
    }

    #[test]
    fn operator_invariants_match_attached_objects() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p*q + p^2 + q");
        let att = d.attach().unwrap();
        let a = d.operator_a().unwrap();
        let oi = operator_invariants(&a, &s).unwrap();
        // θ = ω − ω', σ_A = σ, ϱ_A = ρ + ρ'
        assert_eq!(oi.theta, att.omega.sub(&att.omega_dual));
        assert_eq!(oi.sigma, att.sigma);
        assert_eq!(oi.varrho, att.rho.add(&att.rho_dual));
        let _ = ctx;
    }

    #[test]
    fn zij_two_definitions_agree() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p*q + p^2 + q");
        let att = d.attach().unwrap();
        let a = zij_fields(&att, &s);
        let b = zij_fields_by_volume(&att, &s);
        for k in 0..4 {
            assert_eq!(a[k], b[k]);
        }
        // flat case: all zero
        let flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_P),
            VectorField::basis(&ctx, VAR_X),
            &s,
        )
        .unwrap();
        let att = flat.attach().unwrap();
        assert!(zij_fields(&att, &s).iter().all(|z| z.is_zero()));
    }

    #[test]
    fn contact_ratio_guard() {
        let (ctx, _) = setup();
        let zeros: [Scalar; 9] = std::array::from_fn(|_| Scalar::zero(&ctx));
        assert!(matches!(
            contact_ratios(&zeros),
            Err(InvariantError::Undefined(_))
        ));
    }

    #[test]
    fn scaling_weights_of_operator_invariants() {
        let ctx = VariableContext::base();
        let s1 = SymplecticStructure::standard(&ctx);
        let d = special_form(&ctx, &s1, "p*q + q^2");
        let a = d.operator_a().unwrap();
        let base = operator_invariants(&a, &s1).unwrap();
        for c in [rat_int(2), rat_int(3), rat_int(-1)] {
            let sc = SymplecticStructure::with_scale(&ctx, c.clone());
            let scaled = operator_invariants(&a, &sc).unwrap();
            let weights: [i32; 7] = [-1, -2, -4, -2, -4, -2, -6];
            for (k, w) in weights.iter().enumerate() {
                let factor = Scalar::rational(
                    &ctx,
                    num::pow::pow(c.clone(), (-w) as usize).recip(),
                );
                assert_eq!(
                    scaled.values[k],
                    base.values[k].mul(&factor),
                    "J̃{} under scale {c}",
                    k + 1
                );
            }
        }
    }
}
