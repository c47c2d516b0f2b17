//! Non-Lagrangian 2-distributions and their canonical attached objects
//! (orthogonal complement, projectors, the invariant fields Z, Z′, the forms
//! ω, ω′, ρ, ρ′, σ and the curvature tensor), plus the Monge-Ampère
//! front-end that turns equation coefficients into a pair of distributions.
//!
//! All genericity conditions are generic-point conditions: a scalar counts
//! as nonzero when it is not identically zero.

use crate::exterior::{lie_bracket, KForm, MultiVector, VectorField, VectorValuedForm};
use crate::linalg::ScalarMatrix;
use crate::scalar::{exact_sqrt, Scalar, ScalarError, VariableContext};
use crate::symplectic::SymplecticStructure;
use num::Signed;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistError {
    /// Ω restricted to the span vanishes identically.
    Lagrangian,
    /// The two spanning fields do not span a 2-plane at generic points.
    DegenerateSpan,
    /// Parabolic input (Δ ≡ 0) has no associated distribution pair.
    Parabolic,
    /// Elliptic input (Δ < 0) has no real distribution pair.
    Elliptic,
    /// S ≡ 0 together with A ≡ 0 and no usable mixed term.
    DegenerateMae,
    /// A declared square root whose square is not the discriminant.
    WrongSquareRoot,
    Scalar(ScalarError),
}

impl fmt::Display for DistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistError::Lagrangian => write!(f, "the distribution is Lagrangian"),
            DistError::DegenerateSpan => write!(f, "the spanning fields do not span a 2-plane"),
            DistError::Parabolic => write!(f, "parabolic equation (discriminant vanishes)"),
            DistError::Elliptic => {
                write!(f, "elliptic equation: no real distribution pair exists")
            }
            DistError::DegenerateMae => {
                write!(f, "degenerate coefficients: S = 0, A = 0 and no pure mixed term")
            }
            DistError::WrongSquareRoot => {
                write!(f, "declared square root does not square to the discriminant")
            }
            DistError::Scalar(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DistError {}

impl From<ScalarError> for DistError {
    fn from(e: ScalarError) -> Self {
        DistError::Scalar(e)
    }
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// A non-Lagrangian 2-distribution given by two spanning vector fields.
#[derive(Clone, Debug)]
pub struct Distribution2 {
    span: [VectorField; 2],
    sympl: SymplecticStructure,
}

impl Distribution2 {
    pub fn new(
        x1: VectorField,
        x2: VectorField,
        sympl: &SymplecticStructure,
    ) -> Result<Distribution2, DistError> {
        if MultiVector::from_decomposable(&[x1.clone(), x2.clone()]).is_zero() {
            return Err(DistError::DegenerateSpan);
        }
        if sympl.omega_on(&x1, &x2).is_zero() {
            return Err(DistError::Lagrangian);
        }
        Ok(Distribution2 {
            span: [x1, x2],
            sympl: sympl.clone(),
        })
    }

    pub fn span(&self) -> &[VectorField; 2] {
        &self.span
    }

    pub fn sympl(&self) -> &SymplecticStructure {
        &self.sympl
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.span[0].ctx()
    }

    /// Does the field lie in the span (generic-point membership)?
    pub fn contains(&self, field: &VectorField) -> Result<bool, DistError> {
        if field.is_zero() {
            return Ok(true);
        }
        let m = ScalarMatrix::from_rows(vec![
            self.span[0].components.to_vec(),
            self.span[1].components.to_vec(),
            field.components.to_vec(),
        ]);
        Ok(m.rank().map_err(DistError::Scalar)? == 2)
    }

    pub fn same_span(&self, other: &Distribution2) -> Result<bool, DistError> {
        Ok(self.contains(&other.span[0])? && self.contains(&other.span[1])?)
    }

    /// The Ω-orthogonal complement 𝒟′, spanned by the exact nullspace of
    /// Γ(X₁), Γ(X₂) applied to candidate fields.
    pub fn ortho_complement(&self) -> Result<Distribution2, DistError> {
        let rows: Vec<Vec<Scalar>> = self
            .span
            .iter()
            .map(|x| self.sympl.gamma(x).coeffs.clone())
            .collect();
        let m = ScalarMatrix::from_rows(rows);
        let ns = m.nullspace().map_err(DistError::Scalar)?;
        if ns.len() != 2 {
            return Err(DistError::DegenerateSpan);
        }
        let w1 = VectorField::new(std::array::from_fn(|i| ns[0][i].clone()));
        let w2 = VectorField::new(std::array::from_fn(|i| ns[1][i].clone()));
        Distribution2::new(w1, w2, &self.sympl)
    }

    /// All canonical attached objects.
    pub fn attach(&self) -> Result<AttachedObjects, DistError> {
        AttachedObjects::compute(self)
    }

    /// The reflection operator A = P − P′ (identity on 𝒟, minus identity
    /// on 𝒟′). A is Ω-selfadjoint with A² = id.
    pub fn operator_a(&self) -> Result<VectorValuedForm, DistError> {
        let att = self.attach()?;
        Ok(att.projector.sub(&att.projector_dual))
    }
}

/// The objects attached to a non-Lagrangian 2-distribution.
#[derive(Clone, Debug)]
pub struct AttachedObjects {
    /// The Ω-orthogonal complement 𝒟′.
    pub dual: Distribution2,
    /// Projector P onto 𝒟 along 𝒟′ (degree-1 vector-valued form).
    pub projector: VectorValuedForm,
    /// P′ = id − P.
    pub projector_dual: VectorValuedForm,
    /// Z = P′([X, Y]) for a normalized spanning pair Ω(X, Y) = 1.
    pub z: VectorField,
    /// The corresponding field of 𝒟′.
    pub z_dual: VectorField,
    /// ω: agrees with Ω on 𝒟, kernel contains 𝒟′.
    pub omega: KForm,
    /// ω′ = Ω − ω.
    pub omega_dual: KForm,
    /// ρ = Γ(Z).
    pub rho: KForm,
    /// ρ′ = Γ(Z′).
    pub rho_dual: KForm,
    /// σ = ρ − ρ′.
    pub sigma: KForm,
    /// Curvature ℛ(U, V) = P′([P U, P V]).
    pub curvature: VectorValuedForm,
    /// ℛ′ with the roles of P and P′ exchanged.
    pub curvature_dual: VectorValuedForm,
}

impl AttachedObjects {
    fn compute(d: &Distribution2) -> Result<AttachedObjects, DistError> {
        let ctx = d.ctx().clone();
        let sympl = &d.sympl;
        let dual = d.ortho_complement()?;
        let [x1, x2] = d.span.clone();
        let [w1, w2] = dual.span.clone();

        // Frame (X₁, X₂, W₁, W₂) and its coframe.
        let frame = ScalarMatrix::from_rows(
            (0..4)
                .map(|i| {
                    vec![
                        x1.components[i].clone(),
                        x2.components[i].clone(),
                        w1.components[i].clone(),
                        w2.components[i].clone(),
                    ]
                })
                .collect(),
        );
        let coframe = frame.inverse().map_err(DistError::Scalar)?;

        // P(∂_a) = θ¹(∂_a)X₁ + θ²(∂_a)X₂.
        let projector = VectorValuedForm {
            degree: 1,
            values: (0..4)
                .map(|a| {
                    x1.scale(coframe.at(0, a))
                        .add(&x2.scale(coframe.at(1, a)))
                })
                .collect(),
        };
        let projector_dual = VectorValuedForm::identity(&ctx).sub(&projector);

        // Z from the normalized pair (X₁, X₂/Ω(X₁,X₂)); Z′ from the dual.
        let g = sympl.omega_on(&x1, &x2);
        let y = x2.scale(&g.inv().map_err(DistError::Scalar)?);
        let z = apply_vv(&projector_dual, &lie_bracket(&x1, &y));
        let gd = sympl.omega_on(&w1, &w2);
        if gd.is_zero() {
            return Err(DistError::Lagrangian);
        }
        let yd = w2.scale(&gd.inv().map_err(DistError::Scalar)?);
        let z_dual = apply_vv(&projector, &lie_bracket(&w1, &yd));

        // ω = Ω(X₁,X₂)·θ¹∧θ², with θ the coframe rows (they kill 𝒟′).
        let theta1 = KForm {
            degree: 1,
            coeffs: (0..4).map(|a| coframe.at(0, a).clone()).collect(),
        };
        let theta2 = KForm {
            degree: 1,
            coeffs: (0..4).map(|a| coframe.at(1, a).clone()).collect(),
        };
        let omega = theta1.wedge(&theta2).scale(&g);
        let omega_dual = sympl.omega().sub(&omega);

        let rho = sympl.gamma(&z);
        let rho_dual = sympl.gamma(&z_dual);
        let sigma = rho.sub(&rho_dual);

        let curvature = curvature_of(&projector, &projector_dual, &ctx);
        let curvature_dual = curvature_of(&projector_dual, &projector, &ctx);

        Ok(AttachedObjects {
            dual,
            projector,
            projector_dual,
            z,
            z_dual,
            omega,
            omega_dual,
            rho,
            rho_dual,
            sigma,
            curvature,
            curvature_dual,
        })
    }

    /// Z recomputed with the other normalization (divide the first spanning
    /// field instead of the second); well-definedness makes this equal to
    /// `self.z`.
    pub fn z_alternative_normalization(&self, d: &Distribution2) -> Result<VectorField, DistError> {
        let [x1, x2] = d.span.clone();
        let g = d.sympl.omega_on(&x1, &x2);
        let x = x1.scale(&g.inv().map_err(DistError::Scalar)?);
        Ok(apply_vv(&self.projector_dual, &lie_bracket(&x, &x2)))
    }
}

pub fn apply_vv(vv: &VectorValuedForm, x: &VectorField) -> VectorField {
    vv.apply1(x)
}

fn curvature_of(
    p: &VectorValuedForm,
    p_complement: &VectorValuedForm,
    ctx: &Arc<VariableContext>,
) -> VectorValuedForm {
    let mut values = Vec::new();
    for s in crate::exterior::subsets(2) {
        let pa = p.values[s[0]].clone();
        let pb = p.values[s[1]].clone();
        values.push(p_complement.apply1(&lie_bracket(&pa, &pb)));
    }
    let _ = ctx;
    VectorValuedForm { degree: 2, values }
}

// ---------------------------------------------------------------------------
// Monge-Ampère front-end
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaeType {
    Hyperbolic,
    Parabolic,
    Elliptic,
    /// Discriminant is a nonconstant symbol; treated as hyperbolic on the
    /// open locus where it is positive.
    IndefiniteSymbolic,
}

/// Coefficients of S(u_xx u_yy − u_xy²) + A u_xx + B u_xy + C u_yy + D = 0,
/// all functions of (x, y, u_x, u_y) = (x, y, p, q).
#[derive(Clone, Debug)]
pub struct MaeCoefficients {
    pub s: Scalar,
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
    pub delta: Scalar,
}

impl MaeCoefficients {
    pub fn new(s: Scalar, a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> MaeCoefficients {
        // Δ = B² − 4AC + 4SD
        let four = Scalar::int(s.ctx(), 4);
        let delta = b
            .mul(&b)
            .sub(&four.mul(&a).mul(&c))
            .add(&four.mul(&s).mul(&d));
        MaeCoefficients { s, a, b, c, d, delta }
    }

    pub fn mae_type(&self) -> MaeType {
        if self.delta.is_zero() {
            return MaeType::Parabolic;
        }
        if let Some(v) = self.delta.constant_value() {
            if v.is_negative() {
                return MaeType::Elliptic;
            }
            return MaeType::Hyperbolic;
        }
        MaeType::IndefiniteSymbolic
    }

    /// The associated pair {𝒟, 𝒟′} of mutually Ω-orthogonal non-Lagrangian
    /// distributions. A caller-declared square root of Δ keeps the result
    /// radical-free; otherwise √Δ is adjoined (except when Δ is the square
    /// of a rational constant).
    pub fn to_distributions(
        &self,
        declared_sqrt: Option<&Scalar>,
    ) -> Result<(Distribution2, Distribution2), DistError> {
        match self.mae_type() {
            MaeType::Parabolic => return Err(DistError::Parabolic),
            MaeType::Elliptic => return Err(DistError::Elliptic),
            _ => {}
        }
        let ctx = self.s.ctx().clone();

        // Decide the working context and the square root of Δ in it.
        let (work, root): (Arc<VariableContext>, Scalar) = if let Some(r) = declared_sqrt {
            if r.mul(r) != self.delta {
                return Err(DistError::WrongSquareRoot);
            }
            (ctx.clone(), r.clone())
        } else if let Some(v) = self.delta.constant_value() {
            match exact_sqrt(&v) {
                Some(root) => (ctx.clone(), Scalar::rational(&ctx, root)),
                None => self.adjoin_radical(&ctx)?,
            }
        } else {
            self.adjoin_radical(&ctx)?
        };

        let lift = |f: &Scalar| -> Result<Scalar, DistError> {
            Ok(f.extend(&work).map_err(DistError::Scalar)?)
        };
        let s = lift(&self.s)?;
        let a = lift(&self.a)?;
        let b = lift(&self.b)?;
        let c = lift(&self.c)?;
        let d = lift(&self.d)?;
        let sympl = SymplecticStructure::standard(&work);
        let basis = |i: usize| VectorField::basis(&work, i);
        let two = Scalar::int(&work, 2);

        if !s.is_zero() {
            // X = ∂x − (C/S)∂p + (B/2S)∂q, Y = ∂y + (B/2S)∂p − (A/S)∂q
            let cs = c.try_div(&s)?;
            let b2s = b.try_div(&two.mul(&s))?;
            let as_ = a.try_div(&s)?;
            let x = basis(0)
                .add(&basis(1).scale(&cs.neg()))
                .add(&basis(3).scale(&b2s));
            let y = basis(2)
                .add(&basis(1).scale(&b2s))
                .add(&basis(3).scale(&as_.neg()));
            let r = root.try_div(&two.mul(&s))?;
            let d1 = Distribution2::new(
                x.sub(&basis(3).scale(&r)),
                y.add(&basis(1).scale(&r)),
                &sympl,
            )?;
            let d2 = Distribution2::new(
                x.add(&basis(3).scale(&r)),
                y.sub(&basis(1).scale(&r)),
                &sympl,
            )?;
            return Ok((d1, d2));
        }
        if !a.is_zero() {
            // Quasilinear branch: X = 2A∂x + B∂y − 2D∂p, Y = B∂p − 2A∂q.
            let x = basis(0)
                .scale(&two.mul(&a))
                .add(&basis(2).scale(&b))
                .add(&basis(1).scale(&two.mul(&d).neg()));
            let y = basis(1).scale(&b).add(&basis(3).scale(&two.mul(&a).neg()));
            let d1 = Distribution2::new(
                x.sub(&basis(2).scale(&root)),
                y.add(&basis(1).scale(&root)),
                &sympl,
            )?;
            let d2 = Distribution2::new(
                x.add(&basis(2).scale(&root)),
                y.sub(&basis(1).scale(&root)),
                &sympl,
            )?;
            return Ok((d1, d2));
        }
        if !b.is_zero() && c.is_zero() {
            // Pure mixed term B·u_xy + D = 0, i.e. u_xy + (D/B) = 0.
            let f = d.try_div(&b)?;
            let d1 = Distribution2::new(
                basis(1),
                basis(0).sub(&basis(3).scale(&f)),
                &sympl,
            )?;
            let d2 = Distribution2::new(
                basis(3),
                basis(2).sub(&basis(1).scale(&f)),
                &sympl,
            )?;
            return Ok((d1, d2));
        }
        Err(DistError::DegenerateMae)
    }

    fn adjoin_radical(
        &self,
        ctx: &Arc<VariableContext>,
    ) -> Result<(Arc<VariableContext>, Scalar), DistError> {
        if ctx.has_radical() || !self.delta.is_radical_free() {
            return Err(DistError::Scalar(ScalarError::NestedRadical));
        }
        let rat = self.delta.base_part();
        let work = VariableContext::builder()
            .radical(rat.num().clone(), rat.den().clone())
            .build();
        let root = Scalar::radical(&work).map_err(DistError::Scalar)?;
        Ok((work, root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::scalar::{VariableContext, VAR_P, VAR_Q, VAR_X, VAR_Y};

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
    fn rejects_lagrangian_and_degenerate() {
        let (ctx, s) = setup();
        let e = Distribution2::new(
            VectorField::basis(&ctx, VAR_X),
            VectorField::basis(&ctx, VAR_Y),
            &s,
        );
        assert!(matches!(e, Err(DistError::Lagrangian)));
        let x = VectorField::basis(&ctx, VAR_X);
        let e = Distribution2::new(x.clone(), x.scale(&parse("p", &ctx).unwrap()), &s);
        assert!(matches!(e, Err(DistError::DegenerateSpan)));
    }

    #[test]
    fn ortho_complement_of_special_form() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p^2+q");
        let dual = d.ortho_complement().unwrap();
        // expected span ⟨∂q, ∂y − D ∂p⟩
        let expect = Distribution2::new(
            VectorField::basis(&ctx, VAR_Q),
            VectorField::basis(&ctx, VAR_Y)
                .sub(&VectorField::basis(&ctx, VAR_P).scale(&parse("p^2+q", &ctx).unwrap())),
            &s,
        )
        .unwrap();
        assert!(dual.same_span(&expect).unwrap());
        assert!(expect.same_span(&dual).unwrap());
        // u_xy = 0: ⟨∂p,∂x⟩ -> ⟨∂q,∂y⟩
        let flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_P),
            VectorField::basis(&ctx, VAR_X),
            &s,
        )
        .unwrap();
        let flat_dual = flat.ortho_complement().unwrap();
        let expect_flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_Q),
            VectorField::basis(&ctx, VAR_Y),
            &s,
        )
        .unwrap();
        assert!(flat_dual.same_span(&expect_flat).unwrap());
    }

    #[test]
    fn quasilinear_example_complement() {
        // ⟨∂q, −q∂x + yq∂p + ∂y⟩ -> ⟨∂p + q∂q, ∂x − y∂p⟩
        let (ctx, s) = setup();
        let d = Distribution2::new(
            VectorField::basis(&ctx, VAR_Q),
            VectorField::new([
                parse("-q", &ctx).unwrap(),
                parse("y*q", &ctx).unwrap(),
                parse("1", &ctx).unwrap(),
                parse("0", &ctx).unwrap(),
            ]),
            &s,
        )
        .unwrap();
        let dual = d.ortho_complement().unwrap();
        let expect = Distribution2::new(
            VectorField::basis(&ctx, VAR_P)
                .add(&VectorField::basis(&ctx, VAR_Q).scale(&parse("q", &ctx).unwrap())),
            VectorField::basis(&ctx, VAR_X)
                .sub(&VectorField::basis(&ctx, VAR_P).scale(&parse("y", &ctx).unwrap())),
            &s,
        )
        .unwrap();
        assert!(dual.same_span(&expect).unwrap());
    }

    #[test]
    fn attach_special_form_fields_and_forms() {
        let (ctx, s) = setup();
        // D = pq: Z = -D_p ∂q = -q∂q, ρ = -q dy, Z' = -D_q ∂p = -p∂p, ρ' = -p dx
        let d = special_form(&ctx, &s, "p*q");
        let att = d.attach().unwrap();
        let q = parse("q", &ctx).unwrap();
        let p = parse("p", &ctx).unwrap();
        assert_eq!(att.z, VectorField::basis(&ctx, VAR_Q).scale(&q.neg()));
        assert_eq!(att.z_dual, VectorField::basis(&ctx, VAR_P).scale(&p.neg()));
        assert_eq!(att.rho, KForm::monomial(q.neg(), &[VAR_Y]));
        assert_eq!(att.rho_dual, KForm::monomial(p.neg(), &[VAR_X]));
        // commuting flat case: everything vanishes
        let flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_P),
            VectorField::basis(&ctx, VAR_X),
            &s,
        )
        .unwrap();
        let att = flat.attach().unwrap();
        assert!(att.z.is_zero() && att.z_dual.is_zero());
        assert!(att.rho.is_zero() && att.rho_dual.is_zero() && att.sigma.is_zero());
    }

    #[test]
    fn projector_algebra() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p^2+q");
        let att = d.attach().unwrap();
        // P + P' = id, P² = P, image spans 𝒟
        let id = VectorValuedForm::identity(&ctx);
        assert_eq!(att.projector.add(&att.projector_dual), id);
        assert_eq!(att.projector.compose(&att.projector), att.projector);
        for a in 0..4 {
            assert!(d.contains(&att.projector.values[a]).unwrap());
            assert!(att.dual.contains(&att.projector_dual.values[a]).unwrap());
        }
        // Z ∈ 𝒟′, Z′ ∈ 𝒟, Ω = ω + ω′
        assert!(att.dual.contains(&att.z).unwrap());
        assert!(d.contains(&att.z_dual).unwrap());
        assert_eq!(att.omega.add(&att.omega_dual), *s.omega());
        // ω restricted to 𝒟 is Ω, kernel contains 𝒟′
        let [x1, x2] = d.span().clone();
        assert_eq!(att.omega.eval_on(&[&x1, &x2]), s.omega_on(&x1, &x2));
        for w in att.dual.span() {
            assert!(att.omega.insert(w).is_zero());
        }
    }

    #[test]
    fn operator_a_properties() {
        let (ctx, s) = setup();
        let d = special_form(&ctx, &s, "p*q + x*y");
        let a = d.operator_a().unwrap();
        let id = VectorValuedForm::identity(&ctx);
        assert_eq!(a.compose(&a), id);
        // Ω(AX, Y) = Ω(X, AY) on all basis pairs
        for i in 0..4 {
            for j in 0..4 {
                let bi = VectorField::basis(&ctx, i);
                let bj = VectorField::basis(&ctx, j);
                let lhs = s.omega_on(&a.apply1(&bi), &bj);
                let rhs = s.omega_on(&bi, &a.apply1(&bj));
                assert_eq!(lhs, rhs);
            }
        }
        // trivially split case
        let flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_P),
            VectorField::basis(&ctx, VAR_X),
            &s,
        )
        .unwrap();
        let a = flat.operator_a().unwrap();
        assert_eq!(a.apply1(&VectorField::basis(&ctx, VAR_P)), VectorField::basis(&ctx, VAR_P));
        assert_eq!(a.apply1(&VectorField::basis(&ctx, VAR_X)), VectorField::basis(&ctx, VAR_X));
        assert_eq!(
            a.apply1(&VectorField::basis(&ctx, VAR_Q)),
            VectorField::basis(&ctx, VAR_Q).neg()
        );
        assert_eq!(
            a.apply1(&VectorField::basis(&ctx, VAR_Y)),
            VectorField::basis(&ctx, VAR_Y).neg()
        );
    }

    #[test]
    fn mae_special_and_flat() {
        let (ctx, s) = setup();
        // u_xy + D = 0 with D = pq: S=0, A=C=0, B=1
        let m = MaeCoefficients::new(
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::one(&ctx),
            Scalar::zero(&ctx),
            parse("p*q", &ctx).unwrap(),
        );
        assert_eq!(m.mae_type(), MaeType::Hyperbolic);
        let (d1, d2) = m.to_distributions(None).unwrap();
        let expect = special_form(&ctx, &s, "p*q");
        assert!(d1.same_span(&expect).unwrap());
        assert!(d2.same_span(&expect.ortho_complement().unwrap()).unwrap());
        // u_xy = 0
        let m0 = MaeCoefficients::new(
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::one(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
        );
        let (d1, _) = m0.to_distributions(None).unwrap();
        let flat = Distribution2::new(
            VectorField::basis(&ctx, VAR_P),
            VectorField::basis(&ctx, VAR_X),
            &s,
        )
        .unwrap();
        assert!(d1.same_span(&flat).unwrap());
    }

    #[test]
    fn mae_full_branch_rational_discriminant() {
        let (ctx, _) = setup();
        // u_xx u_yy − u_xy² + 1 = 0: S=1, D=1, Δ=4, root rational
        let m = MaeCoefficients::new(
            Scalar::one(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::one(&ctx),
        );
        let (d1, d2) = m.to_distributions(None).unwrap();
        // mutually orthogonal, each non-Lagrangian
        let s = d1.sympl().clone();
        for a in d1.span() {
            for b in d2.span() {
                assert!(s.omega_on(a, b).is_zero());
            }
        }
        assert!(d1.same_span(&d2.ortho_complement().unwrap()).unwrap());
        // elliptic counterpart rejected
        let me = MaeCoefficients::new(
            Scalar::one(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::int(&ctx, -1),
        );
        assert_eq!(me.mae_type(), MaeType::Elliptic);
        assert!(matches!(me.to_distributions(None), Err(DistError::Elliptic)));
        // parabolic rejected
        let mp = MaeCoefficients::new(
            Scalar::zero(&ctx),
            Scalar::one(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
        );
        assert!(matches!(mp.to_distributions(None), Err(DistError::Parabolic)));
    }

    #[test]
    fn mae_radical_branch() {
        let (ctx, _) = setup();
        // u_xy + D with B=1 handled above; force the radical: S=1, A=B=C=0, D=x
        let m = MaeCoefficients::new(
            Scalar::one(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            Scalar::zero(&ctx),
            parse("x", &ctx).unwrap(),
        );
        assert_eq!(m.mae_type(), MaeType::IndefiniteSymbolic);
        let (d1, d2) = m.to_distributions(None).unwrap();
        let s = d1.sympl().clone();
        for a in d1.span() {
            for b in d2.span() {
                assert!(s.omega_on(a, b).is_zero(), "orthogonality with radical");
            }
        }
    }

    #[test]
    fn z_is_independent_of_normalization() {
        let (ctx, s) = setup();
        let x1 = VectorField::new([
            parse("0", &ctx).unwrap(),
            parse("x*y+1", &ctx).unwrap(),
            parse("1", &ctx).unwrap(),
            parse("p*q", &ctx).unwrap(),
        ]);
        let x2 = VectorField::new([
            parse("1", &ctx).unwrap(),
            parse("1", &ctx).unwrap(),
            parse("0", &ctx).unwrap(),
            parse("x*y", &ctx).unwrap(),
        ]);
        let d = Distribution2::new(x1, x2, &s).unwrap();
        let att = d.attach().unwrap();
        let alt = att.z_alternative_normalization(&d).unwrap();
        assert_eq!(att.z, alt);
    }
}
