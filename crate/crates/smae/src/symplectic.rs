//! The symplectic structure Ω = c·(dp∧dx + dq∧dy), the isomorphism Γ between
//! fields and 1-forms, the induced pairings of k-forms, the symplectic Hodge
//! star, Hamiltonian fields and the Poisson bracket.

use crate::exterior::{subset_index, subsets, KForm, MultiVector, VectorField, DIM};
use crate::linalg::ScalarMatrix;
use crate::poly::Coeff;
use crate::scalar::{Scalar, ScalarError, VariableContext, VAR_P, VAR_Q, VAR_X, VAR_Y};
use num::{One, Zero};
use std::sync::Arc;

/// The symplectic form (with a nonzero rational scale c, default 1), its
/// privileged volume form V = ½Ω², and the solved Γ⁻¹ table.
#[derive(Clone, Debug)]
pub struct SymplecticStructure {
    ctx: Arc<VariableContext>,
    scale: Coeff,
    omega: KForm,
    volume: KForm,
    /// gamma_inv_basis[a] = Γ⁻¹ of the a-th basis covector.
    gamma_inv_basis: [VectorField; 4],
}

impl SymplecticStructure {
    pub fn standard(ctx: &Arc<VariableContext>) -> SymplecticStructure {
        SymplecticStructure::with_scale(ctx, Coeff::one())
    }

    pub fn with_scale(ctx: &Arc<VariableContext>, scale: Coeff) -> SymplecticStructure {
        assert!(!scale.is_zero(), "symplectic scale must be nonzero");
        let c = Scalar::rational(ctx, scale.clone());
        // Ω = c(dp∧dx + dq∧dy) = -c·dx∧dp - c·dy∧dq
        let mut omega = KForm::zero(ctx, 2);
        omega.coeffs[subset_index(2, &[VAR_X, VAR_P])] = c.neg();
        omega.coeffs[subset_index(2, &[VAR_Y, VAR_Q])] = c.neg();
        let volume = omega.wedge(&omega).scale(
            &Scalar::rational(ctx, Coeff::new(1.into(), 2.into())),
        );
        // Solve X⌟Ω = e_a for each basis covector by exact linear algebra.
        let mut cols = Vec::new();
        for a in 0..4 {
            let g = omega.insert(&VectorField::basis(ctx, a));
            cols.push((0..4).map(|i| g.coeffs[i].clone()).collect::<Vec<_>>());
        }
        let m = ScalarMatrix::from_rows(
            (0..4)
                .map(|i| (0..4).map(|a| cols[a][i].clone()).collect())
                .collect(),
        );
        let gamma_inv_basis = std::array::from_fn(|i| {
            let mut rhs = vec![Scalar::zero(ctx); 4];
            rhs[i] = Scalar::one(ctx);
            let sol = m.solve(&rhs).expect("Ω is nondegenerate");
            VectorField::new(std::array::from_fn(|j| sol[j].clone()))
        });
        SymplecticStructure {
            ctx: ctx.clone(),
            scale,
            omega,
            volume,
            gamma_inv_basis,
        }
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn scale(&self) -> &Coeff {
        &self.scale
    }

    pub fn omega(&self) -> &KForm {
        &self.omega
    }

    pub fn volume(&self) -> &KForm {
        &self.volume
    }

    /// Ω(X, Y) as a scalar.
    pub fn omega_on(&self, x: &VectorField, y: &VectorField) -> Scalar {
        self.omega.insert(x).insert(y).as_scalar().clone()
    }

    /// Γ(X) = X ⌟ Ω.
    pub fn gamma(&self, x: &VectorField) -> KForm {
        self.omega.insert(x)
    }

    /// Γ⁻¹ of a 1-form.
    pub fn gamma_inv(&self, alpha: &KForm) -> VectorField {
        assert_eq!(alpha.degree, 1, "gamma_inv takes a 1-form");
        let mut acc = VectorField::zero(&self.ctx);
        for a in 0..4 {
            if !alpha.coeffs[a].is_zero() {
                acc = acc.add(&self.gamma_inv_basis[a].scale(&alpha.coeffs[a]));
            }
        }
        acc
    }

    /// Multiplicative extension Γ(X₁∧…∧X_k) = Γ(X₁)∧…∧Γ(X_k).
    pub fn gamma_ext(&self, w: &MultiVector) -> KForm {
        let k = w.degree;
        let mut out = KForm::zero(&self.ctx, k);
        for (i, c) in w.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = subsets(k)[i];
            let mut form = KForm::from_scalar(c.clone());
            for &a in s {
                form = form.wedge(&self.gamma(&VectorField::basis(&self.ctx, a)));
            }
            out = out.add(&form);
        }
        out
    }

    /// Multiplicative extension of Γ⁻¹ to k-forms.
    pub fn gamma_inv_ext(&self, alpha: &KForm) -> MultiVector {
        let k = alpha.degree;
        if k == 0 {
            let mut mv = MultiVector::zero(&self.ctx, 0);
            mv.coeffs[0] = alpha.as_scalar().clone();
            return mv;
        }
        let mut out = MultiVector::zero(&self.ctx, k);
        for (i, c) in alpha.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = subsets(k)[i];
            let fields: Vec<VectorField> =
                s.iter().map(|&a| self.gamma_inv_basis[a].clone()).collect();
            let mv = MultiVector::from_decomposable(&fields).scale(c);
            out = out.add(&mv);
        }
        out
    }

    /// ⟨α, β⟩ := Γ⁻¹(β) ⌟ α on equal-degree forms.
    pub fn pairing(&self, alpha: &KForm, beta: &KForm) -> Scalar {
        assert_eq!(alpha.degree, beta.degree, "pairing degree mismatch");
        if alpha.degree == 0 {
            return alpha.as_scalar().mul(beta.as_scalar());
        }
        alpha
            .insert_multi(&self.gamma_inv_ext(beta))
            .as_scalar()
            .clone()
    }

    /// The symplectic Hodge star: the unique solution of α∧∗β = ⟨α,β⟩·V for
    /// all α of the degree of β, solved degreewise on basis monomials.
    pub fn hodge_star(&self, beta: &KForm) -> KForm {
        let k = beta.degree;
        let ctx = &self.ctx;
        let vol_coeff = self.volume.coeffs[0].clone();
        let mut out = KForm::zero(ctx, DIM - k);
        for (i, s) in subsets(k).iter().enumerate() {
            let alpha = KForm::basis(ctx, s);
            let rhs = self.pairing(&alpha, beta).mul(&vol_coeff);
            // α ∧ e_{comp(S)} = sign · e_{0123}: a diagonal linear system.
            let comp: Vec<usize> = (0..4).filter(|v| !s.contains(v)).collect();
            let sign_form = alpha.wedge(&KForm::basis(ctx, &comp));
            let sign = sign_form.coeffs[0].clone();
            // sign is ±1, so dividing is exact.
            let idx = subset_index(DIM - k, &comp);
            out.coeffs[idx] = rhs.try_div(&sign).expect("unit sign");
            let _ = i;
        }
        out
    }

    /// X_H := Γ⁻¹(dH).
    pub fn hamiltonian_field(&self, h: &Scalar) -> VectorField {
        let dh = KForm::from_scalar(h.clone()).ext_d();
        self.gamma_inv(&dh)
    }

    /// {f, g} := X_f(g). With this convention {x, p} = 1 in the canonical
    /// chart and rescaling Ω ↦ cΩ divides the bracket by c.
    pub fn poisson(&self, f: &Scalar, g: &Scalar) -> Scalar {
        self.hamiltonian_field(f).apply(g)
    }
}

/// Convenience: Ω(X, Y) with the standard scale on the ambient context.
pub fn std_omega_on(
    ctx: &Arc<VariableContext>,
    x: &VectorField,
    y: &VectorField,
) -> Result<Scalar, ScalarError> {
    let s = SymplecticStructure::standard(ctx);
    Ok(s.omega_on(x, y))
}
