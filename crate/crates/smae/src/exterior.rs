//! Exterior calculus on the fixed 4-dimensional chart (x, p, y, q): vector
//! fields, k-forms, multivectors and vector-valued forms, with wedge,
//! exterior derivative, insertions, Lie bracket and Lie derivative.
//!
//! Basis monomials of every degree are stored in the lexicographic order on
//! ascending index tuples over (dx, dp, dy, dq); all orientation-sensitive
//! signs flow from that single choice.
//!
//! The insertion of a decomposable multivector follows the nesting
//! `(X₁∧…∧X_r)⌟α = X_r⌟(…(X₁⌟α))`, so that for r = deg α the result is
//! `α(X₁,…,X_r)`.

use crate::scalar::{Scalar, VariableContext};
use std::fmt;
use std::sync::Arc;

pub const DIM: usize = 4;
pub const COVECTOR_NAMES: [&str; 4] = ["dx", "dp", "dy", "dq"];
pub const FIELD_NAMES: [&str; 4] = ["d_x", "d_p", "d_y", "d_q"];

const SUBSETS_0: [&[usize]; 1] = [&[]];
const SUBSETS_1: [&[usize]; 4] = [&[0], &[1], &[2], &[3]];
const SUBSETS_2: [&[usize]; 6] = [&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]];
const SUBSETS_3: [&[usize]; 4] = [&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]];
const SUBSETS_4: [&[usize]; 1] = [&[0, 1, 2, 3]];

/// Ascending index tuples of size `k`, in lexicographic order.
pub fn subsets(k: usize) -> &'static [&'static [usize]] {
    match k {
        0 => &SUBSETS_0,
        1 => &SUBSETS_1,
        2 => &SUBSETS_2,
        3 => &SUBSETS_3,
        4 => &SUBSETS_4,
        _ => panic!("degree out of range"),
    }
}

pub fn dim_of_degree(k: usize) -> usize {
    subsets(k).len()
}

pub fn subset_index(k: usize, s: &[usize]) -> usize {
    subsets(k)
        .iter()
        .position(|t| *t == s)
        .expect("basis subset")
}

/// Merge two disjoint ascending tuples; the sign is the parity of the
/// shuffle. `None` when they overlap.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
            inversions += a.len() - i;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Sign of splitting the ascending tuple `t` into the subtuple `s` followed
/// by the complement `t \ s` (both ascending).
fn shuffle_sign(s: &[usize], rest: &[usize]) -> i64 {
    let mut inv = 0usize;
    for &a in s {
        for &b in rest {
            if a > b {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn complement(t: &[usize], s: &[usize]) -> Vec<usize> {
    t.iter().copied().filter(|x| !s.contains(x)).collect()
}

/// Size-k sub-tuples of an ascending tuple.
fn sub_tuples(t: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > t.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in t.iter().enumerate() {
        for mut tail in sub_tuples(&t[i + 1..], k - 1) {
            let mut v = vec![first];
            v.append(&mut tail);
            out.push(v);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Vector fields
// ---------------------------------------------------------------------------

/// A vector field written on the coordinate frame (∂x, ∂p, ∂y, ∂q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub components: [Scalar; 4],
}

impl VectorField {
    pub fn new(components: [Scalar; 4]) -> VectorField {
        VectorField { components }
    }

    pub fn zero(ctx: &Arc<VariableContext>) -> VectorField {
        VectorField::new(std::array::from_fn(|_| Scalar::zero(ctx)))
    }

    pub fn basis(ctx: &Arc<VariableContext>, a: usize) -> VectorField {
        let mut f = VectorField::zero(ctx);
        f.components[a] = Scalar::one(ctx);
        f
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.components[0].ctx()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            self.components[i].add(&other.components[i])
        }))
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField::new(std::array::from_fn(|i| {
            self.components[i].sub(&other.components[i])
        }))
    }

    pub fn neg(&self) -> VectorField {
        VectorField::new(std::array::from_fn(|i| self.components[i].neg()))
    }

    pub fn scale(&self, f: &Scalar) -> VectorField {
        VectorField::new(std::array::from_fn(|i| self.components[i].mul(f)))
    }

    /// Directional derivative X(f).
    pub fn apply(&self, f: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.ctx());
        for a in 0..4 {
            if !self.components[a].is_zero() {
                acc = acc.add(&self.components[a].mul(&f.derive(a)));
            }
        }
        acc
    }
}

/// Lie bracket [X, Y] componentwise: [X,Y]ⁱ = Σ_a (Xᵃ ∂ₐYⁱ − Yᵃ ∂ₐXⁱ).
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField::new(std::array::from_fn(|i| {
        x.apply(&y.components[i]).sub(&y.apply(&x.components[i]))
    }))
}

// ---------------------------------------------------------------------------
// K-forms
// ---------------------------------------------------------------------------

/// A differential k-form; `coeffs[j]` multiplies the j-th basis monomial of
/// the degree (so a 0-form is exactly one scalar).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KForm {
    pub degree: usize,
    pub coeffs: Vec<Scalar>,
}

impl KForm {
    pub fn zero(ctx: &Arc<VariableContext>, degree: usize) -> KForm {
        KForm {
            degree,
            coeffs: vec![Scalar::zero(ctx); dim_of_degree(degree)],
        }
    }

    pub fn from_scalar(f: Scalar) -> KForm {
        KForm {
            degree: 0,
            coeffs: vec![f],
        }
    }

    /// f · (basis monomial with ascending indices `s`).
    pub fn monomial(f: Scalar, s: &[usize]) -> KForm {
        let k = s.len();
        let mut form = KForm::zero(f.ctx(), k);
        form.coeffs[subset_index(k, s)] = f;
        form
    }

    pub fn basis(ctx: &Arc<VariableContext>, s: &[usize]) -> KForm {
        KForm::monomial(Scalar::one(ctx), s)
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.coeffs[0].ctx()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_scalar(&self) -> &Scalar {
        assert_eq!(self.degree, 0, "not a 0-form");
        &self.coeffs[0]
    }

    pub fn add(&self, other: &KForm) -> KForm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        KForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &KForm) -> KForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KForm {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, f: &Scalar) -> KForm {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect(),
        }
    }

    /// Graded-commutative wedge; degrees summing past 4 give the zero 4-form.
    pub fn wedge(&self, other: &KForm) -> KForm {
        let k = self.degree + other.degree;
        if k > DIM {
            return KForm::zero(self.ctx(), DIM);
        }
        let mut out = KForm::zero(self.ctx(), k);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sa = subsets(self.degree)[i];
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let sb = subsets(other.degree)[j];
                if let Some((merged, sign)) = merge_sign(sa, sb) {
                    let idx = subset_index(k, &merged);
                    let term = a.mul(b);
                    let term = if sign < 0 { term.neg() } else { term };
                    out.coeffs[idx] = out.coeffs[idx].add(&term);
                }
            }
        }
        out
    }

    /// Exterior derivative; on a jet context the coefficient derivatives are
    /// total derivatives, so d is the horizontal differential there.
    pub fn ext_d(&self) -> KForm {
        if self.degree == DIM {
            return KForm::zero(self.ctx(), DIM);
        }
        let k = self.degree + 1;
        let mut out = KForm::zero(self.ctx(), k);
        for (i, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let s = subsets(self.degree)[i];
            for v in 0..DIM {
                if s.contains(&v) {
                    continue;
                }
                let df = f.derive(v);
                if df.is_zero() {
                    continue;
                }
                let (merged, sign) = merge_sign(&[v], s).expect("disjoint by construction");
                let idx = subset_index(k, &merged);
                let term = if sign < 0 { df.neg() } else { df };
                out.coeffs[idx] = out.coeffs[idx].add(&term);
            }
        }
        out
    }

    /// Interior product X ⌟ α. On 0-forms the result is the zero 0-form.
    pub fn insert(&self, x: &VectorField) -> KForm {
        if self.degree == 0 {
            return KForm::zero(self.ctx(), 0);
        }
        let k = self.degree - 1;
        let mut out = KForm::zero(self.ctx(), k);
        for (i, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let s = subsets(self.degree)[i];
            for (t, &j) in s.iter().enumerate() {
                if x.components[j].is_zero() {
                    continue;
                }
                let rest: Vec<usize> = s
                    .iter()
                    .copied()
                    .filter(|&w| w != j)
                    .collect();
                let idx = subset_index(k, &rest);
                let term = f.mul(&x.components[j]);
                let term = if t % 2 == 1 { term.neg() } else { term };
                out.coeffs[idx] = out.coeffs[idx].add(&term);
            }
        }
        out
    }

    /// Nested insertion of a multivector: `(X₁∧…∧X_r)⌟α = X_r⌟(…(X₁⌟α))`.
    /// Requires r ≤ k.
    pub fn insert_multi(&self, w: &MultiVector) -> KForm {
        assert!(
            w.degree <= self.degree,
            "multivector multiplicity exceeds form degree"
        );
        let ctx = self.ctx();
        let mut out = KForm::zero(ctx, self.degree - w.degree);
        for (i, c) in w.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = subsets(w.degree)[i];
            let mut tmp = self.clone();
            for &a in s.iter() {
                tmp = tmp.insert(&VectorField::basis(ctx, a));
            }
            out = out.add(&tmp.scale(c));
        }
        out
    }

    /// Value of the form on a tuple of deg-many vector fields.
    pub fn eval_on(&self, fields: &[&VectorField]) -> Scalar {
        assert_eq!(fields.len(), self.degree);
        let mut tmp = self.clone();
        for x in fields {
            tmp = tmp.insert(x);
        }
        tmp.as_scalar().clone()
    }

    /// Render as a re-parseable sum of `(coeff)*dx^dp` terms.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = subsets(self.degree)[i];
            if s.is_empty() {
                parts.push(format!("({c})"));
            } else {
                let mono: Vec<&str> = s.iter().map(|&v| COVECTOR_NAMES[v]).collect();
                parts.push(format!("({})*{}", c, mono.join("^")));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = (0..4)
            .filter(|&a| !self.components[a].is_zero())
            .map(|a| format!("({})*{}", self.components[a], FIELD_NAMES[a]))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Multivectors
// ---------------------------------------------------------------------------

/// An r-vector on the ∂-basis wedges (same subset tables as forms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVector {
    pub degree: usize,
    pub coeffs: Vec<Scalar>,
}

impl MultiVector {
    pub fn zero(ctx: &Arc<VariableContext>, degree: usize) -> MultiVector {
        MultiVector {
            degree,
            coeffs: vec![Scalar::zero(ctx); dim_of_degree(degree)],
        }
    }

    pub fn from_field(x: &VectorField) -> MultiVector {
        MultiVector {
            degree: 1,
            coeffs: x.components.to_vec(),
        }
    }

    /// X₁∧…∧X_r: the coefficient on the ascending tuple T is the minor
    /// det[Xᵢ^{T(j)}].
    pub fn from_decomposable(fields: &[VectorField]) -> MultiVector {
        let r = fields.len();
        assert!((1..=4).contains(&r));
        let ctx = fields[0].ctx().clone();
        let mut out = MultiVector::zero(&ctx, r);
        for (idx, t) in subsets(r).iter().enumerate() {
            out.coeffs[idx] = minor_det(fields, t);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &MultiVector) -> MultiVector {
        assert_eq!(self.degree, other.degree);
        MultiVector {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, f: &Scalar) -> MultiVector {
        MultiVector {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect(),
        }
    }
}

fn minor_det(fields: &[VectorField], cols: &[usize]) -> Scalar {
    let n = fields.len();
    let ctx = fields[0].ctx();
    match n {
        1 => fields[0].components[cols[0]].clone(),
        _ => {
            // Laplace expansion along the first row; n ≤ 4 keeps this cheap.
            let mut acc = Scalar::zero(ctx);
            for (j, &c) in cols.iter().enumerate() {
                let e = &fields[0].components[c];
                if e.is_zero() {
                    continue;
                }
                let rest_cols: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| *t != j)
                    .map(|(_, &v)| v)
                    .collect();
                let sub = minor_det(&fields[1..], &rest_cols);
                let term = e.mul(&sub);
                acc = if j % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        }
    }
}

// ---------------------------------------------------------------------------
// Vector-valued forms
// ---------------------------------------------------------------------------

/// An element of Λᵏ(M)⊗𝔇(M): one vector field per ascending basis k-tuple.
/// Degree-1 vector-valued forms are endomorphisms of the field module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorValuedForm {
    pub degree: usize,
    pub values: Vec<VectorField>,
}

impl VectorValuedForm {
    pub fn zero(ctx: &Arc<VariableContext>, degree: usize) -> VectorValuedForm {
        VectorValuedForm {
            degree,
            values: vec![VectorField::zero(ctx); dim_of_degree(degree)],
        }
    }

    pub fn identity(ctx: &Arc<VariableContext>) -> VectorValuedForm {
        VectorValuedForm {
            degree: 1,
            values: (0..4).map(|a| VectorField::basis(ctx, a)).collect(),
        }
    }

    /// α⊗X.
    pub fn tensor(alpha: &KForm, x: &VectorField) -> VectorValuedForm {
        VectorValuedForm {
            degree: alpha.degree,
            values: alpha.coeffs.iter().map(|c| x.scale(c)).collect(),
        }
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        self.values[0].ctx()
    }

    pub fn add(&self, other: &VectorValuedForm) -> VectorValuedForm {
        assert_eq!(self.degree, other.degree);
        VectorValuedForm {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorValuedForm) -> VectorValuedForm {
        assert_eq!(self.degree, other.degree);
        VectorValuedForm {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> VectorValuedForm {
        VectorValuedForm {
            degree: self.degree,
            values: self.values.iter().map(|v| v.neg()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Apply a degree-1 form as an endomorphism.
    pub fn apply1(&self, x: &VectorField) -> VectorField {
        assert_eq!(self.degree, 1);
        let mut acc = VectorField::zero(self.ctx());
        for a in 0..4 {
            if !x.components[a].is_zero() {
                acc = acc.add(&self.values[a].scale(&x.components[a]));
            }
        }
        acc
    }

    /// Compose two endomorphisms: (self ∘ other)(X) = self(other(X)).
    pub fn compose(&self, other: &VectorValuedForm) -> VectorValuedForm {
        assert_eq!(self.degree, 1);
        assert_eq!(other.degree, 1);
        VectorValuedForm {
            degree: 1,
            values: other.values.iter().map(|v| self.apply1(v)).collect(),
        }
    }

    /// Value on a tuple of deg-many fields (alternating multilinear
    /// extension of the stored basis values).
    pub fn eval_on(&self, fields: &[&VectorField]) -> VectorField {
        assert_eq!(fields.len(), self.degree);
        let ctx = self.ctx();
        if self.degree == 0 {
            return self.values[0].clone();
        }
        let owned: Vec<VectorField> = fields.iter().map(|f| (*f).clone()).collect();
        let mv = MultiVector::from_decomposable(&owned);
        let mut acc = VectorField::zero(ctx);
        for (i, c) in mv.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&self.values[i].scale(c));
            }
        }
        acc
    }

    /// Insertion ω⌟β over shuffle permutations:
    /// (ω⌟β)(X₁,…,X_{k+r−1}) = Σ_σ (−1)^{|σ|} β(ω(X_{σ(1)},…,X_{σ(k)}), rest).
    /// Degrees summing past 4 (after the −1) give the zero 4-form.
    pub fn insert_into(&self, beta: &KForm) -> KForm {
        let ctx = self.ctx();
        let k = self.degree;
        if beta.degree == 0 {
            // No slot of β can absorb the vector value.
            return KForm::zero(ctx, k.saturating_sub(1));
        }
        let out_deg = k + beta.degree - 1;
        if out_deg > DIM {
            return KForm::zero(ctx, DIM);
        }
        let mut out = KForm::zero(ctx, out_deg);
        for (ti, t) in subsets(out_deg).iter().enumerate() {
            let mut acc = Scalar::zero(ctx);
            for s in sub_tuples(t, k) {
                let rest = complement(t, &s);
                let sign = shuffle_sign(&s, &rest);
                let w = &self.values[subset_index(k, &s)];
                // β(ω(S), rest) = coefficient of (W ⌟ β) at the tuple `rest`.
                let inserted = beta.insert(w);
                let v = inserted.coeffs[subset_index(inserted.degree, &rest)].clone();
                acc = if sign < 0 { acc.sub(&v) } else { acc.add(&v) };
            }
            out.coeffs[ti] = acc;
        }
        out
    }
}

/// Cartan formula ℒ_X = X⌟d + d∘(X⌟·).
pub fn lie_derivative(x: &VectorField, alpha: &KForm) -> KForm {
    alpha.ext_d().insert(x).add(&alpha.insert(x).ext_d())
}
