//! Exact scalar arithmetic: normalized rational functions in the chart
//! variables x, p, y, q, optionally extended by one adjoined square root
//! `sqrt(Δ)` and by formal symbols (jet coordinates, inert exponentials,
//! function symbols with formal partial derivatives).
//!
//! Every value is kept in normal form (gcd-reduced fraction, denominator an
//! integer-primitive polynomial with positive leading coefficient), so
//! equality is componentwise structural equality and `is_zero` is exact.

use crate::poly::{coeff_to_f64, Coeff, Poly};

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// Indices of the base chart variables. The order (x, p, y, q) fixes the
/// monomial order and the orientation of every basis table downstream.
pub const VAR_X: usize = 0;
pub const VAR_P: usize = 1;
pub const VAR_Y: usize = 2;
pub const VAR_Q: usize = 3;
pub const BASE_NAMES: [&str; 4] = ["x", "p", "y", "q"];

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarError {
    DivisionByZero,
    DenominatorVanishes,
    RadicalNotEvaluable,
    UnknownVariable(String),
    ContextMismatch,
    NestedRadical,
    JetOrderExceeded(String),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::DivisionByZero => write!(f, "division by an identically zero scalar"),
            ScalarError::DenominatorVanishes => write!(f, "denominator vanishes at the point"),
            ScalarError::RadicalNotEvaluable => {
                write!(f, "radicand has no exact rational square root at the point")
            }
            ScalarError::UnknownVariable(n) => write!(f, "unknown variable `{n}`"),
            ScalarError::ContextMismatch => write!(f, "scalars belong to different contexts"),
            ScalarError::NestedRadical => {
                write!(f, "only one square root may be adjoined per context")
            }
            ScalarError::JetOrderExceeded(n) => {
                write!(f, "derivative of `{n}` exceeds the stored jet order")
            }
        }
    }
}

impl std::error::Error for ScalarError {}

// ---------------------------------------------------------------------------
// Variable context
// ---------------------------------------------------------------------------

/// How a symbol responds to the four base derivations ∂x, ∂p, ∂y, ∂q.
#[derive(Clone, Debug)]
enum ChainRule {
    /// Base variable: derivative is the Kronecker delta.
    Delta(usize),
    /// Independent coordinate: all base derivatives vanish.
    Constant,
    /// Derivative along direction `a` is the variable `table[a]` (jet chains,
    /// function symbols).
    Vars([Option<usize>; 4]),
    /// Derivative along direction `a` is the polynomial (inert exponential).
    Polys(Box<[Option<Poly>; 4]>),
    /// Differentiating this symbol is not supported (top stored jet order).
    Overflow,
}

/// Layout of the 60 jet coordinates of J²(γ) inside the variable table.
#[derive(Clone, Debug)]
pub struct JetLayout {
    /// `fiber[i]` = index of uⁱ⁺¹.
    pub fiber: [usize; 4],
    /// `first[i][a]` = index of uⁱ⁺¹ differentiated along base direction a.
    pub first: [[usize; 4]; 4],
    /// `second[i][pair]` = index of the symmetric second jet, with `pair`
    /// ranging over the 10 sorted index pairs (see [`second_pair_index`]).
    pub second: [[usize; 10]; 4],
}

/// Position of the sorted pair (a, b), a ≤ b, among the 10 symmetric pairs.
pub fn second_pair_index(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    // pairs in order: (0,0)(0,1)(0,2)(0,3)(1,1)(1,2)(1,3)(2,2)(2,3)(3,3)
    let offset = [0usize, 4, 7, 9];
    offset[a] + (b - a)
}

pub const SECOND_PAIRS: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

#[derive(Debug)]
pub struct VariableContext {
    names: Vec<String>,
    chains: Vec<ChainRule>,
    radicand: Option<Rat>,
    jet: Option<JetLayout>,
}

impl VariableContext {
    /// The plain chart context on (x, p, y, q).
    pub fn base() -> Arc<VariableContext> {
        ContextBuilder::new().build()
    }

    pub fn builder() -> ContextBuilder {
        ContextBuilder::new()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn jet(&self) -> Option<&JetLayout> {
        self.jet.as_ref()
    }

    pub fn has_radical(&self) -> bool {
        self.radicand.is_some()
    }

    fn radicand(&self) -> Option<&Rat> {
        self.radicand.as_ref()
    }

    /// Derivation of a polynomial along base direction `dir` (total
    /// derivative when jet symbols are active, coordinate partial otherwise).
    fn derive_poly(&self, p: &Poly, dir: usize) -> Poly {
        let n = self.nvars();
        let mut out = Poly::zero(n);
        for w in p.support() {
            let pw = p.partial(w);
            match &self.chains[w] {
                ChainRule::Delta(i) => {
                    if *i == dir {
                        out = out.add(&pw);
                    }
                }
                ChainRule::Constant => {}
                ChainRule::Vars(table) => {
                    if let Some(v) = table[dir] {
                        out = out.add(&pw.mul(&Poly::var(n, v)));
                    }
                }
                ChainRule::Polys(table) => {
                    if let Some(q) = &table[dir] {
                        out = out.add(&pw.mul(q));
                    }
                }
                ChainRule::Overflow => {
                    panic!(
                        "{}",
                        ScalarError::JetOrderExceeded(self.names[w].clone())
                    );
                }
            }
        }
        out
    }
}

fn contexts_compatible(a: &Arc<VariableContext>, b: &Arc<VariableContext>) -> bool {
    Arc::ptr_eq(a, b)
}

pub struct ContextBuilder {
    names: Vec<String>,
    chains: Vec<ChainRule>,
    jet: Option<JetLayout>,
    radicand_pending: Option<(Poly, Poly)>,
}

impl ContextBuilder {
    fn new() -> Self {
        let names: Vec<String> = BASE_NAMES.iter().map(|s| s.to_string()).collect();
        let chains = (0..4).map(ChainRule::Delta).collect();
        ContextBuilder {
            names,
            chains,
            jet: None,
            radicand_pending: None,
        }
    }

    fn push(&mut self, name: &str, chain: ChainRule) -> usize {
        assert!(
            !self.names.iter().any(|n| n == name),
            "duplicate variable `{name}`"
        );
        assert_ne!(name, "sqrt", "`sqrt` is reserved");
        self.names.push(name.to_string());
        self.chains.push(chain);
        self.names.len() - 1
    }

    /// An independent coordinate killed by all base derivations (used for
    /// the nilpotent deformation parameter in invariance tests).
    pub fn coordinate(mut self, name: &str) -> Self {
        self.push(name, ChainRule::Constant);
        self
    }

    /// An inert symbol with the derivation rule ∂x E = −E (all other base
    /// derivatives zero), standing in for exp(−x).
    pub fn inert_exponential(mut self, name: &str) -> Self {
        let idx = self.names.len();
        let mut table: [Option<Poly>; 4] = [None, None, None, None];
        // Placeholder; fixed up in build() when nvars is final.
        table[VAR_X] = Some(Poly::zero(0));
        self.push(name, ChainRule::Polys(Box::new(table)));
        // Remember index via name lookup later; nothing else needed here.
        let _ = idx;
        self
    }

    /// A function symbol of (x, p, y, q) with formal partial derivatives up
    /// to `max_order`; differentiating a top-order symbol is an error.
    pub fn function_symbol(mut self, name: &str, max_order: usize) -> Self {
        // Multi-indices ordered by total order, then lexicographically.
        let mut levels: Vec<Vec<Vec<usize>>> = vec![vec![vec![]]];
        for ord in 1..=max_order {
            let mut level = Vec::new();
            for w in &levels[ord - 1] {
                let start = *w.last().unwrap_or(&0);
                for a in start..4 {
                    let mut next = w.clone();
                    next.push(a);
                    level.push(next);
                }
            }
            levels.push(level);
        }
        let sym_name = |w: &[usize]| -> String {
            if w.is_empty() {
                name.to_string()
            } else {
                let suffix: String = w.iter().map(|&a| BASE_NAMES[a]).collect();
                format!("{name}_{suffix}")
            }
        };
        // First pass: indices.
        let base_idx = self.names.len();
        let mut order_of: Vec<(Vec<usize>, usize)> = Vec::new();
        {
            let mut idx = base_idx;
            for level in &levels {
                for w in level {
                    order_of.push((w.clone(), idx));
                    idx += 1;
                }
            }
        }
        let find = |w: &[usize]| -> usize {
            let mut key = w.to_vec();
            key.sort_unstable();
            order_of
                .iter()
                .find(|(v, _)| v == &key)
                .map(|(_, i)| *i)
                .expect("derivative symbol present")
        };
        for level in &levels {
            for w in level {
                let chain = if w.len() == max_order {
                    ChainRule::Overflow
                } else {
                    let mut table = [None; 4];
                    for (a, slot) in table.iter_mut().enumerate() {
                        let mut next = w.clone();
                        next.push(a);
                        *slot = Some(find(&next));
                    }
                    ChainRule::Vars(table)
                };
                self.push(&sym_name(w), chain);
            }
        }
        self
    }

    /// The 60 jet coordinates of J²(γ): fiber u1..u4, first jets ui_a,
    /// symmetric second jets ui_ab. Base derivations become total
    /// derivatives; differentiating a second jet is an error.
    pub fn jet2(mut self) -> Self {
        let mut fiber = [0usize; 4];
        let mut first = [[0usize; 4]; 4];
        let mut second = [[0usize; 10]; 4];
        for i in 0..4 {
            fiber[i] = self.names.len() + i;
        }
        for i in 0..4 {
            for a in 0..4 {
                first[i][a] = self.names.len() + 4 + 4 * i + a;
            }
        }
        for i in 0..4 {
            for pair in 0..10 {
                second[i][pair] = self.names.len() + 20 + 10 * i + pair;
            }
        }
        for i in 0..4 {
            let mut table = [None; 4];
            for (a, slot) in table.iter_mut().enumerate() {
                *slot = Some(first[i][a]);
            }
            self.push(&format!("u{}", i + 1), ChainRule::Vars(table));
        }
        for i in 0..4 {
            for a in 0..4 {
                let mut table = [None; 4];
                for (b, slot) in table.iter_mut().enumerate() {
                    *slot = Some(second[i][second_pair_index(a, b)]);
                }
                self.push(
                    &format!("u{}_{}", i + 1, BASE_NAMES[a]),
                    ChainRule::Vars(table),
                );
            }
        }
        for i in 0..4 {
            for &(a, b) in SECOND_PAIRS.iter() {
                self.push(
                    &format!("u{}_{}{}", i + 1, BASE_NAMES[a], BASE_NAMES[b]),
                    ChainRule::Overflow,
                );
            }
        }
        self.jet = Some(JetLayout {
            fiber,
            first,
            second,
        });
        self
    }

    /// Adjoin one square root with the given radicand (a radical-free
    /// rational function given as numerator and denominator polynomials over
    /// the final variable set, padded as needed).
    pub fn radical(mut self, num: Poly, den: Poly) -> Self {
        assert!(
            self.radicand_pending.is_none(),
            "only one radical may be adjoined"
        );
        self.radicand_pending = Some((num, den));
        self
    }

    pub fn build(self) -> Arc<VariableContext> {
        let n = self.names.len();
        let mut chains = self.chains;
        // Fix up inert-exponential placeholder polys to the final width.
        for (i, chain) in chains.iter_mut().enumerate() {
            if let ChainRule::Polys(table) = chain {
                for slot in table.iter_mut() {
                    if slot.is_some() {
                        let mut mono = vec![0u32; n];
                        mono[i] = 1;
                        *slot = Some(Poly::from_terms(
                            n,
                            vec![(mono, -Coeff::one())],
                        ));
                    }
                }
            }
        }
        let radicand = self.radicand_pending.map(|(num, den)| {
            let num = pad_poly(&num, n);
            let den = pad_poly(&den, n);
            let r = Rat::new(num, den).expect("radicand denominator must be nonzero");
            assert!(!r.is_zero(), "radicand must be nonzero");
            r
        });
        Arc::new(VariableContext {
            names: self.names,
            chains,
            radicand,
            jet: self.jet,
        })
    }
}

fn pad_poly(p: &Poly, nvars: usize) -> Poly {
    assert!(p.nvars() <= nvars);
    if p.nvars() == nvars {
        return p.clone();
    }
    let terms = p
        .terms()
        .map(|(m, c)| {
            let mut exps = m.exps().to_vec();
            exps.resize(nvars, 0);
            (exps, c.clone())
        })
        .collect();
    Poly::from_terms(nvars, terms)
}

// ---------------------------------------------------------------------------
// Normalized fractions
// ---------------------------------------------------------------------------

/// A gcd-reduced fraction of polynomials. Denominator is integer-primitive
/// with positive leading coefficient; the zero value is 0/1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rat {
    num: Poly,
    den: Poly,
}

impl Rat {
    pub fn poly(p: Poly) -> Rat {
        let n = p.nvars();
        Rat {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Rat {
        Rat::poly(Poly::zero(nvars))
    }

    pub fn new(num: Poly, den: Poly) -> Result<Rat, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Rat::zero(num.nvars()));
        }
        if let Some(c) = den.constant_value() {
            return Ok(Rat::poly(num.scale(&(Coeff::one() / c))));
        }
        if let Some(q) = num.exact_div(&den) {
            return Ok(Rat::poly(q));
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Rat::from_reduced(num, den))
    }

    /// Unit-normalize a fraction already known to be reduced.
    fn from_reduced(num: Poly, den: Poly) -> Rat {
        if num.is_zero() {
            return Rat::zero(num.nvars());
        }
        if let Some(c) = den.constant_value() {
            return Rat::poly(num.scale(&(Coeff::one() / c)));
        }
        let mut c = den.content();
        if den.leading_term().unwrap().1.is_negative() {
            c = -c;
        }
        let inv = Coeff::one() / c;
        Rat {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &Rat) -> Rat {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if num.is_zero() {
                return Rat::zero(num.nvars());
            }
            // Cancellation can only involve the common denominator.
            let g = Poly::gcd(&num, &self.den);
            if g.is_one() {
                return Rat::from_reduced(num, self.den.clone());
            }
            return Rat::from_reduced(
                num.exact_div(&g).unwrap(),
                self.den.exact_div(&g).unwrap(),
            );
        }
        let g = Poly::gcd(&self.den, &other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            Rat::from_reduced(num, self.den.mul(&other.den))
        } else {
            let da = self.den.exact_div(&g).unwrap();
            let db = other.den.exact_div(&g).unwrap();
            let num = self.num.mul(&db).add(&other.num.mul(&da));
            let h = Poly::gcd(&num, &g);
            let den = self.den.mul(&db);
            if h.is_one() {
                Rat::from_reduced(num, den)
            } else {
                Rat::from_reduced(num.exact_div(&h).unwrap(), den.exact_div(&h).unwrap())
            }
        }
    }

    pub fn neg(&self) -> Rat {
        Rat {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Rat) -> Rat {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Rat) -> Rat {
        if self.is_zero() || other.is_zero() {
            return Rat::zero(self.num.nvars());
        }
        let g1 = Poly::gcd(&self.num, &other.den);
        let g2 = Poly::gcd(&other.num, &self.den);
        let n1 = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.exact_div(&g1).unwrap()
        };
        let d2 = if g1.is_one() {
            other.den.clone()
        } else {
            other.den.exact_div(&g1).unwrap()
        };
        let n2 = if g2.is_one() {
            other.num.clone()
        } else {
            other.num.exact_div(&g2).unwrap()
        };
        let d1 = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.exact_div(&g2).unwrap()
        };
        Rat::from_reduced(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn inv(&self) -> Result<Rat, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rat::from_reduced(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Rat) -> Result<Rat, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Quotient rule for an arbitrary derivation of the polynomial ring.
    pub fn diff(&self, d: &mut dyn FnMut(&Poly) -> Poly) -> Rat {
        let dn = d(&self.num);
        if self.is_poly() {
            return Rat::poly(dn);
        }
        let dd = d(&self.den);
        if dd.is_zero() {
            return Rat::new(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        Rat::new(num, den).expect("nonzero denominator")
    }

    pub fn eval(&self, point: &[Coeff]) -> Result<Coeff, ScalarError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.is_poly() {
            self.num.format(names)
        } else {
            format!("({})/({})", self.num.format(names), self.den.format(names))
        }
    }
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// An element of the coefficient field: `base + rad·sqrt(Δ)` with `base`,
/// `rad` reduced fractions and Δ the context's registered radicand. Values
/// are immutable and safe to share across threads.
#[derive(Clone, Debug)]
pub struct Scalar {
    ctx: Arc<VariableContext>,
    base: Rat,
    rad: Option<Rat>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        assert!(
            contexts_compatible(&self.ctx, &other.ctx),
            "{}",
            ScalarError::ContextMismatch
        );
        self.base == other.base
            && self.rad.as_ref().unwrap_or(&Rat::zero(self.ctx.nvars()))
                == other.rad.as_ref().unwrap_or(&Rat::zero(self.ctx.nvars()))
    }
}

impl Eq for Scalar {}

impl Scalar {
    fn make(ctx: Arc<VariableContext>, base: Rat, rad: Option<Rat>) -> Scalar {
        let rad = match rad {
            Some(r) if r.is_zero() => None,
            other => other,
        };
        if rad.is_some() {
            assert!(ctx.has_radical(), "radical part without a registered radicand");
        }
        Scalar { ctx, base, rad }
    }

    pub fn from_rat(ctx: &Arc<VariableContext>, base: Rat) -> Scalar {
        Scalar::make(ctx.clone(), base, None)
    }

    pub fn from_poly(ctx: &Arc<VariableContext>, p: Poly) -> Scalar {
        Scalar::from_rat(ctx, Rat::poly(pad_poly(&p, ctx.nvars())))
    }

    pub fn zero(ctx: &Arc<VariableContext>) -> Scalar {
        Scalar::from_rat(ctx, Rat::zero(ctx.nvars()))
    }

    pub fn one(ctx: &Arc<VariableContext>) -> Scalar {
        Scalar::from_poly(ctx, Poly::one(ctx.nvars()))
    }

    pub fn int(ctx: &Arc<VariableContext>, n: i64) -> Scalar {
        Scalar::from_poly(ctx, Poly::from_int(ctx.nvars(), n))
    }

    pub fn rational(ctx: &Arc<VariableContext>, q: Coeff) -> Scalar {
        Scalar::from_poly(ctx, Poly::constant(ctx.nvars(), q))
    }

    pub fn var(ctx: &Arc<VariableContext>, index: usize) -> Scalar {
        Scalar::from_poly(ctx, Poly::var(ctx.nvars(), index))
    }

    pub fn var_named(ctx: &Arc<VariableContext>, name: &str) -> Result<Scalar, ScalarError> {
        let i = ctx
            .var_index(name)
            .ok_or_else(|| ScalarError::UnknownVariable(name.to_string()))?;
        Ok(Scalar::var(ctx, i))
    }

    /// The adjoined square root `sqrt(Δ)` itself.
    pub fn radical(ctx: &Arc<VariableContext>) -> Result<Scalar, ScalarError> {
        if !ctx.has_radical() {
            return Err(ScalarError::NestedRadical);
        }
        let one = Rat::poly(Poly::one(ctx.nvars()));
        Ok(Scalar::make(ctx.clone(), Rat::zero(ctx.nvars()), Some(one)))
    }

    pub fn ctx(&self) -> &Arc<VariableContext> {
        &self.ctx
    }

    pub fn base_part(&self) -> &Rat {
        &self.base
    }

    pub fn radical_part(&self) -> Option<&Rat> {
        self.rad.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.rad.is_none()
    }

    pub fn is_radical_free(&self) -> bool {
        self.rad.is_none()
    }

    pub fn is_constant(&self) -> bool {
        self.rad.is_none() && self.base.is_poly() && self.base.num().is_constant()
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        if self.rad.is_some() || !self.base.is_poly() {
            return None;
        }
        self.base.num().constant_value()
    }

    fn check_ctx(&self, other: &Scalar) {
        assert!(
            contexts_compatible(&self.ctx, &other.ctx),
            "{}",
            ScalarError::ContextMismatch
        );
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        self.check_ctx(other);
        let rad = match (&self.rad, &other.rad) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(a.add(b)),
        };
        Scalar::make(self.ctx.clone(), self.base.add(&other.base), rad)
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar::make(
            self.ctx.clone(),
            self.base.neg(),
            self.rad.as_ref().map(|r| r.neg()),
        )
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        self.check_ctx(other);
        let base = self.base.mul(&other.base);
        match (&self.rad, &other.rad) {
            (None, None) => Scalar::make(self.ctx.clone(), base, None),
            (Some(a), None) => Scalar::make(self.ctx.clone(), base, Some(a.mul(&other.base))),
            (None, Some(b)) => Scalar::make(self.ctx.clone(), base, Some(b.mul(&self.base))),
            (Some(a), Some(b)) => {
                let delta = self.ctx.radicand().expect("radical part implies radicand");
                let base = base.add(&a.mul(b).mul(delta));
                let rad = self.base.mul(b).add(&a.mul(&other.base));
                Scalar::make(self.ctx.clone(), base, Some(rad))
            }
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match &self.rad {
            None => Ok(Scalar::make(self.ctx.clone(), self.base.inv()?, None)),
            Some(b) => {
                // 1/(a + b s) = (a - b s)/(a² - b²Δ)
                let delta = self.ctx.radicand().expect("radicand registered");
                let norm = self.base.mul(&self.base).sub(&b.mul(b).mul(delta));
                let ninv = norm.inv()?;
                Ok(Scalar::make(
                    self.ctx.clone(),
                    self.base.mul(&ninv),
                    Some(b.neg().mul(&ninv)),
                ))
            }
        }
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Scalar::one(&self.ctx);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Common derivative core: `d` is a derivation of the polynomial ring.
    fn diff_with(&self, d: &mut dyn FnMut(&Poly) -> Poly) -> Scalar {
        let base = self.base.diff(d);
        let rad = match &self.rad {
            None => None,
            Some(b) => {
                let delta = self.ctx.radicand().expect("radicand registered").clone();
                let db = b.diff(d);
                let ddelta = delta.diff(d);
                if ddelta.is_zero() {
                    Some(db)
                } else {
                    // b' + b·Δ'/(2Δ)
                    let two = Rat::poly(Poly::from_int(self.ctx.nvars(), 2));
                    let corr = b
                        .mul(&ddelta)
                        .div(&two.mul(&delta))
                        .expect("radicand is nonzero");
                    Some(db.add(&corr))
                }
            }
        };
        Scalar::make(self.ctx.clone(), base, rad)
    }

    /// Coordinate partial derivative with respect to any context variable.
    pub fn partial(&self, v: usize) -> Scalar {
        assert!(v < self.ctx.nvars(), "variable index out of range");
        self.diff_with(&mut |p| p.partial(v))
    }

    pub fn partial_named(&self, name: &str) -> Result<Scalar, ScalarError> {
        let v = self
            .ctx
            .var_index(name)
            .ok_or_else(|| ScalarError::UnknownVariable(name.to_string()))?;
        Ok(self.partial(v))
    }

    /// Derivation along base direction `dir` ∈ {x, p, y, q}: the plain
    /// partial on a base context, the total derivative on a jet context,
    /// with inert-symbol chain rules applied.
    pub fn derive(&self, dir: usize) -> Scalar {
        assert!(dir < 4, "base direction out of range");
        let ctx = self.ctx.clone();
        self.diff_with(&mut |p| ctx.derive_poly(p, dir))
    }

    pub fn eval(&self, point: &[Coeff]) -> Result<Coeff, ScalarError> {
        let b = self.base.eval(point)?;
        match &self.rad {
            None => Ok(b),
            Some(r) => {
                let delta = self.ctx.radicand().expect("radicand registered");
                let dval = delta.eval(point)?;
                let root = exact_sqrt(&dval).ok_or(ScalarError::RadicalNotEvaluable)?;
                Ok(b + r.eval(point)? * root)
            }
        }
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let b = self.base.eval_f64(point);
        match &self.rad {
            None => b,
            Some(r) => {
                let delta = self.ctx.radicand().expect("radicand registered");
                b + r.eval_f64(point) * delta.eval_f64(point).sqrt()
            }
        }
    }

    /// Substitute 0 for variable `v` in both components.
    pub fn subst_zero(&self, v: usize) -> Result<Scalar, ScalarError> {
        let subst = |r: &Rat| -> Result<Rat, ScalarError> {
            let num = r.num().subst_zero(v);
            let den = r.den().subst_zero(v);
            Rat::new(num, den)
        };
        let base = subst(&self.base)?;
        let rad = match &self.rad {
            None => None,
            Some(r) => Some(subst(r)?),
        };
        Ok(Scalar::make(self.ctx.clone(), base, rad))
    }

    /// Evaluate the (radical-free) scalar with scalar values substituted for
    /// every variable; `values[i]` replaces variable `i`. All values must
    /// share one target context.
    pub fn eval_scalars(&self, values: &[Scalar]) -> Result<Scalar, ScalarError> {
        if self.rad.is_some() {
            return Err(ScalarError::NestedRadical);
        }
        assert_eq!(values.len(), self.ctx.nvars());
        let tgt = values[0].ctx().clone();
        let eval_poly = |p: &Poly| -> Scalar {
            let mut acc = Scalar::zero(&tgt);
            for (m, c) in p.terms() {
                let mut t = Scalar::rational(&tgt, c.clone());
                for (i, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        t = t.mul(&values[i].pow(e));
                    }
                }
                acc = acc.add(&t);
            }
            acc
        };
        let n = eval_poly(self.base.num());
        let d = eval_poly(self.base.den());
        n.try_div(&d)
    }

    /// Reinterpret over a wider context whose variable list starts with this
    /// context's variables.
    pub fn extend(&self, target: &Arc<VariableContext>) -> Result<Scalar, ScalarError> {
        let here = self.ctx.names();
        let there = target.names();
        if there.len() < here.len() || &there[..here.len()] != here {
            return Err(ScalarError::ContextMismatch);
        }
        let widen = |r: &Rat| {
            Rat::new(pad_poly(r.num(), target.nvars()), pad_poly(r.den(), target.nvars()))
                .expect("denominator stays nonzero")
        };
        Ok(Scalar::make(
            target.clone(),
            widen(&self.base),
            self.rad.as_ref().map(widen),
        ))
    }
}

/// Exact square root of a nonnegative rational, if one exists.
pub fn exact_sqrt(q: &Coeff) -> Option<Coeff> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some(Coeff::zero());
    }
    let n = q.numer();
    let d = q.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Coeff::new(rn, rd.clone()))
    } else {
        None
    }
}

// Operator sugar; division panics on an identically zero divisor, which the
// kernel code never relies on (it uses try_div and reports errors).
impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::add(self, rhs)
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::sub(self, rhs)
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::mul(self, rhs)
    }
}

impl std::ops::Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.try_div(rhs).expect("division by an identically zero scalar")
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.ctx.names();
        match &self.rad {
            None => write!(f, "{}", self.base.format(names)),
            Some(r) => {
                let delta = self.ctx.radicand().expect("radicand registered");
                let root = format!("sqrt({})", delta.format(names));
                if self.base.is_zero() {
                    write!(f, "({})*{}", r.format(names), root)
                } else {
                    write!(f, "{} + ({})*{}", self.base.format(names), r.format(names), root)
                }
            }
        }
    }
}

/// Numeric value of a rational as f64 (floating oracles only).
pub fn coeff_f64(c: &Coeff) -> f64 {
    coeff_to_f64(c)
}

pub type Rational = BigRational;
pub type Integer = BigInt;

pub fn rat_int(n: i64) -> Coeff {
    Coeff::from(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Coeff {
    Coeff::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_fractions() {
        let ctx = VariableContext::base();
        let x = Scalar::var(&ctx, VAR_X);
        let p = Scalar::var(&ctx, VAR_P);
        // (x² - p²)/(x - p) reduces to x + p
        let num = &(&x * &x) - &(&p * &p);
        let den = &x - &p;
        let q = num.try_div(&den).unwrap();
        assert_eq!(q, &x + &p);
        assert!((&q - &q).is_zero());
    }

    #[test]
    fn partials_commute() {
        let ctx = VariableContext::base();
        let x = Scalar::var(&ctx, VAR_X);
        let q = Scalar::var(&ctx, VAR_Q);
        let f = (&(&x * &q) + &Scalar::one(&ctx))
            .try_div(&(&q + &Scalar::int(&ctx, 1)))
            .unwrap();
        let a = f.partial(VAR_X).partial(VAR_Q);
        let b = f.partial(VAR_Q).partial(VAR_X);
        assert_eq!(a, b);
    }

    #[test]
    fn radical_square_rewrites() {
        let ctx = VariableContext::builder()
            .radical(Poly::var(4, VAR_X), Poly::one(4))
            .build();
        let s = Scalar::radical(&ctx).unwrap();
        let x = Scalar::var(&ctx, VAR_X);
        assert_eq!(&s * &s, x);
        // ∂x(s) = s/(2x)
        let ds = s.partial(VAR_X);
        let expected = s
            .try_div(&(&Scalar::int(&ctx, 2) * &x))
            .unwrap();
        assert_eq!(ds, expected);
        // a + b·s is zero iff both parts vanish
        assert!(!(&s - &x).is_zero());
        assert!((&(&s * &s) - &x).is_zero());
    }

    #[test]
    fn radical_inverse() {
        let ctx = VariableContext::builder()
            .radical(Poly::var(4, VAR_X), Poly::one(4))
            .build();
        let s = Scalar::radical(&ctx).unwrap();
        let one = Scalar::one(&ctx);
        let e = &one + &s;
        let inv = e.inv().unwrap();
        assert_eq!(&e * &inv, one);
    }

    #[test]
    fn inert_exponential_rule() {
        let ctx = VariableContext::builder().inert_exponential("E").build();
        let e = Scalar::var_named(&ctx, "E").unwrap();
        // ∂x(E²) = -2E² under the chain rule; ∂p(E) = 0
        let e2 = &e * &e;
        assert_eq!(e2.derive(VAR_X), (&Scalar::int(&ctx, -2) * &e2));
        assert!(e.derive(VAR_P).is_zero());
    }

    #[test]
    fn function_symbol_partials() {
        let ctx = VariableContext::builder().function_symbol("D", 3).build();
        let d = Scalar::var_named(&ctx, "D").unwrap();
        let d_p = d.derive(VAR_P);
        assert_eq!(d_p, Scalar::var_named(&ctx, "D_p").unwrap());
        let d_pq = d_p.derive(VAR_Q);
        assert_eq!(d_pq, Scalar::var_named(&ctx, "D_pq").unwrap());
        // symmetric order of suffixes
        assert_eq!(d.derive(VAR_Q).derive(VAR_P), d_pq);
    }

    #[test]
    fn jet_total_derivatives() {
        let ctx = VariableContext::builder().jet2().build();
        let layout = ctx.jet().unwrap().clone();
        let u1 = Scalar::var(&ctx, layout.fiber[0]);
        let du1 = u1.derive(VAR_X);
        assert_eq!(du1, Scalar::var(&ctx, layout.first[0][VAR_X]));
        // D_p D_x u1 = u1_xp = D_x D_p u1
        let a = u1.derive(VAR_X).derive(VAR_P);
        let b = u1.derive(VAR_P).derive(VAR_X);
        assert_eq!(a, b);
        assert_eq!(
            a,
            Scalar::var(&ctx, layout.second[0][second_pair_index(VAR_X, VAR_P)])
        );
    }

    #[test]
    fn eval_with_radical() {
        let ctx = VariableContext::builder()
            .radical(Poly::var(4, VAR_X), Poly::one(4))
            .build();
        let s = Scalar::radical(&ctx).unwrap();
        let point = [rat_int(4), rat_int(0), rat_int(0), rat_int(0)];
        assert_eq!(s.eval(&point).unwrap(), rat_int(2));
        let bad = [rat_int(2), rat_int(0), rat_int(0), rat_int(0)];
        assert_eq!(s.eval(&bad), Err(ScalarError::RadicalNotEvaluable));
    }
}
