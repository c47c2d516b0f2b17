//! Sparse multivariate polynomials over the exact rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Mono`] exponent keys under the
//! graded lexicographic order. Zero coefficients are never stored, so two
//! polynomials are equal iff their term maps are equal.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::collections::BTreeMap;

pub type Coeff = BigRational;

/// A monomial key ordered by total degree first, then lexicographically on
/// the exponent vector (graded lex). The graded comparison keeps division
/// and gcd remainders inside a finite degree-bounded monomial set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Mono {
    total: u32,
    exps: Vec<u32>,
}

impl Mono {
    pub fn from_exps(exps: Vec<u32>) -> Mono {
        let total = exps.iter().sum();
        Mono { total, exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono {
            total: self.total + other.total,
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, Coeff>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Coeff) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Mono::from_exps(vec![0; nvars]), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Coeff::one())
    }

    pub fn from_int(nvars: usize, n: i64) -> Self {
        Poly::constant(nvars, Coeff::from(BigInt::from(n)))
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(Mono::from_exps(exps), Coeff::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Vec<u32>, Coeff)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(Mono::from_exps(m), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().total == 0)
    }

    pub fn constant_value(&self) -> Option<Coeff> {
        if self.is_zero() {
            Some(Coeff::zero())
        } else if self.is_constant() {
            Some(self.terms.values().next().unwrap().clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    fn add_term(&mut self, mono: Mono, c: Coeff) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(mono.exps.len(), self.nvars);
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -std::mem::replace(c, Coeff::zero());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Coordinate partial derivative with respect to variable `v` (pure
    /// power rule; chain rules for inert symbols live in the context layer).
    pub fn partial(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[v] = e - 1;
            out.add_term(
                Mono {
                    total: m.total - 1,
                    exps,
                },
                c * Coeff::from(BigInt::from(e)),
            );
        }
        out
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exps[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    seen[i] = true;
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter_map(|(i, &s)| if s { Some(i) } else { None })
            .collect()
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.exps[v] > 0)
    }

    pub fn eval(&self, point: &[Coeff]) -> Coeff {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, &e) in m.exps.iter().enumerate() {
                t *= point[i].powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Substitute 0 for variable `v` (keep only terms free of `v`).
    pub fn subst_zero(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.exps[v] == 0 {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Leading term in the graded lexicographic monomial order.
    pub fn leading_term(&self) -> Option<(&Mono, &Coeff)> {
        self.terms.iter().next_back()
    }

    /// Exact polynomial division; `None` when `divisor` does not divide self.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        debug_assert_eq!(self.nvars, divisor.nvars);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&(Coeff::one() / c)));
        }
        let (dm, dc) = divisor.leading_term().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading_term().unwrap();
            if rm.total < dm.total {
                return None;
            }
            let mut t = Vec::with_capacity(self.nvars);
            for (a, b) in rm.exps.iter().zip(dm.exps.iter()) {
                if a < b {
                    return None;
                }
                t.push(a - b);
            }
            let c = rc / &dc;
            let mut piece = Poly::zero(self.nvars);
            piece.terms.insert(
                Mono {
                    total: rm.total - dm.total,
                    exps: t,
                },
                c,
            );
            rem = rem.sub(&piece.mul(divisor));
            quo = quo.add(&piece);
        }
        Some(quo)
    }

    /// Rational content: the positive rational `c` such that `self / c` has
    /// coprime integer coefficients. Zero polynomial has content 0.
    pub fn content(&self) -> Coeff {
        if self.is_zero() {
            return Coeff::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        Coeff::new(num_gcd, den_lcm)
    }

    /// Primitive part with positive leading coefficient: integer
    /// coefficients, content 1.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_term().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&(Coeff::one() / c))
    }

    /// Multivariate GCD over the rationals, returned primitive with
    /// positive leading coefficient (so `gcd` is unique).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.primitive();
        }
        if b.is_zero() {
            return a.primitive();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one(a.nvars);
        }
        // Cheap wins before the recursive PRS.
        if a == b {
            return a.primitive();
        }
        if b.exact_div(a).is_some() {
            return a.primitive();
        }
        if a.exact_div(b).is_some() {
            return b.primitive();
        }
        let sa: Vec<usize> = a.support();
        let sb: Vec<usize> = b.support();
        let common: Vec<usize> = sa.iter().copied().filter(|v| sb.contains(v)).collect();
        if common.is_empty() {
            return Poly::one(a.nvars);
        }
        // Main variable: smallest min-degree keeps the remainder sequence short.
        let v = *common
            .iter()
            .min_by_key(|&&v| a.degree_in(v).min(b.degree_in(v)))
            .unwrap();
        let ua = UniView::new(a, v);
        let ub = UniView::new(b, v);
        let ca = ua.coeff_gcd();
        let cb = ub.coeff_gcd();
        let pa = ua.divide_coeffs(&ca);
        let pb = ub.divide_coeffs(&cb);
        let c = Poly::gcd(&ca, &cb);
        let g = primitive_prs(pa, pb, v);
        c.mul(&g).primitive()
    }
}

fn rational_to_f64(c: &Coeff) -> f64 {
    // Good enough for the floating oracles; exact kernels never call this.
    let num = c.numer();
    let den = c.denom();
    match (num.to_string().parse::<f64>(), den.to_string().parse::<f64>()) {
        (Ok(n), Ok(d)) => n / d,
        _ => f64::NAN,
    }
}

pub fn coeff_to_f64(c: &Coeff) -> f64 {
    rational_to_f64(c)
}

/// Dense univariate view of a multivariate polynomial in one chosen
/// variable; coefficients are polynomials in the remaining variables.
struct UniView {
    v: usize,
    coeffs: Vec<Poly>, // index = exponent of v; coefficients have exp_v = 0
}

impl UniView {
    fn new(p: &Poly, v: usize) -> Self {
        let deg = p.degree_in(v) as usize;
        let mut coeffs = vec![Poly::zero(p.nvars); deg + 1];
        for (m, c) in &p.terms {
            let e = m.exps[v] as usize;
            let mut exps = m.exps.clone();
            exps[v] = 0;
            coeffs[e].add_term(
                Mono {
                    total: m.total - e as u32,
                    exps,
                },
                c.clone(),
            );
        }
        UniView { v, coeffs }
    }

    fn from_coeffs(v: usize, mut coeffs: Vec<Poly>) -> Self {
        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            coeffs.pop();
        }
        UniView { v, coeffs }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn leading(&self) -> &Poly {
        self.coeffs.last().unwrap()
    }

    fn to_poly(&self) -> Poly {
        let nvars = self.coeffs[0].nvars;
        let mut out = Poly::zero(nvars);
        for (e, c) in self.coeffs.iter().enumerate() {
            for (m, q) in &c.terms {
                let mut exps = m.exps.clone();
                exps[self.v] = e as u32;
                out.add_term(
                    Mono {
                        total: m.total + e as u32,
                        exps,
                    },
                    q.clone(),
                );
            }
        }
        out
    }

    fn coeff_gcd(&self) -> Poly {
        let nvars = self.coeffs[0].nvars;
        let mut g = Poly::zero(nvars);
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            g = Poly::gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn divide_coeffs(&self, d: &Poly) -> UniView {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                if c.is_zero() {
                    c.clone()
                } else {
                    c.exact_div(d).expect("coefficient gcd must divide")
                }
            })
            .collect();
        UniView::from_coeffs(self.v, coeffs)
    }

    fn primitive_part(&self) -> UniView {
        let g = self.coeff_gcd();
        if g.is_zero() || g.is_one() {
            UniView::from_coeffs(self.v, self.coeffs.clone())
        } else {
            self.divide_coeffs(&g)
        }
    }
}

/// Pseudo-remainder of `f` by `g` in the main variable.
fn pseudo_rem(f: &UniView, g: &UniView) -> UniView {
    let nvars = f.coeffs[0].nvars;
    let v = f.v;
    let dg = g.degree();
    let lg = g.leading().clone();
    let mut r: Vec<Poly> = f.coeffs.clone();
    loop {
        let mut dr = r.len() - 1;
        while dr > 0 && r[dr].is_zero() {
            r.pop();
            dr -= 1;
        }
        if r.iter().all(|c| c.is_zero()) || dr < dg {
            return UniView::from_coeffs(v, r);
        }
        let lr = r[dr].clone();
        // r := lg*r - lr * x^(dr-dg) * g
        let mut out = vec![Poly::zero(nvars); dr + 1];
        for (e, c) in r.iter().enumerate() {
            out[e] = c.mul(&lg);
        }
        for (e, c) in g.coeffs.iter().enumerate() {
            let idx = e + dr - dg;
            out[idx] = out[idx].sub(&c.mul(&lr));
        }
        r = out;
        debug_assert!(r.last().unwrap().is_zero());
        r.pop();
        if r.is_empty() {
            r.push(Poly::zero(nvars));
        }
    }
}

/// Primitive polynomial remainder sequence; inputs primitive in `v`,
/// output the primitive gcd as a flat polynomial.
fn primitive_prs(mut f: UniView, mut g: UniView, _v: usize) -> Poly {
    if f.degree() < g.degree() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if g.is_zero() {
            return f.primitive_part().to_poly();
        }
        let r = pseudo_rem(&f, &g);
        if r.is_zero() {
            return g.primitive_part().to_poly();
        }
        f = g;
        g = r.primitive_part();
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

impl Poly {
    /// Render in the expression grammar (`^` powers, explicit `*`), terms in
    /// descending monomial order. Re-parseable by the expression parser.
    pub fn format(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.total == 0 {
                if abs.denom().is_one() {
                    factors.push(abs.numer().to_string());
                } else {
                    factors.push(format!("{}/{}", abs.numer(), abs.denom()));
                }
            }
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 1 {
                    factors.push(names[v].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", names[v], e));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Coeff {
        Coeff::from(BigInt::from(n))
    }

    fn x() -> Poly {
        Poly::var(3, 0)
    }
    fn y() -> Poly {
        Poly::var(3, 1)
    }
    fn z() -> Poly {
        Poly::var(3, 2)
    }

    #[test]
    fn arithmetic_basics() {
        let p = x().mul(&y()).add(&Poly::one(3)); // xy + 1
        let q = p.mul(&p); // (xy+1)^2 = x^2y^2 + 2xy + 1
        assert_eq!(q.num_terms(), 3);
        assert_eq!(q.partial(0), x().mul(&y().pow(2)).scale(&c(2)).add(&y().scale(&c(2))));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn exact_division() {
        let p = x().add(&y()); // x+y
        let q = x().sub(&y()); // x-y
        let prod = p.mul(&q);
        assert_eq!(prod.exact_div(&p).unwrap(), q);
        assert_eq!(prod.exact_div(&q).unwrap(), p);
        assert!(prod.exact_div(&z()).is_none());
        assert!(x().pow(2).add(&Poly::one(3)).exact_div(&p).is_none());
    }

    #[test]
    fn gcd_multivariate() {
        let g = x().mul(&y()).add(&Poly::one(3)); // xy + 1
        let a = g.mul(&x().add(&z())); // (xy+1)(x+z)
        let b = g.mul(&y().sub(&z()).pow(2)); // (xy+1)(y-z)^2
        assert_eq!(Poly::gcd(&a, &b), g.primitive());
        // coprime
        let p = x().add(&Poly::one(3));
        let q = y().add(&Poly::one(3));
        assert!(Poly::gcd(&p, &q).is_one());
        // powers of a shared factor
        let d = g.pow(3);
        let n = g.pow(2).mul(&x());
        assert_eq!(Poly::gcd(&n, &d), g.pow(2).primitive());
    }

    #[test]
    fn gcd_with_contents() {
        // 2x(y+1) and 4x^2(y+1)^2 -> x(y+1) up to units, primitive
        let a = x().mul(&y().add(&Poly::one(3))).scale(&c(2));
        let b = x()
            .pow(2)
            .mul(&y().add(&Poly::one(3)).pow(2))
            .scale(&c(4));
        let g = Poly::gcd(&a, &b);
        assert_eq!(g, x().mul(&y().add(&Poly::one(3))));
    }

    #[test]
    fn eval_and_subst() {
        let p = x().mul(&y()).add(&Poly::one(3));
        let v = p.eval(&[c(1), c(2), c(7)]);
        assert_eq!(v, c(3));
        assert_eq!(p.subst_zero(0), Poly::one(3));
    }

    #[test]
    fn format_round_values() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let p = x().mul(&y()).scale(&c(-2)).add(&Poly::one(3));
        assert_eq!(p.format(&names), "-2*x*y + 1");
    }
}
