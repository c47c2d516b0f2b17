//! Second-order jet computations on the Grassmannian bundle of tangent
//! 2-planes: the generic plane chart, the seven invariants as exact rational
//! functions of jet coordinates, natural lifts of Hamiltonian fields with
//! their second prolongation, and the two rank computations (functional
//! independence at a point, orbit codimension of the lifted action).
//!
//! The chart writes a plane transverse to the (p, q)-directions as
//! ⟨∂x + u¹∂p + u²∂q, ∂y + u³∂p + u⁴∂q⟩; J²(γ) then carries
//! 4 + 4 + 16 + 40 = 64 coordinates.

use crate::dist::{DistError, Distribution2};
use crate::exterior::VectorField;
use crate::invariants::scalar_invariants;
use crate::linalg::QMatrix;
use crate::poly::{Coeff, Poly};
use crate::scalar::{
    rat_frac, rat_int, second_pair_index, Scalar, ScalarError, VariableContext, SECOND_PAIRS,
};
use crate::symplectic::SymplecticStructure;
use num::Zero;
use rand::Rng;
use std::sync::Arc;

pub const JET_DIM: usize = 64;

/// The context carrying the 64 coordinates of J²(γ); base derivations act as
/// total derivatives.
pub fn jet_context() -> Arc<VariableContext> {
    VariableContext::builder().jet2().build()
}

/// A point of J²(γ): one exact rational per coordinate, second jets
/// symmetric by construction of the coordinate table.
#[derive(Clone, Debug)]
pub struct JetPoint {
    pub values: Vec<Coeff>,
}

impl JetPoint {
    pub fn new(values: Vec<Coeff>) -> JetPoint {
        assert_eq!(values.len(), JET_DIM);
        JetPoint { values }
    }

    pub fn zero() -> JetPoint {
        JetPoint::new(vec![Coeff::zero(); JET_DIM])
    }

    /// Uniform small rationals everywhere.
    pub fn random(rng: &mut impl Rng) -> JetPoint {
        let values = (0..JET_DIM)
            .map(|_| rat_frac(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=3)))
            .collect();
        JetPoint::new(values)
    }

    /// Zero first and second jets over a chosen fiber point (a constant
    /// 2-plane field along the zero base point).
    pub fn flat(fiber: [i64; 4]) -> JetPoint {
        let ctx = jet_context();
        let layout = ctx.jet().unwrap();
        let mut values = vec![Coeff::zero(); JET_DIM];
        for i in 0..4 {
            values[layout.fiber[i]] = rat_int(fiber[i]);
        }
        JetPoint::new(values)
    }

    /// The 2-jet of a polynomial section u = s(x, p, y, q), evaluated at a
    /// base point.
    pub fn from_section(section: &[Scalar; 4], base: [Coeff; 4]) -> Result<JetPoint, ScalarError> {
        let ctx = jet_context();
        let layout = ctx.jet().unwrap();
        let mut values = vec![Coeff::zero(); JET_DIM];
        values[..4].clone_from_slice(&base);
        for i in 0..4 {
            values[layout.fiber[i]] = section[i].eval(&base)?;
            for a in 0..4 {
                values[layout.first[i][a]] = section[i].partial(a).eval(&base)?;
            }
            for &(a, b) in SECOND_PAIRS.iter() {
                values[layout.second[i][second_pair_index(a, b)]] =
                    section[i].partial(a).partial(b).eval(&base)?;
            }
        }
        Ok(JetPoint::new(values))
    }
}

/// The tautological plane ⟨∂x + u¹∂p + u²∂q, ∂y + u³∂p + u⁴∂q⟩ over the jet
/// coefficient ring; non-Lagrangian off the locus u² = u³.
pub fn generic_distribution(
    ctx: &Arc<VariableContext>,
) -> Result<(Distribution2, SymplecticStructure), DistError> {
    let layout = ctx.jet().expect("jet context required");
    let u = |i: usize| Scalar::var(ctx, layout.fiber[i]);
    let sympl = SymplecticStructure::standard(ctx);
    let e1 = VectorField::new([
        Scalar::one(ctx),
        u(0),
        Scalar::zero(ctx),
        u(1),
    ]);
    let e2 = VectorField::new([
        Scalar::zero(ctx),
        u(2),
        Scalar::one(ctx),
        u(3),
    ]);
    let d = Distribution2::new(e1, e2, &sympl)?;
    Ok((d, sympl))
}

/// The first seven invariants of the tautological plane as exact rational
/// functions of the 60 jet symbols (base variables never occur).
pub fn invariants_as_jet_functions(
    ctx: &Arc<VariableContext>,
) -> Result<Vec<Scalar>, DistError> {
    let (d, sympl) = generic_distribution(ctx)?;
    let att = d.attach()?;
    let nine = scalar_invariants(&att, &sympl);
    Ok(nine[..7].to_vec())
}

/// Process-wide cache of the jet context and the seven jet functions; the
/// symbolic computation is expensive and read-only afterwards.
pub fn cached_jet_invariants() -> &'static (Arc<VariableContext>, Vec<Scalar>) {
    static CACHE: std::sync::OnceLock<(Arc<VariableContext>, Vec<Scalar>)> =
        std::sync::OnceLock::new();
    CACHE.get_or_init(|| {
        let ctx = jet_context();
        let fns = invariants_as_jet_functions(&ctx).expect("generic plane is non-Lagrangian");
        (ctx, fns)
    })
}

/// The 2-jet values of a polynomial section as scalars over the base
/// context, ready for substitution into jet functions.
pub fn section_jet_scalars(section: &[Scalar; 4]) -> Vec<Scalar> {
    let base_ctx = section[0].ctx().clone();
    let mut values = Vec::with_capacity(JET_DIM);
    for v in 0..4 {
        values.push(Scalar::var(&base_ctx, v));
    }
    for i in 0..4 {
        values.push(section[i].clone());
    }
    for i in 0..4 {
        for a in 0..4 {
            values.push(section[i].partial(a));
        }
    }
    for i in 0..4 {
        for &(a, b) in SECOND_PAIRS.iter() {
            values.push(section[i].partial(a).partial(b));
        }
    }
    values
}

/// Substitute a section's 2-jet into a jet function, landing on the base
/// context.
pub fn specialize_to_section(
    f: &Scalar,
    section_values: &[Scalar],
) -> Result<Scalar, ScalarError> {
    f.eval_scalars(section_values)
}

/// Rank at a point of the Jacobian of the given jet functions with respect
/// to the 60 jet symbols.
pub fn independence_rank(fns: &[Scalar], point: &JetPoint) -> Result<usize, ScalarError> {
    let mut rows = Vec::new();
    for f in fns {
        let rat = f.base_part();
        let (num, den) = (rat.num(), rat.den());
        let dval = den.eval(&point.values);
        if dval.is_zero() {
            return Err(ScalarError::DenominatorVanishes);
        }
        let nval = num.eval(&point.values);
        let d2 = &dval * &dval;
        let mut row = Vec::with_capacity(JET_DIM - 4);
        for v in 4..JET_DIM {
            let dn = num.partial(v).eval(&point.values);
            let dd = den.partial(v).eval(&point.values);
            row.push((dn * &dval - &nval * dd) / &d2);
        }
        rows.push(row);
    }
    Ok(QMatrix::from_rows(rows).rank())
}

// ---------------------------------------------------------------------------
// Lifts and prolongation
// ---------------------------------------------------------------------------

/// A vector field on the Grassmannian bundle G: four base components and
/// four fiber components, all functions of (base, fiber).
#[derive(Clone, Debug)]
pub struct GrassmannField {
    pub base: [Scalar; 4],
    pub fiber: [Scalar; 4],
}

type Mat2 = [[Scalar; 2]; 2];

fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].add(&b[i][j])))
}

fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].sub(&b[i][j])))
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j])))
    })
}

/// The natural lift of the Hamiltonian field X_H to G. Writing the plane as
/// the graph of U = [[u¹,u³],[u²,u⁴]] from the (x,y)-block to the
/// (p,q)-block and splitting the Jacobian of X_H in the same blocks, the
/// fiber velocity is the matrix Riccati expression
/// U̇ = J_fb + J_ff·U − U·J_bb − U·J_bf·U.
pub fn hamiltonian_lift(ctx: &Arc<VariableContext>, h: &Scalar) -> GrassmannField {
    let layout = ctx.jet().expect("jet context required");
    let sympl = SymplecticStructure::standard(ctx);
    let xh = sympl.hamiltonian_field(h);
    // Jacobian in base variables (components depend on base only).
    let jac: [[Scalar; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| xh.components[i].partial(j)));
    const B: [usize; 2] = [0, 2]; // x, y
    const F: [usize; 2] = [1, 3]; // p, q
    let block = |rows: [usize; 2], cols: [usize; 2]| -> Mat2 {
        std::array::from_fn(|r| std::array::from_fn(|c| jac[rows[r]][cols[c]].clone()))
    };
    let j_bb = block(B, B);
    let j_bf = block(B, F);
    let j_fb = block(F, B);
    let j_ff = block(F, F);
    let u: Mat2 = [
        [
            Scalar::var(ctx, layout.fiber[0]),
            Scalar::var(ctx, layout.fiber[2]),
        ],
        [
            Scalar::var(ctx, layout.fiber[1]),
            Scalar::var(ctx, layout.fiber[3]),
        ],
    ];
    let udot = mat_sub(
        &mat_add(&j_fb, &mat_mul(&j_ff, &u)),
        &mat_add(&mat_mul(&u, &j_bb), &mat_mul(&u, &mat_mul(&j_bf, &u))),
    );
    GrassmannField {
        base: xh.components,
        fiber: [
            udot[0][0].clone(),
            udot[1][0].clone(),
            udot[0][1].clone(),
            udot[1][1].clone(),
        ],
    }
}

/// Second prolongation of a field on G to J²(γ): first-jet coefficients are
/// D_a(φⁱ) − Σ_b uⁱ_b D_a(ξᵇ) and the second-jet coefficients iterate the
/// same rule on the first-jet coefficients.
pub fn prolong2(ctx: &Arc<VariableContext>, v: &GrassmannField) -> Vec<Scalar> {
    let layout = ctx.jet().expect("jet context required").clone();
    let mut comps = vec![Scalar::zero(ctx); JET_DIM];
    for a in 0..4 {
        comps[a] = v.base[a].clone();
    }
    for i in 0..4 {
        comps[layout.fiber[i]] = v.fiber[i].clone();
    }
    for i in 0..4 {
        for a in 0..4 {
            let mut phi = v.fiber[i].derive(a);
            for b in 0..4 {
                let u_ib = Scalar::var(ctx, layout.first[i][b]);
                phi = phi.sub(&u_ib.mul(&v.base[b].derive(a)));
            }
            comps[layout.first[i][a]] = phi;
        }
    }
    for i in 0..4 {
        for &(a, b) in SECOND_PAIRS.iter() {
            let phi_a = comps[layout.first[i][a]].clone();
            let mut phi = phi_a.derive(b);
            for c in 0..4 {
                let u_iac = Scalar::var(ctx, layout.second[i][second_pair_index(a, c)]);
                phi = phi.sub(&u_iac.mul(&v.base[c].derive(b)));
            }
            comps[layout.second[i][second_pair_index(a, b)]] = phi;
        }
    }
    comps
}

/// Monomials xᵃpᵇyᶜqᵈ with 1 ≤ a+b+c+d ≤ bound over the given context.
pub fn base_monomials(ctx: &Arc<VariableContext>, bound: u32) -> Vec<Poly> {
    let n = ctx.nvars();
    let mut out = Vec::new();
    for a in 0..=bound {
        for b in 0..=(bound - a) {
            for c in 0..=(bound - a - b) {
                for d in 0..=(bound - a - b - c) {
                    if a + b + c + d == 0 {
                        continue;
                    }
                    let mut mono = vec![0u32; n];
                    mono[0] = a;
                    mono[1] = b;
                    mono[2] = c;
                    mono[3] = d;
                    out.push(Poly::from_terms(n, vec![(mono, num::One::one())]));
                }
            }
        }
    }
    out
}

/// Codimension at θ of the span of the prolonged lifts of all monomial
/// Hamiltonians up to the degree bound: 64 − rank of the evaluated matrix.
pub fn orbit_codimension(
    point: &JetPoint,
    degree_bound: u32,
    mut progress: Option<&mut dyn FnMut(usize, usize)>,
) -> Result<usize, ScalarError> {
    let ctx = jet_context();
    let monos = base_monomials(&ctx, degree_bound);
    let total = monos.len();
    let mut rows = Vec::with_capacity(total);
    for (k, m) in monos.iter().enumerate() {
        let h = Scalar::from_poly(&ctx, m.clone());
        let lift = hamiltonian_lift(&ctx, &h);
        let comps = prolong2(&ctx, &lift);
        let mut row = Vec::with_capacity(JET_DIM);
        for c in comps {
            // Lifts of polynomial Hamiltonians are polynomial.
            row.push(c.eval(&point.values)?);
        }
        rows.push(row);
        if let Some(cb) = progress.as_deref_mut() {
            cb(k + 1, total);
        }
    }
    let rank = QMatrix::from_rows(rows).rank();
    Ok(JET_DIM - rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use rand::SeedableRng;

    #[test]
    fn chart_covering_round_trip() {
        // v¹ = −u⁴, v² = u²+u³, v³ = −u¹, v⁴ = u¹u⁴ − u²u³, and back through
        // the branch u² = (v² − √Δ)/2 with Δ = (v²)² − 4v¹v³ + 4v⁴.
        let ctx = VariableContext::base();
        // use (x, p, y, q) as stand-ins for u¹..u⁴
        let u1 = parse("x", &ctx).unwrap();
        let u2 = parse("p", &ctx).unwrap();
        let u3 = parse("y", &ctx).unwrap();
        let u4 = parse("q", &ctx).unwrap();
        let v1 = u4.neg();
        let v2 = u2.add(&u3);
        let v3 = u1.neg();
        let v4 = u1.mul(&u4).sub(&u2.mul(&u3));
        let four = Scalar::int(&ctx, 4);
        let delta = v2
            .mul(&v2)
            .sub(&four.mul(&v1).mul(&v3))
            .add(&four.mul(&v4));
        // the −4v¹v³ and +4v⁴ contributions cancel the u¹u⁴ cross term,
        // leaving Δ = (u² − u³)² identically
        assert_eq!(delta, u2.sub(&u3).pow(2));
        // the branch with √Δ = u³ − u² recovers the fiber coordinates
        let root = u3.sub(&u2);
        let back_u2 = v2.sub(&root).try_div(&Scalar::int(&ctx, 2)).unwrap();
        assert_eq!(back_u2, u2);
        let back_u3 = v2.add(&root).try_div(&Scalar::int(&ctx, 2)).unwrap();
        assert_eq!(back_u3, u3);
        assert_eq!(u1, v3.neg());
        assert_eq!(u4, v1.neg());
    }

    #[test]
    fn generic_plane_is_non_lagrangian() {
        let ctx = jet_context();
        let (d, sympl) = generic_distribution(&ctx).unwrap();
        let layout = ctx.jet().unwrap();
        let g = sympl.omega_on(&d.span()[0], &d.span()[1]);
        // Ω(E₁,E₂) = u² − u³
        let expect = Scalar::var(&ctx, layout.fiber[1]).sub(&Scalar::var(&ctx, layout.fiber[2]));
        assert_eq!(g, expect);
    }

    #[test]
    fn jet_functions_have_no_base_dependence_and_specialize() {
        let (_ctx, fns) = cached_jet_invariants();
        let fns = fns.clone();
        for f in &fns {
            let rat = f.base_part();
            for v in 0..4 {
                assert!(!rat.num().depends_on(v), "base variable in numerator");
                assert!(!rat.den().depends_on(v), "base variable in denominator");
            }
        }
        // specialize to the flat section of ⟨∂x + ∂p, ∂y⟩-type planes: u
        // constant makes every invariant vanish
        let base_ctx = VariableContext::base();
        let section = [
            Scalar::int(&base_ctx, 1),
            Scalar::int(&base_ctx, 0),
            Scalar::int(&base_ctx, 0),
            Scalar::int(&base_ctx, 2),
        ];
        let values = section_jet_scalars(&section);
        for f in &fns {
            let s = specialize_to_section(f, &values).unwrap();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn lift_of_linear_hamiltonians() {
        let ctx = jet_context();
        // H = x: X_x = ∂p constant, fiber velocity zero
        let h = Scalar::var(&ctx, 0);
        let lift = hamiltonian_lift(&ctx, &h);
        assert!(lift.fiber.iter().all(|c| c.is_zero()));
        // linearity of the construction
        let h1 = Scalar::var(&ctx, 0).mul(&Scalar::var(&ctx, 1));
        let h2 = Scalar::var(&ctx, 2).pow(2);
        let l1 = hamiltonian_lift(&ctx, &h1);
        let l2 = hamiltonian_lift(&ctx, &h2);
        let l12 = hamiltonian_lift(&ctx, &h1.add(&h2));
        for i in 0..4 {
            assert_eq!(l12.base[i], l1.base[i].add(&l2.base[i]));
            assert_eq!(l12.fiber[i], l1.fiber[i].add(&l2.fiber[i]));
        }
    }

    #[test]
    fn prolongation_is_symmetric_in_second_jets() {
        let ctx = jet_context();
        let h = parse("x^2*p + y*q^2", &VariableContext::base())
            .unwrap()
            .extend(&ctx)
            .unwrap();
        let lift = hamiltonian_lift(&ctx, &h);
        let layout = ctx.jet().unwrap().clone();
        let comps = prolong2(&ctx, &lift);
        // recompute φⁱ_{ba} directly and compare with the stored φⁱ_{ab}
        for i in 0..4 {
            for &(a, b) in SECOND_PAIRS.iter() {
                if a == b {
                    continue;
                }
                let phi_b = comps[layout.first[i][b]].clone();
                let mut alt = phi_b.derive(a);
                for c in 0..4 {
                    let u_ibc = Scalar::var(&ctx, layout.second[i][second_pair_index(b, c)]);
                    alt = alt.sub(&u_ibc.mul(&lift.base[c].derive(a)));
                }
                assert_eq!(comps[layout.second[i][second_pair_index(a, b)]], alt);
            }
        }
    }

    #[test]
    fn prolongation_chain_rule_on_sections() {
        // For the graph flow of V to first order in a nilpotent ε:
        // (pr V)(F)∘j²s = ∂_ε[F∘j²s_ε]|₀ + Σ ξᵃ(s)·∂ₐ[F∘j²s].
        let ctx = jet_context();
        let eps_ctx = VariableContext::builder().coordinate("eps").build();
        let eps = eps_ctx.var_index("eps").unwrap();
        let layout = ctx.jet().unwrap().clone();

        let h = parse("x*p + q^2", &VariableContext::base())
            .unwrap()
            .extend(&ctx)
            .unwrap();
        let v = hamiltonian_lift(&ctx, &h);
        let prolonged = prolong2(&ctx, &v);

        // polynomial section over the ε-context (ε-free)
        let s: [Scalar; 4] = [
            parse("x + y^2", &eps_ctx).unwrap(),
            parse("x*y", &eps_ctx).unwrap(),
            parse("q", &eps_ctx).unwrap(),
            parse("p - x", &eps_ctx).unwrap(),
        ];
        let jets = section_jet_scalars(&s);
        // characteristic Q^i = φ^i − Σ_a ξ^a u^i_a along j¹s
        let phi_on_s: Vec<Scalar> = (0..4)
            .map(|i| specialize_to_section(&v.fiber[i], &jets).unwrap())
            .collect();
        let xi_on_s: Vec<Scalar> = (0..4)
            .map(|a| specialize_to_section(&v.base[a], &jets).unwrap())
            .collect();
        let eps_s = Scalar::var(&eps_ctx, eps);
        let deformed: [Scalar; 4] = std::array::from_fn(|i| {
            let mut q = phi_on_s[i].clone();
            for a in 0..4 {
                q = q.sub(&xi_on_s[a].mul(&s[i].partial(a)));
            }
            s[i].add(&eps_s.mul(&q))
        });
        let jets_deformed = section_jet_scalars(&deformed);

        // test every jet coordinate and one composite function
        let mut functions: Vec<Scalar> = (0..JET_DIM - 4)
            .map(|k| Scalar::var(&ctx, 4 + k))
            .collect();
        functions.push(
            Scalar::var(&ctx, layout.fiber[0])
                .mul(&Scalar::var(&ctx, layout.first[2][1]))
                .add(&Scalar::var(&ctx, layout.second[3][0]).pow(2)),
        );
        for f in &functions {
            let lhs_flow = specialize_to_section(f, &jets_deformed)
                .unwrap()
                .partial(eps)
                .subst_zero(eps)
                .unwrap();
            let f_on_s = specialize_to_section(f, &jets).unwrap();
            let transport: Scalar = (0..4).fold(Scalar::zero(&eps_ctx), |acc, a| {
                acc.add(&xi_on_s[a].mul(&f_on_s.partial(a)))
            });
            let lhs = lhs_flow.add(&transport);
            // (pr V)(F) = Σ_c V_c ∂_c F, then along j²s
            let mut prf = Scalar::zero(&ctx);
            for c in 0..JET_DIM {
                if !prolonged[c].is_zero() {
                    prf = prf.add(&prolonged[c].mul(&f.partial(c)));
                }
            }
            let rhs = specialize_to_section(&prf, &jets).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn independence_rank_drops_at_flat_points() {
        let (_ctx, fns) = cached_jet_invariants();
        let fns = fns.clone();
        let flat = JetPoint::flat([0, 1, 2, 0]);
        let rank = independence_rank(&fns, &flat).unwrap();
        assert!(rank < 7, "rank at a flat point was {rank}");
    }

    #[test]
    fn independence_rank_is_seven_at_a_generic_point() {
        let (_ctx, fns) = cached_jet_invariants();
        let fns = fns.clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        loop {
            let p = JetPoint::random(&mut rng);
            match independence_rank(&fns, &p) {
                Ok(rank) => {
                    assert_eq!(rank, 7);
                    break;
                }
                Err(ScalarError::DenominatorVanishes) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }
}
