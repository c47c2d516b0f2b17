//! Batch verification suites behind `smae verify`: the structural identity
//! suite on seeded random distributions, the involution relations, the
//! class-pair table, the jet-level independence rank and the orbit
//! codimension, plus the two floating-point finite-difference oracles.
//!
//! Every suite is deterministic under a fixed seed and reports one named
//! check per line.

use crate::analysis::{darboux_class, first_prolongation};
use crate::dist::Distribution2;
use crate::exterior::{KForm, VectorField, VectorValuedForm};
use crate::invariants::{invariants_of, j_invariants, primed_invariants, scalar_invariants};
use crate::jet::{
    hamiltonian_lift, independence_rank, jet_context,
    orbit_codimension, JetPoint,
};
use crate::scalar::{rat_frac, Scalar, ScalarError, VariableContext};
use crate::symplectic::SymplecticStructure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<(String, bool)>,
}

impl SuiteReport {
    fn new(name: &str) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (label, ok) in &self.checks {
            out.push_str(if *ok { "PASS " } else { "FAIL " });
            out.push_str(label);
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {}/{} checks passed\n",
            self.name,
            self.checks.iter().filter(|(_, ok)| *ok).count(),
            self.checks.len()
        ));
        out
    }
}

// ---------------------------------------------------------------------------
// Random inputs
// ---------------------------------------------------------------------------

/// A sparse polynomial scalar with small integer coefficients: degree ≤ 2,
/// at most two terms.
pub fn random_scalar(ctx: &Arc<VariableContext>, rng: &mut impl Rng) -> Scalar {
    let mut acc = Scalar::int(ctx, rng.gen_range(-2i64..=2));
    for _ in 0..rng.gen_range(0..=2) {
        let c = rng.gen_range(-2i64..=2);
        if c == 0 {
            continue;
        }
        let mut term = Scalar::int(ctx, c);
        for _ in 0..rng.gen_range(1..=2) {
            term = term.mul(&Scalar::var(ctx, rng.gen_range(0..4)));
        }
        acc = acc.add(&term);
    }
    acc
}

/// A random non-Lagrangian 2-distribution with sparse polynomial components.
pub fn random_distribution(
    ctx: &Arc<VariableContext>,
    sympl: &SymplecticStructure,
    rng: &mut impl Rng,
) -> Distribution2 {
    loop {
        let mut make = || {
            let mut comps = Vec::with_capacity(4);
            for _ in 0..4 {
                comps.push(random_scalar(ctx, rng));
            }
            VectorField::new(std::array::from_fn(|i| comps[i].clone()))
        };
        let x1 = make();
        let x2 = make();
        if let Ok(d) = Distribution2::new(x1, x2, sympl) {
            return d;
        }
    }
}

// ---------------------------------------------------------------------------
// Identity suite
// ---------------------------------------------------------------------------

/// The structural identity suite on `count` seeded random distributions.
pub fn run_identities(seed: u64, count: usize) -> SuiteReport {
    let mut report = SuiteReport::new("identities");
    let ctx = VariableContext::base();
    let sympl = SymplecticStructure::standard(&ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = Scalar::rational(&ctx, rat_frac(1, 2));
    for n in 0..count {
        let d = random_distribution(&ctx, &sympl, &mut rng);
        let att = match d.attach() {
            Ok(a) => a,
            Err(e) => {
                report.check(format!("dist {n}: attach ({e})"), false);
                continue;
            }
        };
        // ω = ½ P⌟Ω
        let ins = att.projector.insert_into(sympl.omega()).scale(&half);
        report.check(format!("dist {n}: omega = (P inserted into Omega)/2"), ins == att.omega);
        // ℛ = ω⊗Z, ℛ' = ω'⊗Z'
        report.check(
            format!("dist {n}: curvature = omega (x) Z"),
            att.curvature == VectorValuedForm::tensor(&att.omega, &att.z),
        );
        report.check(
            format!("dist {n}: dual curvature = omega' (x) Z'"),
            att.curvature_dual == VectorValuedForm::tensor(&att.omega_dual, &att.z_dual),
        );
        // cancellation: ω∧(Z'⌟ω) = 0 = ω'∧(Z⌟ω')
        report.check(
            format!("dist {n}: omega ^ (Z' in omega) = 0"),
            att.omega.wedge(&att.omega.insert(&att.z_dual)).is_zero(),
        );
        report.check(
            format!("dist {n}: omega' ^ (Z in omega') = 0"),
            att.omega_dual
                .wedge(&att.omega_dual.insert(&att.z))
                .is_zero(),
        );
        // (ℛ−ℛ')⌟Ω = (Z−Z')⌟½Ω² = dω
        let lhs = att
            .curvature
            .sub(&att.curvature_dual)
            .insert_into(sympl.omega());
        let mid = sympl.volume().insert(&att.z.sub(&att.z_dual));
        report.check(format!("dist {n}: (R - R') in Omega = (Z - Z') in vol"), lhs == mid);
        report.check(format!("dist {n}: (Z - Z') in vol = d omega"), mid == att.omega.ext_d());
        // the five descriptions of I1
        let i = scalar_invariants(&att, &sympl);
        let star0 = |f: &KForm| sympl.hodge_star(f).as_scalar().clone();
        let d1 = star0(&att.omega.wedge(&att.sigma).ext_d());
        let d2 = star0(&att.omega.wedge(&att.rho).ext_d());
        let d3 = star0(&sympl.omega().wedge(&att.rho.ext_d()));
        let d4 = star0(&att.curvature.insert_into(sympl.omega()).ext_d());
        report.check(format!("dist {n}: I1 = *d(omega^sigma)"), i[0] == d1);
        report.check(format!("dist {n}: I1 = *d(omega^rho)"), i[0] == d2);
        report.check(format!("dist {n}: I1 = *(Omega^d rho)"), i[0] == d3);
        report.check(format!("dist {n}: I1 = *d(R in Omega)"), i[0] == d4);
        // I2 = −dσ(Z,Z'), I3 = −dρ(Z,Z')
        let ds_zz = att
            .sigma
            .ext_d()
            .insert(&att.z)
            .insert(&att.z_dual)
            .as_scalar()
            .neg();
        let dr_zz = att
            .rho
            .ext_d()
            .insert(&att.z)
            .insert(&att.z_dual)
            .as_scalar()
            .neg();
        report.check(format!("dist {n}: I2 = -d sigma(Z, Z')"), i[1] == ds_zz);
        report.check(format!("dist {n}: I3 = -d rho(Z, Z')"), i[2] == dr_zz);
        // Z is well defined (independent of the normalized spanning pair)
        match att.z_alternative_normalization(&d) {
            Ok(alt) => report.check(format!("dist {n}: Z independent of normalization"), alt == att.z),
            Err(e) => report.check(format!("dist {n}: Z normalization ({e})"), false),
        }
        // attach of the complement swaps everything
        match att.dual.attach() {
            Ok(datt) => {
                let mut ok = datt.z == att.z_dual && datt.z_dual == att.z;
                ok = ok && datt.omega == att.omega_dual && datt.rho == att.rho_dual;
                ok = ok && datt.sigma == att.sigma.neg();
                ok = ok && datt.dual.same_span(&d).unwrap_or(false);
                report.check(format!("dist {n}: complement involution"), ok);
            }
            Err(e) => report.check(format!("dist {n}: complement attach ({e})"), false),
        }
    }
    report
}

/// The involution identities and the swap symmetry of the equation-level
/// invariants on seeded random distributions.
pub fn run_involution(seed: u64, count: usize) -> SuiteReport {
    let mut report = SuiteReport::new("involution");
    let ctx = VariableContext::base();
    let sympl = SymplecticStructure::standard(&ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..count {
        let d = random_distribution(&ctx, &sympl, &mut rng);
        let (i, ip) = match (invariants_of(&d), primed_invariants(&d)) {
            (Ok(i), Ok(ip)) => (i, ip),
            _ => {
                report.check(format!("dist {n}: attach"), false);
                continue;
            }
        };
        let two = Scalar::int(&ctx, 2);
        report.check(format!("dist {n}: I1' = I1"), ip[0] == i[0]);
        report.check(format!("dist {n}: I2' = I2"), ip[1] == i[1]);
        report.check(format!("dist {n}: I3' = I2 - I3"), ip[2] == i[1].sub(&i[2]));
        report.check(format!("dist {n}: I4' = I4"), ip[3] == i[3]);
        report.check(format!("dist {n}: I5' = I4 - I5"), ip[4] == i[3].sub(&i[4]));
        report.check(
            format!("dist {n}: I6' = I4 - 2 I5 + I6"),
            ip[5] == i[3].sub(&two.mul(&i[4])).add(&i[5]),
        );
        report.check(format!("dist {n}: I7' = -I7"), ip[6] == i[6].neg());
        let j = j_invariants(&i, &ip);
        let js = j_invariants(&ip, &i);
        for k in 0..7 {
            report.check(format!("dist {n}: J{} swap-invariant", k + 1), j[k] == js[k]);
        }
    }
    report
}

// ---------------------------------------------------------------------------
// Class table
// ---------------------------------------------------------------------------

/// The nine rows of the class-pair table: distribution, expected (r, r').
/// The (1,4) row needs the inert exponential E with dE/dx = −E.
pub fn class_table_rows() -> Vec<(&'static str, (usize, usize), bool)> {
    vec![
        ("0,1,0,q ; 1,0,0,y*q", (0, 3), false),
        ("-1,y,0,0 ; 0,q,0,-1", (0, 4), false),
        ("0,1,0,q+1 ; 1,0,0,y*q", (1, 3), false),
        ("0,1,0,y+q^2*E ; 1,0,0,q", (1, 4), true),
        ("0,1,0,p ; 1,0,0,q", (2, 3), false),
        ("0,1,0,p ; 1,0,0,q^2", (2, 4), false),
        ("0,1,1,p^2 ; 1,y,0,0", (3, 3), false),
        ("0,1,1,p*q ; 1,y,0,0", (3, 4), false),
        ("0,1,1,p*q ; 1,x*y,0,0", (4, 4), false),
    ]
}

fn class_pair(d: &Distribution2) -> Result<(usize, usize), crate::dist::DistError> {
    let att = d.attach()?;
    Ok((darboux_class(&att.rho), darboux_class(&att.rho_dual)))
}

/// Verify all nine class pairs, plus the cross-checks r = 4 ⟺ I⁶ ≠ 0 and
/// r ≤ 2 ⟺ the first prolongation is integrable (on the table rows and on
/// extra seeded random distributions).
pub fn run_table(seed: u64, extra_random: usize) -> SuiteReport {
    let mut report = SuiteReport::new("table1");
    let plain = VariableContext::base();
    let exp_ctx = VariableContext::builder().inert_exponential("E").build();
    for (text, expected, needs_exp) in class_table_rows() {
        let ctx = if needs_exp { &exp_ctx } else { &plain };
        let d = match crate::report::parse_distribution_input(text, ctx, num::One::one()) {
            Ok(d) => d,
            Err(e) => {
                report.check(format!("row {expected:?}: parse ({e})"), false);
                continue;
            }
        };
        match class_pair(&d) {
            Ok(got) => {
                report.check(
                    format!("row {expected:?}: classes = {got:?}"),
                    got == expected,
                );
                report.check(
                    format!("row {expected:?}: cross-checks"),
                    cross_checks_hold(&d).unwrap_or(false),
                );
            }
            Err(e) => report.check(format!("row {expected:?}: attach ({e})"), false),
        }
    }
    let sympl = SymplecticStructure::standard(&plain);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..extra_random {
        let d = random_distribution(&plain, &sympl, &mut rng);
        report.check(
            format!("random {n}: cross-checks"),
            cross_checks_hold(&d).unwrap_or(false),
        );
    }
    report
}

/// r = 4 ⟺ I⁶ ≠ 0 and r ≤ 2 ⟺ the first prolongation is integrable, on
/// both the distribution and its complement.
pub fn cross_checks_hold(d: &Distribution2) -> Result<bool, crate::dist::DistError> {
    let att = d.attach()?;
    let i = scalar_invariants(&att, d.sympl());
    let ip = scalar_invariants(&att.dual.attach()?, d.sympl());
    let r = darboux_class(&att.rho);
    let rp = darboux_class(&att.rho_dual);
    let p = first_prolongation(d);
    let pd = first_prolongation(&att.dual);
    let ok = ((r == 4) == !i[5].is_zero())
        && ((rp == 4) == !ip[5].is_zero())
        && ((r <= 2) == p.is_integrable()?)
        && ((rp <= 2) == pd.is_integrable()?);
    Ok(ok)
}

// ---------------------------------------------------------------------------
// Jet suites
// ---------------------------------------------------------------------------

/// Independence of the seven invariants at `points` seeded generic jet
/// points (plus a printed record of each point).
pub fn run_jet_rank(seed: u64, points: usize) -> SuiteReport {
    let mut report = SuiteReport::new("jet-rank");
    let (_ctx, fns) = crate::jet::cached_jet_invariants();
    let fns = fns.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = 0;
    while found < points {
        let p = JetPoint::random(&mut rng);
        match independence_rank(&fns, &p) {
            Ok(rank) => {
                report.check(format!("point {found}: rank {rank} = 7"), rank == 7);
                found += 1;
            }
            Err(ScalarError::DenominatorVanishes) => continue,
            Err(e) => {
                report.check(format!("point {found}: {e}"), false);
                found += 1;
            }
        }
    }
    report
}

/// Orbit codimension at a seeded generic jet point, with the saturation
/// check at the next degree bound.
pub fn run_orbit_codim(seed: u64, degree_bound: u32, saturate: bool) -> SuiteReport {
    let mut report = SuiteReport::new("orbit-codim");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = JetPoint::random(&mut rng);
    match orbit_codimension(&point, degree_bound, None) {
        Ok(codim) => {
            report.check(
                format!("codimension at degree bound {degree_bound} = {codim} (expect 7)"),
                codim == 7,
            );
            if saturate {
                match orbit_codimension(&point, degree_bound + 1, None) {
                    Ok(c2) => report.check(
                        format!("saturation at bound {} = {c2}", degree_bound + 1),
                        c2 == codim,
                    ),
                    Err(e) => report.check(format!("saturation ({e})"), false),
                }
            }
        }
        Err(e) => report.check(format!("codimension ({e})"), false),
    }
    report
}

// ---------------------------------------------------------------------------
// Floating oracles
// ---------------------------------------------------------------------------

/// Central finite-difference check of `partial` on random polynomial
/// scalars; mixed absolute/relative tolerance on the derivative value.
pub fn oracle_partial_fd(seed: u64, samples: usize, tol: f64) -> SuiteReport {
    let mut report = SuiteReport::new("oracle-partial");
    let ctx = VariableContext::base();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-5f64;
    let mut done = 0;
    while done < samples {
        let f = random_scalar(&ctx, &mut rng);
        let v = rng.gen_range(0..4usize);
        let point: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.5f64..1.5));
        let exact = f.partial(v).eval_f64(&point);
        if !exact.is_finite() {
            continue;
        }
        let mut plus = point;
        plus[v] += h;
        let mut minus = point;
        minus[v] -= h;
        let fd = (f.eval_f64(&plus) - f.eval_f64(&minus)) / (2.0 * h);
        let err = (exact - fd).abs() / exact.abs().max(1.0);
        report.check(
            format!("sample {done}: d/d{} error {err:.2e}", ["x", "p", "y", "q"][v]),
            err <= tol,
        );
        done += 1;
    }
    report
}

/// Finite-difference validation of the Grassmannian lift: transport the
/// plane with an RK4 flow of X_H (Jacobian by central differences, so the
/// oracle is independent of the symbolic derivative path) and compare the
/// differenced fiber velocity with the block Riccati formula.
pub fn oracle_lift_fd(seed: u64, samples: usize, tol: f64) -> SuiteReport {
    let mut report = SuiteReport::new("oracle-lift");
    let ctx = jet_context();
    let layout = ctx.jet().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_ctx = VariableContext::base();
    for k in 0..samples {
        // random polynomial Hamiltonian of degree ≤ 3
        let h_base = {
            let a = random_scalar(&base_ctx, &mut rng);
            let b = random_scalar(&base_ctx, &mut rng);
            a.mul(&Scalar::var(&base_ctx, rng.gen_range(0..4))).add(&b)
        };
        let h = h_base.extend(&ctx).unwrap();
        let lift = hamiltonian_lift(&ctx, &h);
        let xh: Vec<Scalar> = lift.base.to_vec();
        // sample point on G
        let z: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0f64..1.0));
        let u: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0f64..1.0));
        let mut point = vec![0.0f64; crate::jet::JET_DIM];
        point[..4].copy_from_slice(&z);
        for i in 0..4 {
            point[layout.fiber[i]] = u[i];
        }
        // symbolic fiber velocity at the point
        let udot_sym: [f64; 4] = std::array::from_fn(|i| lift.fiber[i].eval_f64(&point));
        // floating transport of the plane
        let field = |z: &[f64; 4]| -> [f64; 4] {
            let mut full = vec![0.0f64; crate::jet::JET_DIM];
            full[..4].copy_from_slice(z);
            std::array::from_fn(|i| xh[i].eval_f64(&full))
        };
        let t = 1e-3;
        let u_plus = flow_plane(&field, z, u, t);
        let u_minus = flow_plane(&field, z, u, -t);
        let mut max_err = 0.0f64;
        for i in 0..4 {
            let fd = (u_plus[i] - u_minus[i]) / (2.0 * t);
            let err = (fd - udot_sym[i]).abs() / udot_sym[i].abs().max(1.0);
            max_err = max_err.max(err);
        }
        report.check(format!("sample {k}: lift error {max_err:.2e}"), max_err <= tol);
    }
    report
}

/// RK4 transport of (point, two tangent vectors) along the field, Jacobian
/// by central differences; returns the graph coordinates of the moved plane.
fn flow_plane(
    field: &dyn Fn(&[f64; 4]) -> [f64; 4],
    z0: [f64; 4],
    u0: [f64; 4],
    t: f64,
) -> [f64; 4] {
    let jac = |z: &[f64; 4]| -> [[f64; 4]; 4] {
        let h = 1e-6;
        let mut j = [[0.0; 4]; 4];
        for col in 0..4 {
            let mut zp = *z;
            zp[col] += h;
            let mut zm = *z;
            zm[col] -= h;
            let fp = field(&zp);
            let fm = field(&zm);
            for row in 0..4 {
                j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        j
    };
    // state: z, v1, v2 with v̇ = J(z)·v
    let mut state = [0.0f64; 12];
    state[..4].copy_from_slice(&z0);
    // E1 = ∂x + u1 ∂p + u2 ∂q, E2 = ∂y + u3 ∂p + u4 ∂q in (x,p,y,q) order
    state[4..8].copy_from_slice(&[1.0, u0[0], 0.0, u0[1]]);
    state[8..12].copy_from_slice(&[0.0, u0[2], 1.0, u0[3]]);
    let deriv = |s: &[f64; 12]| -> [f64; 12] {
        let z: [f64; 4] = std::array::from_fn(|i| s[i]);
        let j = jac(&z);
        let f = field(&z);
        let mut out = [0.0; 12];
        out[..4].copy_from_slice(&f);
        for v in 0..2 {
            for row in 0..4 {
                let mut acc = 0.0;
                for col in 0..4 {
                    acc += j[row][col] * s[4 + 4 * v + col];
                }
                out[4 + 4 * v + row] = acc;
            }
        }
        out
    };
    let steps = 8;
    let dt = t / steps as f64;
    for _ in 0..steps {
        let k1 = deriv(&state);
        let s2: [f64; 12] = std::array::from_fn(|i| state[i] + 0.5 * dt * k1[i]);
        let k2 = deriv(&s2);
        let s3: [f64; 12] = std::array::from_fn(|i| state[i] + 0.5 * dt * k2[i]);
        let k3 = deriv(&s3);
        let s4: [f64; 12] = std::array::from_fn(|i| state[i] + dt * k3[i]);
        let k4 = deriv(&s4);
        for i in 0..12 {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    // regraph: B = base block of (v1, v2), F = fiber block; U = F·B⁻¹
    let v1 = &state[4..8];
    let v2 = &state[8..12];
    let b = [[v1[0], v2[0]], [v1[2], v2[2]]];
    let f = [[v1[1], v2[1]], [v1[3], v2[3]]];
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let binv = [
        [b[1][1] / det, -b[0][1] / det],
        [-b[1][0] / det, b[0][0] / det],
    ];
    let umat = [
        [
            f[0][0] * binv[0][0] + f[0][1] * binv[1][0],
            f[0][0] * binv[0][1] + f[0][1] * binv[1][1],
        ],
        [
            f[1][0] * binv[0][0] + f[1][1] * binv[1][0],
            f[1][0] * binv[0][1] + f[1][1] * binv[1][1],
        ],
    ];
    [umat[0][0], umat[1][0], umat[0][1], umat[1][1]]
}

/// Infinitesimal symplectomorphism invariance on seeded random
/// distributions and Hamiltonians (first order in a nilpotent parameter).
pub fn run_infinitesimal_invariance(seed: u64, count: usize) -> SuiteReport {
    let mut report = SuiteReport::new("infinitesimal-invariance");
    let base = VariableContext::base();
    let eps_ctx = VariableContext::builder().coordinate("eps").build();
    let eps = eps_ctx.var_index("eps").unwrap();
    let sympl = SymplecticStructure::standard(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..count {
        let d = random_distribution(&base, &sympl, &mut rng);
        let h = random_scalar(&base, &mut rng);
        match crate::analysis::infinitesimal_invariance_defect(
            [&d.span()[0], &d.span()[1]],
            &h,
            &eps_ctx,
            eps,
        ) {
            Ok(defects) => {
                for (k, defect) in defects.iter().enumerate() {
                    report.check(
                        format!("dist {n}: first-order invariance of I{}", k + 1),
                        defect.is_zero(),
                    );
                }
            }
            Err(e) => report.check(format!("dist {n}: deformation ({e})"), false),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suite_small() {
        let r = run_identities(7, 3);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn involution_suite_small() {
        let r = run_involution(11, 3);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn class_table_passes() {
        let r = run_table(3, 2);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn partial_oracle() {
        let r = oracle_partial_fd(19, 10, 1e-6);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn lift_oracle() {
        let r = oracle_lift_fd(23, 3, 1e-4);
        assert!(r.passed(), "{}", r.render());
    }
}
