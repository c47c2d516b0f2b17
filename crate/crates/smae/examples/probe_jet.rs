use std::time::Instant;
use smae::scalar::{Scalar, VariableContext};
use smae::exterior::VectorField;
use smae::linalg::ScalarMatrix;
use smae::symplectic::SymplecticStructure;

fn main() {
    let ctx = smae::jet::jet_context();
    let layout = ctx.jet().unwrap().clone();
    let u = |i: usize| Scalar::var(&ctx, layout.fiber[i]);
    let sympl = SymplecticStructure::standard(&ctx);
    let e1 = VectorField::new([Scalar::one(&ctx), u(0), Scalar::zero(&ctx), u(1)]);
    let e2 = VectorField::new([Scalar::zero(&ctx), u(2), Scalar::one(&ctx), u(3)]);
    let d = smae::dist::Distribution2::new(e1.clone(), e2.clone(), &sympl).unwrap();
    let t = Instant::now();
    let dual = d.ortho_complement().unwrap();
    println!("ortho: {:?}", t.elapsed());
    let [w1, w2] = dual.span().clone();
    let t = Instant::now();
    let frame = ScalarMatrix::from_rows(
        (0..4).map(|i| vec![e1.components[i].clone(), e2.components[i].clone(), w1.components[i].clone(), w2.components[i].clone()]).collect(),
    );
    let coframe = frame.inverse().unwrap();
    println!("inverse: {:?}", t.elapsed());
    for i in 0..4 { for j in 0..4 {
        let e = coframe.at(i,j);
        print!("({},{}) ", e.base_part().num().num_terms(), e.base_part().den().num_terms());
    } println!(); }
    let t = Instant::now();
    let att = d.attach().unwrap();
    println!("attach total: {:?}", t.elapsed());
    let t = Instant::now();
    let ds = att.sigma.ext_d();
    println!("d(sigma): {:?}; sigma coeff sizes:", t.elapsed());
    for c in &att.sigma.coeffs { print!("({}/{}) ", c.base_part().num().num_terms(), c.base_part().den().num_terms()); }
    println!();
    let t = Instant::now();
    let w = att.omega.wedge(&ds);
    println!("omega^dsigma: {:?}", t.elapsed());
    let t = Instant::now();
    let i1 = sympl.hodge_star(&w);
    println!("star: {:?} -> I1 sizes {}/{}", t.elapsed(), i1.as_scalar().base_part().num().num_terms(), i1.as_scalar().base_part().den().num_terms());
}
