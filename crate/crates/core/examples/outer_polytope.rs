// Outer polytopes `W` around bodies, their direction certificates, and how
// `r(W ∩ B)` approaches `r(A)` as the slack shrinks.

use std::error::Error;

use covercert::approximation::{build_outer, check_outer_shrink};
use covercert::geometry::{BallBody, Body, Plank, Polytope, Vector};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let triangle: Body = Polytope::from_ccw_polygon(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])?.into();
    let outer = build_outer(&triangle, 0.01)?;
    println!("triangle: o = {:?}, r = {}", outer.center, outer.inradius);
    for v in &outer.directions {
        println!("  direction {v:?}");
    }
    let cert = outer.hull_certificate()?;
    println!("  dist(conv V, 0) = {:.3e}, weights {:?}", cert.distance, cert.weights);

    let plank: Body = Plank::new(Vector::zeros(2), Vector::from([1.0, 0.0]), 0.5)?.into();
    let outer = build_outer(&plank, 1e-3)?;
    println!("plank: V = {:?}", outer.directions);

    let disk: Body = BallBody::unit(2).into();
    println!("unit disk: |V| = {}", build_outer(&disk, 0.1)?.directions.len());

    let small = Polytope::from_ccw_polygon(&[[-0.4, -0.2], [0.3, -0.3], [0.1, 0.5]])?;
    println!("shrink schedule for a small triangle:");
    for (eps, r) in check_outer_shrink(&small.into(), &[1e-2, 1e-3, 1e-4])? {
        println!("  eps = {eps:.0e}: r(W ∩ B) = {r:.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
