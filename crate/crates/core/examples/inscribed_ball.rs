// Largest inscribed balls of a triangle, a plank and a body clipped to the
// unit ball.

use std::error::Error;
use std::fs;

use covercert::geometry::{Body, Plank, Polytope, Vector};
use covercert::inradius::{inradius_body, inradius_clipped, inradius_polytope, project_point};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/triangle.json");
    let triangle: Body = serde_json::from_str(&fs::read_to_string(path)?)?;
    let ball = inradius_body(&triangle)?;
    println!(
        "triangle: r = {:.12}, center = {:?}, touching {:?}",
        ball.radius, ball.center, ball.touching
    );
    assert!((ball.radius - 1.0).abs() < 1e-9);

    let plank = Plank::new(Vector::from([0.1, 0.0]), Vector::from([1.0, 0.0]), 0.4)?;
    let r = inradius_body(&plank.clone().into())?;
    println!("plank of width 0.4: r = {}, center = {:?}", r.radius, r.center);
    // As two halfspaces the plank holds arbitrarily large balls along its length.
    println!("same plank as a polytope: {:?}", inradius_polytope(&plank.to_polytope()).err());

    let half_plane = Polytope::from_constraints(vec![vec![0.0, -1.0]], vec![-0.5])?;
    let clipped = inradius_clipped(&half_plane)?;
    println!(
        "{{y >= 0.5}} inside the unit disk: r = {:.6}, center = {:?}",
        clipped.radius, clipped.center
    );

    let square = Polytope::cube(2, -1.0, 1.0);
    let p = project_point(&square, 1.0, &Vector::from([2.0, 2.0]))?;
    println!("projection of (2, 2) onto square and disk: {p:?}");

    let lens_path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/lens.json");
    let lens: Body = serde_json::from_str(&fs::read_to_string(lens_path)?)?;
    let r = inradius_body(&lens)?;
    println!("ball (0.8, 0) radius 0.5 clipped to the disk: r = {:.6}", r.radius);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
