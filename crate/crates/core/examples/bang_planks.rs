// Planks of total width below the diameter leave part of the unit disk
// uncovered; the engine finds such a point.

use std::error::Error;
use std::fs;

use covercert::geometry::{Body, Plank, Shape, Vector};
use covercert::witness::bang_plank_witness;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/planks.json");
    let bodies: Vec<Body> = serde_json::from_str(&fs::read_to_string(path)?)?;
    let planks: Vec<Plank> = bodies
        .into_iter()
        .filter_map(|b| match b.shape {
            Shape::Plank(p) => Some(p),
            _ => None,
        })
        .collect();
    let report = bang_plank_witness(&planks, true)?;
    println!("three planks at 0, 60, 120 degrees: x = {:?}", report.witness);

    let parallel: Vec<Plank> = [-0.2, 0.0, 0.2]
        .iter()
        .map(|&c| Plank::new(Vector::from([c, 0.0]), Vector::from([1.0, 0.0]), 0.2))
        .collect::<Result<_, _>>()?;
    let report = bang_plank_witness(&parallel, true)?;
    println!("three adjacent planks covering |x1| <= 0.3: x = {:?}", report.witness);

    let too_wide = [
        Plank::new(Vector::zeros(2), Vector::from([1.0, 0.0]), 1.2)?,
        Plank::new(Vector::zeros(2), Vector::from([0.0, 1.0]), 0.9)?,
    ];
    println!("widths 1.2 + 0.9: {}", bang_plank_witness(&too_wide, true).unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
