// Witness points for covering instances: a hand-written instance from JSON,
// then one assembled from bodies, with the per-step proof checks.

use std::error::Error;
use std::fs;

use covercert::geometry::{Body, Plank, Polytope, Vector};
use covercert::witness::{
    choose_parameters, proof_checks, witness, CoveringInstance, Mode, DEFAULT_MARGIN,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/plank_instance.json");
    let instance: CoveringInstance = serde_json::from_str(&fs::read_to_string(path)?)?;
    instance.validate()?;
    for mode in [Mode::Ascent, Mode::Exhaustive] {
        let report = witness(&instance, mode)?;
        println!(
            "{mode}: x = {:?}, margins {:?}, valid {}",
            report.witness, report.margins, report.valid
        );
    }

    let params = choose_parameters(&[0.3, 0.3], DEFAULT_MARGIN)?;
    println!("parameters for radii (0.3, 0.3): {params:?}");

    let bodies: Vec<Body> = vec![
        Plank::new(Vector::zeros(2), Vector::from([1.0, 0.0]), 0.4)?.into(),
        Plank::new(Vector::zeros(2), Vector::from([0.0, 1.0]), 0.4)?.into(),
        Polytope::from_ccw_polygon(&[[0.4, 0.4], [0.7, 0.4], [0.4, 0.7]])?.into(),
    ];
    let instance = CoveringInstance::assemble(2, &bodies, DEFAULT_MARGIN)?;
    let report = witness(&instance, Mode::Ascent)?;
    println!(
        "two crossing planks and a triangle: x = {:?}, |x| = {:.4}",
        report.witness, report.norm_x
    );
    for b in &bodies {
        assert!(!b.contains(&report.witness, 1e-9)?);
    }
    for check in proof_checks(&instance, &report.assignment)? {
        println!(
            "  body {}: swap slack {:.3e}, averaged {:.4} >= {:.4}, |y| = {:.4} <= {}",
            check.body,
            check.swap_slack,
            check.averaged_term,
            check.averaged_bound,
            check.aux_norm,
            check.aux_limit
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
