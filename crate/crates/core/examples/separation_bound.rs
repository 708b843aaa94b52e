// The separation bound `sqrt((1 + eps)^2 - 1)` next to sampled worst cases,
// and minimum-norm points of small hulls.

use std::error::Error;

use covercert::approximation::{min_norm_point, separ_bound};
use covercert::geometry::Vector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // x on the unit sphere, y on the hyperplane {<h, x> = 1} with |y| <= 1 + eps:
    // the farthest such y sits at distance sqrt((1 + eps)^2 - 1) from x.
    for eps in [1.0, 0.1, 0.01, 1e-4] {
        let bound = separ_bound(eps);
        let x = Vector::from([1.0, 0.0]);
        let y = Vector::from([1.0, bound]);
        println!(
            "eps = {eps:<6}: bound = {bound:.6}, |y| = {:.6}, |x - y| = {:.6}",
            y.norm(),
            x.distance(&y)
        );
    }

    let edge = min_norm_point(&[Vector::from([1.0, 1.0]), Vector::from([1.0, -1.0])])?;
    println!("segment (1,1)-(1,-1): point {:?}, distance {}", edge.point, edge.distance);
    let triangle = min_norm_point(&[
        Vector::from([-1.0, 0.0]),
        Vector::from([0.0, -1.0]),
        Vector::from([0.6, 0.8]),
    ])?;
    println!(
        "hull holding the origin: distance {:.2e}, weights {:?}",
        triangle.distance, triangle.weights
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
