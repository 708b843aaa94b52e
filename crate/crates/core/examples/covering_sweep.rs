// Random partitions of a triangle, checked for `Σ r(A_n) >= r(A)`, and a
// small CSV sweep.

use std::error::Error;

use covercert::geometry::Polytope;
use covercert::harness::{generate_partition, sweep, sweep_csv, verify_covering};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let triangle = Polytope::from_ccw_polygon(&[[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])?;
    for cuts in 0..4 {
        let scenario = generate_partition(&triangle, cuts, 42)?;
        let result = verify_covering(&scenario, 2000)?;
        println!(
            "{cuts} cuts: radii {:?}, sum {:.4} vs {:.4}, covered {}",
            result
                .piece_radii
                .iter()
                .map(|r| format!("{r:.4}"))
                .collect::<Vec<_>>(),
            result.sum_radii,
            result.r_target,
            result.covered
        );
        assert!(result.inequality_holds);
    }

    let rows = sweep(10, 7, 2, 4)?;
    print!("{}", sweep_csv(&rows));
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    println!("smallest margin: {worst:.3e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
