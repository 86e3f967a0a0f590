//! Generational distance and dominated hypervolume.
//!
//! Walks through the two archive-quality metrics on hand-checkable data:
//! GD as the average distance from produced points to a front sample, and
//! hypervolume as the volume dominated between the points and a reference.
//! Ends with the Monte Carlo estimator used for four or more objectives.
//!
//! Run with `cargo run --example quality_metrics`.

use motr::core::ObjectiveVector;
use motr::metrics::{front_sampler, gd, hypervolume, FrontSample, HvReference};
use motr::problems;

fn pts(rows: &[&[f64]]) -> Vec<ObjectiveVector> {
    rows.iter()
        .map(|r| ObjectiveVector::new(r.to_vec()).unwrap())
        .collect()
}

fn main() {
    // Hypervolume of {(1,2), (2,1)} against reference (3,3): two 1x2
    // rectangles overlapping in a 1x1 square, so 2 + 2 - 1 = 3.
    let produced = pts(&[&[1.0, 2.0], &[2.0, 1.0]]);
    let reference = HvReference::new(ObjectiveVector::new(vec![3.0, 3.0]).unwrap());
    let estimate = hypervolume(&produced, &reference).unwrap();
    println!(
        "2d hypervolume = {} (exact sweep, standard error {:?})",
        estimate.value, estimate.standard_error
    );
    assert_eq!(estimate.value, 3.0);

    // GD: the root of the summed squared nearest distances, divided by
    // the point count. Two points each 0.1 from the front give
    // sqrt(0.01 + 0.01) / 2.
    let front = FrontSample::new(pts(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
    let off_front = pts(&[&[0.1, 1.0], &[1.0, 0.1]]);
    let distance = gd(&off_front, &front).unwrap();
    println!("gd of axis-shifted points = {distance}");
    assert!((distance - 0.02f64.sqrt() / 2.0).abs() < 1e-12);

    // Against a real front sample: archive points exactly on the DTLZ2
    // sphere have distance bounded by the sampling resolution.
    let dtlz2 = problems::by_name("dtlz2").unwrap();
    let sphere = front_sampler(&dtlz2).unwrap();
    let on_front = pts(&[
        &[1.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0],
        &[0.0, 0.0, 1.0],
        &[0.5773502691896258, 0.5773502691896258, 0.5773502691896258],
    ]);
    println!(
        "gd of on-sphere points vs {}-point sample = {:.2e}",
        sphere.len(),
        gd(&on_front, &sphere).unwrap()
    );

    // Four objectives: the exact sweeps stop at three dimensions, so the
    // estimator switches to seeded Monte Carlo and reports its standard
    // error alongside the value.
    let produced4 = pts(&[&[0.5, 0.5, 0.5, 0.5]]);
    let reference4 = HvReference::new(ObjectiveVector::new(vec![1.0; 4]).unwrap());
    let estimate4 = hypervolume(&produced4, &reference4).unwrap();
    println!(
        "4d hypervolume = {:.5} +/- {:.5} (true value 0.0625)",
        estimate4.value,
        estimate4.standard_error.unwrap()
    );
    assert!((estimate4.value - 0.0625).abs() < 3.0 * estimate4.standard_error.unwrap() + 1e-9);
}
