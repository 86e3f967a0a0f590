//! Density-guided reference selection.
//!
//! Builds a small archive whose points cluster on one side of the front,
//! computes the crowding density of each point, and shows that the solver
//! would pick the most isolated point as the next reference. The same
//! density is then sampled on a grid, which is what `density_surface.csv`
//! holds after a run.
//!
//! Run with `cargo run --example reference_selection`.

use motr::core::{Archive, ArchiveEntry, DecisionVector, ObjectiveVector};
use motr::geometry::{
    build_basis, density_at, density_surface, project_archive, select_reference,
    DecreasingFunction,
};

fn entry(f: &[f64]) -> ArchiveEntry {
    ArchiveEntry::new(
        DecisionVector::new(f.to_vec()).unwrap(),
        ObjectiveVector::new(f.to_vec()).unwrap(),
        0.5,
        0,
    )
    .unwrap()
}

fn main() {
    // Four points crowd the left end of a trade-off curve, one sits alone
    // on the right.
    let mut archive = Archive::new();
    for f in [
        [0.00, 1.00],
        [0.05, 0.90],
        [0.10, 0.82],
        [0.15, 0.75],
        [0.95, 0.05],
    ] {
        archive.insert(entry(&f)).unwrap();
    }

    let influence = DecreasingFunction::gaussian(0.2).unwrap();

    // Project objectives onto the hyperplane orthogonal to the
    // utopia-nadir diagonal, then sum pairwise influence.
    let g = ObjectiveVector::new(vec![0.0, 0.05]).unwrap();
    let b = ObjectiveVector::new(vec![0.95, 1.0]).unwrap();
    let basis = build_basis(&g, &b).unwrap();
    let projections = project_archive(&archive, &basis).unwrap();
    println!("per-point crowding density:");
    for (i, pt) in projections.iter().enumerate() {
        let d = density_at(&projections, &influence, &pt.y).unwrap();
        println!("  archive[{i}] f={:?} density={d:.4}", archive.entry(i).f.as_slice());
    }

    let reference = select_reference(&archive, &influence, false).unwrap();
    println!("\nselected reference: archive[{reference}] (the isolated point)");
    assert_eq!(reference, 4);

    // The surface used for plotting: grid coordinates on the projection
    // hyperplane plus the density value.
    let surface = density_surface(&archive, &influence, false).unwrap();
    let csv = surface.to_csv();
    let preview: Vec<&str> = csv.lines().take(4).collect();
    println!("\ndensity surface CSV preview:");
    for line in preview {
        println!("  {line}");
    }
}
