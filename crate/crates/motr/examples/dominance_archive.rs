//! Pareto dominance and the nondominated archive.
//!
//! Shows how objective vectors compare under dominance and how the archive
//! keeps exactly the nondominated subset as points stream in, evicting
//! entries the moment something better arrives.
//!
//! Run with `cargo run --example dominance_archive`.

use motr::core::{Archive, ArchiveEntry, DecisionVector, Dominance, ObjectiveVector, dominance};

fn entry(x: &[f64], f: &[f64]) -> ArchiveEntry {
    ArchiveEntry::new(
        DecisionVector::new(x.to_vec()).unwrap(),
        ObjectiveVector::new(f.to_vec()).unwrap(),
        0.5,
        0,
    )
    .unwrap()
}

fn main() {
    let a = ObjectiveVector::new(vec![1.0, 4.0]).unwrap();
    let b = ObjectiveVector::new(vec![2.0, 5.0]).unwrap();
    let c = ObjectiveVector::new(vec![3.0, 1.0]).unwrap();

    println!("dominance({:?}, {:?}) = {:?}", a.as_slice(), b.as_slice(), dominance(&a, &b).unwrap());
    println!("dominance({:?}, {:?}) = {:?}", a.as_slice(), c.as_slice(), dominance(&a, &c).unwrap());
    assert_eq!(dominance(&a, &b).unwrap(), Dominance::Dominates);
    assert_eq!(dominance(&a, &c).unwrap(), Dominance::Incomparable);

    // Stream points into the archive; dominated ones bounce, and a strong
    // newcomer evicts everything it beats.
    let mut archive = Archive::new();
    let stream = [
        (vec![0.0, 0.0], vec![3.0, 3.0]),
        (vec![0.1, 0.0], vec![2.0, 4.0]),
        (vec![0.2, 0.0], vec![4.0, 2.0]),
        (vec![0.3, 0.0], vec![5.0, 5.0]), // dominated by everything above
        (vec![0.4, 0.0], vec![1.0, 1.0]), // dominates everything above
    ];
    for (x, f) in stream {
        let outcome = archive.insert(entry(&x, &f)).unwrap();
        println!("insert f={f:?} -> {outcome:?}, archive size {}", archive.len());
    }
    assert_eq!(archive.len(), 1);
    assert_eq!(archive.entries()[0].f.as_slice(), &[1.0, 1.0]);

    println!("\nfinal archive as CSV:\n{}", archive.to_csv());
}
