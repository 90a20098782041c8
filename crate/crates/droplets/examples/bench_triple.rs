use droplets::geometry::{self, MassTriple, TripleCache};
use std::time::Instant;

fn main() {
    let mut cache = TripleCache::new();
    // Cold solves across a grid
    let t0 = Instant::now();
    let mut n = 0;
    for i in 0..10 {
        for j in 0..10 {
            let a = 0.05 + 0.095 * i as f64;
            let b = 0.04 + 0.09 * j as f64;
            let m = MassTriple::new([1.0, a, b.min(a)]).unwrap();
            let g = geometry::solve_cluster_cached(&mut cache, &m).unwrap();
            assert!(g.perimeter > 0.0);
            n += 1;
        }
    }
    println!("grid {} solves: {:?} ({:?}/solve)", n, t0.elapsed(), t0.elapsed() / n);

    // Warm repeated solves with small perturbations (optimizer pattern)
    let t0 = Instant::now();
    let mut total = 0.0;
    let reps = 2000;
    for k in 0..reps {
        let eps = 1e-6 * (k % 17) as f64;
        let m = MassTriple::new([1.0, 0.6 + eps, 0.3 + 0.5 * eps]).unwrap();
        let g = geometry::solve_cluster_cached(&mut cache, &m).unwrap();
        total += g.perimeter;
    }
    println!("warm {} solves: {:?} ({:?}/solve), sum {}", reps, t0.elapsed(), t0.elapsed() / reps, total);

    // Extreme ratio
    let t0 = Instant::now();
    let m = MassTriple::new([1.0, 1.0, 1e-8]).unwrap();
    let g = geometry::solve_cluster_cached(&mut cache, &m).unwrap();
    println!("extreme 1e-8 solve: {:?}, p = {}", t0.elapsed(), g.perimeter);
    let checks = geometry::validate(&g);
    println!("checks: {:?}", checks);

    // validate on moderate case
    let m = MassTriple::new([2.0, 1.0, 0.5]).unwrap();
    let g = geometry::solve_cluster_cached(&mut cache, &m).unwrap();
    println!("checks moderate: {:?}", geometry::validate(&g));

    // double checks
    let g = geometry::solve_double(1.0, 0.3).unwrap();
    println!("double checks: {:?}", geometry::validate(&g));
    // single
    let g = geometry::solve_single(2.0).unwrap();
    println!("single checks: {:?}", geometry::validate(&g));
}
