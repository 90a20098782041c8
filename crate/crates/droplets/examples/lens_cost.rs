use droplets::geometry::{self, MassTriple};

fn main() {
    // Marginal type-1 cost 1/r1 for a lens between companions (1.44, 2.13).
    for m1 in [0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.9] {
        let g = geometry::solve_cluster(&MassTriple::new([m1, 1.44, 2.13]).unwrap()).unwrap();
        let k1 = g.outer_curvature(0).unwrap();
        for g1 in [64.0, 256.0] {
            let lam = g1 * m1 / (2.0 * std::f64::consts::PI) + k1;
            print!("  g1={g1}: lam={lam:.3}");
        }
        println!("   m1={m1}: 1/r1={k1:.4}");
    }
}
