use droplets::energy::GammaMatrix;
use droplets::partition::{self, signature_of};
use std::f64::consts::PI;
use std::time::Instant;

fn show(label: &str, r: &partition::MinimizeResult) {
    let sig = signature_of(&r.configuration);
    println!(
        "{label}: E = {:.6}, bubbles = {}, sig = t{} d{:?} s{:?}, scanned {}, pruned {}, cap_sat {}",
        r.energy,
        r.configuration.len(),
        sig.n_triple,
        sig.n_double,
        sig.n_single,
        r.signatures_scanned,
        r.signatures_pruned,
        r.cap_saturated
    );
}

fn main() {
    let t0 = Instant::now();
    let r = partition::minimize_e0_bar([40.0, 0.0, 0.0], &GammaMatrix::identity(), None, 42).unwrap();
    show("M=(40,0,0) G=I", &r);
    let expect = 2.0 * (40.0 * PI * 5.0f64).sqrt() + 1600.0 / (4.0 * PI * 5.0);
    println!("  expect f(5) = {:.6}, diff = {:.2e}, time {:?}", expect, (r.energy - expect).abs(), t0.elapsed());
    for b in r.configuration.bubbles() { println!("  bubble {:?}", b.masses()); }

    let t0 = Instant::now();
    let r = partition::minimize_e0_bar([1.0, 1.0, 1.0], &GammaMatrix::zero(), None, 42).unwrap();
    show("M=(1,1,1) G=0", &r);
    println!("  time {:?}", t0.elapsed());

    let t0 = Instant::now();
    let r = partition::minimize_e0_bar([PI, 0.0, 0.0], &GammaMatrix::identity(), None, 42).unwrap();
    show("M=(pi,0,0) G=I", &r);
    println!("  time {:?}", t0.elapsed());

    // KKT spread on the first result
    let spread = partition::kkt_residual(&r.configuration, &GammaMatrix::identity()).unwrap();
    println!("  kkt spread: {:?}", spread);

    // Coexistence at (1,1,1)
    let t0 = Instant::now();
    let p = partition::coexistence_params(1, 1, 1).unwrap();
    println!("coexist(1,1,1): M = {:?}", p.m_totals);
    let r = partition::minimize_e0_bar(p.m_totals, &p.gamma, Some(12), 42).unwrap();
    show("coexist(1,1,1) optimum", &r);
    println!("  time {:?}", t0.elapsed());
}
