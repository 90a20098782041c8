use droplets::energy::GammaMatrix;
use droplets::partition::{self, signature_of};
use std::f64::consts::PI;
use std::time::Instant;

fn trial(label: &str, m: [f64; 3], g: [f64; 3], cap: usize, verbose: bool) {
    let gamma = GammaMatrix::diagonal(g).unwrap();
    let t0 = Instant::now();
    match partition::minimize_e0_bar(m, &gamma, Some(cap), 42) {
        Ok(r) => {
            let sig = signature_of(&r.configuration);
            let m1p = 8.0 * PI / g[0].powf(2.0 / 3.0);
            println!(
                "{label}: M1/m1+={:.3} | t={} d={:?} s={:?} | counts {:?} | {:?} cap_sat {}",
                m[0] / m1p, sig.n_triple, sig.n_double, sig.n_single,
                [sig.lobe_count(0), sig.lobe_count(1), sig.lobe_count(2)],
                t0.elapsed(), r.cap_saturated
            );
            if verbose {
                for b in r.configuration.bubbles() {
                    let mm = b.masses();
                    println!("    [{:.3}, {:.3}, {:.3}]", mm[0], mm[1], mm[2]);
                }
            }
        }
        Err(e) => println!("{label}: ERR {e}"),
    }
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    let m1p = 2.0 * PI;
    match which.as_str() {
        // formula: t_emp = round(M1/1.7); M2 = t*0.083 + n2*0.068; M3 = t*0.105 + n2*0.094 + (n3+0.35)*0.089
        "n1" => trial("f-N111", [1.07 * m1p, 0.400, 0.634], [8.0, 800.0, 800.0], 12, true),
        "n3" => trial("f-N212", [2.07 * m1p, 0.732, 1.174], [8.0, 800.0, 800.0], 12, false),
        _ => {}
    }
}
