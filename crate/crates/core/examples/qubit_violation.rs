//! Where the two-qubit engine beats the standard bound, for a few angles.

use otto_tur::qubit::violation_scan;

fn main() {
    for frac in [0.1, 0.25, 0.4, 0.5] {
        let scan = violation_scan(frac * std::f64::consts::PI, 100);
        println!(
            "theta = {frac:.2} pi: violated fraction {:.4}, saturable-bound failures {}",
            scan.area_fraction(),
            scan.saturable_failures()
        );
    }
}
