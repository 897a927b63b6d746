//! Free streaming of `1 + A cos(kx)` Maxwellian data: the exact density
//! decays, an equidistant velocity grid recurs with period 2π/(kΔv) and
//! Gauss-Hermite collocation recurs too.

use std::f64::consts::PI;

use filtered_hme::diagnostics::recurrence_time_estimate;
use filtered_hme::reference::{dvm_density, dvm_half_width, dvm_period, exact_free_streaming_density, HermiteCollocation};

fn main() -> filtered_hme::Result<()> {
    let (a, k, dv, m) = (0.5, 0.5, PI / 10.0, 50);
    let j = dvm_half_width(dv);
    let h = HermiteCollocation::new(m)?;
    println!("DVM period {:.3}, Hermite estimate (pi/k)sqrt(M) = {:.3}", dvm_period(k, dv), recurrence_time_estimate(m, k));
    println!("{:>5} {:>11} {:>11} {:>11}", "t", "exact", "dvm", "hermite");
    let amp = |g: &dyn Fn(f64) -> f64| (0..128).map(|i| (g(i as f64 * 2.0 * PI / k / 128.0) - 1.0).abs()).fold(0.0, f64::max);
    for i in 0..=30 {
        let t = 2.0 * i as f64;
        println!(
            "{t:5.1} {:11.3e} {:11.3e} {:11.3e}",
            amp(&|x| exact_free_streaming_density(x, t, a, k)),
            amp(&|x| dvm_density(x, t, a, k, dv, j)),
            amp(&|x| h.density(x, t, a, k)),
        );
    }
    Ok(())
}
