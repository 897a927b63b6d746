//! Linear Landau damping, k = 0.3: fitted damping rate and frequency
//! against -0.0126 and 1.1598.
//!
//! cargo run --release --example landau_damping_1d -- [N] [hll|upwind] [filter]

use filtered_hme::diagnostics::{estimate_frequency, find_peaks, fit_damping_rate};
use filtered_hme::simulation::{run, Preset, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let mut c = SimConfig::preset(Preset::Landau1d);
    c.nx = args.get(1).map_or(Ok(200), |s| s.parse())?;
    if let Some(f) = args.get(2) {
        c.flux = f.parse()?;
    }
    if let Some(f) = args.get(3) {
        c.filter.kind = f.parse()?;
    }
    let r = run(&c)?;
    let s = &r.series;
    let peaks = find_peaks(&s.t, &s.e);
    let (ta, tb) = c.fit_window();
    let fit = fit_damping_rate(&peaks, (ta, tb))?;
    let omega = estimate_frequency(&peaks.window(ta, tb))?;
    println!("N = {}, M = {}, flux = {}, filter = {}", c.nx, c.m, c.flux, c.filter.kind);
    println!("{} steps in {:.1} s", r.steps, r.wall_seconds);
    println!("gamma = {:.5} (exact -0.0126), omega = {:.5} (exact 1.1598)", fit.rate, omega);
    let mass = (s.mass.last().unwrap() - s.mass[0]).abs() / s.mass[0];
    let energy = (s.energy.last().unwrap() - s.energy[0]).abs() / s.energy[0];
    println!("relative mass drift {mass:.1e}, energy drift {energy:.1e}");
    Ok(())
}
