//! Two-dimensional Landau damping on a reduced grid.

use filtered_hme::diagnostics::find_peaks;
use filtered_hme::simulation::{run, Preset, SimConfig, TimeSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = SimConfig {
        m: 12,
        nx: 32,
        ny: 32,
        t_end: 10.0,
        ..SimConfig::preset(Preset::Landau2d)
    };
    let r = run(&c)?;
    let s = &r.series;
    let peaks = find_peaks(&s.t, &s.e);
    println!("{} steps in {:.1} s", r.steps, r.wall_seconds);
    for (t, v) in peaks.times.iter().zip(&peaks.values) {
        println!("  peak t = {t:6.3}  ln E = {:.4}", v.ln());
    }
    println!("mass drift {:.1e}", TimeSeries::drift(&s.mass, s.mass[0]));
    println!("momentum drift x {:.1e}, y {:.1e}", TimeSeries::drift(&s.momentum, s.mass[0]), TimeSeries::drift(&s.momentum_y, s.mass[0]));
    println!("energy drift (D rho u_th^2 form) {:.1e}", TimeSeries::drift(&s.energy, s.energy[0]));
    Ok(())
}
