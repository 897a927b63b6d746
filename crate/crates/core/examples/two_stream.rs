//! Two-stream instability: filtered moment method against the
//! discrete-velocity reference on a coarse grid.

use filtered_hme::diagnostics::fit_line;
use filtered_hme::reference::dvm_vlasov_run;
use filtered_hme::simulation::{run, Preset, SimConfig, TimeSeries};

fn growth(s: &TimeSeries, window: (f64, f64)) -> f64 {
    let (t, y): (Vec<f64>, Vec<f64>) = s
        .t
        .iter()
        .zip(&s.e)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    fit_line(&t, &y).map_or(f64::NAN, |f| f.rate)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = SimConfig {
        nx: 200,
        m: 40,
        t_end: 40.0,
        ..SimConfig::preset(Preset::TwoStream)
    };
    let hme = run(&c)?;
    let dvm = dvm_vlasov_run(&c)?;
    println!("HME {} steps {:.1} s, DVM {} steps {:.1} s", hme.steps, hme.wall_seconds, dvm.steps, dvm.wall_seconds);
    println!("{:>6} {:>12} {:>12}", "t", "ln E hme", "ln E dvm");
    for i in 0..=20 {
        let t = 2.0 * i as f64;
        let at = |s: &TimeSeries| s.t.iter().position(|&x| x >= t).map_or(f64::NAN, |j| s.e[j].ln());
        println!("{t:6.1} {:12.4} {:12.4}", at(&hme.series), at(&dvm.series));
    }
    let w = (5.0, 15.0);
    println!("growth rate on {w:?}: hme {:.4}, dvm {:.4}", growth(&hme.series, w), growth(&dvm.series, w));
    Ok(())
}
