//! Filter factors sigma(n) for the three filters, and the four validation
//! conditions for each.

use filtered_hme::filter::{validate_filter, FilterKind, FilterSpec};

fn main() -> filtered_hme::Result<()> {
    let m = 50;
    let dt = 2e-3;
    let kinds = [FilterKind::Exponential, FilterKind::HouLi, FilterKind::QuasiTimeConsistent];
    println!("  n   {:>13} {:>13} {:>13}", "exponential", "hou_li", "quasi");
    for n in (0..=m).step_by(5).chain([2, 33, 34, 49]) {
        let row: Vec<String> = kinds
            .iter()
            .map(|&k| format!("{:13.6e}", FilterSpec::of_kind(k).factor(n, m, dt)))
            .collect();
        println!("{n:3}   {}", row.join(" "));
    }
    for k in kinds {
        let report = validate_filter(&FilterSpec::of_kind(k), m, dt)?;
        println!("\n{k}:\n{report}");
    }
    // The quasi filter's damping per unit time barely depends on dt.
    let q = FilterSpec::of_kind(FilterKind::QuasiTimeConsistent);
    for dt in [1e-3, 2.5e-4] {
        let steps = (0.1 / dt) as i32;
        println!("quasi dt = {dt:e}: sigma(M)^(0.1/dt) = {:.6e}", q.factor(m, m, dt).powi(steps));
    }
    Ok(())
}
