//! Re-expanding a distribution about a different velocity and thermal
//! speed leaves its raw moments untouched.

use std::sync::Arc;

use filtered_hme::moments::{evaluate_distribution, raw_moments, rebase, MomentState};
use filtered_hme::multi_index::MultiIndexSet;

fn main() -> filtered_hme::Result<()> {
    let set = Arc::new(MultiIndexSet::new(1, 12)?);
    let mut coeffs = vec![0.0; 13];
    coeffs[0] = 1.0;
    coeffs[3] = 0.05;
    coeffs[4] = -0.02;
    let f = MomentState::from_parts(set, &[0.3], 1.1, coeffs)?;
    let g = rebase(&f, &[0.0], 1.0)?;
    let back = rebase(&g, &[0.3], 1.1)?;

    let (mf, mg) = (raw_moments(&f, 6)?, raw_moments(&g, 6)?);
    println!("raw moments before / after rebase to (u, u_th) = (0, 1):");
    for k in 0..=6 {
        println!("  m_{k} = {:+.15e}  {:+.15e}", mf[k], mg[k]);
    }
    println!("\nf(v) in both bases:");
    for v in [-2.0, -0.5, 0.0, 1.0, 2.5] {
        println!("  v = {v:+.1}  {:.15e}  {:.15e}", evaluate_distribution(&f, &[v]), evaluate_distribution(&g, &[v]));
    }
    let err = f.coeffs.iter().zip(&back.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("\nround trip max coefficient error: {err:.2e}");
    println!("new basis: u = {:?}, u_th = {}, rho = {}", g.u, g.uth, g.rho());
    Ok(())
}
