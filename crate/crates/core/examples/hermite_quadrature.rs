//! Gauss-Hermite nodes and weights for the standard normal weight, and the
//! largest zero that bounds the characteristic speeds.

use filtered_hme::hermite::{hermite_eval, max_hermite_zero, HermiteTable};

fn main() -> filtered_hme::Result<()> {
    let t = HermiteTable::new(6)?;
    println!("n = 6");
    for (z, w) in t.zeros.iter().zip(&t.weights) {
        println!("  z = {z:+.15}  w = {w:.15e}  He_6(z) = {:+.1e}", hermite_eval(6, *z));
    }
    println!("  sum w = {:.16}", t.weights.iter().sum::<f64>());
    println!("  E[z^4] = {:.16} (exact 3)", t.expect(|z| z.powi(4)));
    println!("  E[z^10] = {:.12} (exact 945)", t.expect(|z| z.powi(10)));

    println!("\nlargest zero of He_n against sqrt(4n+2):");
    for n in [4, 11, 51, 101, 301] {
        println!("  n = {n:3}  z_max = {:.6}  sqrt(4n+2) = {:.6}", max_hermite_zero(n)?, (4.0 * n as f64 + 2.0).sqrt());
    }
    Ok(())
}
