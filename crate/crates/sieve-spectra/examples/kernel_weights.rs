//! The explicit weight-kernel family: convolution powers of the unit
//! indicator, the rescaled bump, and the weight W(m; t) with its integrals.
//!
//!     cargo run --example kernel_weights

use sieve_spectra::kernel::{build_weight, conv_power, conv_power_closed_form};

fn main() -> sieve_spectra::Result<()> {
    println!("convolution powers 1^(*m) at t = 0 (recursion vs closed form):");
    for m in 2..=8 {
        let c = conv_power(m)?;
        println!(
            "  m={m}: {:>12.8} vs {:>12.8}",
            c.eval(0.0),
            conv_power_closed_form(m, 0.0)
        );
    }
    let c5 = conv_power(5)?;
    println!("\n1^(*5)(0) = {} (= 115/12 = {})", c5.eval(0.0), 115.0 / 12.0);
    println!("total mass of 1^(*5): {} (= 2^5)", c5.integrate(-5.0, 5.0));

    let kernel = build_weight(5)?;
    println!("\nweight W(5; t) = p_5(1/t)/t:");
    for t in [0.9, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.1] {
        println!("  W(5; {t:3}) = {:+.10}", kernel.eval(t));
    }
    println!("\nint p_5            = {:.12}", kernel.pm().integrate(0.0, 2.0));
    println!("J(W) = int W/t     = {:.12}  (exactly 1 for this family)", kernel.j());
    println!("int W              = {:.12}", kernel.integral0());
    println!(
        "(6/pi^2) int W     = {:.12}  (the 0.816... constant)",
        6.0 / (std::f64::consts::PI * std::f64::consts::PI) * kernel.integral0()
    );
    Ok(())
}
