//! Bessel functions and zeros, including half-integer orders.

use spectral_partitions::numerics::{bessel_j, bessel_zero};

fn main() -> spectral_partitions::Result<()> {
    for order in [0.0, 0.5, 1.5, 3.0] {
        let zeros: Vec<String> = (1..=3).map(|n| bessel_zero(order, n).map(|z| format!("{z:.10}"))).collect::<Result<_, _>>()?;
        println!("j_{{{order},n}}, n = 1..3: {}", zeros.join(", "));
    }
    // J_{1/2}(x) = sqrt(2/(πx)) sin x.
    let x = 2.3;
    let closed = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
    println!("J_1/2({x}) = {:.15} (closed form {closed:.15})", bessel_j(0.5, x)?);
    Ok(())
}
