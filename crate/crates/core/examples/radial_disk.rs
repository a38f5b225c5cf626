//! Radial k-partitions of the disk: energies, deficiencies and the explicit
//! negative directions of the Hessian for k ≥ 6.

use spectral_partitions::disk::{negative_form_even, radial_partition_data, spectral_flow_odd};

fn main() -> spectral_partitions::Result<()> {
    for k in 2..=10 {
        let d = radial_partition_data(k)?;
        let extra = match k {
            k if k >= 6 && k % 2 == 0 => format!("even form {:.6}", negative_form_even(k)?),
            k if k >= 7 => {
                let s = spectral_flow_odd(k)?;
                format!("odd form {:.6}, σ = {:.6}", s.form, s.sigma)
            }
            _ => String::new(),
        };
        println!("k = {k:2}: λ = {:9.5}, position {:2}, deficiency {} {extra}", d.energy, d.position, d.deficiency);
    }
    Ok(())
}
