//! Boundary shape-derivative formulas compared with finite differences of
//! the discrete eigenvalue on mapped meshes.

use spectral_partitions::variation::{hadamard_check, Family};

fn main() -> spectral_partitions::Result<()> {
    for (family, order) in [("rect-width", 1), ("disk-dilation", 1), ("disk-dilation", 2), ("cross-shear", 1)] {
        let rep = hadamard_check(Family::parse(family)?, order, 12)?;
        for c in &rep.checks {
            println!(
                "{family} order {order} [{}]: formula {:.10}, fd {:.10}, reference {:?}",
                c.label, c.formula, c.finite_difference, c.reference
            );
        }
    }
    Ok(())
}
