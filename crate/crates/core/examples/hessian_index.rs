//! Index of the partition-energy Hessian through the two-sided DtN form:
//! the square cross is stable, the 3π/2 × π cross has one negative direction.

use spectral_partitions::partition::{cross_rule, orient_interfaces, rect_cross};
use spectral_partitions::variation::{arc_polynomial_basis, criticality, dtn_form_matrix, groundstate_data};

fn main() -> spectral_partitions::Result<()> {
    let n = 12;
    for alpha in [1.0, 1.5] {
        let p = rect_cross(alpha)?;
        let frame = orient_interfaces(&p, &cross_rule(alpha))?;
        let gs = groundstate_data(&p, n)?;
        let crit = criticality(&p, &gs)?;
        for per_arc in [2, 4] {
            let basis = arc_polynomial_basis(&p, per_arc, 24)?;
            let rep = dtn_form_matrix(&p, &frame, &gs, &basis, n)?;
            println!(
                "α = {alpha}: basis {:2} (constrained {:2}) index {} nullity {}, criticality residual {:.1e}",
                rep.basis_size, rep.constrained_size, rep.n_minus, rep.n_zero, crit.residual
            );
        }
    }
    Ok(())
}
