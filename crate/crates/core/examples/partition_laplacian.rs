//! Discrete partition Laplacian: a bipartite cut leaves the spectrum of the
//! square unchanged, while a slit changes it. Nodal domains of the result.

use spectral_partitions::partition::{build_rect_partition, rect_cross, Segment};
use spectral_partitions::plap::{assemble_plap, extract_nodal_partition, solve_eigs};
use std::f64::consts::PI;

fn main() -> spectral_partitions::Result<()> {
    let n = 16;
    let square = build_rect_partition(1.0, &[])?;
    let cross = rect_cross(1.0)?;
    let slit = build_rect_partition(1.0, &[Segment::new([PI / 2.0, 0.0], [PI / 2.0, PI / 2.0])])?;
    for (name, p) in [("square", &square), ("cross", &cross), ("slit", &slit)] {
        let op = assemble_plap(p, n)?;
        let res = solve_eigs(&op, 6)?;
        let values: Vec<String> = res.pairs.iter().map(|e| format!("{:.8}", e.value)).collect();
        println!("{name:6}: {}", values.join(", "));
        let nodal = extract_nodal_partition(&res.pairs[3].vector, &op)?;
        println!("        4th eigenfunction: {} nodal domains, λ per domain {:?}", nodal.domain_count, nodal.domain_lambdas);
    }
    Ok(())
}
