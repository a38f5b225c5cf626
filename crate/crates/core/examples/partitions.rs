//! Builds rectangle and disk partitions and inspects their combinatorics.

use spectral_partitions::partition::{build_radial_partition, check_bipartite, cross_rule, orient_interfaces, rect_cross, ArcSide};

fn main() -> spectral_partitions::Result<()> {
    let cross = rect_cross(1.5)?;
    println!("cross on (0, 3π/2) × (0, π): {} subdomains, {} arcs", cross.subdomains.len(), cross.interfaces.len());
    println!("adjacency {:?}", cross.adjacency());
    println!("bipartite colouring {:?}", check_bipartite(&cross));

    let frame = orient_interfaces(&cross, &cross_rule(1.5))?;
    for a in &cross.interfaces {
        let (l, r) = (frame.chi(a.id, ArcSide::Left), frame.chi(a.id, ArcSide::Right));
        println!("arc {} between {} and {}: χ = ({l:+}, {r:+})", a.id, a.left, a.right);
    }

    for k in 2..=7 {
        let p = build_radial_partition(k)?;
        println!("radial {k}-partition bipartite: {}", check_bipartite(&p).is_some());
    }
    Ok(())
}
