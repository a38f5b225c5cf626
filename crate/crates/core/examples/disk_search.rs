//! Finds the transition radius of the six-fold symmetric disk candidate and
//! checks it on the reflected partition. Takes about a minute.

use spectral_partitions::search::{disk_cut_search, DiskSearchOptions};

fn main() -> spectral_partitions::Result<()> {
    let r = disk_cut_search(&DiskSearchOptions::default())?;
    println!("a* = {:.8}, energy {:.6} vs radial {:.6}", r.parameters["a"], r.energy, r.reference_energy);
    println!("position {} (multiplicity {}), nodal domains {}", r.position, r.multiplicity, r.domains);
    for n in &r.notes {
        println!("  {n}");
    }
    Ok(())
}
