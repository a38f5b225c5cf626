//! Locates the non-bipartite 4-partition of the 3π/2 × π rectangle: two
//! slits whose tips are triple points of the nodal set. Takes about 30 s.

use spectral_partitions::search::{rect_cut_search, RectSearchOptions};

fn main() -> spectral_partitions::Result<()> {
    let r = rect_cut_search(&RectSearchOptions::default())?;
    println!("tip {:?}", r.parameters);
    println!("energy {:.8} vs cross {:.8}, residual {:.1e}", r.energy, r.reference_energy, r.residual);
    println!("position {}, nodal domains {}, domain λ {:?}", r.position, r.domains, r.domain_lambdas);
    Ok(())
}
