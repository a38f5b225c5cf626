//! Rectangle spectra: spectral positions, the Courant-sharp window of λ₂,₂
//! and the γ-system behind the negative DtN direction of the cross.

use spectral_partitions::rect::{courant_sharp_22, dtn_negative_profile_22, rect_spectral_position, solve_gamma_pair, AspectRatio};

fn main() -> spectral_partitions::Result<()> {
    let three_halves = AspectRatio::rational(3, 2);
    let pos = rect_spectral_position(2, 2, three_halves)?;
    println!("α = 3/2: λ₂,₂ sits at position {} (deficiency {})", pos.position, pos.position - 4);

    for (p, q) in [(1, 2), (3, 5), (1, 1), (5, 3), (2, 1)] {
        let ar = AspectRatio::squared_rational(p, q);
        println!("α² = {p}/{q}: Courant sharp {}", courant_sharp_22(ar)?);
    }

    let g = solve_gamma_pair(three_halves)?;
    println!("γ1 = {:.6}, γ2 = {:.6}, σ̄ = {:.6}", g.gamma1, g.gamma2, g.sigma_bar);
    let prof = dtn_negative_profile_22(three_halves, 33)?;
    for arm in &prof.arms {
        println!("arm {} ({:?}): sign {} at the boundary, {} at the centre", arm.arc, arm.kind, arm.sign_at_boundary, arm.sign_at_center);
    }
    Ok(())
}
