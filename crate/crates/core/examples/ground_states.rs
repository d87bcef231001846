//! Ground states of the two Hamiltonian families, their mode counts and the
//! annihilation residual under grid refinement.

use ptdiff::ground_state::{annihilation_residual, build_ground_state, count_modes, Family};
use ptdiff::operator::Grid1D;
use ptdiff::transform::PointTransform;

fn main() {
    let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    for alpha in [0.0, 0.5, 1.0] {
        for family in [Family::H1H3, Family::H2H4] {
            let grid = Grid1D::symmetric(3.0, 3000).unwrap();
            let gs = build_ground_state(family, alpha, &pt, &grid).unwrap();
            let coarse = annihilation_residual(&gs);
            let fine = annihilation_residual(&build_ground_state(family, alpha, &pt, &Grid1D::symmetric(3.0, 6000).unwrap()).unwrap());
            println!(
                "alpha = {alpha}, {family}: {} mode(s), residual {coarse:.2e} -> {fine:.2e} (ratio {:.2})",
                count_modes(&gs),
                coarse / fine
            );
        }
    }

    // A few rows of the partner state, which is bimodal for this transform.
    let gs = build_ground_state(Family::H2H4, 0.0, &pt, &Grid1D::symmetric(3.0, 12).unwrap()).unwrap();
    let mut buf = Vec::new();
    gs.write_csv(&mut buf).unwrap();
    print!("{}", String::from_utf8(buf).unwrap());
}
