//! Fractal-diffusion parameters (c, g) mapped to monomial transforms, with
//! one simulated check of the predicted exponent.

use ptdiff::runner::tools::run_map_osp;
use ptdiff::scaling::{osp_to_pt, pt_to_osp};

fn main() {
    println!("{:>5} {:>5} {:>7} {:>9} {:>9}", "c", "g", "beta", "msd exp", "g again");
    for (c, g) in [(1.0, 0.0), (1.0, 2.0), (2.0, 2.0), (1.5, 0.5), (2.0, 1.0)] {
        match osp_to_pt(c, g, 1.0) {
            Ok((_, p)) => println!(
                "{c:>5} {g:>5} {:>7.3} {:>9.4} {:>9}",
                p.beta,
                1.0 / p.beta,
                pt_to_osp(p.beta, c)
            ),
            Err(e) => println!("{c:>5} {g:>5} rejected: {e}"),
        }
    }
    println!("c = 3, g = 2: {}", osp_to_pt(3.0, 2.0, 1.0).unwrap_err());

    let report = run_map_osp(1.0, 2.0, 1.0, true).unwrap();
    let sim = report.simulation.unwrap();
    println!(
        "c = 1, g = 2 simulated: exponent {:.4} vs expected {:.4} ({:?})",
        sim.fitted_exponent, report.expected_msd_exponent, report.regime
    );
}
