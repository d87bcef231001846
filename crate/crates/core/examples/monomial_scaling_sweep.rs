//! Late-time MSD exponents for monomial transforms: MSD_x ∝ t^(1/β).

use ptdiff::density::Coordinate;
use ptdiff::runner::tools::monomial_scaling_request;
use ptdiff::scaling::{classify_regime, fit_scaling, MsdSeries};
use ptdiff::solvers::solve;

fn main() {
    for beta in [0.5, 2.0, 3.0] {
        let (req, window) = monomial_scaling_request(beta, 1.0).unwrap();
        let sol = solve(&req).unwrap();
        let series = MsdSeries::from_solution(&sol).unwrap();
        let x = fit_scaling(&series, Coordinate::X, window).unwrap();
        let w = fit_scaling(&series, Coordinate::W, window).unwrap();
        println!(
            "beta = {beta}: n = {}, msd_x exponent {:.4} (1/beta = {:.4}), msd_w exponent {:.4}, {:?}",
            req.grid.n,
            x.exponent,
            1.0 / beta,
            w.exponent,
            classify_regime(x.exponent).unwrap()
        );
    }
}
