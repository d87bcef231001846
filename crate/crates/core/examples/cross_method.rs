//! Three solvers on the same problem: W-domain closed form, spectral and
//! Crank–Nicolson finite differences.

use ptdiff::density::InitialCondition;
use ptdiff::operator::{Grid1D, OperatorSpec, Variant};
use ptdiff::solvers::{solve, FdOptions, Method, SolveRequest, SpectralOptions};
use ptdiff::transform::PointTransform;

fn main() {
    let base = SolveRequest {
        spec: OperatorSpec::new(Variant::Delta3, 0.0, PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap(), 1.0)
            .unwrap(),
        grid: Grid1D::symmetric(5.0, 4000).unwrap(),
        ic: InitialCondition::narrow(),
        times: vec![0.05, 0.2, 1.0],
        method: Method::WClosedForm,
    };
    let closed = solve(&base).unwrap();
    for method in [
        Method::Spectral(SpectralOptions::default()),
        Method::FiniteDifference(FdOptions {
            monitor: true,
            ..FdOptions::default()
        }),
    ] {
        let name = method.name();
        let other = solve(&SolveRequest { method, ..base.clone() }).unwrap();
        for (a, b) in closed.snapshots.iter().zip(&other.snapshots) {
            println!("t = {:<5} closed form vs {name}: {:.2e}", a.time, a.max_abs_diff(b));
        }
    }
    for m in &closed.mass {
        println!("t = {:<5} mass {:.12} min {:.1e}", m.t, m.mass, m.min_value);
    }
}
