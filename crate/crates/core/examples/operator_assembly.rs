//! Assemble the four operator orderings and check their structure.

use ptdiff::operator::{adjoint_residual, assemble, pair_adjoint_residual, spectrum_check, Grid1D, OperatorSpec, Variant};
use ptdiff::transform::PointTransform;

fn main() {
    let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let grid = Grid1D::symmetric(2.0, 256).unwrap();
    let alpha = 0.3;
    println!("W = x + x^3, alpha = {alpha}, n = {}", grid.n);
    println!("{:<8} {:>14} {:>14} {:>12}", "variant", "adjoint", "max eig", "measure pow");
    for variant in [Variant::Delta1, Variant::Delta2, Variant::Delta3, Variant::Delta4] {
        let op = assemble(&OperatorSpec::new(variant, alpha, pt.clone(), 1.0).unwrap(), &grid).unwrap();
        println!(
            "{:<8} {:>14.3e} {:>14.3e} {:>12.2}",
            variant.to_string(),
            adjoint_residual(&op),
            spectrum_check(&op).unwrap(),
            variant.measure_power(alpha)
        );
    }

    let spec3 = OperatorSpec::new(Variant::Delta3, alpha, pt.clone(), 1.0).unwrap();
    let spec4 = OperatorSpec::new(Variant::Delta4, alpha, pt, 1.0).unwrap();
    let (a3, a4) = (assemble(&spec3, &grid).unwrap(), assemble(&spec4, &grid).unwrap());
    println!("transpose(Delta3) vs Delta4: {:.3e}", pair_adjoint_residual(&a3, &a4));

    // The first rows of the band as CSV.
    let mut buf = Vec::new();
    a3.write_csv(&mut buf).unwrap();
    for line in String::from_utf8(buf).unwrap().lines().take(4) {
        println!("{line}");
    }
}
