//! Evaluate, differentiate and invert a few point transformations.

use ptdiff::transform::PointTransform;

fn main() {
    let transforms = [
        ("identity", PointTransform::identity()),
        ("x + x^3", PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap()),
        ("sgn(x)|x|^3", PointTransform::monomial(3.0).unwrap()),
        ("sgn(x)|x|^0.5", PointTransform::monomial(0.5).unwrap()),
    ];
    println!("{:<14} {:>6} {:>12} {:>12} {:>12}", "transform", "x", "W(x)", "dW/dx", "inverse");
    for (name, pt) in &transforms {
        for x in [-1.5, 0.1, 1.0, 2.0] {
            let w = pt.evaluate(x);
            let d = pt
                .derivative(x)
                .map_or_else(|e| format!("({e})"), |v| format!("{v:.6}"));
            let back = pt.invert(w, 1e-12).unwrap();
            println!("{name:<14} {x:>6} {w:>12.6} {d:>12} {back:>12.6}");
        }
    }

    // Invalid candidates are rejected with a reason.
    for coeffs in [vec![1.0, 0.0, -1.0], vec![1.0, 2.0], vec![0.0, 3.0, 1.0]] {
        match PointTransform::polynomial(&coeffs) {
            Ok(_) => println!("{coeffs:?}: accepted"),
            Err(e) => println!("{coeffs:?}: {e}"),
        }
    }
}
