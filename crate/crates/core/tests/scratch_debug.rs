use qbrayton::*;

#[test]
#[ignore]
fn debug_closure_drift() {
    let tol = Tolerances::default();
    for j_over_b in [5.554, 6.0] {
        let anchor =
            ThermalPoint::new(Substance::xx_pair(1.0, j_over_b).unwrap(), 2.0).unwrap();
        let y_a = anchor.substance().coordinate(Coordinate::Y).unwrap();
        let f_held = anchor.force(Coordinate::Y).unwrap();
        // stage 1
        let stage1 = build_isobar(&anchor, Coordinate::Y, y_a / 3.0, 257, &tol).unwrap();
        let b_corner = stage1.last();
        // worst per-sample force residual on stage 1
        let mut worst = 0.0f64;
        for tp in stage1.points() {
            let res = (tp.force(Coordinate::Y).unwrap() - f_held).abs() / f_held.abs();
            worst = worst.max(res);
        }
        println!(
            "J/B={j_over_b}: beta_B={:.9e}, worst stage-1 force residual {:.2e}",
            b_corner.beta(),
            worst
        );
        // mirror check: beta at sample k of stage 1 vs the exact scaled cycle
        let lambda = 2.0;
        let c = ThermalPoint::new(
            b_corner.substance().rescaled(lambda).unwrap(),
            b_corner.beta() * lambda,
        )
        .unwrap();
        let stage3 = build_isobar(&c, Coordinate::Y, y_a * lambda, 257, &tol).unwrap();
        let d = stage3.last();
        println!(
            "  beta_D/lambda = {:.12e} vs beta_A = 2; rel = {:.3e}",
            d.beta() / lambda,
            (d.beta() / lambda - 2.0_f64).abs() / 2.0
        );
        // compare each stage-3 sample against the scaled mirror of stage 1
        let pts1 = stage1.points();
        let pts3 = stage3.points();
        let n = pts1.len();
        let mut worst_mirror = 0.0f64;
        let mut worst_k = 0;
        for k in 0..n {
            // stage3 sample k corresponds to stage1 sample n-1-k scaled by lambda
            let expect = pts1[n - 1 - k].beta() * lambda;
            let got = pts3[k].beta();
            let rel = (got - expect).abs() / expect;
            if rel > worst_mirror {
                worst_mirror = rel;
                worst_k = k;
            }
        }
        println!("  worst stage-3 beta mirror error {:.3e} at sample {worst_k}", worst_mirror);
        // conditioning at the anchor: d ln|F| / d ln beta
        let k_anchor = {
            let f0 = anchor.force(Coordinate::Y).unwrap();
            let db = 1e-6 * anchor.beta();
            let f1 = anchor
                .substance()
                .force(anchor.beta() + db, Coordinate::Y)
                .unwrap();
            ((f1 - f0) / db) * anchor.beta() / f0
        };
        println!("  kappa(anchor) = {k_anchor:.3e}");
    }
}
