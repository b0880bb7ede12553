use lightcone_wasm::{compute_fraction, compute_kernel, compute_snapshot};

#[test]
fn snapshot_is_normalized_and_bounded() {
    let s = compute_snapshot("cos8", 1.0, 0.0, 1.0, 2.0).unwrap();
    assert!((s.norm() - 1.0).abs() < 1e-6);
    assert!(s.x().len() <= 4000 && s.x().len() > 100);
    assert!(s.x().iter().all(|&x| x >= s.left() - 2.0 && x <= s.right() + 2.0));
    assert_eq!(s.floor(), 1e-20);
}

#[test]
fn fraction_curve_rises_and_falls() {
    let s = compute_fraction("cos8", 1.0, 0.0, 0.05, 10.0, 30).unwrap();
    let f = s.fractions();
    let (k, peak) = f
        .iter()
        .enumerate()
        .fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
    assert!(k > 0 && k + 1 < f.len());
    assert!(peak > 1e-5 && peak < 1e-4, "{peak}");
}

#[test]
fn kernel_profile_masks_the_cone() {
    let k = compute_kernel(1.0, 5.0, 11, 1.0).unwrap();
    let m = k.magnitude();
    assert!(m[..2].iter().all(|v| v.is_nan()));
    assert!(m[2].is_nan(), "dx = 1 sits on the cone");
    assert!(m[3..].windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn bad_input_is_an_error() {
    assert!(compute_snapshot("cos3", 1.0, 0.0, 1.0, 1.0).is_err());
    assert!(compute_kernel(1.0, 5.0, 11, -1.0).is_err());
}
