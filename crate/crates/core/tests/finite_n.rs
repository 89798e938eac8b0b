use largest_eig::finite_n::{
    c_psi_integral, epsilon_numeric, f_n1, f_n2, f_n4, goe_assembly, gse_assembly, F2Method, FiniteN, Resolution,
    Route,
};
use std::f64::consts::SQRT_2;

// Two-dimensional adaptive quadrature of the joint eigenvalue density,
// weight exp(−β/2 Σx²)|x−y|^β.
const GOE2: [(f64, f64); 3] = [(-1.0, 0.01060522719418663), (0.0, 0.14644660101260887), (1.0, 0.5605128332298193)];
const GUE2_AT_HALF: f64 = 0.31442401649037116;
// GSE, two eigenvalues, at u = t/√2 for t = −1, 0, 1.
const GSE2: [(f64, f64); 3] = [
    (-1.0, 0.00021433138298798893),
    (0.0, 0.03779340921080622),
    (1.0, 0.4623999183638241),
];

#[test]
fn gue_two_by_two() {
    let f = f_n2(2, 0.5, F2Method::Determinant).unwrap();
    assert!((f - GUE2_AT_HALF).abs() < 1e-6, "{f}");
}

#[test]
fn goe_two_by_two() {
    for &(t, want) in &GOE2 {
        let f = f_n1(2, t, Route::Representation).unwrap();
        assert!((f - want).abs() < 1e-6, "t = {t}: {f} vs {want}");
    }
}

#[test]
fn gse_two_by_two() {
    for &(t, want) in &GSE2 {
        let f = f_n4(2, t / SQRT_2, Route::Representation).unwrap();
        assert!((f - want).abs() < 1e-6, "t = {t}: {f} vs {want}");
    }
}

#[test]
fn determinant_and_exponential_agree() {
    for &n in &[2usize, 4, 9] {
        let edge = (2.0 * n as f64).sqrt();
        for &t in &[edge - 3.0, edge - 1.0, edge, edge + 1.5] {
            let d = f_n2(n, t, F2Method::Determinant).unwrap();
            let e = f_n2(n, t, F2Method::Exponential).unwrap();
            assert!((d - e).abs() < 1e-6, "n = {n}, t = {t}: {d} vs {e}");
        }
    }
}

// Values from an independent dense-matrix implementation at 96 nodes.
#[test]
fn moderate_n_reference() {
    let t = 40f64.sqrt() - 1.0;
    let e = epsilon_numeric(20, t).unwrap();
    assert!((e.v_tilde_eps - 0.259666161120517).abs() < 1e-9);
    assert!((e.q_eps - -0.05226987751416362).abs() < 1e-9);
    assert!((e.r1.unwrap() - 0.6693770124357196).abs() < 1e-9);
    assert!((e.p1.unwrap() - -0.761896125522448).abs() < 1e-9);
    assert!((e.c_phi - 0.702702970260618).abs() < 1e-9);
    let f = f_n1(20, t, Route::Representation).unwrap();
    assert!((f * f - 0.058786021242216956).abs() < 1e-9);

    let t = 42f64.sqrt() - 1.0;
    let e = epsilon_numeric(21, t).unwrap();
    assert!((e.r4.unwrap() - 0.9050266005891366).abs() < 1e-9);
    assert!((e.p4.unwrap() - 0.8845975199477121).abs() < 1e-9);
    let f = f_n4(10, t / SQRT_2, Route::Representation).unwrap();
    assert!((f * f - 0.7590472569042136).abs() < 1e-9);
}

#[test]
fn assemblies_match_public_entry_points() {
    let fixed = FiniteN::with_resolution(6, Resolution::fixed(128)).unwrap();
    let t = 2.5;
    let e = fixed.epsilon_numeric(t).unwrap();
    let f2 = fixed.f_n2(t, F2Method::Determinant).unwrap();
    let f1 = fixed.f_n1(t, Route::Representation).unwrap();
    assert!((goe_assembly(f2, &e).unwrap() - f1 * f1).abs() < 1e-12);

    let fixed = FiniteN::with_resolution(7, Resolution::fixed(128)).unwrap();
    let e = fixed.epsilon_numeric(t).unwrap();
    let f2 = fixed.f_n2(t, F2Method::Determinant).unwrap();
    let sq = fixed.f_n4_sq_kernel(t, Route::Representation).unwrap();
    assert!((gse_assembly(f2, &e).unwrap() - sq).abs() < 1e-12);
    assert!((e.c_psi - c_psi_integral(7).unwrap()).abs() < 1e-15);
}

#[test]
fn parity_is_enforced() {
    assert!(f_n1(3, 0.0, Route::Representation).is_err());
    assert!(FiniteN::new(4).unwrap().f_n4_sq_kernel(0.0, Route::Representation).is_err());
    assert!(f_n4(0, 0.0, Route::Representation).is_err());
}

#[test]
fn cdf_axioms() {
    for &n in &[2usize, 5, 8] {
        let fe = FiniteN::new(n).unwrap();
        let lo = -2.0 * (n as f64).sqrt() - 2.0;
        let hi = (2.0 * n as f64).sqrt() + 4.0;
        let ts: Vec<f64> = (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect();
        let f2: Vec<f64> = ts.iter().map(|&t| fe.f_n2(t, F2Method::Determinant).unwrap()).collect();
        assert!(f2[0] < 1e-3 && f2[40] > 1.0 - 1e-6);
        assert!(f2.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        if n % 2 == 0 {
            let f1: Vec<f64> = ts.iter().map(|&t| fe.f_n1(t, Route::Representation).map_err(|e| format!("t={t}: {e}")).unwrap()).collect();
            assert!(f1.windows(2).all(|w| w[1] >= w[0] - 1e-10), "{f1:?}");
        }
    }
}

#[test]
fn representation_matches_pfaffian() {
    for &n in &[4usize, 10, 30] {
        let edge = (2.0 * n as f64).sqrt();
        for &dt in &[-3.0, -1.5, 0.0, 1.0] {
            let t = edge + dt;
            let r = f_n1(n, t, Route::Representation).unwrap();
            let p = f_n1(n, t, Route::Pfaffian).unwrap();
            assert!((r - p).abs() < 1e-9, "GOE n = {n}, t = {t}: {r} vs {p}");
            let m = n / 2;
            let u = ((2 * m + 1) as f64 * 2.0).sqrt() + dt;
            let r = f_n4(m, u / SQRT_2, Route::Representation).unwrap();
            let p = f_n4(m, u / SQRT_2, Route::Pfaffian).unwrap();
            assert!((r - p).abs() < 1e-9, "GSE m = {m}, t = {u}: {r} vs {p}");
        }
    }
}

#[test]
fn exponential_route_deep_left() {
    for &n in &[2usize, 4, 9] {
        let lo = -2.0 * (n as f64).sqrt() - 2.0;
        for i in 0..=8 {
            let t = lo + i as f64;
            let d = f_n2(n, t, F2Method::Determinant).unwrap();
            let e = f_n2(n, t, F2Method::Exponential).unwrap();
            assert!((d - e).abs() < 1e-6, "n = {n}, t = {t}: {d} vs {e}");
        }
    }
}
