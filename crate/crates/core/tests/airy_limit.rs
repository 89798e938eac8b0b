use largest_eig::airy_limit::{
    airy_bundle, e_c1, e_c2, edgeworth_f1_sq, edgeworth_f2, edgeworth_f4_sq, f2_limit, hastings_mcleod_q, EtaConvention,
    LimitMethod,
};

// Independent dense-matrix prototype: s, F2, q, u, μ, ν, α, η-integral, q′,
// E_{c,2}(c = ½), E_{c,1}(c = ½).
const REF: [[f64; 11]; 2] = [
    [
        -1.0,
        0.8072142419992859,
        0.6880603646051209,
        0.35374863744836027,
        0.8622620912705585,
        -0.576056197606661,
        0.11200416699846452,
        -0.0674477214655164,
        -0.3231946136693457,
        -0.005459670604411739,
        0.0008916410030816863,
    ],
    [
        0.5,
        0.9905446073837164,
        0.23401815202184284,
        0.023969682000076084,
        0.18799518082632832,
        -0.2324392465769608,
        0.0015789054448869238,
        -0.03661517635924778,
        -0.2331331801840239,
        0.048197529320516276,
        -0.09282925782015494,
    ],
];

// combined values for (GUE n = 50, GOE n = 50, GSE kernel n = 51) at c = ½
const COMBINED: [(f64, [f64; 3]); 2] = [
    (-1.0, [0.8459857028416073, 0.43134232757568886, 0.9737296815991706]),
    (0.5, [0.9935911512785812, 0.8712349495682354, 0.9984896136390237]),
];

#[test]
fn bundle_matches_reference() {
    for r in &REF {
        let b = airy_bundle(r[0]).unwrap();
        let got = [
            b.f2(),
            b.q[0],
            b.u[0],
            b.mu,
            b.nu,
            b.alpha,
            b.eta_integral,
            b.q_prime,
            e_c2(&b, 0.5),
            e_c1(&b, 0.5, EtaConvention::Printed),
        ];
        for (i, (g, w)) in got.iter().zip(&r[1..]).enumerate() {
            assert!((g - w).abs() < 1e-7, "s = {}, field {i}: {g} vs {w}", r[0]);
        }
    }
}

#[test]
fn expansions_match_reference() {
    for &(s, [gue, goe, gse]) in &COMBINED {
        assert!((edgeworth_f2(50, 0.5, s).unwrap().combined - gue).abs() < 1e-7);
        assert!((edgeworth_f1_sq(50, 0.5, s).unwrap().combined - goe).abs() < 1e-7);
        assert!((edgeworth_f4_sq(51, 0.5, s).unwrap().combined - gse).abs() < 1e-7);
    }
}

#[test]
fn nu_equals_alpha_minus_q() {
    for &s in &[-4.0, -1.0, 0.0, 2.0] {
        let b = airy_bundle(s).unwrap();
        assert!((b.nu - (b.alpha - b.q[0])).abs() < 1e-8, "s = {s}");
    }
}

#[test]
fn painleve_ii_residual() {
    let h = 1e-2;
    for i in 0..=12 {
        let s = -4.0 + 0.5 * i as f64;
        let q = |x: f64| hastings_mcleod_q(x).unwrap();
        let q0 = q(s);
        let qpp = (q(s + h) - 2.0 * q0 + q(s - h)) / (h * h);
        let res = qpp - s * q0 - 2.0 * q0.powi(3);
        assert!(res.abs() < 1e-4, "s = {s}: residual {res}");
    }
}

#[test]
fn limit_routes_agree() {
    for &s in &[-6.0, -3.0, -1.0, 0.0, 2.0, 5.0] {
        let e = f2_limit(s, LimitMethod::Exponential).unwrap();
        let d = f2_limit(s, LimitMethod::Determinant).unwrap();
        assert!((e - d).abs() < 1e-9, "s = {s}: {e} vs {d}");
    }
    assert!((f2_limit(-1.0, LimitMethod::Determinant).unwrap() - 0.807_214_241_999).abs() < 1e-9);
}

#[test]
fn eta_conventions_differ_only_through_c() {
    let b = airy_bundle(-1.0).unwrap();
    assert_eq!(b.eta(0.0, EtaConvention::Printed), b.eta(0.7, EtaConvention::CIndependent));
    assert!((b.eta(0.7, EtaConvention::Printed) - b.eta(0.7, EtaConvention::CIndependent)).abs() > 1e-3);
}
