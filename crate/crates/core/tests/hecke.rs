use heckeval::hecke::{eigenvalue_numerical, round_eigenvalue, Method};
use heckeval::qexp::{eta_delta_oracle, primes, EigenformHandle};
use heckeval::Error;
use rug::{Float, Integer};

#[test]
fn delta_eigenvalues_match_the_eta_product() {
    let f = EigenformHandle::level1(12, 0).unwrap();
    let tau = eta_delta_oracle(200);
    let eps = Float::with_val(64, 1e-6);
    for p in primes().take_while(|&p| p < 200) {
        let ev = eigenvalue_numerical(&f, p, &eps, None, None, Method::Direct).unwrap();
        let want = tau.coeff(p as usize).numer().clone();
        assert_eq!(round_eigenvalue(&ev.value, 1), Some(want), "p = {p}");
    }
}

#[test]
fn both_routes_for_weight_twenty_four() {
    let f = EigenformHandle::level1(24, 1).unwrap();
    let eps = Float::with_val(64, 1e-15);
    let a = eigenvalue_numerical(&f, 3, &eps, None, None, Method::Direct).unwrap();
    let b = eigenvalue_numerical(&f, 3, &eps, None, None, Method::Eisenstein).unwrap();
    assert!(a.value.overlaps(&b.value));
    assert!(a.exact.is_none());
    let coeffs = f.coefficients(3, 128).unwrap();
    assert!(a.value.overlaps(&coeffs[3]));
}

#[test]
fn composite_primes_are_rejected() {
    let f = EigenformHandle::level1(12, 0).unwrap();
    let eps = Float::with_val(64, 1e-3);
    let r = eigenvalue_numerical(&f, 91, &eps, None, None, Method::Direct);
    assert!(matches!(r, Err(Error::CompositeIndex(91))));
    let ev = eigenvalue_numerical(&f, 97, &eps, None, None, Method::Direct).unwrap();
    assert_eq!(ev.exact, Some(Integer::from(eta_delta_oracle(98).coeff(97).numer())));
}
