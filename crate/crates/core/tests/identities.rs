use std::time::Instant;

use gl3gps::identities::{random_sweep, verify_identity, IdentityCase, IdentityTag};

#[test]
fn every_tag_passes_a_sweep_of_25() {
    for tag in IdentityTag::ALL {
        let t = Instant::now();
        let rep = random_sweep(tag, 25, 2024, 1e-9);
        eprintln!("{tag}: max error {:.2e} in {:.2?}", rep.max_error, t.elapsed());
        assert!(rep.passed(), "{tag}: {:?}", rep.failures);
    }
}

#[test]
fn thomae_at_ten_draws() {
    let rep = random_sweep(IdentityTag::ThomaeMB, 10, 11, 1e-8);
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn two_f1_to_beta_at_ten_draws() {
    let rep = random_sweep(IdentityTag::TwoF1toBeta, 10, 5, 1e-9);
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn tags_round_trip_through_names() {
    for tag in IdentityTag::ALL {
        assert_eq!(tag.name().parse::<IdentityTag>().unwrap(), tag);
    }
    assert!("Nope".parse::<IdentityTag>().is_err());
}

#[test]
fn beta_inverse_mellin_vanishes_beyond_one() {
    let case = IdentityCase::real(IdentityTag::BetaInvMellin, &[3.5, 2.5]).unwrap();
    let rep = verify_identity(&case, 1e-9).unwrap();
    assert!(rep.lhs.norm() < 1e-9, "{:?}", rep);
}
