use mfnear::boolfun::is_bent;
use mfnear::counting;
use mfnear::mmf::MMFunction;
use mfnear::oracle::{
    m_sample, near_flats, sample_near_average, trial_rng, verify_beta, verify_coincidence, verify_sum_phi_h,
    verify_sum_pi, Suite,
};

#[test]
fn exhaustive_sums() {
    let o = verify_sum_pi(3, 2).unwrap();
    assert!(o.pass);
    assert_eq!(o.observed, "112896");
    assert_eq!(o.counters.functions_tested, 40320);
    let o = verify_sum_phi_h(1, &[1, 0]).unwrap();
    assert_eq!(o.observed, "16");
    let o = verify_sum_phi_h(3, &[3, 1, 4, 0, 7, 5, 6, 2]).unwrap();
    assert!(o.pass);
    assert_eq!(o.observed, "65536");
}

#[test]
fn full_scan_at_eight() {
    let g = MMFunction::random(4, &mut trial_rng(1, 0)).unwrap();
    let (flats, scanned) = near_flats(&g.table()).unwrap();
    assert_eq!(scanned, 3_212_592);
    assert!(flats.len() as u64 >= counting::lambda(8).unwrap().to_string().parse::<u64>().unwrap());
    assert!(is_bent(&g.table()).unwrap());
}

#[test]
fn coincidence_counters() {
    let out = verify_coincidence(5, 1, 42).unwrap();
    assert!(out.iter().all(|o| o.pass), "{out:?}");
    assert!(out[0].counters.functions_tested >= 5 * 384);
    assert!(out[1].counters.functions_tested >= 40320 * 256);
}

#[test]
fn beta_spot_checks_at_six() {
    let out = verify_beta(6, 7, 3).unwrap();
    assert!(out[0].pass, "{out:?}");
    assert_eq!(out[0].expected, "21 subspaces agree");
}

#[test]
fn seeded_samples_repeat() {
    let a = sample_near_average(8, 1000, 1).unwrap();
    let b = sample_near_average(8, 1000, 1).unwrap();
    assert_eq!(a, b);
    assert!(m_sample(4, 0, 1).is_err());
    assert!(sample_near_average(8, 0, 1).is_err());
}

#[test]
fn near_average_within_three_se() {
    let target = counting::near_average(4).unwrap().to_f64();
    let floor = counting::lambda(8).unwrap().to_string().parse::<f64>().unwrap();
    for seed in 1..=5 {
        let est = sample_near_average(8, 1000, seed).unwrap();
        assert!(est.z_score(target).abs() <= 3.0, "seed {seed}: {est:?} vs {target}");
        assert!(est.min >= floor);
    }
}

#[test]
fn suite_names() {
    assert_eq!(Suite::parse("census"), Some(Suite::Census));
    assert_eq!(Suite::parse("bogus"), None);
}
