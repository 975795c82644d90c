use gamereduce_web::{cycle_curve, expander, round_two_outcome};

#[test]
fn expander_spectrum_is_descending_with_top_degree() {
    let s = expander(20, 4, 1, 0.05).unwrap();
    assert_eq!(s.spectrum.len(), 20);
    assert!((s.spectrum[0] - 4.0).abs() < 1e-9);
    assert!(s.spectrum.windows(2).all(|w| w[0] >= w[1]));
    assert!((s.lambda - (1.0 - s.spectrum[1] / 4.0)).abs() < 1e-12);
    assert_eq!(s.edges.len(), 40);
}

#[test]
fn cycle_curve_matches_closed_form() {
    let c = cycle_curve(40).unwrap();
    assert_eq!(c.len(), 38);
    for p in &c {
        assert!((p.closed_form - p.eigensolve).abs() < 1e-9, "n = {}", p.n);
    }
}

#[test]
fn rounding_never_loses() {
    for seed in 0..20 {
        let r = round_two_outcome(4, seed).unwrap();
        assert!(r.after >= r.before - 1e-12);
        let nonneg = r.difference_spectrum.iter().filter(|&&e| e >= 0.0).count();
        assert_eq!(r.rank, nonneg);
    }
}

#[test]
fn oversized_inputs_are_rejected() {
    assert!(expander(10_000, 4, 0, 0.1).is_err());
    assert!(round_two_outcome(0, 0).is_err());
}

#[test]
fn json_results_serialize() {
    let text = serde_json::to_string(&cycle_curve(5).unwrap()).unwrap();
    assert!(text.starts_with("[{\"n\":3,"));
}
