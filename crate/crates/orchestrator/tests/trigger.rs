//! Exhaustive check of the regeneration trigger: every sign pattern of ten
//! consecutive fitness deltas, under both final-value regimes, must match
//! the reference predicate "last eight deltas strictly negative and final
//! value below threshold".

use grove_orchestrator::FitnessTrace;

const WINDOW: usize = 8;
const THRESHOLD: f64 = 0.1;
const DELTAS: usize = 10;

/// Builds the 11-value trace whose delta signs follow `pattern` (bit i set
/// means delta i is negative) and whose final value is exactly `final_value`.
fn trace_for(pattern: u32, final_value: f64) -> FitnessTrace {
    let mut values = vec![0.0];
    for i in 0..DELTAS {
        let delta = if pattern & (1 << i) != 0 { -0.01 } else { 0.01 };
        values.push(values[i] + delta);
    }
    let shift = final_value - values[DELTAS];
    let mut trace = FitnessTrace::new();
    for v in values {
        trace.push(v + shift).unwrap();
    }
    trace
}

#[test]
fn trigger_matches_reference_predicate_on_all_delta_patterns() {
    let mut fired = 0;
    for pattern in 0u32..(1 << DELTAS) {
        for (final_value, below) in [(0.05, true), (0.15, false)] {
            let trace = trace_for(pattern, final_value);
            // reference: the LAST eight deltas (bits 2..10) all negative
            let last_eight_negative =
                (2..DELTAS).all(|i| pattern & (1 << i) != 0);
            let expected = last_eight_negative && below;
            let got = trace.should_regenerate(WINDOW, THRESHOLD);
            assert_eq!(
                got, expected,
                "pattern {pattern:010b}, final {final_value}: got {got}, expected {expected}"
            );
            fired += usize::from(got);
        }
    }
    // 2 free leading delta signs x 1 qualifying final regime
    assert_eq!(fired, 4);
}

#[test]
fn exact_threshold_value_does_not_fire() {
    // strictly decreasing into exactly 0.1: the "< threshold" clause is strict
    let trace = trace_for((1 << DELTAS) - 1, THRESHOLD);
    assert!(!trace.should_regenerate(WINDOW, THRESHOLD));
}
