use rearr_core::sum::*;
use proptest::prelude::*;

#[test]
fn cancellation_is_exact() {
    assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
    assert_eq!(exact_sum([0.1; 10]), 1.0);
}

proptest! {
    #[test]
    fn order_does_not_matter(mut xs in proptest::collection::vec(-1e6f64..1e6, 0..60), seed in any::<u64>()) {
        let forward = exact_sum(xs.iter().copied());
        // deterministic shuffle
        let mut state = seed | 1;
        for i in (1..xs.len()).rev() {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            xs.swap(i, (state % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(forward, exact_sum(xs.iter().copied()));
    }
}
