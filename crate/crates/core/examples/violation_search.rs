//! Random states never exceed the correlation bound or 2√2.

use jointbound::sampling::{bound_violation_search_in, Ensemble, SeededSampler};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let s = SeededSampler::new(5);
    for (i, e) in [Ensemble::HaarPure, Ensemble::GinibreMixed].into_iter().enumerate() {
        let r = bound_violation_search_in(e, n, &s.derive(i as u64));
        println!(
            "{e:?}: {} states, max tight lhs {:.9}, max chsh {:.9}, argmax state {}",
            r.n_states,
            r.max_tight_lhs,
            r.max_chsh,
            &r.argmax_state_digest[..16]
        );
    }
}
