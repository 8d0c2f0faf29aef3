//! Simulated shots of the joint measurement, moment estimates with
//! standard errors, and the shot archive format.

use std::f64::consts::FRAC_PI_3;

use jointbound::bounds::{angle_visibilities, selected_outcome, AnglePair};
use jointbound::cli::shots_csv_bytes;
use jointbound::pair::{pair_distribution_trace, pair_moment, BellFamilyState, MomentSpec};
use jointbound::sampling::{estimate_moment, sample_outcomes, SeededSampler};

fn main() -> jointbound::Result<()> {
    let phi = FRAC_PI_3;
    let a = AnglePair::new(0.5 * phi, 0.5 * phi);
    let (va, vb) = angle_visibilities(a);
    let d = pair_distribution_trace(&BellFamilyState::new(phi).to_density(), &va, &vb);

    let sampler = SeededSampler::new(2024);
    let shots = sample_outcomes(&d, 200_000, &sampler, "bell phi=pi/3")?;
    println!("{:<14} {:>10} {:>10} {:>10} {:>7}", "moment", "estimate", "std err", "exact", "z");
    for spec in MomentSpec::all_nontrivial() {
        let e = estimate_moment(&shots, spec)?;
        let exact = pair_moment(&d, spec);
        println!(
            "{:<14} {:>10.6} {:>10.6} {:>10.6} {:>7.3}",
            spec.label(),
            e.value,
            e.std_error,
            exact,
            e.z_score(exact)
        );
    }
    let zero = selected_outcome(a);
    println!(
        "outcome {:?} has probability {:.1e}, seen {} times",
        zero.values(),
        d.get(zero),
        shots.counts()[zero.index()]
    );

    let csv = shots_csv_bytes(&shots)?;
    let head: Vec<&str> = std::str::from_utf8(&csv).unwrap().lines().take(4).collect();
    println!("shot archive ({} bytes):\n{}", csv.len(), head.join("\n"));
    Ok(())
}
