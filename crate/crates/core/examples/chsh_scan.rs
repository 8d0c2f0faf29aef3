//! Observed CHSH combinations for joint measurements on the Bell family:
//! the free maximum over angles, and the curve along the constraint that
//! keeps one outcome at zero probability.

use std::f64::consts::{FRAC_PI_4, PI};

use jointbound::bounds::AnglePair;
use jointbound::sampling::{
    experimental_chsh, max_experimental_chsh, selected_outcome_probability, zero_probability_curve,
    zero_probability_curve_max,
};

fn main() -> jointbound::Result<()> {
    let m = max_experimental_chsh(FRAC_PI_4);
    println!("phi = pi/4: max {:.12} at alpha {:.9}, beta {:.9}", m.value, m.alpha, m.beta);

    println!("{:>8} {:>10} {:>10} {:>12}", "phi", "cos phi", "observed", "P(selected)");
    for k in 0..=12 {
        let phi = PI * k as f64 / 12.0;
        let a = AnglePair::new(0.5 * phi, 0.5 * phi);
        println!(
            "{phi:>8.4} {:>10.5} {:>10.6} {:>12.2e}",
            phi.cos(),
            experimental_chsh(phi, a),
            selected_outcome_probability(phi, a)
        );
        debug_assert!((experimental_chsh(phi, a) - zero_probability_curve(phi)).abs() < 1e-12);
    }

    let z = zero_probability_curve_max(1e-4)?;
    println!("curve maximum {:.12} at cos phi = {:.12}; state CHSH there {:.12}", z.value, z.cos_phi, z.quantum_chsh);
    Ok(())
}
