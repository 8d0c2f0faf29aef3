//! Sixteen-outcome statistics of a two-qubit state under joint X/Y
//! measurements on both sides.

use std::f64::consts::FRAC_PI_3;

use jointbound::bounds::{angle_visibilities, AnglePair};
use jointbound::pair::{
    correlations_of_state, pair_distribution_formula, pair_distribution_trace, pair_moment, BellFamilyState, MomentSpec,
};

fn main() {
    let rho = BellFamilyState::new(FRAC_PI_3).to_density();
    let c = correlations_of_state(&rho);
    println!("correlations c_xx={:.6} c_xy={:.6} c_yx={:.6} c_yy={:.6}", c.c_xx, c.c_xy, c.c_yx, c.c_yy);

    let (va, vb) = angle_visibilities(AnglePair::new(0.4, 0.9));
    let d = pair_distribution_trace(&rho, &va, &vb);
    let f = pair_distribution_formula(&c, &va, &vb);
    println!("trace vs closed form, max difference {:e}", d.max_abs_diff(&f));
    for (o, p) in d.iter() {
        let [xa, ya, xb, yb] = o.values();
        println!("  P({xa:+} {ya:+} | {xb:+} {yb:+}) = {p:.6}");
    }

    println!("moments:");
    for spec in MomentSpec::all_nontrivial() {
        println!("  <{}> = {:+.6}", spec.label(), pair_moment(&d, spec));
    }
}
