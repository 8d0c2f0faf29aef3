//! Joint X/Y measurement on one qubit: outcome statistics, the visibility
//! uncertainty relation, and what goes wrong outside the Bloch disk.

use std::f64::consts::FRAC_PI_6;

use jointbound::joint::{
    check_visibility_admissible, distribution_moments, outcome_distribution, povm_element, BlochEquatorial,
    OutcomeLabel, VisibilityPair,
};
use jointbound::matrix::hermitian_eigenvalues;

fn main() -> jointbound::Result<()> {
    let v = VisibilityPair::saturated(FRAC_PI_6)?;
    println!("visibilities v_x = {:.6}, v_y = {:.6}", v.v_x(), v.v_y());
    for o in OutcomeLabel::ALL {
        let eig = hermitian_eigenvalues(&povm_element(&v, o), 1e-12)?;
        println!("  E({:+}, {:+}) eigenvalues {:?}", o.x.as_i8(), o.y.as_i8(), eig.eigenvalues);
    }

    let s = BlochEquatorial::new(0.6, -0.3)?;
    let d = outcome_distribution(&v, &s);
    let m = distribution_moments(&d);
    println!("state (ex, ey) = (0.6, -0.3)");
    for (o, p) in d.iter() {
        println!("  P({:+}, {:+}) = {p:.6}", o.x.as_i8(), o.y.as_i8());
    }
    println!("  <x> = {:.6} (v_x ex = {:.6})", m.mean_x, v.v_x() * s.ex());
    println!("  <y> = {:.6} (v_y ey = {:.6})", m.mean_y, v.v_y() * s.ey());
    println!("  <xy> = {:e}", m.mean_xy);

    let too_sharp = VisibilityPair::new(0.9, 0.9)?;
    println!("(0.9, 0.9) admissible: {}", check_visibility_admissible(&too_sharp, 1e-12));

    // outside the disk some admissible joint measurement gives P < 0
    let fake = BlochEquatorial::new(0.9, 0.9)?;
    let r = fake.ex().hypot(fake.ey());
    let witness = VisibilityPair::new(fake.ex() / r, fake.ey() / r)?;
    let d = outcome_distribution(&witness, &fake);
    println!("unphysical (0.9, 0.9): min probability {:.6}, provenance {:?}", d.min(), d.provenance());
    Ok(())
}
