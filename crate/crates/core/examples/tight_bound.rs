//! The correlation bound for a few states, and the numeric supremum over
//! measurement angles compared with its closed form.

use jointbound::bounds::{sup_over_angles, BoundReport, DEFAULT_COARSE_STEPS, DEFAULT_REFINE_ITERS};
use jointbound::pair::{bell_basis, BellFamilyState, DensityOperator4};
use jointbound::sampling::{ginibre_random_mixed_state, haar_random_pure_state, SeededSampler};

fn show(name: &str, rho: &DensityOperator4) {
    let r = BoundReport::for_state(rho, DEFAULT_COARSE_STEPS, DEFAULT_REFINE_ITERS);
    println!(
        "{name:<22} tight {:.9}  simplified {:.6}  chsh {:.9}  coherence {:.9}  sup {:.9}",
        r.tight_lhs, r.simplified_lhs, r.chsh, r.coherence_lhs, r.sup_angles
    );
}

fn main() -> jointbound::Result<()> {
    for k in 0..4 {
        let phi = std::f64::consts::FRAC_PI_4 * k as f64;
        show(&format!("bell phi={phi:.4}"), &BellFamilyState::new(phi).to_density());
    }
    let [phi_plus, _, _, psi_minus] = bell_basis();
    show("phi+/psi- mixture", &DensityOperator4::mixture(&[(0.5, &phi_plus), (0.5, &psi_minus)])?);
    show("maximally mixed", &DensityOperator4::maximally_mixed());
    let s = SeededSampler::new(11);
    show("haar pure", &haar_random_pure_state(&s.derive(0)));
    show("ginibre mixed", &ginibre_random_mixed_state(&s.derive(1)));

    let c = jointbound::pair::CorrelationVector::new(0.3, -0.7, 0.1, 0.5);
    let sup = sup_over_angles(&c, DEFAULT_COARSE_STEPS, DEFAULT_REFINE_ITERS);
    println!("c = {:?}: sup {sup:.12}, closed form {:.12}", c.to_array(), jointbound::bounds::tight_bound_lhs(&c));
    Ok(())
}
