//! Polarization trend: as the depth grows, the fraction of good indices of
//! the (0.08, 0.05) channel is non-decreasing (within statistical slack).

use bscq_polar::{polar_de, ChannelParams};
use num_complex::Complex64;

#[test]
fn good_fraction_grows_with_depth() {
    let w = ChannelParams::new(0.08, Complex64::new(0.05, 0.0)).unwrap();
    let m = 2500;
    let mut last = 0.0f64;
    for n in 7..=12usize {
        let de = polar_de(w, n, m, 17);
        let len = de.epsilons.len() as f64;
        let frac = de.epsilons.iter().filter(|&&e| e < 0.01).count() as f64 / len;
        assert!(
            frac >= last - 0.02,
            "good fraction dropped: n={n} frac={frac:.4} previous={last:.4}"
        );
        assert!(de.epsilons.iter().all(|&e| e <= 0.5 + 1e-12));
        last = frac;
    }
    // by n = 12 a solid fraction has polarized
    assert!(last > 0.3, "final good fraction {last:.4}");
}
