//! Complex digamma for the archimedean terms of the explicit formula.

use num_complex::Complex64;

// B_{2k}/(2k) for k = 1..=8.
const DIGAMMA_SERIES: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// ψ(z) = Γ'/Γ(z), by upward recurrence to Re z ≥ 15 and the asymptotic
/// series. Not defined at the poles z = 0, −1, −2, ...
pub fn digamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 15.0 {
        shift -= z.inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv2;
    for c in DIGAMMA_SERIES {
        series += power * c;
        power *= inv2;
    }
    shift + z.ln() - inv * 0.5 - series
}
