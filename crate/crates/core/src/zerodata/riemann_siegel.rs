//! Provisioning of zeta-zero ordinates when no published table is at hand.
//!
//! Z(t) is evaluated by Euler–Maclaurin summation below
//! [`EULER_MACLAURIN_LIMIT`] and by the Riemann–Siegel formula with the
//! correction terms C0..C4 above it. Zeros are isolated between good Gram
//! points: every Gram block must contain exactly as many sign changes as Gram
//! intervals, otherwise the sampling is refined.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{LabError, Result};

pub const EULER_MACLAURIN_LIMIT: f64 = 600.0;

/// Riemann–Siegel theta function (asymptotic series, accurate for t ≥ 8).
pub fn theta(t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t5 = t3 * t2;
    let t7 = t5 * t2;
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t3)
        + 31.0 / (80640.0 * t5)
        + 127.0 / (430080.0 * t7)
}

fn theta_prime(t: f64) -> f64 {
    0.5 * (t / (2.0 * PI)).ln()
}

/// Hardy's Z function.
pub fn hardy_z(t: f64) -> f64 {
    if t < EULER_MACLAURIN_LIMIT {
        hardy_z_euler_maclaurin(t)
    } else {
        hardy_z_riemann_siegel(t)
    }
}

const BERNOULLI_2K: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// ζ(s) by Euler–Maclaurin summation; intended for 0 < Re s < 2, |Im s| ≲ 10⁴.
pub fn zeta_euler_maclaurin(s: Complex64) -> Complex64 {
    let n_terms = (s.im.abs() / 2.0).ceil() as usize + 20;
    let n = n_terms as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..n_terms {
        acc += (-s * (k as f64).ln()).exp();
    }
    let n_pow = (-s * n.ln()).exp();
    acc += n_pow * n / (s - 1.0) + 0.5 * n_pow;
    // Rising factorial s(s+1)...(s+2k-2) times N^{-s-2k+1} / (2k)!.
    let mut term = s * n_pow / n;
    let mut fact = 2.0;
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        acc += term * (*b / fact);
        let j = 2 * k as u32 + 1;
        term = term * (s + j as f64) * (s + (j + 1) as f64) / (n * n);
        fact *= ((j + 2) * (j + 3)) as f64;
    }
    acc
}

fn hardy_z_euler_maclaurin(t: f64) -> f64 {
    let z = zeta_euler_maclaurin(Complex64::new(0.5, t));
    (Complex64::from_polar(1.0, theta(t)) * z).re
}

/// Chebyshev interpolants of C0..C4 on p ∈ [0, 1].
struct CorrectionTables {
    coeffs: [Vec<f64>; 5],
}

const CHEB_DEGREE: usize = 48;

fn psi_complex(z: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    (two_pi * (z * z - z - 1.0 / 16.0)).cos() / (two_pi * z).cos()
}

/// Derivatives Ψ^{(k)}(p), k = 0..=12, by the Cauchy integral on a circle.
fn psi_derivatives(p: f64) -> [f64; 13] {
    const M: usize = 128;
    let r = 0.5;
    let mut out = [0.0; 13];
    let mut samples = Vec::with_capacity(M);
    for j in 0..M {
        let phi = 2.0 * PI * (j as f64 + 0.5) / M as f64;
        let w = Complex64::from_polar(1.0, phi);
        samples.push((w, psi_complex(Complex64::new(p, 0.0) + w * r)));
    }
    let mut factorial = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, f) in &samples {
            acc += f * w.powi(-(k as i32));
        }
        *slot = (acc / M as f64).re * factorial / r.powi(k as i32);
    }
    out
}

fn corrections_exact(p: f64) -> [f64; 5] {
    let d = psi_derivatives(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    [
        d[0],
        -d[3] / (96.0 * pi2),
        d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4),
        -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5_308_416.0 * pi6),
        d[0] / (128.0 * pi2)
            + 19.0 * d[4] / (24576.0 * pi4)
            + 11.0 * d[8] / (5_898_240.0 * pi6)
            + d[12] / (2_038_431_744.0 * pi8),
    ]
}

fn tables() -> &'static CorrectionTables {
    static TABLES: OnceLock<CorrectionTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let n = CHEB_DEGREE + 1;
        let nodes: Vec<f64> = (0..n)
            .map(|j| (PI * (j as f64 + 0.5) / n as f64).cos())
            .collect();
        let values: Vec<[f64; 5]> = nodes
            .iter()
            .map(|x| corrections_exact(0.5 + 0.5 * x))
            .collect();
        let coeffs = std::array::from_fn(|c| {
            (0..n)
                .map(|k| {
                    let s: f64 = (0..n)
                        .map(|j| values[j][c] * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                        .sum();
                    s * 2.0 / n as f64
                })
                .collect()
        });
        CorrectionTables { coeffs }
    })
}

fn chebyshev_eval(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + 0.5 * coeffs[0]
}

fn hardy_z_riemann_siegel(t: f64) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let th = theta(t);
    let mut main = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        main += (th - t * kf.ln()).cos() / kf.sqrt();
    }
    main *= 2.0;
    let x = 2.0 * p - 1.0;
    let tab = tables();
    let mut corr = 0.0;
    let mut scale = 1.0;
    for c in &tab.coeffs {
        corr += chebyshev_eval(c, x) * scale;
        scale /= a;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    main + sign * corr / a.sqrt()
}

/// Gram point g_n, solving θ(g_n) = nπ.
pub fn gram_point(n: i64) -> f64 {
    let target = n as f64 * PI;
    // θ is convex and increasing here, so Newton from the right of the root
    // converges monotonically.
    let mut t = 20.0;
    while theta(t) < target {
        t *= 2.0;
    }
    for _ in 0..60 {
        let step = (theta(t) - target) / theta_prime(t);
        t -= step;
        if step.abs() < 1e-13 * t {
            break;
        }
    }
    t
}

fn brent_root<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-14;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    b
}

/// The first `count` positive ordinates of nontrivial zeros of ζ, assuming
/// they are simple and on the critical line (verified through Gram-block
/// counts up to the returned height).
pub fn compute_zeros(count: usize) -> Result<Vec<f64>> {
    let mut zeros: Vec<f64> = Vec::with_capacity(count + 64);
    // Below g_{-1} ≈ 9.67 there are no zeros.
    let mut block_start = -1i64;
    let mut g_start = gram_point(-1);
    let mut z_start = hardy_z(g_start);
    while zeros.len() < count {
        // Extend to the next good Gram point: (-1)^n Z(g_n) > 0.
        let mut points = vec![(g_start, z_start)];
        let mut n = block_start;
        loop {
            n += 1;
            let g = gram_point(n);
            let z = hardy_z(g);
            points.push((g, z));
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            if parity * z > 0.0 {
                break;
            }
            if n - block_start > 64 {
                return Err(LabError::MalformedDataset(format!(
                    "no good Gram point found after g_{block_start}"
                )));
            }
        }
        let expected = (n - block_start) as usize;
        let found = isolate_block(&points, expected)?;
        zeros.extend(found);
        block_start = n;
        g_start = points.last().unwrap().0;
        z_start = points.last().unwrap().1;
    }
    zeros.truncate(count);
    Ok(zeros)
}

fn isolate_block(points: &[(f64, f64)], expected: usize) -> Result<Vec<f64>> {
    let mut subdivisions = 1usize;
    loop {
        let mut samples: Vec<(f64, f64)> = Vec::with_capacity(points.len() * subdivisions);
        for w in points.windows(2) {
            let (a, za) = w[0];
            let (b, _) = w[1];
            samples.push((a, za));
            for k in 1..subdivisions {
                let x = a + (b - a) * k as f64 / subdivisions as f64;
                samples.push((x, hardy_z(x)));
            }
        }
        samples.push(*points.last().unwrap());
        let brackets: Vec<_> = samples
            .windows(2)
            .filter(|w| w[0].1.signum() != w[1].1.signum())
            .map(|w| (w[0], w[1]))
            .collect();
        if brackets.len() == expected {
            return Ok(brackets
                .into_iter()
                .map(|((a, fa), (b, fb))| brent_root(&hardy_z, a, b, fa, fb))
                .collect());
        }
        if brackets.len() > expected || subdivisions >= 4096 {
            return Err(LabError::MalformedDataset(format!(
                "Gram block starting at {:.6} has {} sign changes, expected {}",
                points[0].0,
                brackets.len(),
                expected
            )));
        }
        subdivisions *= 2;
    }
}
