//! Bessel functions of integer and half-integer order, their zeros, and a few
//! sphere constants.
//!
//! Orders are carried as `twice_nu = 2ν` so that the radial Fourier transform
//! in dimension `n` (order `ν = (n-2)/2`) never rounds its order.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Γ(x) for real x.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Surface area of the unit sphere S^{d-1} ⊂ ℝ^d, i.e. 2π^{d/2}/Γ(d/2).
pub fn unit_sphere_area(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Hankel order of the radial Fourier transform in dimension `n`, doubled.
pub fn radial_twice_order(n: u32) -> i32 {
    n as i32 - 2
}

fn series_j(nu: f64, x: f64) -> f64 {
    // (x/2)^ν Σ (-x²/4)^m / (m! Γ(m+ν+1))
    let q = -0.25 * x * x;
    let mut term = 1.0 / gamma(nu + 1.0);
    let mut sum = term;
    for m in 1..200 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    (0.5 * x).powf(nu) * sum
}

fn series_j_reduced(nu: f64, x: f64) -> f64 {
    // x^{-ν} J_ν(x) = 2^{-ν} Σ (-x²/4)^m / (m! Γ(m+ν+1))
    let q = -0.25 * x * x;
    let mut term = 1.0 / gamma(nu + 1.0);
    let mut sum = term;
    for m in 1..200 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum * 2f64.powf(-nu)
}

/// Spherical Bessel function j_ℓ(x) for ℓ ≥ -1 by upward recurrence; only
/// used where x exceeds the order, so the recurrence is stable.
fn spherical_upward(l: i32, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let mut jm1 = c / x; // j_{-1}
    if l == -1 {
        return jm1;
    }
    let mut j = s / x; // j_0
    for k in 0..l {
        let next = (2 * k + 1) as f64 / x * j - jm1;
        jm1 = j;
        j = next;
    }
    j
}

/// J_ν(x) for ν = twice_nu/2 ≥ -1/2 and x ≥ 0.
pub fn bessel_j(twice_nu: i32, x: f64) -> f64 {
    debug_assert!(twice_nu >= -1);
    let nu = twice_nu as f64 / 2.0;
    if x == 0.0 {
        return match twice_nu {
            0 => 1.0,
            -1 => f64::INFINITY,
            _ => 0.0,
        };
    }
    if x < 8.0 || x < nu + 2.0 {
        return series_j(nu, x);
    }
    if twice_nu % 2 == 0 {
        libm::jn(twice_nu / 2, x)
    } else {
        let l = (twice_nu - 1) / 2;
        (2.0 * x / PI).sqrt() * spherical_upward(l, x)
    }
}

/// x^{-ν} J_ν(x): an entire, even function of x, equal to 1/(2^ν Γ(ν+1)) at 0.
pub fn bessel_j_reduced(twice_nu: i32, x: f64) -> f64 {
    let nu = twice_nu as f64 / 2.0;
    let ax = x.abs();
    if ax < 8.0 || ax < nu + 2.0 {
        series_j_reduced(nu, ax)
    } else {
        bessel_j(twice_nu, ax) / ax.powf(nu)
    }
}

/// z^{-ν} J_ν(z) for complex z by its power series. Accurate while
/// |z| - |Im z| stays below roughly 25.
pub fn bessel_j_reduced_complex(twice_nu: i32, z: Complex64) -> Complex64 {
    let nu = twice_nu as f64 / 2.0;
    let q = -0.25 * z * z;
    let mut term = Complex64::new(1.0 / gamma(nu + 1.0), 0.0);
    let mut sum = term;
    let mut peak = term.norm();
    for m in 1..400 {
        let mf = m as f64;
        term *= q / (mf * (mf + nu));
        sum += term;
        let t = term.norm();
        peak = peak.max(t);
        if t < 1e-18 * peak && mf > 0.5 * z.norm() {
            break;
        }
    }
    sum * 2f64.powf(-nu)
}

/// First `count` positive zeros of J_ν, ν = twice_nu/2.
pub fn bessel_zeros(twice_nu: i32, count: usize) -> Vec<f64> {
    let nu = twice_nu as f64 / 2.0;
    let mu = 4.0 * nu * nu;
    let mut zeros = Vec::with_capacity(count);
    let mut prev = 0.0f64;
    for m in 1..=count {
        // McMahon's expansion as the starting guess.
        let beta = (m as f64 + 0.5 * nu - 0.25) * PI;
        let e = 8.0 * beta;
        let mut guess = beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3));
        if guess <= prev + 1.0 {
            guess = prev + PI;
        }
        let root = refine_zero(twice_nu, guess, prev);
        zeros.push(root);
        prev = root;
    }
    zeros
}

fn refine_zero(twice_nu: i32, guess: f64, lower: f64) -> f64 {
    let nu = twice_nu as f64 / 2.0;
    let mut x = guess;
    for _ in 0..60 {
        let j = bessel_j(twice_nu, x);
        let dj = nu / x * j - bessel_j(twice_nu + 2, x);
        let step = j / dj;
        x -= step;
        if step.abs() < 1e-15 * x {
            break;
        }
    }
    if x > lower + 1.0 && bessel_j(twice_nu, x).abs() < 1e-10 {
        return x;
    }
    // Newton wandered off: bracket by scanning from the previous zero.
    let mut a = lower + 0.5;
    let mut fa = bessel_j(twice_nu, a);
    loop {
        let b = a + 0.25;
        let fb = bessel_j(twice_nu, b);
        if fa == 0.0 {
            return a;
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = bessel_j(twice_nu, mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
                if hi - lo < 1e-15 * hi {
                    break;
                }
            }
            return 0.5 * (lo + hi);
        }
        a = b;
        fa = fb;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_orders_match_closed_forms() {
        for &x in &[0.3, 2.0, 7.9, 8.1, 31.0, 250.0] {
            let j12 = (2.0 / (PI * x)).sqrt() * x.sin();
            assert_relative_eq!(bessel_j(1, x), j12, max_relative = 1e-13, epsilon = 1e-15);
            let j32 = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert_relative_eq!(bessel_j(3, x), j32, epsilon = 1e-13);
        }
    }

    #[test]
    fn series_and_recurrence_agree_across_switch() {
        for twice_nu in [-1, 0, 1, 2, 3, 6, 7] {
            let a = series_j(twice_nu as f64 / 2.0, 8.0);
            let b = if twice_nu % 2 == 0 {
                libm::jn(twice_nu / 2, 8.0)
            } else {
                (16.0 / PI).sqrt() * spherical_upward((twice_nu - 1) / 2, 8.0)
            };
            assert!((a - b).abs() < 1e-13, "order {twice_nu}: {a} vs {b}");
        }
    }

    #[test]
    fn reduced_complex_series_matches_real() {
        for twice_nu in [-1, 0, 3, 7] {
            for &x in &[0.0, 0.5, 3.0, 9.0] {
                let c = bessel_j_reduced_complex(twice_nu, Complex64::new(x, 0.0));
                let r = bessel_j_reduced(twice_nu, x);
                assert!((c.re - r).abs() < 1e-12 && c.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zeros_of_j0_and_j32() {
        let z0 = bessel_zeros(0, 3);
        assert_relative_eq!(z0[0], 2.404825557695773, epsilon = 1e-12);
        assert_relative_eq!(z0[2], 8.653727912911013, epsilon = 1e-12);
        // J_{3/2} zeros solve tan x = x.
        let z = bessel_zeros(3, 400);
        for w in z.windows(2) {
            assert!(w[1] - w[0] > 3.0 && w[1] - w[0] < 3.3);
        }
        for &x in &z {
            assert!((x.tan() - x).abs() < 1e-8 * x * x);
        }
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(unit_sphere_area(2), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(unit_sphere_area(3), 4.0 * PI, epsilon = 1e-13);
        assert_relative_eq!(unit_sphere_area(5), 8.0 * PI * PI / 3.0, epsilon = 1e-12);
    }
}
