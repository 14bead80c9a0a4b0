//! Closed-form Lebesgue measures of balls, shells, caps and lenses in
//! `R^n`. These are the analytic references the Monte-Carlo oracles are
//! checked against.

use std::f64::consts::PI;

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// `int_0^phi sin^k(t) dt` by the reduction formula.
pub fn sin_power_integral(k: usize, phi: f64) -> f64 {
    match k {
        0 => phi,
        1 => 1.0 - phi.cos(),
        _ => {
            let kf = k as f64;
            -phi.sin().powi(k as i32 - 1) * phi.cos() / kf
                + (kf - 1.0) / kf * sin_power_integral(k - 2, phi)
        }
    }
}

/// Volume of the part of a radius-`radius` ball in `R^n` lying within polar
/// angle `phi` of a fixed axis (a cap cut off by a hyperplane at distance
/// `radius * cos(phi)` from the centre). `phi` ranges over `[0, pi]`.
pub fn ball_cap_volume(n: usize, radius: f64, phi: f64) -> f64 {
    if n == 1 {
        // A 1-ball "cap" is a segment [R cos(phi), R].
        return radius * (1.0 - phi.cos());
    }
    unit_ball_volume(n - 1) * radius.powi(n as i32) * sin_power_integral(n, phi)
}

/// Volume of `{ y in B(0, radius) : y_n > height }`.
pub fn ball_above_height(n: usize, radius: f64, height: f64) -> f64 {
    if radius <= 0.0 || height >= radius {
        return 0.0;
    }
    let c = (height / radius).clamp(-1.0, 1.0);
    ball_cap_volume(n, radius, c.acos())
}

/// Volume of the intersection of two balls of radii `a`, `b` whose centres
/// are `d` apart.
pub fn ball_intersection_volume(n: usize, a: f64, b: f64, d: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 || d >= a + b {
        return 0.0;
    }
    if d <= (a - b).abs() {
        return unit_ball_volume(n) * a.min(b).powi(n as i32);
    }
    // Hyperplane of the radical section, measured from each centre.
    let xa = (d * d + a * a - b * b) / (2.0 * d);
    let xb = d - xa;
    let phi_a = (xa / a).clamp(-1.0, 1.0).acos();
    let phi_b = (xb / b).clamp(-1.0, 1.0).acos();
    ball_cap_volume(n, a, phi_a) + ball_cap_volume(n, b, phi_b)
}

/// Volume of the shell `{ | |y| - r | < delta }`.
pub fn shell_volume(n: usize, r: f64, delta: f64) -> f64 {
    let inner = (r - delta).max(0.0);
    unit_ball_volume(n) * ((r + delta).powi(n as i32) - inner.powi(n as i32))
}

/// Volume of `{ | |y| - r | < delta, y_n > height }`.
pub fn shell_above_height(n: usize, r: f64, delta: f64, height: f64) -> f64 {
    let inner = (r - delta).max(0.0);
    ball_above_height(n, r + delta, height) - ball_above_height(n, inner, height)
}

/// Volume of `B(p, rho)` intersected with the shell of radius `r` and
/// half-thickness `delta` about a centre at distance `d` from `p`.
pub fn ball_shell_intersection(n: usize, rho: f64, d: f64, r: f64, delta: f64) -> f64 {
    let inner = (r - delta).max(0.0);
    (ball_intersection_volume(n, rho, r + delta, d) - ball_intersection_volume(n, rho, inner, d))
        .max(0.0)
}
