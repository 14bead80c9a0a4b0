//! Generators for the three model triples: tangent ("enemy"), collinear
//! centres sharing a circle, and transversal.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{Region, RegionKind, Sphere};
use crate::linalg::{cross3, distance, norm};
use crate::rng::substream;
use crate::volume::mc_volume_clipped;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripleKind {
    Enemy,
    Collinear,
    Generic,
}

impl TripleKind {
    /// Exponent of the full-annulus triple intersection volume in `delta`.
    pub fn expected_exponent(self) -> f64 {
        match self {
            TripleKind::Enemy => 2.5,
            TripleKind::Collinear => 2.0,
            TripleKind::Generic => 3.0,
        }
    }
}

/// Numbers backing a triple's geometric claim.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `alignment` is `|t2 x t3|` for the unit tangents of the two
    /// intersection circles at `point`; `residual` is the largest
    /// `| |p - x_j| - r_j |`.
    Enemy {
        point: [f64; 3],
        alignment: f64,
        residual: f64,
    },
    /// Largest `| r_j - dist(centre_j, circle point) |` over sampled points
    /// of the shared circle.
    Collinear { residual: f64 },
    /// One exact common point and its height above the centre plane.
    Generic { point: [f64; 3], height: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleSpec {
    pub kind: TripleKind,
    pub spheres: [Sphere; 3],
    pub certificate: Certificate,
}

impl TripleSpec {
    pub fn expected_exponent(&self) -> f64 {
        self.kind.expected_exponent()
    }

    pub fn regions(&self, delta: f64, kind: RegionKind) -> Result<Vec<Region>> {
        self.spheres
            .iter()
            .map(|s| Region::new(s.clone(), delta, kind))
            .collect()
    }
}

/// Tolerance for the enemy tangency certificate.
pub const TANGENCY_TOL: f64 = 1e-10;
/// Tolerance for points lying on spheres.
pub const ON_SPHERE_TOL: f64 = 1e-12;

/// `C1 = C(0, 1)` and `C_j = C((c_j, 0), |p - (c_j, 0)|)` for the equatorial
/// point `p = (cos phi, sin phi, 0)`, so both circles `C1 ∩ C_j` pass
/// through `p` with vertical tangents there.
///
/// `delta` does not enter the construction; it is checked so that callers
/// pair a triple with a usable thickness.
pub fn enemy_triple(delta: f64, phi: f64, centre2: [f64; 2], centre3: [f64; 2]) -> Result<TripleSpec> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let p = [phi.cos(), phi.sin(), 0.0];
    let mut spheres = vec![Sphere::new(vec![0.0; 3], 1.0)?];
    let mut tangents = Vec::new();
    for c in [centre2, centre3] {
        let len = (c[0] * c[0] + c[1] * c[1]).sqrt();
        if len == 0.0 {
            return Err(Error::DegenerateConfiguration(
                "centre coincides with the origin".into(),
            ));
        }
        if (c[0] * p[1] - c[1] * p[0]).abs() <= 1e-12 * len {
            return Err(Error::DegenerateConfiguration(format!(
                "centre ({}, {}) is parallel to the tangency point; the circle degenerates",
                c[0], c[1]
            )));
        }
        let x = vec![c[0], c[1], 0.0];
        let r = distance(&p, &x);
        let u = [c[0] / len, c[1] / len, 0.0];
        let t = cross3(&p, &u);
        let tn = norm(&t);
        tangents.push([t[0] / tn, t[1] / tn, t[2] / tn]);
        spheres.push(Sphere::new(x, r)?);
    }
    if centre2 == centre3 {
        return Err(Error::DegenerateConfiguration("centres 2 and 3 coincide".into()));
    }
    let alignment = norm(&cross3(&tangents[0], &tangents[1]));
    let residual = spheres
        .iter()
        .map(|s| (distance(&p, s.centre()) - s.radius()).abs())
        .fold(0.0, f64::max);
    if alignment > TANGENCY_TOL || residual > ON_SPHERE_TOL {
        return Err(Error::DegenerateConfiguration(format!(
            "tangency certificate failed: alignment {alignment:e}, residual {residual:e}"
        )));
    }
    let spheres: [Sphere; 3] = spheres.try_into().unwrap();
    Ok(TripleSpec {
        kind: TripleKind::Enemy,
        spheres,
        certificate: Certificate::Enemy {
            point: p,
            alignment,
            residual,
        },
    })
}

/// Largest centre offset at which the top of `C1` still lies in the cap of
/// a unit-size sphere (the cap half-width is about `sqrt(2/300)`).
pub const CAP_REACH: f64 = 0.08;

/// An enemy triple whose polar caps overlap. With `p = (1, 0, 0)` and
/// `q = (0, 1, 0)`, the centres are `x_j = s_j q + alpha_j d_j p` with
/// `|x_j| = d_j` drawn from `(t/2, min(t, CAP_REACH)]`, `s_2 > 0 > s_3` and
/// `alpha_2 + alpha_3 = kappa delta / t`. Both intersection circles are
/// tangent at `p` and cross the top of `C1` about `kappa delta / t` apart.
pub fn enemy_cap_triple(delta: f64, t: f64, kappa: f64, seed: u64) -> Result<TripleSpec> {
    if !(t > 0.0 && 0.5 * t < CAP_REACH) || !(kappa >= 0.0) {
        return Err(invalid(format!("cap triple needs t in (0, {}) and kappa >= 0, got {t}, {kappa}", 2.0 * CAP_REACH)));
    }
    let reach = t.min(CAP_REACH);
    let mut rng = substream(seed, &[0xE7]);
    let sum = kappa * delta / t;
    let split = rng.random_range(-0.25..=0.25) * sum;
    let alphas = [0.5 * sum + split, 0.5 * sum - split];
    let mut centres = [[0.0; 2]; 2];
    for (j, (&alpha, side)) in alphas.iter().zip([1.0, -1.0]).enumerate() {
        if alpha.abs() >= 1.0 {
            return Err(invalid(format!("kappa delta / t = {sum} too large")));
        }
        let d = reach - (reach - 0.5 * t) * rng.random::<f64>();
        centres[j] = [alpha * d, side * d * (1.0 - alpha * alpha).sqrt()];
    }
    enemy_triple(delta, 0.0, centres[0], centres[1])
}

/// Centres `0, (s, 0, 0), (2s, 0, 0)` with radii chosen so that all three
/// spheres contain the circle `{y_1 = c, y_2^2 + y_3^2 = rho^2}`.
pub fn collinear_triple(spacing: f64, plane_offset: f64, circle_radius: f64) -> Result<TripleSpec> {
    if !(spacing > 0.0 && circle_radius > 0.0) {
        return Err(invalid("spacing and circle radius must be positive"));
    }
    let mut spheres = Vec::new();
    for j in 0..3 {
        let x1 = j as f64 * spacing;
        let r = ((plane_offset - x1).powi(2) + circle_radius.powi(2)).sqrt();
        if !(1.0..=2.0).contains(&r) {
            return Err(Error::RadiusOutOfRange { index: j, radius: r });
        }
        spheres.push(Sphere::new(vec![x1, 0.0, 0.0], r)?);
    }
    let mut residual = 0.0f64;
    for k in 0..16 {
        let a = k as f64 * std::f64::consts::TAU / 16.0;
        let y = [plane_offset, circle_radius * a.cos(), circle_radius * a.sin()];
        for s in &spheres {
            residual = residual.max((distance(&y, s.centre()) - s.radius()).abs());
        }
    }
    if residual >= ON_SPHERE_TOL {
        return Err(Error::DegenerateConfiguration(format!(
            "shared circle certificate failed: residual {residual:e}"
        )));
    }
    let spheres: [Sphere; 3] = spheres.try_into().unwrap();
    Ok(TripleSpec {
        kind: TripleKind::Collinear,
        spheres,
        certificate: Certificate::Collinear { residual },
    })
}

/// Common point of three spheres with centres in the plane `{y_3 = 0}`, in
/// the upper half space.
pub fn triple_point(spheres: &[Sphere; 3]) -> Option<[f64; 3]> {
    let x: Vec<&[f64]> = spheres.iter().map(|s| s.centre()).collect();
    let r: Vec<f64> = spheres.iter().map(|s| s.radius()).collect();
    // Subtracting sphere equations gives two linear equations in (y1, y2).
    let row = |j: usize| {
        let a = [2.0 * (x[j][0] - x[0][0]), 2.0 * (x[j][1] - x[0][1])];
        let sq = |v: &[f64]| v[0] * v[0] + v[1] * v[1];
        let b = r[0] * r[0] - r[j] * r[j] + sq(x[j]) - sq(x[0]);
        (a, b)
    };
    let (a1, b1) = row(1);
    let (a2, b2) = row(2);
    let det = a1[0] * a2[1] - a1[1] * a2[0];
    if det.abs() < 1e-14 {
        return None;
    }
    let y1 = (b1 * a2[1] - b2 * a1[1]) / det;
    let y2 = (a1[0] * b2 - a2[0] * b1) / det;
    let z2 = r[0] * r[0] - (y1 - x[0][0]).powi(2) - (y2 - x[0][1]).powi(2);
    (z2 > 0.0).then(|| [y1, y2, z2.sqrt()])
}

/// Minimum height of the common point, as a fraction of the first radius,
/// for a draw to count as transversal.
pub const MIN_HEIGHT_FRACTION: f64 = 0.25;
/// Thickness and sample budget of the nonemptiness probe.
pub const PROBE_DELTA: f64 = 1.0 / 32.0;
pub const PROBE_SAMPLES: u64 = 20_000;

/// Accepted draw and the number of rejected draws before it.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericDraw {
    pub spec: TripleSpec,
    pub retries: u32,
}

/// Draws centres in `{y_3 = 0}` with pairwise distances in `[0.5, 1]` and
/// an angle in `[pi/3, 2pi/3]` between the two centre-difference directions
/// at the first centre, radii uniform in `[1, 2]`, until the annulus triple
/// intersection is hit by a Monte-Carlo probe and the spheres share a point
/// well off the centre plane.
pub fn generic_triple(seed: u64) -> Result<GenericDraw> {
    use std::f64::consts::PI;
    let mut rng = substream(seed, &[0x6E]);
    let mut retries = 0u32;
    loop {
        let a: f64 = rng.random_range(0.0..2.0 * PI);
        let beta: f64 = rng.random_range(PI / 3.0..=2.0 * PI / 3.0);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let d2: f64 = rng.random_range(0.5..=1.0);
        let d3: f64 = rng.random_range(0.5..=1.0);
        let radii: [f64; 3] = [
            rng.random_range(1.0..=2.0),
            rng.random_range(1.0..=2.0),
            rng.random_range(1.0..=2.0),
        ];
        let x2 = [d2 * a.cos(), d2 * a.sin()];
        let b = a + sign * beta;
        let x3 = [d3 * b.cos(), d3 * b.sin()];
        let d23 = ((x2[0] - x3[0]).powi(2) + (x2[1] - x3[1]).powi(2)).sqrt();
        let spheres = [
            Sphere::new(vec![0.0, 0.0, 0.0], radii[0])?,
            Sphere::new(vec![x2[0], x2[1], 0.0], radii[1])?,
            Sphere::new(vec![x3[0], x3[1], 0.0], radii[2])?,
        ];
        if (0.5..=1.0).contains(&d23) {
            if let Some(p) = triple_point(&spheres).filter(|p| p[2] >= MIN_HEIGHT_FRACTION * radii[0]) {
                let regions: Vec<Region> = spheres
                    .iter()
                    .map(|s| Region::annulus(s.clone(), PROBE_DELTA))
                    .collect::<Result<_>>()?;
                let probe = mc_volume_clipped(&regions, PROBE_SAMPLES, seed ^ retries as u64)?;
                if probe.hits > 0 {
                    return Ok(GenericDraw {
                        spec: TripleSpec {
                            kind: TripleKind::Generic,
                            spheres,
                            certificate: Certificate::Generic { point: p, height: p[2] },
                        },
                        retries,
                    });
                }
            }
        }
        retries += 1;
    }
}

/// The transversal triple used as the fixed generic reference.
pub fn reference_generic_triple() -> Result<TripleSpec> {
    let spheres = [
        Sphere::new(vec![0.0, 0.0, 0.0], 1.2)?,
        Sphere::new(vec![0.7, 0.0, 0.0], 1.3)?,
        Sphere::new(vec![0.0, 0.7, 0.0], 1.4)?,
    ];
    let p = triple_point(&spheres)
        .ok_or_else(|| Error::DegenerateConfiguration("reference spheres do not meet".into()))?;
    Ok(TripleSpec {
        kind: TripleKind::Generic,
        spheres,
        certificate: Certificate::Generic { point: p, height: p[2] },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enemy_example() {
        let t = enemy_triple(0.01, 0.0, [-0.3, 0.4], [0.2, -0.6]).unwrap();
        assert!((t.spheres[1].radius() - 1.85f64.sqrt()).abs() < 1e-12);
        assert!((t.spheres[2].radius() - 1.0).abs() < 1e-12);
        match t.certificate {
            Certificate::Enemy { alignment, residual, .. } => {
                assert!(alignment <= TANGENCY_TOL);
                assert!(residual <= ON_SPHERE_TOL);
            }
            _ => unreachable!(),
        }
        assert_eq!(t.expected_exponent(), 2.5);
    }

    #[test]
    fn enemy_rejects_parallel_centre() {
        assert!(matches!(
            enemy_triple(0.01, 0.0, [-0.5, 0.0], [0.2, -0.6]),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn collinear_example() {
        let t = collinear_triple(0.5, 1.8, 0.8).unwrap();
        let r: Vec<f64> = t.spheres.iter().map(|s| s.radius()).collect();
        assert!((r[0] - 1.969_772).abs() < 1e-6);
        assert!((r[1] - 1.526_434).abs() < 1e-6);
        assert!((r[2] - 1.131_371).abs() < 1e-6);
        assert!(matches!(
            collinear_triple(0.5, 1.2, 0.8),
            Err(Error::RadiusOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn generic_is_reproducible() {
        let a = generic_triple(3).unwrap();
        let b = generic_triple(3).unwrap();
        assert_eq!(a, b);
        let p = match a.spec.certificate {
            Certificate::Generic { point, .. } => point,
            _ => unreachable!(),
        };
        for s in &a.spec.spheres {
            assert!((distance(&p, s.centre()) - s.radius()).abs() < 1e-9);
        }
    }

    #[test]
    fn reference_generic_point() {
        let t = reference_generic_triple().unwrap();
        match t.certificate {
            Certificate::Generic { point, height } => {
                assert!((point[0] - 0.171_428_6).abs() < 1e-6);
                assert!(height > 1.0);
            }
            _ => unreachable!(),
        }
    }
}
