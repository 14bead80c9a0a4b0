//! Value-semantic geometric primitives: spheres, annular and polar-cap
//! regions, slabs, centre-difference directions and axis-aligned boxes.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, dot, norm};
use crate::measure;

/// The sphere `C(x, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    centre: Vec<f64>,
    radius: f64,
}

impl Sphere {
    pub fn new(centre: Vec<f64>, radius: f64) -> Result<Self> {
        if centre.is_empty() {
            return Err(invalid("sphere centre must have at least one coordinate"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("sphere radius must be positive, got {radius}")));
        }
        if centre.iter().any(|c| !c.is_finite()) {
            return Err(invalid("sphere centre must be finite"));
        }
        Ok(Sphere { centre, radius })
    }

    pub fn centre(&self) -> &[f64] {
        &self.centre
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.centre.len()
    }

    /// True when the centre lies on the slice `{x_n = 0}`.
    pub fn on_slice(&self) -> bool {
        self.centre[self.dim() - 1] == 0.0
    }

    /// Same sphere with its centre moved by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Sphere {
        Sphere {
            centre: linalg::add(&self.centre, shift),
            radius: self.radius,
        }
    }
}

/// Euclidean distance between the centres of two spheres.
pub fn centre_distance(a: &Sphere, b: &Sphere) -> f64 {
    linalg::distance(a.centre(), b.centre())
}

/// Distance and unit direction from one centre to another.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionData {
    pub dist: f64,
    /// `(x(b) - x(a)) / |x(b) - x(a)|` in `R^n`.
    pub e_full: Vec<f64>,
    /// The first `n - 1` coordinates of `e_full`, present only when both
    /// centres lie on `{x_n = 0}`.
    pub e_horiz: Option<Vec<f64>>,
}

pub fn unit_direction(a: &Sphere, b: &Sphere) -> Result<DirectionData> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let diff = linalg::sub(b.centre(), a.centre());
    let dist = norm(&diff);
    if dist == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let e_full: Vec<f64> = diff.iter().map(|d| d / dist).collect();
    let e_horiz = (a.on_slice() && b.on_slice()).then(|| e_full[..a.dim() - 1].to_vec());
    Ok(DirectionData {
        dist,
        e_full,
        e_horiz,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    /// `{ y : | |y - x| - r | < delta }`.
    Annulus,
    /// The annulus restricted to `y_n - x_n > (1 - 1/(100 n)) r`.
    PolarCap,
}

/// An annulus or north polar cap of thickness `delta` about a sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    sphere: Sphere,
    delta: f64,
    kind: RegionKind,
}

impl Region {
    pub fn new(sphere: Sphere, delta: f64, kind: RegionKind) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        Ok(Region {
            sphere,
            delta,
            kind,
        })
    }

    pub fn annulus(sphere: Sphere, delta: f64) -> Result<Self> {
        Self::new(sphere, delta, RegionKind::Annulus)
    }

    pub fn polar_cap(sphere: Sphere, delta: f64) -> Result<Self> {
        Self::new(sphere, delta, RegionKind::PolarCap)
    }

    pub fn sphere(&self) -> &Sphere {
        &self.sphere
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.sphere.dim()
    }

    /// Height above the centre that polar-cap points must exceed.
    pub fn cap_height(&self) -> f64 {
        (1.0 - 1.0 / (100.0 * self.dim() as f64)) * self.sphere.radius
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let x = self.sphere.centre();
        let dist = linalg::distance(y, x);
        if (dist - self.sphere.radius).abs() >= self.delta {
            return false;
        }
        match self.kind {
            RegionKind::Annulus => true,
            RegionKind::PolarCap => {
                let last = self.dim() - 1;
                y[last] - x[last] > self.cap_height()
            }
        }
    }

    /// A 1-Lipschitz function of `y` that is positive exactly on the region.
    pub fn margin(&self, y: &[f64]) -> f64 {
        let x = self.sphere.centre();
        let radial = self.delta - (linalg::distance(y, x) - self.sphere.radius).abs();
        match self.kind {
            RegionKind::Annulus => radial,
            RegionKind::PolarCap => {
                let last = self.dim() - 1;
                radial.min(y[last] - x[last] - self.cap_height())
            }
        }
    }

    /// Exact Lebesgue measure of the region.
    pub fn volume(&self) -> f64 {
        let n = self.dim();
        let (r, d) = (self.sphere.radius, self.delta);
        match self.kind {
            RegionKind::Annulus => measure::shell_volume(n, r, d),
            RegionKind::PolarCap => measure::shell_above_height(n, r, d, self.cap_height()),
        }
    }

    /// Tight axis-aligned box containing the region.
    pub fn bounding_box(&self) -> AxisBox {
        let x = self.sphere.centre();
        let outer = self.sphere.radius + self.delta;
        match self.kind {
            RegionKind::Annulus => AxisBox {
                lo: x.iter().map(|c| c - outer).collect(),
                hi: x.iter().map(|c| c + outer).collect(),
            },
            RegionKind::PolarCap => {
                let h = self.cap_height();
                let horiz = (outer * outer - h * h).max(0.0).sqrt();
                let last = self.dim() - 1;
                let mut lo: Vec<f64> = x.iter().map(|c| c - horiz).collect();
                let mut hi: Vec<f64> = x.iter().map(|c| c + horiz).collect();
                lo[last] = x[last] + h;
                hi[last] = x[last] + outer;
                AxisBox { lo, hi }
            }
        }
    }

    /// Draw a point uniformly from the region into `out`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.dim();
        let x = self.sphere.centre();
        match self.kind {
            RegionKind::Annulus => {
                let mut len2 = 0.0;
                while len2 == 0.0 {
                    len2 = 0.0;
                    for o in out.iter_mut() {
                        let g: f64 = rng.sample(StandardNormal);
                        *o = g;
                        len2 += g * g;
                    }
                }
                let len = len2.sqrt();
                let inner = (self.sphere.radius - self.delta).max(0.0).powi(n as i32);
                let outer = (self.sphere.radius + self.delta).powi(n as i32);
                let u: f64 = rng.random();
                let rho = (inner + u * (outer - inner)).powf(1.0 / n as f64);
                for (o, c) in out.iter_mut().zip(x) {
                    *o = c + *o / len * rho;
                }
            }
            RegionKind::PolarCap => {
                let bbox = self.bounding_box();
                loop {
                    bbox.sample_into(rng, out);
                    if self.contains(out) {
                        break;
                    }
                }
            }
        }
    }
}

/// Free-function form of [`Region::contains`].
pub fn region_contains(region: &Region, y: &[f64]) -> bool {
    region.contains(y)
}

/// Closed neighbourhood `{ y : |<normal, y> - offset| <= half_thickness }`
/// of an affine hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    normal: Vec<f64>,
    offset: f64,
    half_thickness: f64,
}

impl Slab {
    /// `normal` is normalised on construction.
    pub fn new(normal: Vec<f64>, offset: f64, half_thickness: f64) -> Result<Self> {
        let len = norm(&normal);
        if !(len > 0.0 && len.is_finite()) {
            return Err(invalid("slab normal must be a nonzero finite vector"));
        }
        if !(half_thickness > 0.0) {
            return Err(invalid("slab half-thickness must be positive"));
        }
        Ok(Slab {
            normal: normal.iter().map(|c| c / len).collect(),
            offset: offset / len,
            half_thickness: half_thickness / len,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn half_thickness(&self) -> f64 {
        self.half_thickness
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        (dot(&self.normal, y) - self.offset).abs() <= self.half_thickness
    }

    /// The slab restricted to the first `n - 1` coordinates. Only meaningful
    /// for horizontal normals.
    pub fn horizontal(&self) -> Result<Slab> {
        let last = self.dim() - 1;
        if self.normal[last].abs() > 1e-12 {
            return Err(invalid("slab normal is not horizontal"));
        }
        Slab::new(self.normal[..last].to_vec(), self.offset, self.half_thickness)
    }
}

/// Slab containing `C^delta ∩ C̄^delta`.
///
/// The normal is `e(C, C̄)`; the offset comes from subtracting the two
/// sphere equations; the half-thickness `((r + r̄) delta + delta^2) / dist`
/// bounds the offset over all radii perturbed by less than `delta`.
pub fn slab_of_pair(a: &Sphere, b: &Sphere, delta: f64) -> Result<Slab> {
    if !(delta > 0.0) {
        return Err(invalid("delta must be positive"));
    }
    let dir = unit_direction(a, b)?;
    let (r, rb) = (a.radius(), b.radius());
    let xa2 = dot(a.centre(), a.centre());
    let xb2 = dot(b.centre(), b.centre());
    let offset = (r * r - rb * rb - (xa2 - xb2)) / (2.0 * dir.dist);
    let half_thickness = ((r + rb) * delta + delta * delta) / dir.dist;
    Ok(Slab {
        normal: dir.e_full,
        offset,
        half_thickness,
    })
}

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        Ok(AxisBox { lo, hi })
    }

    /// The cube `[-half, half]^n`.
    pub fn cube(n: usize, half: f64) -> Self {
        AxisBox {
            lo: vec![-half; n],
            hi: vec![half; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| !(h > l))
    }

    pub fn volume(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn intersect(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    pub fn union(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for ((o, l), h) in out.iter_mut().zip(&self.lo).zip(&self.hi) {
            let u: f64 = rng.random();
            *o = l + u * (h - l);
        }
    }

    /// Shrink the box towards `{ |<a, y> - offset| <= half }` by interval
    /// propagation. The result still contains every point of the original
    /// box satisfying the constraint.
    pub(crate) fn tighten_by_slab(&mut self, a: &[f64], offset: f64, half: f64) {
        let n = self.dim();
        let (lo_c, hi_c) = (offset - half, offset + half);
        for i in 0..n {
            if a[i].abs() < 1e-12 {
                continue;
            }
            let (mut rest_min, mut rest_max) = (0.0, 0.0);
            for k in (0..n).filter(|&k| k != i) {
                let (p, q) = (a[k] * self.lo[k], a[k] * self.hi[k]);
                rest_min += p.min(q);
                rest_max += p.max(q);
            }
            let (mut l, mut h) = ((lo_c - rest_max) / a[i], (hi_c - rest_min) / a[i]);
            if a[i] < 0.0 {
                std::mem::swap(&mut l, &mut h);
            }
            let pad = 1e-12 * (1.0 + l.abs().max(h.abs()));
            self.lo[i] = self.lo[i].max(l - pad);
            self.hi[i] = self.hi[i].min(h + pad);
        }
    }

    /// Shrink the box towards the closed ball `B(centre, radius)`.
    pub(crate) fn tighten_by_ball(&mut self, centre: &[f64], radius: f64) {
        if self.is_empty() {
            return;
        }
        let n = self.dim();
        let nearest: Vec<f64> = (0..n)
            .map(|k| {
                let c = centre[k].clamp(self.lo[k], self.hi[k]);
                (c - centre[k]) * (c - centre[k])
            })
            .collect();
        let total: f64 = nearest.iter().sum();
        for i in 0..n {
            let room = radius * radius - (total - nearest[i]);
            if room < 0.0 {
                self.hi[i] = self.lo[i];
                continue;
            }
            let s = room.sqrt() * (1.0 + 1e-12) + 1e-12;
            self.lo[i] = self.lo[i].max(centre[i] - s);
            self.hi[i] = self.hi[i].min(centre[i] + s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(c: &[f64], r: f64) -> Sphere {
        Sphere::new(c.to_vec(), r).unwrap()
    }

    #[test]
    fn centre_distance_examples() {
        let o = sphere(&[0.0, 0.0, 0.0], 1.0);
        assert_eq!(centre_distance(&o, &sphere(&[1.0, 0.0, 0.0], 1.5)), 1.0);
        assert_eq!(centre_distance(&o, &sphere(&[3.0, 4.0, 0.0], 1.0)), 5.0);
        assert_eq!(centre_distance(&o, &o), 0.0);
    }

    #[test]
    fn unit_direction_examples() {
        let o = sphere(&[0.0, 0.0, 0.0], 1.0);
        let d = unit_direction(&o, &sphere(&[2.0, 0.0, 0.0], 1.0)).unwrap();
        assert_eq!(d.dist, 2.0);
        assert_eq!(d.e_full, vec![1.0, 0.0, 0.0]);
        assert_eq!(d.e_horiz, Some(vec![1.0, 0.0]));

        let d = unit_direction(&o, &sphere(&[0.0, 0.0, 1.0], 1.0)).unwrap();
        assert_eq!(d.e_full, vec![0.0, 0.0, 1.0]);
        assert_eq!(d.e_horiz, None);

        assert!(matches!(
            unit_direction(&o, &o),
            Err(Error::DegenerateDirection)
        ));
    }

    #[test]
    fn region_membership_examples() {
        let o = sphere(&[0.0, 0.0, 0.0], 1.0);
        let ann = Region::annulus(o.clone(), 0.01).unwrap();
        let cap = Region::polar_cap(o, 0.01).unwrap();
        assert!(ann.contains(&[1.005, 0.0, 0.0]));
        assert!(!cap.contains(&[1.005, 0.0, 0.0]));
        assert!(cap.contains(&[0.0, 0.0, 1.005]));
        assert!(!ann.contains(&[1.02, 0.0, 0.0]));
        // Strict boundary.
        assert!(!ann.contains(&[1.5, 0.0, 0.0]) && !ann.contains(&[0.5, 0.0, 0.0]));
    }

    #[test]
    fn invalid_regions_are_rejected() {
        let o = sphere(&[0.0, 0.0], 1.0);
        assert!(Region::annulus(o.clone(), 0.0).is_err());
        assert!(Region::annulus(o, 0.5).is_err());
        assert!(Sphere::new(vec![0.0], -1.0).is_err());
        assert!(Sphere::new(vec![], 1.0).is_err());
    }

    #[test]
    fn slab_of_pair_examples() {
        let a = sphere(&[0.0, 0.0, 0.0], 1.0);
        let b = sphere(&[1.0, 0.0, 0.0], 1.0);
        let s = slab_of_pair(&a, &b, 0.01).unwrap();
        assert_eq!(s.normal(), &[1.0, 0.0, 0.0]);
        assert!((s.offset() - 0.5).abs() < 1e-15);
        assert!((s.half_thickness() - 0.0201).abs() < 1e-15);

        let a = sphere(&[0.0, 0.0, 0.0], 1.5);
        let s = slab_of_pair(&a, &b, 0.01).unwrap();
        assert!((s.offset() - 1.125).abs() < 1e-15);

        assert!(slab_of_pair(&a, &a, 0.01).is_err());
    }

    #[test]
    fn cap_bounding_box_contains_samples() {
        let s = sphere(&[0.1, -0.2, 0.0], 1.4);
        let cap = Region::polar_cap(s, 0.02).unwrap();
        let bbox = cap.bounding_box();
        let mut rng = crate::rng::substream(7, &[0]);
        let mut y = vec![0.0; 3];
        for _ in 0..2000 {
            cap.sample_uniform(&mut rng, &mut y);
            assert!(cap.contains(&y));
            assert!(bbox.contains(&y));
        }
    }

    #[test]
    fn annulus_samples_lie_in_annulus() {
        let ann = Region::annulus(sphere(&[0.3, 0.0, 0.0, 0.0], 1.2), 0.05).unwrap();
        let mut rng = crate::rng::substream(3, &[1]);
        let mut y = vec![0.0; 4];
        for _ in 0..2000 {
            ann.sample_uniform(&mut rng, &mut y);
            assert!(ann.contains(&y));
        }
    }

    #[test]
    fn box_tightening_keeps_constraint_set() {
        let mut b = AxisBox::cube(2, 2.0);
        let a = [0.6, 0.8];
        b.tighten_by_slab(&a, 0.5, 0.1);
        // A parallelogram-like set: every point of the original box
        // satisfying the constraint must remain.
        let mut rng = crate::rng::substream(11, &[]);
        let orig = AxisBox::cube(2, 2.0);
        let mut y = [0.0; 2];
        for _ in 0..10_000 {
            orig.sample_into(&mut rng, &mut y);
            if (dot(&a, &y) - 0.5).abs() <= 0.1 {
                assert!(b.contains(&y));
            }
        }
        assert!(b.volume() < orig.volume());
    }
}
