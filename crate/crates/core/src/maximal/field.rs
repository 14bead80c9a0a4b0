//! Non-negative test functions: analytic indicators and voxel grids.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::geometry::{AxisBox, Sphere};
use crate::linalg::{distance, dot, norm};

/// A non-negative function on `R^n`. The operators act on `|f|`, so only
/// non-negative values are stored.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    /// Indicator of the open ball `B(centre, radius)`.
    Ball { centre: Vec<f64>, radius: f64 },
    /// Indicator of `{ y : ||y - x| - r| < delta }`.
    Annulus { sphere: Sphere, delta: f64 },
    /// Indicator of `{ y : <normal, y> > offset }`.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    Constant(f64),
    Voxel(VoxelGrid),
    Sum(Vec<ScalarField>),
}

impl ScalarField {
    pub fn ball(centre: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || centre.iter().any(|c| !c.is_finite()) {
            return Err(invalid(format!("ball radius {radius} or centre not finite/positive")));
        }
        Ok(ScalarField::Ball { centre, radius })
    }

    pub fn annulus(sphere: Sphere, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid(format!("annulus thickness {delta}")));
        }
        Ok(ScalarField::Annulus { sphere, delta })
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if !(len > 0.0 && len.is_finite()) || !offset.is_finite() {
            return Err(Error::DegenerateDirection);
        }
        Ok(ScalarField::HalfSpace {
            normal: normal.iter().map(|c| c / len).collect(),
            offset: offset / len,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(invalid(format!("constant {c} must be finite and >= 0")));
        }
        Ok(ScalarField::Constant(c))
    }

    /// Dimension, or `None` for a constant.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ScalarField::Ball { centre, .. } => Some(centre.len()),
            ScalarField::Annulus { sphere, .. } => Some(sphere.dim()),
            ScalarField::HalfSpace { normal, .. } => Some(normal.len()),
            ScalarField::Constant(_) => None,
            ScalarField::Voxel(g) => Some(g.dim()),
            ScalarField::Sum(parts) => parts.iter().find_map(|p| p.dim()),
        }
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        match self {
            ScalarField::Ball { centre, radius } => indicator(distance(y, centre) < *radius),
            ScalarField::Annulus { sphere, delta } => {
                indicator((distance(y, sphere.centre()) - sphere.radius()).abs() < *delta)
            }
            ScalarField::HalfSpace { normal, offset } => indicator(dot(normal, y) > *offset),
            ScalarField::Constant(c) => *c,
            ScalarField::Voxel(g) => g.value(y),
            ScalarField::Sum(parts) => parts.iter().map(|p| p.value(y)).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarField::Constant(c) => *c == 0.0,
            ScalarField::Voxel(g) => g.values.iter().all(|&v| v == 0.0),
            ScalarField::Sum(parts) => parts.iter().all(|p| p.is_zero()),
            _ => false,
        }
    }

    /// A box outside which the field vanishes, or `None` when the support
    /// is unbounded.
    pub fn support_box(&self) -> Option<AxisBox> {
        match self {
            ScalarField::Ball { centre, radius } => Some(AxisBox {
                lo: centre.iter().map(|c| c - radius).collect(),
                hi: centre.iter().map(|c| c + radius).collect(),
            }),
            ScalarField::Annulus { sphere, delta } => {
                let outer = sphere.radius() + delta;
                Some(AxisBox {
                    lo: sphere.centre().iter().map(|c| c - outer).collect(),
                    hi: sphere.centre().iter().map(|c| c + outer).collect(),
                })
            }
            ScalarField::Voxel(g) => Some(g.bounding_box()),
            ScalarField::Sum(parts) => {
                let boxes: Option<Vec<AxisBox>> = parts
                    .iter()
                    .filter(|p| !p.is_zero())
                    .map(|p| p.support_box())
                    .collect();
                let boxes = boxes?;
                let (first, rest) = boxes.split_first()?;
                Some(rest.iter().fold(first.clone(), |acc, b| acc.union(b)))
            }
            ScalarField::HalfSpace { .. } | ScalarField::Constant(_) => None,
        }
    }

    /// Smallest and largest distance from `x` to the support, as far as
    /// the support box tells.
    pub(crate) fn distance_range(&self, x: &[f64]) -> Option<(f64, f64)> {
        if let ScalarField::Ball { centre, radius } = self {
            let d = distance(x, centre);
            return Some(((d - radius).max(0.0), d + radius));
        }
        let b = self.support_box()?;
        let (mut near, mut far) = (0.0, 0.0);
        for ((&xi, &lo), &hi) in x.iter().zip(&b.lo).zip(&b.hi) {
            let gap = (lo - xi).max(xi - hi).max(0.0);
            let reach = (xi - lo).abs().max((hi - xi).abs());
            near += gap * gap;
            far += reach * reach;
        }
        Some((near.sqrt(), far.sqrt()))
    }

    /// The field composed with an isometry: `g(y) = f(map^-1(y))`, where
    /// `point` maps points and `linear` maps directions. Voxel grids are
    /// only translated.
    pub fn transformed(&self, point: &dyn Fn(&[f64]) -> Vec<f64>, linear: &dyn Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        Ok(match self {
            ScalarField::Ball { centre, radius } => ScalarField::Ball {
                centre: point(centre),
                radius: *radius,
            },
            ScalarField::Annulus { sphere, delta } => ScalarField::Annulus {
                sphere: Sphere::new(point(sphere.centre()), sphere.radius())?,
                delta: *delta,
            },
            ScalarField::HalfSpace { normal, offset } => {
                let n2 = linear(normal);
                let origin = point(&vec![0.0; normal.len()]);
                ScalarField::HalfSpace {
                    offset: offset + dot(&n2, &origin),
                    normal: n2,
                }
            }
            ScalarField::Constant(c) => ScalarField::Constant(*c),
            ScalarField::Voxel(g) => {
                let n = g.dim();
                let fixes_axes = (0..n).all(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    distance(&linear(&e), &e) <= 1e-12
                });
                if !fixes_axes {
                    return Err(invalid("voxel grids only support translations"));
                }
                let mut out = g.clone();
                out.origin = point(&g.origin);
                ScalarField::Voxel(out)
            }
            ScalarField::Sum(parts) => ScalarField::Sum(
                parts
                    .iter()
                    .map(|p| p.transformed(point, linear))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        self.transformed(
            &|y: &[f64]| y.iter().zip(shift).map(|(a, b)| a + b).collect(),
            &|v: &[f64]| v.to_vec(),
        )
    }

    /// Rotation by `angle` in the plane of the first two coordinates, which
    /// fixes the vertical axis.
    pub fn rotated_about_vertical(&self, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let rot = move |y: &[f64]| {
            let mut out = y.to_vec();
            out[0] = c * y[0] - s * y[1];
            out[1] = s * y[0] + c * y[1];
            out
        };
        if self.dim().is_some_and(|n| n < 3) {
            return Err(invalid("rotation about the vertical axis needs n >= 3"));
        }
        if let ScalarField::Voxel(_) = self {
            return Err(invalid("voxel grids only support translations"));
        }
        self.transformed(&rot, &rot)
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Piecewise-constant field on an axis-aligned grid of cubes of side
/// `spacing`; zero outside. Values are row-major with the last axis
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    origin: Vec<f64>,
    spacing: f64,
    extents: Vec<usize>,
    values: Vec<f64>,
}

impl VoxelGrid {
    pub fn new(origin: Vec<f64>, spacing: f64, extents: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid(format!("voxel spacing {spacing} must be positive")));
        }
        if origin.len() != extents.len() || origin.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: origin.len(),
                got: extents.len(),
            });
        }
        let cells: usize = extents.iter().product();
        if values.len() != cells {
            return Err(invalid(format!("{} values for {cells} cells", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(invalid(format!("voxel value {v} must be finite and >= 0")));
        }
        Ok(Self {
            origin,
            spacing,
            extents,
            values,
        })
    }

    /// Sample `f` at cell centres.
    pub fn rasterise(f: &ScalarField, origin: Vec<f64>, spacing: f64, extents: Vec<usize>) -> Result<Self> {
        let cells: usize = extents.iter().product();
        let n = extents.len();
        let mut values = Vec::with_capacity(cells);
        let mut y = vec![0.0; n];
        for flat in 0..cells {
            let mut rest = flat;
            for axis in (0..n).rev() {
                let i = rest % extents[axis];
                rest /= extents[axis];
                y[axis] = origin[axis] + (i as f64 + 0.5) * spacing;
            }
            values.push(f.value(&y));
        }
        Self::new(origin, spacing, extents, values)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounding_box(&self) -> AxisBox {
        AxisBox {
            lo: self.origin.clone(),
            hi: self
                .origin
                .iter()
                .zip(&self.extents)
                .map(|(o, &e)| o + e as f64 * self.spacing)
                .collect(),
        }
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        let mut flat = 0usize;
        for ((&yi, &o), &e) in y.iter().zip(&self.origin).zip(&self.extents) {
            let t = ((yi - o) / self.spacing).floor();
            if !(t >= 0.0 && t < e as f64) {
                return 0.0;
            }
            flat = flat * e + t as usize;
        }
        self.values[flat]
    }

    /// `sum v * h^n`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing.powi(self.dim() as i32)
    }

    /// Header lines `n`, origin, spacing, extents, then one value per line,
    /// all reals at 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let real = |v: f64| format!("{v:.16e}");
        writeln!(s, "{}", self.dim()).unwrap();
        writeln!(s, "{}", self.origin.iter().map(|&v| real(v)).collect::<Vec<_>>().join(" ")).unwrap();
        writeln!(s, "{}", real(self.spacing)).unwrap();
        writeln!(s, "{}", self.extents.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")).unwrap();
        for &v in &self.values {
            writeln!(s, "{}", real(v)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing {what}"),
            })
        };
        fn parse<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
            tok.parse().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse `{tok}`"),
            })
        }
        let (l, s) = next("dimension")?;
        let n: usize = parse(l, s)?;
        let (l, s) = next("origin")?;
        let origin: Vec<f64> = s.split_whitespace().map(|t| parse(l, t)).collect::<Result<_>>()?;
        let (l, s) = next("spacing")?;
        let spacing: f64 = parse(l, s)?;
        let (l, s) = next("extents")?;
        let extents: Vec<usize> = s.split_whitespace().map(|t| parse(l, t)).collect::<Result<_>>()?;
        if origin.len() != n || extents.len() != n {
            return Err(Error::Parse {
                line: l,
                message: format!("header does not match dimension {n}"),
            });
        }
        let mut values = Vec::new();
        for (l, s) in lines {
            for t in s.split_whitespace() {
                values.push(parse(l, t)?);
            }
        }
        Self::new(origin, spacing, extents, values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_values() {
        let b = ScalarField::ball(vec![0.0; 3], 0.5).unwrap();
        assert_eq!(b.value(&[0.1, 0.1, 0.1]), 1.0);
        assert_eq!(b.value(&[0.5, 0.0, 0.0]), 0.0);
        let h = ScalarField::half_space(vec![0.0, 0.0, 2.0], 0.0).unwrap();
        assert_eq!(h.value(&[5.0, 5.0, 0.1]), 1.0);
        assert_eq!(h.value(&[5.0, 5.0, -0.1]), 0.0);
        let a = ScalarField::annulus(Sphere::new(vec![0.0; 3], 1.0).unwrap(), 0.1).unwrap();
        assert_eq!(a.value(&[1.05, 0.0, 0.0]), 1.0);
        assert_eq!(a.value(&[1.15, 0.0, 0.0]), 0.0);
        let s = ScalarField::Sum(vec![b, a]);
        assert_eq!(s.value(&[0.0; 3]), 1.0);
    }

    #[test]
    fn invalid_fields_rejected() {
        assert!(ScalarField::constant(-1.0).is_err());
        assert!(ScalarField::ball(vec![0.0; 3], 0.0).is_err());
        assert!(ScalarField::half_space(vec![0.0; 3], 1.0).is_err());
        assert!(VoxelGrid::new(vec![0.0], 0.0, vec![1], vec![1.0]).is_err());
        assert!(VoxelGrid::new(vec![0.0], 1.0, vec![2], vec![1.0]).is_err());
        assert!(VoxelGrid::new(vec![0.0], 1.0, vec![1], vec![f64::NAN]).is_err());
    }

    #[test]
    fn voxel_lookup_and_integral() {
        let g = VoxelGrid::new(vec![0.0, 0.0], 0.5, vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(g.value(&[0.1, 0.1]), 1.0);
        assert_eq!(g.value(&[0.1, 1.2]), 3.0);
        assert_eq!(g.value(&[0.7, 0.6]), 5.0);
        assert_eq!(g.value(&[1.1, 0.1]), 0.0);
        assert_eq!(g.value(&[-0.1, 0.1]), 0.0);
        assert!((g.integral() - 21.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn voxel_text_round_trip_is_exact() {
        let f = ScalarField::ball(vec![0.1, -0.2, 0.3], 0.7).unwrap();
        let mut g = VoxelGrid::rasterise(&f, vec![-0.6, -0.9, -0.4], 0.1 / 3.0, vec![4, 5, 6]).unwrap();
        g.values.iter_mut().enumerate().for_each(|(i, v)| *v *= 1.0 / 3.0 + i as f64 * 1e-7);
        let back = VoxelGrid::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rasterised_ball_integral_converges() {
        let f = ScalarField::ball(vec![0.0; 3], 0.5).unwrap();
        let g = VoxelGrid::rasterise(&f, vec![-0.5; 3], 0.01, vec![100; 3]).unwrap();
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 0.125;
        assert!((g.integral() - exact).abs() < 2e-3 * exact);
    }

    #[test]
    fn rotation_moves_ball() {
        let f = ScalarField::ball(vec![1.0, 0.0, 0.5], 0.1).unwrap();
        let g = f.rotated_about_vertical(std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(g.value(&[0.0, 1.0, 0.5]), 1.0);
        let h = ScalarField::half_space(vec![1.0, 0.0, 0.0], 0.5).unwrap();
        let hr = h.rotated_about_vertical(std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(hr.value(&[0.0, 0.6, 0.0]), 1.0);
        assert_eq!(hr.value(&[0.6, 0.0, 0.0]), 0.0);
        let t = h.translated(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.value(&[1.4, 0.0, 0.0]), 0.0);
        assert_eq!(t.value(&[1.6, 0.0, 0.0]), 1.0);
    }
}
