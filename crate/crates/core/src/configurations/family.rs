//! Finite sphere families with separated centres on the slice `{x_n = 0}`.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{centre_distance, AxisBox, Region, RegionKind, Sphere};
use crate::rng::substream;

/// Half side of the cube `Q = [-1/(2 sqrt n), 1/(2 sqrt n)]`.
pub fn cube_half_side(n: usize) -> f64 {
    0.5 / (n as f64).sqrt()
}

/// Jittered-grid spacing relative to `delta`. With per-coordinate jitter of
/// at most `delta / 4`, neighbouring centres stay at least `delta` apart.
pub const GRID_SPACING: f64 = 1.5;
pub const JITTER: f64 = 0.25;

/// A family of spheres whose centres lie on `{x_n = 0}` inside `Q^{n-1}`,
/// with radii in `[1, 2]` and pairwise centre distances at least `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFamily {
    n: usize,
    delta: f64,
    spheres: Vec<Sphere>,
}

impl SphereFamily {
    /// Checks every family invariant.
    pub fn new(n: usize, delta: f64, spheres: Vec<Sphere>) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("family dimension must be at least 2, got {n}")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        let half = cube_half_side(n);
        for (i, s) in spheres.iter().enumerate() {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.dim(),
                });
            }
            if !s.on_slice() || s.centre()[..n - 1].iter().any(|c| c.abs() > half) {
                return Err(invalid(format!("centre of sphere {i} is not in Q^(n-1) x {{0}}")));
            }
            if !(1.0..=2.0).contains(&s.radius()) {
                return Err(Error::RadiusOutOfRange {
                    index: i,
                    radius: s.radius(),
                });
            }
        }
        for i in 0..spheres.len() {
            for j in (i + 1)..spheres.len() {
                let d = centre_distance(&spheres[i], &spheres[j]);
                if d < delta {
                    return Err(invalid(format!(
                        "spheres {i} and {j} are {d} apart, closer than delta = {delta}"
                    )));
                }
            }
        }
        Ok(SphereFamily { n, delta, spheres })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn spheres(&self) -> &[Sphere] {
        &self.spheres
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    /// Smallest pairwise centre distance, `inf` for fewer than two spheres.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                best = best.min(centre_distance(&self.spheres[i], &self.spheres[j]));
            }
        }
        best
    }

    /// Plain-text form: a header row `n delta count`, then one row per
    /// sphere holding the centre coordinates and the radius. Numbers use the
    /// shortest representation that parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.delta, self.len());
        for s in &self.spheres {
            for c in s.centre() {
                write!(out, "{c} ").unwrap();
            }
            writeln!(out, "{}", s.radius()).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: hline,
                message: "header must hold n, delta and count".into(),
            });
        }
        let n: usize = parse_field(fields[0], hline)?;
        let delta: f64 = parse_field(fields[1], hline)?;
        let count: usize = parse_field(fields[2], hline)?;
        let mut spheres = Vec::with_capacity(count);
        for (line, row) in lines {
            let vals = row
                .split_whitespace()
                .map(|f| parse_field::<f64>(f, line))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != n + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} numbers, found {}", n + 1, vals.len()),
                });
            }
            let sphere = Sphere::new(vals[..n].to_vec(), vals[n]).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            spheres.push(sphere);
        }
        if spheres.len() != count {
            return Err(Error::Parse {
                line: hline,
                message: format!("header announces {count} spheres, found {}", spheres.len()),
            });
        }
        SphereFamily::new(n, delta, spheres)
    }

    /// One region of the given kind per sphere, all of thickness `delta`.
    pub fn regions(&self, kind: RegionKind) -> Vec<Region> {
        self.spheres
            .iter()
            .map(|s| Region::new(s.clone(), self.delta, kind).expect("family delta is valid"))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {s:?}"),
    })
}

/// Smallest box holding every region, `None` for an empty list.
pub fn union_box(regions: &[Region]) -> Option<AxisBox> {
    regions
        .iter()
        .map(|r| r.bounding_box())
        .reduce(|a, b| a.union(&b))
}

/// Indices of the regions containing `y`, written into `out`.
pub fn regions_containing(regions: &[Region], y: &[f64], out: &mut Vec<usize>) {
    out.clear();
    out.extend(
        regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(y))
            .map(|(i, _)| i),
    );
}

/// Nodes of the jittered grid along one axis of `Q`.
fn axis_nodes(n: usize, delta: f64) -> Vec<f64> {
    let half = cube_half_side(n);
    let s = GRID_SPACING * delta;
    let k = (2.0 * half / s).floor() as usize + 1;
    let start = -0.5 * (k - 1) as f64 * s;
    (0..k).map(|i| start + i as f64 * s).collect()
}

/// Number of cells in the jittered grid on `Q^{n-1}`.
pub fn grid_capacity(n: usize, delta: f64) -> Option<usize> {
    let k = axis_nodes(n, delta).len();
    (0..n - 1).try_fold(1usize, |acc, _| acc.checked_mul(k))
}

fn jittered_centre<R: Rng>(rng: &mut R, nodes: &[f64], cell: usize, n: usize, delta: f64) -> Vec<f64> {
    let half = cube_half_side(n);
    let k = nodes.len();
    let mut rem = cell;
    let mut c = vec![0.0; n];
    for d in 0..n - 1 {
        let jitter = rng.random_range(-JITTER * delta..=JITTER * delta);
        c[d] = (nodes[rem % k] + jitter).clamp(-half, half);
        rem /= k;
    }
    c
}

fn grid_centre(nodes: &[f64], cell: usize, n: usize) -> Vec<f64> {
    let k = nodes.len();
    let mut rem = cell;
    let mut c = vec![0.0; n];
    for x in c.iter_mut().take(n - 1) {
        *x = nodes[rem % k];
        rem /= k;
    }
    c
}

/// `count` spheres at distinct cells of a jittered grid on `Q^{n-1}`, radii
/// uniform in `[1, 2]`.
pub fn random_family(n: usize, delta: f64, count: usize, seed: u64) -> Result<SphereFamily> {
    if n < 2 {
        return Err(invalid(format!("family dimension must be at least 2, got {n}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let capacity = grid_capacity(n, delta).unwrap_or(usize::MAX);
    if count > capacity {
        return Err(Error::InfeasibleCount {
            requested: count,
            capacity,
        });
    }
    let nodes = axis_nodes(n, delta);
    let mut rng = substream(seed, &[0xFA]);
    let mut cells = index::sample(&mut rng, capacity, count).into_vec();
    cells.sort_unstable();
    let spheres = cells
        .into_iter()
        .map(|cell| {
            let c = jittered_centre(&mut rng, &nodes, cell, n, delta);
            let r = rng.random_range(1.0..=2.0);
            Sphere::new(c, r)
        })
        .collect::<Result<Vec<_>>>()?;
    SphereFamily::new(n, delta, spheres)
}

/// Largest horizontal offset of a centre for which the point at height `h`
/// straight above the origin lies in the open polar cap of the sphere
/// through it.
pub fn focusing_radius(n: usize, height: f64) -> f64 {
    let c = 1.0 - 1.0 / (100.0 * n as f64);
    height * (1.0 / (c * c) - 1.0).sqrt()
}

/// Grid centres inside the disc of radius `fill * focusing_radius` about
/// the origin, each sphere passing exactly through the focus
/// `(0, .., 0, height)`, so every polar cap contains a neighbourhood of it.
/// The grid is jittered when `jitter_seed` is given and symmetric about
/// the origin otherwise.
pub fn focusing_family(n: usize, delta: f64, height: f64, fill: f64, jitter_seed: Option<u64>) -> Result<SphereFamily> {
    if !(1.0..2.0).contains(&height) {
        return Err(invalid(format!("focus height must lie in [1, 2), got {height}")));
    }
    if !(fill > 0.0 && fill <= 1.0) {
        return Err(invalid(format!("fill fraction must lie in (0, 1], got {fill}")));
    }
    let nodes = axis_nodes(n, delta);
    let capacity = grid_capacity(n, delta)
        .ok_or_else(|| invalid("grid too large for a focusing family"))?;
    let reach = fill * focusing_radius(n, height);
    let mut rng = jitter_seed.map(|s| substream(s, &[0xF0C]));
    let mut spheres = Vec::new();
    for cell in 0..capacity {
        let c = match rng.as_mut() {
            Some(rng) => jittered_centre(rng, &nodes, cell, n, delta),
            None => grid_centre(&nodes, cell, n),
        };
        let h2: f64 = c.iter().map(|x| x * x).sum();
        if h2.sqrt() <= reach {
            let r = (h2 + height * height).sqrt();
            spheres.push(Sphere::new(c, r.min(2.0))?);
        }
    }
    SphereFamily::new(n, delta, spheres)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_and_deterministic() {
        let f = random_family(3, 1.0 / 64.0, 256, 5).unwrap();
        assert_eq!(f.len(), 256);
        assert!(f.min_separation() >= 1.0 / 64.0);
        assert_eq!(f, random_family(3, 1.0 / 64.0, 256, 5).unwrap());
        assert_ne!(f, random_family(3, 1.0 / 64.0, 256, 6).unwrap());
    }

    #[test]
    fn infeasible_count() {
        let cap = grid_capacity(3, 0.125).unwrap();
        assert!(matches!(
            random_family(3, 0.125, cap + 1, 1),
            Err(Error::InfeasibleCount { .. })
        ));
        assert_eq!(random_family(3, 0.125, cap, 1).unwrap().len(), cap);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let f = random_family(4, 0.05, 40, 11).unwrap();
        let g = SphereFamily::from_text(&f.to_text()).unwrap();
        assert_eq!(f, g);
        for (a, b) in f.spheres().iter().zip(g.spheres()) {
            assert_eq!(a.radius().to_bits(), b.radius().to_bits());
        }
    }

    #[test]
    fn bad_text_is_rejected() {
        assert!(SphereFamily::from_text("").is_err());
        assert!(SphereFamily::from_text("3 0.1 1\n0 0 0\n").is_err());
        assert!(SphereFamily::from_text("3 0.1 2\n0 0 0 1.5\n").is_err());
    }

    #[test]
    fn focusing_family_passes_through_focus() {
        let f = focusing_family(3, 1.0 / 32.0, 1.5, 0.75, Some(2)).unwrap();
        assert!(f.len() > 4);
        let c = 1.0 - 1.0 / 300.0;
        for s in f.spheres() {
            let top = [0.0, 0.0, 1.5];
            let d = crate::linalg::distance(s.centre(), &top);
            assert!((d - s.radius()).abs() < 1e-12);
            assert!(1.5 > c * s.radius());
        }
        let g = focusing_family(3, 1.0 / 32.0, 1.5, 0.75, None).unwrap();
        assert_eq!(g, focusing_family(3, 1.0 / 32.0, 1.5, 0.75, None).unwrap());
        for s in g.spheres() {
            let mirrored = [-s.centre()[0], -s.centre()[1], 0.0];
            assert!(g.spheres().iter().any(|t| crate::linalg::distance(t.centre(), &mirrored) < 1e-12));
        }
    }
}
