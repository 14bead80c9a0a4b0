//! The multiplicity functional `integral of (sum_C chi_{C*})^n` and its
//! brute-force expansion over tuples.

use rayon::prelude::*;

use crate::configurations::buckets::Estimate;
use crate::configurations::family::{union_box, SphereFamily};
use crate::error::{invalid, Result};
use crate::geometry::{AxisBox, Region, RegionKind};
use crate::rng::{child_seed, substream, CHUNK};
use crate::volume::{mc_volume_clipped, sampling_box};

const INDEX_CELLS: usize = 64;

/// Uniform bucket grid over the first one or two coordinates, listing the
/// regions whose bounding box meets each cell.
pub(crate) struct RegionIndex<'a> {
    regions: &'a [Region],
    axes: usize,
    lo: [f64; 2],
    width: [f64; 2],
    cells: Vec<Vec<u32>>,
}

impl<'a> RegionIndex<'a> {
    pub(crate) fn new(regions: &'a [Region], bbox: &AxisBox) -> Self {
        let axes = bbox.dim().clamp(1, 2);
        let mut lo = [0.0; 2];
        let mut width = [1.0; 2];
        for a in 0..axes {
            lo[a] = bbox.lo[a];
            width[a] = ((bbox.hi[a] - bbox.lo[a]) / INDEX_CELLS as f64).max(f64::MIN_POSITIVE);
        }
        let mut cells = vec![Vec::new(); INDEX_CELLS.pow(axes as u32)];
        let mut idx = Self {
            regions,
            axes,
            lo,
            width,
            cells: Vec::new(),
        };
        for (i, r) in regions.iter().enumerate() {
            let b = r.bounding_box();
            let range: Vec<(usize, usize)> = (0..axes).map(|a| (idx.cell(a, b.lo[a]), idx.cell(a, b.hi[a]))).collect();
            let (r0, r1) = (range[0], *range.get(1).unwrap_or(&(0, 0)));
            for c0 in r0.0..=r0.1 {
                for c1 in r1.0..=r1.1 {
                    cells[c0 * if axes == 2 { INDEX_CELLS } else { 1 } + c1].push(i as u32);
                }
            }
        }
        idx.cells = cells;
        idx
    }

    fn cell(&self, axis: usize, v: f64) -> usize {
        (((v - self.lo[axis]) / self.width[axis]).floor().max(0.0) as usize).min(INDEX_CELLS - 1)
    }

    /// Number of regions containing `y`.
    pub(crate) fn count(&self, y: &[f64]) -> u64 {
        let mut flat = self.cell(0, y[0]);
        if self.axes == 2 {
            flat = flat * INDEX_CELLS + self.cell(1, y[1]);
        }
        self.cells[flat]
            .iter()
            .filter(|&&i| self.regions[i as usize].contains(y))
            .count() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub bounding_volume: f64,
}

/// Monte-Carlo estimate of `integral (sum_C chi_{C^{delta,*}})^n`, which
/// equals the sum over ordered `n`-tuples of `|C1* ∩ .. ∩ Cn*|`.
pub fn multiplicity_functional(family: &SphereFamily, samples: u64, seed: u64) -> Result<MultiplicityEstimate> {
    if family.is_empty() {
        return Err(invalid("multiplicity of an empty family"));
    }
    if samples == 0 {
        return Err(crate::error::Error::ZeroSamples);
    }
    let n = family.n();
    let caps = family.regions(RegionKind::PolarCap);
    let bbox = union_box(&caps).expect("nonempty family");
    let index = RegionIndex::new(&caps, &bbox);
    let chunks = samples.div_ceil(CHUNK);
    let (s1, s2) = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, &[k]);
            let mut y = vec![0.0; n];
            let (mut s1, mut s2) = (0u128, 0u128);
            for _ in 0..CHUNK.min(samples - k * CHUNK) {
                bbox.sample_into(&mut rng, &mut y);
                let c = index.count(&y) as u128;
                let cn = c.pow(n as u32);
                s1 += cn;
                s2 += cn * cn;
            }
            (s1, s2)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let e = Estimate::from_sums(bbox.volume(), s1, s2, samples);
    Ok(MultiplicityEstimate {
        value: e.value,
        std_error: e.std_error,
        samples,
        bounding_volume: bbox.volume(),
    })
}

/// Number of maps from `n` positions onto a set of `k` elements.
pub fn surjections(n: usize, k: usize) -> u64 {
    // inclusion-exclusion: sum (-1)^i C(k,i) (k-i)^n
    let mut total = 0i128;
    let mut binom = 1i128;
    for i in 0..=k {
        let term = binom * ((k - i) as i128).pow(n as u32);
        total += if i % 2 == 0 { term } else { -term };
        binom = binom * (k - i) as i128 / (i + 1) as i128;
    }
    total as u64
}

/// The same functional summed tuple by tuple: every set `S` of at most `n`
/// distinct caps contributes `surjections(n, |S|) * |∩ S|`, each volume
/// from [`mc_volume_clipped`]. Exponential in the family size.
pub fn tuple_sum_bruteforce(family: &SphereFamily, samples: u64, seed: u64) -> Result<Estimate> {
    let count = family.len();
    if count > 16 {
        return Err(invalid(format!("brute force over {count} spheres")));
    }
    let n = family.n();
    let caps = family.regions(RegionKind::PolarCap);
    let (mut value, mut var) = (0.0, 0.0);
    for mask in 1u32..(1 << count) {
        let size = mask.count_ones() as usize;
        if size > n {
            continue;
        }
        let set: Vec<Region> = (0..count).filter(|i| mask >> i & 1 == 1).map(|i| caps[i].clone()).collect();
        let bbox = sampling_box(&set)?;
        if bbox.is_empty() || bbox.volume() == 0.0 {
            continue;
        }
        let v = mc_volume_clipped(&set, samples, child_seed(seed, &[mask as u64]))?;
        let weight = surjections(n, size) as f64;
        value += weight * v.value;
        var += (weight * v.std_error).powi(2);
    }
    Ok(Estimate {
        value,
        std_error: var.sqrt(),
    })
}
