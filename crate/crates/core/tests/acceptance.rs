//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spherical_maximal::configurations::{focusing_family, random_family, SphereFamily};
use spherical_maximal::experiments::{execute, run, ExperimentConfig, ExperimentKind, Report};
use spherical_maximal::geometry::slab_of_pair;
use spherical_maximal::linalg::wedge_norm_routes;
use spherical_maximal::maximal::{multiplicity_functional, tuple_sum_bruteforce};
use spherical_maximal::rng::substream;
use spherical_maximal::volume::{grid_volume, mc_volume_clipped, sampling_box};
use spherical_maximal::{Region, Sphere};

const SLOPE_TOL: f64 = 0.15;
const WEDGE_REL: f64 = 1e-10;
const SLAB_PAIRS: usize = 100;
const SLAB_POINTS_PER_PAIR: usize = 10_000;
const WEDGE_INPUTS: usize = 10_000;
const ORACLE_CASES: usize = 100;
const ORACLE_AGREE_FRACTION: f64 = 0.95;
const MULTIPLICITY_SPREAD: f64 = 4.0;

struct Line {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn config(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.quiet = true;
    c
}

fn report_line(id: u32, name: &'static str, rep: &Report, keys: &[&str]) -> Line {
    let mut parts: Vec<String> = keys
        .iter()
        .filter_map(|k| rep.get(k).map(|v| format!("{k}={v}")))
        .collect();
    parts.extend(rep.checks.iter().map(|c| {
        format!("{}: {} {}", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail)
    }));
    Line {
        id,
        name,
        passed: rep.passed(),
        detail: parts.join("; "),
    }
}

fn failed(id: u32, name: &'static str, err: impl std::fmt::Display) -> Line {
    Line {
        id,
        name,
        passed: false,
        detail: format!("error: {err}"),
    }
}

fn experiment(id: u32, name: &'static str, cfg: ExperimentConfig, keys: &[&str]) -> Line {
    match execute(&cfg) {
        Ok(rep) => report_line(id, name, &rep, keys),
        Err(e) => failed(id, name, e),
    }
}

fn c1_enemy() -> Line {
    let mut c = config(ExperimentKind::EnemyScan);
    c.samples = 2_000_000;
    c.set("tolerance", &SLOPE_TOL.to_string()).unwrap();
    experiment(1, "enemy exponent 2.5", c, &["slope", "stderr"])
}

fn c2_collinear_generic() -> Line {
    let mut out = Vec::new();
    let mut passed = true;
    for kind in [ExperimentKind::CollinearScan, ExperimentKind::GenericScan] {
        let mut c = config(kind);
        c.samples = 2_000_000;
        c.set("tolerance", &SLOPE_TOL.to_string()).unwrap();
        match execute(&c) {
            Ok(rep) => {
                passed &= rep.passed();
                out.push(format!(
                    "{kind}: slope={} target={}",
                    rep.get("slope").unwrap_or("?"),
                    rep.get("expected_slope").unwrap_or("?")
                ));
            }
            Err(e) => return failed(2, "collinear 2.0 and generic 3.0 exponents", e),
        }
    }
    Line {
        id: 2,
        name: "collinear 2.0 and generic 3.0 exponents",
        passed,
        detail: out.join("; "),
    }
}

fn c3_polar_rescue() -> Line {
    let c = config(ExperimentKind::TupleBound);
    experiment(
        3,
        "polar-cap rescue of enemy triples",
        c,
        &["K.2^-8", "K.2^-10", "K.2^-12", "K_annulus.2^-12"],
    )
}

fn random_pair(rng: &mut ChaCha8Rng, delta: f64) -> (Sphere, Sphere) {
    loop {
        let a: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
        let b: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
        let d = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let (r, s): (f64, f64) = (rng.random_range(1.0..=2.0), rng.random_range(1.0..=2.0));
        if d >= 2.0 * delta && (r - s).abs() < d {
            return (Sphere::new(a, r).unwrap(), Sphere::new(b, s).unwrap());
        }
    }
}

fn c4_slab() -> Line {
    let results: Vec<(u64, u64, u64)> = (0..SLAB_PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(4, &[i as u64]);
            let delta = 2f64.powi(-(3 + (i % 5) as i32));
            let (a, b) = random_pair(&mut rng, delta);
            let slab = slab_of_pair(&a, &b, delta).unwrap();
            let regions = [Region::annulus(a, delta).unwrap(), Region::annulus(b, delta).unwrap()];
            let bbox = sampling_box(&regions).unwrap();
            let mut y = vec![0.0; 3];
            let (mut inside, mut fails, mut draws) = (0u64, 0u64, 0u64);
            while inside < SLAB_POINTS_PER_PAIR as u64 {
                bbox.sample_into(&mut rng, &mut y);
                draws += 1;
                if regions.iter().all(|r| r.contains(&y)) {
                    inside += 1;
                    fails += !slab.contains(&y) as u64;
                }
            }
            (inside, fails, draws)
        })
        .collect();
    let points: u64 = results.iter().map(|r| r.0).sum();
    let fails: u64 = results.iter().map(|r| r.1).sum();
    let draws: u64 = results.iter().map(|r| r.2).sum();
    Line {
        id: 4,
        name: "slab containment of annulus pairs",
        passed: fails == 0 && points >= 1_000_000,
        detail: format!("{points} points in {SLAB_PAIRS} pairs ({draws} draws), {fails} outside the slab"),
    }
}

fn c5_wedge() -> Line {
    let mut rng = substream(5, &[]);
    let mut bad = 0;
    let mut worst = 0f64;
    for _ in 0..WEDGE_INPUTS {
        let dim = rng.random_range(2..=6usize);
        let count = rng.random_range(1..=dim);
        let vs: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let w = wedge_norm_routes(&vs);
        let scale = w.gram.abs().max(w.product.abs());
        if scale > 0.0 {
            worst = worst.max((w.gram - w.product).abs() / scale);
        }
        bad += !w.agree(WEDGE_REL) as usize;
    }
    Line {
        id: 5,
        name: "Gram and projection wedge routes agree",
        passed: bad == 0,
        detail: format!("{bad}/{WEDGE_INPUTS} disagree beyond {WEDGE_REL:e}; worst relative gap {worst:.2e}"),
    }
}

/// Centres in the unit cube around the origin and radii making every
/// sphere pass through a common random point, so the intersection is
/// never empty.
fn concurrent_spheres(rng: &mut ChaCha8Rng, count: usize, delta: f64) -> Vec<Sphere> {
    'draw: loop {
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
        let mut out: Vec<Sphere> = Vec::new();
        for _ in 0..count {
            let c: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
            let r = c.iter().zip(&p).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            if !(1.0..=2.0).contains(&r) {
                continue 'draw;
            }
            for s in &out {
                let d = s.centre().iter().zip(&c).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                if d < 2.0 * delta {
                    continue 'draw;
                }
            }
            out.push(Sphere::new(c, r).unwrap());
        }
        return out;
    }
}

fn c6_oracles() -> Line {
    let delta = 2f64.powi(-5);
    let agree: Vec<bool> = (0..ORACLE_CASES)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(6, &[i as u64]);
            let spheres = concurrent_spheres(&mut rng, 2 + i % 2, delta);
            let regions: Vec<Region> = spheres.into_iter().map(|s| Region::annulus(s, delta).unwrap()).collect();
            let mc = mc_volume_clipped(&regions, 1_000_000, i as u64).unwrap();
            let grid = grid_volume(&regions, delta / 4.0).unwrap();
            let err = (mc.std_error.powi(2) + grid.std_error.powi(2)).sqrt();
            (mc.value - grid.value).abs() <= 3.0 * err
        })
        .collect();
    let hits = agree.iter().filter(|&&a| a).count();
    let frac = hits as f64 / ORACLE_CASES as f64;

    let mut fams: Vec<SphereFamily> = Vec::new();
    for d in [2f64.powi(-4), 2f64.powi(-5)] {
        let f = focusing_family(3, d, 1.3, 1.0, None).unwrap();
        let mut s = f.spheres().to_vec();
        s.sort_by(|a, b| a.centre()[0].hypot(a.centre()[1]).total_cmp(&b.centre()[0].hypot(b.centre()[1])));
        s.truncate(8);
        fams.push(SphereFamily::new(3, d, s).unwrap());
    }
    for seed in [1, 2] {
        fams.push(random_family(3, 0.125, 8, seed).unwrap());
    }
    let mut mult = Vec::new();
    let mut mult_ok = true;
    for (k, fam) in fams.iter().enumerate() {
        let a = multiplicity_functional(fam, 1_000_000, 60 + k as u64).unwrap();
        let b = tuple_sum_bruteforce(fam, 200_000, 70 + k as u64).unwrap();
        let z = (a.value - b.value).abs() / (a.std_error.powi(2) + b.std_error.powi(2)).sqrt().max(1e-300);
        mult_ok &= z <= 3.0;
        mult.push(format!("{z:.2}"));
    }
    Line {
        id: 6,
        name: "mc vs grid and multiplicity vs tuple sum",
        passed: frac >= ORACLE_AGREE_FRACTION && mult_ok,
        detail: format!(
            "mc/grid within 3 errors on {hits}/{ORACLE_CASES}; multiplicity z-scores [{}]",
            mult.join(", ")
        ),
    }
}

fn c7_buckets() -> Line {
    let mut details = Vec::new();
    let mut passed = true;
    for (seed, delta) in [(1u64, "2^-5"), (2, "2^-5"), (3, "2^-6")] {
        let mut c = config(ExperimentKind::BucketAudit);
        c.seed = seed;
        c.set("delta", delta).unwrap();
        match execute(&c) {
            Ok(rep) => {
                passed &= rep.passed();
                details.push(format!(
                    "seed {seed} delta {delta}: partition {} classified {} coincident volume {} <= {}",
                    rep.get(&format!("partition.{delta}")).unwrap_or("?"),
                    rep.get(&format!("tuples_classified.{delta}")).unwrap_or("?"),
                    rep.get(&format!("coincident_volume.{delta}")).unwrap_or("?"),
                    rep.get(&format!("base_case_bound.{delta}")).unwrap_or("?"),
                ));
            }
            Err(e) => return failed(7, "bucket partition and base case", e),
        }
    }
    Line {
        id: 7,
        name: "bucket partition and base case",
        passed,
        detail: details.join("; "),
    }
}

fn c8_cardinality() -> Line {
    experiment(
        8,
        "cardinality ratios delta-stable",
        config(ExperimentKind::Cardinality),
        &["K_distance_max", "K_angular_max", "K_degenerate_max"],
    )
}

fn c9_multiplicity() -> Line {
    let mut c = config(ExperimentKind::Multiplicity);
    c.seed = 11;
    c.set("max_spread", &MULTIPLICITY_SPREAD.to_string()).unwrap();
    experiment(
        9,
        "multiplicity ratio max/min <= 4 (focusing family)",
        c,
        &["spread.focusing", "spread.random"],
    )
}

fn c10_focusing() -> Line {
    let mut c = config(ExperimentKind::FocusingSweep);
    c.set("tolerance", &SLOPE_TOL.to_string()).unwrap();
    experiment(10, "focusing growth n/p - (n-1)", c, &["slope.p1.2", "slope.p1.5", "slope.p2"])
}

fn c11_determinism() -> Line {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut details = Vec::new();
    let mut passed = true;
    for kind in [ExperimentKind::EnemyScan, ExperimentKind::Multiplicity, ExperimentKind::BucketAudit] {
        let mut bytes = Vec::new();
        for threads in [1, 3] {
            let mut c = config(kind);
            c.samples = 100_000;
            c.out = dir.path().join(format!("{kind}-{threads}"));
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            match pool.install(|| run(&c)) {
                Ok(o) => bytes.push(std::fs::read(o.out_dir.join("raw.csv")).unwrap()),
                Err(e) => return failed(11, "byte-identical raw.csv", e),
            }
        }
        let same = bytes[0] == bytes[1];
        passed &= same;
        details.push(format!("{kind}: {}", if same { "identical" } else { "DIFFERENT" }));
    }
    Line {
        id: 11,
        name: "byte-identical raw.csv on rerun",
        passed,
        detail: details.join("; "),
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 11] = [
        c1_enemy,
        c2_collinear_generic,
        c3_polar_rescue,
        c4_slab,
        c5_wedge,
        c6_oracles,
        c7_buckets,
        c8_cardinality,
        c9_multiplicity,
        c10_focusing,
        c11_determinism,
    ];
    let mut failures = 0;
    for c in criteria {
        let start = Instant::now();
        let line = c();
        failures += !line.passed as usize;
        println!(
            "{} [{:02}] {} ({:.1}s): {}",
            if line.passed { "PASS" } else { "FAIL" },
            line.id,
            line.name,
            start.elapsed().as_secs_f64(),
            line.detail
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
