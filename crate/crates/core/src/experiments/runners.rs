use rand::Rng;

use super::{delta_label, fit_exponent, num, predicted_rhs, Check, ExperimentConfig, ExperimentKind, Report, RhsKind};
use crate::configurations::family::grid_capacity;
use crate::configurations::{
    bucket_audit, bucket_volume_audit, cardinality_scan, classify_tuple, collinear_triple, enemy_cap_triple,
    enemy_triple, focusing_family, generic_triple, random_family, reference_generic_triple, SphereFamily,
    TripleSpec, TupleClass,
};
use crate::error::{invalid, Result};
use crate::maximal::{focusing_probe, multiplicity_functional, sliced_max_norm, MaxProbeConfig, ScalarField};
use crate::measure::unit_ball_volume;
use crate::rng::{child_seed, substream};
use crate::volume::{mc_volume_clipped, predicted_tuple_bound};
use crate::RegionKind;

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.kind {
        ExperimentKind::EnemyScan => enemy_scan(cfg),
        ExperimentKind::CollinearScan => collinear_scan(cfg),
        ExperimentKind::GenericScan => generic_scan(cfg),
        ExperimentKind::TupleBound => tuple_bound(cfg),
        ExperimentKind::Multiplicity => multiplicity(cfg),
        ExperimentKind::Cardinality => cardinality(cfg),
        ExperimentKind::BucketAudit => buckets(cfg),
        ExperimentKind::MaximalNorm => maximal_norm(cfg),
        ExperimentKind::FocusingSweep => focusing_sweep(cfg),
    }
}

fn progress(cfg: &ExperimentConfig, msg: impl AsRef<str>) {
    if !cfg.quiet {
        eprintln!("[{}] {}", cfg.kind, msg.as_ref());
    }
}

fn delta_seed(seed: u64, tag: u64, delta: f64) -> u64 {
    child_seed(seed, &[tag, delta.to_bits()])
}

/// Deltas from coarse to fine.
fn sweep(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut d = cfg.deltas.clone();
    d.sort_by(|a, b| b.total_cmp(a));
    d.dedup();
    d
}

fn require_dim(cfg: &ExperimentConfig, n: usize) -> Result<()> {
    if cfg.n != n {
        return Err(invalid(format!("{} runs in dimension {n}, got {}", cfg.kind, cfg.n)));
    }
    Ok(())
}

/// `K(next) <= 2 K(prev)` along a coarse-to-fine sweep.
pub(crate) fn stability_check(name: &str, ks: &[(f64, f64)]) -> Check {
    if let Some((d, k)) = ks.iter().find(|(_, k)| !k.is_finite()) {
        return Check::new(name, false, format!("K = {k} at delta {}", delta_label(*d)));
    }
    let mut worst: Option<(f64, f64)> = None;
    for w in ks.windows(2) {
        let (prev, next) = (w[0].1, w[1].1);
        let step = if next == 0.0 {
            0.0
        } else if prev == 0.0 {
            f64::INFINITY
        } else {
            next / prev
        };
        if worst.is_none_or(|(s, _)| step > s) {
            worst = Some((step, w[1].0));
        }
    }
    match worst {
        None => Check::new(name, true, "single delta"),
        Some((step, d)) => Check::new(
            name,
            step <= 2.0,
            format!("largest K(delta/2)/K(delta) = {step:.4} at delta {}", delta_label(d)),
        ),
    }
}

fn region_kind(cfg: &ExperimentConfig) -> Result<RegionKind> {
    match cfg.extra_str("region", "annulus") {
        "annulus" => Ok(RegionKind::Annulus),
        "polar-cap" | "cap" => Ok(RegionKind::PolarCap),
        other => Err(invalid(format!("unknown region kind `{other}`"))),
    }
}

fn pair(cfg: &ExperimentConfig, key: &str, default: [f64; 2]) -> Result<[f64; 2]> {
    let v = cfg.extra_list(key, &default)?;
    match v.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(invalid(format!("`{key}` needs two numbers"))),
    }
}

fn triple_scan(cfg: &ExperimentConfig, spec: &TripleSpec, tag: u64) -> Result<Report> {
    require_dim(cfg, 3)?;
    let kind = region_kind(cfg)?;
    let tol = cfg.extra_f64("tolerance", 0.15)?;
    let mut rep = Report::new(
        cfg.kind,
        &["delta", "volume", "std_error", "hits", "samples", "bounding_volume"],
    );
    for (i, s) in spec.spheres.iter().enumerate() {
        rep.field(format!("sphere{}", i + 1), format!("centre={:?} radius={:?}", s.centre(), s.radius()));
    }
    rep.field("certificate", format!("{:?}", spec.certificate));
    rep.field("region", format!("{kind:?}"));
    rep.field("samples", cfg.samples);
    let mut pts = Vec::new();
    for d in sweep(cfg) {
        let seed = delta_seed(cfg.seed, tag, d);
        rep.seed(format!("volume.{}", delta_label(d)), seed);
        let v = mc_volume_clipped(&spec.regions(d, kind)?, cfg.samples, seed)?;
        progress(cfg, format!("delta {} volume {:.4e} hits {}", delta_label(d), v.value, v.hits));
        rep.row(vec![
            num(d),
            num(v.value),
            num(v.std_error),
            v.hits.to_string(),
            v.samples.to_string(),
            num(v.bounding_volume),
        ]);
        if v.hits > 0 {
            pts.push((d, v.value));
        }
    }
    let expected = spec.expected_exponent();
    rep.field("expected_slope", expected);
    match fit_exponent(&pts) {
        Ok(fit) => {
            rep.field("slope", format!("{:.6}", fit.slope));
            rep.field("stderr", format!("{:.6}", fit.std_error));
            rep.field("intercept", format!("{:.6}", fit.intercept));
            rep.check(Check::new(
                "slope",
                (fit.slope - expected).abs() <= tol,
                format!("{:.4} vs {expected} +- {tol}", fit.slope),
            ));
        }
        Err(e) => rep.check(Check::new("slope", false, format!("no fit: {e}"))),
    }
    Ok(rep)
}

fn enemy_scan(cfg: &ExperimentConfig) -> Result<Report> {
    let phi = cfg.extra_f64("phi", 0.0)?;
    let c2 = pair(cfg, "centre2", [-0.3, 0.4])?;
    let c3 = pair(cfg, "centre3", [0.2, -0.6])?;
    let finest = cfg.deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let spec = enemy_triple(finest, phi, c2, c3)?;
    triple_scan(cfg, &spec, 0xE1)
}

fn collinear_scan(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = collinear_triple(
        cfg.extra_f64("spacing", 0.5)?,
        cfg.extra_f64("plane_offset", 1.8)?,
        cfg.extra_f64("circle_radius", 0.8)?,
    )?;
    triple_scan(cfg, &spec, 0xC1)
}

fn generic_scan(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.extra_str("draw", "reference") {
        "reference" => triple_scan(cfg, &reference_generic_triple()?, 0x61),
        "random" => {
            let seed = child_seed(cfg.seed, &[0x62]);
            let draw = generic_triple(seed)?;
            let mut rep = triple_scan(cfg, &draw.spec, 0x61)?;
            rep.seed("generator", seed);
            rep.field("generator_retries", draw.retries);
            Ok(rep)
        }
        other => Err(invalid(format!("unknown draw `{other}`, expected reference or random"))),
    }
}

fn tuple_bound(cfg: &ExperimentConfig) -> Result<Report> {
    require_dim(cfg, 3)?;
    let trials = cfg.extra_usize("trials", 64)?;
    let kappa_max = cfg.extra_f64("kappa_max", 6.0)?;
    let scales = cfg.extra_list("t", &[0.125, 0.0625])?;
    if trials == 0 || scales.is_empty() || !(kappa_max > 0.0) {
        return Err(invalid("tuple-bound needs trials > 0, a t list and kappa_max > 0"));
    }
    let mut rep = Report::new(
        cfg.kind,
        &[
            "delta", "trial", "kappa", "t2", "t3", "theta3", "class", "cap_volume", "cap_std_error", "cap_hits",
            "bound", "ratio", "annulus_volume", "annulus_ratio",
        ],
    );
    rep.field("samples", cfg.samples);
    rep.field("trials", trials);
    let (mut ks, mut ks_annulus) = (Vec::new(), Vec::new());
    let mut all_hit = true;
    for d in sweep(cfg) {
        let dseed = delta_seed(cfg.seed, 0x7B, d);
        rep.seed(format!("sweep.{}", delta_label(d)), dseed);
        let mut rng = substream(dseed, &[0]);
        let (mut k, mut k_ann, mut nonzero) = (0f64, 0f64, 0usize);
        for i in 0..trials {
            let kappa = rng.random_range(0.0..kappa_max);
            let t = scales[i % scales.len()];
            let spec = enemy_cap_triple(d, t, kappa, child_seed(dseed, &[1, i as u64]))?;
            let refs: Vec<_> = spec.spheres.iter().collect();
            let TupleClass::Bucket(sig) = classify_tuple(&refs, d)? else {
                continue;
            };
            let theta = sig.theta_or_floor(d);
            let tl = sig.t_list();
            let bound = predicted_tuple_bound(3, d, &tl, &theta)?.value;
            let seed = child_seed(dseed, &[2, i as u64]);
            let cap = mc_volume_clipped(&spec.regions(d, RegionKind::PolarCap)?, cfg.samples, seed)?;
            let ann = mc_volume_clipped(&spec.regions(d, RegionKind::Annulus)?, cfg.samples, seed)?;
            let (r, ra) = (cap.value / bound, ann.value / bound);
            k = k.max(r);
            k_ann = k_ann.max(ra);
            nonzero += (cap.hits > 0) as usize;
            rep.row(vec![
                num(d),
                i.to_string(),
                num(kappa),
                num(tl[0]),
                num(tl[1]),
                num(theta[0]),
                sig.label(),
                num(cap.value),
                num(cap.std_error),
                cap.hits.to_string(),
                num(bound),
                num(r),
                num(ann.value),
                num(ra),
            ]);
        }
        progress(cfg, format!("delta {} K {k:.4} annulus K {k_ann:.3} nonzero {nonzero}/{trials}", delta_label(d)));
        rep.field(format!("K.{}", delta_label(d)), format!("{k:.6}"));
        rep.field(format!("K_annulus.{}", delta_label(d)), format!("{k_ann:.6}"));
        rep.field(format!("nonzero.{}", delta_label(d)), nonzero);
        all_hit &= nonzero > 0;
        ks.push((d, k));
        ks_annulus.push((d, k_ann));
    }
    rep.check(Check::new("nonzero", all_hit, "every delta has a cap intersection with hits"));
    rep.check(stability_check("K_stability", &ks));
    let ann = stability_check("K_annulus_stability", &ks_annulus);
    rep.field("annulus_stability", format!("{} (reported only)", ann.detail));
    Ok(rep)
}

fn build_family(cfg: &ExperimentConfig, which: &str, d: f64, seed: u64) -> Result<SphereFamily> {
    match which {
        "focusing" => {
            let jitter = match cfg.extra.get("jitter_seed") {
                None => None,
                Some(_) => Some(cfg.extra_usize("jitter_seed", 0)? as u64),
            };
            focusing_family(cfg.n, d, cfg.extra_f64("height", 1.3)?, cfg.extra_f64("fill", 1.0)?, jitter)
        }
        "random" => {
            let cap = grid_capacity(cfg.n, d).unwrap_or(usize::MAX);
            let count = cfg.extra_usize("count", 256)?.min(cap);
            random_family(cfg.n, d, count, seed)
        }
        other => Err(invalid(format!("unknown family `{other}`, expected focusing or random"))),
    }
}

fn multiplicity(cfg: &ExperimentConfig) -> Result<Report> {
    let asserted = cfg.extra_str("family", "focusing").to_string();
    let spread_max = cfg.extra_f64("max_spread", 4.0)?;
    let mut families = vec![asserted.clone()];
    if asserted != "random" {
        families.push("random".into());
    }
    let mut rep = Report::new(
        cfg.kind,
        &["family", "delta", "family_size", "value", "std_error", "denominator", "ratio"],
    );
    rep.field("samples", cfg.samples);
    rep.field("asserted_family", &asserted);
    for (fi, which) in families.iter().enumerate() {
        let mut ratios = Vec::new();
        for d in sweep(cfg) {
            let fseed = delta_seed(cfg.seed, 0x3A + fi as u64, d);
            let mseed = delta_seed(cfg.seed, 0x4A + fi as u64, d);
            if which == "random" {
                rep.seed(format!("{which}.family.{}", delta_label(d)), fseed);
            }
            rep.seed(format!("{which}.functional.{}", delta_label(d)), mseed);
            let fam = build_family(cfg, which, d, fseed)?;
            let est = multiplicity_functional(&fam, cfg.samples, mseed)?;
            let denom = predicted_rhs(RhsKind::Multiplicity, cfg.n, cfg.n, d, &[], &[], fam.len())?;
            let ratio = est.value / denom;
            progress(cfg, format!("{which} delta {} #C {} ratio {ratio:.4e}", delta_label(d), fam.len()));
            rep.row(vec![
                which.clone(),
                num(d),
                fam.len().to_string(),
                num(est.value),
                num(est.std_error),
                num(denom),
                num(ratio),
            ]);
            rep.field(format!("ratio.{which}.{}", delta_label(d)), format!("{ratio:.6e}"));
            ratios.push(ratio);
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = max / min;
        rep.field(format!("spread.{which}"), format!("{spread:.4}"));
        if fi == 0 {
            rep.check(Check::new(
                "ratio_spread",
                spread.is_finite() && spread <= spread_max,
                format!("max/min = {spread:.4} <= {spread_max}"),
            ));
        }
    }
    Ok(rep)
}

fn cardinality(cfg: &ExperimentConfig) -> Result<Report> {
    let centres = cfg.extra_usize("centres", 8)?;
    let mut rep = Report::new(
        cfg.kind,
        &["delta", "family_size", "centres", "k_distance", "k_angular", "k_degenerate"],
    );
    let (mut kd, mut ka, mut kg) = (Vec::new(), Vec::new(), Vec::new());
    for d in sweep(cfg) {
        let fseed = delta_seed(cfg.seed, 0xCA, d);
        let sseed = delta_seed(cfg.seed, 0xCB, d);
        rep.seed(format!("family.{}", delta_label(d)), fseed);
        rep.seed(format!("scan.{}", delta_label(d)), sseed);
        let cap = grid_capacity(cfg.n, d).ok_or_else(|| invalid("grid too large"))?;
        let count = cfg.extra_usize("count", cap)?.min(cap);
        let fam = random_family(cfg.n, d, count, fseed)?;
        let s = cardinality_scan(&fam, centres, sseed)?;
        progress(
            cfg,
            format!(
                "delta {} #C {} K {:.4} {:.4} {:.4}",
                delta_label(d),
                fam.len(),
                s.k_distance,
                s.k_angular,
                s.k_degenerate
            ),
        );
        rep.row(vec![
            num(d),
            fam.len().to_string(),
            s.centres_scanned.to_string(),
            num(s.k_distance),
            num(s.k_angular),
            num(s.k_degenerate),
        ]);
        kd.push((d, s.k_distance));
        ka.push((d, s.k_angular));
        kg.push((d, s.k_degenerate));
    }
    for (name, ks) in [("distance", &kd), ("angular", &ka), ("degenerate", &kg)] {
        let max = ks.iter().map(|k| k.1).fold(0.0, f64::max);
        rep.field(format!("K_{name}_max"), format!("{max:.6}"));
        rep.check(stability_check(&format!("K_{name}_stability"), ks));
    }
    Ok(rep)
}

fn buckets(cfg: &ExperimentConfig) -> Result<Report> {
    let m = cfg.extra_usize("m", 3)?;
    let size = cfg.extra_usize("spheres", 64)?;
    let k_base = cfg.extra_f64("k_base", 1.0)?;
    let mut rep = Report::new(
        cfg.kind,
        &["delta", "class", "tuples", "volume", "std_error", "bound", "ratio"],
    );
    rep.field("samples", cfg.samples);
    rep.field("m", m);
    let (mut partition_ok, mut base_ok) = (true, true);
    let mut base_detail = Vec::new();
    for d in sweep(cfg) {
        let fseed = delta_seed(cfg.seed, 0xB0, d);
        let vseed = delta_seed(cfg.seed, 0xB1, d);
        rep.seed(format!("family.{}", delta_label(d)), fseed);
        rep.seed(format!("volume.{}", delta_label(d)), vseed);
        let fam = random_family(cfg.n, d, size, fseed)?;
        let audit = bucket_audit(&fam, m)?;
        let vols = bucket_volume_audit(&fam, m, cfg.samples, vseed)?;
        let label = delta_label(d);
        let ok = audit.partition_ok();
        partition_ok &= ok;
        rep.field(format!("partition.{label}"), if ok { "OK" } else { "FAILED" });
        rep.field(format!("tuples_total.{label}"), audit.total_tuples);
        rep.field(format!("tuples_classified.{label}"), audit.classified);
        rep.field(format!("tuples_coincident.{label}"), audit.coincident);
        rep.field(format!("buckets.{label}"), audit.buckets.len());
        let base = k_base * d * fam.len() as f64;
        rep.field(format!("coincident_volume.{label}"), format!("{:.6e}", vols.coincident.value));
        rep.field(format!("base_case_bound.{label}"), format!("{base:.6e}"));
        base_ok &= vols.coincident.value <= base;
        base_detail.push(format!("{label}: {:.4e} <= {base:.4e}", vols.coincident.value));
        progress(
            cfg,
            format!(
                "delta {label} partition {} classified {} buckets {}",
                if ok { "OK" } else { "FAILED" },
                audit.classified,
                audit.buckets.len()
            ),
        );
        rep.row(vec![
            num(d),
            "coincident".into(),
            audit.coincident.to_string(),
            num(vols.coincident.value),
            num(vols.coincident.std_error),
            num(base),
            num(vols.coincident.value / base),
        ]);
        let mut k_max = 0f64;
        for (sig, &count) in &audit.buckets {
            let est = vols.per_bucket.get(sig).cloned().unwrap_or_default();
            let one = predicted_tuple_bound(m, d, &sig.t_list(), &sig.theta_or_floor(d))?.value;
            let bound = one * count as f64;
            k_max = k_max.max(est.value / bound);
            rep.row(vec![
                num(d),
                sig.label(),
                count.to_string(),
                num(est.value),
                num(est.std_error),
                num(bound),
                num(est.value / bound),
            ]);
        }
        rep.field(format!("K_bucket_max.{label}"), format!("{k_max:.6}"));
    }
    rep.check(Check::new("partition", partition_ok, "every separated tuple in exactly one bucket"));
    rep.check(Check::new("base_case", base_ok, base_detail.join("; ")));
    Ok(rep)
}

fn maximal_norm(cfg: &ExperimentConfig) -> Result<Report> {
    let height = cfg.extra_f64("height", 1.3)?;
    let scale = cfg.extra_f64("ball_radius", 1.0)?;
    let avg = cfg.extra_usize("average_samples", crate::maximal::DEFAULT_AVERAGE_SAMPLES as usize)? as u64;
    let mut rep = Report::new(
        cfg.kind,
        &["delta", "max_norm", "std_error", "f_norm", "ratio", "ratio_over_log", "points"],
    );
    rep.field("test_function", format!("ball of radius {scale} delta at height {height} on the axis"));
    rep.field("average_samples", avg);
    let mut ks = Vec::new();
    for d in sweep(cfg) {
        let seed = delta_seed(cfg.seed, 0x4D, d);
        rep.seed(format!("averages.{}", delta_label(d)), seed);
        let mut pcfg = MaxProbeConfig::new(cfg.n, d, cfg.n as f64 / (cfg.n as f64 - 1.0), seed)?;
        pcfg.samples = avg;
        let mut centre = vec![0.0; cfg.n];
        centre[cfg.n - 1] = height;
        let rho = scale * d;
        let f = ScalarField::ball(centre, rho)?;
        let g = sliced_max_norm(&f, &pcfg)?;
        let f_norm = (unit_ball_volume(cfg.n) * rho.powi(cfg.n as i32)).powf(1.0 / g.p);
        let ratio = g.value / f_norm;
        let k = ratio / (1.0 / d).ln();
        progress(cfg, format!("delta {} ratio {ratio:.4e} ratio/log {k:.4e}", delta_label(d)));
        rep.row(vec![
            num(d),
            num(g.value),
            num(g.std_error),
            num(f_norm),
            num(ratio),
            num(k),
            g.points.to_string(),
        ]);
        rep.field(format!("K.{}", delta_label(d)), format!("{k:.6e}"));
        ks.push((d, k));
    }
    rep.check(Check::new(
        "positive",
        ks.iter().all(|k| k.1 > 0.0 && k.1.is_finite()),
        "sliced norm positive and finite at every delta",
    ));
    rep.check(stability_check("K_stability", &ks));
    Ok(rep)
}

fn focusing_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let ps = cfg.extra_list("p", &[1.2, 1.5, 2.0])?;
    let tol = cfg.extra_f64("tolerance", 0.15)?;
    let mut rep = Report::new(cfg.kind, &["p", "delta", "max_norm", "f_norm", "ratio"]);
    let deltas = sweep(cfg);
    for (i, &p) in ps.iter().enumerate() {
        let seed = child_seed(cfg.seed, &[0xF5, i as u64]);
        rep.seed(format!("p{p}"), seed);
        let probe = focusing_probe(cfg.n, p, &deltas, seed)?;
        for q in &probe.points {
            rep.row(vec![num(p), num(q.delta), num(q.max_norm), num(q.f_norm), num(q.ratio)]);
        }
        progress(cfg, format!("p {p} growth {:.4} predicted {:.4}", probe.growth, probe.predicted));
        rep.field(format!("slope.p{p}"), format!("{:.6}", probe.growth));
        rep.field(format!("stderr.p{p}"), format!("{:.6}", probe.fit.std_error));
        rep.field(format!("predicted.p{p}"), format!("{:.6}", probe.predicted));
        rep.check(Check::new(
            format!("growth_p{p}"),
            (probe.growth - probe.predicted).abs() <= tol,
            format!("{:.4} vs {:.4} +- {tol}", probe.growth, probe.predicted),
        ));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stability_rules() {
        assert!(stability_check("k", &[(0.1, 1.0), (0.05, 1.9), (0.025, 3.7)]).passed);
        assert!(!stability_check("k", &[(0.1, 1.0), (0.05, 2.1)]).passed);
        assert!(!stability_check("k", &[(0.1, 0.0), (0.05, 1.0)]).passed);
        assert!(stability_check("k", &[(0.1, 1.0), (0.05, 0.0)]).passed);
        assert!(!stability_check("k", &[(0.1, f64::NAN)]).passed);
        assert!(stability_check("k", &[(0.1, 1.0)]).passed);
    }
}
