use proptest::prelude::*;
use spherical_maximal::configurations::family::grid_capacity;
use spherical_maximal::configurations::{
    bucket_audit, classify_tuple, enemy_triple, focusing_family, in_bucket, random_family, Certificate, TupleClass,
};

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_families_are_separated(n in 2usize..=4, k in 2..=6i32, frac in 0.05..1.0f64, seed in any::<u64>()) {
        let delta = 2f64.powi(-k);
        let cap = grid_capacity(n, delta).unwrap().min(2000);
        let count = ((cap as f64 * frac) as usize).max(1);
        let f = random_family(n, delta, count, seed).unwrap();
        prop_assert_eq!(f.len(), count);
        prop_assert!(f.min_separation() >= delta);
        for s in f.spheres() {
            prop_assert!((1.0..=2.0).contains(&s.radius()));
            prop_assert_eq!(*s.centre().last().unwrap(), 0.0);
        }
    }

    #[test]
    fn focusing_spheres_pass_through_the_focus(k in 3..=6i32, h in 1.0..1.9f64, seed in prop::option::of(any::<u64>())) {
        let delta = 2f64.powi(-k);
        let f = focusing_family(3, delta, h, 1.0, seed).unwrap();
        prop_assert!(f.min_separation() >= delta);
        for s in f.spheres() {
            let c = s.centre();
            let d = (c[0] * c[0] + c[1] * c[1] + h * h).sqrt();
            prop_assert!((d - s.radius()).abs() < 1e-12);
        }
    }

    #[test]
    fn enemy_certificate_holds(c2 in prop::array::uniform2(-0.6..0.6f64), c3 in prop::array::uniform2(-0.6..0.6f64), phi in -3.1..3.1f64) {
        let Ok(spec) = enemy_triple(0.01, phi, c2, c3) else { return Ok(()); };
        let Certificate::Enemy { point, alignment, residual } = spec.certificate else {
            return Err(TestCaseError::fail("wrong certificate"));
        };
        prop_assert!(alignment <= 1e-10 && residual <= 1e-12);
        // tangents of C1 ∩ Cj at p are normal to both sphere normals
        let p = point;
        let g: Vec<Vec<f64>> = spec.spheres.iter().map(|s| s.centre().iter().zip(&p).map(|(c, q)| q - c).collect()).collect();
        for (s, gj) in spec.spheres.iter().zip(&g) {
            prop_assert!((norm(gj) - s.radius()).abs() <= 1e-12);
        }
        let t2 = cross(&g[0], &g[1]);
        let t3 = cross(&g[0], &g[2]);
        let sin = norm(&cross(&t2, &t3)) / (norm(&t2) * norm(&t3));
        prop_assert!(sin <= 1e-10, "tangent angle sine {sin}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn buckets_partition_separated_tuples(count in 4usize..=14, k in 3..=5i32, seed in any::<u64>()) {
        let delta = 2f64.powi(-k);
        let count = count.min(grid_capacity(3, delta).unwrap());
        let f = random_family(3, delta, count, seed).unwrap();
        let report = bucket_audit(&f, 3).unwrap();
        prop_assert!(report.partition_ok(), "{:?}", report);
        let total: u64 = report.buckets.values().sum();
        prop_assert_eq!(total, report.classified);

        // independent membership: each separated tuple lies in its own bucket only
        let s = f.spheres();
        let sigs: Vec<_> = report.buckets.keys().collect();
        for i in 0..s.len() {
            for j in 0..s.len() {
                for l in 0..s.len() {
                    let t = [&s[i], &s[j], &s[l]];
                    match classify_tuple(&t, delta).unwrap() {
                        TupleClass::Coincident => {
                            prop_assert!(sigs.iter().all(|g| !in_bucket(&t, g, delta)));
                        }
                        TupleClass::Bucket(sig) => {
                            let hits = sigs.iter().filter(|g| in_bucket(&t, g, delta)).count();
                            prop_assert_eq!(hits, 1);
                            prop_assert!(in_bucket(&t, &sig, delta));
                        }
                    }
                }
            }
        }
    }
}
