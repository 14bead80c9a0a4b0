//! Sphere families, the model triples and the dyadic bucket machinery.

pub mod buckets;
pub mod cardinality;
pub mod family;
pub mod triples;

pub use buckets::{
    angular_bucket, bucket_audit, bucket_volume_audit, classify_tuple, distance_bucket, in_bucket,
    AngularClass, BucketReport, BucketSignature, BucketVolumes, DistanceClass, Estimate, TupleClass,
};
pub use cardinality::{cardinality_audit, cardinality_scan, CardinalityReport, CardinalityScan};
pub use family::{focusing_family, random_family, SphereFamily};
pub use triples::{
    collinear_triple, enemy_cap_triple, enemy_triple, generic_triple, reference_generic_triple, Certificate, GenericDraw,
    TripleKind, TripleSpec,
};
