//! Small dense vector helpers, orthogonal projection and the two routes to
//! the norm of a wedge product.
//!
//! Vectors are plain `&[f64]` slices; every routine here works in any
//! dimension and allocates only for its output.

use crate::error::{Error, Result};

/// Residual norm (relative to the input vector) below which a vector is
/// treated as lying in the span of its predecessors.
pub const ORTHO_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Cross product in three dimensions.
pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Orthonormal basis of `span(vectors)` by modified Gram-Schmidt with one
/// reorthogonalisation pass. Fails if any vector is (numerically) in the
/// span of its predecessors.
pub fn orthonormalise(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (index, b) in vectors.iter().enumerate() {
        if let Some(first) = q.first() {
            check_dims(first.len(), b.len())?;
        }
        let scale_ref = norm(b);
        let mut w = b.clone();
        for _ in 0..2 {
            for e in &q {
                let c = dot(e, &w);
                w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= c * ei);
            }
        }
        let residual = norm(&w);
        if !(residual > ORTHO_TOL * scale_ref) || residual == 0.0 {
            return Err(Error::DependentBasis { index, residual });
        }
        w.iter_mut().for_each(|x| *x /= residual);
        q.push(w);
    }
    Ok(q)
}

/// Component of `v` orthogonal to `span(basis)`, by sequential
/// orthogonalisation. An empty basis returns `v` unchanged.
pub fn proj_orthocomplement(basis: &[Vec<f64>], v: &[f64]) -> Result<Vec<f64>> {
    for b in basis {
        check_dims(v.len(), b.len())?;
    }
    let q = orthonormalise(basis)?;
    let mut w = v.to_vec();
    for _ in 0..2 {
        for e in &q {
            let c = dot(e, &w);
            w.iter_mut().zip(e).for_each(|(wi, ei)| *wi -= c * ei);
        }
    }
    Ok(w)
}

/// Both evaluations of `|x_1 ∧ ... ∧ x_l|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeRoutes {
    /// Square root of the Gram determinant.
    pub gram: f64,
    /// `|x_1| * prod_j |proj_perp x_j|` (base times height).
    pub product: f64,
}

impl WedgeRoutes {
    /// True when the routes agree to relative tolerance `rel`, or both are
    /// below `rel` in absolute value.
    pub fn agree(&self, rel: f64) -> bool {
        let scale = self.gram.abs().max(self.product.abs());
        if scale <= rel {
            return true;
        }
        (self.gram - self.product).abs() <= rel * scale
    }
}

/// Norm of the wedge product of `vectors`, computed from the Gram
/// determinant. Returns 0 for dependent input.
pub fn wedge_norm(vectors: &[Vec<f64>]) -> f64 {
    gram_wedge_norm(vectors)
}

pub fn wedge_norm_routes(vectors: &[Vec<f64>]) -> WedgeRoutes {
    WedgeRoutes {
        gram: gram_wedge_norm(vectors),
        product: product_wedge_norm(vectors),
    }
}

/// Base-times-height route: `|x_1| * prod_{j>=2} |proj_{<x_1..x_{j-1}>^perp} x_j|`.
pub fn product_wedge_norm(vectors: &[Vec<f64>]) -> f64 {
    let Some(first) = vectors.first() else {
        return 1.0;
    };
    if vectors.len() > first.len() {
        return 0.0;
    }
    let mut value = norm(first);
    for j in 1..vectors.len() {
        match proj_orthocomplement(&vectors[..j], &vectors[j]) {
            Ok(w) => value *= norm(&w),
            Err(_) => return 0.0,
        }
    }
    value
}

/// Gram-determinant route. The Gram matrix and its LDL^T factorisation are
/// carried in double-double arithmetic so that nearly dependent inputs do
/// not lose half their digits to cancellation.
pub fn gram_wedge_norm(vectors: &[Vec<f64>]) -> f64 {
    let l = vectors.len();
    if l == 0 {
        return 1.0;
    }
    let d = vectors[0].len();
    if l > d || vectors.iter().any(|v| v.len() != d) {
        return 0.0;
    }
    let mut g = vec![Dd::ZERO; l * l];
    for i in 0..l {
        for j in 0..=i {
            let mut acc = Dd::ZERO;
            for k in 0..d {
                acc = acc.add(Dd::prod(vectors[i][k], vectors[j][k]));
            }
            g[i * l + j] = acc;
            g[j * l + i] = acc;
        }
    }
    // LDL^T without pivoting; D_j is the squared residual of x_j.
    let mut lower = vec![Dd::ZERO; l * l];
    let mut diag = vec![Dd::ZERO; l];
    let mut det = Dd::ONE;
    for j in 0..l {
        let mut dj = g[j * l + j];
        for k in 0..j {
            dj = dj.sub(lower[j * l + k].mul(lower[j * l + k]).mul(diag[k]));
        }
        if dj.hi <= 0.0 {
            return 0.0;
        }
        diag[j] = dj;
        det = det.mul(dj);
        for i in (j + 1)..l {
            let mut v = g[i * l + j];
            for k in 0..j {
                v = v.sub(lower[i * l + k].mul(lower[j * l + k]).mul(diag[k]));
            }
            lower[i * l + j] = v.div(dj);
        }
    }
    let value = det.hi + det.lo;
    if value <= 0.0 {
        0.0
    } else {
        value.sqrt()
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: e }
    }

    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::quick(s.hi, s.lo + t.hi);
        Dd::quick(r.hi, r.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::prod(self.hi, o.hi);
        Dd::quick(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd { hi: q1, lo: 0.0 }));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd { hi: q2, lo: 0.0 }));
        let q3 = r.hi / o.hi;
        Dd::quick(q1, q2).add(Dd { hi: q3, lo: 0.0 })
    }
}
