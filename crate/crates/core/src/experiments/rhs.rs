//! Closed-form right-hand sides used as denominators in ratio audits.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RhsKind {
    /// `delta^a(m,n) prod theta_j^(n-j) prod t_j^(n-2) #C`.
    TupleSum,
    /// `ln(1/delta) delta^(n-(n-1)^2) #C`.
    Multiplicity,
}

/// `a(m, n) = m - (m - 1)(n - 1)`.
pub fn a_exponent(m: usize, n: usize) -> i64 {
    let (m, n) = (m as i64, n as i64);
    m - (m - 1) * (n - 1)
}

/// `t_list` holds `t_2 .. t_m`, `theta_list` holds `theta_3 .. theta_m`;
/// both are ignored for [`RhsKind::Multiplicity`].
pub fn predicted_rhs(
    kind: RhsKind,
    n: usize,
    m: usize,
    delta: f64,
    t_list: &[f64],
    theta_list: &[f64],
    family_size: usize,
) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("dimension {n} < 2")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta {delta} outside (0, 1)")));
    }
    let size = family_size as f64;
    match kind {
        RhsKind::Multiplicity => {
            let e = n as i32 - (n as i32 - 1).pow(2);
            Ok((1.0 / delta).ln() * delta.powi(e) * size)
        }
        RhsKind::TupleSum => {
            if m < 2 {
                return Err(invalid("tuple length must be at least 2"));
            }
            if t_list.len() != m - 1 || theta_list.len() != m - 2 {
                return Err(invalid(format!(
                    "expected {} distances and {} angles, got {} and {}",
                    m - 1,
                    m - 2,
                    t_list.len(),
                    theta_list.len()
                )));
            }
            if let Some(t) = t_list.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
                return Err(invalid(format!("distance scale {t} outside (0, 1]")));
            }
            if let Some(th) = theta_list.iter().find(|&&th| !(th > 0.0 && th <= 1.0)) {
                return Err(invalid(format!("angle scale {th} outside (0, 1]")));
            }
            let mut v = delta.powi(a_exponent(m, n) as i32) * size;
            for (i, &th) in theta_list.iter().enumerate() {
                v *= th.powi(n as i32 - (i as i32 + 3));
            }
            for &t in t_list {
                v *= t.powi(n as i32 - 2);
            }
            Ok(v)
        }
    }
}
