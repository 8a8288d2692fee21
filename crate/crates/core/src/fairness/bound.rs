use crate::error::{Error, Result};

/// Smallest penalty weight for party `m0` above which swapping an acceptable
/// solution for an unacceptable one strictly lowers the Nash product.
///
/// * `u_m0`: utility of `m0` before the swap.
/// * `mu[m0]`: increase of `m0`'s loss caused by the swap (any sign).
/// * `mu[m]`, `m != m0`: non-negative upper bound on the decrease of party
///   `m`'s loss caused by the swap.
/// * `phi_m0`: violation of the incoming solution for `m0`; must be positive.
/// * `lower_bounds[m]`, `m != m0`: positive lower bounds on the utilities
///   before the swap. The entry at `m0` is ignored.
///
/// Returns `(u_m0 (1 - 1/A) - mu[m0]) / phi_m0` with
/// `A = prod over m != m0 of (1 + mu[m] / lower_bounds[m])`.
pub fn lambda_sufficiency_bound(m0: usize, u_m0: f64, mu: &[f64], phi_m0: f64, lower_bounds: &[f64]) -> Result<f64> {
    if mu.len() != lower_bounds.len() || m0 >= mu.len() {
        return Err(Error::contract("mu and lower bounds must cover every party, including m0"));
    }
    if !(phi_m0 > 0.0) || !phi_m0.is_finite() {
        return Err(Error::contract(format!("the bound is undefined for violation {}", phi_m0)));
    }
    if !(u_m0 > 0.0) {
        return Err(Error::contract(format!("utility of party {} must be positive, got {}", m0 + 1, u_m0)));
    }
    let mut factor = 1.0;
    for (m, (gain, lower)) in mu.iter().zip(lower_bounds).enumerate() {
        if m == m0 {
            continue;
        }
        if !(*lower > 0.0) {
            return Err(Error::contract(format!("utility lower bound for party {} must be positive", m + 1)));
        }
        if !(*gain >= 0.0) {
            return Err(Error::contract(format!("loss-decrease bound for party {} must be non-negative", m + 1)));
        }
        factor *= 1.0 + gain / lower;
    }
    Ok((u_m0 * (1.0 - 1.0 / factor) - mu[m0]) / phi_m0)
}
