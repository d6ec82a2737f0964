//! Closed-form group orders, evaluated exactly.

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::gf::prime_power;

pub type BigCount = BigUint;

pub fn factorial(m: usize) -> BigCount {
    (2..=m).fold(BigCount::one(), |acc, i| acc * i)
}

fn check_q(q: usize) -> Result<()> {
    match prime_power(q) {
        Some(_) => Ok(()),
        None => Err(Error::UnsupportedOrder(q)),
    }
}

/// Number of lines per side, `(q^n - 1) / (q - 1)`.
fn line_count(q: usize, n: usize) -> usize {
    (0..n).map(|i| q.pow(i as u32)).sum()
}

/// `(q+1)! (2 ((q-1)!)^2)^(q+1)`.
pub fn formula_card_n2(q: usize) -> Result<BigCount> {
    check_q(q)?;
    let per_component = formula_component_isos(q)?;
    Ok(factorial(q + 1) * Pow::pow(per_component, (q + 1) as u32))
}

/// `2 M! ((q-1)!)^(2M)` with `M = (q^n - 1)/(q - 1)`, for `n >= 3`.
pub fn formula_card_general(q: usize, n: usize) -> Result<BigCount> {
    check_q(q)?;
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let m = line_count(q, n);
    Ok(BigCount::from(2u32) * factorial(m) * formula_twin_stabilizer(q, n)?)
}

/// `((q-1)!)^(2M)`.
pub fn formula_twin_stabilizer(q: usize, n: usize) -> Result<BigCount> {
    check_q(q)?;
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let m = line_count(q, n);
    Ok(Pow::pow(factorial(q - 1), (2 * m) as u32))
}

/// `2 ((q-1)!)^2`: isomorphisms between two `n = 2` components.
pub fn formula_component_isos(q: usize) -> Result<BigCount> {
    check_q(q)?;
    let f = factorial(q - 1);
    Ok(BigCount::from(2u32) * &f * &f)
}
