//! Exact rationals and their text form ("p/q" or "p").

use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn fmt(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt).collect()
}

/// Parses "p/q", an integer, or a finite decimal such as "0.375".
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Schema(format!("not a rational: '{s}'"));
    if let Some((a, b)) = s.split_once('/') {
        let n: i128 = a.trim().parse().map_err(|_| bad())?;
        let d: i128 = b.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 30 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let ip: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse::<i128>().map_err(|_| bad())?.abs() };
        let den = 10i128.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let fp: i128 = frac.parse().map_err(|_| bad())?;
        let v = Q::new(ip * den + fp, den);
        return Ok(if neg { -v } else { v });
    }
    s.parse::<i128>().map(Q::from_integer).map_err(|_| bad())
}

pub fn floor_int(x: &Q) -> i128 {
    x.floor().to_integer()
}

pub fn ceil_int(x: &Q) -> i128 {
    x.ceil().to_integer()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Reduces into [0, 1).
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}
