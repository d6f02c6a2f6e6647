use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn big_pow(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// The Gaussian binomial `[a choose b]_q`, the number of b-subspaces of an
/// a-dimensional space over F_q.
pub fn gaussian(a: usize, b: usize, q: u64) -> Result<BigUint> {
    if b > a {
        return Err(Error::Domain(format!(
            "gaussian binomial needs b <= a, got a={a}, b={b}"
        )));
    }
    if q < 2 {
        return Err(Error::Domain(format!("q must be at least 2, got {q}")));
    }
    let one = BigUint::one();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in 0..b {
        num *= big_pow(q, a - k) - &one;
        den *= big_pow(q, k + 1) - &one;
    }
    Ok(num / den)
}

/// `|GL_i(q)| = (q^i - 1)(q^i - q)...(q^i - q^{i-1})`.
fn general_linear_order(i: usize, q: u64) -> BigUint {
    let qi = big_pow(q, i);
    (0..i).fold(BigUint::one(), |acc, k| acc * (&qi - big_pow(q, k)))
}

/// Entry `i` counts the `n x d` matrices over F_q of rank `i`, for
/// `0 <= i <= min(n, d)`: `[n choose i]_q [d choose i]_q |GL_i(q)|`.
pub fn rank_class_counts(q: u64, n: usize, d: usize) -> Vec<BigUint> {
    (0..=n.min(d))
        .map(|i| {
            gaussian(n, i, q).expect("i <= n")
                * gaussian(d, i, q).expect("i <= d")
                * general_linear_order(i, q)
        })
        .collect()
}

/// The landmark-family size: `q^{n+d-1}` when `n >= d + 2`, else `q^{n+d}`.
pub fn theorem_bound(q: u64, n: usize, d: usize) -> Result<BigUint> {
    if d < 2 || n < d {
        return Err(Error::Domain(format!(
            "bound needs n >= d >= 2, got n={n}, d={d}"
        )));
    }
    Ok(if n >= d + 2 {
        big_pow(q, n + d - 1)
    } else {
        big_pow(q, n + d)
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    E,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "10")]
    Ten,
}

impl LogBase {
    /// `log(q^k)` in this base.
    pub fn log_power(self, q: u64, k: usize) -> f64 {
        let x = q as f64;
        k as f64
            * match self {
                LogBase::E => x.ln(),
                LogBase::Two => x.log2(),
                LogBase::Ten => x.log10(),
            }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            _ => Err(Error::Domain(format!(
                "log base must be e, 2 or 10, got {s:?}"
            ))),
        }
    }
}

/// `4 sqrt(q^{nd}) log(q^{nd})`.
pub fn babai_general(q: u64, n: usize, d: usize, base: LogBase) -> f64 {
    let nd = n * d;
    let sqrt = if nd.is_multiple_of(2) {
        (q as f64).powi((nd / 2) as i32)
    } else {
        (q as f64).powi((nd / 2) as i32) * (q as f64).sqrt()
    };
    4.0 * sqrt * base.log_power(q, nd)
}

/// `big / small` in double precision, for arbitrarily large integers.
fn ratio(big: &BigUint, small: &BigUint) -> f64 {
    let shift = big.bits().saturating_sub(960);
    let to = |x: &BigUint| (x >> shift).to_f64().expect("finite after shift");
    to(big) / to(small)
}

/// `(2d q^{nd} / (q^{nd} - M) log(q^{nd}), M)` with `M` the largest rank
/// class.
pub fn babai_strong(q: u64, n: usize, d: usize, base: LogBase) -> (f64, BigUint) {
    let total = big_pow(q, n * d);
    let m = rank_class_counts(q, n, d)
        .into_iter()
        .max()
        .unwrap_or_else(BigUint::zero);
    let bound = 2.0 * d as f64 * ratio(&total, &(&total - &m)) * base.log_power(q, n * d);
    (bound, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn gaussian_small_values() {
        assert_eq!(gaussian(5, 0, 3).unwrap(), big(1));
        assert_eq!(gaussian(2, 1, 2).unwrap(), big(3));
        assert_eq!(gaussian(3, 1, 2).unwrap(), big(7));
        assert_eq!(gaussian(4, 4, 5).unwrap(), big(1));
        assert!(gaussian(2, 3, 2).is_err());
    }

    #[test]
    fn theorem_bound_branches() {
        assert_eq!(theorem_bound(2, 4, 2).unwrap(), big(32));
        assert_eq!(theorem_bound(2, 4, 4).unwrap(), big(256));
        assert_eq!(theorem_bound(3, 3, 2).unwrap(), big(243));
        assert!(matches!(theorem_bound(2, 3, 1), Err(Error::Domain(_))));
        assert!(matches!(theorem_bound(2, 2, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_classes_of_two_by_two_binary() {
        assert_eq!(rank_class_counts(2, 2, 2), vec![big(1), big(9), big(6)]);
        // symmetric in n and d
        assert_eq!(rank_class_counts(3, 2, 4), rank_class_counts(3, 4, 2));
    }

    #[test]
    fn babai_general_at_2_4_4() {
        let expected = 4.0 * 256.0 * 16.0 * std::f64::consts::LN_2;
        let got = babai_general(2, 4, 4, LogBase::E);
        assert!((got - expected).abs() < 1e-9 * expected);
        assert!((got - 11356.5234).abs() < 1e-3);
        assert_eq!(babai_general(2, 4, 4, LogBase::Two), 4.0 * 256.0 * 16.0);
    }

    #[test]
    fn babai_general_odd_exponent() {
        let got = babai_general(2, 3, 1, LogBase::Two);
        let expected = 4.0 * 8f64.sqrt() * 3.0;
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn babai_general_increases_with_nd() {
        for q in [2, 3, 4] {
            let vals: Vec<f64> = (1..12)
                .map(|k| babai_general(q, k, 1, LogBase::E))
                .collect();
            assert!(vals.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn babai_strong_at_2_2_2() {
        let (b, m) = babai_strong(2, 2, 2, LogBase::E);
        assert_eq!(m, big(9));
        let expected = 4.0 * 16.0 / 7.0 * 16f64.ln();
        assert!((b - expected).abs() < 1e-12 * expected);
        assert!((b - 25.35).abs() < 0.01);
    }

    #[test]
    fn ratio_survives_huge_integers() {
        let total = BigUint::from(3u32).pow(2000);
        let r = ratio(&total, &(&total / big(4)));
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn log_base_parsing() {
        for b in [LogBase::E, LogBase::Two, LogBase::Ten] {
            assert_eq!(b.to_string().parse::<LogBase>().unwrap(), b);
        }
        assert!("3".parse::<LogBase>().is_err());
        assert_eq!(serde_json::to_string(&LogBase::Two).unwrap(), "\"2\"");
    }
}
