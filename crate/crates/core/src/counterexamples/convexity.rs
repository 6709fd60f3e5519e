use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityDensity {
    pub n: usize,
    /// Increasing triples with `x1 + x3 - 2 x2 ≥ 0`.
    pub edges: u128,
    pub triples: u128,
    /// Three-term arithmetic progressions.
    pub ap: u128,
    #[serde(with = "rational::serde_str")]
    pub density: Rational,
    /// `1/2 + AP / (2 C(n, 3))`, exact for sets symmetric under reflection.
    #[serde(with = "rational::serde_str")]
    pub formula: Rational,
    pub matches_formula: bool,
}

fn check_points(c: &[i64]) -> Result<()> {
    if c.len() < 3 {
        return Err(Error::input("need at least three points"));
    }
    if c.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("points must be strictly increasing"));
    }
    Ok(())
}

/// `(edges, triples, ap)` by pair enumeration with binary search for the
/// middle point.
pub fn convexity_counts(c: &[i64]) -> Result<(u128, u128, u128)> {
    check_points(c)?;
    let n = c.len();
    let mut edges = 0u128;
    let mut ap = 0u128;
    for i in 0..n {
        for k in i + 2..n {
            let s = c[i] + c[k];
            let mid = &c[i + 1..k];
            // Middle points with 2 x2 ≤ x1 + x3.
            edges += mid.partition_point(|&x| 2 * x <= s) as u128;
            if s % 2 == 0 && mid.binary_search(&(s / 2)).is_ok() {
                ap += 1;
            }
        }
    }
    Ok((edges, rational::binomial(n as u64, 3), ap))
}

pub fn ap_count(c: &[i64]) -> Result<u128> {
    Ok(convexity_counts(c)?.2)
}

pub fn convexity_density(c: &[i64]) -> Result<ConvexityDensity> {
    let (edges, triples, ap) = convexity_counts(c)?;
    let density = rational::from_ticks(edges, triples);
    let formula = rational::frac(1, 2) + rational::from_ticks(ap, 2 * triples);
    Ok(ConvexityDensity {
        n: c.len(),
        edges,
        triples,
        ap,
        matches_formula: density == formula,
        density,
        formula,
    })
}

/// Density on the interval `{lo, …, hi} ⊆ {1, …, n}`.
pub fn convexity_density_interval(n: i64, lo: i64, hi: i64) -> Result<ConvexityDensity> {
    if lo < 1 || hi > n || lo > hi {
        return Err(Error::input(format!("[{}, {}] is not an interval of 1..={}", lo, hi, n)));
    }
    let c: Vec<i64> = (lo..=hi).collect();
    convexity_density(&c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionReport {
    /// `x ↦ p_1 + p_n - x` maps the set onto itself.
    pub involution: bool,
    /// Every triple with `x1 + x3 - 2 x2 > 0` goes to a non-edge.
    pub strict_to_non_edges: bool,
    /// Arithmetic progressions go to arithmetic progressions.
    pub ap_preserved: bool,
    pub triples_checked: u128,
    pub holds: bool,
}

pub fn reflection_involution_check(c: &[i64]) -> Result<InvolutionReport> {
    check_points(c)?;
    let n = c.len();
    let s = c[0] + c[n - 1];
    let set: BTreeSet<i64> = c.iter().copied().collect();
    let involution = c.iter().all(|&x| set.contains(&(s - x)));
    let mut strict_to_non_edges = true;
    let mut ap_preserved = true;
    let mut checked = 0u128;
    if involution {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    checked += 1;
                    let (x1, x2, x3) = (c[i], c[j], c[k]);
                    let (y1, y2, y3) = (s - x3, s - x2, s - x1);
                    let before = x1 + x3 - 2 * x2;
                    let after = y1 + y3 - 2 * y2;
                    if before > 0 && after >= 0 {
                        strict_to_non_edges = false;
                    }
                    if (before == 0) != (after == 0) {
                        ap_preserved = false;
                    }
                }
            }
        }
    }
    Ok(InvolutionReport {
        involution,
        strict_to_non_edges,
        ap_preserved,
        triples_checked: checked,
        holds: involution && strict_to_non_edges && ap_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn small_intervals() {
        assert_eq!(convexity_density(&[1, 2, 3]).unwrap().density, rational::int(1));
        let d = convexity_density_interval(4, 1, 4).unwrap();
        assert_eq!(d.density, frac(3, 4));
        assert!(d.matches_formula);
    }

    #[test]
    fn too_few_points() {
        assert!(convexity_density(&[1, 2]).is_err());
    }

    #[test]
    fn reflection_on_intervals() {
        for (lo, hi) in [(1, 3), (1, 4), (5, 10)] {
            let c: Vec<i64> = (lo..=hi).collect();
            assert!(reflection_involution_check(&c).unwrap().holds);
        }
        assert!(!reflection_involution_check(&[1, 2, 4]).unwrap().involution);
    }
}
