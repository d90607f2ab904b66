//! Bandwidth-capacity scaling curve: cumulative share of accesses against
//! the share of the footprint, pages taken hottest first.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::format::sig9;
use crate::ingest::PageHistogram;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingCurve {
    /// `(footprint_fraction, access_fraction)`, ending at `(1, 1)`.
    points: Vec<(f64, f64)>,
}

impl ScalingCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Writes the two-column `footprint_frac,access_frac` export.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "footprint_frac,access_frac")?;
        for &(x, y) in &self.points {
            writeln!(out, "{},{}", sig9(x), sig9(y))?;
        }
        Ok(())
    }

    /// Points with the implicit origin prepended.
    fn with_origin(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        std::iter::once((0.0, 0.0)).chain(self.points.iter().copied())
    }
}

pub fn build_scaling_curve(hist: &PageHistogram) -> Result<ScalingCurve> {
    if hist.is_empty() {
        return Err(Error::invalid(
            "cannot build a scaling curve from an empty histogram",
        ));
    }
    let mut pages: Vec<(u64, u64)> = hist.counts.iter().map(|(&p, &c)| (p, c)).collect();
    // hottest first, ties by ascending page number
    pages.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let n = pages.len();
    let total: u128 = pages.iter().map(|&(_, c)| c as u128).sum();
    let mut cum: u128 = 0;
    let mut points = Vec::with_capacity(n);
    for (k, &(_, c)) in pages.iter().enumerate() {
        cum += c as u128;
        let x = if k + 1 == n {
            1.0
        } else {
            (k + 1) as f64 / n as f64
        };
        let y = if k + 1 == n {
            1.0
        } else {
            cum as f64 / total as f64
        };
        points.push((x, y));
    }
    Ok(ScalingCurve { points })
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} {v} outside [0, 1]")))
    }
}

/// Access fraction covered by the hottest `footprint_fraction` of pages,
/// linearly interpolated.
pub fn access_fraction_at(curve: &ScalingCurve, footprint_fraction: f64) -> Result<f64> {
    check_fraction("footprint fraction", footprint_fraction)?;
    let mut prev = (0.0, 0.0);
    for (x, y) in curve.with_origin().skip(1) {
        if footprint_fraction <= x {
            let (x0, y0) = prev;
            if x == x0 {
                return Ok(y);
            }
            return Ok(y0 + (footprint_fraction - x0) / (x - x0) * (y - y0));
        }
        prev = (x, y);
    }
    Ok(1.0)
}

/// Smallest footprint fraction whose interpolated access fraction reaches
/// `access_target`.
pub fn footprint_for_access(curve: &ScalingCurve, access_target: f64) -> Result<f64> {
    check_fraction("access target", access_target)?;
    if access_target == 0.0 {
        return Ok(0.0);
    }
    let mut prev = (0.0, 0.0);
    for (x, y) in curve.with_origin().skip(1) {
        if y >= access_target {
            let (x0, y0) = prev;
            if y == y0 {
                return Ok(x0);
            }
            let t = ((access_target - y0) / (y - y0)).clamp(0.0, 1.0);
            return Ok(x0 + t * (x - x0));
        }
        prev = (x, y);
    }
    Ok(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn hist(counts: &[u64]) -> PageHistogram {
        PageHistogram {
            page_size_bytes: 4096,
            counts: counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as u64, c))
                .collect(),
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn uniform_curve_is_the_diagonal() {
        let c = build_scaling_curve(&hist(&[10, 10, 10, 10])).unwrap();
        assert_eq!(
            c.points(),
            &[(0.25, 0.25), (0.5, 0.5), (0.75, 0.75), (1.0, 1.0)]
        );
    }

    #[test]
    fn skewed_curve() {
        let c = build_scaling_curve(&hist(&[9, 70, 1, 20])).unwrap();
        let expected = [(0.25, 0.70), (0.5, 0.90), (0.75, 0.99), (1.0, 1.0)];
        for (p, e) in c.points().iter().zip(expected) {
            assert!(close(p.0, e.0) && close(p.1, e.1), "{p:?} vs {e:?}");
        }
    }

    #[test]
    fn single_page() {
        let c = build_scaling_curve(&hist(&[42])).unwrap();
        assert_eq!(c.points(), &[(1.0, 1.0)]);
    }

    #[test]
    fn empty_histogram_is_an_error() {
        assert!(build_scaling_curve(&PageHistogram::default()).is_err());
    }

    #[test]
    fn interpolation_queries() {
        let uniform = build_scaling_curve(&hist(&[10, 10, 10, 10])).unwrap();
        let skewed = build_scaling_curve(&hist(&[70, 20, 9, 1])).unwrap();
        assert!(close(access_fraction_at(&uniform, 0.5).unwrap(), 0.5));
        assert!(close(access_fraction_at(&skewed, 0.125).unwrap(), 0.35));
        assert_eq!(access_fraction_at(&skewed, 1.0).unwrap(), 1.0);
        assert_eq!(access_fraction_at(&skewed, 0.0).unwrap(), 0.0);
        assert!(access_fraction_at(&skewed, 1.5).is_err());
        assert!(access_fraction_at(&skewed, -0.1).is_err());

        assert!(close(footprint_for_access(&uniform, 0.9).unwrap(), 0.9));
        assert!(close(footprint_for_access(&skewed, 0.70).unwrap(), 0.25));
        assert_eq!(footprint_for_access(&skewed, 0.0).unwrap(), 0.0);
        assert!(footprint_for_access(&skewed, 1.01).is_err());
    }

    #[test]
    fn ties_break_by_page_number() {
        let h = PageHistogram {
            page_size_bytes: 4096,
            counts: BTreeMap::from([(7, 5), (3, 5), (9, 1)]),
        };
        let c = build_scaling_curve(&h).unwrap();
        assert!(close(c.points()[0].1, 5.0 / 11.0));
    }

    #[test]
    fn csv_export() {
        let c = build_scaling_curve(&hist(&[70, 20, 9, 1])).unwrap();
        let mut out = Vec::new();
        c.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "footprint_frac,access_frac\n0.25,0.7\n0.5,0.9\n0.75,0.99\n1,1\n"
        );
    }

    proptest! {
        #[test]
        fn curve_dominates_diagonal(counts in prop::collection::vec(1u64..1000, 1..64)) {
            let c = build_scaling_curve(&hist(&counts)).unwrap();
            for &(x, y) in c.points() {
                prop_assert!(y >= x - 1e-12);
            }
            let all_equal = counts.iter().all(|&v| v == counts[0]);
            let on_diagonal = c.points().iter().all(|&(x, y)| (x - y).abs() < 1e-12);
            prop_assert_eq!(all_equal, on_diagonal);
            prop_assert_eq!(*c.points().last().unwrap(), (1.0, 1.0));
        }

        #[test]
        fn scaling_counts_preserves_curve(counts in prop::collection::vec(1u64..1000, 1..64), k in 1u64..1000) {
            let a = build_scaling_curve(&hist(&counts)).unwrap();
            let scaled: Vec<u64> = counts.iter().map(|c| c * k).collect();
            let b = build_scaling_curve(&hist(&scaled)).unwrap();
            for (p, q) in a.points().iter().zip(b.points()) {
                prop_assert!(close(p.0, q.0) && close(p.1, q.1));
            }
        }

        #[test]
        fn access_fraction_is_monotone(counts in prop::collection::vec(1u64..1000, 1..32), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let c = build_scaling_curve(&hist(&counts)).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(access_fraction_at(&c, lo).unwrap() <= access_fraction_at(&c, hi).unwrap() + 1e-12);
        }

        #[test]
        fn footprint_query_inverts_access_query(counts in prop::collection::vec(1u64..1000, 1..32), t in 0.0f64..=1.0) {
            let c = build_scaling_curve(&hist(&counts)).unwrap();
            let x = footprint_for_access(&c, t).unwrap();
            prop_assert!(access_fraction_at(&c, x).unwrap() >= t - 1e-9);
        }
    }
}
