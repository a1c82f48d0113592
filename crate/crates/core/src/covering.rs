//! Finite sets of detector centers covering rings, horizontal lines and disks.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{bail, Error, Result};
use crate::linalg::C64;

pub const MAX_COVER: u64 = 10_000_000;

/// Ring count `M = ⌈2π / arctan(s/(2R))⌉`.
pub fn ring_count(radius: f64, s: f64) -> Result<u64> {
    if !(radius > 0.0 && s > 0.0) || !radius.is_finite() || !s.is_finite() {
        bail!(InvalidArgument, "ring cover needs radius > 0 and spacing > 0, got {radius}, {s}");
    }
    let m = libm::ceil(2.0 * PI / libm::atan(s / (2.0 * radius)));
    if m > MAX_COVER as f64 {
        return Err(Error::CoverTooLarge(m as u64));
    }
    Ok(m as u64)
}

/// `M` equally spaced points `R e^{2πim/M}`, `m = 1..M`; every point of the
/// circle is within `s` of one of them.
pub fn ring_cover(radius: f64, s: f64) -> Result<Vec<C64>> {
    let m = ring_count(radius, s)?;
    Ok((1..=m).map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / m as f64)).collect())
}

/// Points `r + ih` for `r ∈ {−NΔ, …, NΔ}`, `N = ⌈1/Δ⌉`, most negative real
/// part first.
pub fn line_cover(h: f64, delta: f64) -> Result<Vec<C64>> {
    if !(delta > 0.0) || !delta.is_finite() || !h.is_finite() {
        bail!(InvalidArgument, "line cover needs finite h and delta > 0, got {h}, {delta}");
    }
    let n = libm::ceil(1.0 / delta);
    if 2.0 * n + 1.0 > MAX_COVER as f64 {
        return Err(Error::CoverTooLarge((2.0 * n + 1.0) as u64));
    }
    let n = n as i64;
    Ok((-n..=n).map(|k| C64::new(k as f64 * delta, h)).collect())
}

/// Hexagonal net whose disks of radius `cell` cover the closed disk
/// `D(center, d)`, ordered by distance from the center.
pub fn net_cover(center: C64, d: f64, cell: f64) -> Result<Vec<C64>> {
    if !(d >= 0.0 && cell > 0.0) || !d.is_finite() || !cell.is_finite() {
        bail!(InvalidArgument, "net cover needs d >= 0 and cell > 0, got {d}, {cell}");
    }
    let pitch = libm::sqrt(3.0) * cell * (1.0 - 1e-6);
    let reach = d + cell;
    let estimate = PI * reach * reach / (pitch * pitch * libm::sqrt(3.0) / 2.0);
    if estimate > MAX_COVER as f64 {
        return Err(Error::CoverTooLarge(estimate as u64));
    }
    let row_h = pitch * libm::sqrt(3.0) / 2.0;
    let rows = libm::ceil(reach / row_h) as i64;
    let cols = libm::ceil(reach / pitch) as i64 + 1;
    let mut pts = Vec::new();
    for j in -rows..=rows {
        let shift = if j.rem_euclid(2) == 1 { 0.5 * pitch } else { 0.0 };
        for i in -cols..=cols {
            let z = C64::new(i as f64 * pitch + shift, j as f64 * row_h);
            if z.norm() <= reach {
                pts.push(z);
            }
        }
    }
    pts.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(libm::atan2(a.im, a.re).total_cmp(&libm::atan2(b.im, b.re))));
    Ok(pts.into_iter().map(|z| z + center).collect())
}

/// Largest distance from a random sample of the region to the nearest
/// center; `region` returns a uniform sample.
pub fn sampled_cover_gap(points: &[C64], samples: usize, seed: u64, mut region: impl FnMut(&mut ChaCha8Rng) -> C64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = region(&mut rng);
        let d = points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    worst
}

/// Uniform sample from the closed disk `D(center, radius)`.
pub fn disk_sample(rng: &mut ChaCha8Rng, center: C64, radius: f64) -> C64 {
    center + C64::from_polar(radius * libm::sqrt(rng.random::<f64>()), 2.0 * PI * rng.random::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_counts() {
        assert_eq!(ring_cover(0.5, 0.1).unwrap().len(), 64);
        assert_eq!(ring_cover(1.0, 2.0).unwrap().len(), 8);
        assert!(ring_cover(0.0, 0.1).is_err());
    }

    #[test]
    fn line_counts() {
        let l = line_cover(0.2, 0.3).unwrap();
        assert_eq!(l.len(), 9);
        assert!((l[0].re + 1.2).abs() < 1e-12 && (l[8].re - 1.2).abs() < 1e-12);
        assert!(l.iter().all(|z| z.im == 0.2));
    }

    #[test]
    fn net_too_large() {
        assert!(matches!(net_cover(C64::new(0.0, 0.0), 1.0, 1e-5), Err(Error::CoverTooLarge(_))));
    }

    #[test]
    fn net_covers_disk() {
        let c = C64::new(0.3, -0.2);
        let pts = net_cover(c, 0.5, 0.07).unwrap();
        let gap = sampled_cover_gap(&pts, 10_000, 1, |r| disk_sample(r, c, 0.5));
        assert!(gap <= 0.07);
        assert_eq!(pts[0], c);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn ring_covers_circle(r in 0.01f64..1.0, s in 0.005f64..0.5, seed in 0u64..1000) {
                let pts = ring_cover(r, s).unwrap();
                prop_assert!(pts.iter().all(|z| (z.norm() - r).abs() < 1e-12));
                let gap = sampled_cover_gap(&pts, 2000, seed, |g| C64::from_polar(r, 2.0 * PI * g.random::<f64>()));
                prop_assert!(gap <= s);
            }

            #[test]
            fn line_covers_strip(h in -0.9f64..0.9, delta in 0.02f64..0.5, seed in 0u64..1000) {
                let pts = line_cover(h, delta).unwrap();
                let gap = sampled_cover_gap(&pts, 2000, seed, |g| C64::new(2.0 * g.random::<f64>() - 1.0, h));
                prop_assert!(gap <= delta / 2.0 + 1e-12);
            }

            #[test]
            fn net_covers_random_disk(cr in -0.5f64..0.5, ci in -0.5f64..0.5, d in 0.0f64..0.6, cell in 0.03f64..0.3, seed in 0u64..1000) {
                let c = C64::new(cr, ci);
                let pts = net_cover(c, d, cell).unwrap();
                let gap = sampled_cover_gap(&pts, 1000, seed, |g| disk_sample(g, c, d));
                prop_assert!(gap <= cell);
            }
        }
    }
}
