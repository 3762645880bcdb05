//! Seeded generators for synthetic point sets and Pareto samples.
//!
//! RNG discipline: point `i` draws from its own `Xoshiro256PlusPlus`, seeded
//! with `splitmix64(splitmix64(seed) ^ i)`. Output therefore depends only on
//! `(seed, i)`, is identical across platforms and can be produced in any
//! order.
//!
//! Torus angles `(u, v)` are sampled uniformly, which over-weights the inner
//! side of the tube relative to an area-uniform sample.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::pointset::PointSet;

pub const DEFAULT_N: usize = 500;
pub const DEFAULT_SIGMA: f64 = 0.02;
pub const DEFAULT_CIRCLE_RADIUS: f64 = 1.0;
pub const DEFAULT_TORUS_MAJOR: f64 = 1.0;
pub const DEFAULT_TORUS_MINOR: f64 = 0.35;

pub type PointRng = Xoshiro256PlusPlus;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for point `index` under `seed`.
pub fn point_rng(seed: u64, index: u64) -> PointRng {
    PointRng::seed_from_u64(splitmix64(splitmix64(seed) ^ index))
}

fn gaussian(rng: &mut PointRng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn check_common(n: usize, sigma: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "noise sigma must be >= 0, got {sigma}"
        )));
    }
    Ok(())
}

fn generate<const D: usize>(
    n: usize,
    seed: u64,
    label: &str,
    mut f: impl FnMut(&mut PointRng) -> [f64; D],
) -> Result<PointSet> {
    let mut coords = Vec::with_capacity(n * D);
    for i in 0..n {
        let mut rng = point_rng(seed, i as u64);
        coords.extend_from_slice(&f(&mut rng));
    }
    Ok(PointSet::from_flat(D, coords)?.with_label(label))
}

/// Noisy circle of radius `radius` in the plane.
pub fn gen_circle(n: usize, radius: f64, sigma: f64, seed: u64) -> Result<PointSet> {
    check_common(n, sigma)?;
    check_positive("circle radius", radius)?;
    generate(n, seed, "circle", |rng| {
        let theta = rng.random::<f64>() * TAU;
        let (s, c) = theta.sin_cos();
        [
            radius * c + gaussian(rng, sigma),
            radius * s + gaussian(rng, sigma),
        ]
    })
}

/// Noisy torus with tube centre radius `major` and tube radius `minor`.
pub fn gen_torus(n: usize, major: f64, minor: f64, sigma: f64, seed: u64) -> Result<PointSet> {
    check_common(n, sigma)?;
    check_positive("torus minor radius", minor)?;
    check_positive("torus major radius", major)?;
    if major <= minor {
        return Err(Error::InvalidParam(format!(
            "torus needs major > minor, got {major} <= {minor}"
        )));
    }
    generate(n, seed, "torus", |rng| {
        let u = rng.random::<f64>() * TAU;
        let v = rng.random::<f64>() * TAU;
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let ring = major + minor * cv;
        [
            ring * cu + gaussian(rng, sigma),
            ring * su + gaussian(rng, sigma),
            minor * sv + gaussian(rng, sigma),
        ]
    })
}

/// Axis-aligned rectangle `[x0, x0 + width] x [y0, y0 + height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            x0: 0.0,
            y0: 0.0,
            width,
            height,
        }
    }

    fn area(&self) -> f64 {
        self.width * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Disc {
    pub fn new(cx: f64, cy: f64, radius: f64) -> Self {
        Self {
            center: [cx, cy],
            radius,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        (dx * dx + dy * dy).sqrt() < self.radius
    }
}

/// Four discs of radii 0.5, 0.4, 0.3, 0.2 in a 4 x 4 square.
pub fn default_holes() -> (Rect, Vec<Disc>) {
    (
        Rect::new(4.0, 4.0),
        vec![
            Disc::new(1.0, 1.0, 0.5),
            Disc::new(3.0, 1.0, 0.4),
            Disc::new(1.0, 3.0, 0.3),
            Disc::new(3.0, 3.0, 0.2),
        ],
    )
}

/// Uniform points on `rect` with every disc punched out.
pub fn gen_holes(n: usize, rect: Rect, discs: &[Disc], seed: u64) -> Result<PointSet> {
    check_common(n, 0.0)?;
    check_positive("rectangle width", rect.width)?;
    check_positive("rectangle height", rect.height)?;
    if !(rect.x0.is_finite() && rect.y0.is_finite()) {
        return Err(Error::InvalidParam(
            "rectangle origin must be finite".into(),
        ));
    }
    for (i, d) in discs.iter().enumerate() {
        check_positive("hole radius", d.radius)?;
        let [cx, cy] = d.center;
        let inside = cx - d.radius >= rect.x0
            && cx + d.radius <= rect.x0 + rect.width
            && cy - d.radius >= rect.y0
            && cy + d.radius <= rect.y0 + rect.height;
        if !inside {
            return Err(Error::InvalidParam(format!(
                "disc {i} is not inside the rectangle"
            )));
        }
        for (j, e) in discs[..i].iter().enumerate() {
            let gap = ((cx - e.center[0]).powi(2) + (cy - e.center[1]).powi(2)).sqrt();
            if gap < d.radius + e.radius {
                return Err(Error::InvalidParam(format!("discs {j} and {i} overlap")));
            }
        }
    }
    let covered: f64 = discs
        .iter()
        .map(|d| std::f64::consts::PI * d.radius * d.radius)
        .sum();
    check_acceptance(1.0 - covered / rect.area())?;
    generate(n, seed, "holes", |rng| loop {
        let p = [
            rect.x0 + rng.random::<f64>() * rect.width,
            rect.y0 + rng.random::<f64>() * rect.height,
        ];
        if !discs.iter().any(|d| d.contains(p)) {
            return p;
        }
    })
}

fn check_acceptance(acceptance: f64) -> Result<()> {
    if acceptance < 0.01 {
        return Err(Error::RejectionStall { acceptance });
    }
    Ok(())
}

/// Pareto sample `U^(-gamma)` with exact tail index `gamma`, as a 1-D set.
pub fn gen_pareto(n: usize, gamma: f64, seed: u64) -> Result<PointSet> {
    check_common(n, 0.0)?;
    check_positive("tail index", gamma)?;
    generate(n, seed, "pareto", |rng| {
        // 1 - [0, 1) lies in (0, 1], so the power is finite and >= 1.
        let u = 1.0 - rng.random::<f64>();
        [u.powf(-gamma)]
    })
}

/// Convenience wrapper returning the Pareto sample as plain values.
pub fn pareto_values(n: usize, gamma: f64, seed: u64) -> Result<Vec<f64>> {
    Ok(gen_pareto(n, gamma, seed)?.coords().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_circle_is_on_circle() {
        let ps = gen_circle(4, 1.0, 0.0, 7).unwrap();
        for p in ps.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_circle_stays_within_six_sigma() {
        let ps = gen_circle(500, 1.0, 0.02, 3).unwrap();
        let worst = ps
            .points()
            .map(|p| (p[0].hypot(p[1]) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.15, "worst deviation {worst}");
    }

    #[test]
    fn noise_free_torus_satisfies_surface_equation() {
        let (big, small) = (1.0, 0.35);
        let ps = gen_torus(300, big, small, 0.0, 11).unwrap();
        for p in ps.points() {
            let rho = p[0].hypot(p[1]);
            let lhs = (rho - big).powi(2) + p[2] * p[2];
            assert!((lhs - small * small).abs() < 1e-12);
            assert!(rho >= big - small - 1e-12 && rho <= big + small + 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_circle(50, 1.0, 0.1, 5), gen_circle(50, 1.0, 0.1, 5));
        assert_eq!(
            gen_torus(50, 1.0, 0.3, 0.1, 5),
            gen_torus(50, 1.0, 0.3, 0.1, 5)
        );
        let (rect, discs) = default_holes();
        assert_eq!(
            gen_holes(50, rect, &discs, 5),
            gen_holes(50, rect, &discs, 5)
        );
        assert_eq!(pareto_values(50, 0.5, 5), pareto_values(50, 0.5, 5));
        assert_ne!(pareto_values(50, 0.5, 5), pareto_values(50, 0.5, 6));
    }

    #[test]
    fn prefix_property_of_per_point_streams() {
        let short = gen_circle(10, 1.0, 0.02, 9).unwrap();
        let long = gen_circle(20, 1.0, 0.02, 9).unwrap();
        assert_eq!(short.coords(), &long.coords()[..20]);
    }

    #[test]
    fn holes_avoid_discs() {
        let (rect, discs) = default_holes();
        let ps = gen_holes(800, rect, &discs, 1).unwrap();
        assert_eq!(ps.len(), 800);
        for p in ps.points() {
            assert!(p[0] >= 0.0 && p[0] <= 4.0 && p[1] >= 0.0 && p[1] <= 4.0);
        }
        for d in &discs {
            let nearest = ps
                .points()
                .map(|p| (p[0] - d.center[0]).hypot(p[1] - d.center[1]))
                .fold(f64::INFINITY, f64::min);
            assert!(nearest >= d.radius, "nearest {nearest} < {}", d.radius);
        }
    }

    #[test]
    fn holes_without_discs_is_plain_rectangle() {
        let ps = gen_holes(100, Rect::new(2.0, 1.0), &[], 4).unwrap();
        assert!(ps.points().all(|p| p[0] <= 2.0 && p[1] <= 1.0));
    }

    #[test]
    fn holes_parameter_errors() {
        let rect = Rect::new(1.0, 1.0);
        let outside = [Disc::new(0.9, 0.5, 0.2)];
        assert!(matches!(
            gen_holes(10, rect, &outside, 0),
            Err(Error::InvalidParam(_))
        ));
        let overlap = [Disc::new(0.3, 0.5, 0.2), Disc::new(0.5, 0.5, 0.2)];
        assert!(matches!(
            gen_holes(10, rect, &overlap, 0),
            Err(Error::InvalidParam(_))
        ));
        // Inscribed disc leaves 1 - pi/4 of the square free.
        assert!(gen_holes(10, rect, &[Disc::new(0.5, 0.5, 0.5)], 0).is_ok());
    }

    #[test]
    fn rejection_stall_threshold() {
        // Disjoint discs cover at most ~91% of a rectangle, so the guard only
        // fires through the acceptance check itself.
        assert!(check_acceptance(0.5).is_ok());
        assert!(check_acceptance(0.01).is_ok());
        assert!(matches!(
            check_acceptance(0.009),
            Err(Error::RejectionStall { .. })
        ));
    }

    #[test]
    fn pareto_values_at_least_one_and_median() {
        let v = pareto_values(100_000, 1.0, 17).unwrap();
        assert!(v.iter().all(|&x| x >= 1.0));
        let mut s = v.clone();
        s.sort_by(f64::total_cmp);
        let median = 0.5 * (s[49_999] + s[50_000]);
        assert!((median - 2.0).abs() / 2.0 < 0.05, "median {median}");
    }

    #[test]
    fn invalid_params() {
        assert!(gen_circle(0, 1.0, 0.0, 0).is_err());
        assert!(gen_circle(5, -1.0, 0.0, 0).is_err());
        assert!(gen_circle(5, 1.0, -0.1, 0).is_err());
        assert!(gen_torus(5, 0.3, 0.35, 0.0, 0).is_err());
        assert!(gen_pareto(5, 0.0, 0).is_err());
    }
}
