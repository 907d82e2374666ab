//! Random-triangle check of the least-squares correction bound `|C| ≤ |b| / σ_min(N)`.

use std::f64::consts::PI;

use ifred::flux::correct_element;
use ifred::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Triangle = [[f64; 2]; 3];

/// Interior angles in degrees.
pub fn angles_deg(t: &Triangle) -> [f64; 3] {
    std::array::from_fn(|i| {
        let (p, a, b) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
        let u = [a[0] - p[0], a[1] - p[1]];
        let v = [b[0] - p[0], b[1] - p[1]];
        let c = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
        c.clamp(-1.0, 1.0).acos().to_degrees()
    })
}

/// Outward unit normals of a triangle in either orientation.
pub fn edge_normals(t: &Triangle) -> [[f64; 2]; 3] {
    let area2 = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]);
    let o = area2.signum();
    std::array::from_fn(|i| {
        let (a, b) = (t[i], t[(i + 1) % 3]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        [o * dy / len, -o * dx / len]
    })
}

/// Smallest singular value of the 3×2 matrix with rows `normals`, from the 2×2 Gram matrix.
pub fn sigma_min(normals: &[[f64; 2]; 3]) -> f64 {
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for n in normals {
        a += n[0] * n[0];
        b += n[0] * n[1];
        c += n[1] * n[1];
    }
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (half_trace - disc).max(0.0).sqrt()
}

/// `min_{|d| = 1} |N d|` by scanning `steps` directions over a half turn.
pub fn sigma_min_by_scan(normals: &[[f64; 2]; 3], steps: usize) -> f64 {
    (0..steps)
        .map(|i| {
            let phi = PI * i as f64 / steps as f64;
            let d = [phi.cos(), phi.sin()];
            normals.iter().map(|n| (n[0] * d[0] + n[1] * d[1]).powi(2)).sum::<f64>().sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random triangle with every angle at least `min_angle_deg`, at a random
/// position, scale and orientation.
pub fn random_triangle<R: Rng>(rng: &mut R, min_angle_deg: f64) -> Triangle {
    loop {
        let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
        let shift = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let t: Triangle = std::array::from_fn(|_| {
            [shift[0] + scale * rng.gen::<f64>(), shift[1] + scale * rng.gen::<f64>()]
        });
        if angles_deg(&t).iter().all(|&a| a >= min_angle_deg) {
            return t;
        }
    }
}

/// Worst `σ_min` over all triangle shapes with angles at least `min_angle_deg`,
/// from a grid over two angles (step `step_deg`) and the direction scan.
pub fn worst_sigma_min_by_scan(min_angle_deg: f64, step_deg: f64) -> f64 {
    let mut worst = f64::INFINITY;
    let mut alpha = min_angle_deg;
    while alpha <= 180.0 - 2.0 * min_angle_deg + 1e-12 {
        let mut beta = min_angle_deg;
        while alpha + beta <= 180.0 - min_angle_deg + 1e-12 {
            let (a, b) = (alpha.to_radians(), beta.to_radians());
            // base (0,0)-(1,0), apex from the two base angles
            let apex_x = b.sin() * a.cos() / (a + b).sin();
            let apex_y = b.sin() * a.sin() / (a + b).sin();
            let t = [[0.0, 0.0], [1.0, 0.0], [apex_x, apex_y]];
            worst = worst.min(sigma_min_by_scan(&edge_normals(&t), 720));
            beta += step_deg;
        }
        alpha += step_deg;
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub samples: usize,
    /// Largest `|C| σ_min / |b|` over the sample; the bound holds when it is at most 1.
    pub max_bound_ratio: f64,
    pub min_sigma: f64,
    pub max_sigma: f64,
    /// Largest gap between the closed-form `σ_min` and the direction scan.
    pub max_scan_gap: f64,
}

pub fn stability_sample(seed: u64, samples: usize, min_angle_deg: f64) -> Result<StabilityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = StabilityReport {
        samples,
        max_bound_ratio: 0.0,
        min_sigma: f64::INFINITY,
        max_sigma: 0.0,
        max_scan_gap: 0.0,
    };
    for _ in 0..samples {
        let t = random_triangle(&mut rng, min_angle_deg);
        let n = edge_normals(&t);
        let b: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let c = correct_element(n, b, [false; 3])?;
        let s = sigma_min(&n);
        let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ratio = c[0].hypot(c[1]) * s / b_norm;
        report.max_bound_ratio = report.max_bound_ratio.max(ratio);
        report.min_sigma = report.min_sigma.min(s);
        report.max_sigma = report.max_sigma.max(s);
        report.max_scan_gap = report.max_scan_gap.max((sigma_min_by_scan(&n, 2000) - s).abs());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_normals_are_isotropic() {
        let h = 3f64.sqrt() / 2.0;
        let t = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        assert!((sigma_min(&edge_normals(&t)) - 1.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_scan() {
        let t = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let n = edge_normals(&t);
        assert!((sigma_min(&n) - sigma_min_by_scan(&n, 4000)).abs() < 1e-6);
    }

    #[test]
    fn sampled_triangles_respect_angle_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = random_triangle(&mut rng, 15.0);
            assert!(angles_deg(&t).iter().all(|&a| a >= 15.0));
            assert!((angles_deg(&t).iter().sum::<f64>() - 180.0).abs() < 1e-9);
        }
    }

    #[test]
    fn flatter_triangles_have_smaller_sigma() {
        assert!(worst_sigma_min_by_scan(5.0, 1.0) < worst_sigma_min_by_scan(15.0, 1.0));
    }
}
