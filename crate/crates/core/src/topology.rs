//! Band topology of the two-band Bloch Hamiltonian: winding of the
//! `(d_z, d_x)` loop, Zak phase as a Wilson loop, gap and phase classification.

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{bloch_hamiltonian, k_grid, BlochPoint, LatticeParams};
use crate::scalar::{cr, wrap_into, Real};

/// Gaps below `METALLIC_GAP * J` count as closed.
pub const METALLIC_GAP: f64 = 1e-8;
/// Size of the uniform grid probed for gap closings.
pub const GAP_PROBE_POINTS: usize = 1024;
/// Winding loops closer than `ORIGIN_TOL * J` to the origin are rejected.
pub const ORIGIN_TOL: f64 = 1e-8;
/// Phases within this of `-pi` are reported as `+pi`.
pub const ZAK_BRANCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Trivial,
    Topological,
    Metallic,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Trivial => "trivial",
            PhaseKind::Topological => "topological",
            PhaseKind::Metallic => "metallic",
        }
    }
}

/// Result of [`classify_phase`]. `nu` and `zak` are absent for metallic points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseClassification<T: Real> {
    pub kind: PhaseKind,
    pub nu: Option<i32>,
    pub zak: Option<T>,
}

/// Eigenvector of `d0 + d.sigma` for one band, in a fixed closed-form gauge.
fn band_vector<T: Real>(b: &BlochPoint<T>, band: Band) -> [Complex<T>; 2] {
    let r = b.norm_d();
    let off = Complex::new(b.dx, -b.dy);
    // two algebraically equivalent forms; keep the better conditioned one
    let (first, second) = match band {
        Band::Lower => {
            let u = [off, cr(-r - b.dz)];
            let v = [cr(r - b.dz), -off.conj()];
            (u, v)
        }
        Band::Upper => {
            let u = [off, cr(r - b.dz)];
            let v = [cr(r + b.dz), off.conj()];
            (u, v)
        }
    };
    let n1 = first[0].norm_sqr() + first[1].norm_sqr();
    let n2 = second[0].norm_sqr() + second[1].norm_sqr();
    let (u, n) = if n1 >= n2 { (first, n1) } else { (second, n2) };
    let s = n.sqrt();
    [u[0] / s, u[1] / s]
}

fn check_gapped<T: Real>(points: &[BlochPoint<T>], j: T) -> Result<()> {
    let tol = T::lit(METALLIC_GAP) * j;
    let min = points.iter().map(|b| b.gap()).fold(T::max_value().unwrap(), |a, g| a.min(g));
    if min < tol {
        return Err(Error::MetallicSystem(min.to_f64_lossy()));
    }
    Ok(())
}

/// Wilson-loop phase `-Im log prod <u_k|u_{k+dk}>` over closed-loop vectors.
pub fn wilson_loop_phase<T: Real>(vectors: &[[Complex<T>; 2]]) -> T {
    let n = vectors.len();
    let mut prod = Complex::new(T::one(), T::zero());
    for i in 0..n {
        let a = &vectors[i];
        let b = &vectors[(i + 1) % n];
        let overlap = a[0].conj() * b[0] + a[1].conj() * b[1];
        prod *= overlap;
        // keep the running product O(1); only its phase matters
        let mag = prod.norm_sqr().sqrt();
        if mag > T::zero() {
            prod /= mag;
        }
    }
    let zak = wrap_into(-prod.im.atan2(prod.re), -T::pi(), T::two_pi());
    // report the half-open range as (-pi, pi] so a quantized pi reads as +pi
    if zak < -T::pi() + T::lit(ZAK_BRANCH_TOL) {
        zak + T::two_pi()
    } else {
        zak
    }
}

/// Band vectors on the standard grid with an extra per-k phase applied
/// (used to demonstrate gauge independence).
pub fn band_vectors<T: Real>(
    p: &LatticeParams<T>,
    band: Band,
    n_k: usize,
    gauge: impl Fn(usize) -> T,
) -> Result<Vec<[Complex<T>; 2]>> {
    if n_k < 8 {
        return Err(Error::param("n_k", format!("need at least 8 k points, got {n_k}")));
    }
    let points: Vec<_> = k_grid(n_k).into_iter().map(|k| bloch_hamiltonian(p, k)).collect();
    check_gapped(&points, p.j())?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let g = crate::scalar::cis(gauge(i));
            let u = band_vector(b, band);
            [u[0] * g, u[1] * g]
        })
        .collect())
}

/// Zak phase of one band in `(-pi, pi]`.
pub fn zak_phase<T: Real>(p: &LatticeParams<T>, band: Band, n_k: usize) -> Result<T> {
    Ok(wilson_loop_phase(&band_vectors(p, band, n_k, |_| T::zero())?))
}

/// Signed number of turns of `(d_z(k), d_x(k))` around the origin as `k`
/// sweeps the zone in increasing order. Positive for `m = 0, phi = pi`.
pub fn winding_number<T: Real>(p: &LatticeParams<T>, n_k: usize) -> Result<i32> {
    if n_k < 8 {
        return Err(Error::param("n_k", format!("need at least 8 k points, got {n_k}")));
    }
    let pts: Vec<(T, T)> = k_grid(n_k)
        .into_iter()
        .map(|k| {
            let b = bloch_hamiltonian(p, k);
            (b.dz, b.dx)
        })
        .collect();
    let tol = T::lit(ORIGIN_TOL) * p.j();
    let min_r2 = pts.iter().map(|(z, x)| *z * *z + *x * *x).fold(T::max_value().unwrap(), |a, r| a.min(r));
    if min_r2 < tol * tol {
        return Err(Error::PathThroughOrigin(min_r2.sqrt().to_f64_lossy()));
    }
    let angle = |(z, x): (T, T)| x.atan2(z);
    let mut total = T::zero();
    for i in 0..n_k {
        let d = angle(pts[(i + 1) % n_k]) - angle(pts[i]);
        total += wrap_into(d, -T::pi(), T::two_pi());
    }
    let turns = (total / T::two_pi()).round();
    Ok(turns.to_f64_lossy() as i32)
}

/// Quasimomenta where the gap can close analytically: `k = 0, pi` (where
/// `d_z` vanishes for any flux) and the roots of `d_x`.
fn closing_candidates<T: Real>(p: &LatticeParams<T>) -> Vec<T> {
    let mut ks = vec![T::zero(), T::pi()];
    let c = -p.m() / (p.j() + p.j());
    if c.abs() <= T::one() {
        let k0 = c.acos();
        ks.push(k0);
        ks.push(-k0);
    }
    ks
}

/// `min_k 2|d(k)|` over the uniform grid.
pub fn min_gap<T: Real>(p: &LatticeParams<T>, n_k: usize) -> T {
    k_grid(n_k.max(1)).into_iter().map(|k| bloch_hamiltonian(p, k).gap()).fold(T::max_value().unwrap(), |a, g| a.min(g))
}

/// Gap used for the metallic decision: the probe grid plus the analytic
/// closing candidates, so exact closings off the grid are not missed.
pub fn probed_gap<T: Real>(p: &LatticeParams<T>) -> T {
    closing_candidates(p)
        .into_iter()
        .map(|k| bloch_hamiltonian(p, k).gap())
        .fold(min_gap(p, GAP_PROBE_POINTS), |a, g| a.min(g))
}

pub fn is_metallic<T: Real>(p: &LatticeParams<T>) -> bool {
    probed_gap(p) < T::lit(METALLIC_GAP) * p.j()
}

pub fn classify_phase<T: Real>(p: &LatticeParams<T>, n_k: usize) -> PhaseClassification<T> {
    if is_metallic(p) {
        return PhaseClassification { kind: PhaseKind::Metallic, nu: None, zak: None };
    }
    match (winding_number(p, n_k), zak_phase(p, Band::Lower, n_k)) {
        (Ok(nu), Ok(zak)) => {
            debug_assert_eq!(
                nu != 0,
                (zak.abs() - T::pi()).abs() < T::lit(1e-4),
                "winding {nu} disagrees with Zak phase {zak} at m={}, phi={}",
                p.m(),
                p.phi()
            );
            let kind = if nu == 0 { PhaseKind::Trivial } else { PhaseKind::Topological };
            PhaseClassification { kind, nu: Some(nu), zak: Some(zak) }
        }
        // the grid came within tolerance of a closing the probe missed
        _ => PhaseClassification { kind: PhaseKind::Metallic, nu: None, zak: None },
    }
}

/// A raster of classifications, rows along `m`, columns along `phi`.
#[derive(Debug, Clone)]
pub struct PhaseDiagram<T: Real> {
    pub m_values: Vec<T>,
    pub phi_values: Vec<T>,
    /// Row-major: `cells[row * phi_values.len() + col]`.
    pub cells: Vec<PhaseClassification<T>>,
}

impl<T: Real> PhaseDiagram<T> {
    pub fn get(&self, row: usize, col: usize) -> &PhaseClassification<T> {
        &self.cells[row * self.phi_values.len() + col]
    }
}

/// Closed range `[lo, hi]` sampled at `n` points (`lo` alone when `n == 1`).
pub fn closed_linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / T::lit((n - 1) as f64);
    (0..n).map(|i| lo + step * T::lit(i as f64)).collect()
}

/// Half-open range `[lo, hi)` sampled at `n` points.
pub fn open_linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::lit(n as f64);
    (0..n).map(|i| lo + step * T::lit(i as f64)).collect()
}

/// Classifies every `(m, phi)` point; `m` spans the closed range, `phi` the
/// half-open one (it is a periodic coordinate). Points are evaluated in
/// parallel and assembled by index.
pub fn phase_diagram_scan<T: Real>(
    template: &LatticeParams<T>,
    m_range: (T, T),
    phi_range: (T, T),
    resolution: (usize, usize),
    n_k: usize,
) -> Result<PhaseDiagram<T>> {
    let (n_m, n_phi) = resolution;
    if n_m == 0 || n_phi == 0 {
        return Err(Error::param("resolution", "must be positive"));
    }
    let m_values = closed_linspace(m_range.0, m_range.1, n_m);
    let phi_values = open_linspace(phi_range.0, phi_range.1, n_phi);
    let cells = (0..n_m * n_phi)
        .into_par_iter()
        .map(|idx| {
            let p = template.with_m(m_values[idx / n_phi]).with_phi(phi_values[idx % n_phi]);
            classify_phase(&p, n_k)
        })
        .collect();
    Ok(PhaseDiagram { m_values, phi_values, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use std::f64::consts::PI;

    fn p(m: f64, phi: f64) -> LatticeParams<f64> {
        LatticeParams::new(4, 1.0, m, phi, 0.0, Boundary::Periodic).unwrap()
    }

    fn dist_to_pi(z: f64) -> f64 {
        (z.abs() - PI).abs()
    }

    #[test]
    fn zak_examples() {
        assert!(dist_to_pi(zak_phase(&p(0.0, PI), Band::Lower, 256).unwrap()) < 1e-6);
        assert!(zak_phase(&p(3.0, PI), Band::Lower, 256).unwrap().abs() < 1e-6);
        assert!(matches!(zak_phase(&p(2.0, PI), Band::Lower, 256), Err(Error::MetallicSystem(_))));
        assert!(zak_phase(&p(0.0, PI), Band::Lower, 4).is_err());
    }

    #[test]
    fn band_vectors_are_eigenvectors() {
        for &(m, phi) in &[(0.3, 1.1), (-1.7, -2.5), (2.6, 0.4), (0.0, PI)] {
            let par = p(m, phi);
            for k in k_grid::<f64>(33) {
                let b = bloch_hamiltonian(&par, k);
                let h = b.matrix();
                let (lo, hi) = b.energies();
                for (band, e) in [(Band::Lower, lo), (Band::Upper, hi)] {
                    let u = band_vector(&b, band);
                    let v = nalgebra::DVector::from_vec(u.to_vec());
                    let r = &h * &v - v.clone() * Complex::new(e, 0.0);
                    assert!(r.norm() < 1e-12, "m={m} phi={phi} k={k}");
                }
            }
        }
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_number(&p(0.0, PI), 256).unwrap(), 1);
        assert_eq!(winding_number(&p(3.0, PI), 256).unwrap(), 0);
        let a = winding_number(&p(0.0, -PI + 0.2), 256).unwrap();
        let b = winding_number(&p(0.0, PI - 0.2), 256).unwrap();
        assert_eq!(a, -b);
        assert_ne!(a, 0);
        assert!(matches!(winding_number(&p(2.0, PI), 256), Err(Error::PathThroughOrigin(_))));
    }

    #[test]
    fn gap_examples() {
        assert!(min_gap(&p(2.0, PI), 1024) < 1e-10);
        assert!((min_gap(&p(0.0, PI), 1024) - 4.0).abs() < 1e-12);
        assert!(min_gap(&p(0.0, 0.0), 1024) < 1e-10);
        // closing off the grid (cos k = -1/4) is still caught by the probe
        assert!(is_metallic(&p(0.5, 0.0)));
        assert!(!is_metallic(&p(0.5, 0.3)));
    }

    #[test]
    fn classify_examples() {
        let c = classify_phase(&p(0.0, PI), 256);
        assert_eq!(c.kind, PhaseKind::Topological);
        assert_eq!(c.nu, Some(1));
        assert!(dist_to_pi(c.zak.unwrap()) < 1e-6);
        let c = classify_phase(&p(3.0, PI / 2.0), 256);
        assert_eq!((c.kind, c.nu), (PhaseKind::Trivial, Some(0)));
        assert!(c.zak.unwrap().abs() < 1e-6);
        assert_eq!(classify_phase(&p(2.0, PI), 256).kind, PhaseKind::Metallic);
    }

    #[test]
    fn single_cell_scan_matches_classify() {
        let d = phase_diagram_scan(&p(0.0, 0.0), (0.4, 1.0), (1.3, 2.0), (1, 1), 128).unwrap();
        assert_eq!(d.cells[0], classify_phase(&p(0.4, 1.3), 128));
    }
}
