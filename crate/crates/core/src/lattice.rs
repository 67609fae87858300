//! Model parameters, site indexing and the single-particle Hamiltonians
//! (real space and Bloch form).
//!
//! Gauge: the Peierls phase sits only on the intraleg hops, `+phi/2` for a
//! rightward hop on leg A and `-phi/2` on leg B. Diagonal and rung hops are real.

use std::fmt;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cis, cr, wrap_into, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Leg {
    A,
    B,
}

impl Leg {
    /// `+1` for A, `-1` for B.
    pub fn sigma(self) -> i32 {
        match self {
            Leg::A => 1,
            Leg::B => -1,
        }
    }

    pub fn flip(self) -> Leg {
        match self {
            Leg::A => Leg::B,
            Leg::B => Leg::A,
        }
    }

    pub fn offset(self) -> usize {
        match self {
            Leg::A => 0,
            Leg::B => 1,
        }
    }

    pub const BOTH: [Leg; 2] = [Leg::A, Leg::B];
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Leg::A => "A",
            Leg::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// A ladder site: rung `j` (1-based) on leg `leg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteIndex {
    pub j: usize,
    pub leg: Leg,
}

impl SiteIndex {
    pub fn new(j: usize, leg: Leg) -> Self {
        SiteIndex { j, leg }
    }

    /// `2(j-1) + (0 | 1)`, so that `1A < 1B < 2A < ... < LB`.
    pub fn linear(self) -> usize {
        2 * (self.j - 1) + self.leg.offset()
    }

    pub fn from_linear(n: usize) -> Self {
        SiteIndex { j: n / 2 + 1, leg: if n.is_multiple_of(2) { Leg::A } else { Leg::B } }
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.j, self.leg)
    }
}

/// The five model numbers plus boundary condition.
///
/// `phi` is kept in `[-2pi, 2pi)`: the phase diagram is `4pi` periodic, so this
/// range covers it exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams<T: Real> {
    l: usize,
    j: T,
    m: T,
    phi: T,
    u: T,
    boundary: Boundary,
}

pub fn canonical_phase<T: Real>(phi: T) -> T {
    wrap_into(phi, -T::two_pi(), T::two_pi() + T::two_pi())
}

impl<T: Real> LatticeParams<T> {
    pub fn new(l: usize, j: T, m: T, phi: T, u: T, boundary: Boundary) -> Result<Self> {
        if l < 2 {
            return Err(Error::param("L", format!("need at least 2 rungs, got {l}")));
        }
        if !(j > T::zero()) || !j.is_finite() {
            return Err(Error::param("J", format!("must be positive and finite, got {j}")));
        }
        if !m.is_finite() {
            return Err(Error::param("m", "must be finite"));
        }
        if !phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        if !(u >= T::zero()) || !u.is_finite() {
            return Err(Error::param("U", format!("must be finite and >= 0, got {u}")));
        }
        Ok(LatticeParams { l, j, m, phi: canonical_phase(phi), u, boundary })
    }

    /// `J = 1`, `m = 0`, `phi = 0`, `U = 0`, open.
    pub fn with_rungs(l: usize) -> Result<Self> {
        Self::new(l, T::one(), T::zero(), T::zero(), T::zero(), Boundary::Open)
    }

    pub fn l(&self) -> usize {
        self.l
    }
    pub fn j(&self) -> T {
        self.j
    }
    pub fn m(&self) -> T {
        self.m
    }
    pub fn phi(&self) -> T {
        self.phi
    }
    pub fn u(&self) -> T {
        self.u
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of single-particle sites, `2L`.
    pub fn n_sites(&self) -> usize {
        2 * self.l
    }

    pub fn with_m(mut self, m: T) -> Self {
        self.m = m;
        self
    }
    pub fn with_phi(mut self, phi: T) -> Self {
        self.phi = canonical_phase(phi);
        self
    }
    pub fn with_u(mut self, u: T) -> Self {
        self.u = u;
        self
    }
    pub fn with_j(mut self, j: T) -> Self {
        self.j = j;
        self
    }
    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// `m = 0` and `phi = +-pi` within `tol`.
    pub fn is_flat_band(&self, tol: T) -> bool {
        self.m.abs() <= tol && ((self.phi.abs() - T::pi()).abs() <= tol)
    }

    /// Sign of the flux in the flat-band limit (`+1` for `phi = pi`).
    pub(crate) fn flux_sign(&self) -> T {
        if self.phi >= T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }

    /// Amplitude for a rightward hop `|j,leg> -> |j+1,leg>` (the matrix
    /// element `<j+1,leg|H|j,leg>`).
    pub fn leg_hop(&self, leg: Leg) -> Complex<T> {
        let half = self.phi * T::lit(0.5 * leg.sigma() as f64);
        -cis(half) * self.j
    }

    /// Enumerates the undirected bonds of the ladder as `(to, from, amplitude)`
    /// with `amplitude = <to|H|from>`; the conjugate element is implied.
    pub fn bonds(&self) -> Vec<(usize, usize, Complex<T>)> {
        let mut out = Vec::new();
        let l = self.l;
        for rung in 1..=l {
            out.push((SiteIndex::new(rung, Leg::A).linear(), SiteIndex::new(rung, Leg::B).linear(), cr(-self.m)));
            let next = if rung < l {
                rung + 1
            } else if self.boundary == Boundary::Periodic {
                1
            } else {
                continue;
            };
            for leg in Leg::BOTH {
                let from = SiteIndex::new(rung, leg).linear();
                out.push((SiteIndex::new(next, leg).linear(), from, self.leg_hop(leg)));
                out.push((SiteIndex::new(next, leg.flip()).linear(), from, cr(-self.j)));
            }
        }
        out
    }
}

/// `phi = 2 pi Phi / Phi_0`, reduced to `[-2pi, 2pi)`.
pub fn flux_to_phase<T: Real>(flux_ratio: T) -> T {
    canonical_phase(T::two_pi() * flux_ratio)
}

/// Real-space single-particle Hamiltonian, `2L x 2L`, in the linear site order.
pub fn single_particle_hamiltonian<T: Real>(p: &LatticeParams<T>) -> CMatrix<T> {
    let n = p.n_sites();
    let mut h = CMatrix::<T>::zeros(n, n);
    for (to, from, amp) in p.bonds() {
        h[(to, from)] += amp;
        h[(from, to)] += amp.conj();
    }
    h
}

/// `H(k) = d0 + d . sigma` at one quasimomentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint<T: Real> {
    pub k: T,
    pub d0: T,
    pub dx: T,
    pub dy: T,
    pub dz: T,
}

impl<T: Real> BlochPoint<T> {
    pub fn norm_d(&self) -> T {
        (self.dx * self.dx + self.dy * self.dy + self.dz * self.dz).sqrt()
    }

    /// `(d0 - |d|, d0 + |d|)`.
    pub fn energies(&self) -> (T, T) {
        let r = self.norm_d();
        (self.d0 - r, self.d0 + r)
    }

    pub fn gap(&self) -> T {
        self.norm_d() + self.norm_d()
    }

    /// The 2x2 matrix in the (A, B) basis.
    pub fn matrix(&self) -> CMatrix<T> {
        let z = T::zero();
        CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(self.d0 + self.dz, z),
                Complex::new(self.dx, -self.dy),
                Complex::new(self.dx, self.dy),
                Complex::new(self.d0 - self.dz, z),
            ],
        )
    }
}

pub fn bloch_hamiltonian<T: Real>(p: &LatticeParams<T>, k: T) -> BlochPoint<T> {
    let two_j = p.j() + p.j();
    let half = p.phi() * T::lit(0.5);
    BlochPoint {
        k,
        d0: -two_j * k.cos() * half.cos(),
        dx: -p.m() - two_j * k.cos(),
        dy: T::zero(),
        dz: two_j * k.sin() * half.sin(),
    }
}

/// `k_n = -pi + 2 pi n / N`, `n = 0..N-1`.
pub fn k_grid<T: Real>(n: usize) -> Vec<T> {
    let step = T::two_pi() / T::lit(n as f64);
    (0..n).map(|i| -T::pi() + step * T::lit(i as f64)).collect()
}

/// Lower and upper band over a grid.
pub fn band_energies<T: Real>(p: &LatticeParams<T>, k_grid: &[T]) -> (Vec<T>, Vec<T>) {
    k_grid.iter().map(|&k| bloch_hamiltonian(p, k).energies()).unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvalsh, max_asymmetry};
    use std::f64::consts::PI;

    fn params(l: usize, m: f64, phi: f64, b: Boundary) -> LatticeParams<f64> {
        LatticeParams::new(l, 1.0, m, phi, 0.0, b).unwrap()
    }

    #[test]
    fn flux_conversion() {
        assert_eq!(flux_to_phase(0.0f64), 0.0);
        assert!((flux_to_phase(0.5f64) - PI).abs() < 1e-15);
        assert!((flux_to_phase(0.25f64) - PI / 2.0).abs() < 1e-15);
        // 1.25 flux quanta -> 5pi/2 -> pi/2 - 4pi + 4pi... reduced to [-2pi, 2pi)
        assert!((flux_to_phase(1.25f64) - (-1.5 * PI)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(
            LatticeParams::<f64>::new(1, 1.0, 0.0, 0.0, 0.0, Boundary::Open),
            Err(Error::InvalidParameter { field: "L", .. })
        ));
        assert!(LatticeParams::<f64>::new(4, 0.0, 0.0, 0.0, 0.0, Boundary::Open).is_err());
        assert!(LatticeParams::<f64>::new(4, 1.0, 0.0, 0.0, -1.0, Boundary::Open).is_err());
        assert!(LatticeParams::<f64>::new(4, 1.0, f64::NAN, 0.0, 0.0, Boundary::Open).is_err());
    }

    #[test]
    fn site_index_bijective() {
        for n in 0..20 {
            assert_eq!(SiteIndex::from_linear(n).linear(), n);
        }
        assert_eq!(SiteIndex::new(3, Leg::B).linear(), 5);
    }

    #[test]
    fn two_rung_open_transcription() {
        let h = single_particle_hamiltonian(&params(2, 0.0, 0.0, Boundary::Open));
        let mut expected = CMatrix::<f64>::zeros(4, 4);
        for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            expected[(a, b)] = Complex::new(-1.0, 0.0);
            expected[(b, a)] = Complex::new(-1.0, 0.0);
        }
        assert_eq!(h, expected);
    }

    #[test]
    fn matrix_elements_follow_gauge() {
        let p = params(4, 0.7, 1.3, Boundary::Open);
        let h = single_particle_hamiltonian(&p);
        let s = |j, leg| SiteIndex::new(j, leg).linear();
        let e = h[(s(3, Leg::A), s(2, Leg::A))];
        assert!((e - cis(0.65) * -1.0).norm() < 1e-15);
        let e = h[(s(3, Leg::B), s(2, Leg::B))];
        assert!((e - cis(-0.65) * -1.0).norm() < 1e-15);
        assert_eq!(h[(s(3, Leg::B), s(2, Leg::A))], Complex::new(-1.0, 0.0));
        // rung: m/2 from each conjugate pair, total -m
        assert_eq!(h[(s(2, Leg::A), s(2, Leg::B))], Complex::new(-0.7, 0.0));
    }

    #[test]
    fn flat_band_spectrum() {
        let h = single_particle_hamiltonian(&params(6, 0.0, PI, Boundary::Periodic));
        let ev = eigvalsh(&h).unwrap();
        for (i, e) in ev.iter().enumerate() {
            let target = if i < 6 { -2.0 } else { 2.0 };
            assert!((e - target).abs() < 1e-10, "{ev:?}");
        }
    }

    #[test]
    fn bloch_examples() {
        let p = params(4, 0.0, PI, Boundary::Periodic);
        let b = bloch_hamiltonian(&p, 0.0);
        assert!(b.d0.abs() < 1e-15 && (b.dx + 2.0).abs() < 1e-15 && b.dz.abs() < 1e-15);
        let b = bloch_hamiltonian(&p, PI / 2.0);
        assert!(b.d0.abs() < 1e-15 && b.dx.abs() < 1e-15 && (b.dz - 2.0).abs() < 1e-15);
        for k in k_grid::<f64>(64) {
            let (lo, hi) = bloch_hamiltonian(&p, k).energies();
            assert!((lo + 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn band_touching_points() {
        // m = 2J, phi = pi: d vanishes at k = pi (dx = -2 - 2cos(pi) = 0, dz = 0)
        let p = params(4, 2.0, PI, Boundary::Periodic);
        assert!(bloch_hamiltonian(&p, PI).norm_d() < 1e-12);
        let (lo, hi) = band_energies(&p, &k_grid(64));
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b));
        // the grid contains k = -pi, the same point
        assert!((hi[0] - lo[0]).abs() < 1e-12);
        // m = 0, phi = 0: d vanishes at k = pi/2
        let p = params(4, 0.0, 0.0, Boundary::Periodic);
        assert!(bloch_hamiltonian(&p, PI / 2.0).norm_d() < 1e-15);
    }

    #[test]
    fn hermitian_by_construction() {
        let p = params(5, 0.3, 2.1, Boundary::Periodic);
        assert_eq!(max_asymmetry(&single_particle_hamiltonian(&p)), 0.0);
    }

    #[test]
    fn generic_over_f32() {
        let p = LatticeParams::<f32>::new(6, 1.0, 0.0, std::f32::consts::PI, 0.0, Boundary::Periodic).unwrap();
        let ev = eigvalsh(&single_particle_hamiltonian(&p)).unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-4 && (ev[11] - 2.0).abs() < 1e-4);
    }
}
