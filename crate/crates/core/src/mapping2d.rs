//! The two-boson problem as one particle on the Cartesian product of two
//! ladders: site `(i, alpha; j, beta)` carries the first-quantized amplitude
//! `lambda_{i alpha; j beta}`, bonds are those of either copy, and the
//! interaction is an on-site potential `U` on the diagonal `(i alpha; i alpha)`.
//!
//! Exchange-symmetric states of this lattice are exactly the bosonic states;
//! antisymmetric ones vanish on the diagonal and never feel `U`.

use std::fmt;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, Trajectory};
use crate::error::{Error, Result};
use crate::hubbard::{
    doublonness_from_lambda, two_particle_hamiltonian, FirstQuantState, TwoParticleBasis, SYMMETRY_TOL,
};
use crate::lattice::{single_particle_hamiltonian, LatticeParams, Leg, SiteIndex};
use crate::linalg::{eigvalsh, kron, max_sorted_deviation, CMatrix};
use crate::scalar::{cr, Real};

/// A site of the product lattice: particle one at `(i, alpha)`, particle two
/// at `(j, beta)`, rungs 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lattice2DIndex {
    pub i: usize,
    pub alpha: Leg,
    pub j: usize,
    pub beta: Leg,
}

impl Lattice2DIndex {
    pub fn new(i: usize, alpha: Leg, j: usize, beta: Leg) -> Self {
        Lattice2DIndex { i, alpha, j, beta }
    }

    /// `zeta = 1..=4` for `(A,A), (A,B), (B,A), (B,B)`.
    pub fn zeta(self) -> u8 {
        1 + 2 * self.alpha.offset() as u8 + self.beta.offset() as u8
    }

    pub fn from_zeta(i: usize, j: usize, zeta: u8) -> Result<Self> {
        let (alpha, beta) = match zeta {
            1 => (Leg::A, Leg::A),
            2 => (Leg::A, Leg::B),
            3 => (Leg::B, Leg::A),
            4 => (Leg::B, Leg::B),
            _ => return Err(Error::param("zeta", format!("must be 1..=4, got {zeta}"))),
        };
        Ok(Lattice2DIndex { i, alpha, j, beta })
    }

    pub fn first(self) -> SiteIndex {
        SiteIndex::new(self.i, self.alpha)
    }

    pub fn second(self) -> SiteIndex {
        SiteIndex::new(self.j, self.beta)
    }

    /// Row of the product-lattice matrix: `a * 2L + b` with `a`, `b` the
    /// linear ladder sites.
    pub fn linear(self, l: usize) -> usize {
        self.first().linear() * 2 * l + self.second().linear()
    }

    pub fn from_linear(l: usize, n: usize) -> Self {
        let a = SiteIndex::from_linear(n / (2 * l));
        let b = SiteIndex::from_linear(n % (2 * l));
        Lattice2DIndex { i: a.j, alpha: a.leg, j: b.j, beta: b.leg }
    }

    pub fn swapped(self) -> Self {
        Lattice2DIndex { i: self.j, alpha: self.beta, j: self.i, beta: self.alpha }
    }

    pub fn is_diagonal(self) -> bool {
        self.i == self.j && self.alpha == self.beta
    }
}

impl fmt::Display for Lattice2DIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}:{}{}", self.i, self.alpha, self.j, self.beta)
    }
}

/// `H1 (x) 1 + 1 (x) H1 + U sum_a |a a><a a|`, of size `(2L)^2`.
pub fn build_2d_hamiltonian<T: Real>(p: &LatticeParams<T>) -> CMatrix<T> {
    let h1 = single_particle_hamiltonian(p);
    let n = p.n_sites();
    let id = CMatrix::<T>::identity(n, n);
    let mut h = kron(&h1, &id) + kron(&id, &h1);
    for a in 0..n {
        h[(a * n + a, a * n + a)] += cr(p.u());
    }
    h
}

/// Columns are the exchange-symmetric states in the two-boson basis order:
/// `|a a>` for doublons and `(|a b> + |b a>)/sqrt2` otherwise. With this
/// isometry `S^dagger H2D S` is the Fock-space Hamiltonian.
pub fn symmetric_isometry<T: Real>(n_sites: usize) -> CMatrix<T> {
    let basis = TwoParticleBasis::new(n_sites);
    let r = cr(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let mut s = CMatrix::zeros(n_sites * n_sites, basis.dim());
    for (col, (a, b)) in basis.pairs().enumerate() {
        if a == b {
            s[(a * n_sites + a, col)] = cr(T::one());
        } else {
            s[(a * n_sites + b, col)] = r;
            s[(b * n_sites + a, col)] = r;
        }
    }
    s
}

/// Columns `(|a b> - |b a>)/sqrt2` for `a < b`.
pub fn antisymmetric_isometry<T: Real>(n_sites: usize) -> CMatrix<T> {
    let r = cr(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let cols = n_sites * (n_sites - 1) / 2;
    let mut s = CMatrix::zeros(n_sites * n_sites, cols);
    let mut col = 0;
    for a in 0..n_sites {
        for b in (a + 1)..n_sites {
            s[(a * n_sites + b, col)] = r;
            s[(b * n_sites + a, col)] = -r;
            col += 1;
        }
    }
    s
}

/// Sorted spectrum of the product lattice restricted to the symmetric sector,
/// `L (2L + 1)` values.
pub fn symmetric_sector_spectrum<T: Real>(p: &LatticeParams<T>) -> Result<Vec<T>> {
    let s = symmetric_isometry::<T>(p.n_sites());
    eigvalsh(&(s.adjoint() * build_2d_hamiltonian(p) * &s))
}

/// Sorted spectrum of the antisymmetric sector, `L (2L - 1)` values.
pub fn antisymmetric_sector_spectrum<T: Real>(p: &LatticeParams<T>) -> Result<Vec<T>> {
    let s = antisymmetric_isometry::<T>(p.n_sites());
    eigvalsh(&(s.adjoint() * build_2d_hamiltonian(p) * &s))
}

/// Largest deviation between the symmetric-sector spectrum of the product
/// lattice and the spectrum of the two-boson Fock Hamiltonian.
pub fn symmetric_sector_spectrum_check<T: Real>(p: &LatticeParams<T>) -> Result<T> {
    let fock = eigvalsh(&two_particle_hamiltonian(p))?;
    max_sorted_deviation(&symmetric_sector_spectrum(p)?, &fock)
}

/// Runs both sector checks for one parameter set.
pub fn mapping_check<T: Real>(p: &LatticeParams<T>) -> Result<crate::io::MappingCheck<T>> {
    let n = p.n_sites();
    let anti_u = antisymmetric_sector_spectrum(p)?;
    let anti_0 = antisymmetric_sector_spectrum(&p.with_u(T::zero()))?;
    Ok(crate::io::MappingCheck {
        dimension: n * n,
        symmetric_dimension: n * (n + 1) / 2,
        symmetric_deviation: symmetric_sector_spectrum_check(p)?,
        antisymmetric_u_shift: max_sorted_deviation(&anti_u, &anti_0)?,
    })
}

/// Evolution on the product lattice with per-sample bookkeeping.
#[derive(Debug, Clone)]
pub struct Trajectory2d<T: Real> {
    pub l: usize,
    pub times: Vec<T>,
    /// `|lambda_{ab}(t)|^2`, flattened `a * 2L + b`.
    pub occupancy: Vec<Vec<T>>,
    /// `sum_{a<b} |lambda_ab - lambda_ba|^2` per sample.
    pub symmetry_defect: Vec<T>,
    /// Two-boson site occupations `<n_s> = 2 sum_b |lambda_sb|^2` (sum 2).
    pub occupations: Vec<Vec<T>>,
    pub doublonness: Vec<Vec<T>>,
    pub meta: Option<crate::dynamics::TrajectoryMeta<T>>,
}

impl<T: Real> Trajectory2d<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn with_meta(mut self, params: LatticeParams<T>, init: impl Into<String>) -> Self {
        self.meta = Some(crate::dynamics::TrajectoryMeta { params, init: init.into() });
        self
    }

    /// Occupancy of one sample as `[i][j][zeta]` (rungs and zeta 0-based).
    pub fn grid(&self, sample: usize) -> Vec<Vec<[T; 4]>> {
        let l = self.l;
        let row = &self.occupancy[sample];
        (1..=l)
            .map(|i| {
                (1..=l)
                    .map(|j| {
                        let mut cell = [T::zero(); 4];
                        for (z, slot) in cell.iter_mut().enumerate() {
                            let idx = Lattice2DIndex::from_zeta(i, j, z as u8 + 1).expect("zeta in range");
                            *slot = row[idx.linear(l)];
                        }
                        cell
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest weight found off the diagonal `(a; a)` at any sample.
    pub fn max_off_diagonal(&self) -> T {
        let n = 2 * self.l;
        self.occupancy
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| k / n != k % n).fold(T::zero(), |a, (_, &w)| a + w))
            .fold(T::zero(), |a, w| a.max(w))
    }

    /// The same run expressed as a two-boson trajectory (no state vectors).
    pub fn to_fock_observables(&self) -> Trajectory<T> {
        Trajectory {
            times: self.times.clone(),
            states: Vec::new(),
            occupations: self.occupations.clone(),
            doublonness: Some(self.doublonness.clone()),
            meta: self.meta.clone(),
        }
    }
}

/// Evolves an exchange-symmetric first-quantized state on the product lattice.
pub fn evolve_2d<T: Real>(p: &LatticeParams<T>, lambda0: &FirstQuantState<T>, times: &[T]) -> Result<Trajectory2d<T>> {
    let n = p.n_sites();
    if lambda0.n_sites() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambda0.n_sites() });
    }
    let defect = lambda0.symmetry_defect();
    if defect > T::lit(SYMMETRY_TOL) {
        return Err(Error::SymmetryViolation(defect.to_f64_lossy()));
    }
    let traj = evolve(&build_2d_hamiltonian(p), &lambda0.to_vector(), times)?;
    let two = T::lit(2.0);
    let mut out = Trajectory2d {
        l: p.l(),
        times: traj.times,
        occupancy: traj.occupations,
        symmetry_defect: Vec::with_capacity(times.len()),
        occupations: Vec::with_capacity(times.len()),
        doublonness: Vec::with_capacity(times.len()),
        meta: None,
    };
    for v in &traj.states {
        let lambda = FirstQuantState::from_vector(n, v)?.lambda;
        let mut d = T::zero();
        for a in 0..n {
            for b in (a + 1)..n {
                d += (lambda[(a, b)] - lambda[(b, a)]).norm_sqr();
            }
        }
        out.symmetry_defect.push(d);
        out.occupations
            .push((0..n).map(|a| two * lambda.row(a).iter().fold(T::zero(), |s, z| s + z.norm_sqr())).collect());
        out.doublonness.push(doublonness_from_lambda(&lambda));
    }
    Ok(out)
}

/// One bond of the product lattice in the `(i, j, zeta)` arrangement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutBond<T: Real> {
    pub to: Lattice2DIndex,
    pub from: Lattice2DIndex,
    /// `<to|H2D|from>`.
    pub amplitude: Complex<T>,
    pub local: bool,
}

/// Bond list of the product lattice with `(i, j)` as two spatial axes and
/// `zeta` stacked along a third.
#[derive(Debug, Clone)]
pub struct ZetaLayout<T: Real> {
    pub l: usize,
    pub periodic_zeta: bool,
    pub bonds: Vec<LayoutBond<T>>,
    /// Nonlocal bonds owned by the unit cell `(i, j) = (1, 1)`.
    pub nonlocal_per_cell: usize,
}

/// Position along the synthetic axis. The order AA, AB, BB, BA makes every
/// hop of the second particle, and the first particle's hops while the second
/// sits on leg B, connect neighbouring layers; only leg changes of the first
/// particle next to a leg-A partner (AA <-> BA) jump across the stack.
pub fn zeta_position(zeta: u8) -> usize {
    match zeta {
        1 => 0,
        2 => 1,
        4 => 2,
        _ => 3,
    }
}

fn is_local(a: Lattice2DIndex, b: Lattice2DIndex, periodic_zeta: bool) -> bool {
    let (x, y) = (zeta_position(a.zeta()), zeta_position(b.zeta()));
    let d = x.abs_diff(y);
    d <= 1 || (periodic_zeta && d == 3)
}

/// Lists every bond of the product lattice (one entry per undirected bond)
/// and classifies it as local or nonlocal in the stacked arrangement.
pub fn zeta_layout<T: Real>(p: &LatticeParams<T>, periodic_zeta: bool) -> ZetaLayout<T> {
    let l = p.l();
    let ladder = p.bonds();
    let mut bonds = Vec::new();
    let sites: Vec<SiteIndex> = (0..p.n_sites()).map(SiteIndex::from_linear).collect();
    for &spectator in &sites {
        for &(to, from, amp) in &ladder {
            let (to, from) = (SiteIndex::from_linear(to), SiteIndex::from_linear(from));
            // the first particle hops
            let a = Lattice2DIndex::new(to.j, to.leg, spectator.j, spectator.leg);
            let b = Lattice2DIndex::new(from.j, from.leg, spectator.j, spectator.leg);
            bonds.push(LayoutBond { to: a, from: b, amplitude: amp, local: is_local(a, b, periodic_zeta) });
            // the second particle hops
            let a = Lattice2DIndex::new(spectator.j, spectator.leg, to.j, to.leg);
            let b = Lattice2DIndex::new(spectator.j, spectator.leg, from.j, from.leg);
            bonds.push(LayoutBond { to: a, from: b, amplitude: amp, local: is_local(a, b, periodic_zeta) });
        }
    }
    bonds.retain(|b| b.amplitude.norm_sqr() > T::zero());
    let nonlocal_per_cell = bonds.iter().filter(|b| !b.local && b.from.i == 1 && b.from.j == 1).count();
    ZetaLayout { l, periodic_zeta, bonds, nonlocal_per_cell }
}
