//! Two-boson sector of the Creutz-Hubbard ladder.
//!
//! Fock basis: unordered site pairs `(a, b)` with `a <= b` in the site order
//! `1A < 1B < ... < LB`; `(a, a)` is the doubly occupied `|2_a>`. The
//! Hamiltonian is assembled from bosonic operator algebra, independently of the
//! first-quantized (Kronecker) construction in [`crate::mapping2d`].

use nalgebra::Complex;

use crate::dynamics::{evolve, Trajectory};
use crate::error::{Error, Result};
use crate::lattice::{single_particle_hamiltonian, LatticeParams};
use crate::linalg::{norm, CMatrix, CVector};
use crate::scalar::{cr, Real};

/// Tolerance on `|lambda_ab - lambda_ba|` before a first-quantized state is
/// rejected as non-bosonic.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Sites whose occupation probability is below this get doublonness 0.
pub const DOUBLONNESS_FLOOR: f64 = 1e-14;

/// Ordered list of two-boson configurations over `n_sites` single-particle sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoParticleBasis {
    n_sites: usize,
}

impl TwoParticleBasis {
    pub fn new(n_sites: usize) -> Self {
        TwoParticleBasis { n_sites }
    }

    pub fn for_ladder(l: usize) -> Self {
        Self::new(2 * l)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `N (N + 1) / 2`.
    pub fn dim(&self) -> usize {
        self.n_sites * (self.n_sites + 1) / 2
    }

    /// Index of the configuration `{a, b}` (either order).
    pub fn index(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        debug_assert!(b < self.n_sites);
        a * self.n_sites - a * a.saturating_sub(1) / 2 + (b - a)
    }

    /// All configurations in basis order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_sites).flat_map(move |a| (a..self.n_sites).map(move |b| (a, b)))
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        self.pairs().nth(idx).expect("index within basis")
    }

    pub fn doublon_indices(&self) -> Vec<usize> {
        (0..self.n_sites).map(|a| self.index(a, a)).collect()
    }
}

/// Two-boson state in the Fock basis (amplitudes `eta`).
#[derive(Debug, Clone, PartialEq)]
pub struct FockState<T: Real> {
    basis: TwoParticleBasis,
    amplitudes: CVector<T>,
}

impl<T: Real> FockState<T> {
    /// Wraps amplitudes; they must already be normalized.
    pub fn new(basis: TwoParticleBasis, amplitudes: CVector<T>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: amplitudes.len() });
        }
        let n = norm(&amplitudes);
        if (n - T::one()).abs() > T::lit(1e-10) {
            return Err(Error::NotNormalized(n.to_f64_lossy()));
        }
        Ok(FockState { basis, amplitudes })
    }

    /// Builds from `(a, b, amplitude)` terms and normalizes.
    pub fn from_terms(basis: TwoParticleBasis, terms: &[(usize, usize, Complex<T>)]) -> Result<Self> {
        let mut v = CVector::zeros(basis.dim());
        for &(a, b, amp) in terms {
            if a >= basis.n_sites() || b >= basis.n_sites() {
                return Err(Error::param("site", format!("site index out of range ({a}, {b})")));
            }
            v[basis.index(a, b)] += amp;
        }
        let n = norm(&v);
        if !(n > T::zero()) {
            return Err(Error::param("state", "all amplitudes vanish"));
        }
        v /= cr(n);
        Ok(FockState { basis, amplitudes: v })
    }

    /// `|2_a>`.
    pub fn doublon(basis: TwoParticleBasis, a: usize) -> Result<Self> {
        Self::from_terms(basis, &[(a, a, cr(T::one()))])
    }

    /// `|1_a 1_b>` (`a != b`) or `|2_a>`.
    pub fn pair(basis: TwoParticleBasis, a: usize, b: usize) -> Result<Self> {
        Self::from_terms(basis, &[(a, b, cr(T::one()))])
    }

    /// Symmetrized product of two single-particle states,
    /// `c^dagger(phi) c^dagger(chi)|0>`, normalized.
    pub fn product(basis: TwoParticleBasis, phi: &CVector<T>, chi: &CVector<T>) -> Result<Self> {
        let n = basis.n_sites();
        if phi.len() != n || chi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: phi.len().min(chi.len()) });
        }
        let lambda = CMatrix::from_fn(n, n, |a, b| (phi[a] * chi[b] + phi[b] * chi[a]) * T::lit(0.5));
        let mut fq = FirstQuantState { lambda };
        let s = fq.norm();
        if !(s > T::zero()) {
            return Err(Error::param("state", "product state vanishes"));
        }
        fq.lambda /= cr(s);
        first_quant_to_fock(&fq)
    }

    pub fn basis(&self) -> TwoParticleBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector<T> {
        self.amplitudes
    }

    pub fn amplitude(&self, a: usize, b: usize) -> Complex<T> {
        self.amplitudes[self.basis.index(a, b)]
    }

    pub fn norm(&self) -> T {
        norm(&self.amplitudes)
    }
}

/// First-quantized two-particle amplitudes `lambda[(a, b)]` over ordered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstQuantState<T: Real> {
    pub lambda: CMatrix<T>,
}

impl<T: Real> FirstQuantState<T> {
    pub fn n_sites(&self) -> usize {
        self.lambda.nrows()
    }

    /// `max |lambda_ab - lambda_ba|`.
    pub fn symmetry_defect(&self) -> T {
        let n = self.n_sites();
        let mut worst = T::zero();
        for a in 0..n {
            for b in (a + 1)..n {
                worst = worst.max((self.lambda[(a, b)] - self.lambda[(b, a)]).norm_sqr().sqrt());
            }
        }
        worst
    }

    pub fn norm(&self) -> T {
        self.lambda.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
    }

    /// Flattened `a * N + b`, the order used by the quasi-2D lattice.
    pub fn to_vector(&self) -> CVector<T> {
        let n = self.n_sites();
        CVector::from_fn(n * n, |i, _| self.lambda[(i / n, i % n)])
    }

    pub fn from_vector(n_sites: usize, v: &CVector<T>) -> Result<Self> {
        if v.len() != n_sites * n_sites {
            return Err(Error::DimensionMismatch { expected: n_sites * n_sites, got: v.len() });
        }
        Ok(FirstQuantState { lambda: CMatrix::from_fn(n_sites, n_sites, |a, b| v[a * n_sites + b]) })
    }
}

/// `eta = sqrt(2) lambda` off the diagonal, `eta = lambda` on it.
pub fn fock_to_first_quant<T: Real>(fock: &FockState<T>) -> FirstQuantState<T> {
    let n = fock.basis.n_sites();
    let inv_sqrt2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let lambda = CMatrix::from_fn(n, n, |a, b| {
        let eta = fock.amplitude(a, b);
        if a == b {
            eta
        } else {
            eta * inv_sqrt2
        }
    });
    FirstQuantState { lambda }
}

pub fn first_quant_to_fock<T: Real>(fq: &FirstQuantState<T>) -> Result<FockState<T>> {
    let defect = fq.symmetry_defect();
    if defect > T::lit(SYMMETRY_TOL) {
        return Err(Error::SymmetryViolation(defect.to_f64_lossy()));
    }
    let basis = TwoParticleBasis::new(fq.n_sites());
    let sqrt2 = T::lit(std::f64::consts::SQRT_2);
    let amplitudes = CVector::from_iterator(
        basis.dim(),
        basis.pairs().map(|(a, b)| if a == b { fq.lambda[(a, a)] } else { fq.lambda[(a, b)] * sqrt2 }),
    );
    Ok(FockState { basis, amplitudes })
}

/// Two-boson Hamiltonian: the ladder hopping in second quantization plus
/// `(U/2) sum n(n-1)`.
pub fn two_particle_hamiltonian<T: Real>(p: &LatticeParams<T>) -> CMatrix<T> {
    let h1 = single_particle_hamiltonian(p);
    let n = p.n_sites();
    let basis = TwoParticleBasis::new(n);
    let mut h = CMatrix::<T>::zeros(basis.dim(), basis.dim());
    let hops: Vec<(usize, usize, Complex<T>)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter_map(|(x, y)| {
            let e = h1[(x, y)];
            (e.re != T::zero() || e.im != T::zero()).then_some((x, y, e))
        })
        .collect();
    for (col, (a, b)) in basis.pairs().enumerate() {
        let occupied = [a, b];
        for &(x, y, amp) in &hops {
            // c_y: sqrt(n_y), leaving the other boson at `rest`
            let n_y = occupied.iter().filter(|&&s| s == y).count();
            if n_y == 0 {
                continue;
            }
            let rest = if a == y { b } else { a };
            // c_x^dagger: sqrt(n_x + 1) on the remaining occupation
            let n_x_after = 1 + usize::from(rest == x);
            let factor = T::lit(((n_y * n_x_after) as f64).sqrt());
            h[(basis.index(x, rest), col)] += amp * factor;
        }
        if a == b {
            h[(col, col)] += cr(p.u());
        }
    }
    h
}

/// `<n_s>` per site, counted directly from the Fock amplitudes; sums to 2.
pub fn occupation_expectation<T: Real>(fock: &FockState<T>) -> Vec<T> {
    let mut n = vec![T::zero(); fock.basis.n_sites()];
    for ((a, b), z) in fock.basis.pairs().zip(fock.amplitudes.iter()) {
        let w = z.norm_sqr();
        n[a] += w;
        n[b] += w;
    }
    n
}

/// Probability that an occupied site holds both bosons:
/// `|lambda_aa|^2 / sum_b |lambda_ab|^2`, 0 for unoccupied sites.
pub fn doublonness<T: Real>(fock: &FockState<T>) -> Vec<T> {
    doublonness_from_lambda(&fock_to_first_quant(fock).lambda)
}

pub(crate) fn doublonness_from_lambda<T: Real>(lambda: &CMatrix<T>) -> Vec<T> {
    (0..lambda.nrows())
        .map(|a| {
            let den = lambda.row(a).iter().fold(T::zero(), |s, z| s + z.norm_sqr());
            if den < T::lit(DOUBLONNESS_FLOOR) {
                T::zero()
            } else {
                lambda[(a, a)].norm_sqr() / den
            }
        })
        .collect()
}

/// Evolves a Fock state under the full two-boson Hamiltonian and attaches
/// per-site occupation and doublonness to every sample.
pub fn two_particle_evolve<T: Real>(p: &LatticeParams<T>, psi0: &FockState<T>, times: &[T]) -> Result<Trajectory<T>> {
    if psi0.basis.n_sites() != p.n_sites() {
        return Err(Error::DimensionMismatch { expected: p.n_sites(), got: psi0.basis.n_sites() });
    }
    let h = two_particle_hamiltonian(p);
    let mut traj = evolve(&h, &psi0.amplitudes, times)?;
    attach_fock_observables(&mut traj, psi0.basis);
    Ok(traj)
}

pub(crate) fn attach_fock_observables<T: Real>(traj: &mut Trajectory<T>, basis: TwoParticleBasis) {
    let (occ, dbl): (Vec<_>, Vec<_>) = traj
        .states
        .iter()
        .map(|s| {
            let f = FockState { basis, amplitudes: s.clone() };
            (occupation_expectation(&f), doublonness(&f))
        })
        .unzip();
    traj.occupations = occ;
    traj.doublonness = Some(dbl);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, Leg, SiteIndex};
    use crate::scalar::cis;
    use std::f64::consts::SQRT_2;

    fn site(j: usize, leg: Leg) -> usize {
        SiteIndex::new(j, leg).linear()
    }

    #[test]
    fn basis_layout() {
        let b = TwoParticleBasis::for_ladder(6);
        assert_eq!(b.dim(), 78);
        for (i, (x, y)) in b.pairs().enumerate() {
            assert_eq!(b.index(x, y), i);
            assert_eq!(b.index(y, x), i);
        }
        assert_eq!(b.pair(0), (0, 0));
        assert_eq!(b.pair(1), (0, 1));
        assert_eq!(TwoParticleBasis::for_ladder(2).dim(), 10);
    }

    #[test]
    fn doublon_diagonal_is_u() {
        let p = LatticeParams::new(4, 1.0, 0.0, 0.8, 0.0, Boundary::Open).unwrap().with_u(3.5);
        let h = two_particle_hamiltonian(&p);
        let b = TwoParticleBasis::for_ladder(4);
        for a in 0..8 {
            assert_eq!(h[(b.index(a, a), b.index(a, a))], Complex::new(3.5, 0.0));
        }
    }

    #[test]
    fn bosonic_enhancement() {
        // c^dagger_{2A} c_{1A} |2_{1A}> = sqrt(2) |1_{1A} 1_{2A}>
        let phi = 1.1;
        let p = LatticeParams::new(3, 1.0, 0.0, phi, 2.0, Boundary::Open).unwrap();
        let h = two_particle_hamiltonian(&p);
        let b = TwoParticleBasis::for_ladder(3);
        let (a1, a2) = (site(1, Leg::A), site(2, Leg::A));
        let e = h[(b.index(a1, a2), b.index(a1, a1))];
        assert!((e - cis(phi / 2.0) * -SQRT_2).norm() < 1e-14);
        assert_eq!(crate::linalg::max_asymmetry(&h), 0.0);
    }

    #[test]
    fn conversions() {
        let b = TwoParticleBasis::for_ladder(4);
        let d = FockState::<f64>::doublon(b, site(3, Leg::A)).unwrap();
        let fq = fock_to_first_quant(&d);
        assert_eq!(fq.lambda[(4, 4)], Complex::new(1.0, 0.0));
        assert!((fq.norm() - 1.0).abs() < 1e-15);
        assert_eq!(fq.lambda.iter().filter(|z| z.norm_sqr() > 0.0).count(), 1);

        let pr = FockState::<f64>::pair(b, site(1, Leg::A), site(2, Leg::B)).unwrap();
        let fq = fock_to_first_quant(&pr);
        assert!((fq.lambda[(0, 3)].re - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((fq.lambda[(3, 0)].re - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((fq.norm() - 1.0).abs() < 1e-15);

        let mut bad = fq.clone();
        bad.lambda[(0, 3)] += Complex::new(1e-6, 0.0);
        assert!(matches!(first_quant_to_fock(&bad), Err(Error::SymmetryViolation(_))));
    }

    #[test]
    fn occupations_and_doublonness() {
        let b = TwoParticleBasis::for_ladder(3);
        let d = FockState::<f64>::doublon(b, 4).unwrap();
        assert_eq!(occupation_expectation(&d)[4], 2.0);
        assert_eq!(doublonness(&d)[4], 1.0);
        assert!(doublonness(&d).iter().enumerate().all(|(s, &x)| s == 4 || x == 0.0));

        let pr = FockState::<f64>::pair(b, 0, 3).unwrap();
        let n = occupation_expectation(&pr);
        assert!((n[0] - 1.0).abs() < 1e-15 && (n[3] - 1.0).abs() < 1e-15);
        assert!(doublonness(&pr).iter().all(|&x| x == 0.0));

        // (|2_{1A}> + |1_{1A} 1_{1B}>)/sqrt2
        let mixed = FockState::<f64>::from_terms(b, &[(0, 0, cr(1.0)), (0, 1, cr(1.0))]).unwrap();
        let n = occupation_expectation(&mixed);
        assert!((n[0] - 1.5).abs() < 1e-14 && (n[1] - 0.5).abs() < 1e-14);
        // (|2_{1A}> + |1_{1A} 1_{2B}>)/sqrt2 at 1A: (1/2) / (1/2 + 1/4)
        let mixed = FockState::<f64>::from_terms(b, &[(0, 0, cr(1.0)), (0, 3, cr(1.0))]).unwrap();
        assert!((doublonness(&mixed)[0] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn product_of_edge_and_site() {
        // |L_P> (x) |4,A> = (|1_{1A} 1_{4A}> - i |1_{1B} 1_{4A}>)/sqrt2
        let b = TwoParticleBasis::for_ladder(6);
        let mut edge = CVector::<f64>::zeros(12);
        edge[0] = cr(1.0 / SQRT_2);
        edge[1] = Complex::new(0.0, -1.0 / SQRT_2);
        let mut s = CVector::<f64>::zeros(12);
        s[site(4, Leg::A)] = cr(1.0);
        let f = FockState::product(b, &edge, &s).unwrap();
        assert!((f.amplitude(0, 6) - cr(1.0 / SQRT_2)).norm() < 1e-14);
        assert!((f.amplitude(1, 6) - Complex::new(0.0, -1.0 / SQRT_2)).norm() < 1e-14);
    }
}
