//! Second-order effective model of a tightly bound pair (doublon) and its
//! comparison with the full two-boson dynamics.
//!
//! The doublon basis is `|2_s> = (c_s^dagger)^2 / sqrt2 |0>`, the same state as
//! the Fock basis vector at pair `(s, s)`. A virtual break-up `|2_x> -> |1_x 1_y>`
//! costs `U` and carries the bosonic factor `sqrt2 t_yx`, so every ladder bond
//! `t` becomes a doublon bond `2 t^2 / U`: the Peierls phase doubles, the sign
//! turns positive, and each site gains `2|t|^2/U` per bond it touches.

use nalgebra::Complex;

use crate::dynamics::{evolve, NORM_TOL};
use crate::error::{Error, Result};
use crate::hubbard::{two_particle_hamiltonian, FockState, TwoParticleBasis};
use crate::lattice::{Boundary, LatticeParams, Leg, SiteIndex};
use crate::linalg::{norm, CMatrix, CVector};
use crate::scalar::{cr, Real};

/// Below `U / J` of this, second-order perturbation theory is not trusted.
pub const VALIDITY_RATIO: f64 = 10.0;

/// Coefficients of the effective doublon model, all derived from the lattice
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDoublonParams<T: Real> {
    /// Magnitude of the leg and diagonal doublon hops, `2 J^2 / U`.
    pub hop: T,
    /// Total rung element, `2 m^2 / U`.
    pub rung: T,
    /// Edge chemical potential `mu = 2 J^2 / U`; an end site misses two bonds
    /// and therefore sits `2 mu` below the bulk.
    pub mu: T,
    /// Uniform second-order shift `(2 m^2 + 8 J^2) / U`.
    pub delta: T,
    /// Bare interaction energy of a doublon, `U`.
    pub onsite: T,
}

impl<T: Real> EffectiveDoublonParams<T> {
    pub fn from_lattice(p: &LatticeParams<T>) -> Result<Self> {
        let u = p.u();
        if !(u > T::zero()) {
            return Err(Error::param("U", "the effective doublon model needs U > 0"));
        }
        let (j2, m2) = (p.j() * p.j(), p.m() * p.m());
        let two = T::lit(2.0);
        Ok(EffectiveDoublonParams {
            hop: two * j2 / u,
            rung: two * m2 / u,
            mu: two * j2 / u,
            delta: (two * m2 + T::lit(8.0) * j2) / u,
            onsite: u,
        })
    }
}

/// Which diagonal terms to keep when building the effective matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EffectiveTerms {
    /// `U + Delta` on every site; drop it to look at band shapes only.
    pub offset: bool,
    /// `-2 mu` on the four end sites of an open ladder.
    pub edge_potential: bool,
}

impl Default for EffectiveTerms {
    fn default() -> Self {
        EffectiveTerms { offset: true, edge_potential: true }
    }
}

/// Effective doublon Hamiltonian over the `2L` sites with all terms.
pub fn effective_doublon_hamiltonian<T: Real>(p: &LatticeParams<T>) -> Result<CMatrix<T>> {
    effective_doublon_hamiltonian_with(p, EffectiveTerms::default())
}

pub fn effective_doublon_hamiltonian_with<T: Real>(p: &LatticeParams<T>, terms: EffectiveTerms) -> Result<CMatrix<T>> {
    let e = EffectiveDoublonParams::from_lattice(p)?;
    let n = p.n_sites();
    let two_over_u = T::lit(2.0) / p.u();
    let mut h = CMatrix::<T>::zeros(n, n);
    for (to, from, amp) in p.bonds() {
        let t = amp * amp * two_over_u;
        h[(to, from)] += t;
        h[(from, to)] += t.conj();
    }
    if terms.offset {
        for s in 0..n {
            h[(s, s)] += cr(e.onsite + e.delta);
        }
    }
    if terms.edge_potential && p.boundary() == Boundary::Open {
        let shift = cr(-(e.mu + e.mu));
        for rung in [1, p.l()] {
            for leg in Leg::BOTH {
                let s = SiteIndex::new(rung, leg).linear();
                h[(s, s)] += shift;
            }
        }
    }
    Ok(h)
}

/// Restriction of two-boson states to the doubly occupied amplitudes.
#[derive(Debug, Clone)]
pub struct DoublonProjector {
    basis: TwoParticleBasis,
    indices: Vec<usize>,
}

pub fn doublon_projector(basis: TwoParticleBasis) -> DoublonProjector {
    DoublonProjector { basis, indices: basis.doublon_indices() }
}

impl DoublonProjector {
    pub fn basis(&self) -> TwoParticleBasis {
        self.basis
    }

    /// The `N` amplitudes `<2_s|psi>` of a Fock vector.
    pub fn project<T: Real>(&self, fock: &CVector<T>) -> CVector<T> {
        CVector::from_iterator(self.indices.len(), self.indices.iter().map(|&i| fock[i]))
    }

    pub fn project_state<T: Real>(&self, fock: &FockState<T>) -> CVector<T> {
        self.project(fock.amplitudes())
    }

    /// Places doublon amplitudes into an otherwise empty Fock vector.
    pub fn embed<T: Real>(&self, doublon: &CVector<T>) -> Result<CVector<T>> {
        if doublon.len() != self.indices.len() {
            return Err(Error::DimensionMismatch { expected: self.indices.len(), got: doublon.len() });
        }
        let mut v = CVector::zeros(self.basis.dim());
        for (&i, z) in self.indices.iter().zip(doublon.iter()) {
            v[i] = *z;
        }
        Ok(v)
    }
}

/// Agreement between the effective and the full evolution of a doublon.
#[derive(Debug, Clone)]
pub struct FidelitySeries<T: Real> {
    pub times: Vec<T>,
    /// `|<psi_eff(t)| P psi_full(t)>|^2`.
    pub fidelity: Vec<T>,
    /// `1 - ||P psi_full(t)||^2`.
    pub leakage: Vec<T>,
    /// Set when `U < 10 J`, where the effective model is not expected to hold.
    pub outside_validity: bool,
}

impl<T: Real> FidelitySeries<T> {
    pub fn min_fidelity(&self) -> T {
        self.fidelity.iter().fold(T::one(), |a, &f| a.min(f))
    }

    pub fn max_leakage(&self) -> T {
        self.leakage.iter().fold(T::zero(), |a, &f| a.max(f))
    }
}

/// Evolves a doublon-subspace state under the effective model and, embedded in
/// the two-boson space, under the full Hamiltonian; samples fidelity and
/// leakage out of the doublon subspace.
pub fn compare_effective_vs_full<T: Real>(
    p: &LatticeParams<T>,
    psi0_doublon: &CVector<T>,
    times: &[T],
) -> Result<FidelitySeries<T>> {
    let h_eff = effective_doublon_hamiltonian(p)?;
    if psi0_doublon.len() != p.n_sites() {
        return Err(Error::DimensionMismatch { expected: p.n_sites(), got: psi0_doublon.len() });
    }
    let n0 = norm(psi0_doublon);
    if (n0 - T::one()).abs() > T::lit(NORM_TOL) {
        return Err(Error::NotNormalized(n0.to_f64_lossy()));
    }
    let proj = doublon_projector(TwoParticleBasis::for_ladder(p.l()));
    let full0 = proj.embed(psi0_doublon)?;
    let eff = evolve(&h_eff, psi0_doublon, times)?;
    let full = evolve(&two_particle_hamiltonian(p), &full0, times)?;
    let (fidelity, leakage) = eff
        .states
        .iter()
        .zip(&full.states)
        .map(|(e, f)| {
            let pf = proj.project(f);
            let overlap =
                e.iter().zip(pf.iter()).fold(Complex::new(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * *y);
            let kept = pf.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
            (overlap.norm_sqr(), T::one() - kept)
        })
        .unzip();
    Ok(FidelitySeries {
        times: times.to_vec(),
        fidelity,
        leakage,
        outside_validity: p.u() < T::lit(VALIDITY_RATIO) * p.j(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{breathing_half_period, time_grid};
    use crate::lattice::single_particle_hamiltonian;
    use crate::linalg::eigvalsh;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(l: usize, m: f64, phi: f64, u: f64, b: Boundary) -> LatticeParams<f64> {
        LatticeParams::new(l, 1.0, m, phi, u, b).unwrap()
    }

    fn site(j: usize, leg: Leg) -> usize {
        SiteIndex::new(j, leg).linear()
    }

    #[test]
    fn coefficient_examples() {
        let e = EffectiveDoublonParams::from_lattice(&params(4, 0.0, 0.0, 10.0, Boundary::Open)).unwrap();
        assert!((e.mu - 0.2).abs() < 1e-15);
        assert!((e.delta - 0.8).abs() < 1e-15);
        let e = EffectiveDoublonParams::from_lattice(&params(4, 1.5, 0.0, 10.0, Boundary::Open)).unwrap();
        assert!((e.delta - (2.0 * 2.25 + 8.0) / 10.0).abs() < 1e-15);
        assert!(matches!(
            effective_doublon_hamiltonian(&params(4, 0.0, 0.0, 0.0, Boundary::Open)),
            Err(Error::InvalidParameter { field: "U", .. })
        ));
    }

    #[test]
    fn matrix_elements() {
        let (m, phi, u) = (0.7, 1.1, 20.0);
        let h = effective_doublon_hamiltonian(&params(5, m, phi, u, Boundary::Open)).unwrap();
        let hop = 2.0 / u;
        assert!((h[(site(3, Leg::A), site(2, Leg::A))] - Complex::from_polar(hop, phi)).norm() < 1e-15);
        assert!((h[(site(3, Leg::B), site(2, Leg::B))] - Complex::from_polar(hop, -phi)).norm() < 1e-15);
        assert!((h[(site(3, Leg::B), site(2, Leg::A))] - cr(hop)).norm() < 1e-15);
        assert!((h[(site(3, Leg::A), site(3, Leg::B))] - cr(2.0 * m * m / u)).norm() < 1e-15);
        let delta = (2.0 * m * m + 8.0) / u;
        assert!((h[(site(3, Leg::A), site(3, Leg::A))].re - (u + delta)).abs() < 1e-13);
        assert!((h[(site(1, Leg::B), site(1, Leg::B))].re - (u + delta - 4.0 / u)).abs() < 1e-13);
        assert!((h[(site(5, Leg::A), site(5, Leg::A))].re - (u + delta - 4.0 / u)).abs() < 1e-13);
    }

    #[test]
    fn plaquette_phase_doubles() {
        for phi in [0.3, 1.0, FRAC_PI_2, 2.5, -2.0, 5.0] {
            let p = params(4, 0.4, phi, 30.0, Boundary::Open);
            let h1 = single_particle_hamiltonian(&p);
            let he = effective_doublon_hamiltonian(&p).unwrap();
            // loop 2A -> 3A -> 3B -> 2B -> 2A around one plaquette
            let path = [site(2, Leg::A), site(3, Leg::A), site(3, Leg::B), site(2, Leg::B), site(2, Leg::A)];
            let flux = |h: &CMatrix<f64>| path.windows(2).fold(cr(1.0), |a, w| a * h[(w[1], w[0])]).arg();
            let single = flux(&h1);
            let doubled = flux(&he);
            let diff = crate::scalar::wrap_into(doubled - 2.0 * single, -PI, 2.0 * PI);
            assert!(diff.abs() < 1e-12, "phi = {phi}: {doubled} vs 2 x {single}");
        }
    }

    #[test]
    fn flat_bands_at_half_flux() {
        let u = 20.0;
        let p = params(8, 0.0, FRAC_PI_2, u, Boundary::Periodic);
        let e = eigvalsh(&effective_doublon_hamiltonian(&p).unwrap()).unwrap();
        let centre = u + 8.0 / u;
        for (i, x) in e.iter().enumerate() {
            let want = if i < 8 { centre - 4.0 / u } else { centre + 4.0 / u };
            assert!((x - want).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_model_cages() {
        for phi in [FRAC_PI_2, -FRAC_PI_2, 1.5 * PI, -1.5 * PI] {
            let p = params(8, 0.0, phi, 20.0, Boundary::Open);
            let h = effective_doublon_hamiltonian(&p).unwrap();
            let mut psi = CVector::zeros(16);
            psi[site(4, Leg::A)] = cr(1.0);
            let tr = evolve(&h, &psi, &time_grid(500.0, 500)).unwrap();
            let cage = [site(4, Leg::A), site(3, Leg::A), site(3, Leg::B), site(5, Leg::A), site(5, Leg::B)];
            assert!(tr.max_outside(&cage) < 1e-10);
        }
    }

    #[test]
    fn edge_doublon_energy_is_an_eigenvalue_either_way() {
        // both end sites carry the same shift, so the edge state stays an
        // eigenvector; only its energy relative to the bulk depends on mu
        let p = params(6, 0.0, 1.0, 20.0, Boundary::Open);
        let mut psi = CVector::zeros(12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        psi[0] = cr(r);
        psi[1] = -Complex::from_polar(r, 2.0 * 0.5);
        for edge_potential in [true, false] {
            let h = effective_doublon_hamiltonian_with(&p, EffectiveTerms { offset: true, edge_potential }).unwrap();
            let hpsi = &h * &psi;
            let e = crate::linalg::expectation(&h, &psi);
            assert!((hpsi - &psi * cr(e)).norm() < 1e-12);
        }
    }

    fn end_doublon_fidelity(edge_potential: bool) -> f64 {
        let p = params(6, 0.0, FRAC_PI_2, 40.0, Boundary::Open);
        let mut psi = CVector::zeros(12);
        psi[site(1, Leg::A)] = cr(1.0);
        let times = time_grid(400.0, 800);
        let h_eff = effective_doublon_hamiltonian_with(&p, EffectiveTerms { offset: true, edge_potential }).unwrap();
        let proj = doublon_projector(TwoParticleBasis::for_ladder(6));
        let eff = evolve(&h_eff, &psi, &times).unwrap();
        let full = evolve(&two_particle_hamiltonian(&p), &proj.embed(&psi).unwrap(), &times).unwrap();
        eff.states
            .iter()
            .zip(&full.states)
            .map(|(e, f)| crate::linalg::inner(e, &proj.project(f)).norm_sqr())
            .fold(1.0, f64::min)
    }

    #[test]
    fn edge_potential_is_needed_for_end_doublons() {
        assert!(end_doublon_fidelity(true) > 0.98);
        assert!(end_doublon_fidelity(false) < 0.5);
    }

    #[test]
    fn projector_examples() {
        let basis = TwoParticleBasis::for_ladder(4);
        let proj = doublon_projector(basis);
        let d = FockState::<f64>::doublon(basis, site(3, Leg::A)).unwrap();
        let v = proj.project_state(&d);
        assert_eq!(v.len(), 8);
        assert!((v[site(3, Leg::A)] - cr(1.0)).norm() < 1e-15 && (norm(&v) - 1.0).abs() < 1e-15);
        let pair = FockState::<f64>::pair(basis, site(1, Leg::A), site(2, Leg::B)).unwrap();
        assert!(norm(&proj.project_state(&pair)) == 0.0);
        let back = proj.embed(&v).unwrap();
        assert!((back - d.amplitudes()).norm() == 0.0);
        assert!(proj.embed(&CVector::<f64>::zeros(3)).is_err());
    }

    #[test]
    fn breathing_slows_tenfold_with_tenfold_u() {
        let half = |u: f64| {
            let p = params(6, 0.0, FRAC_PI_2, u, Boundary::Periodic);
            let h = effective_doublon_hamiltonian(&p).unwrap();
            let mut psi = CVector::zeros(12);
            psi[site(3, Leg::A)] = cr(1.0);
            // quarter-period resolution of 1/4000 on a window of 1.5 half-periods
            let t_max = 1.5 * PI * u / 4.0;
            let tr = evolve(&h, &psi, &time_grid(t_max, 6000)).unwrap();
            breathing_half_period(&tr, SiteIndex::new(4, Leg::A)).unwrap()
        };
        let (a, b) = (half(20.0), half(200.0));
        assert!((a - PI * 20.0 / 4.0).abs() < 1e-2 * a);
        assert!((b / a - 10.0).abs() < 1e-2);
    }

    #[test]
    fn fidelity_at_large_u_and_warning() {
        let p = params(6, 0.0, FRAC_PI_2, 80.0, Boundary::Open);
        let mut psi = CVector::zeros(12);
        psi[site(3, Leg::A)] = cr(1.0);
        let s = compare_effective_vs_full(&p, &psi, &time_grid(100.0, 200)).unwrap();
        assert!(!s.outside_validity);
        assert!(s.min_fidelity() > 0.98);
        // the virtual-pair admixture scales as (J/U)^2 with a prefactor near 1.4 x 4 (2J/U)^2
        let bound = 4.0 * (2.0f64 / 80.0).powi(2);
        assert!(s.max_leakage() > bound && s.max_leakage() < 2.0 * bound);
        let weak = compare_effective_vs_full(&p.with_u(5.0), &psi, &[0.0, 1.0]).unwrap();
        assert!(weak.outside_validity);
    }
}
