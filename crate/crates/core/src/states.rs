//! Closed-form states of the rungless ladder: plaquette Wannier states, the
//! caged breathing solution, and single-particle and doublon edge states.

use std::fmt;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::hubbard::{FockState, TwoParticleBasis};
use crate::lattice::{Boundary, LatticeParams, Leg, SiteIndex};
use crate::linalg::{norm, CVector};
use crate::scalar::{cis, cr, Real};

/// How far `m` and `|phi| - pi` may be from zero for the flat-band formulas.
pub const FLAT_BAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Band label of a plaquette state: `+` sits at `+2J`, `-` at `-2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WannierSign {
    Plus,
    Minus,
}

impl WannierSign {
    fn value(self) -> f64 {
        match self {
            WannierSign::Plus => 1.0,
            WannierSign::Minus => -1.0,
        }
    }
}

/// Plaquette state `|j,+>` or `|j,->` on rungs `j, j+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WannierLabel {
    pub j: usize,
    pub sign: WannierSign,
}

impl fmt::Display for WannierLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            WannierSign::Plus => '+',
            WannierSign::Minus => '-',
        };
        write!(f, "|{}{}>", self.j, s)
    }
}

/// Single-particle amplitudes over the `2L` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: CVector<T>,
}

impl<T: Real> StateVector<T> {
    /// Normalizes the given amplitudes.
    pub fn new(amplitudes: CVector<T>) -> Result<Self> {
        if !amplitudes.len().is_multiple_of(2) || amplitudes.len() < 4 {
            return Err(Error::param("state", format!("length {} is not 2L with L >= 2", amplitudes.len())));
        }
        let n = norm(&amplitudes);
        if !(n > T::zero()) {
            return Err(Error::param("state", "all amplitudes vanish"));
        }
        Ok(StateVector { amplitudes: amplitudes / cr(n) })
    }

    /// `|j, leg>`.
    pub fn site(l: usize, site: SiteIndex) -> Result<Self> {
        if site.j == 0 || site.j > l {
            return Err(Error::param("j", format!("rung {} outside 1..={l}", site.j)));
        }
        let mut v = CVector::zeros(2 * l);
        v[site.linear()] = cr(T::one());
        Self::new(v)
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector<T> {
        self.amplitudes
    }

    pub fn amplitude(&self, site: SiteIndex) -> Complex<T> {
        self.amplitudes[site.linear()]
    }

    pub fn l(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn norm(&self) -> T {
        norm(&self.amplitudes)
    }

    /// Sites with `|amplitude|^2 > tol`.
    pub fn support(&self, tol: T) -> Vec<SiteIndex> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > tol)
            .map(|(s, _)| SiteIndex::from_linear(s))
            .collect()
    }
}

fn require_flat_band<T: Real>(p: &LatticeParams<T>) -> Result<()> {
    if p.is_flat_band(T::lit(FLAT_BAND_TOL)) {
        Ok(())
    } else {
        Err(Error::FlatBandRequired)
    }
}

fn require_rungless<T: Real>(p: &LatticeParams<T>) -> Result<()> {
    if p.m().abs() > T::lit(FLAT_BAND_TOL) {
        return Err(Error::RungsPresent);
    }
    if p.boundary() != Boundary::Open {
        return Err(Error::OpenBoundaryRequired);
    }
    Ok(())
}

/// Rung after `j`, wrapping on a ring.
fn next_rung<T: Real>(p: &LatticeParams<T>, j: usize) -> Option<usize> {
    if j < p.l() {
        Some(j + 1)
    } else if p.boundary() == Boundary::Periodic {
        Some(1)
    } else {
        None
    }
}

fn prev_rung<T: Real>(p: &LatticeParams<T>, j: usize) -> Option<usize> {
    if j > 1 {
        Some(j - 1)
    } else if p.boundary() == Boundary::Periodic {
        Some(p.l())
    } else {
        None
    }
}

/// Bulk rungs have both neighbours and are not end rungs. On a ring every rung
/// qualifies once `L >= 3`; `L = 2` has no bulk.
fn require_bulk<T: Real>(p: &LatticeParams<T>, j: usize) -> Result<()> {
    let ok = match p.boundary() {
        Boundary::Open => j > 1 && j < p.l(),
        Boundary::Periodic => p.l() >= 3 && (1..=p.l()).contains(&j),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BulkOnly(j))
    }
}

/// `(1/2)[|j,A> + i s|j,B> -+ i s|j+1,A> -+ |j+1,B>]` with `s = sign(phi)`;
/// an exact eigenstate at energy `+-2J` in the flat-band limit.
pub fn wannier_state<T: Real>(p: &LatticeParams<T>, j: usize, sign: WannierSign) -> Result<StateVector<T>> {
    require_flat_band(p)?;
    let next = (j >= 1)
        .then(|| next_rung(p, j))
        .flatten()
        .ok_or(Error::param("j", format!("plaquette {j} needs rungs j and j+1 within 1..={}", p.l())))?;
    let s = p.flux_sign();
    let pm = T::lit(sign.value());
    let half = T::lit(0.5);
    let i_s = Complex::new(T::zero(), s);
    let mut v = CVector::zeros(p.n_sites());
    v[SiteIndex::new(j, Leg::A).linear()] += cr(half);
    v[SiteIndex::new(j, Leg::B).linear()] += i_s * half;
    v[SiteIndex::new(next, Leg::A).linear()] -= i_s * (pm * half);
    v[SiteIndex::new(next, Leg::B).linear()] -= cr(pm * half);
    StateVector::new(v)
}

/// Expansion of a bulk site in the four plaquette states touching it,
/// obtained as `<w|j,leg>` for the plaquettes `j-1` and `j`. The full set of
/// `2(L-1)` Wannier states is orthonormal, so these coefficients reconstruct
/// the site exactly.
pub fn site_in_wannier_basis<T: Real>(
    p: &LatticeParams<T>,
    j: usize,
    leg: Leg,
) -> Result<[(WannierLabel, Complex<T>); 4]> {
    require_flat_band(p)?;
    require_bulk(p, j)?;
    let prev = prev_rung(p, j).expect("bulk rung has a predecessor");
    let target = SiteIndex::new(j, leg);
    let mut out = [(WannierLabel { j, sign: WannierSign::Plus }, cr(T::zero())); 4];
    let labels = [
        WannierLabel { j: prev, sign: WannierSign::Plus },
        WannierLabel { j: prev, sign: WannierSign::Minus },
        WannierLabel { j, sign: WannierSign::Plus },
        WannierLabel { j, sign: WannierSign::Minus },
    ];
    for (slot, label) in out.iter_mut().zip(labels) {
        let w = wannier_state(p, label.j, label.sign)?;
        *slot = (label, w.amplitude(target).conj());
    }
    Ok(out)
}

/// Closed-form breathing of `|j, leg>` in the flat-band limit:
/// `cos(2Jt)|j,a> + (1/2) sin(2Jt)[-s sigma|j+1,a> + i|j+1,a'> + s sigma|j-1,a> + i|j-1,a'>]`
/// with `s = sign(phi)`.
pub fn analytic_caged_evolution<T: Real>(p: &LatticeParams<T>, j: usize, leg: Leg, t: T) -> Result<StateVector<T>> {
    require_flat_band(p)?;
    require_bulk(p, j)?;
    let (prev, next) = (prev_rung(p, j).unwrap(), next_rung(p, j).unwrap());
    let wt = (p.j() + p.j()) * t;
    let q = T::lit(0.5) * wt.sin();
    let ss = p.flux_sign() * T::lit(leg.sigma() as f64);
    let iq = Complex::new(T::zero(), q);
    let mut v = CVector::zeros(p.n_sites());
    v[SiteIndex::new(j, leg).linear()] += cr(wt.cos());
    v[SiteIndex::new(next, leg).linear()] += cr(-ss * q);
    v[SiteIndex::new(next, leg.flip()).linear()] += iq;
    v[SiteIndex::new(prev, leg).linear()] += cr(ss * q);
    v[SiteIndex::new(prev, leg.flip()).linear()] += iq;
    StateVector::new(v)
}

/// Zero-energy end state of the rungless open ladder:
/// left `(|1,A> - e^{i phi/2}|1,B>)/sqrt2`, right `(|L,A> - e^{-i phi/2}|L,B>)/sqrt2`.
pub fn edge_state<T: Real>(p: &LatticeParams<T>, side: Side) -> Result<StateVector<T>> {
    require_rungless(p)?;
    let half = p.phi() * T::lit(0.5);
    let (rung, phase) = match side {
        Side::Left => (1, cis(half)),
        Side::Right => (p.l(), cis(-half)),
    };
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut v = CVector::zeros(p.n_sites());
    v[SiteIndex::new(rung, Leg::A).linear()] = cr(r);
    v[SiteIndex::new(rung, Leg::B).linear()] = -phase * r;
    StateVector::new(v)
}

/// Doublon analogue of [`edge_state`] with the relative phase doubled:
/// left `(|2_{1A}> - e^{i phi}|2_{1B}>)/sqrt2`, right `(|2_{LA}> - e^{-i phi}|2_{LB}>)/sqrt2`.
pub fn doublon_edge_state<T: Real>(p: &LatticeParams<T>, side: Side) -> Result<FockState<T>> {
    require_rungless(p)?;
    let (rung, phase) = match side {
        Side::Left => (1, cis(p.phi())),
        Side::Right => (p.l(), cis(-p.phi())),
    };
    let a = SiteIndex::new(rung, Leg::A).linear();
    let b = SiteIndex::new(rung, Leg::B).linear();
    FockState::from_terms(TwoParticleBasis::for_ladder(p.l()), &[(a, a, cr(T::one())), (b, b, -phase)])
}

/// `|2L_phi> + |2R_phi>`, normalized.
pub fn noon_state<T: Real>(p: &LatticeParams<T>) -> Result<FockState<T>> {
    let l = doublon_edge_state(p, Side::Left)?;
    let r = doublon_edge_state(p, Side::Right)?;
    let basis = l.basis();
    let sum = l.amplitudes() + r.amplitudes();
    let terms: Vec<_> =
        basis.pairs().zip(sum.iter()).filter(|(_, z)| z.norm_sqr() > T::zero()).map(|((a, b), z)| (a, b, *z)).collect();
    FockState::from_terms(basis, &terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::lattice::single_particle_hamiltonian;
    use crate::linalg::inner;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn flat(l: usize, b: Boundary) -> LatticeParams<f64> {
        LatticeParams::new(l, 1.0, 0.0, PI, 0.0, b).unwrap()
    }

    fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn wannier_amplitudes() {
        let w = wannier_state(&flat(4, Boundary::Open), 1, WannierSign::Plus).unwrap();
        let a = w.amplitudes();
        assert!(close(a[0], cr(0.5)));
        assert!(close(a[1], Complex::new(0.0, 0.5)));
        assert!(close(a[2], Complex::new(0.0, -0.5)));
        assert!(close(a[3], cr(-0.5)));
        assert_eq!(w.support(1e-30).len(), 4);
        assert!(wannier_state(&flat(4, Boundary::Open), 4, WannierSign::Plus).is_err());
        assert!(matches!(
            wannier_state(&flat(4, Boundary::Open).with_m(0.1), 1, WannierSign::Plus),
            Err(Error::FlatBandRequired)
        ));
    }

    #[test]
    fn wannier_eigenstates_and_orthonormality() {
        for phi in [PI, -PI] {
            let p = flat(6, Boundary::Periodic).with_phi(phi);
            let h = single_particle_hamiltonian(&p);
            let mut all = Vec::new();
            for j in 1..=6 {
                for (sign, e) in [(WannierSign::Plus, 2.0), (WannierSign::Minus, -2.0)] {
                    let w = wannier_state(&p, j, sign).unwrap();
                    let hw = &h * w.amplitudes();
                    assert!((hw - w.amplitudes() * cr(e)).norm() < 1e-10);
                    all.push(w);
                }
            }
            for (x, a) in all.iter().enumerate() {
                for (y, b) in all.iter().enumerate() {
                    let o = inner(a.amplitudes(), b.amplitudes());
                    let want = if x == y { 1.0 } else { 0.0 };
                    assert!((o - cr(want)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn site_expansion_reconstructs() {
        let p = flat(6, Boundary::Open);
        let coeffs = site_in_wannier_basis(&p, 3, Leg::A).unwrap();
        let norm2: f64 = coeffs.iter().map(|(_, c)| c.norm_sqr()).sum();
        assert!((norm2 - 1.0).abs() < 1e-14);
        for leg in Leg::BOTH {
            let coeffs = site_in_wannier_basis(&p, 3, leg).unwrap();
            let mut v = CVector::<f64>::zeros(12);
            for (label, c) in coeffs {
                v += wannier_state(&p, label.j, label.sign).unwrap().amplitudes() * c;
            }
            let target = StateVector::<f64>::site(6, SiteIndex::new(3, leg)).unwrap();
            assert!((v - target.amplitudes()).norm() < 1e-12);
        }
        // leg A in the plaquettes (2, 3): i/2, -i/2, 1/2, 1/2
        let c = site_in_wannier_basis(&p, 3, Leg::A).unwrap();
        assert!(close(c[0].1, Complex::new(0.0, 0.5)) && c[0].0 == WannierLabel { j: 2, sign: WannierSign::Plus });
        assert!(close(c[1].1, Complex::new(0.0, -0.5)));
        assert!(close(c[2].1, cr(0.5)) && close(c[3].1, cr(0.5)));
        assert!(matches!(site_in_wannier_basis(&p, 1, Leg::A), Err(Error::BulkOnly(1))));
        assert!(matches!(site_in_wannier_basis(&p, 6, Leg::B), Err(Error::BulkOnly(6))));
    }

    #[test]
    fn caged_evolution_snapshots() {
        let p = flat(6, Boundary::Open);
        let s0 = analytic_caged_evolution(&p, 3, Leg::A, 0.0).unwrap();
        assert_eq!(s0.support(0.0), vec![SiteIndex::new(3, Leg::A)]);
        let s = analytic_caged_evolution(&p, 3, Leg::A, PI / 4.0).unwrap();
        assert!(s.amplitude(SiteIndex::new(3, Leg::A)).norm() < 1e-15);
        for (j, leg) in [(2, Leg::A), (2, Leg::B), (4, Leg::A), (4, Leg::B)] {
            assert!((s.amplitude(SiteIndex::new(j, leg)).norm() - 0.5).abs() < 1e-15);
        }
        assert!(matches!(analytic_caged_evolution(&flat(2, Boundary::Open), 1, Leg::A, 0.0), Err(Error::BulkOnly(1))));
        assert!(analytic_caged_evolution(&flat(2, Boundary::Periodic), 1, Leg::A, 0.0).is_err());
    }

    #[test]
    fn edge_examples() {
        let p = flat(6, Boundary::Open);
        let l = edge_state(&p, Side::Left).unwrap();
        assert!(close(l.amplitudes()[0], cr(FRAC_1_SQRT_2)));
        assert!((l.amplitudes()[1] - Complex::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        let r = edge_state(&p, Side::Right).unwrap();
        assert!((r.amplitudes()[11] - Complex::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(matches!(edge_state(&p.with_m(0.2), Side::Left), Err(Error::RungsPresent)));
        assert!(edge_state(&p.with_boundary(Boundary::Periodic), Side::Left).is_err());
    }

    #[test]
    fn doublon_edge_example() {
        let p = flat(4, Boundary::Open).with_phi(PI / 2.0).with_u(20.0);
        let f = doublon_edge_state(&p, Side::Left).unwrap();
        assert!((f.amplitude(0, 0) - cr(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((f.amplitude(1, 1) - Complex::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((noon_state(&p).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_matches_numeric_at_a_few_times() {
        let p = flat(6, Boundary::Open);
        let h = single_particle_hamiltonian(&p);
        let s0 = StateVector::<f64>::site(6, SiteIndex::new(3, Leg::B)).unwrap();
        let times = [0.1, 0.9, 2.3];
        let tr = evolve(&h, s0.amplitudes(), &times).unwrap();
        for (t, s) in times.iter().zip(&tr.states) {
            let a = analytic_caged_evolution(&p, 3, Leg::B, *t).unwrap();
            assert!((a.amplitudes() - s).norm() < 1e-10);
        }
    }
}
