//! Exact propagation `psi(t) = exp(-iHt) psi0` by full eigendecomposition and
//! the observables read off trajectories.

use std::collections::BTreeSet;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::lattice::{LatticeParams, SiteIndex};
use crate::linalg::{check_hermitian, eigh, norm, CMatrix, CVector, Spectrum};
use crate::scalar::{cis, Real};

/// Tolerance on `|H - H^dagger|` accepted by [`evolve`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `| ||psi0|| - 1 |` accepted by [`evolve`].
pub const NORM_TOL: f64 = 1e-10;

/// Where a trajectory came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta<T: Real> {
    pub params: LatticeParams<T>,
    pub init: String,
}

/// Sampled evolution. `occupations[n][s]` is the occupation of site `s` at
/// `times[n]`; for two-particle runs it is `<n_s>` (summing to 2) and
/// `doublonness` is filled in.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<CVector<T>>,
    pub occupations: Vec<Vec<T>>,
    pub doublonness: Option<Vec<Vec<T>>>,
    pub meta: Option<TrajectoryMeta<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn with_meta(mut self, params: LatticeParams<T>, init: impl Into<String>) -> Self {
        self.meta = Some(TrajectoryMeta { params, init: init.into() });
        self
    }

    /// Occupation of one site over time.
    pub fn site_series(&self, site: usize) -> Vec<T> {
        self.occupations.iter().map(|row| row[site]).collect()
    }

    /// Largest `| ||psi(t)|| - 1 |` over the samples.
    pub fn max_norm_drift(&self) -> T {
        self.states.iter().map(|s| (norm(s) - T::one()).abs()).fold(T::zero(), |a, d| a.max(d))
    }

    /// Largest total occupation found outside `keep` at any sample.
    pub fn max_outside(&self, keep: &[usize]) -> T {
        self.occupations
            .iter()
            .map(|row| row.iter().enumerate().filter(|(s, _)| !keep.contains(s)).fold(T::zero(), |a, (_, &o)| a + o))
            .fold(T::zero(), |a, o| a.max(o))
    }
}

/// Cached eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Propagator<T: Real> {
    spectrum: Spectrum<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(h: &CMatrix<T>) -> Result<Self> {
        check_hermitian(h, T::lit(HERMITIAN_TOL))?;
        Ok(Propagator { spectrum: eigh(h)? })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.values.len()
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    /// Coefficients of `psi0` in the eigenbasis.
    pub fn coefficients(&self, psi0: &CVector<T>) -> CVector<T> {
        self.spectrum.vectors.adjoint() * psi0
    }

    /// `exp(-iHt)` applied to a state given by its eigenbasis coefficients.
    pub fn at(&self, coeffs: &CVector<T>, t: T) -> CVector<T> {
        let phased = CVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(&self.spectrum.values).map(|(c, &e)| *c * cis(-e * t)),
        );
        &self.spectrum.vectors * phased
    }

    pub fn apply(&self, psi0: &CVector<T>, t: T) -> CVector<T> {
        self.at(&self.coefficients(psi0), t)
    }
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("times", "must be strictly increasing"));
    }
    Ok(())
}

fn check_state<T: Real>(dim: usize, psi0: &CVector<T>) -> Result<()> {
    if psi0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: psi0.len() });
    }
    let n = norm(psi0);
    if (n - T::one()).abs() > T::lit(NORM_TOL) {
        return Err(Error::NotNormalized(n.to_f64_lossy()));
    }
    Ok(())
}

/// Samples `psi(t)` with a prepared propagator; occupations are `|psi_s|^2`.
pub fn evolve_with<T: Real>(prop: &Propagator<T>, psi0: &CVector<T>, times: &[T]) -> Result<Trajectory<T>> {
    check_state(prop.dim(), psi0)?;
    check_times(times)?;
    let coeffs = prop.coefficients(psi0);
    let states: Vec<CVector<T>> = times.iter().map(|&t| prop.at(&coeffs, t)).collect();
    let occupations = states.iter().map(|s| s.iter().map(|z| z.norm_sqr()).collect()).collect();
    Ok(Trajectory { times: times.to_vec(), states, occupations, doublonness: None, meta: None })
}

/// `psi(t) = exp(-iHt) psi0` at each requested time.
pub fn evolve<T: Real>(h: &CMatrix<T>, psi0: &CVector<T>, times: &[T]) -> Result<Trajectory<T>> {
    if h.nrows() != psi0.len() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: psi0.len() });
    }
    evolve_with(&Propagator::new(h)?, psi0, times)
}

/// `n + 1` equally spaced samples on `[0, t_max]`.
pub fn time_grid<T: Real>(t_max: T, samples: usize) -> Vec<T> {
    let n = samples.max(1);
    let dt = t_max / T::lit(n as f64);
    (0..=n).map(|i| dt * T::lit(i as f64)).collect()
}

/// Per-time, per-site occupation table.
pub fn occupation_profile<T: Real>(traj: &Trajectory<T>) -> Vec<Vec<T>> {
    traj.occupations.clone()
}

/// Sites whose occupation exceeds `eps` at some sample.
pub fn cage_support<T: Real>(traj: &Trajectory<T>, eps: T) -> BTreeSet<SiteIndex> {
    let mut out = BTreeSet::new();
    for row in &traj.occupations {
        for (s, &o) in row.iter().enumerate() {
            if o > eps {
                out.insert(SiteIndex::from_linear(s));
            }
        }
    }
    out
}

/// Vertex of the parabola through three points.
fn parabola_vertex<T: Real>(x: [T; 3], y: [T; 3]) -> T {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d12 - d01) / (x[2] - x[0]);
    if curv <= T::zero() {
        return x[1];
    }
    // Newton form y0 + d01 (t - x0) + curv (t - x0)(t - x1)
    T::lit(0.5) * (x[0] + x[1]) - d01 / (curv + curv)
}

/// Time of the first interior minimum of a site's occupation, refined by
/// quadratic interpolation of the three samples around it.
pub fn breathing_half_period<T: Real>(traj: &Trajectory<T>, site: SiteIndex) -> Result<T> {
    let s = site.linear();
    if traj.occupations.first().is_none_or(|row| s >= row.len()) {
        return Err(Error::param("site", format!("{site} outside the trajectory")));
    }
    let y = traj.site_series(s);
    let t = &traj.times;
    for i in 1..y.len().saturating_sub(1) {
        if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            return Ok(parabola_vertex([t[i - 1], t[i], t[i + 1]], [y[i - 1], y[i], y[i + 1]]));
        }
    }
    Err(Error::NoMinimumFound)
}

/// The two in-gap eigenstates of an open ladder, rotated into their left- and
/// right-localized combinations.
#[derive(Debug, Clone)]
pub struct EdgeProfile<T: Real> {
    /// Eigenvalues of the two selected states.
    pub energies: [T; 2],
    /// `|psi_s|` for the left-localized then the right-localized state.
    pub magnitudes: [Vec<T>; 2],
    /// `sum_leg |psi_{j,leg}|^2` per rung, same order.
    pub rung_weights: [Vec<T>; 2],
    /// Fitted `xi` in `w_j ~ exp(-j / xi)` over the half ladder nearest the
    /// edge; `0` when the weight sits on a single rung.
    pub decay_length: T,
}

/// Rung weights below this are treated as roundoff when fitting.
const WEIGHT_FLOOR: f64 = 1e-24;

fn decay_length<T: Real>(weights: &[T]) -> T {
    let pts: Vec<(T, T)> = weights
        .iter()
        .enumerate()
        .take(weights.len().div_ceil(2))
        .filter(|(_, &w)| w > T::lit(WEIGHT_FLOOR))
        .map(|(j, &w)| (T::lit(j as f64), w.ln()))
        .collect();
    if pts.len() < 2 {
        return T::zero();
    }
    let n = T::lit(pts.len() as f64);
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let slope = sxy / sxx;
    if slope >= T::zero() {
        T::max_value().unwrap()
    } else {
        -T::one() / slope
    }
}

/// Finds the two mid-gap states of an open-boundary single-particle
/// Hamiltonian (`2L x 2L`): the middle pair of the spectrum must lie inside
/// the central third of the gap between the remaining bulk states.
pub fn edge_profile_fit<T: Real>(h: &CMatrix<T>) -> Result<EdgeProfile<T>> {
    let n = h.nrows();
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::param("H", format!("expected a 2L x 2L ladder matrix, got {n}")));
    }
    check_hermitian(h, T::lit(HERMITIAN_TOL))?;
    let l = n / 2;
    let spec = eigh(h)?;
    let (lo, hi) = (spec.values[l - 2], spec.values[l + 1]);
    let third = (hi - lo) / T::lit(3.0);
    let inside = |e: T| e >= lo + third && e <= hi - third;
    if !(hi > lo) || !inside(spec.values[l - 1]) || !inside(spec.values[l]) {
        return Err(Error::NoMidgapState);
    }
    let v = [spec.vectors.column(l - 1).into_owned(), spec.vectors.column(l).into_owned()];

    // diagonalize the rung-position operator inside the pair
    let pos = |a: &CVector<T>, b: &CVector<T>| {
        a.iter()
            .zip(b.iter())
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (s, (x, y))| acc + x.conj() * *y * T::lit((s / 2) as f64))
    };
    let mut x = CMatrix::<T>::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            x[(a, b)] = pos(&v[a], &v[b]);
        }
    }
    let rot = eigh(&x)?;
    let combo = |c: usize| &v[0] * rot.vectors[(0, c)] + &v[1] * rot.vectors[(1, c)];
    let states = [combo(0), combo(1)];

    let magnitudes = states.clone().map(|s| s.iter().map(|z| z.norm_sqr().sqrt()).collect::<Vec<T>>());
    let rung_weights =
        states.map(|s| (0..l).map(|j| s[2 * j].norm_sqr() + s[2 * j + 1].norm_sqr()).collect::<Vec<T>>());
    let decay = decay_length(&rung_weights[0]);
    Ok(EdgeProfile { energies: [spec.values[l - 1], spec.values[l]], magnitudes, rung_weights, decay_length: decay })
}
