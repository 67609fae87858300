//! Machine-readable output. Every real number is written with 17 significant
//! digits (`{:.16e}`), which round-trips `f64` exactly and keeps files
//! byte-stable across runs; non-finite values become `null` in JSON and an
//! empty field in CSV.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeSeq, Serializer};
use serde_json::value::RawValue;

use crate::dynamics::Trajectory;
use crate::effective::FidelitySeries;
use crate::lattice::{Boundary, LatticeParams, SiteIndex};
use crate::linalg::{CMatrix, CVector};
use crate::mapping2d::{Trajectory2d, ZetaLayout};
use crate::scalar::Real;
use crate::topology::{PhaseClassification, PhaseDiagram};

/// Text of one number at 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// A number that serializes with [`fmt_num`] precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

fn nums<T: Real>(xs: &[T]) -> Vec<Num> {
    xs.iter().map(|x| Num(x.to_f64_lossy())).collect()
}

fn table<T: Real>(rows: &[Vec<T>]) -> Vec<Vec<Num>> {
    rows.iter().map(|r| nums(r)).collect()
}

/// A complex number as `[re, im]`.
struct Pair(Num, Num);

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.0)?;
        seq.serialize_element(&self.1)?;
        seq.end()
    }
}

fn pairs<T: Real>(v: &CVector<T>) -> Vec<Pair> {
    v.iter().map(|z| Pair(Num(z.re.to_f64_lossy()), Num(z.im.to_f64_lossy()))).collect()
}

fn to_json<V: Serialize>(value: &V) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output records serialize");
    s.push('\n');
    s
}

/// Lattice parameters as written into every output file.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ParamsRecord {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: Num,
    pub m: Num,
    pub phi: Num,
    #[serde(rename = "U")]
    pub u: Num,
    pub boundary: Boundary,
}

impl<T: Real> From<&LatticeParams<T>> for ParamsRecord {
    fn from(p: &LatticeParams<T>) -> Self {
        ParamsRecord {
            l: p.l(),
            j: Num(p.j().to_f64_lossy()),
            m: Num(p.m().to_f64_lossy()),
            phi: Num(p.phi().to_f64_lossy()),
            u: Num(p.u().to_f64_lossy()),
            boundary: p.boundary(),
        }
    }
}

#[derive(serde::Serialize)]
struct TrajectoryRecord<'a> {
    params: Option<ParamsRecord>,
    init: Option<&'a str>,
    sites: Vec<String>,
    times: Vec<Num>,
    occupations: Vec<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    doublonness: Option<Vec<Vec<Num>>>,
    support_set: Vec<String>,
}

/// `{params, init, sites[], times[], occupations[][], doublonness[][]?, support_set[]}`.
pub fn trajectory_json<T: Real>(traj: &Trajectory<T>, support: &BTreeSet<SiteIndex>) -> String {
    let n_sites = traj.occupations.first().map_or(0, Vec::len);
    to_json(&TrajectoryRecord {
        params: traj.meta.as_ref().map(|m| ParamsRecord::from(&m.params)),
        init: traj.meta.as_ref().map(|m| m.init.as_str()),
        sites: (0..n_sites).map(|s| SiteIndex::from_linear(s).to_string()).collect(),
        times: nums(&traj.times),
        occupations: table(&traj.occupations),
        doublonness: traj.doublonness.as_deref().map(table),
        support_set: support.iter().map(ToString::to_string).collect(),
    })
}

/// One row per `(t, site)`: `t,site,occupation[,doublonness]`.
pub fn trajectory_csv<T: Real>(traj: &Trajectory<T>) -> String {
    let mut out = String::from(if traj.doublonness.is_some() {
        "t,site,occupation,doublonness\n"
    } else {
        "t,site,occupation\n"
    });
    for (n, (t, row)) in traj.times.iter().zip(&traj.occupations).enumerate() {
        for (s, occ) in row.iter().enumerate() {
            let _ = write!(
                out,
                "{},{},{}",
                fmt_num(t.to_f64_lossy()),
                SiteIndex::from_linear(s),
                fmt_num(occ.to_f64_lossy())
            );
            if let Some(d) = &traj.doublonness {
                let _ = write!(out, ",{}", fmt_num(d[n][s].to_f64_lossy()));
            }
            out.push('\n');
        }
    }
    out
}

/// Header `m,phi,kind,nu,zak`; `nu` and `zak` are empty for metallic points.
pub fn phase_diagram_csv<T: Real>(d: &PhaseDiagram<T>) -> String {
    let mut out = String::from("m,phi,kind,nu,zak\n");
    for (r, m) in d.m_values.iter().enumerate() {
        for (c, phi) in d.phi_values.iter().enumerate() {
            let cell = d.get(r, c);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(m.to_f64_lossy()),
                fmt_num(phi.to_f64_lossy()),
                cell.kind.as_str(),
                cell.nu.map_or(String::new(), |n| n.to_string()),
                cell.zak.map_or(String::new(), |z| fmt_num(z.to_f64_lossy())),
            );
        }
    }
    out
}

#[derive(serde::Serialize)]
struct CellRecord {
    kind: &'static str,
    nu: Option<i32>,
    zak: Option<Num>,
}

#[derive(serde::Serialize)]
struct DiagramRecord {
    params: ParamsRecord,
    m_values: Vec<Num>,
    phi_values: Vec<Num>,
    cells: Vec<Vec<CellRecord>>,
}

/// `{params, m_values[], phi_values[], cells[row][col]}`.
pub fn phase_diagram_json<T: Real>(template: &LatticeParams<T>, d: &PhaseDiagram<T>) -> String {
    let cells = (0..d.m_values.len())
        .map(|r| {
            (0..d.phi_values.len())
                .map(|c| {
                    let cell = d.get(r, c);
                    CellRecord { kind: cell.kind.as_str(), nu: cell.nu, zak: cell.zak.map(|z| Num(z.to_f64_lossy())) }
                })
                .collect()
        })
        .collect();
    to_json(&DiagramRecord {
        params: ParamsRecord::from(template),
        m_values: nums(&d.m_values),
        phi_values: nums(&d.phi_values),
        cells,
    })
}

#[derive(serde::Serialize)]
struct SpectrumRecord<'a> {
    model: &'a str,
    params: ParamsRecord,
    eigenvalues: Vec<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvectors: Option<Vec<Vec<Pair>>>,
}

/// `{model, params, eigenvalues[], eigenvectors[][[re, im]]?}`; eigenvectors
/// are listed one per eigenvalue.
pub fn spectrum_json<T: Real>(
    model: &str,
    params: &LatticeParams<T>,
    values: &[T],
    vectors: Option<&CMatrix<T>>,
) -> String {
    to_json(&SpectrumRecord {
        model,
        params: ParamsRecord::from(params),
        eigenvalues: nums(values),
        eigenvectors: vectors.map(|v| v.column_iter().map(|c| pairs(&c.into_owned())).collect()),
    })
}

/// Row-major `[[re, im], ...]` rows.
pub fn matrix_json<T: Real>(h: &CMatrix<T>) -> String {
    let rows: Vec<Vec<Pair>> = h.row_iter().map(|r| pairs(&r.transpose())).collect();
    to_json(&rows)
}

#[derive(serde::Serialize)]
struct StateRecord {
    sites: Vec<String>,
    amplitudes: Vec<Pair>,
}

/// Single-particle amplitudes with their site labels.
pub fn state_json<T: Real>(amplitudes: &CVector<T>) -> String {
    to_json(&StateRecord {
        sites: (0..amplitudes.len()).map(|s| SiteIndex::from_linear(s).to_string()).collect(),
        amplitudes: pairs(amplitudes),
    })
}

/// Header `t,F,leakage`.
pub fn fidelity_csv<T: Real>(s: &FidelitySeries<T>) -> String {
    let mut out = String::from("t,F,leakage\n");
    for ((t, f), l) in s.times.iter().zip(&s.fidelity).zip(&s.leakage) {
        let _ =
            writeln!(out, "{},{},{}", fmt_num(t.to_f64_lossy()), fmt_num(f.to_f64_lossy()), fmt_num(l.to_f64_lossy()));
    }
    out
}

#[derive(serde::Serialize)]
struct FidelityRecord {
    params: ParamsRecord,
    times: Vec<Num>,
    fidelity: Vec<Num>,
    leakage: Vec<Num>,
    min_fidelity: Num,
    max_leakage: Num,
    outside_validity: bool,
}

pub fn fidelity_json<T: Real>(params: &LatticeParams<T>, s: &FidelitySeries<T>) -> String {
    to_json(&FidelityRecord {
        params: ParamsRecord::from(params),
        times: nums(&s.times),
        fidelity: nums(&s.fidelity),
        leakage: nums(&s.leakage),
        min_fidelity: Num(s.min_fidelity().to_f64_lossy()),
        max_leakage: Num(s.max_leakage().to_f64_lossy()),
        outside_validity: s.outside_validity,
    })
}

#[derive(serde::Serialize)]
struct GridRecord {
    params: Option<ParamsRecord>,
    init: Option<String>,
    /// `[L, L, 4]`: rung of particle one, rung of particle two, zeta.
    dims: [usize; 3],
    times: Vec<Num>,
    occupancy: Vec<Vec<Vec<[Num; 4]>>>,
    symmetry_defect: Vec<Num>,
}

/// `{params, init, dims, times[], occupancy[t][i][j][zeta], symmetry_defect[]}`.
pub fn occupancy2d_json<T: Real>(traj: &Trajectory2d<T>) -> String {
    let occupancy = (0..traj.len())
        .map(|n| {
            traj.grid(n)
                .into_iter()
                .map(|row| row.into_iter().map(|cell| cell.map(|x| Num(x.to_f64_lossy()))).collect())
                .collect()
        })
        .collect();
    to_json(&GridRecord {
        params: traj.meta.as_ref().map(|m| ParamsRecord::from(&m.params)),
        init: traj.meta.as_ref().map(|m| m.init.clone()),
        dims: [traj.l, traj.l, 4],
        times: nums(&traj.times),
        occupancy,
        symmetry_defect: nums(&traj.symmetry_defect),
    })
}

/// Header `site_a,site_b,re,im,kind` with `kind` `local` or `nonlocal`;
/// sites are written `iAlpha:jBeta`, amplitudes are `<site_a|H|site_b>`.
pub fn bonds_csv<T: Real>(layout: &ZetaLayout<T>) -> String {
    let mut out = String::from("site_a,site_b,re,im,kind\n");
    for b in &layout.bonds {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            b.to,
            b.from,
            fmt_num(b.amplitude.re.to_f64_lossy()),
            fmt_num(b.amplitude.im.to_f64_lossy()),
            if b.local { "local" } else { "nonlocal" }
        );
    }
    out
}

#[derive(serde::Serialize)]
struct ClassificationRecord {
    params: ParamsRecord,
    kind: &'static str,
    nu: Option<i32>,
    zak: Option<Num>,
}

/// `{params, kind, nu, zak}` for a single point of the phase diagram.
pub fn classification_json<T: Real>(params: &LatticeParams<T>, c: &PhaseClassification<T>) -> String {
    to_json(&ClassificationRecord {
        params: ParamsRecord::from(params),
        kind: c.kind.as_str(),
        nu: c.nu,
        zak: c.zak.map(|z| Num(z.to_f64_lossy())),
    })
}

/// Outcome of the product-lattice equivalence checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingCheck<T: Real> {
    /// `(2L)^2`.
    pub dimension: usize,
    /// `L (2L + 1)`.
    pub symmetric_dimension: usize,
    /// Largest deviation between the symmetric sector and the Fock spectrum.
    pub symmetric_deviation: T,
    /// Largest change of the antisymmetric spectrum between `U = 0` and the
    /// requested `U`.
    pub antisymmetric_u_shift: T,
}

#[derive(serde::Serialize)]
struct MappingRecord {
    params: ParamsRecord,
    dimension: usize,
    symmetric_dimension: usize,
    symmetric_deviation: Num,
    antisymmetric_u_shift: Num,
}

pub fn mapping_check_json<T: Real>(params: &LatticeParams<T>, c: &MappingCheck<T>) -> String {
    to_json(&MappingRecord {
        params: ParamsRecord::from(params),
        dimension: c.dimension,
        symmetric_dimension: c.symmetric_dimension,
        symmetric_deviation: Num(c.symmetric_deviation.to_f64_lossy()),
        antisymmetric_u_shift: Num(c.antisymmetric_u_shift.to_f64_lossy()),
    })
}

#[derive(serde::Serialize)]
struct LayoutRecord {
    params: ParamsRecord,
    periodic_zeta: bool,
    bonds: usize,
    local_bonds: usize,
    nonlocal_bonds: usize,
    nonlocal_per_cell: usize,
}

/// Bond counts of the stacked layout.
pub fn layout_json<T: Real>(params: &LatticeParams<T>, layout: &ZetaLayout<T>) -> String {
    let local = layout.bonds.iter().filter(|b| b.local).count();
    to_json(&LayoutRecord {
        params: ParamsRecord::from(params),
        periodic_zeta: layout.periodic_zeta,
        bonds: layout.bonds.len(),
        local_bonds: local,
        nonlocal_bonds: layout.bonds.len() - local,
        nonlocal_per_cell: layout.nonlocal_per_cell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::lattice::{single_particle_hamiltonian, Leg};
    use crate::scalar::cr;
    use crate::topology::phase_diagram_scan;
    use std::f64::consts::PI;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, 1.0, -2.5, PI, 1e-300, 6.02214076e23, 0.1 + 0.2] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let json = serde_json::to_string(&Num(x)).unwrap();
            assert_eq!(json, s);
            let back: f64 = serde_json::from_str(&json).unwrap();
            assert_eq!(back, x);
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn trajectory_outputs() {
        let p = LatticeParams::new(3, 1.0, 0.0, PI, 0.0, Boundary::Open).unwrap();
        let mut psi = CVector::zeros(6);
        psi[SiteIndex::new(2, Leg::A).linear()] = cr(1.0);
        let tr = evolve(&single_particle_hamiltonian(&p), &psi, &[0.0, 0.5]).unwrap().with_meta(p, "site:2,A");
        let support: BTreeSet<_> = [SiteIndex::new(2, Leg::A)].into();
        let json = trajectory_json(&tr, &support);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["params"]["L"], 3);
        assert_eq!(v["params"]["boundary"], "open");
        assert_eq!(v["occupations"].as_array().unwrap().len(), 2);
        assert_eq!(v["support_set"][0], "2A");
        assert!(v.get("doublonness").is_none());
        let csv = trajectory_csv(&tr);
        assert_eq!(csv.lines().count(), 1 + 2 * 6);
        assert!(csv.starts_with("t,site,occupation\n"));
    }

    #[test]
    fn phase_diagram_outputs() {
        let p = LatticeParams::<f64>::with_rungs(4).unwrap();
        let d = phase_diagram_scan(&p, (-3.0, 3.0), (-2.0 * PI, 2.0 * PI), (3, 4), 64).unwrap();
        let csv = phase_diagram_csv(&d);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "m,phi,kind,nu,zak");
        assert_eq!(lines.len(), 13);
        // phi = -2pi has d_z = 0 everywhere: metallic at m = 0
        let metallic = lines.iter().find(|l| l.contains("metallic")).unwrap();
        assert!(metallic.ends_with(",metallic,,"));
        let v: serde_json::Value = serde_json::from_str(&phase_diagram_json(&p, &d)).unwrap();
        assert_eq!(v["cells"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn matrix_and_state_layout() {
        let mut h = CMatrix::<f64>::zeros(2, 2);
        h[(0, 1)] = nalgebra::Complex::new(0.0, 1.0);
        h[(1, 0)] = nalgebra::Complex::new(0.0, -1.0);
        let v: serde_json::Value = serde_json::from_str(&matrix_json(&h)).unwrap();
        assert_eq!(v[0][1][1].as_f64(), Some(1.0));
        assert_eq!(v[1][0][1].as_f64(), Some(-1.0));
        let s: serde_json::Value = serde_json::from_str(&state_json(&h.column(1).into_owned())).unwrap();
        assert_eq!(s["sites"][1], "1B");
    }
}
