//! Two-qubit density matrices and the Bell-diagonal family.
//!
//! Basis order is fixed as `|HH>, |HV>, |VH>, |VV>` (equivalently
//! `|00>, |01>, |10>, |11>`), with the first label belonging to arm 1.
//!
//! A Bell-diagonal state is `rho = (I + sum_j c_j sigma_j (x) sigma_j) / 4`.
//! Its entries are
//!
//! ```text
//! rho_11 = rho_44 = (1 + c3)/4     rho_14 = rho_41 = (c1 - c2)/4
//! rho_22 = rho_33 = (1 - c3)/4     rho_23 = rho_32 = (c1 + c2)/4
//! ```
//!
//! and every other entry vanishes.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, C64, PAULI};

/// Numerical tolerances for physicality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
    /// Allowed off-family magnitude when reading a state as Bell-diagonal.
    pub bell_family: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-9,
            trace: 1e-9,
            positivity: 1e-9,
            bell_family: 1e-6,
        }
    }
}

/// A validated two-qubit state.
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Mat4,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DensityMatrix [")?;
        for row in &self.entries {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", cells.join("  "))?;
        }
        write!(f, "]")
    }
}

impl DensityMatrix {
    pub fn new(entries: Mat4) -> Result<Self> {
        Self::with_tolerances(entries, &Tolerances::default())
    }

    pub fn with_tolerances(entries: Mat4, tol: &Tolerances) -> Result<Self> {
        let herm = linalg::hermiticity_defect(&entries);
        if !(herm <= tol.hermitian) {
            return Err(Error::NotHermitian(herm));
        }
        let tr = linalg::trace(&entries).re;
        if !((tr - 1.0).abs() <= tol.trace) {
            return Err(Error::InvalidTrace(tr));
        }
        let min_eig = linalg::hermitian_eigen(&entries).values[0];
        if min_eig < -tol.positivity {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { entries })
    }

    /// Wraps entries known to be physical up to rounding (channel outputs).
    pub(crate) fn from_trusted(entries: Mat4) -> Self {
        debug_assert!(linalg::hermiticity_defect(&entries) < 1e-8);
        Self { entries }
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: [C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v = psi.map(|z| z / norm);
        let mut m = linalg::zeros::<4>();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = v[i] * v[j].conj();
            }
        }
        Ok(Self { entries: m })
    }

    pub fn maximally_mixed() -> Self {
        Self {
            entries: linalg::scale(&linalg::identity::<4>(), C64::new(0.25, 0.0)),
        }
    }

    /// Computational basis projector; `index` follows HH, HV, VH, VV.
    pub fn basis_state(index: usize) -> Self {
        assert!(index < 4, "basis index out of range");
        let mut m = linalg::zeros::<4>();
        m[index][index] = linalg::ONE;
        Self { entries: m }
    }

    pub fn bell_state(label: BellLabel) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = match label {
            BellLabel::PhiPlus => [h, 0.0, 0.0, h],
            BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
            BellLabel::PsiPlus => [0.0, h, h, 0.0],
            BellLabel::PsiMinus => [0.0, h, -h, 0.0],
        };
        Self::pure(psi.map(|x| C64::new(x, 0.0))).expect("non-zero vector")
    }

    pub fn entries(&self) -> &Mat4 {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian_eigen(&self.entries).values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `Tr(rho O)` for an Hermitian observable.
    pub fn expectation(&self, observable: &Mat4) -> f64 {
        linalg::trace_of_product(&self.entries, observable).re
    }

    pub fn to_bell_coeffs(&self) -> Result<BellCoeffs> {
        density_to_bell_coeffs(self, Tolerances::default().bell_family)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let flat: Vec<[f64; 2]> = self
            .entries
            .iter()
            .flatten()
            .map(|z| [z.re, z.im])
            .collect();
        flat.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let flat: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if flat.len() != 16 {
            return Err(serde::de::Error::invalid_length(
                flat.len(),
                &"16 [re, im] pairs in row-major order",
            ));
        }
        let mut m = linalg::zeros::<4>();
        for (k, [re, im]) in flat.into_iter().enumerate() {
            m[k / 4][k % 4] = C64::new(re, im);
        }
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// The four Bell states at the vertices of the tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    /// Correlation triple `(c1, c2, c3)` of the pure Bell state.
    pub fn coeffs(self) -> [f64; 3] {
        match self {
            BellLabel::PhiPlus => [1.0, -1.0, 1.0],
            BellLabel::PhiMinus => [-1.0, 1.0, 1.0],
            BellLabel::PsiPlus => [1.0, 1.0, -1.0],
            BellLabel::PsiMinus => [-1.0, -1.0, -1.0],
        }
    }

    /// Weight of this Bell projector in a Bell-diagonal state, `(1 + s.c)/4`.
    pub fn weight_in(self, c: [f64; 3]) -> f64 {
        let s = self.coeffs();
        0.25 * (1.0 + s[0] * c[0] + s[1] * c[1] + s[2] * c[2])
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        })
    }
}

/// Coordinates `(c1, c2, c3)` of a point in the Bell-diagonal tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoeffs")]
pub struct BellCoeffs {
    c1: f64,
    c2: f64,
    c3: f64,
}

#[derive(Deserialize)]
struct RawCoeffs {
    c1: f64,
    c2: f64,
    c3: f64,
}

impl TryFrom<RawCoeffs> for BellCoeffs {
    type Error = Error;

    fn try_from(raw: RawCoeffs) -> Result<Self> {
        BellCoeffs::new(raw.c1, raw.c2, raw.c3)
    }
}

const TETRAHEDRON_TOL: f64 = 1e-9;

impl BellCoeffs {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let outside = Error::OutsideTetrahedron { c1, c2, c3 };
        let cs = [c1, c2, c3];
        if cs.iter().any(|c| !c.is_finite() || c.abs() > 1.0 + 1e-12) {
            return Err(outside);
        }
        if eigenvalues_bell(cs).iter().any(|&l| l < -TETRAHEDRON_TOL) {
            return Err(outside);
        }
        Ok(Self { c1, c2, c3 })
    }

    pub fn from_array(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }

    /// Pure Bell state coefficients.
    pub fn vertex(label: BellLabel) -> Self {
        let [c1, c2, c3] = label.coeffs();
        Self { c1, c2, c3 }
    }

    pub fn zero() -> Self {
        Self {
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
        }
    }

    pub(crate) fn from_trusted(c: [f64; 3]) -> Self {
        Self {
            c1: c[0],
            c2: c[1],
            c3: c[2],
        }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        eigenvalues_bell(self.as_array())
    }

    /// `|c1| + |c2| + |c3|`; the separable octahedron is where this is at most 1.
    pub fn l1_norm(&self) -> f64 {
        self.c1.abs() + self.c2.abs() + self.c3.abs()
    }

    pub fn to_density(&self) -> DensityMatrix {
        bell_diagonal_to_density(self)
    }
}

/// Builds `(I + sum_j c_j sigma_j (x) sigma_j)/4`.
pub fn bell_diagonal_to_density(c: &BellCoeffs) -> DensityMatrix {
    let q = |x: f64| C64::new(x / 4.0, 0.0);
    let mut m = linalg::zeros::<4>();
    m[0][0] = q(1.0 + c.c3);
    m[3][3] = q(1.0 + c.c3);
    m[1][1] = q(1.0 - c.c3);
    m[2][2] = q(1.0 - c.c3);
    m[0][3] = q(c.c1 - c.c2);
    m[3][0] = q(c.c1 - c.c2);
    m[1][2] = q(c.c1 + c.c2);
    m[2][1] = q(c.c1 + c.c2);
    DensityMatrix::from_trusted(m)
}

/// Largest entry outside the Bell-diagonal pattern (including imaginary
/// parts of the two anti-diagonal coherences and unequal diagonal pairs).
pub fn bell_family_defect(rho: &DensityMatrix) -> f64 {
    let m = rho.entries();
    let mut worst = 0.0f64;
    for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        worst = worst.max(m[i][j].norm()).max(m[j][i].norm());
    }
    worst = worst.max(m[0][3].im.abs()).max(m[1][2].im.abs());
    worst = worst.max((m[0][0].re - m[3][3].re).abs());
    worst = worst.max((m[1][1].re - m[2][2].re).abs());
    worst
}

/// Reads `c_j = Tr(rho sigma_j (x) sigma_j)` from a Bell-diagonal state.
pub fn density_to_bell_coeffs(rho: &DensityMatrix, family_tol: f64) -> Result<BellCoeffs> {
    let defect = bell_family_defect(rho);
    if defect > family_tol {
        return Err(Error::NotBellDiagonal(defect));
    }
    let t = correlation_matrix(rho);
    Ok(BellCoeffs::from_trusted([t[0][0], t[1][1], t[2][2]]))
}

/// `{lambda_1..4} = {(1 - c1 - c2 - c3), (1 + c1 + c2 - c3), (1 + c1 - c2 + c3), (1 - c1 + c2 + c3)}/4`,
/// i.e. the weights of psi-, psi+, phi+, phi- in that order.
pub fn eigenvalues_bell(c: [f64; 3]) -> [f64; 4] {
    let [c1, c2, c3] = c;
    [
        0.25 * (1.0 - c1 - c2 - c3),
        0.25 * (1.0 + c1 + c2 - c3),
        0.25 * (1.0 + c1 - c2 + c3),
        0.25 * (1.0 - c1 + c2 + c3),
    ]
}

/// Convex combination of the four Bell projectors.
pub fn bell_mixture(
    p_phi_plus: f64,
    p_phi_minus: f64,
    p_psi_plus: f64,
    p_psi_minus: f64,
) -> Result<BellCoeffs> {
    let weights = [p_phi_plus, p_phi_minus, p_psi_plus, p_psi_minus];
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= 0.0)) || !((sum - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidWeights(sum));
    }
    let mut c = [0.0; 3];
    for (w, label) in weights.iter().zip(BellLabel::ALL) {
        for (cj, sj) in c.iter_mut().zip(label.coeffs()) {
            *cj += w * sj;
        }
    }
    Ok(BellCoeffs::from_trusted(c))
}

/// `T_ij = Tr(rho sigma_i (x) sigma_j)` for i, j in {x, y, z}.
pub fn correlation_matrix(rho: &DensityMatrix) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, tij) in row.iter_mut().enumerate() {
            *tij = rho.expectation(&linalg::kron(&PAULI[i + 1], &PAULI[j + 1]));
        }
    }
    t
}

/// Local Bloch vectors `(Tr rho sigma_k (x) I, Tr rho I (x) sigma_k)`.
pub fn local_bloch_vectors(rho: &DensityMatrix) -> ([f64; 3], [f64; 3]) {
    let a = std::array::from_fn(|k| rho.expectation(&linalg::kron(&PAULI[k + 1], &PAULI[0])));
    let b = std::array::from_fn(|k| rho.expectation(&linalg::kron(&PAULI[0], &PAULI[k + 1])));
    (a, b)
}

/// `||rho - sigma||_1 / 2`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let diff = linalg::sub(rho.entries(), sigma.entries());
    let half: f64 = linalg::hermitian_eigen(&diff)
        .values
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
        / 2.0;
    half.clamp(0.0, 1.0)
}

/// Rebuilds `rho = (1/4) sum_{ij} r_ij sigma_i (x) sigma_j` from real Pauli
/// coordinates (`r[0][0]` is the trace).
pub(crate) fn from_pauli_coordinates(r: &[[f64; 4]; 4]) -> Mat4 {
    let mut m = linalg::zeros::<4>();
    for (i, row) in r.iter().enumerate() {
        for (j, &rij) in row.iter().enumerate() {
            if rij == 0.0 {
                continue;
            }
            let term = linalg::kron(&PAULI[i], &PAULI[j]);
            for a in 0..4 {
                for b in 0..4 {
                    m[a][b] += term[a][b] * (rij / 4.0);
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tetrahedron_point;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn maximally_mixed_from_zero_coeffs() {
        let rho = bell_diagonal_to_density(&BellCoeffs::zero());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert_eq!(rho.get(i, j), C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn psi_plus_vertex_matches_projector() {
        let rho = bell_diagonal_to_density(&BellCoeffs::new(1.0, 1.0, -1.0).unwrap());
        let expected = DensityMatrix::bell_state(BellLabel::PsiPlus);
        assert!(linalg::max_abs_diff(rho.entries(), expected.entries()) < 1e-15);
        assert_eq!(rho.get(1, 1).re, 0.5);
        assert_eq!(rho.get(1, 2).re, 0.5);
        assert_eq!(rho.get(0, 0).re, 0.0);
    }

    #[test]
    fn entries_of_first_reference_state() {
        let rho = bell_diagonal_to_density(&BellCoeffs::new(1.0, 0.4, -0.4).unwrap());
        assert!(close(rho.get(0, 0).re, 0.15, 1e-15));
        assert!(close(rho.get(3, 3).re, 0.15, 1e-15));
        assert!(close(rho.get(1, 1).re, 0.35, 1e-15));
        assert!(close(rho.get(2, 2).re, 0.35, 1e-15));
        assert!(close(rho.get(0, 3).re, 0.15, 1e-15));
        assert!(close(rho.get(1, 2).re, 0.35, 1e-15));
        assert_eq!(rho.get(0, 1), linalg::ZERO);
    }

    #[test]
    fn reading_coefficients_back() {
        let c = density_to_bell_coeffs(&DensityMatrix::maximally_mixed(), 1e-6).unwrap();
        assert_eq!(c.as_array(), [0.0, 0.0, 0.0]);
        let c =
            density_to_bell_coeffs(&DensityMatrix::bell_state(BellLabel::PhiPlus), 1e-6).unwrap();
        for (got, want) in c.as_array().iter().zip([1.0, -1.0, 1.0]) {
            assert!(close(*got, want, 1e-15));
        }
        let c0 = BellCoeffs::new(-0.5, -1.0, -0.5).unwrap();
        let c = c0.to_density().to_bell_coeffs().unwrap();
        for (got, want) in c.as_array().iter().zip(c0.as_array()) {
            assert!(close(*got, want, 1e-12));
        }
    }

    #[test]
    fn non_bell_diagonal_rejected() {
        let rho = DensityMatrix::basis_state(0);
        assert!(matches!(
            density_to_bell_coeffs(&rho, 1e-6),
            Err(Error::NotBellDiagonal(_))
        ));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_plus = DensityMatrix::pure([h, h, 0.0, 0.0].map(|x| C64::new(x, 0.0))).unwrap();
        assert!(density_to_bell_coeffs(&plus_plus, 1e-6).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let cases = [
            ([1.0, 0.4, -0.4], [0.0, 0.7, 0.3, 0.0]),
            ([-0.5, -1.0, -0.5], [0.75, 0.0, 0.25, 0.0]),
            ([0.0, 0.0, 0.0], [0.25; 4]),
        ];
        for (c, want) in cases {
            let got = eigenvalues_bell(c);
            for (g, w) in got.iter().zip(want) {
                assert!(close(*g, w, 1e-15), "{c:?}: {got:?}");
            }
        }
    }

    #[test]
    fn mixture_examples() {
        let c = bell_mixture(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(c.as_array(), [1.0, -1.0, 1.0]);
        let c = bell_mixture(0.3, 0.0, 0.7, 0.0).unwrap();
        for (g, w) in c.as_array().iter().zip([1.0, 0.4, -0.4]) {
            assert!(close(*g, w, 1e-15));
        }
        let c = bell_mixture(0.25, 0.0, 0.0, 0.75).unwrap();
        for (g, w) in c.as_array().iter().zip([-0.5, -1.0, -0.5]) {
            assert!(close(*g, w, 1e-15));
        }
        assert!(matches!(
            bell_mixture(0.5, 0.5, 0.1, 0.0),
            Err(Error::InvalidWeights(_))
        ));
        assert!(bell_mixture(1.2, -0.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn tetrahedron_rejections() {
        assert!(BellCoeffs::new(1.0, 1.0, 1.0).is_err());
        assert!(BellCoeffs::new(1.1, 0.0, 0.0).is_err());
        assert!(BellCoeffs::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(BellCoeffs::new(0.7, -0.7, 0.5).is_ok());
    }

    #[test]
    fn correlation_matrix_examples() {
        let t = correlation_matrix(&DensityMatrix::maximally_mixed());
        assert!(t.iter().flatten().all(|x| x.abs() < 1e-15));
        let t = correlation_matrix(&DensityMatrix::bell_state(BellLabel::PsiMinus));
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!(close(t[i][j], want, 1e-15));
            }
        }
    }

    #[test]
    fn trace_distance_examples() {
        let rho = DensityMatrix::bell_state(BellLabel::PhiMinus);
        assert!(trace_distance(&rho, &rho) < 1e-15);
        let hh = DensityMatrix::basis_state(0);
        let vv = DensityMatrix::basis_state(3);
        assert!(close(trace_distance(&hh, &vv), 1.0, 1e-14));
        let d = trace_distance(
            &DensityMatrix::maximally_mixed(),
            &DensityMatrix::bell_state(BellLabel::PhiPlus),
        );
        assert!(close(d, 0.75, 1e-14), "{d}");
    }

    #[test]
    fn validation_errors() {
        let mut m = *DensityMatrix::maximally_mixed().entries();
        m[0][1] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));
        let m = linalg::scale(&linalg::identity::<4>(), C64::new(0.3, 0.0));
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidTrace(_))));
        let mut m = linalg::zeros::<4>();
        m[0][0] = C64::new(1.5, 0.0);
        m[1][1] = C64::new(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPositive(_))));
    }

    #[test]
    fn json_forms() {
        let c = BellCoeffs::new(1.0, 0.4, -0.4).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"c1":1.0,"c2":0.4,"c3":-0.4}"#);
        assert!(serde_json::from_str::<BellCoeffs>(r#"{"c1":1,"c2":1,"c3":1}"#).is_err());

        let rho = c.to_density();
        let js = serde_json::to_value(rho).unwrap();
        assert_eq!(js.as_array().unwrap().len(), 16);
        assert_eq!(js[3], serde_json::json!([0.15, 0.0]));
        let back: DensityMatrix = serde_json::from_value(js).unwrap();
        assert_eq!(back, rho);
        assert!(serde_json::from_str::<DensityMatrix>("[[1.0, 0.0]]").is_err());
    }

    proptest! {
        #[test]
        fn coefficient_round_trip(c in tetrahedron_point()) {
            let back = density_to_bell_coeffs(&c.to_density(), 1e-6).unwrap();
            for (g, w) in back.as_array().iter().zip(c.as_array()) {
                prop_assert!((g - w).abs() <= 1e-12);
            }
        }

        #[test]
        fn mixture_is_inside_tetrahedron(c in tetrahedron_point()) {
            prop_assert!(BellCoeffs::from_array(c.as_array()).is_ok());
            prop_assert!(c.eigenvalues().iter().all(|&l| l >= -1e-15));
        }

        #[test]
        fn bell_state_t_matrix_is_diagonal(c in tetrahedron_point()) {
            let t = correlation_matrix(&c.to_density());
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        prop_assert!(t[i][j].abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_spectrum_matches_numeric_over_samples() {
        use proptest::strategy::ValueTree;
        use proptest::test_runner::TestRunner;
        let mut runner = TestRunner::deterministic();
        let strat = tetrahedron_point();
        for _ in 0..1000 {
            let c = strat.new_tree(&mut runner).unwrap().current();
            let mut closed = c.eigenvalues();
            closed.sort_by(f64::total_cmp);
            let numeric = c.to_density().eigenvalues();
            let sum: f64 = closed.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            for (a, b) in closed.iter().zip(numeric) {
                assert!((a - b).abs() <= 1e-10, "{c:?}");
            }
        }
    }
}
