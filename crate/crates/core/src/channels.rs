//! Dephasing dynamics.
//!
//! Two noise models are covered. Global dephasing couples one white-noise
//! field `n(t)` (with `<n(t) n(t')> = Gamma delta(t - t')`) identically to
//! both qubits through `H(t) = -n(t)(sigma_z (x) I + I (x) sigma_z)/2`.
//! Averaging over the noise multiplies single-excitation coherences by
//! `gamma = exp(-t Gamma / 2)`, the `|HH><VV|` coherence by `gamma^4` and
//! leaves the `|HV><VH|` coherence untouched.
//!
//! The photonic model couples each photon's polarization to its own
//! frequency through a birefringent plate. With Gaussian joint frequency
//! statistics the decoherence function is
//! `G(t1, t2) = exp(i w0 dn (t1 + t2)/2 - C11 dn^2 (t1^2 + t2^2 + 2 K t1 t2)/2)`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Mat4, C64, ONE, ZERO};
use crate::rng::CounterRng;
use crate::state::{BellCoeffs, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalDephasingParams {
    /// Noise strength Gamma (inverse time).
    pub gamma_rate: f64,
    /// Elapsed time.
    pub t: f64,
}

impl GlobalDephasingParams {
    pub fn new(gamma_rate: f64, t: f64) -> Result<Self> {
        if !(gamma_rate >= 0.0 && gamma_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma_rate must be >= 0, got {gamma_rate}"
            )));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
        }
        Ok(Self { gamma_rate, t })
    }

    /// Parameters at dimensionless time `t Gamma` for unit rate.
    pub fn at_scaled_time(t_gamma: f64) -> Result<Self> {
        Self::new(1.0, t_gamma)
    }

    /// `gamma(t) = exp(-t Gamma / 2)`.
    pub fn decoherence_factor(&self) -> f64 {
        (-0.5 * self.t * self.gamma_rate).exp()
    }

    /// `gamma^4 = exp(-2 t Gamma)`.
    pub fn gamma4(&self) -> f64 {
        (-2.0 * self.t * self.gamma_rate).exp()
    }

    /// Variance of the accumulated phase `theta = int n(s) ds`.
    pub fn phase_variance(&self) -> f64 {
        self.gamma_rate * self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonEnvParams {
    /// Mean total frequency w0; each photon has mean w0/2.
    pub omega0: f64,
    /// Single-photon frequency variance C11 (= C22).
    pub c11: f64,
    /// Correlation coefficient K = C12 / C11.
    pub k_corr: f64,
    /// Birefringence n_V - n_H.
    pub delta_n: f64,
    pub t1: f64,
    pub t2: f64,
}

impl PhotonEnvParams {
    pub fn new(omega0: f64, c11: f64, k_corr: f64, delta_n: f64, t1: f64, t2: f64) -> Result<Self> {
        let p = Self {
            omega0,
            c11,
            k_corr,
            delta_n,
            t1,
            t2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Equal interaction in both arms at effective path difference
    /// `x = delta_n * t` (stored as `delta_n = 1`, `t1 = t2 = x`).
    pub fn symmetric(omega0: f64, c11: f64, k_corr: f64, path_difference: f64) -> Result<Self> {
        Self::new(omega0, c11, k_corr, 1.0, path_difference, path_difference)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega0,
            self.c11,
            self.k_corr,
            self.delta_n,
            self.t1,
            self.t2,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite photon parameter".into(),
            ));
        }
        if self.c11 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "c11 must be >= 0, got {}",
                self.c11
            )));
        }
        if self.k_corr.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "k_corr must lie in [-1, 1], got {}",
                self.k_corr
            )));
        }
        if self.t1 < 0.0 || self.t2 < 0.0 {
            return Err(Error::InvalidParameter(
                "interaction times must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Frequency covariance C12.
    pub fn c12(&self) -> f64 {
        self.k_corr * self.c11
    }

    fn without_phase(&self) -> Self {
        Self {
            omega0: 0.0,
            ..*self
        }
    }
}

/// Multiplies `rho` element-wise by a Hermitian factor pattern.
fn apply_pattern(rho: &DensityMatrix, factors: &Mat4) -> DensityMatrix {
    let mut m = *rho.entries();
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] *= factors[i][j];
        }
    }
    DensityMatrix::from_trusted(m)
}

/// Closed-form global dephasing.
pub fn global_dephase(rho0: &DensityMatrix, p: &GlobalDephasingParams) -> DensityMatrix {
    let g = C64::new(p.decoherence_factor(), 0.0);
    let g4 = C64::new(p.gamma4(), 0.0);
    let factors = [
        [ONE, g, g, g4],
        [g, ONE, ONE, g],
        [g, ONE, ONE, g],
        [g4, g, g, ONE],
    ];
    apply_pattern(rho0, &factors)
}

/// Bell coefficients along the global-dephasing flow: `c1 + c2` and `c3`
/// are conserved while `c1 - c2` shrinks by `gamma4`.
pub fn bell_coeff_flow(c0: &BellCoeffs, gamma4: f64) -> BellCoeffs {
    let [c1, c2, c3] = c0.as_array();
    let g = gamma4.clamp(0.0, 1.0);
    // Two algebraically equal forms: the first is exact at g = 1, the second
    // keeps the surviving difference (c1 - c2) g when g is tiny.
    if g >= 0.5 {
        let shift = 0.5 * (c1 - c2) * (1.0 - g);
        BellCoeffs::from_trusted([c1 - shift, c2 + shift, c3])
    } else {
        let (sum, diff) = (c1 + c2, (c1 - c2) * g);
        BellCoeffs::from_trusted([0.5 * (sum + diff), 0.5 * (sum - diff), c3])
    }
}

const TRAJECTORY_CHUNK: u64 = 4096;

/// Monte-Carlo average over noise realizations of the global dephasing
/// Hamiltonian.
///
/// White noise integrates to a Gaussian phase `theta ~ N(0, Gamma t)`, so each
/// trajectory is the exact unitary `diag(e^{i theta}, 1, 1, e^{-i theta})`.
/// Trajectory `k` draws from stream `k` of `seed`; chunk sums are reduced in
/// index order.
pub fn stochastic_trajectory_oracle(
    rho0: &DensityMatrix,
    p: &GlobalDephasingParams,
    n_traj: u64,
    seed: u64,
) -> Result<DensityMatrix> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter("n_traj must be >= 1".into()));
    }
    let sigma = p.phase_variance().sqrt();
    let base = *rho0.entries();
    let n_chunks = n_traj.div_ceil(TRAJECTORY_CHUNK);
    let partials: Vec<Mat4> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * TRAJECTORY_CHUNK;
            let hi = (lo + TRAJECTORY_CHUNK).min(n_traj);
            let mut acc = linalg::zeros::<4>();
            for k in lo..hi {
                let mut rng = CounterRng::new(seed, k);
                let z: f64 = StandardNormal.sample(&mut rng);
                let theta = sigma * z;
                let u = [
                    C64::from_polar(1.0, theta),
                    ONE,
                    ONE,
                    C64::from_polar(1.0, -theta),
                ];
                for i in 0..4 {
                    for j in 0..4 {
                        acc[i][j] += u[i] * base[i][j] * u[j].conj();
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = linalg::zeros::<4>();
    for part in &partials {
        for i in 0..4 {
            for j in 0..4 {
                total[i][j] += part[i][j];
            }
        }
    }
    let inv = C64::new(1.0 / n_traj as f64, 0.0);
    Ok(DensityMatrix::from_trusted(linalg::scale(&total, inv)))
}

/// Gaussian decoherence function `G(t1, t2)`; `t2` may be negative (it is
/// evaluated at `(t1, -t2)` for the `Lambda_12` coherence).
pub fn decoherence_function(t1: f64, t2: f64, p: &PhotonEnvParams) -> C64 {
    let dn = p.delta_n;
    let phase = 0.5 * p.omega0 * dn * (t1 + t2);
    let decay = 0.5 * p.c11 * dn * dn * (t1 * t1 + t2 * t2 + 2.0 * p.k_corr * t1 * t2);
    C64::from_polar((-decay).exp(), phase)
}

/// The four coherence factors `(kappa_1, kappa_2, kappa_12, Lambda_12)`.
pub fn photonic_factors(p: &PhotonEnvParams, compensate_phase: bool) -> [C64; 4] {
    let q = if compensate_phase {
        p.without_phase()
    } else {
        *p
    };
    [
        decoherence_function(q.t1, 0.0, &q),
        decoherence_function(0.0, q.t2, &q),
        decoherence_function(q.t1, q.t2, &q),
        decoherence_function(q.t1, -q.t2, &q),
    ]
}

/// Polarization dynamics of two photons dephased by correlated frequency
/// environments.
pub fn photonic_channel(
    rho0: &DensityMatrix,
    p: &PhotonEnvParams,
    compensate_phase: bool,
) -> DensityMatrix {
    let [k1, k2, k12, l12] = photonic_factors(p, compensate_phase);
    let factors = [
        [ONE, k2, k1, k12],
        [k2.conj(), ONE, l12, k1],
        [k1.conj(), l12.conj(), ONE, k2],
        [k12.conj(), k1.conj(), k2.conj(), ONE],
    ];
    apply_pattern(rho0, &factors)
}

/// Photonic dynamics seen after a half-wave plate at 45 degrees on arm 2
/// relabels `phi <-> psi`: the roles of `kappa_12` and `Lambda_12` swap.
pub fn relabelled_photonic_channel(
    rho0: &DensityMatrix,
    p: &PhotonEnvParams,
    compensate_phase: bool,
) -> DensityMatrix {
    let [k1, k2, k12, l12] = photonic_factors(p, compensate_phase);
    let factors = [
        [ONE, k2.conj(), k1, l12],
        [k2, ONE, k12, k1],
        [k1.conj(), k12.conj(), ONE, k2.conj()],
        [l12.conj(), k1.conj(), k2, ONE],
    ];
    apply_pattern(rho0, &factors)
}

/// `(u1 (x) u2) rho (u1 (x) u2)^dagger`.
pub fn apply_local_unitary(
    rho0: &DensityMatrix,
    u_arm1: &Mat2,
    u_arm2: &Mat2,
) -> Result<DensityMatrix> {
    for (arm, u) in [(1u8, u_arm1), (2u8, u_arm2)] {
        let defect = linalg::unitarity_defect(u);
        if !(defect <= 1e-10) {
            return Err(Error::NotUnitary { arm, defect });
        }
    }
    let u = linalg::kron(u_arm1, u_arm2);
    Ok(DensityMatrix::from_trusted(linalg::conjugate_by(
        &u,
        rho0.entries(),
    )))
}

fn rotation(deg: f64) -> Mat2 {
    let (s, c) = deg.to_radians().sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// Jones matrix of a retarder with fast axis at `axis_deg` from horizontal;
/// the slow axis picks up `retardance`.
fn retarder(axis_deg: f64, retardance: C64) -> Mat2 {
    let r = rotation(axis_deg);
    let d = [[ONE, ZERO], [ZERO, retardance]];
    linalg::matmul(&linalg::matmul(&r, &d), &rotation(-axis_deg))
}

/// Half-wave plate: `[[cos 2h, sin 2h], [sin 2h, -cos 2h]]`.
pub fn half_wave_plate(axis_deg: f64) -> Mat2 {
    retarder(axis_deg, C64::new(-1.0, 0.0))
}

/// Quarter-wave plate with retardance `i` on the slow axis.
pub fn quarter_wave_plate(axis_deg: f64) -> Mat2 {
    retarder(axis_deg, C64::new(0.0, 1.0))
}
