//! Four-level Lindblad master equation and its block decomposition.
//!
//! Ordered basis: {|g,∅⟩, |e,∅⟩, |f,1⟩, |f,∅⟩}. The only dissipative
//! channel is cavity leakage, jump operator c = |f,∅⟩⟨f,1| at rate Γ_c.
//! The Hamiltonian acts on the first three levels through the real
//! symmetric block A(t) = {0, Ω(t), 0; Ω(t), Δ, g; 0, g, 0}; the bare
//! energy of |f,∅⟩ is a decoupled global phase and is dropped.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rk4;
use crate::units::{DriveEnvelope, ScenarioConfig};

/// Parameters of the Lindblad / block systems. The A-block puts the
/// two-photon (Raman) level pair {|g,∅⟩, |f,1⟩} on resonance, which is the
/// Δ_c = Δ configuration of the drive presets.
#[derive(Debug, Clone)]
pub struct MasterParams {
    pub g: f64,
    pub delta: f64,
    pub gamma_c: f64,
    pub drive: DriveEnvelope,
}

impl MasterParams {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        MasterParams {
            g: config.atom.g,
            delta: config.atom.delta,
            gamma_c: config.cavity.gamma_c,
            drive: config.atom.drive.clone(),
        }
    }
}

/// Density matrix on the ordered 4-level basis, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix4 {
    pub m: Vec<C64>,
}

impl DensityMatrix4 {
    pub fn from_pure(psi: &[C64; 4]) -> Self {
        let mut m = vec![C64::new(0.0, 0.0); 16];
        for i in 0..4 {
            for j in 0..4 {
                m[4 * i + j] = psi[i] * psi[j].conj();
            }
        }
        DensityMatrix4 { m }
    }

    pub fn ground() -> Self {
        let mut psi = [C64::new(0.0, 0.0); 4];
        psi[0] = C64::new(1.0, 0.0);
        Self::from_pure(&psi)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[4 * i + j]
    }

    pub fn population(&self, i: usize) -> f64 {
        self.get(i, i).re
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.get(i, i)).sum()
    }

    pub fn purity(&self) -> f64 {
        let mut p = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                p += self.get(i, j) * self.get(j, i);
            }
        }
        p.re
    }

    /// Largest deviation |ρ_ij − ρ_ji*|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue, via Jacobi rotations on the real symmetric
    /// embedding [[X, −Y], [Y, X]] of ρ = X + iY (eigenvalues doubled).
    pub fn min_eigenvalue(&self) -> f64 {
        let mut a = [[0.0f64; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                let v = self.get(i, j);
                a[i][j] = v.re;
                a[i + 4][j + 4] = v.re;
                a[i][j + 4] = -v.im;
                a[i + 4][j] = v.im;
            }
        }
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..8 {
                for q in (p + 1)..8 {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-28 {
                break;
            }
            for p in 0..8 {
                for q in (p + 1)..8 {
                    if a[p][q].abs() < 1e-18 {
                        continue;
                    }
                    let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                    let (s, c) = theta.sin_cos();
                    for k in 0..8 {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..8 {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..8).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
    }
}

const I: C64 = C64::new(0.0, 1.0);

/// ρ̇ = −i[H(t), ρ] + Γ_c (cρc† − ½{c†c, ρ}) with c = |f,∅⟩⟨f,1|.
pub fn lindblad_rhs(t: f64, rho: &[C64], deriv: &mut [C64], p: &MasterParams) {
    let omega_t = p.drive.value(t);
    // nonzero entries of the Hermitian H: (0,1)=(1,0)=Ω, (1,1)=Δ, (1,2)=(2,1)=g
    let h = |i: usize, j: usize| -> f64 {
        match (i, j) {
            (0, 1) | (1, 0) => omega_t,
            (1, 1) => p.delta,
            (1, 2) | (2, 1) => p.g,
            _ => 0.0,
        }
    };
    let r = |i: usize, j: usize| rho[4 * i + j];
    for i in 0..4 {
        for j in 0..4 {
            let mut comm = C64::new(0.0, 0.0);
            for k in 0..3 {
                comm += h(i, k) * r(k, j) - r(i, k) * h(k, j);
            }
            // dissipator: cρc† feeds (3,3) from (2,2); {c†c,ρ} damps row/col 2
            let mut dissipator = C64::new(0.0, 0.0);
            if i == 3 && j == 3 {
                dissipator += r(2, 2);
            }
            let damp = (i == 2) as u8 + (j == 2) as u8;
            dissipator -= 0.5 * f64::from(damp) * r(i, j);
            deriv[4 * i + j] = -I * comm + p.gamma_c * dissipator;
        }
    }
}

/// Recorded state of a full master-equation run.
#[derive(Debug, Clone)]
pub struct MasterTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix4>,
}

impl MasterTrajectory {
    pub fn populations(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(level)).collect()
    }
}

/// Integrate the full Lindblad equation with fixed-step RK4.
pub fn integrate_lindblad(
    initial: &DensityMatrix4,
    params: &MasterParams,
    t0: f64,
    tf: f64,
    dt: f64,
    record_every: usize,
) -> Result<MasterTrajectory> {
    let mut state = initial.m.clone();
    let steps = ((tf - t0) / dt).round() as usize;
    let mut times = Vec::new();
    let mut states = Vec::new();
    rk4::integrate(
        |t, s, d| lindblad_rhs(t, s, d, params),
        &mut state,
        t0,
        dt,
        steps,
        record_every,
        &mut |t: f64, s: &[C64]| {
            times.push(t);
            states.push(DensityMatrix4 { m: s.to_vec() });
        },
    )?;
    Ok(MasterTrajectory { times, states })
}

/// Block-decomposed evolution: the A-block evolves under the effective
/// non-Hermitian generator Ã = A − (i/2)Γ_c D†D with D = [0, 0, 1], and
/// ρ₀₀ = P_{f,0} accumulates the leaked population Γ_c |ψ₃|².
#[derive(Debug, Clone)]
pub struct BlockTrajectory {
    pub times: Vec<f64>,
    pub psi: Vec<[C64; 3]>,
    /// ρ₀₀(t), the emitted-photon record; identical to n(t).
    pub p_f0: Vec<f64>,
}

impl BlockTrajectory {
    pub fn rho_aa(&self, idx: usize) -> DensityMatrix4 {
        let p = &self.psi[idx];
        DensityMatrix4::from_pure(&[p[0], p[1], p[2], C64::new(0.0, 0.0)])
    }
}

pub fn block_evolution(
    initial: &[C64; 3],
    params: &MasterParams,
    t0: f64,
    tf: f64,
    dt: f64,
    record_every: usize,
) -> Result<BlockTrajectory> {
    let mut state = vec![initial[0], initial[1], initial[2], C64::new(0.0, 0.0)];
    let steps = ((tf - t0) / dt).round() as usize;
    let mut times = Vec::new();
    let mut psi = Vec::new();
    let mut p_f0 = Vec::new();
    rk4::integrate(
        |t, s, d| {
            let omega_t = params.drive.value(t);
            d[0] = -I * omega_t * s[1];
            d[1] = -I * (omega_t * s[0] + params.delta * s[1] + params.g * s[2]);
            d[2] = -I * params.g * s[1] - 0.5 * params.gamma_c * s[2];
            d[3] = C64::new(params.gamma_c * s[2].norm_sqr(), 0.0);
            let _ = t;
        },
        &mut state,
        t0,
        dt,
        steps,
        record_every,
        &mut |t: f64, s: &[C64]| {
            times.push(t);
            psi.push([s[0], s[1], s[2]]);
            p_f0.push(s[3].re);
        },
    )?;
    Ok(BlockTrajectory { times, psi, p_f0 })
}
