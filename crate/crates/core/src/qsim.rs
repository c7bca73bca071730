//! BB84 registers, single-qubit measurement and small exact state algebra.
//!
//! Honest parties never entangle qubits, so a register is kept symbolically as
//! `(x_i, θ_i)` pairs; qubit `i` is the pure state `H^{θ_i}|x_i⟩`. Matrices are
//! only materialised for the few-qubit oracles, capped at dimension
//! [`MAX_DIM`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 64;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bb84Register {
    data: BitString,
    bases: BitString,
}

impl Bb84Register {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `(x_i, θ_i)` of qubit `i`.
    pub fn qubit(&self, i: usize) -> (bool, bool) {
        (self.data.get(i), self.bases.get(i))
    }

    /// Bloch vector `(s_x, s_y, s_z)` of qubit `i`.
    pub fn bloch(&self, i: usize) -> [f64; 3] {
        bb84_bloch(self.data.get(i), self.bases.get(i))
    }

    pub fn density(&self, i: usize) -> DensityOp {
        let (x, theta) = self.qubit(i);
        DensityOp::bb84(x, theta)
    }

    /// Register of `n` copies of the maximally mixed state is not representable;
    /// an all-`|0⟩` register stands in for a missing transmission.
    pub fn vacuum(n: usize) -> Self {
        Self {
            data: BitString::zeros(n),
            bases: BitString::zeros(n),
        }
    }
}

fn bb84_bloch(x: bool, theta: bool) -> [f64; 3] {
    let sign = if x { -1.0 } else { 1.0 };
    if theta {
        [sign, 0.0, 0.0]
    } else {
        [0.0, 0.0, sign]
    }
}

pub fn prepare_bb84(x: &BitString, theta: &BitString) -> Result<Bb84Register> {
    if x.len() != theta.len() {
        return Err(Error::arg(format!(
            "data string has {} bits but basis string has {}",
            x.len(),
            theta.len()
        )));
    }
    Ok(Bb84Register {
        data: x.clone(),
        bases: theta.clone(),
    })
}

/// Measures every qubit in the BB84 basis `theta_tilde[i]`.
pub fn measure_bb84<R: Rng + ?Sized>(reg: &Bb84Register, theta_tilde: &BitString, rng: &mut R) -> Result<BitString> {
    if reg.len() != theta_tilde.len() {
        return Err(Error::arg(format!(
            "register has {} qubits but {} measurement bases were given",
            reg.len(),
            theta_tilde.len()
        )));
    }
    Ok((0..reg.len())
        .map(|i| {
            let (x, theta) = reg.qubit(i);
            if theta == theta_tilde.get(i) {
                x
            } else {
                rng.gen::<bool>()
            }
        })
        .collect())
}

/// Projective single-qubit measurement along a Bloch direction.
///
/// Outcome `false` corresponds to the projector `(I + n·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection {
    /// Polar angle from +z.
    pub polar: f64,
    /// Azimuth from +x in the x–y plane.
    pub azimuth: f64,
}

impl BlochDirection {
    pub const COMPUTATIONAL: Self = Self { polar: 0.0, azimuth: 0.0 };
    pub const HADAMARD: Self = Self {
        polar: std::f64::consts::FRAC_PI_2,
        azimuth: 0.0,
    };
    /// Halfway between the computational and Hadamard bases in the x–z plane.
    pub const BREIDBART: Self = Self {
        polar: std::f64::consts::FRAC_PI_4,
        azimuth: 0.0,
    };

    pub fn vector(&self) -> [f64; 3] {
        [
            self.polar.sin() * self.azimuth.cos(),
            self.polar.sin() * self.azimuth.sin(),
            self.polar.cos(),
        ]
    }

    /// Rank-one projector for outcome `outcome`.
    pub fn projector(&self, outcome: bool) -> DensityOp {
        let [nx, ny, nz] = self.vector();
        let sign = if outcome { -1.0 } else { 1.0 };
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5 * (1.0 + sign * nz), 0.0),
                Complex64::new(0.5 * sign * nx, -0.5 * sign * ny),
                Complex64::new(0.5 * sign * nx, 0.5 * sign * ny),
                Complex64::new(0.5 * (1.0 - sign * nz), 0.0),
            ],
        );
        DensityOp { m }
    }
}

/// Probability that a BB84 qubit `(x, θ)` yields outcome `false` along `dir`.
pub fn outcome_zero_probability(x: bool, theta: bool, dir: BlochDirection) -> f64 {
    let s = bb84_bloch(x, theta);
    let n = dir.vector();
    0.5 * (1.0 + s[0] * n[0] + s[1] * n[1] + s[2] * n[2])
}

pub fn measure_qubit<R: Rng + ?Sized>(reg: &Bb84Register, i: usize, dir: BlochDirection, rng: &mut R) -> bool {
    let (x, theta) = reg.qubit(i);
    rng.gen::<f64>() >= outcome_zero_probability(x, theta, dir)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    m: DMatrix<Complex64>,
}

impl DensityOp {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let rho = DensityOp { m };
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_real(d: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::arg("entry count does not match dimension"));
        }
        let data: Vec<Complex64> = entries.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::new(DMatrix::from_row_slice(d, d, &data))
    }

    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::arg("zero state vector"));
        }
        let v = v / Complex64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::arg(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut m = DMatrix::zeros(d, d);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self::new(m)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0))
    }

    /// `H^θ |x⟩⟨x| H^θ`.
    pub fn bb84(x: bool, theta: bool) -> Self {
        let [sx, sy, sz] = bb84_bloch(x, theta);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5 * (1.0 + sz), 0.0),
                Complex64::new(0.5 * sx, -0.5 * sy),
                Complex64::new(0.5 * sx, 0.5 * sy),
                Complex64::new(0.5 * (1.0 - sz), 0.0),
            ],
        );
        DensityOp { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// `tr(A ρ)` for an operator `A` of matching dimension.
    pub fn expectation(&self, a: &DensityOp) -> f64 {
        (&a.m * &self.m).trace().re
    }

    fn validate(&self) -> Result<()> {
        let d = self.m.nrows();
        if d != self.m.ncols() {
            return Err(Error::arg("density operator must be square"));
        }
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::arg(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        let herm_err = (&self.m - self.m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > HERMITIAN_TOL {
            return Err(Error::arg(format!("not Hermitian (deviation {herm_err:e})")));
        }
        let tr = self.m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::arg(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitian_eigenvalues(&self.m).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::arg(format!("not positive semidefinite (eigenvalue {min_eig:e})")));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    // Symmetrise to kill roundoff before the Hermitian solver.
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// `r ρ + (1 − r) I/d`.
pub fn apply_depolarizing(rho: &DensityOp, r: f64) -> Result<DensityOp> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::arg(format!("depolarizing parameter {r} outside [0,1]")));
    }
    let d = rho.dim();
    let mixed = DMatrix::<Complex64>::identity(d, d) * Complex64::new((1.0 - r) / d as f64, 0.0);
    Ok(DensityOp {
        m: &rho.m * Complex64::new(r, 0.0) + mixed,
    })
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityOp, sigma: &DensityOp) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::arg(format!(
            "dimension mismatch: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(0.5 * trace_norm(&(&rho.m - &sigma.m)))
}

/// Optimal probability of identifying which of two states was prepared,
/// `½(1 + ‖p₀ρ₀ − (1−p₀)ρ₁‖₁)`.
pub fn helstrom_guess(rho0: &DensityOp, rho1: &DensityOp, p0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::arg(format!("prior {p0} outside [0,1]")));
    }
    if rho0.dim() != rho1.dim() {
        return Err(Error::arg(format!(
            "dimension mismatch: {} vs {}",
            rho0.dim(),
            rho1.dim()
        )));
    }
    let diff = &rho0.m * Complex64::new(p0, 0.0) - &rho1.m * Complex64::new(1.0 - p0, 0.0);
    Ok(0.5 * (1.0 + trace_norm(&diff)))
}

/// Joint distribution of a classical variable `X` and classical side
/// information `Q`, stored row-major as `P(x, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcState {
    nx: usize,
    nq: usize,
    p: Vec<f64>,
}

pub const CC_SUM_TOL: f64 = 1e-12;

impl CcState {
    pub fn new(nx: usize, nq: usize, p: Vec<f64>) -> Result<Self> {
        if nx == 0 || nq == 0 || p.len() != nx * nq {
            return Err(Error::arg(format!(
                "table of {} entries does not match {nx}×{nq}",
                p.len()
            )));
        }
        if let Some(bad) = p.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::arg(format!("negative or NaN probability {bad}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > CC_SUM_TOL {
            return Err(Error::arg(format!("probabilities sum to {total}")));
        }
        Ok(Self { nx, nq, p })
    }

    /// Builds a state from unnormalised non-negative weights.
    pub fn from_weights(nx: usize, nq: usize, w: Vec<f64>) -> Result<Self> {
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(Error::arg("weights must have positive sum"));
        }
        Self::new(nx, nq, w.into_iter().map(|v| v / total).collect())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    pub fn p(&self, x: usize, q: usize) -> f64 {
        self.p[x * self.nq + q]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.nx).map(|x| (0..self.nq).map(|q| self.p(x, q)).sum()).collect()
    }

    pub fn marginal_q(&self) -> Vec<f64> {
        (0..self.nq).map(|q| (0..self.nx).map(|x| self.p(x, q)).sum()).collect()
    }
}

/// `Σ_q max_x P(x, q)`.
pub fn guess_prob_classical(state: &CcState) -> f64 {
    (0..state.nq)
        .map(|q| (0..state.nx).map(|x| state.p(x, q)).fold(0.0, f64::max))
        .sum()
}
