//! Gate-level simulator for polarization qubits: rotation/phase generators,
//! the Pauli and Hadamard decompositions, a CZ gate fed by the cross-phase
//! medium, measurement and text-program execution.
//!
//! Basis ordering: |V⟩ = |0⟩, |H⟩ = |1⟩; amplitude index is little-endian in
//! the qubit index (qubit k is bit k).

use rand::Rng;
use serde::Serialize;

use crate::detector::{click, DetectorParams, Outcome};
use crate::error::{Error, Result};
use crate::qmemory::{hold, store_qubit, PolarizationQubit};
use crate::scalar::{real, Real, C};

/// Dense-state-vector guard; 2^20 amplitudes is the desk-scale ceiling.
pub const MAX_QUBITS: usize = 20;

pub type Mat2<T> = [[C<T>; 2]; 2];

/// R(θ) = [[cosθ, −sinθ], [sinθ, cosθ]].
pub fn rotation<T: Real>(theta: T) -> Mat2<T> {
    let (s, c) = theta.sin_cos();
    let z = T::zero();
    [
        [C::new(c, z), C::new(-s, z)],
        [C::new(s, z), C::new(c, z)],
    ]
}

/// T(φ) = diag(1, e^{iφ}).
pub fn phase<T: Real>(phi: T) -> Mat2<T> {
    let zero = C::new(T::zero(), T::zero());
    [
        [C::new(T::one(), T::zero()), zero],
        [zero, C::from_polar(T::one(), phi)],
    ]
}

pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[C::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_scale<T: Real>(f: C<T>, a: &Mat2<T>) -> Mat2<T> {
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * f;
        }
    }
    out
}

/// Largest entry-wise deviation between two gates.
pub fn mat_distance<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> T {
    let mut d = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// Deviation of U†U from the identity.
pub fn unitarity_defect<T: Real>(a: &Mat2<T>) -> T {
    let mut d = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C::new(T::zero(), T::zero());
            for k in 0..2 {
                acc = acc + a[k][i].conj() * a[k][j];
            }
            let target = if i == j { T::one() } else { T::zero() };
            d = d.max((acc - C::new(target, T::zero())).norm());
        }
    }
    d
}

pub fn pauli_x<T: Real>() -> Mat2<T> {
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    [[zero, one], [one, zero]]
}

pub fn pauli_y<T: Real>() -> Mat2<T> {
    let zero = C::new(T::zero(), T::zero());
    let i = C::new(T::zero(), T::one());
    [[zero, -i], [i, zero]]
}

pub fn pauli_z<T: Real>() -> Mat2<T> {
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    [[one, zero], [zero, -one]]
}

pub fn hadamard<T: Real>() -> Mat2<T> {
    let s = C::new(T::FRAC_1_SQRT_2(), T::zero());
    [[s, s], [s, -s]]
}

/// The named gates built from their R/T decompositions:
/// X = R(π/2)T(π), Y = e^{iπ/2}R(π/2), Z = T(π), H = R(π/4)T(π).
pub fn decomposed_x<T: Real>() -> Mat2<T> {
    mat_mul(&rotation(T::FRAC_PI_2()), &phase(T::PI()))
}

pub fn decomposed_y<T: Real>() -> Mat2<T> {
    mat_scale(C::from_polar(T::one(), T::FRAC_PI_2()), &rotation(T::FRAC_PI_2()))
}

pub fn decomposed_z<T: Real>() -> Mat2<T> {
    phase(T::PI())
}

pub fn decomposed_h<T: Real>() -> Mat2<T> {
    mat_mul(&rotation(T::FRAC_PI_4()), &phase(T::PI()))
}

/// n-qubit state over {|V⟩, |H⟩}^⊗n with a running post-selection
/// probability for lossy elements.
#[derive(Debug, Clone, Serialize)]
pub struct CircuitState<T> {
    pub amplitudes: Vec<C<T>>,
    pub n_qubits: usize,
    pub success_prob: T,
}

impl<T: Real> CircuitState<T> {
    /// |V…V⟩.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::dimension(format!(
                "qubit count must lie in 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![C::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = C::new(T::one(), T::zero());
        Ok(CircuitState {
            amplitudes,
            n_qubits,
            success_prob: T::one(),
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<C<T>>) -> Result<Self> {
        let n = amplitudes.len();
        if !n.is_power_of_two() || n < 2 || n > (1 << MAX_QUBITS) {
            return Err(Error::dimension(
                "amplitude vector length must be 2^n with 1 <= n <= 20",
            ));
        }
        let state = CircuitState {
            n_qubits: n.trailing_zeros() as usize,
            amplitudes,
            success_prob: T::one(),
        };
        state.validate()?;
        Ok(state)
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if (self.norm_sqr() - T::one()).abs() > real(1e-9) {
            return Err(Error::invalid("state norm is not 1 within 1e-9"));
        }
        Ok(())
    }

    fn check_qubit(&self, k: usize) -> Result<()> {
        if k >= self.n_qubits {
            return Err(Error::dimension(format!(
                "qubit {k} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Apply a single-qubit gate to qubit k.
    pub fn apply_single(&mut self, gate: &Mat2<T>, k: usize) -> Result<()> {
        self.check_qubit(k)?;
        let bit = 1usize << k;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = gate[0][0] * a0 + gate[0][1] * a1;
                self.amplitudes[i | bit] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
        Ok(())
    }

    /// CZ(φ): multiplies the |HH⟩ component of qubits (a, b) by e^{iφ}.
    pub fn apply_cz(&mut self, phi: T, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::dimension("CZ needs two distinct qubits"));
        }
        let mask = (1usize << a) | (1usize << b);
        let f = C::from_polar(T::one(), phi);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = *amp * f;
            }
        }
        Ok(())
    }

    pub fn apply_global_phase(&mut self, phi: T) {
        let f = C::from_polar(T::one(), phi);
        for amp in self.amplitudes.iter_mut() {
            *amp = *amp * f;
        }
    }

    /// Probability that qubit k reads |V⟩.
    pub fn prob_vertical(&self, k: usize) -> Result<T> {
        self.check_qubit(k)?;
        let bit = 1usize << k;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project qubit k onto |V⟩ (bit 0) or |H⟩ (bit 1) and renormalize.
    pub fn collapse(&mut self, k: usize, horizontal: bool) -> Result<()> {
        self.check_qubit(k)?;
        let bit = 1usize << k;
        let keep = if horizontal { bit } else { 0 };
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & bit != keep {
                *amp = C::new(T::zero(), T::zero());
            }
        }
        let n = self.norm_sqr().sqrt();
        if !(n > T::zero()) {
            return Err(Error::precondition("collapse onto zero-probability branch"));
        }
        for amp in self.amplitudes.iter_mut() {
            *amp = amp.scale(n.recip());
        }
        Ok(())
    }

    /// Effective single-qubit marginal (V/H view of qubit k): reduced
    /// density matrix purity tr ρ².
    pub fn reduced_purity(&self, k: usize) -> Result<T> {
        self.check_qubit(k)?;
        let bit = 1usize << k;
        let mut r00 = T::zero();
        let mut r11 = T::zero();
        let mut r01 = C::new(T::zero(), T::zero());
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                r00 = r00 + a0.norm_sqr();
                r11 = r11 + a1.norm_sqr();
                r01 = r01 + a0 * a1.conj();
            }
        }
        Ok(r00 * r00 + r11 * r11 + real::<T>(2.0) * r01.norm_sqr())
    }
}

/// One delay-line / vapor-cell hold on a single qubit's photon: the qubit
/// amplitudes are untouched (common-mode decay), the post-selection success
/// probability picks up the stored-photon survival factor e^{−2γ_R t}.
pub fn memory_delay<T: Real>(
    state: &mut CircuitState<T>,
    qubit: usize,
    t: T,
    gamma_r: T,
) -> Result<()> {
    state.check_qubit(qubit)?;
    let stored = store_qubit(&PolarizationQubit::vertical(), T::zero(), gamma_r)?;
    let held = hold(&stored, t)?;
    state.success_prob = state.success_prob * held.norm_remaining;
    Ok(())
}

/// Where a CZ instruction takes its phase from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CzPhase<T> {
    Explicit(T),
    /// Resolved at run time from the cross-phase medium.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Instruction<T> {
    Rotation { qubit: usize, theta: T },
    Phase { qubit: usize, phi: T },
    GlobalPhase { phi: T },
    Cz { a: usize, b: usize, phi: CzPhase<T> },
    Measure { qubit: usize },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct GateProgram<T> {
    pub instructions: Vec<Instruction<T>>,
}

impl<T: Real> GateProgram<T> {
    /// Line-oriented program text: `R k theta`, `T k phi`, `G phi`,
    /// `CZ j k [phi|auto]`, `M k`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut instructions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::parse(format!("line {}: {msg}: {raw}", lineno + 1));
            let qubit = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| bad("bad qubit index"))
            };
            let angle = |s: &str| -> Result<T> {
                s.parse::<f64>()
                    .map(real)
                    .map_err(|_| bad("bad angle"))
            };
            let instr = match (fields[0], fields.len()) {
                ("R", 3) => Instruction::Rotation {
                    qubit: qubit(fields[1])?,
                    theta: angle(fields[2])?,
                },
                ("T", 3) => Instruction::Phase {
                    qubit: qubit(fields[1])?,
                    phi: angle(fields[2])?,
                },
                ("G", 2) => Instruction::GlobalPhase {
                    phi: angle(fields[1])?,
                },
                ("CZ", 3) => Instruction::Cz {
                    a: qubit(fields[1])?,
                    b: qubit(fields[2])?,
                    phi: CzPhase::Explicit(T::PI()),
                },
                ("CZ", 4) => Instruction::Cz {
                    a: qubit(fields[1])?,
                    b: qubit(fields[2])?,
                    phi: if fields[3] == "auto" {
                        CzPhase::Auto
                    } else {
                        CzPhase::Explicit(angle(fields[3])?)
                    },
                },
                ("M", 2) => Instruction::Measure {
                    qubit: qubit(fields[1])?,
                },
                _ => return Err(bad("unrecognized instruction")),
            };
            instructions.push(instr);
        }
        Ok(GateProgram { instructions })
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for instr in &self.instructions {
            let check = |k: usize| -> Result<()> {
                if k >= n_qubits {
                    return Err(Error::dimension(format!(
                        "qubit {k} out of range for {n_qubits} qubits"
                    )));
                }
                Ok(())
            };
            match instr {
                Instruction::Rotation { qubit, .. }
                | Instruction::Phase { qubit, .. }
                | Instruction::Measure { qubit } => check(*qubit)?,
                Instruction::Cz { a, b, .. } => {
                    check(*a)?;
                    check(*b)?;
                    if a == b {
                        return Err(Error::dimension("CZ needs two distinct qubits"));
                    }
                }
                Instruction::GlobalPhase { .. } => {}
            }
        }
        Ok(())
    }

    /// Highest qubit index referenced, plus one.
    pub fn width(&self) -> usize {
        let mut max = 0;
        for instr in &self.instructions {
            let m = match instr {
                Instruction::Rotation { qubit, .. }
                | Instruction::Phase { qubit, .. }
                | Instruction::Measure { qubit } => *qubit,
                Instruction::Cz { a, b, .. } => (*a).max(*b),
                Instruction::GlobalPhase { .. } => 0,
            };
            max = max.max(m);
        }
        max + 1
    }
}

/// Execution environment: how `auto` CZ phases resolve and whether
/// measurements run through the shelving-detector model.
pub struct RunContext<'a, T, R: Rng> {
    pub auto_cz_phase: Option<T>,
    pub detector: Option<&'a DetectorParams<T>>,
    pub rng: &'a mut R,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub outcomes: Vec<Outcome>,
}

/// Execute a program on an initial state.
pub fn run<T: Real, R: Rng>(
    program: &GateProgram<T>,
    initial: &CircuitState<T>,
    ctx: &mut RunContext<'_, T, R>,
) -> Result<(CircuitState<T>, RunRecord)> {
    program.validate(initial.n_qubits)?;
    initial.validate()?;
    let mut state = initial.clone();
    let mut outcomes = Vec::new();
    for instr in &program.instructions {
        match instr {
            Instruction::Rotation { qubit, theta } => {
                state.apply_single(&rotation(*theta), *qubit)?
            }
            Instruction::Phase { qubit, phi } => state.apply_single(&phase(*phi), *qubit)?,
            Instruction::GlobalPhase { phi } => state.apply_global_phase(*phi),
            Instruction::Cz { a, b, phi } => {
                let angle = match phi {
                    CzPhase::Explicit(v) => *v,
                    CzPhase::Auto => ctx.auto_cz_phase.ok_or_else(|| {
                        Error::precondition("CZ auto phase requested but no source configured")
                    })?,
                };
                state.apply_cz(angle, *a, *b)?;
            }
            Instruction::Measure { qubit } => {
                let p_v = state.prob_vertical(*qubit)?;
                let draw: f64 = ctx.rng.gen();
                let horizontal = !(real::<T>(draw) < p_v);
                state.collapse(*qubit, horizontal)?;
                let outcome = match ctx.detector {
                    None => {
                        if horizontal {
                            Outcome::H
                        } else {
                            Outcome::V
                        }
                    }
                    Some(d) => {
                        if click(d, true, ctx.rng)? {
                            if horizontal {
                                Outcome::H
                            } else {
                                Outcome::V
                            }
                        } else {
                            Outcome::None
                        }
                    }
                };
                outcomes.push(outcome);
            }
        }
    }
    Ok((state, RunRecord { outcomes }))
}

/// Trial results as CSV: `trial,outcome_1,…,outcome_m,success_prob`.
pub fn results_csv<T: Real>(rows: &[(Vec<Outcome>, T)]) -> String {
    let m = rows.iter().map(|(o, _)| o.len()).max().unwrap_or(0);
    let mut out = String::from("trial");
    for i in 1..=m {
        out.push_str(&format!(",outcome_{i}"));
    }
    out.push_str(",success_prob\n");
    for (trial, (outcomes, p)) in rows.iter().enumerate() {
        out.push_str(&format!("{trial}"));
        for i in 0..m {
            match outcomes.get(i) {
                Some(o) => out.push_str(&format!(",{o}")),
                None => out.push(','),
            }
        }
        out.push_str(&format!(",{p:.11e}\n"));
    }
    out
}
