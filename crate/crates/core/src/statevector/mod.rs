//! Dense state vectors over physical or logical qubits.
//!
//! Qubit 0 is the least significant bit of the basis index. Gate matrices
//! over targets `[t0, t1, ..]` use the same convention locally: `t0` is the
//! low bit of the row and column index. Nothing is renormalized implicitly.

mod kernels;

use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Outcome, ONE, ZERO};
use crate::error::{invalid, Error, Result};
use crate::rewrite::{GateMatrix, LogicalCircuit};
use crate::C64;

pub use kernels::pairwise_sum;

/// Largest number of qubits a state vector may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryCap {
    pub max_qubits: usize,
}

impl MemoryCap {
    pub fn qubits(max_qubits: usize) -> Self {
        Self { max_qubits }
    }

    /// Largest `k` with `2 * 16 * 2^k` bytes within available memory.
    pub fn from_available_memory() -> Self {
        let bytes = available_memory_bytes().unwrap_or(1 << 34);
        let amps = bytes / 32;
        let k = (usize::BITS - 1).saturating_sub(amps.max(1).leading_zeros()) as usize;
        Self { max_qubits: k }
    }

    pub fn check(&self, what: &str, k: usize) -> Result<()> {
        if k > self.max_qubits {
            return Err(Error::ResourceLimit {
                what: what.to_string(),
                required: k,
                cap: self.max_qubits,
            });
        }
        Ok(())
    }
}

impl Default for MemoryCap {
    fn default() -> Self {
        Self::from_available_memory()
    }
}

fn available_memory_bytes() -> Option<usize> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: usize = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Initial or final boundary of a register.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundarySpec {
    /// `|0...0>`.
    Physical,
    /// `(1,1)^T` on every qubit.
    Logical,
    /// One vector per qubit.
    Product(Vec<[C64; 2]>),
}

impl BoundarySpec {
    fn vectors(&self, k: usize) -> Result<Vec<[C64; 2]>> {
        Ok(match self {
            BoundarySpec::Physical => vec![[ONE, ZERO]; k],
            BoundarySpec::Logical => vec![[ONE, ONE]; k],
            BoundarySpec::Product(v) => {
                if v.len() != k {
                    return invalid(format!("boundary has {} vectors for {k} qubits", v.len()));
                }
                v.clone()
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    k: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn init(k: usize, boundary: &BoundarySpec, cap: MemoryCap) -> Result<Self> {
        cap.check("state vector", k)?;
        let vecs = boundary.vectors(k)?;
        let mut amps = vec![ONE; 1usize << k];
        if matches!(boundary, BoundarySpec::Physical) {
            amps.fill(ZERO);
            amps[0] = ONE;
        } else {
            for (q, v) in vecs.iter().enumerate() {
                kernels::apply_diagonal(&mut amps, v, &[q]);
            }
        }
        Ok(Self { k, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return invalid(format!("{} amplitudes is not a power of two", amps.len()));
        }
        Ok(Self {
            k: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_targets(&self, targets: &[usize], entries: usize) -> Result<()> {
        if targets.is_empty() {
            return invalid("gate needs at least one target");
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.k {
                return invalid(format!("target {t} out of range for {} qubits", self.k));
            }
            if targets[..i].contains(&t) {
                return invalid(format!("duplicate target {t}"));
            }
        }
        if entries != 1 << targets.len() {
            return invalid(format!(
                "{entries} entries do not match {} targets",
                targets.len()
            ));
        }
        Ok(())
    }

    /// Applies the row-major `2^j x 2^j` matrix `m` on `targets`.
    pub fn apply_gate(&mut self, m: &[C64], targets: &[usize]) -> Result<()> {
        let dim = 1usize << targets.len().min(20);
        if m.len() != dim * dim {
            return invalid(format!("matrix has {} entries, expected {}", m.len(), dim * dim));
        }
        self.check_targets(targets, dim)?;
        match *targets {
            [t] => kernels::apply_1q(&mut self.amps, m, t),
            [t0, t1] => kernels::apply_2q(&mut self.amps, m, t0, t1),
            _ => kernels::apply_dense(&mut self.amps, m, targets),
        }
        Ok(())
    }

    pub fn apply_diagonal(&mut self, d: &[C64], targets: &[usize]) -> Result<()> {
        self.check_targets(targets, d.len())?;
        kernels::apply_diagonal(&mut self.amps, d, targets);
        Ok(())
    }

    /// `<boundary|self>` with the boundary conjugated, summed with a fixed
    /// pairwise tree.
    pub fn project(&self, boundary: &BoundarySpec) -> Result<C64> {
        let vecs = boundary.vectors(self.k)?;
        if matches!(boundary, BoundarySpec::Physical) {
            return Ok(self.amps[0]);
        }
        let mut w = self.amps.clone();
        for (q, v) in vecs.iter().enumerate() {
            kernels::apply_diagonal(&mut w, &[v[0].conj(), v[1].conj()], &[q]);
        }
        Ok(pairwise_sum(&w))
    }

    const MAGIC: &'static [u8; 8] = b"TQSVEC01";

    /// Writes the 16-byte header (`TQSVEC01`, `u64` qubit count) and
    /// little-endian `(f64 re, f64 im)` pairs.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.k as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.amps.len());
        for a in &self.amps {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R, cap: MemoryCap) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..8] != Self::MAGIC {
            return invalid("not a state dump: bad magic");
        }
        let k = u64::from_le_bytes(header[8..].try_into().unwrap()) as usize;
        cap.check("state dump", k)?;
        let mut buf = vec![0u8; 16 << k];
        r.read_exact(&mut buf)?;
        let amps = buf
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(Self { k, amps })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Transversal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeStats {
    pub gate_count: usize,
    /// Qubits of the largest state held.
    pub peak_qubits: usize,
    /// Amplitudes of the largest state held, `2^peak_qubits`.
    pub peak_state_size: u64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeResult {
    pub value: C64,
    pub method: Method,
    pub stats: AmplitudeStats,
}

const CZ_DIAG: [C64; 4] = [ONE, ONE, ONE, C64::new(-1.0, 0.0)];

/// Evolves `|0...0>` through `c` on all physical qubits.
pub fn simulate(c: &Circuit, cap: MemoryCap) -> Result<StateVector> {
    let n = c.num_qubits();
    let mut s = StateVector::init(n, &BoundarySpec::Physical, cap)?;
    for g in &c.gates {
        match *g {
            Gate::Single {
                target, ref matrix, ..
            } => {
                let m: Vec<C64> = matrix.iter().flatten().copied().collect();
                s.apply_gate(&m, &[target])?;
            }
            Gate::Cz {
                control, target, ..
            } => s.apply_diagonal(&CZ_DIAG, &[control, target])?,
        }
    }
    Ok(s)
}

/// `<outcome|U_C|0>` by full state-vector evolution.
pub fn amplitude_direct(c: &Circuit, outcome: &Outcome, cap: MemoryCap) -> Result<AmplitudeResult> {
    let start = Instant::now();
    if outcome.len() != c.num_qubits() {
        return invalid(format!(
            "outcome has {} bits for {} qubits",
            outcome.len(),
            c.num_qubits()
        ));
    }
    cap.check("direct simulation", c.num_qubits())?;
    let s = simulate(c, cap)?;
    let value = s.amplitude(outcome.index()? as usize);
    Ok(AmplitudeResult {
        value,
        method: Method::Direct,
        stats: AmplitudeStats {
            gate_count: c.gates.len(),
            peak_qubits: c.num_qubits(),
            peak_state_size: 1u64 << c.num_qubits(),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

/// Runs a logical circuit: product input boundary, gates in order, output
/// projection, times the scalar factor.
pub fn amplitude_transversal(lc: &LogicalCircuit, cap: MemoryCap) -> Result<AmplitudeResult> {
    let start = Instant::now();
    cap.check("logical circuit", lc.k)?;
    let mut s = StateVector::init(lc.k, &BoundarySpec::Product(lc.input_boundary.clone()), cap)?;
    for g in &lc.gates {
        match &g.matrix {
            GateMatrix::Dense(m) => s.apply_gate(m, &g.targets)?,
            GateMatrix::Diagonal(d) => s.apply_diagonal(d, &g.targets)?,
        }
    }
    let value = s.project(&BoundarySpec::Product(lc.output_boundary.clone()))? * lc.scalar;
    Ok(AmplitudeResult {
        value,
        method: Method::Transversal,
        stats: AmplitudeStats {
            gate_count: lc.gates.len(),
            peak_qubits: lc.k,
            peak_state_size: 1u64 << lc.k,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}
