//! Dense state-vector reference implementation.
//!
//! Everything here works directly on amplitude vectors from the letter
//! definitions (`X` flips a bit, `Z` applies `(-1)^bit`, `Y = iXZ`), never
//! through the symplectic arithmetic, so it can serve as an independent
//! cross-check of the group engine. Only practical for a handful of qubits.

use num_complex::Complex64;
use rand::Rng;

use crate::dynamics::LocalGate;
use crate::group::StabilizerState;
use crate::pauli::SignedPauli;

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Applies a signed Pauli to an amplitude vector.
///
/// Basis index bit `k` is the computational state of qubit `k`.
pub fn apply_pauli(p: &SignedPauli, psi: &[Complex64]) -> Vec<Complex64> {
    let dim = 1usize << p.n();
    assert_eq!(psi.len(), dim, "vector length must be 2^n");
    let x = p.x_bits() as usize;
    let z = p.z_bits();
    let y_count = (p.x_bits() & p.z_bits()).count_ones();
    let base = I_POWERS[((p.phase() as u32 + y_count) & 3) as usize];
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (b, amp) in psi.iter().enumerate() {
        let minus = (b as u64 & z).count_ones() & 1;
        let coeff = if minus == 1 { -base } else { base };
        out[b ^ x] += coeff * amp;
    }
    out
}

/// `⟨psi| P |psi⟩`.
pub fn expectation(p: &SignedPauli, psi: &[Complex64]) -> Complex64 {
    let applied = apply_pauli(p, psi);
    psi.iter().zip(applied.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// A normalized vector stabilized by every generator of `state`, obtained by
/// projecting a random vector through `(I + g)/2` for each generator.
pub fn stabilizer_vector<R: Rng + ?Sized>(state: &StabilizerState, rng: &mut R) -> Vec<Complex64> {
    let dim = 1usize << state.n();
    loop {
        let mut psi: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        for g in state.generators() {
            let gp = apply_pauli(g, &psi);
            for (a, b) in psi.iter_mut().zip(gp.iter()) {
                *a = (*a + b) * 0.5;
            }
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for a in psi.iter_mut() {
                *a /= norm;
            }
            return psi;
        }
        // rank-deficient direction drawn by bad luck; try another start vector
    }
}

/// Projects onto the ±1 eigenspace of the single-qubit `letter` at column
/// `k`, returning the unnormalized vector and its squared norm.
pub fn project_single(
    psi: &[Complex64],
    n: usize,
    k: usize,
    letter: crate::pauli::Letter,
    sign: crate::pauli::Sign,
) -> (Vec<Complex64>, f64) {
    let op = SignedPauli::single(n, k, letter).with_sign(sign);
    let applied = apply_pauli(&op, psi);
    let projected: Vec<Complex64> = psi
        .iter()
        .zip(applied.iter())
        .map(|(a, b)| (a + b) * 0.5)
        .collect();
    let norm_sqr = projected.iter().map(|a| a.norm_sqr()).sum();
    (projected, norm_sqr)
}

pub fn normalized(psi: &[Complex64]) -> Vec<Complex64> {
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.iter().map(|a| a / norm).collect()
}

/// Applies a single-qubit gate at qubit `k`.
pub fn apply_local_gate(gate: LocalGate, k: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let dim = psi.len();
    let bit = 1usize << k;
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for (b, amp) in psi.iter().enumerate() {
        match gate {
            LocalGate::H => {
                let s = if b & bit != 0 { -1.0 } else { 1.0 };
                out[b & !bit] += amp * inv_sqrt2;
                out[b | bit] += amp * s * inv_sqrt2;
            }
            LocalGate::S => {
                out[b] += if b & bit != 0 { amp * Complex64::new(0.0, 1.0) } else { *amp };
            }
            LocalGate::X => out[b ^ bit] += amp,
            LocalGate::Y => {
                let c = if b & bit != 0 {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(0.0, 1.0)
                };
                out[b ^ bit] += amp * c;
            }
            LocalGate::Z => {
                out[b] += if b & bit != 0 { -amp } else { *amp };
            }
        }
    }
    out
}

/// Applies a CZ gate between qubits `a` and `b`.
pub fn apply_cz_gate(a: usize, b: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let (ba, bb) = (1usize << a, 1usize << b);
    psi.iter()
        .enumerate()
        .map(|(idx, amp)| if idx & ba != 0 && idx & bb != 0 { -amp } else { *amp })
        .collect()
}
