//! Two-mode oscillator representation of the defocus generator.
//!
//! LG modes are eigenstates `|n₊, n₋⟩` of a 2D isotropic oscillator with
//! `l = n₊ − n₋` and `p = min(n₊, n₋)`. In that basis the dimensionless
//! transverse Laplacian reads
//!
//! `G̃ = (a₊ − a₋†)(a₊† − a₋) = n₊ + n₋ + 1 − a₊a₋ − a₊†a₋†`
//!
//! and the physical generator is `G = −G̃/(2 z_R)`, so the quantum Fisher
//! information of a pure state is `4·Var(G) = Var(G̃)/z_R²`.
//!
//! Field-space LG modes are identified with oscillator states as
//! `LG_{p,l} = (−1)^p |n₊, n₋⟩`; with that sign the matrix elements of G̃
//! reproduce those of the paraxial generator acting on the fields of
//! [`crate::beam`].

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beam::{LGIndex, ModeSuperposition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState {
    pub n_plus: u32,
    pub n_minus: u32,
}

impl FockState {
    pub const fn new(n_plus: u32, n_minus: u32) -> Self {
        Self { n_plus, n_minus }
    }

    pub fn total(&self) -> u32 {
        self.n_plus + self.n_minus
    }

    pub fn lg_index(&self) -> LGIndex {
        LGIndex::new(
            self.n_plus.min(self.n_minus),
            self.n_plus as i32 - self.n_minus as i32,
        )
    }

    /// Sign relating the field-space mode to the oscillator state.
    pub fn lg_sign(&self) -> f64 {
        if self.n_plus.min(self.n_minus).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

impl From<LGIndex> for FockState {
    fn from(idx: LGIndex) -> Self {
        let a = idx.abs_l();
        if idx.l >= 0 {
            Self::new(idx.p + a, idx.p)
        } else {
            Self::new(idx.p, idx.p + a)
        }
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.n_plus, self.n_minus)
    }
}

/// Fock-basis amplitudes of a mode superposition.
pub fn to_fock(state: &ModeSuperposition) -> Vec<(FockState, Complex64)> {
    state
        .terms()
        .iter()
        .map(|&(idx, c)| {
            let f = FockState::from(idx);
            (f, c * f.lg_sign())
        })
        .collect()
}

/// Inverse of [`to_fock`]; amplitudes below `1e-15` are dropped and the
/// result renormalized.
pub fn from_fock(amplitudes: &[(FockState, Complex64)]) -> Result<ModeSuperposition> {
    ModeSuperposition::normalized(
        amplitudes
            .iter()
            .filter(|(_, c)| c.norm() > 1e-15)
            .map(|&(f, c)| (f.lg_index(), c * f.lg_sign()))
            .collect(),
    )
}

/// Sparse real symmetric matrix of G̃ on all `|n₊, n₋⟩` with
/// `n₊ + n₋ ≤ cutoff`.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    cutoff: usize,
    basis: Vec<FockState>,
    index: HashMap<FockState, usize>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl GeneratorMatrix {
    pub fn new(cutoff: usize) -> Self {
        let basis: Vec<FockState> = (0..=cutoff as u32)
            .flat_map(|n| (0..=n).map(move |np| FockState::new(np, n - np)))
            .collect();
        let index: HashMap<FockState, usize> =
            basis.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let rows = basis
            .iter()
            .map(|&f| {
                let (np, nm) = (f64::from(f.n_plus), f64::from(f.n_minus));
                let mut row = vec![(index[&f], np + nm + 1.0)];
                // ⟨n₊−1, n₋−1| G̃ |n₊, n₋⟩ = −√(n₊n₋)
                if f.n_plus > 0 && f.n_minus > 0 {
                    let lower = FockState::new(f.n_plus - 1, f.n_minus - 1);
                    row.push((index[&lower], -(np * nm).sqrt()));
                }
                // ⟨n₊+1, n₋+1| G̃ |n₊, n₋⟩ = −√((n₊+1)(n₋+1))
                let upper = FockState::new(f.n_plus + 1, f.n_minus + 1);
                if let Some(&j) = index.get(&upper) {
                    row.push((j, -((np + 1.0) * (nm + 1.0)).sqrt()));
                }
                row.sort_by_key(|&(j, _)| j);
                row
            })
            .collect();
        Self {
            cutoff,
            basis,
            index,
            rows,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FockState] {
        &self.basis
    }

    pub fn index_of(&self, f: FockState) -> Option<usize> {
        self.index.get(&f).copied()
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// `⟨bra|G̃|ket⟩`; zero outside the truncated basis.
    pub fn element(&self, bra: FockState, ket: FockState) -> f64 {
        match (self.index_of(bra), self.index_of(ket)) {
            (Some(i), Some(j)) => self.rows[i]
                .iter()
                .find(|&&(c, _)| c == j)
                .map_or(0.0, |&(_, v)| v),
            _ => 0.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .all(|&(j, v)| self.rows[j].iter().any(|&(c, w)| c == i && w == v))
        })
    }

    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, v)| amplitudes[j] * v).sum())
            .collect()
    }

    fn dense(&self, state: &[(FockState, Complex64)]) -> Result<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dimension()];
        for &(f, c) in state {
            let required = f.total() as usize + 2;
            if required > self.cutoff {
                return Err(Error::CutoffTooSmall {
                    cutoff: self.cutoff,
                    required,
                });
            }
            v[self.index[&f]] += c;
        }
        Ok(v)
    }

    /// `⟨G̃⟩` and `⟨G̃²⟩ = ‖G̃ψ‖²` for a normalized Fock-basis state.
    pub fn moments(&self, state: &[(FockState, Complex64)]) -> Result<(f64, f64)> {
        let psi = self.dense(state)?;
        let g_psi = self.apply(&psi);
        let mean: f64 = psi.iter().zip(&g_psi).map(|(a, b)| (a.conj() * b).re).sum();
        let second: f64 = g_psi.iter().map(|c| c.norm_sqr()).sum();
        Ok((mean, second))
    }

    pub fn variance(&self, state: &[(FockState, Complex64)]) -> Result<f64> {
        let (mean, second) = self.moments(state)?;
        Ok(second - mean * mean)
    }
}

/// Builds the truncated generator; negative cutoffs are rejected.
pub fn build_generator(cutoff: i64) -> Result<GeneratorMatrix> {
    usize::try_from(cutoff)
        .map(GeneratorMatrix::new)
        .map_err(|_| Error::InvalidConfig(format!("cutoff must be non-negative, got {cutoff}")))
}

/// Smallest cutoff at which [`generator_variance`] is exact for `state`.
pub fn required_cutoff(state: &ModeSuperposition) -> usize {
    state.max_order() as usize + 2
}

/// `Var(G̃)` of the state; the quantum Fisher information is this divided
/// by z_R².
pub fn generator_variance(state: &ModeSuperposition, cutoff: usize) -> Result<f64> {
    GeneratorMatrix::new(cutoff).variance(&to_fock(state))
}

/// Point on the Hermite-Laguerre sphere with occupation numbers of the two
/// rotated oscillator modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HLIndex {
    pub n1: u32,
    pub n2: u32,
    pub theta: f64,
    pub phi: f64,
}

impl HLIndex {
    pub fn new(n1: u32, n2: u32, theta: f64, phi: f64) -> Self {
        Self { n1, n2, theta, phi }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Fock amplitudes of `(a₁†)^{n₁}(a₂†)^{n₂}|0,0⟩/√(n₁!n₂!)` with
///
/// `a₁† = e^{iφ/2}cos(θ/2) a₊† + e^{−iφ/2}sin(θ/2) a₋†`,
/// `a₂† = −e^{iφ/2}sin(θ/2) a₊† + e^{−iφ/2}cos(θ/2) a₋†`.
pub fn hl_fock_amplitudes(idx: &HLIndex) -> Vec<(FockState, Complex64)> {
    let (s, c) = (0.5 * idx.theta).sin_cos();
    let plus = Complex64::from_polar(1.0, 0.5 * idx.phi);
    let minus = plus.conj();
    let (alpha, beta) = (plus * c, minus * s);
    let (gamma, delta) = (-plus * s, minus * c);
    let total = idx.n1 + idx.n2;
    let prefactor = (factorial(idx.n1) * factorial(idx.n2)).sqrt().recip();

    (0..=total)
        .map(|m| {
            // j a₊† from the first factor, m − j from the second
            let lo = m.saturating_sub(idx.n2);
            let hi = m.min(idx.n1);
            let sum: Complex64 = (lo..=hi)
                .map(|j| {
                    let k = m - j;
                    alpha.powu(j)
                        * beta.powu(idx.n1 - j)
                        * gamma.powu(k)
                        * delta.powu(idx.n2 - k)
                        * (binomial(idx.n1, j) * binomial(idx.n2, k))
                })
                .sum();
            let ladder = (factorial(m) * factorial(total - m)).sqrt();
            (FockState::new(m, total - m), sum * ladder * prefactor)
        })
        .collect()
}

/// The Hermite-Laguerre mode as a superposition of LG modes.
pub fn hl_expand(idx: &HLIndex) -> ModeSuperposition {
    from_fock(&hl_fock_amplitudes(idx)).expect("rotated Fock state has unit norm")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    #[test]
    fn lg_fock_mapping_roundtrip() {
        for p in 0..5 {
            for l in -6..=6 {
                let idx = LGIndex::new(p, l);
                let f = FockState::from(idx);
                assert_eq!(f.lg_index(), idx);
                assert_eq!(f.n_plus as i32 - f.n_minus as i32, l);
            }
        }
    }

    #[test]
    fn matrix_structure() {
        let g = GeneratorMatrix::new(6);
        assert!(g.is_symmetric());
        assert_eq!(g.element(FockState::new(0, 0), FockState::new(0, 0)), 1.0);
        assert_eq!(g.element(FockState::new(2, 0), FockState::new(2, 0)), 3.0);
        assert!(
            (g.element(FockState::new(3, 1), FockState::new(2, 0)) + 3f64.sqrt()).abs() < 1e-15
        );
        for (i, &bra) in g.basis().iter().enumerate() {
            for &(j, v) in g.row(i) {
                let ket = g.basis()[j];
                assert_ne!(v, 0.0);
                assert_eq!(
                    bra.n_plus as i64 - bra.n_minus as i64,
                    ket.n_plus as i64 - ket.n_minus as i64
                );
            }
            assert_eq!(g.element(bra, bra), f64::from(bra.total() + 1));
        }
    }

    #[test]
    fn negative_cutoff_rejected() {
        assert!(build_generator(-1).is_err());
        assert_eq!(build_generator(0).unwrap().dimension(), 1);
        assert_eq!(build_generator(3).unwrap().dimension(), 10);
    }

    #[test]
    fn pure_state_variance() {
        for np in 0..6u32 {
            for nm in 0..6u32 {
                let f = FockState::new(np, nm);
                let s = ModeSuperposition::pure(f.lg_index());
                let v = generator_variance(&s, required_cutoff(&s)).unwrap();
                let expected = f64::from(2 * np * nm + np + nm + 1);
                assert!((v - expected).abs() < 1e-12 * expected);
            }
        }
    }

    #[test]
    fn hand_expanded_superpositions() {
        let s = ModeSuperposition::equal(&[LGIndex::new(0, 2), LGIndex::new(0, 0)]).unwrap();
        assert!((generator_variance(&s, 4).unwrap() - 3.0).abs() < 1e-14);
        let s = ModeSuperposition::equal(&[LGIndex::new(0, 1), LGIndex::new(0, 0)]).unwrap();
        assert!((generator_variance(&s, 3).unwrap() - 1.75).abs() < 1e-14);
    }

    #[test]
    fn clipping_is_an_error() {
        let s = ModeSuperposition::pure(LGIndex::new(1, 2));
        assert_eq!(
            generator_variance(&s, 5),
            Err(Error::CutoffTooSmall {
                cutoff: 5,
                required: 6
            })
        );
    }

    #[test]
    fn cutoff_beyond_requirement_is_exact() {
        let s = ModeSuperposition::normalized(vec![
            (LGIndex::new(0, 1), Complex64::new(1.0, 0.2)),
            (LGIndex::new(1, 1), Complex64::new(-0.4, 0.9)),
            (LGIndex::new(2, 1), Complex64::new(0.3, 0.0)),
        ])
        .unwrap();
        let base = generator_variance(&s, required_cutoff(&s)).unwrap();
        for extra in 1..6 {
            let v = generator_variance(&s, required_cutoff(&s) + extra).unwrap();
            assert_eq!(v, base);
        }
    }

    #[test]
    fn hl_poles_are_lg_modes() {
        let s = hl_expand(&HLIndex::new(1, 0, 0.0, 0.7));
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].0, LGIndex::new(0, 1));
        assert!((s.terms()[0].1.norm() - 1.0).abs() < 1e-15);
        let s = hl_expand(&HLIndex::new(2, 1, PI, 0.0));
        assert_eq!(s.as_pure(), Some(FockState::new(1, 2).lg_index()));
    }

    #[test]
    fn hl_equator_first_order() {
        let amps = hl_fock_amplitudes(&HLIndex::new(1, 0, FRAC_PI_2, 0.0));
        assert_eq!(amps.len(), 2);
        for (f, c) in amps {
            assert_eq!(f.total(), 1);
            assert!((c.re - FRAC_1_SQRT_2).abs() < 1e-15 && c.im.abs() < 1e-15);
        }
    }

    #[test]
    fn hl_expansion_is_normalized() {
        let mut k = 0.0;
        for n1 in 0..=6u32 {
            for n2 in 0..=(6 - n1) {
                k += 0.37;
                let idx = HLIndex::new(n1, n2, (k * 1.3) % PI, (k * 2.9) % (2.0 * PI));
                let norm: f64 = hl_fock_amplitudes(&idx)
                    .iter()
                    .map(|(_, c)| c.norm_sqr())
                    .sum();
                assert!((norm - 1.0).abs() < 1e-12, "{idx:?}: {norm}");
            }
        }
    }

    #[test]
    fn hl_variance_is_phi_independent() {
        for (n1, n2) in [(1, 0), (2, 1), (3, 1), (2, 2)] {
            let v0 = {
                let s = hl_expand(&HLIndex::new(n1, n2, 1.1, 0.0));
                generator_variance(&s, required_cutoff(&s)).unwrap()
            };
            for phi in [0.4, 2.0, 5.5] {
                let s = hl_expand(&HLIndex::new(n1, n2, 1.1, phi));
                let v = generator_variance(&s, required_cutoff(&s)).unwrap();
                assert!((v - v0).abs() < 1e-12 * v0);
            }
        }
    }

    #[test]
    fn global_phase_invariance() {
        let s = hl_expand(&HLIndex::new(2, 1, 0.9, 0.3));
        let v = generator_variance(&s, 7).unwrap();
        let w = generator_variance(&s.with_global_phase(1.234), 7).unwrap();
        assert!((v - w).abs() < 1e-13 * v);
    }

    #[test]
    fn variance_along_meridian() {
        // Var(G̃) = A + B·cos 2θ; at θ = π/2 the mode is HG_{n1,n2} with
        // Var = [(n1²+n1+1) + (n2²+n2+1)]/2.
        for n in 0..=4u32 {
            for n1 in 0..=n {
                let n2 = n - n1;
                let var_at = |theta: f64| {
                    let s = hl_expand(&HLIndex::new(n1, n2, theta, 0.0));
                    generator_variance(&s, required_cutoff(&s)).unwrap()
                };
                let pole = f64::from(2 * n1 * n2 + n1 + n2 + 1);
                let equator = f64::from(n1 * n1 + n1 + 1 + n2 * n2 + n2 + 1) / 2.0;
                assert!((var_at(0.0) - pole).abs() < 1e-12 * pole);
                assert!((var_at(PI) - pole).abs() < 1e-12 * pole);
                assert!((var_at(FRAC_PI_2) - equator).abs() < 1e-12 * equator);
                for k in 1..8 {
                    let theta = PI * f64::from(k) / 8.0;
                    let model =
                        0.5 * (pole + equator) + 0.5 * (pole - equator) * (2.0 * theta).cos();
                    assert!((var_at(theta) - model).abs() < 1e-12 * model);
                }
            }
        }
    }

    #[test]
    fn poles_win_only_with_both_quanta() {
        // LG beats HG when n1, n2 ≥ 1; for n2 = 0 and n1 ≥ 2 the HG mode wins.
        let var = |n1, n2, theta| {
            let s = hl_expand(&HLIndex::new(n1, n2, theta, 0.0));
            generator_variance(&s, required_cutoff(&s)).unwrap()
        };
        assert!(var(2, 1, 0.0) > var(2, 1, FRAC_PI_2));
        assert!(var(1, 1, 0.0) > var(1, 1, FRAC_PI_2));
        assert!(var(2, 0, FRAC_PI_2) > var(2, 0, 0.0));
        assert_eq!(var(1, 0, 0.0), 2.0);
    }
}
