use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Amplitude, QubitId, Rotation, SimError};

/// Amplitudes with magnitude below this are dropped.
pub const DEFAULT_PRUNE: f64 = 1e-12;

/// Basis keys are packed into a `u64`, one bit per live qubit.
pub const MAX_LIVE_QUBITS: usize = 64;

/// Squared mass below which a stray ancilla component counts as rounding
/// noise rather than a broken circuit.
const STRAY_MASS_TOL: f64 = 1e-9;

/// Assignment of a boolean to every allocated qubit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(pub BTreeMap<QubitId, bool>);

impl BasisState {
    pub fn get(&self, q: QubitId) -> Option<bool> {
        self.0.get(&q).copied()
    }
}

impl FromIterator<(QubitId, bool)> for BasisState {
    fn from_iter<I: IntoIterator<Item = (QubitId, bool)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Sparse pure state over the currently allocated qubits.
///
/// Each allocated qubit owns one bit position of the packed basis key.
/// Positions are recycled after release, ids never are, so releasing an
/// ancilla does not renumber any other qubit.
#[derive(Clone, Debug)]
pub struct StateVector {
    /// Sorted by key, keys unique.
    terms: Vec<(u64, Amplitude)>,
    slots: BTreeMap<QubitId, u32>,
    used: u64,
    next_id: u64,
    prune: f64,
}

impl Default for StateVector {
    fn default() -> Self {
        Self::new()
    }
}

impl StateVector {
    /// The vacuum: no qubits, a single unit amplitude.
    pub fn new() -> Self {
        Self::with_prune(DEFAULT_PRUNE)
    }

    pub fn with_prune(prune: f64) -> Self {
        Self {
            terms: vec![(0, Complex64::new(1.0, 0.0))],
            slots: BTreeMap::new(),
            used: 0,
            next_id: 0,
            prune,
        }
    }

    pub fn allocated(&self) -> Vec<QubitId> {
        self.slots.keys().copied().collect()
    }

    pub fn is_allocated(&self, q: QubitId) -> bool {
        self.slots.contains_key(&q)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn norm(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    fn mask(&self, q: QubitId) -> Result<u64, SimError> {
        self.slots
            .get(&q)
            .map(|s| 1u64 << s)
            .ok_or(SimError::UnallocatedQubit(q))
    }

    /// Allocates a fresh qubit in basis state `init`, extending every term.
    pub fn alloc(&mut self, init: bool) -> Result<QubitId, SimError> {
        if self.used == u64::MAX {
            return Err(SimError::TooManyQubits);
        }
        let slot = self.used.trailing_ones();
        let bit = 1u64 << slot;
        let id = QubitId(self.next_id);
        self.next_id += 1;
        self.used |= bit;
        self.slots.insert(id, slot);
        if init {
            // the new bit is clear in every key, so order is preserved
            for (k, _) in &mut self.terms {
                *k |= bit;
            }
        }
        Ok(id)
    }

    /// Removes `q` from the register.
    ///
    /// With `expected = Some(v)` the qubit must read `v` in every term; with
    /// `None` it must be in some definite basis state. Components violating
    /// this with total squared mass below 1e-9 are projected away; anything
    /// larger is an error. Returns the value the qubit held.
    pub fn release(&mut self, q: QubitId, expected: Option<bool>) -> Result<bool, SimError> {
        let bit = self.mask(q)?;
        let mass_one: f64 = self
            .terms
            .iter()
            .filter(|(k, _)| *k & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let total = self.norm();
        let value = expected.unwrap_or(mass_one > total / 2.0);
        let stray = if value { total - mass_one } else { mass_one };
        if stray > STRAY_MASS_TOL {
            return Err(match expected {
                Some(_) => SimError::AncillaNotReturned(q),
                None => SimError::NotInBasisState(q),
            });
        }
        let keep = if value { bit } else { 0 };
        self.terms.retain(|(k, _)| k & bit == keep);
        for (k, _) in &mut self.terms {
            *k &= !bit;
        }
        if stray > 0.0 {
            self.renormalize();
        }
        self.used &= !bit;
        self.slots.remove(&q);
        Ok(value)
    }

    fn control_masks(&self, controls: &[(QubitId, bool)]) -> Result<(u64, u64), SimError> {
        let mut mask = 0;
        let mut want = 0;
        for &(q, v) in controls {
            let b = self.mask(q)?;
            mask |= b;
            if v {
                want |= b;
            }
        }
        Ok((mask, want))
    }

    /// Applies `r` to `q` on the terms where every control has its listed value.
    pub fn apply_rotation(
        &mut self,
        q: QubitId,
        r: &Rotation,
        controls: &[(QubitId, bool)],
    ) -> Result<(), SimError> {
        let bit = self.mask(q)?;
        if controls.iter().any(|&(c, _)| c == q) {
            return Err(SimError::ControlTouchedByBranch(q));
        }
        let (cmask, cwant) = self.control_masks(controls)?;
        let m = r.matrix();
        let selected = |k: u64| k & cmask == cwant;
        let zero = Complex64::ZERO;
        if m[0][1] == zero && m[1][0] == zero {
            for (k, a) in self.terms.iter_mut().filter(|(k, _)| selected(*k)) {
                let col = usize::from(*k & bit != 0);
                *a *= m[col][col];
            }
            return Ok(());
        }
        if m[0][0] == zero && m[1][1] == zero {
            // a permutation of keys: k and k ^ bit are selected together
            for (k, a) in self.terms.iter_mut().filter(|(k, _)| selected(*k)) {
                let col = usize::from(*k & bit != 0);
                *a *= m[1 - col][col];
                *k ^= bit;
            }
            self.terms.sort_unstable_by_key(|&(k, _)| k);
            return Ok(());
        }
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for &(k, a) in &self.terms {
            if !selected(k) {
                out.push((k, a));
                continue;
            }
            let col = usize::from(k & bit != 0);
            let base = k & !bit;
            out.push((base, m[0][col] * a));
            out.push((base | bit, m[1][col] * a));
        }
        out.sort_unstable_by_key(|&(k, _)| k);
        // at most two contributions per key, and addition commutes, so the
        // merge is independent of how the sort ordered equal keys
        let mut merged: Vec<(u64, Amplitude)> = Vec::with_capacity(out.len());
        for (k, a) in out {
            match merged.last_mut() {
                Some((lk, la)) if *lk == k => *la += a,
                _ => merged.push((k, a)),
            }
        }
        let prune = self.prune;
        merged.retain(|(_, a)| a.norm() >= prune);
        self.terms = merged;
        Ok(())
    }

    pub fn apply_swap(
        &mut self,
        a: QubitId,
        b: QubitId,
        controls: &[(QubitId, bool)],
    ) -> Result<(), SimError> {
        let (ba, bb) = (self.mask(a)?, self.mask(b)?);
        if a == b {
            return Err(SimError::SwapSameQubit(a));
        }
        if let Some(&(c, _)) = controls.iter().find(|&&(c, _)| c == a || c == b) {
            return Err(SimError::ControlTouchedByBranch(c));
        }
        let (cmask, cwant) = self.control_masks(controls)?;
        for (k, _) in &mut self.terms {
            let differ = (*k & ba != 0) != (*k & bb != 0);
            if *k & cmask == cwant && differ {
                *k ^= ba ^ bb;
            }
        }
        self.terms.sort_unstable_by_key(|&(k, _)| k);
        Ok(())
    }

    /// Squared-amplitude mass of the terms where `q` reads `value`.
    pub fn probability(&self, q: QubitId, value: bool) -> Result<f64, SimError> {
        let bit = self.mask(q)?;
        let want = if value { bit } else { 0 };
        Ok(self
            .terms
            .iter()
            .filter(|(k, _)| *k & bit == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Keeps the terms where `q` reads `value` and renormalizes.
    pub fn collapse(&mut self, q: QubitId, value: bool) -> Result<(), SimError> {
        let bit = self.mask(q)?;
        let want = if value { bit } else { 0 };
        self.terms.retain(|(k, _)| k & bit == want);
        self.renormalize();
        Ok(())
    }

    /// Measures `q` using a uniform sample `u ∈ [0, 1)`: the outcome is
    /// `true` iff `u < P(q = 1)`.
    pub fn measure(&mut self, q: QubitId, u: f64) -> Result<bool, SimError> {
        let p1 = self.probability(q, true)?;
        let outcome = u < p1;
        self.collapse(q, outcome)?;
        Ok(outcome)
    }

    fn renormalize(&mut self) {
        let n = self.norm().sqrt();
        if n > 0.0 {
            for (_, a) in &mut self.terms {
                *a /= n;
            }
        }
    }

    fn lookup(&self, key: u64) -> Option<Amplitude> {
        self.terms
            .binary_search_by_key(&key, |&(k, _)| k)
            .ok()
            .map(|i| self.terms[i].1)
    }

    fn key_of(&self, basis: &BasisState) -> Option<u64> {
        if basis.0.len() != self.slots.len() {
            return None;
        }
        let mut key = 0;
        for (q, &v) in &basis.0 {
            let slot = self.slots.get(q)?;
            if v {
                key |= 1 << slot;
            }
        }
        Some(key)
    }

    fn basis_of(&self, key: u64) -> BasisState {
        self.slots
            .iter()
            .map(|(&q, &s)| (q, key & (1 << s) != 0))
            .collect()
    }

    /// Amplitude of a basis configuration (zero if absent or if `basis` does
    /// not cover exactly the allocated register).
    pub fn amplitude(&self, basis: &BasisState) -> Amplitude {
        self.key_of(basis)
            .and_then(|k| self.lookup(k))
            .unwrap_or_default()
    }

    /// Nonzero terms in a deterministic order.
    pub fn terms(&self) -> impl Iterator<Item = (BasisState, Amplitude)> + '_ {
        self.terms.iter().map(|&(k, a)| (self.basis_of(k), a))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude, SimError> {
        if self.allocated() != other.allocated() {
            return Err(SimError::MismatchedRegisters);
        }
        let mut acc = Complex64::ZERO;
        for (k, a) in &self.terms {
            let basis = self.basis_of(*k);
            if let Some(b) = other.key_of(&basis).and_then(|kb| other.lookup(kb)) {
                acc += a.conj() * b;
            }
        }
        Ok(acc)
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, SimError> {
        Ok(self.inner(other)?.norm_sqr())
    }
}
