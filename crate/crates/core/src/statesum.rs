//! Kauffman state enumeration and resolution of a cut tangle into a
//! crossingless boundary matching plus interior loop count.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::classify::{classify, EmbeddingViolation};
use crate::diagram::{ArcLabel, CutTangle, Slot};
use crate::poly::{normalize_census, writhe_prefactor, FlatValue, LaurentPoly};

/// Hard ceiling on exact 2^n enumeration unless overridden.
pub const DEFAULT_STATE_CAP: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    A,
    B,
}

/// One choice of smoothing per classical crossing. States are ordered by
/// binary counting with crossing 0 as the most significant bit and A = 0,
/// so `State::from_index(n, k)` for k = 0..2^n walks AA..A, AA..B, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct State {
    n: usize,
    bits: u64,
}

impl State {
    pub fn from_index(n: usize, index: u64) -> State {
        debug_assert!(n == 64 || index < (1u64 << n));
        State { n, bits: index }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn smoothing(&self, crossing: usize) -> Smoothing {
        debug_assert!(crossing < self.n);
        if (self.bits >> (self.n - 1 - crossing)) & 1 == 0 {
            Smoothing::A
        } else {
            Smoothing::B
        }
    }

    /// Number of A-smoothings.
    pub fn alpha(&self) -> u32 {
        self.n as u32 - self.beta()
    }

    /// Number of B-smoothings.
    pub fn beta(&self) -> u32 {
        self.bits.count_ones()
    }

    /// alpha(s) - beta(s), the exponent of `a` this state contributes.
    pub fn exponent(&self) -> i64 {
        i64::from(self.alpha()) - i64::from(self.beta())
    }

    pub fn bitstring(&self) -> String {
        (0..self.n)
            .map(|i| match self.smoothing(i) {
                Smoothing::A => '0',
                Smoothing::B => '1',
            })
            .collect()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{crossings} crossings exceed the state cap {cap} (2^n states)")]
pub struct StateCapExceeded {
    pub crossings: usize,
    pub cap: u32,
}

/// All 2^n states in deterministic order.
pub fn enumerate_states(
    n: usize,
    cap: u32,
) -> Result<impl ExactSizeIterator<Item = State>, StateCapExceeded> {
    if n as u32 > cap {
        return Err(StateCapExceeded { crossings: n, cap });
    }
    Ok((0..(1u64 << n)).map(move |k| State::from_index(n, k)))
}

/// A fully smoothed tangle: perfect matching on the boundary slots plus the
/// number of closed circles inside the rectangle (free loops included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothedState {
    matching: BTreeMap<Slot, Slot>,
    pub interior_loops: u32,
}

impl SmoothedState {
    pub fn new(pairs: impl IntoIterator<Item = (Slot, Slot)>, interior_loops: u32) -> Self {
        let mut matching = BTreeMap::new();
        for (a, b) in pairs {
            assert!(a != b, "matching must be fixed-point-free");
            matching.insert(a, b);
            matching.insert(b, a);
        }
        SmoothedState {
            matching,
            interior_loops,
        }
    }

    pub fn partner(&self, slot: Slot) -> Option<Slot> {
        self.matching.get(&slot).copied()
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        self.matching.keys().copied()
    }

    /// Edges with each pair listed once.
    pub fn edges(&self) -> Vec<(Slot, Slot)> {
        self.matching
            .iter()
            .filter(|(a, b)| *a < b)
            .map(|(&a, &b)| (a, b))
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Smooth every crossing per the state and trace the joined arc chains.
/// A joins p0-p1 and p2-p3, B joins p0-p3 and p1-p2. Chains with both ends
/// on the boundary become matching edges; closed chains count as loops.
pub fn resolve_state(tangle: &CutTangle, state: &State) -> SmoothedState {
    assert_eq!(state.len(), tangle.crossings.len());

    let labels = tangle.arc_labels();
    let index: BTreeMap<ArcLabel, usize> =
        labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut uf = UnionFind::new(labels.len());

    for (i, c) in tangle.crossings.iter().enumerate() {
        let s = &c.slots;
        let joins = match state.smoothing(i) {
            Smoothing::A => [(s[0], s[1]), (s[2], s[3])],
            Smoothing::B => [(s[0], s[3]), (s[1], s[2])],
        };
        for (x, y) in joins {
            uf.union(index[&x], index[&y]);
        }
    }

    // boundary slots per component; components without any are circles
    let mut ends: BTreeMap<usize, Vec<Slot>> = BTreeMap::new();
    for (slot, arc, _) in tangle.boundary_slots() {
        ends.entry(uf.find(index[&arc])).or_default().push(slot);
    }

    let mut pairs = Vec::new();
    let mut with_boundary = 0usize;
    for slots in ends.values() {
        assert!(
            slots.len() == 2,
            "arc chain with {} boundary ends; input invariants violated",
            slots.len()
        );
        pairs.push((slots[0], slots[1]));
        with_boundary += 1;
    }

    let mut components = 0usize;
    for i in 0..labels.len() {
        if uf.find(i) == i {
            components += 1;
        }
    }
    let loops = (components - with_boundary) as u32 + tangle.free_loops;

    SmoothedState::new(pairs, loops)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ComputeError {
    #[error(transparent)]
    CapExceeded(#[from] StateCapExceeded),
    #[error("state {state}: {source}")]
    Embedding {
        state: String,
        source: EmbeddingViolation,
    },
    #[error("empty diagram has no component class to normalize")]
    EmptyDiagram,
}

/// One state's worth of the bracket: a^(alpha-beta) * normalized census.
pub fn state_contribution(tangle: &CutTangle, state: &State) -> Result<FlatValue, ComputeError> {
    let smoothed = resolve_state(tangle, state);
    let census = classify(&smoothed, &tangle.surface).map_err(|source| ComputeError::Embedding {
        state: state.bitstring(),
        source,
    })?;
    let value = normalize_census(census).map_err(|_| ComputeError::EmptyDiagram)?;
    Ok(value.scale(&LaurentPoly::monomial(1, state.exponent())))
}

pub fn flat_bracket_with_cap(tangle: &CutTangle, cap: u32) -> Result<FlatValue, ComputeError> {
    let mut total = FlatValue::zero();
    for state in enumerate_states(tangle.crossings.len(), cap)? {
        total = total.add(&state_contribution(tangle, &state)?);
    }
    Ok(total)
}

/// The flat-virtual bracket: sum over all states, exact arithmetic.
pub fn flat_bracket(tangle: &CutTangle) -> Result<FlatValue, ComputeError> {
    flat_bracket_with_cap(tangle, DEFAULT_STATE_CAP)
}

pub fn flat_jones_with_cap(tangle: &CutTangle, cap: u32) -> Result<FlatValue, ComputeError> {
    Ok(flat_bracket_with_cap(tangle, cap)?.scale(&writhe_prefactor(tangle.writhe())))
}

/// The flat-virtual Jones polynomial (-a)^(-3w) * bracket.
pub fn flat_jones(tangle: &CutTangle) -> Result<FlatValue, ComputeError> {
    flat_jones_with_cap(tangle, DEFAULT_STATE_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_tangle, Side};
    use crate::fixtures;
    use crate::poly::loop_factor;

    #[test]
    fn enumerate_orders_and_counts() {
        let states: Vec<State> = enumerate_states(0, 24).unwrap().collect();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].bitstring(), "");

        let states: Vec<State> = enumerate_states(2, 24).unwrap().collect();
        let bits: Vec<String> = states.iter().map(|s| s.bitstring()).collect();
        assert_eq!(bits, ["00", "01", "10", "11"]); // AA, AB, BA, BB

        let states: Vec<State> = enumerate_states(5, 24).unwrap().collect();
        assert_eq!(states.len(), 32);
        for s in &states {
            assert_eq!(s.alpha() + s.beta(), 5);
            assert_eq!(s.exponent().rem_euclid(2), 1); // same parity as n
        }

        assert!(enumerate_states(25, 24).is_err());
    }

    #[test]
    fn resolve_through_strand() {
        let t = parse_tangle("surface cylinder d=3\nright: 1+\nleft: 1-\n").unwrap();
        let s = resolve_state(&t, &State::from_index(0, 0));
        assert_eq!(s.interior_loops, 0);
        assert_eq!(
            s.partner(Slot::new(Side::Right, 1)),
            Some(Slot::new(Side::Left, 1))
        );
    }

    #[test]
    fn resolve_r1_curl() {
        let base = parse_tangle("surface cylinder d=3\nright: 1+\nleft: 1-\n").unwrap();
        let curled = crate::moves::r1_insert(&base, 1, crate::moves::KinkSign::Positive);
        let mut loops = Vec::new();
        for state in enumerate_states(1, 24).unwrap() {
            let s = resolve_state(&curled, &state);
            assert_eq!(
                s.partner(Slot::new(Side::Right, 1)),
                Some(Slot::new(Side::Left, 1))
            );
            loops.push(s.interior_loops);
        }
        loops.sort_unstable();
        assert_eq!(loops, [0, 1]);
    }

    #[test]
    fn trefoil_extreme_states() {
        let t = fixtures::trefoil_left();
        let all_a = resolve_state(&t, &State::from_index(3, 0));
        let all_b = resolve_state(&t, &State::from_index(3, 7));
        let mut counts = [all_a.interior_loops, all_b.interior_loops];
        counts.sort_unstable();
        assert_eq!(counts, [2, 3]);
    }

    #[test]
    fn bracket_single_unknot() {
        let t = parse_tangle("surface cylinder d=3\nright:\nleft:\nloops 1\n").unwrap();
        assert_eq!(
            flat_bracket(&t).unwrap(),
            FlatValue::single(0, LaurentPoly::one())
        );
    }

    #[test]
    fn bracket_winding_strand_is_one_eight() {
        let t = parse_tangle("surface cylinder d=4\nright: 1+\nleft: 1-\n").unwrap();
        assert_eq!(
            flat_bracket(&t).unwrap(),
            FlatValue::single(1, LaurentPoly::one())
        );
    }

    #[test]
    fn bracket_positive_curl_on_winding_strand() {
        let base = parse_tangle("surface cylinder d=4\nright: 1+\nleft: 1-\n").unwrap();
        let curled = crate::moves::r1_insert(&base, 1, crate::moves::KinkSign::Positive);
        assert_eq!(
            flat_bracket(&curled).unwrap(),
            FlatValue::single(1, LaurentPoly::monomial(-1, 3))
        );
        // (-a)^-3 * (-a^3) = 1: the kink does not change the invariant
        assert_eq!(
            flat_jones(&curled).unwrap(),
            FlatValue::single(1, LaurentPoly::one())
        );
    }

    #[test]
    fn jones_two_unlinked_circles() {
        let t = parse_tangle("surface cylinder d=3\nright:\nleft:\nloops 2\n").unwrap();
        assert_eq!(flat_jones(&t).unwrap(), FlatValue::single(0, loop_factor()));
    }

    #[test]
    fn jones_right_trefoil_frozen() {
        // classical Jones in the bracket variable, unknot -> 1
        let mut expected = LaurentPoly::monomial(-1, -16);
        expected.add_term(1.into(), -12);
        expected.add_term(1.into(), -4);
        assert_eq!(
            flat_jones(&fixtures::trefoil_right()).unwrap(),
            FlatValue::single(0, expected)
        );
    }

    #[test]
    fn jones_figure_eight_frozen() {
        let mut expected = LaurentPoly::monomial(1, -8);
        expected.add_term((-1).into(), -4);
        expected.add_term(1.into(), 0);
        expected.add_term((-1).into(), 4);
        expected.add_term(1.into(), 8);
        assert_eq!(
            flat_jones(&fixtures::figure_eight()).unwrap(),
            FlatValue::single(0, expected)
        );
    }

    #[test]
    fn empty_diagram_is_rejected() {
        let t = parse_tangle("surface cylinder d=3\nright:\nleft:\n").unwrap();
        assert_eq!(flat_bracket(&t), Err(ComputeError::EmptyDiagram));
    }

    #[test]
    fn summation_is_order_independent() {
        let t = fixtures::corpus_cylinder();
        let forward = flat_bracket(&t).unwrap();
        let mut indices: Vec<u64> = (0..32).collect();
        indices.reverse();
        let mut backward = FlatValue::zero();
        for k in indices {
            backward = backward.add(&state_contribution(&t, &State::from_index(5, k)).unwrap());
        }
        assert_eq!(forward, backward);
    }
}
