//! Closure and classification of smoothed states: reduce adjacent connected
//! end pairs, read off the surviving through-strand configuration, and count
//! trivial circles and flat eights.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use thiserror::Error;

use crate::diagram::{ArcLabel, CutTangle, Dir, Side, Slot, SurfaceSpec};
use crate::statesum::SmoothedState;

/// Census of a semi-trivial diagram class: `t` trivial circles and `e` flat
/// eight components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentCensus {
    pub t: u32,
    pub e: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Slash,
    Backslash,
    None,
}

/// Result of reducing a state's boundary matching to its irreducible form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedMatching {
    /// Surviving right/left through count.
    pub m1: usize,
    /// Surviving top/bottom through count (0 on the cylinder).
    pub m2: usize,
    pub chirality: Chirality,
    /// Circles closed while reducing, including nested corner loops.
    pub reduction_circles: u32,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("embedding violation: {detail}")]
pub struct EmbeddingViolation {
    pub detail: String,
}

fn violation(detail: impl Into<String>) -> EmbeddingViolation {
    EmbeddingViolation {
        detail: detail.into(),
    }
}

struct Reduction {
    surviving: BTreeMap<Side, Vec<usize>>,
    matching: BTreeMap<Slot, Slot>,
    circles: u32,
}

impl Reduction {
    fn new(smoothed: &SmoothedState, m1: usize, m2: usize) -> Self {
        let mut matching = BTreeMap::new();
        for (a, b) in smoothed.edges() {
            matching.insert(a, b);
            matching.insert(b, a);
        }
        let mut surviving = BTreeMap::new();
        surviving.insert(Side::Right, (1..=m1).collect::<Vec<_>>());
        surviving.insert(Side::Left, (1..=m1).collect());
        surviving.insert(Side::Top, (1..=m2).collect());
        surviving.insert(Side::Bottom, (1..=m2).collect());
        Reduction {
            surviving,
            matching,
            circles: 0,
        }
    }

    /// Same-side pairs, adjacent among survivors, matched to each other.
    fn candidates(&self) -> Vec<(Side, usize, usize)> {
        let mut out = Vec::new();
        for side in [Side::Right, Side::Left, Side::Top, Side::Bottom] {
            let surv = &self.surviving[&side];
            for w in surv.windows(2) {
                let (a, b) = (Slot::new(side, w[0]), Slot::new(side, w[1]));
                if self.matching.get(&a) == Some(&b) {
                    out.push((side, w[0], w[1]));
                }
            }
        }
        out
    }

    fn delete(&mut self, slot: Slot) {
        let surv = self.surviving.get_mut(&slot.side).unwrap();
        let pos = surv.iter().position(|&i| i == slot.index).unwrap();
        surv.remove(pos);
    }

    fn unlink(&mut self, a: Slot) -> Slot {
        let b = self.matching.remove(&a).unwrap();
        self.matching.remove(&b);
        b
    }

    /// Delete a reducible pair and join its opposites by the external arc.
    fn apply(&mut self, side: Side, i: usize, j: usize) {
        let (a, b) = (Slot::new(side, i), Slot::new(side, j));
        self.unlink(a);
        self.delete(a);
        self.delete(b);

        let (oa, ob) = (a.opposite(), b.opposite());
        if self.matching.get(&oa) == Some(&ob) {
            self.unlink(oa);
            self.circles += 1;
        } else {
            let x = self.unlink(oa);
            let y = self.unlink(ob);
            self.matching.insert(x, y);
            self.matching.insert(y, x);
        }
        self.delete(oa);
        self.delete(ob);
    }

    fn run(&mut self, mut choose: impl FnMut(usize) -> usize) {
        loop {
            let cands = self.candidates();
            if cands.is_empty() {
                return;
            }
            let (side, i, j) = cands[choose(cands.len())];
            self.apply(side, i, j);
        }
    }

    fn edges(&self) -> Vec<(Slot, Slot)> {
        self.matching
            .iter()
            .filter(|(a, b)| *a < b)
            .map(|(&a, &b)| (a, b))
            .collect()
    }
}

/// Parse the irreducible matching left at the fixpoint. Planarity admits
/// exactly: parallel through strands on one axis, nested slash corners
/// (left-top with right-bottom) and nested backslash corners (top-right with
/// bottom-left). Paired slash+backslash corners close into circles around
/// the rectangle corner point and are peeled off as trivial components; the
/// rest is the slash/backslash through configuration.
fn parse_irreducible(red: &Reduction) -> Result<ReducedMatching, EmbeddingViolation> {
    let (mut p, mut q, mut h, mut v) = (0usize, 0usize, 0usize, 0usize);
    let (mut se, mut sw) = (0usize, 0usize);
    for &(a, b) in &red.edges() {
        match (a.side, b.side) {
            (Side::Right, Side::Left) => h += 1,
            (Side::Top, Side::Bottom) => v += 1,
            (Side::Left, Side::Top) => p += 1,
            (Side::Right, Side::Bottom) => se += 1,
            (Side::Right, Side::Top) => q += 1,
            (Side::Left, Side::Bottom) => sw += 1,
            _ => {
                return Err(violation(format!(
                    "irreducible same-side strand {a}-{b}"
                )))
            }
        }
    }
    if p != se || q != sw {
        return Err(violation(format!(
            "unbalanced corner strands nw={p} se={se} ne={q} sw={sw}"
        )));
    }
    if h > 0 && v > 0 {
        return Err(violation(format!(
            "crossing through strands on both axes h={h} v={v}"
        )));
    }

    let lefts = &red.surviving[&Side::Left];
    let rights = &red.surviving[&Side::Right];
    let tops = &red.surviving[&Side::Top];
    let bottoms = &red.surviving[&Side::Bottom];
    if lefts.len() != p + q + h || tops.len() != p + q + v {
        return Err(violation("side counts do not fit any D_s/D_b pattern"));
    }

    // expected nesting, positions 1-based within the surviving lists
    let at = |list: &[usize], side: Side, pos: usize| Slot::new(side, list[pos - 1]);
    let mut expected: BTreeSet<(Slot, Slot)> = BTreeSet::new();
    let mut push = |a: Slot, b: Slot| {
        expected.insert(if a < b { (a, b) } else { (b, a) });
    };
    for i in 1..=p {
        push(at(lefts, Side::Left, i), at(tops, Side::Top, i));
        push(
            at(rights, Side::Right, q + h + i),
            at(bottoms, Side::Bottom, q + v + i),
        );
    }
    for k in 1..=q {
        push(at(tops, Side::Top, p + v + k), at(rights, Side::Right, q + 1 - k));
        push(
            at(lefts, Side::Left, p + h + k),
            at(bottoms, Side::Bottom, q + 1 - k),
        );
    }
    for k in 1..=h {
        push(at(lefts, Side::Left, p + k), at(rights, Side::Right, q + k));
    }
    for k in 1..=v {
        push(at(tops, Side::Top, p + k), at(bottoms, Side::Bottom, q + k));
    }

    let actual: BTreeSet<(Slot, Slot)> = red.edges().into_iter().collect();
    if actual != expected {
        return Err(violation(
            "surviving strands are not nested in a D_s/D_b pattern",
        ));
    }

    let r = p.abs_diff(q);
    let chirality = if r == 0 {
        Chirality::None
    } else if p > q {
        Chirality::Slash
    } else {
        Chirality::Backslash
    };
    Ok(ReducedMatching {
        m1: h + r,
        m2: v + r,
        chirality,
        reduction_circles: red.circles + p.min(q) as u32,
    })
}

fn reduce_with(
    smoothed: &SmoothedState,
    m1: usize,
    m2: usize,
    choose: impl FnMut(usize) -> usize,
) -> Result<ReducedMatching, EmbeddingViolation> {
    let mut red = Reduction::new(smoothed, m1, m2);
    red.run(choose);
    parse_irreducible(&red)
}

/// Reduce a cylinder state's matching over 2m ends to parallel through
/// strands; `m1` of the result is the surviving count m'.
pub fn reduce_cylinder(
    smoothed: &SmoothedState,
    m: usize,
) -> Result<ReducedMatching, EmbeddingViolation> {
    reduce_with(smoothed, m, 0, |_| 0)
}

/// Reduce a torus state's matching over 2(m1+m2) ends to a D_s/D_b
/// configuration plus peeled trivial circles.
pub fn reduce_torus(
    smoothed: &SmoothedState,
    m1: usize,
    m2: usize,
) -> Result<ReducedMatching, EmbeddingViolation> {
    reduce_with(smoothed, m1, m2, |_| 0)
}

/// gcd with gcd(x, 0) = x and gcd(0, 0) = 0: the number of essential
/// components the surviving through strands close into.
pub fn essential_component_count(m1p: u64, m2p: u64) -> u64 {
    m1p.gcd(&m2p)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("flat crossing count undefined for m' = (0, 0)")]
pub struct NoEssentialStrands;

/// Flat self-crossings each essential component acquires under the covering
/// map: d - 1 on the cylinder, gcd(d1 m2', d2 m1')/gcd(m1', m2') - 1 on the
/// torus.
pub fn per_component_flat_crossings(
    m1p: u64,
    m2p: u64,
    surface: &SurfaceSpec,
) -> Result<u64, NoEssentialStrands> {
    match *surface {
        SurfaceSpec::Cylinder { d } => {
            if m1p == 0 {
                return Err(NoEssentialStrands);
            }
            Ok(u64::from(d) - 1)
        }
        SurfaceSpec::Torus { d1, d2 } => {
            let g = essential_component_count(m1p, m2p);
            if g == 0 {
                return Err(NoEssentialStrands);
            }
            Ok((u64::from(d1) * m2p).gcd(&(u64::from(d2) * m1p)) / g - 1)
        }
    }
}

/// Census of a cylinder state: surviving strands wind once around, cross
/// themselves d - 1 times under the covering, and collapse to eights (d
/// even) or extra circles (d odd).
pub fn classify_cylinder(
    smoothed: &SmoothedState,
    surface: &SurfaceSpec,
) -> Result<ComponentCensus, EmbeddingViolation> {
    let SurfaceSpec::Cylinder { d } = *surface else {
        panic!("classify_cylinder needs a cylinder surface");
    };
    let m = smoothed.slots().filter(|s| s.side == Side::Right).count();
    let red = reduce_cylinder(smoothed, m)?;
    let base_t = smoothed.interior_loops + red.reduction_circles;
    let mp = red.m1 as u32;
    Ok(if d % 2 == 0 {
        ComponentCensus { t: base_t, e: mp }
    } else {
        ComponentCensus {
            t: base_t + mp,
            e: 0,
        }
    })
}

/// Census of a torus state via the surviving D_s/D_b configuration and the
/// per-component flat crossing parity.
pub fn classify_torus(
    smoothed: &SmoothedState,
    surface: &SurfaceSpec,
) -> Result<ComponentCensus, EmbeddingViolation> {
    assert!(surface.is_torus(), "classify_torus needs a torus surface");
    let m1 = smoothed.slots().filter(|s| s.side == Side::Right).count();
    let m2 = smoothed.slots().filter(|s| s.side == Side::Top).count();
    let red = reduce_torus(smoothed, m1, m2)?;
    let base_t = smoothed.interior_loops + red.reduction_circles;
    let n = essential_component_count(red.m1 as u64, red.m2 as u64);
    if n == 0 {
        return Ok(ComponentCensus { t: base_t, e: 0 });
    }
    let crossings = per_component_flat_crossings(red.m1 as u64, red.m2 as u64, surface)
        .expect("n > 0 means essential strands exist");
    Ok(if crossings % 2 == 0 {
        ComponentCensus {
            t: base_t + n as u32,
            e: 0,
        }
    } else {
        ComponentCensus {
            t: base_t,
            e: n as u32,
        }
    })
}

/// Surface-appropriate classification.
pub fn classify(
    smoothed: &SmoothedState,
    surface: &SurfaceSpec,
) -> Result<ComponentCensus, EmbeddingViolation> {
    match surface {
        SurfaceSpec::Cylinder { .. } => classify_cylinder(smoothed, surface),
        SurfaceSpec::Torus { .. } => classify_torus(smoothed, surface),
    }
}

/// Crossingless torus tangle whose closure is the (m1, +-m2) torus link
/// family; every strand is one parallel diagonal. Used as a test generator.
pub fn build_slash_tangle(m1: usize, m2: usize, chirality: Chirality) -> CutTangle {
    assert!(m1 + m2 > 0, "need at least one strand");
    // ends swept in parallel: each strand joins the k-th lower end to the
    // k-th upper end, oriented lower -> upper
    let (lower, upper): (Vec<Slot>, Vec<Slot>) = match chirality {
        Chirality::Slash => (
            (1..=m1)
                .map(|i| Slot::new(Side::Left, i))
                .chain((1..=m2).map(|j| Slot::new(Side::Bottom, j)))
                .collect(),
            (1..=m2)
                .map(|j| Slot::new(Side::Top, j))
                .chain((1..=m1).map(|i| Slot::new(Side::Right, i)))
                .collect(),
        ),
        Chirality::Backslash => (
            (1..=m1)
                .map(|i| Slot::new(Side::Right, i))
                .chain((1..=m2).rev().map(|j| Slot::new(Side::Bottom, j)))
                .collect(),
            (1..=m2)
                .rev()
                .map(|j| Slot::new(Side::Top, j))
                .chain((1..=m1).map(|i| Slot::new(Side::Left, i)))
                .collect(),
        ),
        Chirality::None => panic!("build_slash_tangle needs slash or backslash"),
    };

    let mut sides: BTreeMap<Side, Vec<(ArcLabel, Dir)>> = BTreeMap::new();
    for side in [Side::Right, Side::Left, Side::Top, Side::Bottom] {
        let len = match side {
            Side::Right | Side::Left => m1,
            Side::Top | Side::Bottom => m2,
        };
        sides.insert(side, vec![(0, Dir::In); len]);
    }
    for (k, (&lo, &hi)) in lower.iter().zip(upper.iter()).enumerate() {
        let label = (k + 1) as ArcLabel;
        sides.get_mut(&lo.side).unwrap()[lo.index - 1] = (label, Dir::In);
        sides.get_mut(&hi.side).unwrap()[hi.index - 1] = (label, Dir::Out);
    }

    CutTangle {
        surface: SurfaceSpec::Torus { d1: 2, d2: 2 },
        crossings: Vec::new(),
        right: sides.remove(&Side::Right).unwrap(),
        left: sides.remove(&Side::Left).unwrap(),
        top: sides.remove(&Side::Top).unwrap(),
        bottom: sides.remove(&Side::Bottom).unwrap(),
        free_loops: 0,
    }
}
