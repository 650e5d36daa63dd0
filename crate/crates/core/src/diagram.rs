//! Cut-tangle diagrams: classical tangles in the fundamental rectangle of a
//! cylinder or torus, with labeled boundary ends and oriented arcs.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type ArcLabel = u32;

/// Surface the tangle closes up on, with its covering parameter(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSpec {
    Cylinder { d: u32 },
    Torus { d1: u32, d2: u32 },
}

impl SurfaceSpec {
    pub fn is_torus(&self) -> bool {
        matches!(self, SurfaceSpec::Torus { .. })
    }
}

/// Direction of a strand at a boundary end: `Out` is printed `+`, `In` is `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Right,
    Left,
    Top,
    Bottom,
}

impl Side {
    /// The side the closure arc connects to (right<->left, top<->bottom).
    pub fn opposite(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
            Side::Top => Side::Bottom,
            Side::Bottom => Side::Top,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
            Side::Top => "top",
            Side::Bottom => "bottom",
        }
    }
}

/// One boundary end: side plus 1-based position along that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub side: Side,
    pub index: usize,
}

impl Slot {
    pub fn new(side: Side, index: usize) -> Self {
        Slot { side, index }
    }

    /// The slot the closure arc connects this one to.
    pub fn opposite(self) -> Slot {
        Slot::new(self.side.opposite(), self.index)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Right => "r",
            Side::Left => "l",
            Side::Top => "t",
            Side::Bottom => "b",
        };
        write!(f, "{}{}", s, self.index)
    }
}

/// Which of the two over-strand slots is incoming.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverIn {
    P1,
    P3,
}

/// A classical crossing. Slots are listed counterclockwise starting at the
/// incoming under-strand arc, so the under strand passes p0 -> p2 and the
/// over strand occupies p1 and p3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingRecord {
    pub id: usize,
    pub slots: [ArcLabel; 4],
    pub over_in: OverIn,
}

impl CrossingRecord {
    pub fn new(id: usize, slots: [ArcLabel; 4], over_in: OverIn) -> Self {
        CrossingRecord { id, slots, over_in }
    }

    /// +1 when the (over-direction, under-direction) frame is positive.
    pub fn sign(&self) -> i64 {
        match self.over_in {
            OverIn::P3 => 1,
            OverIn::P1 => -1,
        }
    }

    /// Arc occurrences that are heads (incoming ends) at this crossing.
    pub fn head_slots(&self) -> [usize; 2] {
        match self.over_in {
            OverIn::P1 => [0, 1],
            OverIn::P3 => [0, 3],
        }
    }

    /// Over/under swapped. The record is re-anchored at the new incoming
    /// under arc so head/tail roles of every occurrence are preserved.
    pub fn mirrored(&self) -> CrossingRecord {
        let s = &self.slots;
        match self.over_in {
            // new under-in is the old over-in at p1; same cyclic order
            OverIn::P1 => CrossingRecord::new(self.id, [s[1], s[2], s[3], s[0]], OverIn::P3),
            OverIn::P3 => CrossingRecord::new(self.id, [s[3], s[0], s[1], s[2]], OverIn::P1),
        }
    }
}

/// A classical tangle in the fundamental rectangle, the input of the whole
/// pipeline. Boundary lists run top-to-bottom (right/left) and left-to-right
/// (top/bottom). `free_loops` counts crossing-free closed circles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutTangle {
    pub surface: SurfaceSpec,
    pub crossings: Vec<CrossingRecord>,
    pub right: Vec<(ArcLabel, Dir)>,
    pub left: Vec<(ArcLabel, Dir)>,
    pub top: Vec<(ArcLabel, Dir)>,
    pub bottom: Vec<(ArcLabel, Dir)>,
    pub free_loops: u32,
}

/// A violated invariant, reported as data with a machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Arc label does not occur exactly twice.
    ArcMultiplicity { arc: ArcLabel, count: usize },
    /// Arc does not have exactly one head and one tail occurrence.
    OrientationInconsistency { arc: ArcLabel },
    /// Opposite boundary sides have different lengths.
    SideCountMismatch { axis: &'static str },
    /// right[i]/left[i] (or top/bottom) would give the closure arc two heads
    /// or two tails.
    ClosureOrientation { side: Side, index: usize },
    /// Covering parameter below 2.
    SurfaceParam { param: &'static str, value: u32 },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::ArcMultiplicity { .. } => "E_ARC_MULT",
            Violation::OrientationInconsistency { .. } => "E_ORIENT",
            Violation::SideCountMismatch { .. } => "E_SIDE_COUNT",
            Violation::ClosureOrientation { .. } => "E_CLOSURE_ORIENT",
            Violation::SurfaceParam { .. } => "E_SURFACE_PARAM",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ArcMultiplicity { arc, count } => {
                write!(f, "E_ARC_MULT arc={arc} count={count}")
            }
            Violation::OrientationInconsistency { arc } => write!(f, "E_ORIENT arc={arc}"),
            Violation::SideCountMismatch { axis } => write!(f, "E_SIDE_COUNT axis={axis}"),
            Violation::ClosureOrientation { side, index } => {
                write!(f, "E_CLOSURE_ORIENT side={} index={}", side.name(), index)
            }
            Violation::SurfaceParam { param, value } => {
                write!(f, "E_SURFACE_PARAM {param}={value}")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Error)]
pub enum TangleError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid tangle: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl CutTangle {
    pub fn boundary_side(&self, side: Side) -> &[(ArcLabel, Dir)] {
        match side {
            Side::Right => &self.right,
            Side::Left => &self.left,
            Side::Top => &self.top,
            Side::Bottom => &self.bottom,
        }
    }

    pub fn boundary_slots(&self) -> Vec<(Slot, ArcLabel, Dir)> {
        let mut out = Vec::new();
        for side in [Side::Right, Side::Left, Side::Top, Side::Bottom] {
            for (i, &(arc, dir)) in self.boundary_side(side).iter().enumerate() {
                out.push((Slot::new(side, i + 1), arc, dir));
            }
        }
        out
    }

    /// Number of end pairs on the right/left axis.
    pub fn m1(&self) -> usize {
        self.right.len()
    }

    /// Number of end pairs on the top/bottom axis (0 on the cylinder).
    pub fn m2(&self) -> usize {
        self.top.len()
    }

    pub fn arc_labels(&self) -> Vec<ArcLabel> {
        let mut labels: Vec<ArcLabel> = Vec::new();
        for c in &self.crossings {
            labels.extend_from_slice(&c.slots);
        }
        for (_, arc, _) in self.boundary_slots() {
            labels.push(arc);
        }
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    pub fn max_arc_label(&self) -> ArcLabel {
        self.arc_labels().last().copied().unwrap_or(0)
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign()).sum()
    }

    /// Over/under swapped at every crossing; negates the writhe.
    pub fn mirrored(&self) -> CutTangle {
        let mut t = self.clone();
        t.crossings = self.crossings.iter().map(|c| c.mirrored()).collect();
        t
    }

    /// Every violated invariant. Empty exactly on inputs `parse_tangle` accepts.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        match self.surface {
            SurfaceSpec::Cylinder { d } => {
                if d < 2 {
                    out.push(Violation::SurfaceParam { param: "d", value: d });
                }
            }
            SurfaceSpec::Torus { d1, d2 } => {
                if d1 < 2 {
                    out.push(Violation::SurfaceParam { param: "d1", value: d1 });
                }
                if d2 < 2 {
                    out.push(Violation::SurfaceParam { param: "d2", value: d2 });
                }
            }
        }

        if self.right.len() != self.left.len() {
            out.push(Violation::SideCountMismatch { axis: "right/left" });
        }
        if self.top.len() != self.bottom.len() {
            out.push(Violation::SideCountMismatch { axis: "top/bottom" });
        }

        // occurrence count and head/tail balance per arc
        let mut occ: BTreeMap<ArcLabel, (usize, usize, usize)> = BTreeMap::new(); // (count, heads, tails)
        let mut bump = |arc: ArcLabel, head: bool| {
            let e = occ.entry(arc).or_insert((0, 0, 0));
            e.0 += 1;
            if head {
                e.1 += 1;
            } else {
                e.2 += 1;
            }
        };
        for c in &self.crossings {
            let heads = c.head_slots();
            for (k, &arc) in c.slots.iter().enumerate() {
                bump(arc, heads.contains(&k));
            }
        }
        for (_, arc, dir) in self.boundary_slots() {
            bump(arc, dir == Dir::Out);
        }
        for (&arc, &(count, heads, tails)) in &occ {
            if count != 2 {
                out.push(Violation::ArcMultiplicity { arc, count });
            } else if heads != 1 || tails != 1 {
                out.push(Violation::OrientationInconsistency { arc });
            }
        }

        // closure arcs must carry a coherent orientation
        for (near, far, side) in [
            (&self.right, &self.left, Side::Right),
            (&self.top, &self.bottom, Side::Top),
        ] {
            for (i, (a, b)) in near.iter().zip(far.iter()).enumerate() {
                if a.1 == b.1 {
                    out.push(Violation::ClosureOrientation { side, index: i + 1 });
                }
            }
        }

        out
    }
}

/// Parse and validate; errors on any syntax problem or violated invariant.
pub fn parse_tangle(text: &str) -> Result<CutTangle, TangleError> {
    let t = parse_document(text)?;
    let violations = t.validate();
    if violations.is_empty() {
        Ok(t)
    } else {
        Err(TangleError::Invalid(violations))
    }
}

/// Grammar-level parse only; invariants are left to [`CutTangle::validate`].
pub fn parse_document(text: &str) -> Result<CutTangle, ParseError> {
    let mut surface: Option<SurfaceSpec> = None;
    let mut sides: BTreeMap<&str, Vec<(ArcLabel, Dir)>> = BTreeMap::new();
    let mut crossings: Vec<CrossingRecord> = Vec::new();
    let mut free_loops: Option<u32> = None;

    let err = |line: usize, col: usize, msg: String| ParseError { line, col, msg };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let head = tokens.next().unwrap();
        let col = content.find(head).unwrap_or(0) + 1;

        match head {
            "surface" => {
                if surface.is_some() {
                    return Err(err(line, col, "duplicate surface line".into()));
                }
                let kind = tokens
                    .next()
                    .ok_or_else(|| err(line, col, "missing surface kind".into()))?;
                let mut params: BTreeMap<&str, u32> = BTreeMap::new();
                for tok in tokens.by_ref() {
                    let (k, v) = tok
                        .split_once('=')
                        .ok_or_else(|| err(line, col, format!("expected key=value, got `{tok}`")))?;
                    let v: u32 = v
                        .parse()
                        .map_err(|_| err(line, col, format!("bad integer `{v}`")))?;
                    params.insert(k, v);
                }
                surface = Some(match kind {
                    "cylinder" => {
                        let d = *params
                            .get("d")
                            .ok_or_else(|| err(line, col, "cylinder needs d=<int>".into()))?;
                        if params.len() != 1 {
                            return Err(err(line, col, "cylinder takes only d=<int>".into()));
                        }
                        SurfaceSpec::Cylinder { d }
                    }
                    "torus" => {
                        let d1 = *params
                            .get("d1")
                            .ok_or_else(|| err(line, col, "torus needs d1=<int>".into()))?;
                        let d2 = *params
                            .get("d2")
                            .ok_or_else(|| err(line, col, "torus needs d2=<int>".into()))?;
                        if params.len() != 2 {
                            return Err(err(line, col, "torus takes only d1= d2=".into()));
                        }
                        SurfaceSpec::Torus { d1, d2 }
                    }
                    other => return Err(err(line, col, format!("unknown surface `{other}`"))),
                });
            }
            "right:" | "left:" | "top:" | "bottom:" => {
                let name = head.trim_end_matches(':');
                if sides.contains_key(name) {
                    return Err(err(line, col, format!("duplicate {name} line")));
                }
                let mut ends = Vec::new();
                for tok in tokens.by_ref() {
                    let (num, dir) = tok.split_at(tok.len() - 1);
                    let dir = match dir {
                        "+" => Dir::Out,
                        "-" => Dir::In,
                        _ => {
                            return Err(err(
                                line,
                                col,
                                format!("end `{tok}` must be <arc>+ or <arc>-"),
                            ))
                        }
                    };
                    let arc: ArcLabel = num
                        .parse()
                        .map_err(|_| err(line, col, format!("bad arc label `{num}`")))?;
                    if arc == 0 {
                        return Err(err(line, col, "arc labels are positive".into()));
                    }
                    ends.push((arc, dir));
                }
                sides.insert(name, ends);
            }
            "X" => {
                let mut slots = [0u32; 4];
                for slot in &mut slots {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| err(line, col, "X needs 4 arc labels".into()))?;
                    *slot = tok
                        .parse()
                        .map_err(|_| err(line, col, format!("bad arc label `{tok}`")))?;
                    if *slot == 0 {
                        return Err(err(line, col, "arc labels are positive".into()));
                    }
                }
                let over = tokens
                    .next()
                    .ok_or_else(|| err(line, col, "X needs over=<1|3>".into()))?;
                let over_in = match over {
                    "over=1" => OverIn::P1,
                    "over=3" => OverIn::P3,
                    _ => return Err(err(line, col, format!("expected over=<1|3>, got `{over}`"))),
                };
                crossings.push(CrossingRecord::new(crossings.len(), slots, over_in));
            }
            "loops" => {
                if free_loops.is_some() {
                    return Err(err(line, col, "duplicate loops line".into()));
                }
                let tok = tokens
                    .next()
                    .ok_or_else(|| err(line, col, "loops needs a count".into()))?;
                free_loops = Some(
                    tok.parse()
                        .map_err(|_| err(line, col, format!("bad count `{tok}`")))?,
                );
            }
            other => return Err(err(line, col, format!("unknown directive `{other}`"))),
        }
        if let Some(extra) = tokens.next() {
            return Err(err(line, col, format!("trailing token `{extra}`")));
        }
    }

    let surface = surface.ok_or_else(|| err(0, 0, "missing surface line".to_string()))?;
    let take = |sides: &mut BTreeMap<&str, Vec<(ArcLabel, Dir)>>, name: &str| {
        sides.remove(name).ok_or_else(|| ParseError {
            line: 0,
            col: 0,
            msg: format!("missing {name}: line"),
        })
    };
    let right = take(&mut sides, "right")?;
    let left = take(&mut sides, "left")?;
    let (top, bottom) = if surface.is_torus() {
        (take(&mut sides, "top")?, take(&mut sides, "bottom")?)
    } else {
        if sides.contains_key("top") || sides.contains_key("bottom") {
            return Err(err(0, 0, "cylinder tangles have no top/bottom sides".into()));
        }
        (Vec::new(), Vec::new())
    };

    Ok(CutTangle {
        surface,
        crossings,
        right,
        left,
        top,
        bottom,
        free_loops: free_loops.unwrap_or(0),
    })
}

impl fmt::Display for CutTangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.surface {
            SurfaceSpec::Cylinder { d } => writeln!(f, "surface cylinder d={d}")?,
            SurfaceSpec::Torus { d1, d2 } => writeln!(f, "surface torus d1={d1} d2={d2}")?,
        }
        let dump = |f: &mut fmt::Formatter<'_>, name: &str, ends: &[(ArcLabel, Dir)]| {
            write!(f, "{name}:")?;
            for &(arc, dir) in ends {
                write!(f, " {arc}{}", if dir == Dir::Out { '+' } else { '-' })?;
            }
            writeln!(f)
        };
        dump(f, "right", &self.right)?;
        dump(f, "left", &self.left)?;
        if self.surface.is_torus() {
            dump(f, "top", &self.top)?;
            dump(f, "bottom", &self.bottom)?;
        }
        for c in &self.crossings {
            let o = match c.over_in {
                OverIn::P1 => 1,
                OverIn::P3 => 3,
            };
            writeln!(
                f,
                "X {} {} {} {} over={o}",
                c.slots[0], c.slots[1], c.slots[2], c.slots[3]
            )?;
        }
        if self.free_loops > 0 {
            writeln!(f, "loops {}", self.free_loops)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strand() -> &'static str {
        "surface cylinder d=3\nright: 1+\nleft: 1-\n"
    }

    #[test]
    fn parse_minimal_through_strand() {
        let t = parse_tangle(strand()).unwrap();
        assert_eq!(t.m1(), 1);
        assert!(t.crossings.is_empty());
        assert_eq!(t.surface, SurfaceSpec::Cylinder { d: 3 });
    }

    #[test]
    fn closure_orientation_rejected() {
        let text = "surface cylinder d=3\nright: 1+\nleft: 1+\n";
        match parse_tangle(text) {
            Err(TangleError::Invalid(vs)) => {
                assert!(vs.iter().any(|v| v.code() == "E_CLOSURE_ORIENT"));
                // the closure arc would also receive two tails
                assert!(vs.iter().any(|v| v.code() == "E_ORIENT"));
            }
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn corpus_five_crossing_tangle_parses() {
        let t = crate::fixtures::corpus_cylinder();
        assert_eq!(t.m1(), 3);
        assert_eq!(t.crossings.len(), 5);
        assert!(t.validate().is_empty());
    }

    #[test]
    fn crossing_sign_convention() {
        let c = CrossingRecord::new(0, [1, 2, 3, 4], OverIn::P3);
        assert_eq!(c.sign(), 1);
        let c = CrossingRecord::new(0, [1, 2, 3, 4], OverIn::P1);
        assert_eq!(c.sign(), -1);
        // mirror flips the sign and keeps occurrence roles valid
        assert_eq!(c.mirrored().sign(), 1);
    }

    #[test]
    fn writhe_of_trefoils() {
        assert_eq!(crate::fixtures::trefoil_left().writhe(), -3);
        assert_eq!(crate::fixtures::trefoil_right().writhe(), 3);
        let empty = parse_tangle("surface cylinder d=2\nright:\nleft:\nloops 1\n").unwrap();
        assert_eq!(empty.writhe(), 0);
    }

    #[test]
    fn r2_pair_writhe_cancels() {
        let base = parse_tangle(strand()).unwrap();
        let poked = crate::moves::r2_poke(&base, 1);
        assert_eq!(poked.crossings.len(), 2);
        assert_eq!(poked.writhe(), 0);
    }

    #[test]
    fn mirror_negates_writhe() {
        let t = crate::fixtures::corpus_cylinder();
        assert_eq!(t.mirrored().writhe(), -t.writhe());
        assert!(t.mirrored().validate().is_empty());
    }

    #[test]
    fn arc_multiplicity_violation() {
        let text = "surface cylinder d=3\nright: 1+ 1+ 1+\nleft: 2- 2+ 2-\n";
        let t = parse_document(text).unwrap();
        let vs = t.validate();
        assert!(vs
            .iter()
            .any(|v| matches!(v, Violation::ArcMultiplicity { arc: 1, count: 3 })));
    }

    #[test]
    fn torus_side_mismatch() {
        let text = "surface torus d1=2 d2=2\nright:\nleft:\ntop: 1+\nbottom:\n";
        let t = parse_document(text).unwrap();
        let vs = t.validate();
        assert!(vs
            .iter()
            .any(|v| matches!(v, Violation::SideCountMismatch { axis: "top/bottom" })));
    }

    #[test]
    fn small_d_rejected() {
        let text = "surface cylinder d=1\nright:\nleft:\nloops 1\n";
        let t = parse_document(text).unwrap();
        assert!(t.validate().iter().any(|v| v.code() == "E_SURFACE_PARAM"));
    }

    #[test]
    fn serialize_round_trip() {
        for t in [
            crate::fixtures::corpus_cylinder(),
            crate::fixtures::corpus_torus(),
            crate::fixtures::figure_eight(),
        ] {
            let back = parse_tangle(&t.to_string()).unwrap();
            assert_eq!(back, t);
        }
    }
}
