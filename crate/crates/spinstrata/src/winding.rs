//! Winding numbers of combinatorial curves on an origami.
//!
//! A curve is a cyclic list of chords, one per square, joining the midpoints
//! of the entry and exit sides. The turning number is the total signed turn
//! of the chord directions, counted in eighths of a full turn.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::origami_core::{singularity_profile, CylDirection, Cylinder, Origami};
use crate::spin_algebra::SpinStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
    B,
    T,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
            Side::B => Side::T,
            Side::T => Side::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub sq: usize,
    #[serde(rename = "in")]
    pub entry: Side,
    #[serde(rename = "out")]
    pub exit: Side,
}

impl Step {
    pub fn new(sq: usize, entry: Side, exit: Side) -> Self {
        Step { sq, entry, exit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurvePath {
    pub steps: Vec<Step>,
}

/// Chord direction in octants: E=0, NE=1, …, SE=7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    pub octant: u8,
}

impl Direction {
    pub fn of(entry: Side, exit: Side) -> Option<Direction> {
        use Side::*;
        let octant = match (entry, exit) {
            (L, R) => 0,
            (L, T) | (B, R) => 1,
            (B, T) => 2,
            (B, L) | (R, T) => 3,
            (R, L) => 4,
            (R, B) | (T, L) => 5,
            (T, B) => 6,
            (L, B) | (T, R) => 7,
            _ => return None,
        };
        Some(Direction { octant })
    }
}

/// Square across `side` of `q`, and the side through which it is entered.
pub fn neighbour(o: &Origami, q: usize, side: Side) -> (usize, Side) {
    let next = match side {
        Side::R => o.h().apply(q),
        Side::T => o.v().apply(q),
        Side::L => o.h().inverse().apply(q),
        Side::B => o.v().inverse().apply(q),
    };
    (next, side.opposite())
}

struct Glue {
    h: Vec<usize>,
    v: Vec<usize>,
    hi: Vec<usize>,
    vi: Vec<usize>,
}

impl Glue {
    fn new(o: &Origami) -> Self {
        Glue {
            h: o.h().images().to_vec(),
            v: o.v().images().to_vec(),
            hi: o.h().inverse().images().to_vec(),
            vi: o.v().inverse().images().to_vec(),
        }
    }

    fn across(&self, q: usize, side: Side) -> usize {
        match side {
            Side::R => self.h[q],
            Side::T => self.v[q],
            Side::L => self.hi[q],
            Side::B => self.vi[q],
        }
    }
}

impl CurvePath {
    pub fn new(steps: Vec<Step>) -> Self {
        CurvePath { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> CurvePath {
        CurvePath { steps: self.steps.iter().rev().map(|s| Step::new(s.sq, s.exit, s.entry)).collect() }
    }

    /// Checks gluing, entry ≠ exit and the absence of half-turns.
    pub fn validate(&self, o: &Origami) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Path("empty path".into()));
        }
        let glue = Glue::new(o);
        let n = self.steps.len();
        for t in 0..n {
            let s = self.steps[t];
            let u = self.steps[(t + 1) % n];
            if s.sq >= o.n() {
                return Err(Error::Path(format!("square {} out of range", s.sq)));
            }
            if s.entry == s.exit {
                return Err(Error::Path(format!("step {t} enters and exits through {:?}", s.entry)));
            }
            if glue.across(s.sq, s.exit) != u.sq || u.entry != s.exit.opposite() {
                return Err(Error::Path(format!("steps {t} and {} are not glued", (t + 1) % n)));
            }
        }
        Ok(())
    }
}

/// Signed turn from one chord to the next, in octants.
fn turn(a: Direction, b: Direction) -> Result<i64> {
    let d = (b.octant as i64 - a.octant as i64).rem_euclid(8);
    match d {
        4 => Err(Error::Path("path backtracks".into())),
        d if d > 4 => Ok(d - 8),
        d => Ok(d),
    }
}

pub fn turning_number(o: &Origami, p: &CurvePath) -> Result<i64> {
    p.validate(o)?;
    let dirs: Vec<Direction> = p.steps.iter().map(|s| Direction::of(s.entry, s.exit).unwrap()).collect();
    let n = dirs.len();
    let mut total = 0;
    for t in 0..n {
        total += turn(dirs[t], dirs[(t + 1) % n])?;
    }
    debug_assert_eq!(total % 8, 0);
    Ok(total / 8)
}

pub fn wn_mod_r(o: &Origami, p: &CurvePath, r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    if let Some(k) = singularity_profile(o).into_iter().find(|&k| k as u64 % r != 0) {
        return Err(Error::InvalidInput(format!("r = {r} does not divide zero order {k}")));
    }
    Ok(turning_number(o, p)?.rem_euclid(r as i64) as u64)
}

/// Counterclockwise loop around the bottom-left corner of square `q`.
pub fn vertex_loop(o: &Origami, q: usize) -> CurvePath {
    let glue = Glue::new(o);
    let mut steps = Vec::new();
    // start in q, which lies north-east of the vertex
    let (mut cur, mut entry) = (q, Side::B);
    loop {
        let exit = match entry {
            Side::B => Side::L,
            Side::R => Side::B,
            Side::T => Side::R,
            Side::L => Side::T,
        };
        steps.push(Step::new(cur, entry, exit));
        cur = glue.across(cur, exit);
        entry = exit.opposite();
        if cur == q && entry == Side::B {
            break;
        }
    }
    CurvePath { steps }
}

/// The core of a cylinder, oriented east (horizontal) or north (vertical).
/// Only the bottom row is used.
pub fn cylinder_core(c: &Cylinder) -> CurvePath {
    let (entry, exit) = match c.direction {
        CylDirection::Horizontal => (Side::L, Side::R),
        CylDirection::Vertical => (Side::B, Side::T),
    };
    CurvePath { steps: c.rows[0].iter().map(|&q| Step::new(q, entry, exit)).collect() }
}

/// Algebraic intersection ⟨core(c), p⟩ with the core oriented as in
/// [`cylinder_core`]: +1 for each crossing of `p` from the right of the
/// core to its left.
pub fn algebraic_intersection(o: &Origami, c: &Cylinder, p: &CurvePath) -> i64 {
    let glue = Glue::new(o);
    let bottom: std::collections::HashSet<usize> = c.rows[0].iter().copied().collect();
    let mut total = 0;
    for s in &p.steps {
        match c.direction {
            CylDirection::Horizontal => {
                if s.exit == Side::T && bottom.contains(&glue.across(s.sq, Side::T)) {
                    total += 1;
                }
                if s.exit == Side::B && bottom.contains(&s.sq) {
                    total -= 1;
                }
            }
            CylDirection::Vertical => {
                if s.exit == Side::R && bottom.contains(&glue.across(s.sq, Side::R)) {
                    total -= 1;
                }
                if s.exit == Side::L && bottom.contains(&s.sq) {
                    total += 1;
                }
            }
        }
    }
    total
}

/// Image of `p` under the left-handed Dehn twist along the core of the
/// height-one cylinder `c`. Each run of `p` through `c` that crosses from
/// one boundary to the other is displaced once around the circumference.
pub fn twist_path(o: &Origami, p: &CurvePath, c: &Cylinder) -> Result<CurvePath> {
    if c.height != 1 {
        return Err(Error::Unsupported("twist along a cylinder of height > 1".into()));
    }
    p.validate(o)?;
    let glue = Glue::new(o);
    let inside: std::collections::HashSet<usize> = c.rows[0].iter().copied().collect();
    let w = c.circumference as i64;
    let (fwd, back, lo, hi) = match c.direction {
        CylDirection::Horizontal => (Side::R, Side::L, Side::B, Side::T),
        CylDirection::Vertical => (Side::T, Side::B, Side::L, Side::R),
    };
    let n = p.steps.len();
    let Some(start) = (0..n).find(|&t| {
        let s = p.steps[t];
        !inside.contains(&s.sq) || s.entry == lo || s.entry == hi
    }) else {
        return Err(Error::Path("path runs parallel inside the cylinder".into()));
    };
    let steps: Vec<Step> = (0..n).map(|t| p.steps[(start + t) % n]).collect();
    let mut out = Vec::with_capacity(n + c.circumference);
    let mut t = 0;
    while t < n {
        let s = steps[t];
        if !inside.contains(&s.sq) {
            out.push(s);
            t += 1;
            continue;
        }
        let mut u = t;
        while steps[u].exit == fwd || steps[u].exit == back {
            u += 1;
        }
        let (entry, exit) = (s.entry, steps[u].exit);
        if entry == fwd || entry == back {
            return Err(Error::Path("path runs parallel inside the cylinder".into()));
        }
        if entry == exit {
            out.extend_from_slice(&steps[t..=u]);
            t = u + 1;
            continue;
        }
        let d: i64 = steps[t..u].iter().map(|x| if x.exit == fwd { 1 } else { -1 }).sum();
        let shift = if entry == lo { -w } else { w };
        let target = d + shift;
        let (dir, count) = if target >= 0 { (fwd, target) } else { (back, -target) };
        let mut q = s.sq;
        let mut e = entry;
        for _ in 0..count {
            out.push(Step::new(q, e, dir));
            q = glue.across(q, dir);
            e = dir.opposite();
        }
        out.push(Step::new(q, e, exit));
        debug_assert!(exit == hi || exit == lo);
        t = u + 1;
    }
    Ok(CurvePath { steps: out })
}

/// wn(T(q)·p) ≡ wn(p) + ⟨p, q⟩·wn(q) mod r, with q the core of `c`.
pub fn twist_linearity_check(o: &Origami, p: &CurvePath, c: &Cylinder, r: u64) -> Result<bool> {
    let twisted = twist_path(o, p, c)?;
    let core = cylinder_core(c);
    let lhs = wn_mod_r(o, &twisted, r)? as i64;
    let pq = -algebraic_intersection(o, c, p);
    let rhs = wn_mod_r(o, p, r)? as i64 + pq * wn_mod_r(o, &core, r)? as i64;
    Ok(lhs == rhs.rem_euclid(r as i64))
}

/// Σ wn(c_i) ≡ χ(Y) mod r for the oriented boundary of a subsurface Y.
pub fn coherence_check(o: &Origami, boundary: &[CurvePath], chi: i64, r: u64) -> Result<bool> {
    let mut total = 0i64;
    for p in boundary {
        total += wn_mod_r(o, p, r)? as i64;
    }
    Ok(total.rem_euclid(r as i64) == chi.rem_euclid(r as i64))
}

/// Values of wn mod r on a geometric basis (â_1…â_g, b̂_1…b̂_g).
pub fn spin_from_prototype(o: &Origami, basis: &[CurvePath], r: u64) -> Result<SpinStructure> {
    if basis.is_empty() || basis.len() % 2 != 0 {
        return Err(Error::InvalidInput(format!("need 2g basis paths, got {}", basis.len())));
    }
    let values = basis.iter().map(|p| wn_mod_r(o, p, r)).collect::<Result<Vec<_>>>()?;
    SpinStructure::new(r, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami_core::cylinders;

    #[test]
    fn cores_have_zero_turning() {
        let o = Origami::l_shape();
        for dir in [CylDirection::Horizontal, CylDirection::Vertical] {
            for c in cylinders(&o, dir) {
                assert_eq!(turning_number(&o, &cylinder_core(&c)).unwrap(), 0);
            }
        }
    }

    #[test]
    fn loops_around_vertices() {
        let t = Origami::torus();
        assert_eq!(turning_number(&t, &vertex_loop(&t, 0)).unwrap(), 1);
        let o = Origami::l_shape();
        let angles = o.corner_angles();
        for q in 0..3 {
            assert_eq!(turning_number(&o, &vertex_loop(&o, q)).unwrap(), angles[q] as i64);
        }
        let cone = (0..3).find(|&q| angles[q] == 3).unwrap();
        assert_eq!(wn_mod_r(&o, &vertex_loop(&o, cone), 2).unwrap(), 1);
    }

    #[test]
    fn reversal_negates() {
        let o = Origami::l_shape();
        let p = vertex_loop(&o, 0);
        assert_eq!(turning_number(&o, &p.reversed()).unwrap(), -turning_number(&o, &p).unwrap());
    }

    #[test]
    fn r_must_divide_orders() {
        let o = Origami::l_shape();
        let p = vertex_loop(&o, 0);
        assert!(wn_mod_r(&o, &p, 3).is_err());
    }

    #[test]
    fn backtracking_rejected() {
        let t = Origami::torus();
        let p = CurvePath::new(vec![Step::new(0, Side::L, Side::R), Step::new(0, Side::L, Side::L)]);
        assert!(turning_number(&t, &p).is_err());
        let q = CurvePath::new(vec![Step::new(0, Side::L, Side::T)]);
        assert!(q.validate(&t).is_err());
    }

    #[test]
    fn twist_disjoint_is_identity() {
        let o = Origami::l_shape();
        let rows = cylinders(&o, CylDirection::Horizontal);
        let core = cylinder_core(&rows[0]);
        assert_eq!(twist_path(&o, &core, &rows[0]).unwrap_err().kind(), "invalid-path");
        for c in &rows[1..] {
            assert_eq!(twist_path(&o, &core, c).unwrap(), core);
        }
    }

    #[test]
    fn twist_adds_a_loop() {
        let o = Origami::l_shape();
        let rows = cylinders(&o, CylDirection::Horizontal);
        let cols = cylinders(&o, CylDirection::Vertical);
        for row in &rows {
            for col in &cols {
                let p = cylinder_core(col);
                let k = algebraic_intersection(&o, row, &p);
                let t = twist_path(&o, &p, row).unwrap();
                assert_eq!(t.len() as i64, p.len() as i64 + k.abs() * row.circumference as i64);
                assert!(twist_linearity_check(&o, &p, row, 2).unwrap());
                let tt = twist_path(&o, &t, row).unwrap();
                assert_eq!(tt.len() as i64, p.len() as i64 + 2 * k.abs() * row.circumference as i64);
            }
        }
    }

    #[test]
    fn path_json_uses_in_out() {
        let p = CurvePath::new(vec![Step::new(0, Side::L, Side::R)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"[{"sq":0,"in":"L","out":"R"}]"#);
    }
}
