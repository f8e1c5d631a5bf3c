//! Square-tiled surfaces as pairs of permutations.
//!
//! Square `i` is glued on its right side to `h(i)` and on its top side to
//! `v(i)`. Cone points are the cycles of the commutator
//! `c = v ∘ h ∘ v⁻¹ ∘ h⁻¹`, read right to left; the cycle through `i` is the
//! vertex at the bottom-left corner of square `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.images
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation of `0..n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for (k, &x) in cyc.iter().enumerate() {
                if x >= n {
                    return Err(Error::InvalidInput(format!("cycle entry {x} out of range")));
                }
                images[x] = cyc[(k + 1) % cyc.len()];
            }
        }
        Permutation::new(images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Origami {
    h: Permutation,
    v: Permutation,
}

#[derive(Serialize, Deserialize)]
struct OrigamiJson {
    n: usize,
    h: Vec<usize>,
    v: Vec<usize>,
}

impl Serialize for Origami {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrigamiJson { n: self.n(), h: self.h.images.clone(), v: self.v.images.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Origami {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OrigamiJson::deserialize(d)?;
        if raw.h.len() != raw.n || raw.v.len() != raw.n {
            return Err(serde::de::Error::custom("permutation length differs from n"));
        }
        let h = Permutation::new(raw.h).map_err(serde::de::Error::custom)?;
        let v = Permutation::new(raw.v).map_err(serde::de::Error::custom)?;
        Origami::new(h, v).map_err(serde::de::Error::custom)
    }
}

impl Origami {
    /// Validates that `h` and `v` act transitively on the squares.
    pub fn new(h: Permutation, v: Permutation) -> Result<Self> {
        if h.len() != v.len() {
            return Err(Error::InvalidInput("h and v have different lengths".into()));
        }
        if h.is_empty() {
            return Err(Error::InvalidInput("origami needs at least one square".into()));
        }
        let o = Origami { h, v };
        if !o.is_connected() {
            return Err(Error::InvalidInput("origami is disconnected".into()));
        }
        Ok(o)
    }

    pub fn from_images(h: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        Origami::new(Permutation::new(h)?, Permutation::new(v)?)
    }

    /// The one-square torus.
    pub fn torus() -> Self {
        Origami { h: Permutation::identity(1), v: Permutation::identity(1) }
    }

    /// Three squares in an L: h = (0 1), v = (0 2).
    pub fn l_shape() -> Self {
        Origami { h: Permutation { images: vec![1, 0, 2] }, v: Permutation { images: vec![2, 1, 0] } }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &Permutation {
        &self.h
    }

    pub fn v(&self) -> &Permutation {
        &self.v
    }

    fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let (hi, vi) = (self.h.inverse(), self.v.inverse());
        while let Some(x) = stack.pop() {
            for y in [self.h.apply(x), self.v.apply(x), hi.apply(x), vi.apply(x)] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn commutator(&self) -> Permutation {
        let (hi, vi) = (self.h.inverse(), self.v.inverse());
        let images = (0..self.n()).map(|i| self.v.apply(self.h.apply(vi.apply(hi.apply(i))))).collect();
        Permutation { images }
    }

    /// Vertices of the square tiling, each listed as the squares whose
    /// bottom-left corner it is.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        self.commutator().cycles()
    }

    /// Cone angle in multiples of 2π at the bottom-left corner of each square.
    pub fn corner_angles(&self) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for cyc in self.vertices() {
            for &q in &cyc {
                out[q] = cyc.len();
            }
        }
        out
    }

    /// Euler characteristic of the square complex: V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices().len() as i64 - 2 * self.n() as i64 + self.n() as i64
    }
}

pub fn singularity_profile(o: &Origami) -> Vec<usize> {
    let mut k: Vec<usize> = o.vertices().iter().map(|c| c.len() - 1).filter(|&x| x > 0).collect();
    k.sort_unstable();
    k
}

pub fn genus(o: &Origami) -> usize {
    1 + singularity_profile(o).iter().sum::<usize>() / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CylDirection {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub direction: CylDirection,
    /// Rows from bottom to top (left to right for vertical cylinders). Each
    /// row starts with a square whose successor in the next row is aligned.
    pub rows: Vec<Vec<usize>>,
    pub circumference: usize,
    pub height: usize,
}

impl Cylinder {
    pub fn squares(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().flatten().copied()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.rows.iter().any(|r| r.contains(&q))
    }
}

/// Maximal cylinders in the given direction. On the torus every vertex is
/// treated as marked, so each row is its own cylinder.
pub fn cylinders(o: &Origami, dir: CylDirection) -> Vec<Cylinder> {
    let (along, across) = match dir {
        CylDirection::Horizontal => (&o.h, &o.v),
        CylDirection::Vertical => (&o.v, &o.h),
    };
    let angles = o.corner_angles();
    let torus = genus(o) == 1;
    let rows = along.cycles();
    let mut row_of = vec![0; o.n()];
    for (k, r) in rows.iter().enumerate() {
        for &q in r {
            row_of[q] = k;
        }
    }
    // a row continues the cylinder below it when its lower boundary is free of cone points
    let free_below: Vec<bool> = rows.iter().map(|r| !torus && r.iter().all(|&q| angles[q] == 1)).collect();
    let mut used = vec![false; rows.len()];
    let mut out = Vec::new();
    for start in 0..rows.len() {
        if used[start] || free_below[start] {
            continue;
        }
        let mut stack = vec![rows[start].clone()];
        used[start] = true;
        loop {
            let top = stack.last().unwrap();
            let above = row_of[across.apply(top[0])];
            if used[above] || !free_below[above] {
                break;
            }
            let first = across.apply(top[0]);
            let len = rows[above].len();
            let pos = rows[above].iter().position(|&q| q == first).unwrap();
            let aligned: Vec<usize> = (0..len).map(|t| rows[above][(pos + t) % len]).collect();
            used[above] = true;
            stack.push(aligned);
        }
        let circumference = stack[0].len();
        out.push(Cylinder { direction: dir, height: stack.len(), circumference, rows: stack });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shear {
    pub origami: Origami,
    /// Exponent of the Dehn twist along the core that the marking picks up.
    pub exponent: i32,
}

/// Full shear of `c` by its inverse modulus. Row `k` of the cylinder is
/// displaced by `k·w/h` squares along the core.
pub fn shear_cylinder(o: &Origami, c: &Cylinder) -> Result<Shear> {
    let fresh = cylinders(o, c.direction);
    if !fresh.iter().any(|f| same_cylinder(f, c)) {
        return Err(Error::InvalidInput("not a cylinder of this origami".into()));
    }
    if c.circumference % c.height != 0 {
        return Err(Error::Unsupported(format!(
            "shear of a {}x{} cylinder is not square-tiled",
            c.circumference, c.height
        )));
    }
    let s = c.circumference / c.height;
    let w = c.circumference;
    let (along, across) = match c.direction {
        CylDirection::Horizontal => (o.h.clone(), o.v.clone()),
        CylDirection::Vertical => (o.v.clone(), o.h.clone()),
    };
    let mut new_across = across.images.clone();
    let top = c.height - 1;
    for (k, row) in c.rows.iter().enumerate() {
        for p in 0..w {
            new_across[row[p]] = if k < top {
                c.rows[k + 1][(p + w - s % w) % w]
            } else {
                across.apply(row[(p + top * s) % w])
            };
        }
    }
    let new_across = Permutation::new(new_across)?;
    let origami = match c.direction {
        CylDirection::Horizontal => Origami::new(along, new_across)?,
        CylDirection::Vertical => Origami::new(new_across, along)?,
    };
    Ok(Shear { origami, exponent: -1 })
}

fn same_cylinder(a: &Cylinder, b: &Cylinder) -> bool {
    let mut x: Vec<usize> = a.squares().collect();
    let mut y: Vec<usize> = b.squares().collect();
    x.sort_unstable();
    y.sort_unstable();
    a.direction == b.direction && x == y
}

/// Finds π with π∘h1∘π⁻¹ = h2 and π∘v1∘π⁻¹ = v2.
pub fn are_isomorphic(o1: &Origami, o2: &Origami) -> Option<Permutation> {
    let n = o1.n();
    if n != o2.n() {
        return None;
    }
    'target: for t in 0..n {
        let mut pi = vec![usize::MAX; n];
        pi[0] = t;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for (p1, p2) in [(&o1.h, &o2.h), (&o1.v, &o2.v)] {
                let y = p1.apply(x);
                let image = p2.apply(pi[x]);
                if pi[y] == usize::MAX {
                    pi[y] = image;
                    stack.push(y);
                } else if pi[y] != image {
                    continue 'target;
                }
            }
        }
        if let Ok(p) = Permutation::new(pi) {
            return Some(p);
        }
    }
    None
}
