//! The labeled filling network C(κ, spin) and its dual prototype origami.
//!
//! The network consists of the chain A = a_1, a_1', a_2, …, a_g and the
//! curves b_i for i in the b-index set of κ. Horizontal curves are the a_k;
//! vertical curves are the a_k' and the selected b_i. Every crossing becomes
//! one unit square of the prototype, so cylinders of the prototype are
//! exactly the curves of the network.
//!
//! Two labelings exist. In `OneTwo` the chain is linear. In `Three` the
//! curves a_1' and a_2' both run from their own a-curve to a_3, so that
//! a_1, a_2 and a_3 meet the remaining chain through a trivalent junction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::origami_core::{cylinders, singularity_profile, CylDirection, Cylinder, Origami, Permutation};
use crate::spin_algebra::{arf_of_spin, gcd_of, genus_of_partition, Spin, SpinStructure};
use crate::winding::{spin_from_prototype, turning_number, vertex_loop, CurvePath, Side, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveName {
    A(usize),
    Ap(usize),
    B(usize),
    /// c_(i,j), stored with i < j ≤ g.
    C(usize, usize),
}

impl CurveName {
    /// b_i with the index reduced mod 2g − 2 into 1..=2g−2.
    pub fn b(i: i64, g: usize) -> CurveName {
        let m = 2 * g as i64 - 2;
        let t = i.rem_euclid(m);
        CurveName::B(if t == 0 { m as usize } else { t as usize })
    }

    /// c_(i,j), applying c_(2g−j, 2g−i) = c_(i,j) when j > g.
    pub fn c(i: usize, j: usize, g: usize) -> Result<CurveName> {
        let (i, j) = if j > g && 2 * g >= j && 2 * g >= i { (2 * g - j, 2 * g - i) } else { (i, j) };
        if i == 0 || i >= j || j > g {
            return Err(Error::InvalidInput(format!("c({i},{j}) is not a curve of genus {g}")));
        }
        Ok(CurveName::C(i, j))
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, CurveName::A(_))
    }
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveName::A(i) => write!(f, "a{i}"),
            CurveName::Ap(i) => write!(f, "a{i}'"),
            CurveName::B(i) => write!(f, "b{i}"),
            CurveName::C(i, j) => write!(f, "c({i},{j})"),
        }
    }
}

impl FromStr for CurveName {
    type Err = Error;
    fn from_str(s: &str) -> Result<CurveName> {
        let bad = || Error::InvalidInput(format!("bad curve name {s:?}"));
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        if let Some(rest) = s.strip_prefix('a') {
            if let Some(k) = rest.strip_suffix('\'').or_else(|| rest.strip_suffix('p')) {
                return Ok(CurveName::Ap(num(k)?));
            }
            return Ok(CurveName::A(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix('b') {
            return Ok(CurveName::B(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("c(").and_then(|t| t.strip_suffix(')')) {
            let (i, j) = rest.split_once(',').ok_or_else(bad)?;
            return Ok(CurveName::C(num(i.trim())?, num(j.trim())?));
        }
        Err(bad())
    }
}

impl Serialize for CurveName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CurveName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelingCase {
    OneTwo,
    Three,
}

/// Parity of ⌈g/2⌉: the spin realized by the linear labeling.
fn linear_parity(g: usize) -> Spin {
    Spin::from_bit((g.div_ceil(2) % 2) as u8)
}

pub fn labeling_case(kappa: &[usize], spin: Option<Spin>, g: usize) -> Result<LabelingCase> {
    let g0 = genus_of_partition(kappa)?;
    if g0 != g {
        return Err(Error::InvalidInput(format!("{kappa:?} is not a partition of 2g−2 = {}", 2 * g - 2)));
    }
    let r = gcd_of(kappa);
    match (r % 2 == 0, spin) {
        (false, None) => Ok(LabelingCase::OneTwo),
        (false, Some(_)) => Err(Error::InvalidInput(format!("spin given for odd r = {r}"))),
        (true, None) => Err(Error::InvalidInput(format!("spin required for even r = {r}"))),
        (true, Some(s)) if s == linear_parity(g) => Ok(LabelingCase::OneTwo),
        (true, Some(_)) => Ok(LabelingCase::Three),
    }
}

/// The spin that a labeling case realizes in genus g.
pub fn spin_of_case(g: usize, case: LabelingCase) -> Spin {
    let s = linear_parity(g);
    match case {
        LabelingCase::OneTwo => s,
        LabelingCase::Three => Spin::from_bit(1 - s.bit()),
    }
}

/// Indices 3 + k_1 + … + k_ℓ mod 2g − 2, in order of ℓ.
pub fn b_index_set(kappa: &[usize], g: usize) -> Vec<usize> {
    let m = 2 * g - 2;
    let mut s = 3;
    kappa
        .iter()
        .map(|&k| {
            s += k;
            match s % m {
                0 => m,
                x => x,
            }
        })
        .collect()
}

/// Vertical curves met by each a_k, in order, and the a_k met by each
/// vertical curve.
type Rows = Vec<Vec<CurveName>>;
type Cols = BTreeMap<CurveName, Vec<usize>>;

fn layout(g: usize, sel: &BTreeSet<usize>, case: LabelingCase) -> (Rows, Cols) {
    use CurveName::{Ap, B};
    let opt = |j: usize| if sel.contains(&j) { Some(B(j)) } else { None };
    let mut rows: Rows = vec![Vec::new(); g];
    let start = match case {
        LabelingCase::OneTwo => {
            rows[0] = [Some(Ap(1)), opt(1)].into_iter().flatten().collect();
            2
        }
        LabelingCase::Three => {
            rows[0] = [Some(Ap(1)), opt(2 * g - 2)].into_iter().flatten().collect();
            rows[1] = [Some(Ap(2)), opt(2)].into_iter().flatten().collect();
            rows[2] = [Some(Ap(1)), opt(1), Some(Ap(2)), opt(3), Some(Ap(3)), opt(2 * g - 3)]
                .into_iter()
                .flatten()
                .collect();
            4
        }
    };
    for k in start..g {
        let (x, y) = if k % 2 == 0 { (2 * g - k, k) } else { (k, 2 * g - k) };
        rows[k - 1] = [Some(Ap(k - 1)), opt(x), Some(Ap(k)), opt(y)].into_iter().flatten().collect();
    }
    rows[g - 1] = [Some(Ap(g - 1)), opt(g)].into_iter().flatten().collect();
    let mut cols = Cols::new();
    for m in 1..g {
        let pair = match (case, m) {
            (LabelingCase::Three, 1) => vec![1, 3],
            (LabelingCase::Three, 2) => vec![2, 3],
            _ => vec![m, m + 1],
        };
        cols.insert(Ap(m), pair);
    }
    for (k, row) in rows.iter().enumerate() {
        for &c in row {
            if let B(_) = c {
                cols.insert(c, vec![k + 1]);
            }
        }
    }
    (rows, cols)
}

/// Position of every b_j in the fully populated network: its row and the
/// vertical curve that follows it along that row.
fn master_slots(g: usize, case: LabelingCase) -> BTreeMap<usize, (usize, CurveName)> {
    let all: BTreeSet<usize> = (1..=2 * g - 2).collect();
    let (rows, _) = layout(g, &all, case);
    let mut out = BTreeMap::new();
    for (k, row) in rows.iter().enumerate() {
        for (t, &c) in row.iter().enumerate() {
            if let CurveName::B(j) = c {
                out.insert(j, (k + 1, row[(t + 1) % row.len()]));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strand {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfEdge {
    pub curve: CurveName,
    pub strand: Strand,
}

/// A crossing of a horizontal and a vertical curve. Half-edges are listed
/// in the cyclic order W, S, E, N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub horizontal: CurveName,
    pub vertical: CurveName,
    pub half_edges: [HalfEdge; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    SW,
    SE,
    NE,
    NW,
}

/// A complementary disk, as the cyclic list of vertex corners on its boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub corners: Vec<(usize, Corner)>,
}

impl Face {
    pub fn size(&self) -> usize {
        self.corners.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSystem {
    pub g: usize,
    pub kappa: Vec<usize>,
    pub spin: Option<Spin>,
    pub labeling: LabelingCase,
    pub curves: Vec<CurveName>,
    pub vertices: Vec<Vertex>,
    pub faces: Vec<Face>,
    #[serde(skip)]
    rows: Rows,
    #[serde(skip)]
    cols: Cols,
}

impl CurveSystem {
    pub fn rows(&self) -> &[Vec<CurveName>] {
        &self.rows
    }

    pub fn columns(&self) -> &BTreeMap<CurveName, Vec<usize>> {
        &self.cols
    }

    pub fn selected_b(&self) -> Vec<usize> {
        self.cols.keys().filter_map(|c| if let CurveName::B(j) = c { Some(*j) } else { None }).collect()
    }

    /// Pairs of distinct curves that cross, with multiplicity.
    pub fn crossings(&self) -> Vec<(CurveName, CurveName)> {
        self.vertices.iter().map(|v| (v.horizontal, v.vertical)).collect()
    }

    /// Intersection graph in DOT.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph curves {\n");
        for c in &self.curves {
            s.push_str(&format!("  \"{c}\";\n"));
        }
        for (a, b) in self.crossings() {
            s.push_str(&format!("  \"{a}\" -- \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }

    fn dual(&self) -> Result<(Origami, HashMap<(usize, CurveName), usize>)> {
        dual_origami(&self.rows, &self.cols)
    }
}

fn dual_origami(rows: &Rows, cols: &Cols) -> Result<(Origami, HashMap<(usize, CurveName), usize>)> {
    let mut sq = HashMap::new();
    for (k, row) in rows.iter().enumerate() {
        for &c in row {
            let n = sq.len();
            sq.insert((k + 1, c), n);
        }
    }
    let n = sq.len();
    let (mut h, mut v) = (vec![0; n], vec![0; n]);
    for (k, row) in rows.iter().enumerate() {
        for (t, &c) in row.iter().enumerate() {
            h[sq[&(k + 1, c)]] = sq[&(k + 1, row[(t + 1) % row.len()])];
        }
    }
    for (&c, ks) in cols {
        for (t, &k) in ks.iter().enumerate() {
            v[sq[&(k, c)]] = sq[&(ks[(t + 1) % ks.len()], c)];
        }
    }
    Ok((Origami::from_images(h, v)?, sq))
}

fn faces_of(o: &Origami) -> Vec<Face> {
    o.vertices()
        .iter()
        .map(|cyc| {
            let corners = vertex_loop(o, cyc[0])
                .steps
                .iter()
                .map(|s| {
                    let c = match s.entry {
                        Side::B => Corner::SW,
                        Side::R => Corner::SE,
                        Side::T => Corner::NE,
                        Side::L => Corner::NW,
                    };
                    (s.sq, c)
                })
                .collect();
            Face { corners }
        })
        .collect()
}

pub fn build_curve_system(kappa: &[usize], spin: Option<Spin>) -> Result<CurveSystem> {
    let g = genus_of_partition(kappa)?;
    let labeling = labeling_case(kappa, spin, g)?;
    build_with_case(kappa, spin, g, labeling)
}

fn build_with_case(kappa: &[usize], spin: Option<Spin>, g: usize, labeling: LabelingCase) -> Result<CurveSystem> {
    let min_g = if labeling == LabelingCase::Three { 4 } else { 3 };
    if g < min_g {
        return Err(Error::Unsupported(format!("genus {g} is below {min_g} for labeling {labeling:?}")));
    }
    let sel: BTreeSet<usize> = b_index_set(kappa, g).into_iter().collect();
    if sel.len() != kappa.len() {
        return Err(Error::InvalidInput(format!("b-indices of {kappa:?} collide")));
    }
    let (rows, cols) = layout(g, &sel, labeling);
    let mut curves: Vec<CurveName> = (1..=g).map(CurveName::A).collect();
    curves.extend(cols.keys().copied());
    let (o, sq) = dual_origami(&rows, &cols)?;
    let mut vertices = vec![None; o.n()];
    for (&(k, c), &q) in &sq {
        let a = CurveName::A(k);
        vertices[q] = Some(Vertex {
            horizontal: a,
            vertical: c,
            half_edges: [
                HalfEdge { curve: a, strand: Strand::In },
                HalfEdge { curve: c, strand: Strand::In },
                HalfEdge { curve: a, strand: Strand::Out },
                HalfEdge { curve: c, strand: Strand::Out },
            ],
        });
    }
    let faces = faces_of(&o);
    let mut sizes: Vec<usize> = faces.iter().map(Face::size).collect();
    sizes.sort_unstable();
    let mut want: Vec<usize> = kappa.iter().map(|k| 4 * (k + 1)).collect();
    want.sort_unstable();
    if sizes != want {
        return Err(Error::Construction { message: format!("faces do not realize {kappa:?}"), faces: sizes });
    }
    Ok(CurveSystem {
        g,
        kappa: kappa.to_vec(),
        spin,
        labeling,
        curves,
        vertices: vertices.into_iter().map(Option::unwrap).collect(),
        faces,
        rows,
        cols,
    })
}

/// Orientation signs (+1 keeps the drawn direction) with every
/// (horizontal, vertical) crossing positive.
pub fn orient_curves(cs: &CurveSystem, seed: i8) -> Result<BTreeMap<CurveName, i8>> {
    let mut adj: BTreeMap<CurveName, Vec<CurveName>> = cs.curves.iter().map(|&c| (c, Vec::new())).collect();
    let mut pairs = HashSet::new();
    for (a, b) in cs.crossings() {
        if !pairs.insert((a, b)) {
            return Err(Error::Construction { message: format!("{a} and {b} meet twice"), faces: vec![] });
        }
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    if pairs.len() + 1 != cs.curves.len() {
        return Err(Error::Construction { message: "intersection graph is not a tree".into(), faces: vec![] });
    }
    let mut sign = BTreeMap::new();
    let root = CurveName::A(1);
    sign.insert(root, seed.signum());
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        let sc = sign[&c];
        for &d in &adj[&c] {
            if let std::collections::btree_map::Entry::Vacant(e) = sign.entry(d) {
                // a drawn crossing is positive, so partners share a sign
                e.insert(sc);
                queue.push_back(d);
            }
        }
    }
    if sign.len() != cs.curves.len() {
        return Err(Error::Construction { message: "network is disconnected".into(), faces: vec![] });
    }
    Ok(sign)
}

/// The prototype origami dual to C(κ, spin), with the curve paths and
/// homology coordinates used throughout.
#[derive(Debug, Clone)]
pub struct Prototype {
    pub system: CurveSystem,
    pub origami: Origami,
    pub cylinders: Vec<(CurveName, Cylinder)>,
    sq: HashMap<(usize, CurveName), usize>,
    row_of: Vec<usize>,
    col_of: Vec<CurveName>,
    slots: BTreeMap<usize, (usize, CurveName)>,
    h: Vec<usize>,
    v: Vec<usize>,
    hi: Vec<usize>,
    vi: Vec<usize>,
    basis_winding: Vec<i64>,
}

pub fn build_prototype(kappa: &[usize], spin: Option<Spin>) -> Result<Prototype> {
    let cs = build_curve_system(kappa, spin)?;
    Prototype::from_system(cs)
}

/// Prototype for κ in a prescribed labeling case. For odd gcd only
/// `OneTwo` exists.
pub fn build_prototype_in_case(kappa: &[usize], case: LabelingCase) -> Result<Prototype> {
    let g = genus_of_partition(kappa)?;
    let spin = if gcd_of(kappa) % 2 == 0 {
        Some(spin_of_case(g, case))
    } else if case == LabelingCase::Three {
        return Err(Error::InvalidInput("odd gcd has only the linear labeling".into()));
    } else {
        None
    };
    build_prototype(kappa, spin)
}

impl Prototype {
    pub fn from_system(cs: CurveSystem) -> Result<Prototype> {
        orient_curves(&cs, 1)?;
        let (origami, sq) = cs.dual()?;
        let profile = singularity_profile(&origami);
        let mut want = cs.kappa.clone();
        want.sort_unstable();
        if profile != want {
            return Err(Error::Construction {
                message: format!("profile {profile:?} differs from {want:?}"),
                faces: cs.faces.iter().map(Face::size).collect(),
            });
        }
        let n = origami.n();
        let (mut row_of, mut col_of) = (vec![0; n], vec![CurveName::A(0); n]);
        for (&(k, c), &q) in &sq {
            row_of[q] = k;
            col_of[q] = c;
        }
        let mut cyl = Vec::new();
        for c in cylinders(&origami, CylDirection::Horizontal) {
            cyl.push((CurveName::A(row_of[c.rows[0][0]]), c));
        }
        for c in cylinders(&origami, CylDirection::Vertical) {
            cyl.push((col_of[c.rows[0][0]], c));
        }
        cyl.sort_by_key(|(name, _)| *name);
        let slots = master_slots(cs.g, cs.labeling);
        let h = origami.h().images().to_vec();
        let v = origami.v().images().to_vec();
        let hi = origami.h().inverse().images().to_vec();
        let vi = origami.v().inverse().images().to_vec();
        let mut p = Prototype {
            system: cs,
            origami,
            cylinders: cyl,
            sq,
            row_of,
            col_of,
            slots,
            h,
            v,
            hi,
            vi,
            basis_winding: Vec::new(),
        };
        p.basis_winding = (1..=p.g()).map(|k| turning_number(&p.origami, &p.b_path(p.dual_b(k)))).collect::<Result<_>>()?;
        let r = gcd_of(&p.system.kappa);
        if r % 2 == 0 {
            let phi = p.spin_structure(r)?;
            let got = Spin::from_bit(arf_of_spin(&phi)?);
            if Some(got) != p.system.spin {
                return Err(Error::Construction {
                    message: format!("parity {got:?} differs from requested {:?}", p.system.spin),
                    faces: p.system.faces.iter().map(Face::size).collect(),
                });
            }
        }
        Ok(p)
    }

    pub fn g(&self) -> usize {
        self.system.g
    }

    pub fn labeling(&self) -> LabelingCase {
        self.system.labeling
    }

    /// gcd of κ.
    pub fn r(&self) -> u64 {
        gcd_of(&self.system.kappa)
    }

    pub fn square(&self, k: usize, vertical: CurveName) -> Option<usize> {
        self.sq.get(&(k, vertical)).copied()
    }

    /// Horizontal and vertical curve through square `q`.
    pub fn curves_at(&self, q: usize) -> (CurveName, CurveName) {
        (CurveName::A(self.row_of[q]), self.col_of[q])
    }

    fn across(&self, q: usize, side: Side) -> (usize, Side) {
        let next = match side {
            Side::R => self.h[q],
            Side::T => self.v[q],
            Side::L => self.hi[q],
            Side::B => self.vi[q],
        };
        (next, side.opposite())
    }

    pub fn cylinder(&self, name: CurveName) -> Option<&Cylinder> {
        self.cylinders.iter().find(|(n, _)| *n == name).map(|(_, c)| c)
    }

    pub fn hcore(&self, k: usize) -> CurvePath {
        let q0 = self.sq[&(k, self.system.rows[k - 1][0])];
        let mut steps = vec![];
        let mut q = q0;
        loop {
            steps.push(Step::new(q, Side::L, Side::R));
            q = self.h[q];
            if q == q0 {
                return CurvePath::new(steps);
            }
        }
    }

    pub fn vcore(&self, name: CurveName) -> Option<CurvePath> {
        let ks = self.system.cols.get(&name)?;
        let q0 = self.sq[&(ks[0], name)];
        let mut steps = vec![];
        let mut q = q0;
        loop {
            steps.push(Step::new(q, Side::B, Side::T));
            q = self.v[q];
            if q == q0 {
                return Some(CurvePath::new(steps));
            }
        }
    }

    /// The square met by b_j: its own square when b_j is a cylinder,
    /// otherwise the square after its slot.
    fn b_square(&self, j: usize) -> usize {
        let (k, next) = self.slots[&j];
        match self.sq.get(&(k, CurveName::B(j))) {
            Some(&q) => q,
            None => self.sq[&(k, next)],
        }
    }

    /// A path representing b_j. Unselected b_j enter the square after their
    /// slot from below and return around the cone point at its top-left.
    pub fn b_path(&self, j: usize) -> CurvePath {
        if let Some(p) = self.vcore(CurveName::B(j)) {
            return p;
        }
        let (k, next) = self.slots[&j];
        let q0 = self.sq[&(k, next)];
        let mut steps = vec![Step::new(q0, Side::B, Side::T)];
        let (mut q, mut e) = self.across(q0, Side::T);
        while (q, e) != (q0, Side::B) {
            let o = match e {
                Side::B => Side::L,
                Side::R => Side::B,
                Side::T => Side::R,
                Side::L => Side::T,
            };
            steps.push(Step::new(q, e, o));
            (q, e) = self.across(q, o);
        }
        CurvePath::new(steps)
    }

    /// The b-curve dual to a_k in the geometric basis.
    pub fn dual_b(&self, k: usize) -> usize {
        if self.system.labeling == LabelingCase::Three && k == 1 {
            2 * self.g() - 2
        } else {
            k
        }
    }

    /// Paths â_1…â_g, b̂_1…b̂_g.
    pub fn basis_paths(&self) -> Vec<CurvePath> {
        let g = self.g();
        (1..=g).map(|k| self.hcore(k)).chain((1..=g).map(|k| self.b_path(self.dual_b(k)))).collect()
    }

    /// Integral homology coordinates in the basis (a_1…a_g, b_1…b_g).
    pub fn homology(&self, p: &CurvePath) -> Vec<i64> {
        let g = self.g();
        let mut x = vec![0i64; 2 * g];
        for k in 1..=g {
            let e = self.b_square(self.dual_b(k));
            let mut t = 0;
            for s in &p.steps {
                if s.exit == Side::R && self.h[s.sq] == e {
                    t += 1;
                }
                if s.exit == Side::L && s.sq == e {
                    t -= 1;
                }
            }
            x[k - 1] = t;
        }
        for s in &p.steps {
            let k = self.row_of[s.sq];
            if s.exit == Side::T {
                x[g + self.row_of[self.v[s.sq]] - 1] += 1;
            }
            if s.exit == Side::B {
                x[g + k - 1] -= 1;
            }
        }
        x
    }

    /// Framed class mod r: homology coordinates then the fibre coefficient.
    pub fn framed(&self, p: &CurvePath, r: u64) -> Result<Vec<u64>> {
        let hom = self.homology(p);
        let g = self.g();
        let wn = turning_number(&self.origami, p)?;
        let k = wn - (0..g).map(|i| hom[g + i] * self.basis_winding[i]).sum::<i64>();
        let ri = r as i64;
        Ok(hom.iter().chain(std::iter::once(&k)).map(|x| x.rem_euclid(ri) as u64).collect())
    }

    pub fn spin_structure(&self, r: u64) -> Result<SpinStructure> {
        spin_from_prototype(&self.origami, &self.basis_paths(), r)
    }

    /// Boundary of a regular neighbourhood of the curves in `k`, oriented
    /// with the neighbourhood on the left.
    pub fn boundary_walks(&self, k: &[CurveName]) -> Vec<CurvePath> {
        let k: HashSet<CurveName> = k.iter().copied().collect();
        let n = self.origami.n();
        let in_k = |q: usize| (k.contains(&CurveName::A(self.row_of[q])), k.contains(&self.col_of[q]));
        let mut states = Vec::new();
        for q in 0..n {
            match in_k(q) {
                (true, true) => states.extend([Side::L, Side::B, Side::R, Side::T].map(|e| (q, e))),
                (true, false) => states.extend([(q, Side::L), (q, Side::R)]),
                (false, true) => states.extend([(q, Side::B), (q, Side::T)]),
                _ => {}
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for st in states {
            if seen.contains(&st) {
                continue;
            }
            let mut steps = Vec::new();
            let mut cur = st;
            while seen.insert(cur) {
                let (q, e) = cur;
                let o = match in_k(q) {
                    (true, true) => match e {
                        Side::L => Side::B,
                        Side::B => Side::R,
                        Side::R => Side::T,
                        Side::T => Side::L,
                    },
                    _ => e.opposite(),
                };
                steps.push(Step::new(q, e, o));
                cur = self.across(q, o);
            }
            out.push(CurvePath::new(steps));
        }
        out
    }

    /// Chain whose neighbourhood boundary contains c_(i,j).
    pub fn c_chain(&self, i: usize, j: usize) -> Vec<CurveName> {
        use CurveName::{Ap, A};
        if self.system.labeling == LabelingCase::Three && i == 1 {
            if j == 2 {
                return vec![A(1), Ap(1), A(3), Ap(2), A(2)];
            }
            let mut ch = vec![A(1), Ap(1)];
            ch.extend(chain_slice(3, j));
            return ch;
        }
        chain_slice(i, j)
    }

    /// The curve c_(i,j): one of the two boundary walks of its chain, picked
    /// by which side of the b-curve at a_i it runs.
    pub fn c_path(&self, i: usize, j: usize) -> Result<CurvePath> {
        let g = self.g();
        let CurveName::C(i, j) = CurveName::c(i, j, g)? else { unreachable!() };
        let three_start = self.system.labeling == LabelingCase::Three && i == 1;
        if self.system.labeling == LabelingCase::Three && i == 2 && j == 2 {
            return Err(Error::InvalidInput("c(2,2) is not a curve".into()));
        }
        let bi = if three_start { 2 * g - 2 } else { i };
        let (k, next) = self.slots[&bi];
        let q = self.sq[&(k, next)];
        let walks = self.boundary_walks(&self.c_chain(i, j));
        if walks.len() != 2 {
            return Err(Error::Construction { message: format!("c({i},{j}) chain has {} boundary walks", walks.len()), faces: vec![] });
        }
        let lo = walks.iter().position(|w| w.steps.iter().any(|s| s.sq == q && s.entry == Side::L)).unwrap_or(0);
        if three_start || i % 2 == 0 {
            Ok(walks[1 - lo].clone())
        } else {
            Ok(walks[lo].reversed())
        }
    }

    pub fn path_of(&self, name: CurveName) -> Result<CurvePath> {
        let g = self.g();
        match name {
            CurveName::A(k) if (1..=g).contains(&k) => Ok(self.hcore(k)),
            CurveName::Ap(k) if (1..g).contains(&k) => Ok(self.vcore(name).unwrap()),
            CurveName::B(j) if (1..=2 * g - 2).contains(&j) => Ok(self.b_path(j)),
            CurveName::C(i, j) => self.c_path(i, j),
            _ => Err(Error::InvalidInput(format!("{name} is not a curve of genus {g}"))),
        }
    }

    pub fn framed_of(&self, name: CurveName, r: u64) -> Result<Vec<u64>> {
        self.framed(&self.path_of(name)?, r)
    }

    pub fn homology_of(&self, name: CurveName) -> Result<Vec<i64>> {
        Ok(self.homology(&self.path_of(name)?))
    }

    /// Geometric intersection number of two named curves of A ∪ {b_j}.
    /// Each b_j crosses only the a-curve of its slot, once.
    pub fn geometric_intersection(&self, x: CurveName, y: CurveName) -> Option<usize> {
        use CurveName::*;
        let g = self.g();
        let meets_a = |c: CurveName, k: usize| -> Option<usize> {
            match c {
                Ap(m) => Some(self.system.cols.get(&Ap(m))?.contains(&k) as usize),
                B(j) => Some((self.slots.get(&j)?.0 == k) as usize),
                _ => None,
            }
        };
        match (x, y) {
            (A(i), A(j)) if i <= g && j <= g => Some(0),
            (A(k), c) | (c, A(k)) if k <= g => meets_a(c, k),
            (Ap(_) | B(_), Ap(_) | B(_)) => Some(0),
            _ => None,
        }
    }

    /// Boundary families with known Euler characteristic, each a list of
    /// oriented paths summing to zero in homology.
    pub fn coherence_families(&self) -> Result<Vec<(Vec<CurveName>, Vec<CurvePath>, i64)>> {
        use CurveName::{Ap, B};
        let g = self.g();
        let mut fams: Vec<(Vec<CurveName>, i64)> = vec![(vec![B(2), Ap(2), B(3)], -1)];
        if self.system.labeling == LabelingCase::OneTwo {
            fams.push((vec![B(1), Ap(1), Ap(2), B(3)], -2));
        }
        for i in 4..=g {
            let mut f = vec![B(3)];
            f.extend((3..i).map(Ap));
            f.push(B(i));
            fams.push((f, 3 - i as i64));
        }
        let mut out = Vec::new();
        for (names, chi) in fams {
            let paths: Vec<CurvePath> = names.iter().map(|&c| self.path_of(c)).collect::<Result<_>>()?;
            let homs: Vec<Vec<i64>> = paths.iter().map(|p| self.homology(p)).collect();
            let m = paths.len();
            let signs = (0..1u32 << (m - 1))
                .map(|bits| (0..m).map(|t| if t > 0 && bits >> (t - 1) & 1 == 1 { -1 } else { 1 }).collect::<Vec<i64>>())
                .find(|s| (0..2 * g).all(|c| (0..m).map(|t| s[t] * homs[t][c]).sum::<i64>() == 0))
                .ok_or_else(|| Error::Construction { message: format!("{names:?} is not null-homologous"), faces: vec![] })?;
            // b_1 and b_2 lie to the left of b_3, the a'_3 … chains to its right;
            // orient every family with its subsurface on the left.
            let k3 = names.iter().position(|&n| n == B(3)).unwrap_or(0);
            let want = if names.contains(&B(1)) || names.contains(&B(2)) { 1 } else { -1 };
            let flip = if signs[k3] == want { 1 } else { -1 };
            let oriented = paths
                .iter()
                .zip(&signs)
                .map(|(p, &s)| if s * flip < 0 { p.reversed() } else { p.clone() })
                .collect();
            out.push((names, oriented, chi));
        }
        Ok(out)
    }
}

fn chain_slice(i: usize, j: usize) -> Vec<CurveName> {
    let mut out = vec![CurveName::A(i)];
    for m in i..j {
        out.push(CurveName::Ap(m));
        out.push(CurveName::A(m + 1));
    }
    out
}

/// Symplectic pairing Σ x_i y_{g+i} − x_{g+i} y_i.
pub fn intersection_form(x: &[i64], y: &[i64]) -> i64 {
    let g = x.len() / 2;
    (0..g).map(|i| x[i] * y[g + i] - x[g + i] * y[i]).sum()
}

/// Rank over Q, by fraction-free elimination.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let (a, b) = (m[rank][c], m[i][c]);
                for t in 0..cols {
                    m[i][t] = a * m[i][t] - b * m[rank][t];
                }
                let gcd = m[i].iter().fold(0i128, |acc, &x| num_gcd(acc, x.abs()));
                if gcd > 1 {
                    m[i].iter_mut().for_each(|x| *x /= gcd);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn num_gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

/// A curve outside the network, described by its classes and by its
/// geometric intersections with named curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraCurve {
    pub name: String,
    pub homology: Vec<i64>,
    pub framed: Vec<u64>,
    pub meets: Vec<(CurveName, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalterCondition {
    pub condition: u8,
    pub passed: bool,
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalterReport {
    pub g: usize,
    pub r: u64,
    pub labeling: LabelingCase,
    pub conditions: Vec<SalterCondition>,
    pub passed: bool,
}

#[derive(Clone, Copy)]
enum Member<'a> {
    Named(CurveName),
    Extra(&'a ExtraCurve),
}

impl Member<'_> {
    fn label(&self) -> String {
        match self {
            Member::Named(c) => c.to_string(),
            Member::Extra(e) => e.name.clone(),
        }
    }
}

/// Checks the four generation hypotheses on C(κ, spin) ∪ extra for
/// κ = (r, …, r) with r < g − 2.
pub fn salter_conditions_check(p: &Prototype, phi: &SpinStructure, extra: &[ExtraCurve]) -> Result<SalterReport> {
    use CurveName::{Ap, A, B};
    let g = p.g();
    let r = phi.r;
    if p.system.kappa.iter().any(|&k| k as u64 != r) {
        return Err(Error::InvalidInput(format!("κ = {:?} is not ({r}, …, {r})", p.system.kappa)));
    }
    if r + 2 >= g as u64 {
        return Err(Error::Regime(format!("r = {r} violates r < g − 2 = {}", g - 2)));
    }
    let ru = r as usize;
    let meets = |x: Member, y: Member| -> usize {
        match (x, y) {
            (Member::Named(a), Member::Named(b)) => p.geometric_intersection(a, b).unwrap_or(0),
            (Member::Named(a), Member::Extra(e)) | (Member::Extra(e), Member::Named(a)) => {
                e.meets.iter().filter(|(c, _)| *c == a).map(|(_, n)| n).sum()
            }
            _ => 0,
        }
    };
    let hom = |x: Member| -> Result<Vec<i64>> {
        match x {
            Member::Named(c) => p.homology_of(c),
            Member::Extra(e) => Ok(e.homology.clone()),
        }
    };
    let mut conditions = Vec::new();

    // (1) φ vanishes on every curve
    let mut nonzero = Vec::new();
    for &c in &p.system.curves {
        if phi.eval(&p.framed_of(c, r)?) != 0 {
            nonzero.push(c.to_string());
        }
    }
    for e in extra {
        if phi.eval(&e.framed) != 0 {
            nonzero.push(e.name.clone());
        }
    }
    conditions.push(SalterCondition {
        condition: 1,
        passed: nonzero.is_empty(),
        detail: format!("{} curves, φ ≠ 0 on {:?}", p.system.curves.len() + extra.len(), nonzero),
        witness: nonzero,
    });

    // (2) b_3, a_2' as leaves on a_3, then the chain up to a_{r+3}
    let mut d: Vec<CurveName> = vec![B(3), Ap(2), A(3)];
    for m in 3..ru + 3 {
        d.push(Ap(m));
        d.push(A(m + 1));
    }
    let mut expect = vec![(B(3), A(3)), (Ap(2), A(3))];
    for w in d[2..].windows(2) {
        expect.push((w[0], w[1]));
    }
    let mut shape_ok = d.iter().all(|c| p.system.curves.contains(c));
    for (s, &x) in d.iter().enumerate() {
        for &y in &d[s + 1..] {
            let want = expect.contains(&(x, y)) || expect.contains(&(y, x));
            shape_ok &= meets(Member::Named(x), Member::Named(y)) == want as usize;
        }
    }
    let companion = B(ru + 3);
    let companion_ok = p.system.curves.contains(&companion)
        && d.iter().all(|&c| meets(Member::Named(companion), Member::Named(c)) == (c == A(ru + 3)) as usize);
    conditions.push(SalterCondition {
        condition: 2,
        passed: shape_ok && companion_ok && d.len() == 2 * ru + 3,
        witness: d.iter().map(|c| c.to_string()).chain([companion.to_string()]).collect(),
        detail: format!("{} curves in the tree, companion {companion} meets only a{}", d.len(), ru + 3),
    });

    // (3) d = b_2 meets a_2 once
    let dcurve = B(2);
    let once = meets(Member::Named(dcurve), Member::Named(A(2))) == 1
        && intersection_form(&p.homology_of(dcurve)?, &p.homology_of(A(2))?).abs() == 1;
    conditions.push(SalterCondition {
        condition: 3,
        passed: once,
        witness: vec![dcurve.to_string(), "a2".into()],
        detail: "i(b2, a2) = 1".into(),
    });

    // (4) a connected arboreal network filling the complement of d
    let mut n: Vec<Member> = (1..=g)
        .map(A)
        .chain((1..g).map(Ap))
        .filter(|&c| meets(Member::Named(c), Member::Named(dcurve)) == 0)
        .map(Member::Named)
        .collect();
    n.push(Member::Named(B(3)));
    n.extend(extra.iter().map(Member::Extra));
    let k = n.len();
    let mut edges = 0;
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut simple = true;
    for s in 0..k {
        for t in s + 1..k {
            let m = meets(n[s], n[t]);
            simple &= m <= 1;
            if m > 0 {
                edges += m;
                let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                parent[a] = b;
            }
        }
    }
    let roots: HashSet<usize> = (0..k).map(|x| find(&mut parent, x)).collect();
    let tree = simple && roots.len() == 1 && edges + 1 == k;
    let disjoint = n.iter().all(|&x| meets(x, Member::Named(dcurve)) == 0);
    let homs: Vec<Vec<i64>> = n.iter().map(|&x| hom(x)).collect::<Result<_>>()?;
    let gram: Vec<Vec<i64>> = homs.iter().map(|x| homs.iter().map(|y| intersection_form(x, y)).collect()).collect();
    let form_rank = rational_rank(&gram);
    let span_rank = rational_rank(&homs);
    let fills = form_rank == 2 * g - 2 && span_rank == 2 * g - 1;
    conditions.push(SalterCondition {
        condition: 4,
        passed: tree && disjoint && fills,
        witness: n.iter().map(Member::label).collect(),
        detail: format!(
            "tree {tree}, disjoint from b2 {disjoint}, form rank {form_rank} (want {}), span rank {span_rank} (want {})",
            2 * g - 2,
            2 * g - 1
        ),
    });
    let passed = conditions.iter().all(|c| c.passed);
    Ok(SalterReport { g, r, labeling: p.labeling(), conditions, passed })
}

/// Relabeling that carries squares of `p` to those of an isomorphic copy.
pub fn transport_path(path: &CurvePath, pi: &Permutation) -> CurvePath {
    CurvePath::new(path.steps.iter().map(|s| Step::new(pi.apply(s.sq), s.entry, s.exit)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ["a3", "a3'", "b5", "c(2,5)"] {
            assert_eq!(s.parse::<CurveName>().unwrap().to_string(), s);
        }
        assert_eq!("a3p".parse::<CurveName>().unwrap(), CurveName::Ap(3));
        assert!(CurveName::c(5, 9, 7).is_err());
        assert_eq!(CurveName::c(9, 12, 7).unwrap(), CurveName::C(2, 5));
        assert_eq!(CurveName::b(13, 7), CurveName::B(1));
        assert_eq!(CurveName::b(0, 7), CurveName::B(12));
        assert!("x1".parse::<CurveName>().is_err());
    }

    #[test]
    fn labeling_examples() {
        assert_eq!(labeling_case(&[1; 6], None, 4).unwrap(), LabelingCase::OneTwo);
        assert_eq!(labeling_case(&[2, 2], Some(Spin::Even), 3).unwrap(), LabelingCase::OneTwo);
        assert_eq!(labeling_case(&[2, 2], Some(Spin::Odd), 3).unwrap(), LabelingCase::Three);
        assert!(labeling_case(&[3, 3], Some(Spin::Odd), 4).is_err());
        assert!(labeling_case(&[2, 4], None, 4).is_err());
    }

    #[test]
    fn b_indices() {
        assert_eq!(b_index_set(&[12], 7), vec![3]);
        assert_eq!(b_index_set(&[5, 7], 7), vec![8, 3]);
        assert_eq!(b_index_set(&[2, 2, 2], 4), vec![5, 1, 3]);
    }

    #[test]
    fn genus_three_prototype() {
        let p = build_prototype(&[2, 2], Some(Spin::Even)).unwrap();
        assert_eq!(singularity_profile(&p.origami), vec![2, 2]);
        let phi = p.spin_structure(2).unwrap();
        assert_eq!(phi.values, vec![0, 0, 0, 0, 1, 0]);
        assert_eq!(arf_of_spin(&phi).unwrap(), 0);
    }

    #[test]
    fn single_zero_has_one_face() {
        let cs = build_curve_system(&[12], Some(Spin::Odd)).unwrap();
        assert_eq!(cs.selected_b(), vec![3]);
        assert_eq!(cs.faces.len(), 1);
        assert_eq!(cs.faces[0].size(), 4 * 13);
        assert_eq!(cs.curves.len(), 2 * 7 - 1 + 1);
    }

    #[test]
    fn orientation_is_global() {
        let cs = build_curve_system(&[1; 8], None).unwrap();
        let plus = orient_curves(&cs, 1).unwrap();
        let minus = orient_curves(&cs, -1).unwrap();
        assert!(plus.values().all(|&s| s == 1));
        assert!(minus.values().all(|&s| s == -1));
    }

    #[test]
    fn basis_homology_is_standard() {
        for (kappa, spin) in [(vec![6], Some(Spin::Odd)), (vec![6], Some(Spin::Even)), (vec![1, 2, 3], None)] {
            let p = build_prototype(&kappa, spin).unwrap();
            for (t, path) in p.basis_paths().iter().enumerate() {
                let mut e = vec![0; 8];
                e[t] = 1;
                assert_eq!(p.homology(path), e);
            }
        }
    }

    #[test]
    fn ranks() {
        assert_eq!(rational_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rational_rank(&[vec![0, 1], vec![-1, 0]]), 2);
        assert_eq!(rational_rank(&[]), 0);
    }
}
