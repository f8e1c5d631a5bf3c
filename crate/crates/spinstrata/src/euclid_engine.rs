//! Twist words realizing curve addition and subtraction, and the Euclidean
//! reduction of a stratum's generating set to that of (r, …, r).
//!
//! Words are written functionally: the last letter acts first. Every word
//! is built from block-swap braids on a chain of a-curves, lifted letterwise
//! to Dehn twists, and is accepted only after the framed and symplectic
//! checks of [`Verifier`] pass.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::curve_system::{
    b_index_set, build_prototype_in_case, labeling_case, CurveName, ExtraCurve, LabelingCase, Prototype,
};
use crate::error::{Error, Result};
use crate::framed_rep::{Alphabet, FramedClass};
use crate::origami_core::shear_cylinder;
use crate::spin_algebra::{gcd, gcd_of, genus_of_partition, Spin, SpinStructure};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwistWord {
    pub letters: Vec<(CurveName, i8)>,
}

impl TwistWord {
    pub fn new(letters: Vec<(CurveName, i8)>) -> Self {
        TwistWord { letters }
    }

    pub fn identity() -> Self {
        TwistWord::default()
    }

    pub fn letter(name: CurveName, e: i8) -> Self {
        TwistWord { letters: vec![(name, e)] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        TwistWord { letters: self.letters.iter().rev().map(|&(n, e)| (n, -e)).collect() }
    }

    /// f·w·f⁻¹.
    pub fn conjugate_by(&self, f: &TwistWord) -> Self {
        f.clone() + self.clone() + f.inverse()
    }

    /// Replaces every letter `name^e` by `sub·name'^e·sub⁻¹` with `name'`
    /// given by `with`.
    pub fn substitute(&self, name: CurveName, sub: &TwistWord, with: CurveName) -> Self {
        let mut out = Vec::new();
        for &(n, e) in &self.letters {
            if n == name {
                out.extend(sub.letters.iter().copied());
                out.push((with, e));
                out.extend(sub.inverse().letters);
            } else {
                out.push((n, e));
            }
        }
        TwistWord { letters: out }
    }

    pub fn names(&self) -> BTreeSet<CurveName> {
        self.letters.iter().map(|&(n, _)| n).collect()
    }

    /// The word with the letter at `k` removed.
    pub fn without(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.remove(k);
        TwistWord { letters }
    }
}

impl Add for TwistWord {
    type Output = TwistWord;

    fn add(mut self, rhs: TwistWord) -> TwistWord {
        self.letters.extend(rhs.letters);
        self
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.letters.iter().map(|(n, e)| format!("T({n})^{e}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<(usize, i8)>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<(usize, i8)>) -> Result<Self> {
        if let Some(&(s, _)) = letters.iter().find(|&&(s, e)| s == 0 || s >= strands || e.abs() != 1) {
            return Err(Error::InvalidInput(format!("σ_{s} on {strands} strands")));
        }
        Ok(BraidWord { strands, letters })
    }
}

/// Strands a..=b pass across strands b+1..=c. Empty when a = b + 1 or b = c.
pub fn block_swap(strands: usize, a: usize, b: usize, c: usize, e: i8) -> Result<BraidWord> {
    if a == 0 || a > b + 1 || b > c || c > strands {
        return Err(Error::InvalidInput(format!("block swap ({a},{b},{c}) on {strands} strands")));
    }
    let m = c - b;
    let mut letters = Vec::new();
    for p in (a..=b).rev() {
        for s in p..p + m {
            letters.push((s, e));
        }
    }
    letters.reverse();
    BraidWord::new(strands, letters)
}

/// σ_k ↦ T(chain_k).
pub fn braid_to_twists(b: &BraidWord, chain: &[CurveName]) -> Result<TwistWord> {
    if b.strands != chain.len() + 1 {
        return Err(Error::InvalidInput(format!("{} strands against a chain of {}", b.strands, chain.len())));
    }
    Ok(TwistWord { letters: b.letters.iter().map(|&(s, e)| (chain[s - 1], e)).collect() })
}

fn raw(chain: &[CurveName], a: usize, b: usize, c: usize, e: i8) -> TwistWord {
    let braid = block_swap(chain.len() + 1, a, b, c, e).expect("block swap inside the chain");
    braid_to_twists(&braid, chain).expect("strand count")
}

/// a_1, a_1', a_2, …, a_g.
pub fn a_chain(g: usize) -> Vec<CurveName> {
    let mut ch = Vec::new();
    for k in 1..=g {
        ch.push(CurveName::A(k));
        if k < g {
            ch.push(CurveName::Ap(k));
        }
    }
    ch
}

/// The three hyperelliptic subchains used in the second labeling.
pub fn case_three_chains(g: usize) -> [Vec<CurveName>; 3] {
    use CurveName::{Ap, A};
    let tail = a_chain(g)[4..].to_vec();
    [
        [A(2), Ap(2)].into_iter().chain(tail.iter().copied()).collect(),
        [A(1), Ap(1)].into_iter().chain(tail).collect(),
        vec![A(1), Ap(1), A(3), Ap(2), A(2)],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Both indices on the lower arc 1..=g of a chain model.
    Bottom,
    /// Both indices on the upper arc g..=2g−1.
    Top,
    /// The arc passes over g.
    Right,
    /// The arc passes over 2g−2 and 1.
    Left,
    /// The arc meets all three subchains of the second labeling.
    Wrap,
}

impl Regime {
    pub fn sides(self) -> usize {
        match self {
            Regime::Bottom | Regime::Top => 1,
            Regime::Right | Regime::Left => 2,
            Regime::Wrap => 3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum NameMap {
    Same,
    Shift,
    ShiftKeepOne,
}

/// A hyperelliptic chain viewed as the linear model with n curves of each
/// row: b-indices 1..=2n−2 around it.
#[derive(Debug, Clone)]
struct Model {
    chain: Vec<CurveName>,
    n: usize,
    mirror: bool,
    names: NameMap,
}

struct ModelPair {
    regime: Regime,
    c: CurveName,
    cert: TwistWord,
    mv: TwistWord,
}

impl Model {
    fn new(chain: Vec<CurveName>, mirror: bool, names: NameMap) -> Model {
        let n = chain.iter().filter(|c| matches!(c, CurveName::A(_))).count();
        Model { chain, n, mirror, names }
    }

    fn len(&self) -> i64 {
        2 * self.n as i64 - 2
    }

    fn cname(&self, p: i64, q: i64) -> CurveName {
        let (p, q) = (p as usize, q as usize);
        match self.names {
            NameMap::Same => CurveName::C(p, q),
            NameMap::Shift => CurveName::C(p + 1, q + 1),
            NameMap::ShiftKeepOne => CurveName::C(if p == 1 { 1 } else { p + 1 }, q + 1),
        }
    }

    fn bs(&self, a: i64, b: i64, c: i64, e: i8) -> TwistWord {
        let e = if self.mirror { -e } else { e };
        raw(&self.chain, a as usize, b as usize, c as usize, e)
    }

    fn fwd(&self, i: i64, j: i64, e: i8) -> TwistWord {
        self.bs(2 * i - 1, 2 * i - 1, 2 * j, e)
    }

    fn bwd(&self, i: i64, j: i64, e: i8) -> TwistWord {
        self.bs(2 * i - 1, 2 * j - 1, 2 * j, e)
    }

    fn red(&self, t: i64) -> i64 {
        match t.rem_euclid(self.len()) {
            0 => self.len(),
            x => x,
        }
    }

    /// Carries c_(i,j) to c_(k,l) for equal differences.
    fn transport(&self, i: i64, j: i64, k: i64, l: i64) -> Result<TwistWord> {
        if (i, j) == (k, l) {
            Ok(TwistWord::identity())
        } else if j - i != l - k || i == k {
            Err(Error::InvalidInput(format!("no transport ({i},{j}) → ({k},{l})")))
        } else if k > i {
            Ok(self.bs(2 * i - 1, 2 * j, 2 * l, 1))
        } else {
            Ok(self.transport(k, l, i, j)?.inverse())
        }
    }

    /// Words for the model pair p → q, with `bq` the actual name of the
    /// curve at q: cert(b_p) = c using T(bq), mv(b_p) = bq using T(c).
    fn pair(&self, p: i64, q: i64, bq: CurveName) -> Result<ModelPair> {
        let n = self.n as i64;
        let x = (q - p).rem_euclid(self.len());
        if !(1..n).contains(&x) {
            return Err(Error::Regime(format!("difference {x} outside 1..{}", n - 1)));
        }
        let big_q = p + x;
        let z: i8 = if self.mirror { -1 } else { 1 };
        let simple = |regime, c, g: TwistWord| ModelPair {
            regime,
            c,
            cert: TwistWord::letter(bq, z) + g.clone(),
            mv: TwistWord::letter(c, -z) + g,
        };
        let folded = |regime, c, w1: TwistWord, w2: TwistWord| ModelPair {
            regime,
            c,
            cert: w1.clone() + TwistWord::letter(bq, z) + w1.inverse() + w2.clone(),
            mv: w1.inverse() + TwistWord::letter(c, -z) + w2,
        };
        Ok(if p <= n && big_q <= n {
            simple(Regime::Bottom, self.cname(p, big_q), self.fwd(p, big_q, 1))
        } else if p >= n && big_q < 2 * n {
            simple(Regime::Top, self.cname(2 * n - big_q, 2 * n - p), self.bwd(2 * n - big_q, 2 * n - p, 1))
        } else if p < n && n < big_q {
            let c = self.cname(n - big_q + p, n);
            let w1 = self.fwd(2 * n - big_q, n, -1);
            let w2 = self.bs(2 * n - 2 * big_q + 2 * p - 1, 2 * p - 1, 2 * n - 1, 1);
            folded(Regime::Right, c, w1, w2)
        } else {
            let qq = self.red(q);
            let m = 2 * n - p;
            let c = self.cname(1, 2 * n - p + qq - 1);
            let w1 = self.bwd(1, qq, -1);
            let w2 = self.bs(2, 2 * m - 1, 2 * m + 2 * qq - 2, 1);
            folded(Regime::Left, c, w1, w2)
        })
    }
}

/// Words relating b_i, b_j and a curve c with one certificate each way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWords {
    pub i: usize,
    pub j: usize,
    pub regime: Regime,
    pub c: CurveName,
    /// cert(base) = c, using T(b_i) or T(b_j) and chain twists.
    pub cert: TwistWord,
    pub base: CurveName,
    /// mv(b_i) = b_j, using T(c) and chain twists.
    pub mv: TwistWord,
}

/// Which two of {b_i, b_j, c_(k,l)} are already in hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Known {
    BothB,
    BiAndC,
    BjAndC,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certified {
    pub source: CurveName,
    pub target: CurveName,
    pub word: TwistWord,
}

/// Word machinery on the single-zero prototype of genus g in one labeling.
#[derive(Debug, Clone)]
pub struct Engine {
    pub g: usize,
    pub labeling: LabelingCase,
    pub alphabet: Alphabet,
    models: Vec<Model>,
}

impl Engine {
    pub fn new(g: usize, labeling: LabelingCase) -> Result<Engine> {
        let min = if labeling == LabelingCase::Three { 4 } else { 3 };
        if g < min {
            return Err(Error::InvalidInput(format!("genus {g} below {min} for {labeling:?}")));
        }
        let proto = build_prototype_in_case(&[2 * g - 2], labeling)?;
        let alphabet = Alphabet::new(&proto, 2 * g as u64 - 2)?;
        let models = match labeling {
            LabelingCase::OneTwo => vec![Model::new(a_chain(g), false, NameMap::Same)],
            LabelingCase::Three => {
                let [a1, a2, _] = case_three_chains(g);
                vec![Model::new(a1, false, NameMap::Shift), Model::new(a2, true, NameMap::ShiftKeepOne)]
            }
        };
        Ok(Engine { g, labeling, alphabet, models })
    }

    fn n(&self) -> usize {
        2 * self.g - 2
    }

    pub fn red(&self, t: i64) -> usize {
        match t.rem_euclid(self.n() as i64) {
            0 => self.n(),
            x => x as usize,
        }
    }

    fn b(&self, t: i64) -> CurveName {
        CurveName::B(self.red(t))
    }

    fn diff(&self, i: usize, j: usize) -> usize {
        (j as i64 - i as i64).rem_euclid(self.n() as i64) as usize
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.n();
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(Error::InvalidInput(format!("b-indices ({i},{j}) outside 1..={n}")));
        }
        let x = self.diff(i, j);
        if x == 0 || x + 2 > self.g {
            return Err(Error::Regime(format!("j − i ≡ {x} outside 1..={}", self.g - 2)));
        }
        Ok(x)
    }

    /// Certificates for b_i, b_j with j − i ≡ x, 1 ≤ x ≤ g − 2 (mod 2g−2).
    pub fn pair(&self, i: usize, j: usize) -> Result<PairWords> {
        let x = self.check_pair(i, j)? as i64;
        let (gi, ii, ij) = (self.g as i64, i as i64, j as i64);
        let (bi, bj) = (CurveName::B(i), CurveName::B(j));
        let out = |m: ModelPair, base, mv| PairWords { i, j, regime: m.regime, c: m.c, cert: m.cert, base, mv };
        if self.labeling == LabelingCase::OneTwo {
            let m = self.models[0].pair(ii, ii + x, bj)?;
            let mv = m.mv.clone();
            return Ok(out(m, bi, mv));
        }
        let arc: BTreeSet<i64> = (0..=x).map(|t| self.red(ii + t) as i64).collect();
        let within = |lo: i64, hi: i64, extra: Option<i64>| arc.iter().all(|&t| (lo..=hi).contains(&t) || Some(t) == extra);
        let (m1, m2) = (&self.models[0], &self.models[1]);
        if within(2, 2 * gi - 3, None) {
            let m = m1.pair(ii - 1, ii - 1 + x, bj)?;
            let mv = m.mv.clone();
            Ok(out(m, bi, mv))
        } else if i == 1 && within(1, 2 * gi - 3, None) {
            let m = m1.pair(2 * gi - 4, 2 * gi - 4 + x, bj)?;
            let mv = m.mv.clone();
            Ok(out(m, bi, mv))
        } else if within(3, 2 * gi - 2, None) || (j == 1 && within(3, 2 * gi - 2, Some(1))) {
            let p = if j == 1 { 2 * gi - 4 } else { 2 * gi - 1 - ij };
            let m = m2.pair(p, p + x, bi)?;
            let mv = m.mv.inverse();
            Ok(out(m, bj, mv))
        } else {
            self.wrap(i, j)
        }
    }

    /// Arcs meeting all three subchains of the second labeling.
    fn wrap(&self, i: usize, j: usize) -> Result<PairWords> {
        let g = self.g;
        let [a1, a2, a3] = case_three_chains(g);
        let c = CurveName::c(1, 2 * g - i + j, g)?;
        let y3 = raw(&a2, 2, 4 * g - 2 * i - 3, 4 * g - 2 * i + 2 * j - 2, 1);
        let z = if j > 2 {
            let w = raw(&a1, 1, 1, 2 * j - 1, 1) + raw(&a2, 1, 1, 2 * j, 1) + raw(&a1, 1, 2, 2 * j + 2, 1);
            w.inverse() + self.models[0].bwd(1, j as i64 - 1, -1)
        } else {
            raw(&a1, 1, 4, 6, 1) + raw(&a3, 1, 5, 6, -1)
        };
        Ok(PairWords {
            i,
            j,
            regime: Regime::Wrap,
            c,
            cert: z.clone() + TwistWord::letter(CurveName::B(j), 1) + z.inverse() + y3.clone(),
            base: CurveName::B(i),
            mv: z.inverse() + TwistWord::letter(c, -1) + y3,
        })
    }

    /// Difference class of c_(i,j) in the current labeling.
    pub fn c_difference(&self, c: CurveName) -> Result<usize> {
        match c {
            CurveName::C(1, 2) if self.labeling == LabelingCase::Three => Ok(2),
            CurveName::C(1, j) if self.labeling == LabelingCase::Three => Ok(j - 2),
            CurveName::C(i, j) if 1 <= i && i < j && j <= self.g => Ok(j - i),
            _ => Err(Error::InvalidInput(format!("{c} is not a c-curve of genus {}", self.g))),
        }
    }

    /// Word carrying c to c_(2, 2+x).
    fn to_canon(&self, c: CurveName) -> Result<TwistWord> {
        let x = self.c_difference(c)? as i64;
        let CurveName::C(i, j) = c else { unreachable!() };
        let (i, j) = (i as i64, j as i64);
        match self.labeling {
            LabelingCase::OneTwo => self.models[0].transport(i, j, 2, 2 + x),
            LabelingCase::Three => {
                let [_, a2, a3] = case_three_chains(self.g);
                if (i, j) == (1, 2) {
                    Ok(raw(&a2, 1, 4, 6, 1))
                } else if i == 1 {
                    Ok(self.models[0].transport(1, j - 1, 1, 1 + x)? + raw(&a3, 1, 4, 6, 1))
                } else {
                    self.models[0].transport(i - 1, j - 1, 1, 1 + x)
                }
            }
        }
    }

    /// A Γ_A-word carrying c_(i,j) to c_(k,l).
    pub fn cij_transport_word(&self, i: usize, j: usize, k: usize, l: usize) -> Result<TwistWord> {
        let (s, t) = (CurveName::c(i, j, self.g)?, CurveName::c(k, l, self.g)?);
        let (x, y) = (self.c_difference(s)?, self.c_difference(t)?);
        if x != y {
            return Err(Error::InvalidInput(format!("{s} and {t} have differences {x} and {y}")));
        }
        if s == t {
            return Ok(TwistWord::identity());
        }
        if self.labeling == LabelingCase::OneTwo && x + 1 == self.g {
            return Err(Error::InvalidInput(format!("{s} is the only curve of difference {x}")));
        }
        Ok(self.to_canon(t)?.inverse() + self.to_canon(s)?)
    }

    /// Pair words normalized so that the curve is c_(2, 2+x).
    pub fn canon_pair(&self, i: usize, j: usize) -> Result<PairWords> {
        let p = self.pair(i, j)?;
        let x = self.diff(i, j);
        let cc = CurveName::C(2, 2 + x);
        let t = self.to_canon(p.c)?;
        let mv = p.mv.substitute(p.c, &t.inverse(), cc);
        Ok(PairWords { c: cc, cert: t + p.cert, mv, ..p })
    }

    fn regime_pair(&self, i: usize, j: usize, sides: usize, what: &str) -> Result<PairWords> {
        if i == j {
            return Err(Error::Regime("i = j".into()));
        }
        let p = self.pair(i, j)?;
        if p.regime.sides() != sides {
            return Err(Error::Regime(format!("({i},{j}) is in the {:?} regime, not {what}", p.regime)));
        }
        Ok(p)
    }

    pub fn one_sided_words(&self, i: usize, j: usize) -> Result<PairWords> {
        self.regime_pair(i, j, 1, "one-sided")
    }

    pub fn two_sided_words(&self, i: usize, j: usize) -> Result<PairWords> {
        self.regime_pair(i, j, 2, "two-sided")
    }

    pub fn three_sided_word(&self, i: usize, j: usize) -> Result<PairWords> {
        self.regime_pair(i, j, 3, "three-sided")
    }

    /// W with W·T(b_{2g−2})(c_(1,j+2)) = T(b_2)(c_(2,j)), 3 ≤ j ≤ g − 2.
    pub fn chain_composite_word(&self, j: usize) -> Result<TwistWord> {
        if self.labeling != LabelingCase::Three || j < 3 || j + 2 > self.g {
            return Err(Error::Regime(format!("j = {j} outside 3..={} in the second labeling", self.g - 2)));
        }
        let [a1, a2, _] = case_three_chains(self.g);
        Ok(raw(&a1, 1, 1, 2 * j - 1, 1) + raw(&a2, 1, 1, 2 * j, 1) + raw(&a1, 1, 2, 2 * j + 2, 1))
    }

    /// From two of {b_i, b_j, c_(k,l)}, a word producing the third.
    pub fn heuristic_word(&self, i: usize, j: usize, k: usize, l: usize, have: Known) -> Result<Certified> {
        let x = self.check_pair(i, j)?;
        let ckl = CurveName::c(k, l, self.g)?;
        if self.c_difference(ckl)? != x {
            return Err(Error::InvalidInput(format!("{ckl} does not have difference j − i ≡ {x}")));
        }
        let p = self.canon_pair(i, j)?;
        let tc = self.to_canon(ckl)?;
        Ok(match have {
            Known::BothB => Certified { source: p.base, target: ckl, word: tc.inverse() + p.cert },
            Known::BiAndC => Certified { source: CurveName::B(i), target: CurveName::B(j), word: p.mv.substitute(p.c, &tc, ckl) },
            Known::BjAndC => Certified {
                source: CurveName::B(j),
                target: CurveName::B(i),
                word: p.mv.substitute(p.c, &tc, ckl).inverse(),
            },
        })
    }

    fn expand(&self, mv: &TwistWord, cc: CurveName, cert: &PairWords) -> TwistWord {
        mv.substitute(cc, &cert.cert, cert.base)
    }

    /// With b_i and b_{i+x} in hand, f(b_{i+x}) = b_{i+2x} using only those
    /// twists and chain twists.
    pub fn addition_word(&self, i: usize, x: usize) -> Result<Certified> {
        let (ii, xx) = (i as i64, x as i64);
        if x == 0 {
            let b = self.b(ii);
            return Ok(Certified { source: b, target: b, word: TwistWord::identity() });
        }
        if x + 2 > self.g {
            return Err(Error::Regime(format!("x = {x} exceeds g − 2 = {}", self.g - 2)));
        }
        let cert = self.canon_pair(self.red(ii), self.red(ii + xx))?;
        let step = self.canon_pair(self.red(ii + xx), self.red(ii + 2 * xx))?;
        Ok(Certified { source: self.b(ii + xx), target: self.b(ii + 2 * xx), word: self.expand(&step.mv, step.c, &cert) })
    }

    /// With b_{i+x} and b_{i+2x} in hand, f(b_{i+x}) = b_i.
    pub fn subtraction_word(&self, i: usize, x: usize) -> Result<Certified> {
        let (ii, xx) = (i as i64, x as i64);
        if x == 0 {
            let b = self.b(ii);
            return Ok(Certified { source: b, target: b, word: TwistWord::identity() });
        }
        if x + 2 > self.g {
            return Err(Error::Regime(format!("x = {x} exceeds g − 2 = {}", self.g - 2)));
        }
        let cert = self.canon_pair(self.red(ii + xx), self.red(ii + 2 * xx))?;
        let step = self.canon_pair(self.red(ii), self.red(ii + xx))?;
        let word = self.expand(&step.mv, step.c, &cert).inverse();
        Ok(Certified { source: self.b(ii + xx), target: self.b(ii), word })
    }

    /// The deep check: framed classes mod 2g − 2 on the single-zero
    /// prototype, up to sign.
    pub fn maps_to(&self, word: &TwistWord, source: CurveName, target: CurveName) -> Result<Option<i8>> {
        let image = self.alphabet.apply(word, self.alphabet.framed(source)?)?;
        Ok(image.sign_match(self.alphabet.framed(target)?))
    }
}

/// Outcome of checking one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub framed: bool,
    pub sign: Option<i8>,
    pub symplectic: bool,
    pub deep: bool,
    /// Letters outside the permitted set, if one was given.
    pub foreign_letters: Vec<CurveName>,
    /// Letters on which the prototype's spin structure is nonzero.
    pub unstable_letters: Vec<CurveName>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.framed && self.symplectic && self.deep && self.foreign_letters.is_empty() && self.unstable_letters.is_empty()
    }
}

/// Checks words on the prototype of κ (framed mod r, integral symplectic)
/// and on the single-zero prototype of the same labeling (framed mod 2g−2).
#[derive(Debug, Clone)]
pub struct Verifier {
    pub kappa: Vec<usize>,
    pub prototype: Prototype,
    pub alphabet: Alphabet,
    pub phi: SpinStructure,
    pub engine: Engine,
}

impl Verifier {
    pub fn new(kappa: &[usize], spin: Option<Spin>) -> Result<Verifier> {
        let g = genus_of_partition(kappa)?;
        let case = labeling_case(kappa, spin, g)?;
        let prototype = build_prototype_in_case(kappa, case)?;
        let r = prototype.r();
        let alphabet = Alphabet::new(&prototype, r)?;
        let phi = prototype.spin_structure(r)?;
        let engine = Engine::new(g, case)?;
        Ok(Verifier { kappa: kappa.to_vec(), prototype, alphabet, phi, engine })
    }

    pub fn verify_word(
        &self,
        word: &TwistWord,
        source: CurveName,
        target: CurveName,
        permitted: Option<&BTreeSet<CurveName>>,
    ) -> Result<Verdict> {
        let a = &self.alphabet;
        let image = a.apply(word, a.framed(source)?)?;
        let sign = image.sign_match(a.framed(target)?);
        let m = a.symplectic_of::<i64>(word)?;
        let hs = m.apply(&a.get(source)?.homology)?;
        let ht = &a.get(target)?.homology;
        let neg: Vec<i64> = ht.iter().map(|x| -x).collect();
        let symplectic = m.is_symplectic() && (&hs == ht || hs == neg);
        let deep = self.engine.maps_to(word, source, target)?.is_some();
        let names = word.names();
        let foreign = permitted.map(|p| names.iter().filter(|n| !p.contains(n)).copied().collect()).unwrap_or_default();
        let mut unstable = Vec::new();
        for &n in &names {
            if self.phi.eval(&a.framed(n)?.coords) != 0 {
                unstable.push(n);
            }
        }
        Ok(Verdict { framed: sign.is_some(), sign, symplectic, deep, foreign_letters: foreign, unstable_letters: unstable })
    }
}

/// Free-standing check of a word against framed classes.
pub fn verify_word(alphabet: &Alphabet, word: &TwistWord, source: CurveName, target: CurveName) -> Result<bool> {
    let image = alphabet.apply(word, alphabet.framed(source)?)?;
    if image.sign_match(alphabet.framed(target)?).is_none() {
        return Ok(false);
    }
    let m = alphabet.symplectic_of::<i64>(word)?;
    let hs = m.apply(&alphabet.get(source)?.homology)?;
    let ht = &alphabet.get(target)?.homology;
    Ok(&hs == ht || hs.iter().zip(ht).all(|(a, b)| *a == -*b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStep {
    pub ell: usize,
    pub quotient: u64,
    pub remainder: u64,
    pub y: i64,
    pub y_prime: i64,
    /// |y_ℓ − y′_{ℓ−1}| = R_ℓ.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub j: usize,
    pub r_j: u64,
    pub d_j: u64,
    pub k_next: u64,
    pub r_next: u64,
    pub kappa_j: Vec<u64>,
    pub y0: i64,
    pub y0_prime: i64,
    pub steps: Vec<StageStep>,
    pub new_indices: Vec<usize>,
}

impl Stage {
    pub fn quotients(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.quotient).collect()
    }

    pub fn remainders(&self) -> Vec<u64> {
        self.steps.iter().map(|s| s.remainder).collect()
    }

    pub fn y(&self) -> Vec<i64> {
        std::iter::once(self.y0).chain(self.steps.iter().map(|s| s.y)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub target: CurveName,
    pub source: CurveName,
    pub operation: String,
    pub x: usize,
    pub word: TwistWord,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclideanTrace {
    pub kappa: Vec<usize>,
    pub g: usize,
    pub spin: Option<Spin>,
    pub labeling: LabelingCase,
    pub r: u64,
    pub initial: Vec<usize>,
    pub stages: Vec<Stage>,
    pub targets: Vec<usize>,
    pub certificates: Vec<Certificate>,
    pub all_verified: bool,
}

/// k = Q·r + R down to remainder zero.
pub fn euclid_steps(k: u64, r: u64) -> Vec<(u64, u64)> {
    let (mut a, mut b) = (k, r);
    let mut out = Vec::new();
    while b != 0 {
        out.push((a / b, a % b));
        (a, b) = (b, a % b);
    }
    out
}

struct TraceState<'a> {
    verifier: &'a Verifier,
    known: BTreeSet<usize>,
    permitted: BTreeSet<CurveName>,
    certificates: Vec<Certificate>,
}

impl TraceState<'_> {
    fn add(&mut self, t: usize, x: usize) -> Result<bool> {
        let e = &self.verifier.engine;
        let (ti, xi) = (t as i64, x as i64);
        let up = (e.red(ti - xi), e.red(ti - 2 * xi));
        let down = (e.red(ti + xi), e.red(ti + 2 * xi));
        let (cert, operation) = if self.known.contains(&up.0) && self.known.contains(&up.1) {
            (e.addition_word(up.1, x)?, "addition")
        } else if self.known.contains(&down.0) && self.known.contains(&down.1) {
            (e.subtraction_word(t, x)?, "subtraction")
        } else {
            return Ok(false);
        };
        let verdict = self.verifier.verify_word(&cert.word, cert.source, cert.target, Some(&self.permitted))?;
        self.certificates.push(Certificate {
            target: cert.target,
            source: cert.source,
            operation: operation.into(),
            x,
            word: cert.word,
            verdict,
        });
        self.known.insert(t);
        self.permitted.insert(CurveName::B(t));
        Ok(true)
    }
}

/// Runs the stage-by-stage Euclidean algorithm on κ, certifying every
/// T(b_t) with t ≡ 3 mod r from the twists of C(κ, spin).
pub fn euclidean_trace(kappa: &[usize], spin: Option<Spin>) -> Result<EuclideanTrace> {
    let mut kappa = kappa.to_vec();
    kappa.sort_unstable();
    let g = genus_of_partition(&kappa)?;
    let r = gcd_of(&kappa);
    if g < 4 {
        return Err(Error::InvalidInput(format!("genus {g} below 4")));
    }
    if r == 2 * g as u64 - 2 || r + 1 == g as u64 {
        return Err(Error::Regime(format!("r = {r} ∈ {{2g−2, g−1}} is hyperelliptic")));
    }
    let verifier = Verifier::new(&kappa, spin)?;
    let engine = &verifier.engine;
    let n = 2 * g - 2;
    let initial = b_index_set(&kappa, g);
    let mut permitted: BTreeSet<CurveName> = (1..=g).map(CurveName::A).chain((1..g).map(CurveName::Ap)).collect();
    permitted.extend(initial.iter().map(|&t| CurveName::B(t)));
    let mut st = TraceState { verifier: &verifier, known: initial.iter().copied().collect(), permitted, certificates: Vec::new() };
    let mut stages = Vec::new();
    let mut partial = kappa[0] as u64;
    let mut r_j = kappa[0] as u64;
    for j in 1..kappa.len() {
        let k_next = kappa[j] as u64;
        let r_next = gcd(r_j, k_next);
        let d_j = partial / r_j;
        let y0 = 3 + partial as i64;
        if k_next == r_j {
            partial += k_next;
            continue;
        }
        let mut kappa_j = vec![r_j; d_j as usize];
        kappa_j.extend(kappa[j..].iter().map(|&k| k as u64));
        let euclid = euclid_steps(k_next, r_j);
        let mut rem = vec![k_next as i64, r_j as i64];
        let mut ys = vec![y0];
        let mut yps = vec![y0 + k_next as i64];
        let mut steps = Vec::new();
        let mut new_indices = Vec::new();
        for (l, &(q, rr)) in euclid.iter().enumerate() {
            let ell = l + 1;
            let x = rem[ell];
            let s: i64 = if ell % 2 == 1 { 1 } else { -1 };
            let prev = ys[ell - 1];
            for m in 1..=q as i64 {
                let t = engine.red(prev + s * m * x);
                if !st.known.contains(&t) {
                    if !st.add(t, x as usize)? {
                        return Err(Error::Regime(format!("no certified neighbours for b{t} at step {ell}")));
                    }
                    new_indices.push(t);
                }
            }
            let y = prev + s * q as i64 * x;
            let y_prime = y - s * x;
            let holds = (y - yps[ell - 1]).unsigned_abs() == rr;
            ys.push(y);
            yps.push(y_prime);
            rem.push(rr as i64);
            steps.push(StageStep { ell, quotient: q, remainder: rr, y, y_prime, holds });
        }
        partial += k_next;
        let d_next = partial / r_next;
        let targets: Vec<usize> = (0..=d_next as i64).map(|p| engine.red(3 + p * r_next as i64)).collect();
        loop {
            let missing: Vec<usize> = targets.iter().copied().filter(|t| !st.known.contains(t)).collect();
            if missing.is_empty() {
                break;
            }
            let mut progress = false;
            for t in missing {
                if st.add(t, r_next as usize)? {
                    new_indices.push(t);
                    progress = true;
                }
            }
            if !progress {
                return Err(Error::Regime(format!("fill with x = {r_next} is stuck at stage {j}")));
            }
        }
        stages.push(Stage {
            j,
            r_j,
            d_j,
            k_next,
            r_next,
            kappa_j,
            y0,
            y0_prime: y0 + k_next as i64,
            steps,
            new_indices,
        });
        r_j = r_next;
    }
    let targets: Vec<usize> = (1..=n).filter(|&t| (t as i64 - 3).rem_euclid(r as i64) == 0).collect();
    let all_verified = targets.iter().all(|t| st.known.contains(t)) && st.certificates.iter().all(|c| c.verdict.passed());
    let mut certificates = st.certificates;
    for &t in &initial {
        let b = CurveName::B(t);
        let verdict = verifier.verify_word(&TwistWord::identity(), b, b, None)?;
        certificates.push(Certificate { target: b, source: b, operation: "given".into(), x: 0, word: TwistWord::identity(), verdict });
    }
    certificates.sort_by_key(|c| c.target);
    Ok(EuclideanTrace {
        kappa,
        g,
        spin,
        labeling: verifier.engine.labeling,
        r,
        initial,
        stages,
        targets,
        certificates,
        all_verified,
    })
}

/// The curve obtained by braiding c_(3,3+r) along the A-chain so that it
/// meets only a_1' and a_{g−r}' among the network curves it is grown into.
pub fn aux_curve_c(p: &Prototype) -> Result<ExtraCurve> {
    let g = p.g();
    let r = p.r() as usize;
    if p.labeling() != LabelingCase::OneTwo || r + 2 >= g {
        return Err(Error::Regime(format!("auxiliary curve needs the linear labeling and r = {r} < g − 2")));
    }
    let chain = a_chain(g);
    let w = raw(&chain, 1, 2 * g - 2 * r - 2, 2 * g - 2 * r, 1) + raw(&chain, 5, 2 * r + 6, 2 * g, 1);
    let alphabet = Alphabet::new(p, r as u64)?;
    let start = CurveName::C(3, 3 + r);
    let framed = alphabet.apply(&w, alphabet.framed(start)?)?;
    let homology = alphabet.symplectic_of::<i64>(&w)?.apply(&alphabet.get(start)?.homology)?;
    Ok(ExtraCurve {
        name: "c".into(),
        homology,
        framed: framed.coords,
        meets: vec![(CurveName::Ap(1), 1), (CurveName::Ap(g - r), 1)],
    })
}

/// Shear of the cylinder with core `name`, with the marking letter it
/// contributes.
pub fn shear_with_marking(p: &Prototype, name: CurveName) -> Result<(crate::origami_core::Shear, TwistWord)> {
    let c = p.cylinder(name).ok_or_else(|| Error::InvalidInput(format!("{name} is not a cylinder core")))?;
    let s = shear_cylinder(&p.origami, c)?;
    let e = s.exponent as i8;
    Ok((s, TwistWord::letter(name, e)))
}

/// Framed classes for a list of names, keyed by name.
pub fn framed_table(alphabet: &Alphabet, names: &[CurveName]) -> Result<BTreeMap<CurveName, FramedClass>> {
    names.iter().map(|&n| Ok((n, alphabet.framed(n)?.clone()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_swap_shapes() {
        let b = block_swap(4, 1, 1, 3, 1).unwrap();
        assert_eq!(b.letters, vec![(2, 1), (1, 1)]);
        assert!(block_swap(4, 3, 1, 3, 1).is_err());
        assert!(block_swap(4, 2, 1, 3, 1).unwrap().letters.is_empty());
        assert!(block_swap(4, 1, 3, 3, 1).unwrap().letters.is_empty());
        let ch = a_chain(2);
        let w = braid_to_twists(&BraidWord::new(4, vec![(1, 1), (2, 1), (1, 1)]).unwrap(), &ch).unwrap();
        assert_eq!(w.letters, vec![(CurveName::A(1), 1), (CurveName::Ap(1), 1), (CurveName::A(1), 1)]);
        assert!(braid_to_twists(&BraidWord::new(3, vec![]).unwrap(), &ch).is_err());
    }

    #[test]
    fn word_algebra() {
        let w = TwistWord::new(vec![(CurveName::A(1), 1), (CurveName::B(2), -1)]);
        assert_eq!(w.inverse().letters, vec![(CurveName::B(2), 1), (CurveName::A(1), -1)]);
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"[["a1",1],["b2",-1]]"#);
        assert_eq!(w.to_string(), "T(a1)^1 T(b2)^-1");
    }

    #[test]
    fn euclid_arithmetic() {
        assert_eq!(euclid_steps(7, 5), vec![(1, 2), (2, 1), (2, 0)]);
        assert_eq!(euclid_steps(4, 2), vec![(2, 0)]);
    }

    #[test]
    fn pairs_verify_small_genus() {
        for case in [LabelingCase::OneTwo, LabelingCase::Three] {
            for g in 4..=6 {
                let e = Engine::new(g, case).unwrap();
                for i in 1..=2 * g - 2 {
                    for x in 1..=g - 2 {
                        let j = e.red((i + x) as i64);
                        let p = e.canon_pair(i, j).unwrap();
                        assert!(e.maps_to(&p.cert, p.base, p.c).unwrap().is_some(), "{case:?} g={g} cert ({i},{j})");
                        let ok = e.maps_to(&p.mv, CurveName::B(i), CurveName::B(j)).unwrap();
                        assert!(ok.is_some(), "{case:?} g={g} move ({i},{j})");
                    }
                }
            }
        }
    }
}
