//! Dehn twists acting on framed homology mod r and on the integral
//! symplectic lattice.
//!
//! A framed class is a vector in Z_r^{2g+1}: homology coordinates
//! (a_1…a_g, b_1…b_g) followed by the coefficient of the fibre class α.
//! A left-handed twist along t acts by x ↦ x + ⟨x, t⟩·t̂.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_traits::{PrimInt, Signed};
use serde::{Deserialize, Serialize};

use crate::curve_system::{build_prototype_in_case, intersection_form, CurveName, LabelingCase, Prototype};
use crate::error::{Error, Result};
use crate::euclid_engine::TwistWord;
use crate::spin_algebra::{mod2_form, QuadraticForm, SpinStructure};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FramedClass {
    pub r: u64,
    pub coords: Vec<u64>,
}

impl FramedClass {
    pub fn new(r: u64, coords: Vec<u64>) -> Result<Self> {
        if r == 0 || coords.len() % 2 != 1 {
            return Err(Error::InvalidInput("need r ≥ 1 and 2g+1 coordinates".into()));
        }
        Ok(FramedClass { r, coords: coords.into_iter().map(|x| x % r).collect() })
    }

    pub fn g(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn alpha(&self) -> u64 {
        self.coords[2 * self.g()]
    }

    pub fn neg(&self) -> FramedClass {
        FramedClass { r: self.r, coords: self.coords.iter().map(|&x| (self.r - x) % self.r).collect() }
    }

    /// Equal up to reversing orientation; returns the sign when so.
    pub fn sign_match(&self, other: &FramedClass) -> Option<i8> {
        if self == other {
            Some(1)
        } else if *self == other.neg() {
            Some(-1)
        } else {
            None
        }
    }

    /// ⟨x, y⟩ on the homology coordinates, mod r.
    pub fn pairing(&self, other: &FramedClass) -> u64 {
        let g = self.g();
        let r = self.r;
        let mut s = 0u64;
        for i in 0..g {
            s = (s + self.coords[i] * other.coords[g + i]) % r;
            s = (s + (r - self.coords[g + i] * other.coords[i] % r)) % r;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistGenerator {
    pub name: CurveName,
    pub homology: Vec<i64>,
    pub framed: FramedClass,
}

pub fn framed_class_of(name: CurveName, reference: &Prototype, r: u64) -> Result<FramedClass> {
    FramedClass::new(r, reference.framed_of(name, r)?)
}

pub fn twist_generator(name: CurveName, reference: &Prototype, r: u64) -> Result<TwistGenerator> {
    let path = reference.path_of(name)?;
    Ok(TwistGenerator {
        name,
        homology: reference.homology(&path),
        framed: FramedClass::new(r, reference.framed(&path, r)?)?,
    })
}

/// x ↦ x + e·⟨x, t⟩·t̂.
pub fn twist_transvection(x: &FramedClass, t: &TwistGenerator, e: i64) -> Result<FramedClass> {
    if x.r != t.framed.r || x.coords.len() != t.framed.coords.len() {
        return Err(Error::Modulus(format!("class mod {} against generator mod {}", x.r, t.framed.r)));
    }
    let r = x.r;
    let s = (x.pairing(&t.framed) as i64 * e).rem_euclid(r as i64) as u64;
    Ok(FramedClass { r, coords: x.coords.iter().zip(&t.framed.coords).map(|(a, b)| (a + s * b) % r).collect() })
}

/// φ′(x) = φ(x) + ⟨x, t⟩·φ(t̂), so that φ′(x) = φ(T(t)·x).
pub fn spin_pullback(phi: &SpinStructure, t: &TwistGenerator) -> Result<SpinStructure> {
    spin_pullback_power(phi, t, 1)
}

pub fn spin_pullback_power(phi: &SpinStructure, t: &TwistGenerator, e: i64) -> Result<SpinStructure> {
    if phi.r != t.framed.r {
        return Err(Error::Modulus(format!("φ mod {} against generator mod {}", phi.r, t.framed.r)));
    }
    let r = phi.r;
    let g = phi.g();
    let ft = (phi.eval(&t.framed.coords) as i64 * e).rem_euclid(r as i64) as u64;
    let mut values = phi.values.clone();
    for (k, v) in values.iter_mut().enumerate() {
        let mut basis = vec![0u64; 2 * g + 1];
        basis[k] = 1;
        let e = FramedClass { r, coords: basis };
        *v = (*v + e.pairing(&t.framed) * ft) % r;
    }
    SpinStructure::new(r, values)
}

/// The curves named in a word, with generators computed on one prototype.
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub r: u64,
    pub g: usize,
    pub labeling: LabelingCase,
    generators: BTreeMap<CurveName, TwistGenerator>,
}

impl Alphabet {
    /// Every a_k, a_k', b_j and c_(i,j) of the prototype, framed mod r.
    pub fn new(reference: &Prototype, r: u64) -> Result<Alphabet> {
        let g = reference.g();
        let mut names: Vec<CurveName> = (1..=g).map(CurveName::A).collect();
        names.extend((1..g).map(CurveName::Ap));
        names.extend((1..=2 * g - 2).map(CurveName::B));
        for i in 1..g {
            for j in i + 1..=g {
                names.push(CurveName::C(i, j));
            }
        }
        let mut generators = BTreeMap::new();
        for n in names {
            generators.insert(n, twist_generator(n, reference, r)?);
        }
        Ok(Alphabet { r, g, labeling: reference.labeling(), generators })
    }

    pub fn get(&self, name: CurveName) -> Result<&TwistGenerator> {
        self.generators.get(&name).ok_or_else(|| Error::InvalidInput(format!("{name} is not in the alphabet")))
    }

    pub fn framed(&self, name: CurveName) -> Result<&FramedClass> {
        Ok(&self.get(name)?.framed)
    }

    pub fn generators(&self) -> impl Iterator<Item = &TwistGenerator> {
        self.generators.values()
    }

    /// Applies a word, last letter first.
    pub fn apply(&self, word: &TwistWord, x: &FramedClass) -> Result<FramedClass> {
        let mut y = x.clone();
        for &(name, e) in word.letters.iter().rev() {
            y = twist_transvection(&y, self.get(name)?, e as i64)?;
        }
        Ok(y)
    }

    pub fn symplectic_of<T: PrimInt + Signed>(&self, word: &TwistWord) -> Result<SymplecticMatrix<T>> {
        let mut m = SymplecticMatrix::identity(self.g);
        for &(name, e) in &word.letters {
            let c = self.get(name)?.homology.iter().map(|&x| T::from(x).ok_or(Error::Overflow("homology")));
            let c: Vec<T> = c.collect::<Result<_>>()?;
            m = m.checked_mul(&SymplecticMatrix::transvection(&c, e as i64)?)?;
        }
        Ok(m)
    }

    /// Pulls φ back along every letter of a word.
    pub fn pullback_word(&self, phi: &SpinStructure, word: &TwistWord) -> Result<SpinStructure> {
        let mut out = phi.clone();
        for &(name, e) in &word.letters {
            out = spin_pullback_power(&out, self.get(name)?, e as i64)?;
        }
        Ok(out)
    }
}

/// A 2g×2g integer matrix acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticMatrix<T> {
    pub g: usize,
    pub entries: Vec<Vec<T>>,
}

impl<T: PrimInt + Signed> SymplecticMatrix<T> {
    pub fn identity(g: usize) -> Self {
        let n = 2 * g;
        SymplecticMatrix {
            g,
            entries: (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect(),
        }
    }

    /// x ↦ x + e·⟨x, c⟩·c.
    pub fn transvection(c: &[T], e: i64) -> Result<Self> {
        let g = c.len() / 2;
        let e = T::from(e).ok_or(Error::Overflow("exponent"))?;
        let mut m = Self::identity(g);
        for j in 0..2 * g {
            // ⟨e_j, c⟩
            let p = if j < g { c[g + j] } else { T::zero() - c[j - g] };
            for i in 0..2 * g {
                let add = e.checked_mul(&p).and_then(|x| x.checked_mul(&c[i])).ok_or(Error::Overflow("transvection"))?;
                m.entries[i][j] = m.entries[i][j].checked_add(&add).ok_or(Error::Overflow("transvection"))?;
            }
        }
        Ok(m)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let n = 2 * self.g;
        let mut out = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a.checked_mul(&other.entries[k][j]).ok_or(Error::Overflow("matrix product"))?;
                    out[i][j] = out[i][j].checked_add(&t).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(SymplecticMatrix { g: self.g, entries: out })
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter().zip(x).try_fold(T::zero(), |acc, (&a, &b)| {
                    a.checked_mul(&b).and_then(|t| acc.checked_add(&t)).ok_or(Error::Overflow("matrix action"))
                })
            })
            .collect()
    }

    /// Mᵀ J M = J for the standard form.
    pub fn is_symplectic(&self) -> bool {
        let n = 2 * self.g;
        let col = |j: usize| -> Vec<T> { (0..n).map(|i| self.entries[i][j]).collect() };
        let form = |x: &[T], y: &[T]| -> T {
            let g = self.g;
            (0..g).fold(T::zero(), |acc, i| acc + x[i] * y[g + i] - x[g + i] * y[i])
        };
        (0..n).all(|i| {
            (0..n).all(|j| {
                let want = if j == i + self.g {
                    T::one()
                } else if i == j + self.g {
                    T::zero() - T::one()
                } else {
                    T::zero()
                };
                form(&col(i), &col(j)) == want
            })
        })
    }

    pub fn mod2(&self) -> Vec<Vec<u8>> {
        let two = T::one() + T::one();
        self.entries.iter().map(|r| r.iter().map(|&x| if (x % two).is_zero() { 0 } else { 1 }).collect()).collect()
    }
}

fn apply_mod2(m: &[Vec<u8>], x: &[u8]) -> Vec<u8> {
    m.iter().map(|row| row.iter().zip(x).fold(0, |a, (p, q)| a ^ (p & q))).collect()
}

fn bits(idx: u64, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((idx >> k) & 1) as u8).collect()
}

/// q(Mx) = q(x) for every x in Z_2^{2g}.
pub fn preserves_quadratic_form(m: &[Vec<u8>], q: &QuadraticForm) -> bool {
    let n = m.len();
    (0..1u64 << n).all(|i| {
        let x = bits(i, n);
        q.eval(&apply_mod2(m, &x)) == q.eval(&x)
    })
}

/// Orbit of `start` under mod-2 transvections x ↦ x + ⟨x, c⟩c.
pub fn mod2_orbit(curves: &[Vec<u8>], start: &[u8]) -> HashSet<Vec<u8>> {
    let g = start.len() / 2;
    let mut seen = HashSet::from([start.to_vec()]);
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(x) = queue.pop_front() {
        for c in curves {
            if mod2_form(&x, c, g) == 1 {
                let y: Vec<u8> = x.iter().zip(c).map(|(a, b)| a ^ b).collect();
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen
}

/// Nonzero x with q(x) = value.
pub fn level_set(q: &QuadraticForm, value: u8) -> HashSet<Vec<u8>> {
    let n = q.values.len();
    (1..1u64 << n).map(|i| bits(i, n)).filter(|x| q.eval(x) == value).collect()
}

pub const DEFAULT_ORBIT_CAP: u64 = 10_000_000;

fn encode(values: &[u64], r: u64) -> u64 {
    values.iter().rev().fold(0, |acc, &v| acc * r + v)
}

fn decode(mut idx: u64, r: u64, n: usize) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let v = idx % r;
            idx /= r;
            v
        })
        .collect()
}

/// Orbit of φ0 under the twists, as sorted value vectors.
pub fn orbit_bfs(phi0: &SpinStructure, generators: &[TwistGenerator], cap: u64) -> Result<Vec<SpinStructure>> {
    let r = phi0.r;
    let mut seen = HashSet::from([phi0.values.clone()]);
    let mut queue = VecDeque::from([phi0.clone()]);
    while let Some(phi) = queue.pop_front() {
        for t in generators {
            let next = spin_pullback(&phi, t)?;
            if seen.insert(next.values.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::CapExceeded { cap, needed: seen.len() as u64 });
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Vec<u64>> = seen.into_iter().collect();
    out.sort();
    out.into_iter().map(|v| SpinStructure::new(r, v)).collect()
}

/// Twist generators a_k, a_k', b_j taken from the (r, …, r) prototype of
/// genus g, together with that κ.
pub fn humphries_generators(g: usize, r: u64) -> Result<(Vec<usize>, Vec<TwistGenerator>)> {
    if g < 2 || r == 0 || (2 * g as u64 - 2) % r != 0 {
        return Err(Error::InvalidInput(format!("need g ≥ 2 and r | 2g − 2, got g = {g}, r = {r}")));
    }
    let kappa = vec![r as usize; (2 * g - 2) / r as usize];
    let p = build_prototype_in_case(&kappa, LabelingCase::OneTwo)?;
    let a = Alphabet::new(&p, r)?;
    let gens = a.generators().filter(|t| !matches!(t.name, CurveName::C(..))).cloned().collect();
    Ok((kappa, gens))
}

/// Sizes of all orbits on Z_r^{2g}, largest first.
pub fn orbit_sizes(r: u64, g: usize, generators: &[TwistGenerator], cap: u64) -> Result<Vec<usize>> {
    let n = 2 * g;
    let total = r.checked_pow(n as u32).ok_or(Error::CapExceeded { cap, needed: u64::MAX })?;
    if total > cap {
        return Err(Error::CapExceeded { cap, needed: total });
    }
    let mut seen = vec![false; total as usize];
    let mut sizes = Vec::new();
    for start in 0..total {
        if seen[start as usize] {
            continue;
        }
        let phi0 = SpinStructure::new(r, decode(start, r, n))?;
        let orbit = orbit_bfs(&phi0, generators, cap)?;
        for phi in &orbit {
            seen[encode(&phi.values, r) as usize] = true;
        }
        sizes.push(orbit.len());
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sizes)
}

/// Homology vectors mod 2 of the given generators.
pub fn mod2_classes<'a>(generators: impl IntoIterator<Item = &'a TwistGenerator>) -> Vec<Vec<u8>> {
    generators.into_iter().map(|t| t.homology.iter().map(|&x| x.rem_euclid(2) as u8).collect()).collect()
}

/// Algebraic intersection of two generators.
pub fn generator_pairing(s: &TwistGenerator, t: &TwistGenerator) -> i64 {
    intersection_form(&s.homology, &t.homology)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(g: usize, k: usize, r: u64) -> FramedClass {
        let mut c = vec![0; 2 * g + 1];
        c[k] = 1;
        FramedClass::new(r, c).unwrap()
    }

    fn gen(name: CurveName, g: usize, k: usize, r: u64) -> TwistGenerator {
        let mut h = vec![0; 2 * g];
        h[k] = 1;
        TwistGenerator { name, homology: h, framed: unit(g, k, r) }
    }

    #[test]
    fn transvection_examples() {
        let a1 = gen(CurveName::A(1), 2, 0, 5);
        let b = unit(2, 2, 5);
        let y = twist_transvection(&b, &a1, 1).unwrap();
        assert_eq!(y.coords, vec![4, 0, 1, 0, 0]);
        assert_eq!(twist_transvection(&y, &a1, -1).unwrap(), b);
        let a2 = unit(2, 1, 5);
        assert_eq!(twist_transvection(&a2, &a1, 1).unwrap(), a2);
        assert_eq!(twist_transvection(&unit(2, 0, 3), &a1, 1).unwrap_err().kind(), "modulus-mismatch");
    }

    #[test]
    fn pullback_flips_a1() {
        let phi = SpinStructure::new(2, vec![0, 0, 1, 0]).unwrap();
        let mut t = gen(CurveName::B(1), 2, 2, 2);
        t.framed.coords[4] = 0;
        let out = spin_pullback(&phi, &t).unwrap();
        assert_eq!(out.values, vec![1, 0, 1, 0]);
    }

    #[test]
    fn identity_and_transvection_matrices() {
        let id = SymplecticMatrix::<i64>::identity(2);
        assert!(id.is_symplectic());
        let t = SymplecticMatrix::<i64>::transvection(&[1, 0, 0, 0], 1).unwrap();
        assert_eq!(t.entries[0][2], -1);
        assert!(t.is_symplectic());
        let big = SymplecticMatrix::<i8>::transvection(&[100, 0, 100, 0], 1);
        assert_eq!(big.unwrap_err().kind(), "overflow");
    }

    #[test]
    fn level_sets_and_orbits() {
        let q = QuadraticForm::new(vec![0, 0]);
        assert_eq!(level_set(&q, 0).len(), 2);
        assert_eq!(level_set(&q, 1).len(), 1);
        let orbit = mod2_orbit(&[vec![1, 0], vec![0, 1]], &[1, 0]);
        assert_eq!(orbit.len(), 3);
    }
}
