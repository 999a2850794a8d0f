//! Translation-invariant finite-difference operators on graded lattice
//! sections.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::complexes::LinComb;
use crate::lattice::{Lattice, Point};
use crate::scalar::{rat_int, HScalar, Rational};

/// A lattice generator: the delta section of fiber `fiber` of the degree
/// `deg` bundle at `(t, x)`. The derived order is lexicographic in
/// `(deg, t, x, fiber)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub deg: i64,
    pub t: i64,
    pub x: i64,
    pub fiber: usize,
}

impl Site {
    pub fn new(deg: i64, p: Point, fiber: usize) -> Self {
        Self { deg, t: p.t, x: p.x, fiber }
    }

    pub fn point(&self) -> Point {
        Point { t: self.t, x: self.x }
    }

    /// Degree in the shifted complex `F_c[1]`.
    pub fn shifted_degree(&self) -> i64 {
        self.deg - 1
    }
}

impl crate::symalg::Generator for Site {
    fn degree(&self) -> i64 {
        self.shifted_degree()
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}({},{})#{}", self.deg, self.t, self.x, self.fiber)
    }
}

/// Finitely supported section.
pub type Section = LinComb<Site>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryKey {
    pub in_deg: i64,
    pub in_fiber: usize,
    pub out_deg: i64,
    pub out_fiber: usize,
    pub dt: i64,
    pub dx: i64,
}

/// `(S u)(out_deg, p, out_fiber) = Σ c · u(in_deg, p + (dt, dx), in_fiber)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Stencil {
    entries: BTreeMap<EntryKey, Rational>,
}

/// One-dimensional difference operators as `(dt, dx, coefficient)` lists.
pub mod diff {
    pub const DT_PLUS: &[(i64, i64, i64)] = &[(1, 0, 1), (0, 0, -1)];
    pub const DT_MINUS: &[(i64, i64, i64)] = &[(0, 0, 1), (-1, 0, -1)];
    pub const DX_PLUS: &[(i64, i64, i64)] = &[(0, 1, 1), (0, 0, -1)];
    pub const DX_MINUS: &[(i64, i64, i64)] = &[(0, 0, 1), (0, -1, -1)];
    pub const ID: &[(i64, i64, i64)] = &[(0, 0, 1)];
}

impl Stencil {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EntryKey, &Rational)> {
        self.entries.iter()
    }

    pub fn add_entry(&mut self, key: EntryKey, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// Scalar difference operator between one fiber of two bundles.
    pub fn component(
        (in_deg, in_fiber): (i64, usize),
        (out_deg, out_fiber): (i64, usize),
        terms: &[(i64, i64, i64)],
        scale: i64,
    ) -> Self {
        let mut s = Self::zero();
        for &(dt, dx, c) in terms {
            s.add_entry(EntryKey { in_deg, in_fiber, out_deg, out_fiber, dt, dx }, &rat_int(c * scale));
        }
        s
    }

    /// Pointwise fiber identity on a degree of rank `rank`, landing in `out_deg`.
    pub fn identity_block(in_deg: i64, out_deg: i64, rank: usize) -> Self {
        let mut s = Self::zero();
        for f in 0..rank {
            s.add_entry(EntryKey { in_deg, in_fiber: f, out_deg, out_fiber: f, dt: 0, dx: 0 }, &Rational::one());
        }
        s
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.entries {
            out.add_entry(*k, c);
        }
        out
    }

    pub fn scaled(&self, r: &Rational) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.entries {
            out.add_entry(*k, &(c * r));
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(&-Rational::one()))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.entries {
            for (b, cb) in &inner.entries {
                if b.out_deg != a.in_deg || b.out_fiber != a.in_fiber {
                    continue;
                }
                let key = EntryKey {
                    in_deg: b.in_deg,
                    in_fiber: b.in_fiber,
                    out_deg: a.out_deg,
                    out_fiber: a.out_fiber,
                    dt: a.dt + b.dt,
                    dx: a.dx + b.dx,
                };
                out.add_entry(key, &(ca * cb));
            }
        }
        out
    }

    /// Entries reading from degree `n` only.
    pub fn from_degree(&self, n: i64) -> Self {
        Self { entries: self.entries.iter().filter(|(k, _)| k.in_deg == n).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// `out_deg - in_deg` if it is the same for all entries.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.entries.keys().map(|k| k.out_deg - k.in_deg);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Largest `|dt|` among entries.
    pub fn time_radius(&self) -> i64 {
        self.entries.keys().map(|k| k.dt.abs()).max().unwrap_or(0)
    }

    pub fn space_radius(&self) -> i64 {
        self.entries.keys().map(|k| k.dx.abs()).max().unwrap_or(0)
    }

    /// Image of a single delta section.
    pub fn apply_site(&self, lat: &Lattice, s: &Site) -> Section {
        let mut out = Section::zero();
        for (k, c) in &self.entries {
            if k.in_deg == s.deg && k.in_fiber == s.fiber {
                let site = Site { deg: k.out_deg, t: s.t - k.dt, x: lat.wrap(s.x - k.dx), fiber: k.out_fiber };
                out.add_term(site, &HScalar::from_rational(c.clone()));
            }
        }
        out
    }

    pub fn apply(&self, lat: &Lattice, v: &Section) -> Section {
        let mut out = Section::zero();
        for (s, c) in v.iter() {
            out.add_scaled(&self.apply_site(lat, s), c);
        }
        out
    }

    /// Value of `S u` at one site, reading `u` through `value`.
    pub fn eval_at(&self, lat: &Lattice, at: &Site, value: impl Fn(&Site) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in &self.entries {
            if k.out_deg == at.deg && k.out_fiber == at.fiber {
                let src = Site { deg: k.in_deg, t: at.t + k.dt, x: lat.wrap(at.x + k.dx), fiber: k.in_fiber };
                let v = value(&src);
                if !v.is_zero() {
                    acc += c * v;
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn lat() -> Lattice {
        Lattice::new(9, 1).unwrap()
    }

    #[test]
    fn identity_and_zero() {
        let l = lat();
        let id = Stencil::identity_block(0, 0, 2);
        let s = Site { deg: 0, t: 1, x: 3, fiber: 1 };
        let v = Section::single(s, HScalar::from_rational(rat(2, 3)));
        assert_eq!(id.apply(&l, &v), v);
        assert!(id.apply(&l, &Section::zero()).is_zero());
    }

    #[test]
    fn second_difference_on_delta() {
        let l = lat();
        let dtt = Stencil::component((0, 0), (0, 0), diff::DT_PLUS, 1).compose(&Stencil::component((0, 0), (0, 0), diff::DT_MINUS, 1));
        let img = dtt.apply_site(&l, &Site { deg: 0, t: 0, x: 0, fiber: 0 });
        // (D u)(t) = u(t+1) - 2u(t) + u(t-1): a delta at 0 is read from t = -1, 0, 1
        let at = |t| img.get(&Site { deg: 0, t, x: 0, fiber: 0 });
        assert_eq!((at(-1), at(0), at(1)), (HScalar::one(), HScalar::from_int(-2), HScalar::one()));
        assert_eq!(img.len(), 3);
    }

    #[test]
    fn eval_matches_apply() {
        let l = lat();
        let op = Stencil::component((0, 0), (1, 1), diff::DX_PLUS, 3).plus(&Stencil::component((0, 0), (1, 0), diff::DT_MINUS, -1));
        let src = Site { deg: 0, t: 2, x: 8, fiber: 0 };
        let img = op.apply_site(&l, &src);
        for t in 0..5 {
            for x in 0..9 {
                for f in 0..2 {
                    let at = Site { deg: 1, t, x, fiber: f };
                    let v = op.eval_at(&l, &at, |s| if *s == src { Rational::one() } else { Rational::zero() });
                    assert_eq!(HScalar::from_rational(v), img.get(&at));
                }
            }
        }
    }

    #[test]
    fn forward_differences_commute() {
        let a = Stencil::component((0, 0), (0, 0), diff::DT_PLUS, 1);
        let b = Stencil::component((0, 0), (0, 0), diff::DX_PLUS, 1);
        assert_eq!(a.compose(&b), b.compose(&a));
        assert_eq!(a.compose(&b).degree(), Some(0));
    }
}
