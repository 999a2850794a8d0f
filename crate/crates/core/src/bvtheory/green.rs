//! Retarded and advanced Green operators by time-slice substitution.
//!
//! `P` is causally triangular when its latest (earliest) time block is a
//! pointwise invertible fiber matrix. Then `Pu = φ` is solved slice by slice
//! forward (retarded) or backward (advanced) from zero data.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use super::model::FreeBVModel;
use super::stencil::{Section, Site};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::{HScalar, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Retarded,
    Advanced,
}

/// Coefficients the substitution can run over.
pub trait Coeff: Clone + Send + Sync {
    fn c_zero() -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_add_scaled(&mut self, other: &Self, r: &Rational);
}

impl Coeff for Rational {
    fn c_zero() -> Self {
        Zero::zero()
    }
    fn c_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn c_add_scaled(&mut self, other: &Self, r: &Rational) {
        *self += other * r;
    }
}

impl Coeff for HScalar {
    fn c_zero() -> Self {
        HScalar::zero()
    }
    fn c_is_zero(&self) -> bool {
        HScalar::is_zero(self)
    }
    fn c_add_scaled(&mut self, other: &Self, r: &Rational) {
        HScalar::add_scaled(self, other, r)
    }
}

#[derive(Clone, Debug)]
pub struct PEntry {
    pub dt: i64,
    pub dx: i64,
    pub out_fiber: usize,
    pub in_fiber: usize,
    pub coeff: Rational,
}

/// The block structure of `P` restricted to one degree.
#[derive(Clone, Debug)]
pub struct DegreeData {
    pub rank: usize,
    pub dmin: i64,
    pub dmax: i64,
    pub entries: Vec<PEntry>,
    top_inv: Vec<Vec<Rational>>,
    bottom_inv: Vec<Vec<Rational>>,
}

impl DegreeData {
    /// An entry that lets a solve outrun the light cone, if any.
    pub fn cone_violation(&self, slope: i64) -> Option<PEntry> {
        self.entries
            .iter()
            .find(|e| e.dx.abs() > slope * (self.dmax - e.dt) || e.dx.abs() > slope * (e.dt - self.dmin))
            .cloned()
    }

    fn edge(&self, dir: Direction) -> i64 {
        match dir {
            Direction::Retarded => self.dmax,
            Direction::Advanced => self.dmin,
        }
    }

    fn inverse(&self, dir: Direction) -> &Vec<Vec<Rational>> {
        match dir {
            Direction::Retarded => &self.top_inv,
            Direction::Advanced => &self.bottom_inv,
        }
    }

    /// Solves the equation at time `t_eq` for the slice at `t_eq + edge`.
    fn next_slice<V: Coeff>(
        &self,
        lat: &Lattice,
        dir: Direction,
        source: impl Fn(i64, usize) -> V,
        u: impl Fn(i64, i64, usize) -> V,
        t_eq: i64,
    ) -> Vec<V> {
        let n = lat.sites;
        let edge = self.edge(dir);
        let inv = self.inverse(dir);
        let mut slice = vec![V::c_zero(); (n as usize) * self.rank];
        for x in 0..n {
            let mut rhs: Vec<V> = (0..self.rank).map(|f| source(x, f)).collect();
            for e in self.entries.iter().filter(|e| e.dt != edge) {
                let v = u(t_eq + e.dt, lat.wrap(x + e.dx), e.in_fiber);
                if !v.c_is_zero() {
                    rhs[e.out_fiber].c_add_scaled(&v, &-e.coeff.clone());
                }
            }
            for (i, row) in inv.iter().enumerate() {
                let slot = &mut slice[x as usize * self.rank + i];
                for (j, c) in row.iter().enumerate() {
                    if !Zero::is_zero(c) && !rhs[j].c_is_zero() {
                        slot.c_add_scaled(&rhs[j], c);
                    }
                }
            }
        }
        slice
    }
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= y * &f;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Clone, Debug)]
pub struct GreenData {
    pub degrees: BTreeMap<i64, DegreeData>,
}

impl GreenData {
    /// Splits `P` by degree and checks causal triangularity.
    pub fn new(model: &FreeBVModel) -> Result<Self> {
        let mut degrees = BTreeMap::new();
        for (&deg, &rank) in &model.ranks {
            let mut entries = Vec::new();
            for (k, c) in model.p.entries().filter(|(k, _)| k.in_deg == deg) {
                if k.out_deg != deg {
                    return Err(Error::NotGreenHyperbolic(format!("P mixes degrees {deg} and {}", k.out_deg)));
                }
                entries.push(PEntry { dt: k.dt, dx: k.dx, out_fiber: k.out_fiber, in_fiber: k.in_fiber, coeff: c.clone() });
            }
            if entries.is_empty() {
                return Err(Error::NotGreenHyperbolic(format!("P vanishes in degree {deg}")));
            }
            let dmin = entries.iter().map(|e| e.dt).min().unwrap_or(0);
            let dmax = entries.iter().map(|e| e.dt).max().unwrap_or(0);
            let block = |edge: i64, which: &str| -> Result<Vec<Vec<Rational>>> {
                let mut m = vec![vec![Rational::zero(); rank]; rank];
                for e in entries.iter().filter(|e| e.dt == edge) {
                    if e.dx != 0 {
                        return Err(Error::NotGreenHyperbolic(format!("{which} block of degree {deg} is not pointwise")));
                    }
                    m[e.out_fiber][e.in_fiber] += &e.coeff;
                }
                invert(&m).ok_or_else(|| Error::NotGreenHyperbolic(format!("{which} block of degree {deg} is singular")))
            };
            let top_inv = block(dmax, "top")?;
            let bottom_inv = block(dmin, "bottom")?;
            if dmin == dmax {
                return Err(Error::NotGreenHyperbolic(format!("P has no time extent in degree {deg}")));
            }
            degrees.insert(deg, DegreeData { rank, dmin, dmax, entries, top_inv, bottom_inv });
        }
        Ok(Self { degrees })
    }
}

type KernelKey = (Direction, i64, usize);

/// Green operators with memoized translation-invariant kernels.
///
/// The kernel for `(direction, degree, source fiber)` is the response to a
/// unit delta at the origin, stored slice by slice and extended on demand.
pub struct GreenSolver {
    pub lattice: Lattice,
    pub data: GreenData,
    kernels: RwLock<HashMap<KernelKey, Vec<Vec<Rational>>>>,
}

impl GreenSolver {
    pub fn new(model: &FreeBVModel) -> Result<Self> {
        Ok(Self { lattice: model.lattice, data: GreenData::new(model)?, kernels: RwLock::new(HashMap::new()) })
    }

    fn degree(&self, deg: i64) -> Option<&DegreeData> {
        self.data.degrees.get(&deg)
    }

    /// Slice index of time offset `tau` from the source, if inside the
    /// solved range.
    fn slice_index(d: &DegreeData, dir: Direction, tau: i64) -> Option<usize> {
        match dir {
            Direction::Retarded => (tau >= d.dmax).then(|| (tau - d.dmax) as usize),
            Direction::Advanced => (tau <= d.dmin).then(|| (d.dmin - tau) as usize),
        }
    }

    fn ensure(&self, key: KernelKey, slices: usize) {
        {
            let guard = self.kernels.read().expect("kernel lock");
            if guard.get(&key).is_some_and(|k| k.len() >= slices) {
                return;
            }
        }
        let (dir, deg, src_f) = key;
        let Some(d) = self.degree(deg) else { return };
        let mut guard = self.kernels.write().expect("kernel lock");
        let ker = guard.entry(key).or_default();
        let rank = d.rank;
        while ker.len() < slices {
            let k = ker.len() as i64;
            let t_eq = match dir {
                Direction::Retarded => k,
                Direction::Advanced => -k,
            };
            let next = {
                let done: &Vec<Vec<Rational>> = ker;
                let u = |time: i64, x: i64, f: usize| -> Rational {
                    Self::slice_index(d, dir, time)
                        .and_then(|i| done.get(i))
                        .map(|s| s[x as usize * rank + f].clone())
                        .unwrap_or_else(Rational::zero)
                };
                let source = |x: i64, f: usize| {
                    if k == 0 && x == 0 && f == src_f {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                };
                d.next_slice(&self.lattice, dir, source, u, t_eq)
            };
            ker.push(next);
        }
    }

    /// `(G δ_src)(at)` through the kernel.
    pub fn kernel_value(&self, dir: Direction, src: &Site, at: &Site) -> Rational {
        if src.deg != at.deg {
            return Rational::zero();
        }
        let Some(d) = self.degree(src.deg) else { return Rational::zero() };
        let Some(k) = Self::slice_index(d, dir, at.t - src.t) else { return Rational::zero() };
        let key = (dir, src.deg, src.fiber);
        self.ensure(key, k + 1);
        let guard = self.kernels.read().expect("kernel lock");
        let dx = self.lattice.wrap(at.x - src.x);
        guard[&key][k][dx as usize * d.rank + at.fiber].clone()
    }

    /// `G φ` on the time window `[t_lo, t_hi]`, assembled from kernels.
    pub fn apply(&self, dir: Direction, phi: &Section, t_lo: i64, t_hi: i64) -> Section {
        let mut out = Section::zero();
        let n = self.lattice.sites;
        for (s, c) in phi.iter() {
            let Some(d) = self.degree(s.deg) else { continue };
            let ks: Vec<(i64, usize)> =
                (t_lo..=t_hi).filter_map(|t| Self::slice_index(d, dir, t - s.t).map(|k| (t, k))).collect();
            let Some(max_k) = ks.iter().map(|(_, k)| *k).max() else { continue };
            let key = (dir, s.deg, s.fiber);
            self.ensure(key, max_k + 1);
            let guard = self.kernels.read().expect("kernel lock");
            let ker = &guard[&key];
            for (t, k) in ks {
                for dx in 0..n {
                    for f in 0..d.rank {
                        let v = &ker[k][dx as usize * d.rank + f];
                        if !v.is_zero() {
                            let site = Site { deg: s.deg, t, x: self.lattice.wrap(s.x + dx), fiber: f };
                            out.add_term(site, &c.scale(v));
                        }
                    }
                }
            }
        }
        out
    }

    /// Direct slice-by-slice substitution on `[t_lo, t_hi]`, without
    /// kernels. Serves as the reference route.
    pub fn solve_direct(&self, dir: Direction, phi: &Section, t_lo: i64, t_hi: i64) -> Section {
        let mut out = Section::zero();
        let n = self.lattice.sites;
        let by_degree: BTreeMap<i64, Section> = phi.keys().map(|s| (s.deg, phi.filter(|g| g.deg == s.deg))).collect();
        for (deg, part) in by_degree {
            let Some(d) = self.degree(deg) else { continue };
            let times: Vec<i64> = part.keys().map(|s| s.t).collect();
            let (src_lo, src_hi) = (*times.iter().min().unwrap_or(&0), *times.iter().max().unwrap_or(&0));
            let mut slices: BTreeMap<i64, Vec<HScalar>> = BTreeMap::new();
            let eq_times: Vec<i64> = match dir {
                Direction::Retarded => (src_lo..=t_hi - d.dmax).collect(),
                Direction::Advanced => (t_lo - d.dmin..=src_hi).rev().collect(),
            };
            for t_eq in eq_times {
                let next = {
                    let u = |time: i64, x: i64, f: usize| -> HScalar {
                        slices.get(&time).map(|s| s[x as usize * d.rank + f].clone()).unwrap_or_default()
                    };
                    let source = |x: i64, f: usize| part.get(&Site { deg, t: t_eq, x, fiber: f });
                    d.next_slice(&self.lattice, dir, source, u, t_eq)
                };
                let edge = d.edge(dir);
                slices.insert(t_eq + edge, next);
            }
            for (t, s) in slices.range(t_lo..=t_hi) {
                for x in 0..n {
                    for f in 0..d.rank {
                        out.add_term(Site { deg, t: *t, x, fiber: f }, &s[x as usize * d.rank + f]);
                    }
                }
            }
        }
        out
    }

    /// Lazily evaluated `G φ`.
    pub fn proc_section(self: &Arc<Self>, dir: Direction, phi: &Section) -> ProcSection {
        let times: Vec<i64> = phi.keys().map(|s| s.t).collect();
        let support = match dir {
            Direction::Retarded => SupportBound::Future { from: times.iter().copied().min().unwrap_or(0) },
            Direction::Advanced => SupportBound::Past { to: times.iter().copied().max().unwrap_or(0) },
        };
        let (me, phi) = (self.clone(), phi.clone());
        ProcSection { eval: Arc::new(move |lo, hi| me.apply(dir, &phi, lo, hi)), support }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportBound {
    Compact { lo: i64, hi: i64 },
    Future { from: i64 },
    Past { to: i64 },
}

/// A section known through its restriction to any finite time window.
#[derive(Clone)]
pub struct ProcSection {
    eval: Arc<dyn Fn(i64, i64) -> Section + Send + Sync>,
    pub support: SupportBound,
}

impl ProcSection {
    pub fn new(support: SupportBound, eval: impl Fn(i64, i64) -> Section + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), support }
    }

    pub fn window(&self, t_lo: i64, t_hi: i64) -> Section {
        (self.eval)(t_lo, t_hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvtheory::model::FreeBVModel;
    use crate::scalar::rat;

    fn pure_time() -> (FreeBVModel, GreenSolver) {
        let m = FreeBVModel::kg(Lattice::new(1, 1).unwrap(), rat(0, 1), rat(0, 1));
        let g = GreenSolver::new(&m).unwrap();
        (m, g)
    }

    #[test]
    fn pure_time_ramps() {
        let (_, g) = pure_time();
        let src = Section::basis(Site { deg: 0, t: 0, x: 0, fiber: 0 });
        for dir in [Direction::Retarded, Direction::Advanced] {
            let out = g.apply(dir, &src, -6, 6);
            let direct = g.solve_direct(dir, &src, -6, 6);
            assert_eq!(out, direct);
            for t in -6..=6 {
                let want = match dir {
                    Direction::Retarded => t.max(0),
                    Direction::Advanced => (-t).max(0),
                };
                assert_eq!(out.get(&Site { deg: 0, t, x: 0, fiber: 0 }), HScalar::from_int(want), "{dir:?} t={t}");
            }
        }
    }

    #[test]
    fn singular_top_block_rejected() {
        let mut m = FreeBVModel::kg(Lattice::new(5, 1).unwrap(), rat(1, 2), rat(0, 1));
        m.p = m.p.minus(&m.p.from_degree(0));
        assert!(matches!(GreenSolver::new(&m), Err(Error::NotGreenHyperbolic(_))));
    }

    #[test]
    fn kernel_and_direct_routes_agree() {
        let m = FreeBVModel::maxwell2d(Lattice::new(9, 1).unwrap());
        let g = GreenSolver::new(&m).unwrap();
        let phi: Section = [
            (Site { deg: 0, t: 0, x: 1, fiber: 1 }, HScalar::from_rational(rat(2, 3))),
            (Site { deg: 0, t: 2, x: 7, fiber: 0 }, HScalar::hbar()),
            (Site { deg: 2, t: 1, x: 0, fiber: 0 }, HScalar::one()),
        ]
        .into_iter()
        .collect();
        for dir in [Direction::Retarded, Direction::Advanced] {
            assert_eq!(g.apply(dir, &phi, -5, 7), g.solve_direct(dir, &phi, -5, 7));
        }
    }

    #[test]
    fn inverse_of_two_by_two() {
        let m = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![rat(-2, 1), rat(1, 1)], vec![rat(3, 2), rat(-1, 2)]]);
        assert!(invert(&[vec![rat(0, 1)]]).is_none());
    }
}
