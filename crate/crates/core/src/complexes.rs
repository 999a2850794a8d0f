//! Cochain complexes over countable, locally finite bases.
//!
//! Linear maps are column-finite rules `generator -> LinComb`, so complexes
//! with infinitely many generators (lattice sections) are handled lazily.
//! Finite pieces are turned into matrices only for cohomology.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{is_odd, GaussianRational, HScalar, Rational};
use crate::verify::{check_all, CheckReport, Counterexample};

/// Requirements on a generator identifier.
pub trait GenId: Ord + Clone + fmt::Debug + Send + Sync + 'static {}
impl<T: Ord + Clone + fmt::Debug + Send + Sync + 'static> GenId for T {}

/// A finite linear combination of generators. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<G> {
    terms: BTreeMap<G, HScalar>,
}

impl<G: Ord> Default for LinComb<G> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<G: Ord + Clone> LinComb<G> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(g: G, c: HScalar) -> Self {
        let mut out = Self::zero();
        out.add_term(g, &c);
        out
    }

    pub fn basis(g: G) -> Self {
        Self::single(g, HScalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&G, &HScalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &G> {
        self.terms.keys()
    }

    pub fn get(&self, g: &G) -> HScalar {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, g: G, c: &HScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, c.clone());
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &HScalar) {
        if c.is_zero() {
            return;
        }
        for (g, v) in &other.terms {
            self.add_term(g.clone(), &(v * c));
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (g, v) in &other.terms {
            self.add_term(g.clone(), v);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &HScalar::from_int(-1));
        out
    }

    pub fn scaled(&self, c: &HScalar) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn scaled_rational(&self, r: &Rational) -> Self {
        Self { terms: self.terms.iter().filter_map(|(g, v)| {
            let s = v.scale(r);
            (!s.is_zero()).then(|| (g.clone(), s))
        }).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scaled_rational(&-Rational::from_integer(1.into()))
    }

    /// Keeps only the terms whose generator satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&G) -> bool) -> Self {
        Self { terms: self.terms.iter().filter(|(g, _)| keep(g)).map(|(g, v)| (g.clone(), v.clone())).collect() }
    }

    pub fn map_gens<H: Ord + Clone>(&self, f: impl Fn(&G) -> H) -> LinComb<H> {
        let mut out = LinComb::zero();
        for (g, v) in &self.terms {
            out.add_term(f(g), v);
        }
        out
    }
}

impl<G: Ord + Clone> FromIterator<(G, HScalar)> for LinComb<G> {
    fn from_iter<I: IntoIterator<Item = (G, HScalar)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (g, c) in iter {
            out.add_term(g, &c);
        }
        out
    }
}

impl<G: Ord + fmt::Debug> fmt::Debug for LinComb<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (g, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]{g:?}")?;
        }
        Ok(())
    }
}

type Action<G, H> = Arc<dyn Fn(&G) -> LinComb<H> + Send + Sync>;

/// A homogeneous linear map given by its value on generators.
pub struct LinMap<G, H> {
    pub degree: i64,
    action: Action<G, H>,
}

impl<G, H> Clone for LinMap<G, H> {
    fn clone(&self) -> Self {
        Self { degree: self.degree, action: self.action.clone() }
    }
}

impl<G: GenId, H: GenId> LinMap<G, H> {
    pub fn new(degree: i64, action: impl Fn(&G) -> LinComb<H> + Send + Sync + 'static) -> Self {
        Self { degree, action: Arc::new(action) }
    }

    pub fn zero(degree: i64) -> Self {
        Self::new(degree, |_| LinComb::zero())
    }

    pub fn apply_gen(&self, g: &G) -> LinComb<H> {
        (self.action)(g)
    }

    pub fn apply(&self, v: &LinComb<G>) -> LinComb<H> {
        let mut out = LinComb::zero();
        for (g, c) in v.iter() {
            out.add_scaled(&self.apply_gen(g), c);
        }
        out
    }

    /// `self ∘ first`.
    pub fn after<F: GenId>(&self, first: &LinMap<F, G>) -> LinMap<F, H> {
        let (a, b) = (self.clone(), first.clone());
        LinMap::new(self.degree + first.degree, move |g| a.apply(&b.apply_gen(g)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding maps of different degree");
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree, move |g| a.apply_gen(g).plus(&b.apply_gen(g)))
    }

    pub fn minus(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "subtracting maps of different degree");
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree, move |g| a.apply_gen(g).minus(&b.apply_gen(g)))
    }

    pub fn scaled(&self, c: HScalar) -> Self {
        let a = self.clone();
        Self::new(self.degree, move |g| a.apply_gen(g).scaled(&c))
    }
}

impl<G: GenId> LinMap<G, G> {
    pub fn identity() -> Self {
        Self::new(0, |g: &G| LinComb::basis(g.clone()))
    }
}

type DegreeFn<G> = Arc<dyn Fn(&G) -> i64 + Send + Sync>;
type BasisFn<G> = Arc<dyn Fn(i64) -> Option<Vec<G>> + Send + Sync>;

/// Graded basis: a degree for every generator plus, where available, a
/// finite enumeration of each degree.
pub struct BasisSpace<G> {
    degree_of: DegreeFn<G>,
    basis: BasisFn<G>,
    /// Degrees outside this range are known to be zero-dimensional.
    pub degree_bounds: Option<(i64, i64)>,
}

impl<G> Clone for BasisSpace<G> {
    fn clone(&self) -> Self {
        Self { degree_of: self.degree_of.clone(), basis: self.basis.clone(), degree_bounds: self.degree_bounds }
    }
}

impl<G: GenId> BasisSpace<G> {
    pub fn new(
        degree_of: impl Fn(&G) -> i64 + Send + Sync + 'static,
        basis: impl Fn(i64) -> Option<Vec<G>> + Send + Sync + 'static,
        degree_bounds: Option<(i64, i64)>,
    ) -> Self {
        Self { degree_of: Arc::new(degree_of), basis: Arc::new(basis), degree_bounds }
    }

    /// A space with a finite explicit basis.
    pub fn finite(gens: Vec<G>, degree_of: impl Fn(&G) -> i64 + Send + Sync + 'static) -> Self {
        let degree_of: DegreeFn<G> = Arc::new(degree_of);
        let bounds = gens.iter().map(|g| degree_of(g)).fold(None, |acc: Option<(i64, i64)>, d| {
            Some(acc.map_or((d, d), |(lo, hi)| (lo.min(d), hi.max(d))))
        });
        let d2 = degree_of.clone();
        Self {
            degree_of,
            basis: Arc::new(move |n| Some(gens.iter().filter(|g| d2(g) == n).cloned().collect())),
            degree_bounds: bounds,
        }
    }

    /// A space whose degrees are known but which has no finite enumeration.
    pub fn infinite(degree_of: impl Fn(&G) -> i64 + Send + Sync + 'static) -> Self {
        Self::new(degree_of, |_| None, None)
    }

    pub fn degree(&self, g: &G) -> i64 {
        (self.degree_of)(g)
    }

    pub fn basis_in_degree(&self, n: i64) -> Option<Vec<G>> {
        if let Some((lo, hi)) = self.degree_bounds {
            if n < lo || n > hi {
                return Some(Vec::new());
            }
        }
        (self.basis)(n)
    }

    pub fn degree_fn(&self) -> DegreeFn<G> {
        self.degree_of.clone()
    }

    /// Every listed generator must sit in the degree it is listed under.
    pub fn check_degrees(&self, degrees: impl IntoIterator<Item = i64>) -> CheckReport {
        let mut report = CheckReport::new("basis degrees");
        for n in degrees {
            for g in self.basis_in_degree(n).unwrap_or_default() {
                let d = self.degree(&g);
                report.record((d != n).then(|| Counterexample::new(format!("{g:?}"), format!("listed in {n}, has degree {d}"), 1)));
            }
        }
        report
    }
}

/// A cochain complex `(V, Q_V)`.
pub struct Complex<G> {
    pub space: BasisSpace<G>,
    pub differential: LinMap<G, G>,
}

impl<G> Clone for Complex<G> {
    fn clone(&self) -> Self {
        Self { space: self.space.clone(), differential: self.differential.clone() }
    }
}

impl<G: GenId> Complex<G> {
    pub fn new(space: BasisSpace<G>, differential: LinMap<G, G>) -> Self {
        assert_eq!(differential.degree, 1, "a differential has degree +1");
        Self { space, differential }
    }

    pub fn degree(&self, g: &G) -> i64 {
        self.space.degree(g)
    }

    pub fn d(&self, v: &LinComb<G>) -> LinComb<G> {
        self.differential.apply(v)
    }
}

/// The monoidal unit: one generator in degree 0, zero differential.
pub fn unit_complex() -> Complex<()> {
    Complex::new(BasisSpace::finite(vec![()], |_| 0), LinMap::zero(1))
}

pub fn check_complex<G: GenId>(c: &Complex<G>, gens: &[G]) -> CheckReport {
    check_all("Q^2 = 0", gens, |g| {
        let qg = c.differential.apply_gen(g);
        let want = c.degree(g) + 1;
        if let Some(bad) = qg.keys().find(|h| c.degree(h) != want) {
            return Some(Counterexample::new(format!("{g:?}"), format!("Q produced {bad:?} outside degree {want}"), 1));
        }
        let qq = c.differential.apply(&qg);
        (!qq.is_zero()).then(|| Counterexample::new(format!("{g:?}"), format!("Q^2 = {qq:?}"), 1))
    })
}

/// `V[q]`: generator `g` sits in degree `|g| - q` and the differential is
/// `(-1)^q Q_V`.
pub fn shift<G: GenId>(c: &Complex<G>, q: i64) -> Complex<G> {
    let deg = c.space.degree_fn();
    let basis = c.space.clone();
    let space = BasisSpace::new(
        move |g| deg(g) - q,
        move |n| basis.basis_in_degree(n + q),
        c.space.degree_bounds.map(|(lo, hi)| (lo - q, hi - q)),
    );
    let differential = if is_odd(q) { c.differential.scaled(HScalar::from_int(-1)) } else { c.differential.clone() };
    Complex::new(space, differential)
}

fn koszul(a: i64, b: i64) -> HScalar {
    if is_odd(a) && is_odd(b) {
        HScalar::from_int(-1)
    } else {
        HScalar::one()
    }
}

/// Tensor product with the graded Leibniz differential.
pub fn tensor<G: GenId, H: GenId>(c1: &Complex<G>, c2: &Complex<H>) -> Complex<(G, H)> {
    let (d1, d2) = (c1.space.degree_fn(), c2.space.degree_fn());
    let (s1, s2) = (c1.space.clone(), c2.space.clone());
    let bounds = match (s1.degree_bounds, s2.degree_bounds) {
        (Some((a, b)), Some((c, d))) => Some((a + c, b + d)),
        _ => None,
    };
    let basis = move |n: i64| -> Option<Vec<(G, H)>> {
        let (lo, hi) = s1.degree_bounds?;
        let mut out = Vec::new();
        for k in lo..=hi {
            let left = s1.basis_in_degree(k)?;
            if left.is_empty() {
                continue;
            }
            let right = s2.basis_in_degree(n - k)?;
            for g in &left {
                for h in &right {
                    out.push((g.clone(), h.clone()));
                }
            }
        }
        Some(out)
    };
    let (dd1, dd2) = (d1.clone(), d2.clone());
    let space = BasisSpace::new(move |(g, h): &(G, H)| dd1(g) + dd2(h), basis, bounds);
    let (q1, q2) = (c1.differential.clone(), c2.differential.clone());
    let differential = LinMap::new(1, move |(g, h): &(G, H)| {
        let mut out = LinComb::zero();
        for (g2, c) in q1.apply_gen(g).iter() {
            out.add_term((g2.clone(), h.clone()), c);
        }
        let sign = if is_odd(d1(g)) { HScalar::from_int(-1) } else { HScalar::one() };
        for (h2, c) in q2.apply_gen(h).iter() {
            out.add_term((g.clone(), h2.clone()), &(c * &sign));
        }
        out
    });
    Complex::new(space, differential)
}

/// `(f ⊗ g)(v ⊗ w) = (-1)^{|g||v|} f(v) ⊗ g(w)`.
pub fn tensor_map<G1: GenId, G2: GenId, H1: GenId, H2: GenId>(
    f: &LinMap<G1, G2>,
    g: &LinMap<H1, H2>,
    src_left: &BasisSpace<G1>,
) -> LinMap<(G1, H1), (G2, H2)> {
    let (f, g2, deg) = (f.clone(), g.clone(), src_left.degree_fn());
    let gdeg = g.degree;
    LinMap::new(f.degree + g.degree, move |(v, w): &(G1, H1)| {
        let sign = koszul(gdeg, deg(v));
        let fv = f.apply_gen(v);
        let gw = g2.apply_gen(w);
        let mut out = LinComb::zero();
        for (a, ca) in fv.iter() {
            for (b, cb) in gw.iter() {
                out.add_term((a.clone(), b.clone()), &(&(ca * cb) * &sign));
            }
        }
        out
    })
}

/// Koszul braiding `v ⊗ w -> (-1)^{|v||w|} w ⊗ v`.
pub fn braiding<G: GenId, H: GenId>(v: &LinComb<(G, H)>, s1: &BasisSpace<G>, s2: &BasisSpace<H>) -> LinComb<(H, G)> {
    let mut out = LinComb::zero();
    for ((g, h), c) in v.iter() {
        out.add_term((h.clone(), g.clone()), &(c * &koszul(s1.degree(g), s2.degree(h))));
    }
    out
}

/// `∂f = Q_W ∘ f - (-1)^{|f|} f ∘ Q_V`.
pub fn hom_differential<G: GenId, H: GenId>(f: &LinMap<G, H>, src: &Complex<G>, dst: &Complex<H>) -> LinMap<G, H> {
    let left = dst.differential.after(f);
    let right = f.after(&src.differential);
    if is_odd(f.degree) {
        left.plus(&right)
    } else {
        left.minus(&right)
    }
}

/// Checks `∂h = g - f` on the sampled generators.
pub fn check_homotopy<G: GenId, H: GenId>(
    f: &LinMap<G, H>,
    g: &LinMap<G, H>,
    h: &LinMap<G, H>,
    src: &Complex<G>,
    dst: &Complex<H>,
    gens: &[G],
) -> CheckReport {
    let dh = hom_differential(h, src, dst);
    check_all("homotopy dh = g - f", gens, |v| {
        let lhs = dh.apply_gen(v);
        let rhs = g.apply_gen(v).minus(&f.apply_gen(v));
        let diff = lhs.minus(&rhs);
        (!diff.is_zero()).then(|| Counterexample::new(format!("{v:?}"), format!("dh - (g - f) = {diff:?}"), 1))
    })
}

/// Rank of a finite set of column vectors with constant coefficients.
pub fn rank<G: GenId>(columns: &[LinComb<G>]) -> Result<usize> {
    let mut pivots: BTreeMap<G, BTreeMap<G, GaussianRational>> = BTreeMap::new();
    for col in columns {
        let mut v: BTreeMap<G, GaussianRational> = BTreeMap::new();
        for (g, c) in col.iter() {
            let c = c
                .as_constant()
                .ok_or_else(|| Error::Unsupported(format!("h-dependent coefficient {c} in rank computation")))?;
            v.insert(g.clone(), c);
        }
        loop {
            let Some((lead, c)) = v.iter().next().map(|(g, c)| (g.clone(), c.clone())) else { break };
            let Some(p) = pivots.get(&lead) else {
                let inv = c.inv().expect("stored entries are nonzero");
                let normalized = v.into_iter().map(|(g, x)| (g, &x * &inv)).collect();
                pivots.insert(lead, normalized);
                break;
            };
            for (g, x) in p {
                let entry = v.entry(g.clone()).or_default();
                *entry = &*entry - &(x * &c);
                if entry.is_zero() {
                    v.remove(g);
                }
            }
        }
    }
    Ok(pivots.len())
}

/// Exact cohomology dimensions for degrees `lo..=hi`.
pub fn cohomology_dims<G: GenId>(c: &Complex<G>, lo: i64, hi: i64) -> Result<BTreeMap<i64, usize>> {
    let basis = |n: i64| {
        c.space
            .basis_in_degree(n)
            .ok_or_else(|| Error::Unsupported(format!("degree {n} has no finite basis")))
    };
    let mut ranks = BTreeMap::new();
    for n in (lo - 1)..=hi {
        let cols: Vec<_> = basis(n)?.iter().map(|g| c.differential.apply_gen(g)).collect();
        ranks.insert(n, rank(&cols)?);
    }
    let mut out = BTreeMap::new();
    for n in lo..=hi {
        let dim = basis(n)?.len();
        out.insert(n, dim - ranks[&n] - ranks[&(n - 1)]);
    }
    Ok(out)
}
