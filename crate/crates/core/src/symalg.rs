//! Graded symmetric algebras `Sym V` over a graded generator basis, with
//! Koszul-sign normal forms, biderivations and Laplacians of generator
//! pairings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::complexes::{Complex, BasisSpace, GenId, LinComb, LinMap};
use crate::error::{Error, Result};
use crate::scalar::{inv_factorial, is_odd, rat_int, HScalar};
use crate::verify::{check_all, CheckReport, Counterexample};

/// A totally ordered, homogeneous basis element of `V`.
pub trait Generator: GenId {
    fn degree(&self) -> i64;
}

/// A normalized monomial: generators in ascending order with no repeated
/// odd generator. The empty word is the unit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word<G>(Vec<G>);

impl<G: Generator> Word<G> {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: G) -> Self {
        Word(vec![g])
    }

    pub fn gens(&self) -> &[G] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(Generator::degree).sum()
    }

    /// The word with position `i` omitted (still normalized).
    pub fn without(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(i);
        Word(v)
    }

    /// The word with positions `i < j` omitted.
    pub fn without2(&self, i: usize, j: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(j);
        v.remove(i);
        Word(v)
    }
}

impl<G: fmt::Debug> fmt::Debug for Word<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            write!(f, "{g:?}")?;
        }
        Ok(())
    }
}

/// Sorts a raw product of generators. Returns the word and the Koszul sign
/// `±1`, or `None` when an odd generator repeats.
pub fn normalize<G: Generator>(mut raw: Vec<G>) -> Option<(Word<G>, i64)> {
    let mut sign = 1;
    for i in 1..raw.len() {
        let mut j = i;
        while j > 0 && raw[j - 1] > raw[j] {
            if is_odd(raw[j - 1].degree()) && is_odd(raw[j].degree()) {
                sign = -sign;
            }
            raw.swap(j - 1, j);
            j -= 1;
        }
    }
    if raw.windows(2).any(|w| w[0] == w[1] && is_odd(w[0].degree())) {
        return None;
    }
    Some((Word(raw), sign))
}

/// Elements of `Sym V`.
pub type SymElement<G> = LinComb<Word<G>>;
/// Elements of `Sym V ⊗ Sym V`.
pub type TensorElement<G> = LinComb<(Word<G>, Word<G>)>;

fn signed(c: &HScalar, sign: i64) -> HScalar {
    if sign < 0 {
        -c
    } else {
        c.clone()
    }
}

fn koszul_sign(a: i64, b: i64) -> i64 {
    if is_odd(a) && is_odd(b) {
        -1
    } else {
        1
    }
}

fn parity_sign(n: i64) -> i64 {
    if is_odd(n) {
        -1
    } else {
        1
    }
}

/// Product of two words with its sign.
pub fn mul_words<G: Generator>(a: &Word<G>, b: &Word<G>) -> Option<(Word<G>, i64)> {
    if a.is_unit() {
        return Some((b.clone(), 1));
    }
    if b.is_unit() {
        return Some((a.clone(), 1));
    }
    let mut raw = a.0.clone();
    raw.extend(b.0.iter().cloned());
    normalize(raw)
}

impl<G: Generator> LinComb<Word<G>> {
    pub fn one() -> Self {
        Self::basis(Word::unit())
    }

    pub fn generator(g: G) -> Self {
        Self::basis(Word::gen(g))
    }

    /// A raw product `c · g_1 ⋯ g_n`, normalized.
    pub fn monomial(raw: Vec<G>, c: &HScalar) -> Self {
        let mut out = Self::zero();
        if let Some((w, s)) = normalize(raw) {
            out.add_term(w, &signed(c, s));
        }
        out
    }

    /// The linear embedding `V -> Sym V`.
    pub fn from_linear(v: &LinComb<G>) -> Self {
        v.map_gens(|g| Word::gen(g.clone()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                if let Some((w, s)) = mul_words(a, b) {
                    out.add_term(w, &signed(&(ca * cb), s));
                }
            }
        }
        out
    }

    /// Longest word appearing.
    pub fn max_length(&self) -> usize {
        self.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Part of word length exactly `n`.
    pub fn length_part(&self, n: usize) -> Self {
        self.filter(|w| w.len() == n)
    }

    /// Coefficient of `ℏ^k`, as an `ℏ`-free element.
    pub fn hbar_coefficient(&self, k: u32) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.iter() {
            out.add_term(w.clone(), &HScalar::constant(c.coeff_at_order(k)));
        }
        out
    }
}

impl<G: Generator> LinComb<(Word<G>, Word<G>)> {
    pub fn pure(a: &SymElement<G>, b: &SymElement<G>) -> Self {
        let mut out = Self::zero();
        for (wa, ca) in a.iter() {
            for (wb, cb) in b.iter() {
                out.add_term((wa.clone(), wb.clone()), &(ca * cb));
            }
        }
        out
    }

    /// `(a ⊗ b)(c ⊗ d) = (-1)^{|b||c|} ac ⊗ bd`.
    pub fn tensor_mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c1) in self.iter() {
            for ((c, d), c2) in other.iter() {
                let (Some((ac, s1)), Some((bd, s2))) = (mul_words(a, c), mul_words(b, d)) else { continue };
                let s = s1 * s2 * koszul_sign(b.degree(), c.degree());
                out.add_term((ac, bd), &signed(&(c1 * c2), s));
            }
        }
        out
    }

    /// `μ : Sym V ⊗ Sym V -> Sym V`.
    pub fn multiply(&self) -> SymElement<G> {
        let mut out = SymElement::zero();
        for ((a, b), c) in self.iter() {
            if let Some((w, s)) = mul_words(a, b) {
                out.add_term(w, &signed(c, s));
            }
        }
        out
    }

    /// Koszul braiding `γ(a ⊗ b) = (-1)^{|a||b|} b ⊗ a`.
    pub fn braid(&self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in self.iter() {
            out.add_term((b.clone(), a.clone()), &signed(c, koszul_sign(a.degree(), b.degree())));
        }
        out
    }
}

/// Leibniz extension of a homogeneous map on generators.
pub fn extend_derivation<G: Generator>(d: &LinMap<G, G>, a: &SymElement<G>) -> SymElement<G> {
    let mut out = SymElement::zero();
    for (w, c) in a.iter() {
        let mut before = 0;
        for (i, v) in w.gens().iter().enumerate() {
            let sign = parity_sign(d.degree * before);
            for (g, dc) in d.apply_gen(v).iter() {
                let mut raw = w.gens().to_vec();
                raw[i] = g.clone();
                out.add_scaled(&SymElement::monomial(raw, dc), &signed(c, sign));
            }
            before += v.degree();
        }
    }
    out
}

/// The derivation extending `d`, as a map on words.
pub fn derivation_map<G: Generator>(d: &LinMap<G, G>) -> LinMap<Word<G>, Word<G>> {
    let d = d.clone();
    LinMap::new(d.degree, move |w: &Word<G>| extend_derivation(&d, &SymElement::basis(w.clone())))
}

/// The algebra map `Sym f` for a degree 0 map on generators.
pub fn sym_map<G: Generator, H: Generator>(f: &LinMap<G, H>, a: &SymElement<G>) -> SymElement<H> {
    let mut out = SymElement::zero();
    for (w, c) in a.iter() {
        let mut acc = SymElement::<H>::one();
        for v in w.gens() {
            acc = acc.mul(&SymElement::from_linear(&f.apply_gen(v)));
        }
        out.add_scaled(&acc, c);
    }
    out
}

/// `Sym f ⊗ Sym f` on tensors.
pub fn sym_map_tensor<G: Generator, H: Generator>(f: &LinMap<G, H>, x: &TensorElement<G>) -> TensorElement<H> {
    let mut out = TensorElement::zero();
    for ((a, b), c) in x.iter() {
        let fa = sym_map(f, &SymElement::basis(a.clone()));
        let fb = sym_map(f, &SymElement::basis(b.clone()));
        out.add_scaled(&TensorElement::pure(&fa, &fb), c);
    }
    out
}

type PairingFn<G> = Arc<dyn Fn(&G, &G) -> HScalar + Send + Sync>;

/// A graded pairing `τ : V ⊗ V -> K` of degree `p` with
/// `τ(w, v) = s (-1)^{|v||w|} τ(v, w)`.
pub struct PairingOracle<G> {
    degree: i64,
    symmetry: i64,
    eval: PairingFn<G>,
}

impl<G> Clone for PairingOracle<G> {
    fn clone(&self) -> Self {
        Self { degree: self.degree, symmetry: self.symmetry, eval: self.eval.clone() }
    }
}

impl<G: Generator> PairingOracle<G> {
    pub fn new(degree: i64, symmetry: i64, eval: impl Fn(&G, &G) -> HScalar + Send + Sync + 'static) -> Self {
        assert!(symmetry == 1 || symmetry == -1, "symmetry sign must be ±1");
        Self { degree, symmetry, eval: Arc::new(eval) }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn symmetry(&self) -> i64 {
        self.symmetry
    }

    pub fn eval(&self, a: &G, b: &G) -> HScalar {
        (self.eval)(a, b)
    }

    pub fn eval_linear(&self, a: &LinComb<G>, b: &LinComb<G>) -> HScalar {
        let mut acc = HScalar::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                let v = self.eval(x, y);
                if !v.is_zero() {
                    acc += &(&(cx * cy) * &v);
                }
            }
        }
        acc
    }

    pub fn scaled(&self, c: HScalar) -> Self {
        let me = self.clone();
        Self::new(self.degree, self.symmetry, move |a, b| &me.eval(a, b) * &c)
    }

    /// `∂τ = -(-1)^p τ ∘ (d ⊗ 1 + 1 ⊗ d)` for a differential `d` on `V`.
    pub fn differential(&self, d: &LinMap<G, G>) -> Self {
        let (me, d) = (self.clone(), d.clone());
        let p = self.degree;
        Self::new(p + 1, self.symmetry, move |a, b| {
            let left = me.eval_linear(&d.apply_gen(a), &LinComb::basis(b.clone()));
            let right = me.eval_linear(&LinComb::basis(a.clone()), &d.apply_gen(b));
            let sum = left + signed(&right, parity_sign(a.degree()));
            signed(&sum, -parity_sign(p))
        })
    }

    /// Symmetry and degree on all pairs drawn from `gens`.
    pub fn check(&self, gens: &[G]) -> CheckReport {
        let pairs: Vec<(G, G)> = gens.iter().flat_map(|a| gens.iter().map(move |b| (a.clone(), b.clone()))).collect();
        check_all("pairing symmetry and degree", &pairs, |(a, b)| {
            let ab = self.eval(a, b);
            let ba = self.eval(b, a);
            if ba != signed(&ab, self.symmetry * koszul_sign(a.degree(), b.degree())) {
                return Some(Counterexample::new(format!("{a:?}, {b:?}"), format!("tau(a,b) = {ab}, tau(b,a) = {ba}"), 2));
            }
            (!ab.is_zero() && a.degree() + b.degree() + self.degree != 0)
                .then(|| Counterexample::new(format!("{a:?}, {b:?}"), "nonzero outside degree".to_string(), 2))
        })
    }
}

/// `⟨a, b⟩_τ` on words, by the closed-form double sum.
pub fn bider_words<G: Generator>(tau: &PairingOracle<G>, a: &Word<G>, b: &Word<G>) -> TensorElement<G> {
    let mut out = TensorElement::zero();
    let p = tau.degree;
    let a_deg = a.degree();
    let a_suffix: Vec<i64> = suffix_degrees(a);
    let mut b_prefix = 0;
    let b_prefix_degs: Vec<i64> = b
        .gens()
        .iter()
        .map(|w| {
            let s = b_prefix;
            b_prefix += w.degree();
            s
        })
        .collect();
    for (i, v) in a.gens().iter().enumerate() {
        if i > 0 && a.gens()[i - 1] == *v {
            continue;
        }
        let mult_a = a.gens()[i..].iter().take_while(|g| *g == v).count() as i64;
        for (j, w) in b.gens().iter().enumerate() {
            if j > 0 && b.gens()[j - 1] == *w {
                continue;
            }
            let t = tau.eval(v, w);
            if t.is_zero() {
                continue;
            }
            let mult_b = b.gens()[j..].iter().take_while(|g| *g == w).count() as i64;
            let vd = v.degree();
            let sign = parity_sign(vd * a_suffix[i + 1] + w.degree() * b_prefix_degs[j] + p * (a_deg - vd));
            let c = &t * &HScalar::from_int(mult_a * mult_b);
            out.add_term((a.without(i), b.without(j)), &signed(&c, sign));
        }
    }
    out
}

/// Total degree of `w[k..]` for every `k`, with a trailing zero.
fn suffix_degrees<G: Generator>(w: &Word<G>) -> Vec<i64> {
    let mut out = vec![0; w.len() + 1];
    for k in (0..w.len()).rev() {
        out[k] = out[k + 1] + w.gens()[k].degree();
    }
    out
}

/// `⟨-,-⟩_τ` applied to a tensor.
pub fn bider<G: Generator>(tau: &PairingOracle<G>, x: &TensorElement<G>) -> TensorElement<G> {
    let mut out = TensorElement::zero();
    for ((a, b), c) in x.iter() {
        out.add_scaled(&bider_words(tau, a, b), c);
    }
    out
}

pub fn bider_apply<G: Generator>(tau: &PairingOracle<G>, a: &SymElement<G>, b: &SymElement<G>) -> TensorElement<G> {
    bider(tau, &TensorElement::pure(a, b))
}

/// `⟨a, b⟩_τ` from its defining properties: generator values, derivation
/// in the second slot and (anti-)symmetry.
pub fn bider_oracle_words<G: Generator>(tau: &PairingOracle<G>, a: &Word<G>, b: &Word<G>) -> TensorElement<G> {
    if a.is_unit() || b.is_unit() {
        return TensorElement::zero();
    }
    if b.len() == 1 {
        if a.len() == 1 {
            let mut out = TensorElement::zero();
            out.add_term((Word::unit(), Word::unit()), &tau.eval(&a.gens()[0], &b.gens()[0]));
            return out;
        }
        let flipped = bider_oracle_words(tau, b, a).braid();
        return flipped.scaled(&HScalar::from_int(tau.symmetry * koszul_sign(a.degree(), b.degree())));
    }
    let w1 = Word::gen(b.gens()[0].clone());
    let rest = b.without(0);
    let unit = SymElement::one();
    let first = bider_oracle_words(tau, a, &w1).tensor_mul(&TensorElement::pure(&unit, &SymElement::basis(rest.clone())));
    let second = TensorElement::pure(&unit, &SymElement::basis(w1.clone())).tensor_mul(&bider_oracle_words(tau, a, &rest));
    let sign = parity_sign((a.degree() + tau.degree) * w1.degree());
    first.plus(&second.scaled(&HScalar::from_int(sign)))
}

pub fn bider_oracle<G: Generator>(tau: &PairingOracle<G>, x: &TensorElement<G>) -> TensorElement<G> {
    let mut out = TensorElement::zero();
    for ((a, b), c) in x.iter() {
        out.add_scaled(&bider_oracle_words(tau, a, b), c);
    }
    out
}

/// The Laplacian `Δ_τ` of a symmetric pairing.
pub struct Laplacian<G> {
    pub tau: PairingOracle<G>,
}

impl<G> Clone for Laplacian<G> {
    fn clone(&self) -> Self {
        Self { tau: self.tau.clone() }
    }
}

impl<G: Generator> Laplacian<G> {
    pub fn new(tau: PairingOracle<G>) -> Result<Self> {
        if tau.symmetry != 1 {
            return Err(Error::Precondition("the Laplacian needs a symmetric pairing".into()));
        }
        Ok(Self { tau })
    }

    pub fn degree(&self) -> i64 {
        self.tau.degree
    }

    /// Explicit double sum over pairs of letters.
    pub fn apply_word(&self, w: &Word<G>) -> SymElement<G> {
        let mut out = SymElement::zero();
        let g = w.gens();
        let p = self.tau.degree;
        let mut prefix = 0;
        for i in 0..g.len() {
            let mut between = 0;
            for j in i + 1..g.len() {
                let t = self.tau.eval(&g[i], &g[j]);
                if !t.is_zero() {
                    let sign = parity_sign(p * prefix + g[j].degree() * between);
                    out.add_term(w.without2(i, j), &signed(&t, sign));
                }
                between += g[j].degree();
            }
            prefix += g[i].degree();
        }
        out
    }

    pub fn apply(&self, a: &SymElement<G>) -> SymElement<G> {
        let mut out = SymElement::zero();
        for (w, c) in a.iter() {
            out.add_scaled(&self.apply_word(w), c);
        }
        out
    }

    /// `Δ^n`.
    pub fn power(&self, a: &SymElement<G>, n: u32) -> SymElement<G> {
        (0..n).fold(a.clone(), |acc, _| self.apply(&acc))
    }

    /// `Δ_⊗ (a ⊗ b) = Δa ⊗ b + (-1)^{p|a|} a ⊗ Δb`.
    pub fn apply_tensor(&self, x: &TensorElement<G>) -> TensorElement<G> {
        let mut out = TensorElement::zero();
        for ((a, b), c) in x.iter() {
            let sa = SymElement::basis(a.clone());
            let sb = SymElement::basis(b.clone());
            out.add_scaled(&TensorElement::pure(&self.apply(&sa), &sb), c);
            let sign = parity_sign(self.tau.degree * a.degree());
            out.add_scaled(&TensorElement::pure(&sa, &self.apply(&sb)), &signed(c, sign));
        }
        out
    }

    /// As a map on words.
    pub fn as_map(&self) -> LinMap<Word<G>, Word<G>> {
        let me = self.clone();
        LinMap::new(self.tau.degree, move |w: &Word<G>| me.apply_word(w))
    }

    /// `exp(c Δ) a`; the series stops once `Δ^k a = 0`.
    pub fn exp(&self, c: &HScalar, a: &SymElement<G>) -> SymElement<G> {
        let mut out = SymElement::zero();
        let mut term = a.clone();
        let mut k = 0u32;
        while !term.is_zero() {
            out.add_scaled(&term, &(&c.pow(k) * &HScalar::from_rational(inv_factorial(k))));
            term = self.apply(&term);
            k += 1;
        }
        out
    }
}

/// `Δ` from the modified Leibniz rule, recursing on the first letter.
pub fn laplacian_oracle_word<G: Generator>(tau: &PairingOracle<G>, w: &Word<G>) -> SymElement<G> {
    if w.len() < 2 {
        return SymElement::zero();
    }
    let v1 = Word::gen(w.gens()[0].clone());
    let rest = w.without(0);
    let first = SymElement::basis(v1.clone()).mul(&laplacian_oracle_word(tau, &rest));
    let sign = parity_sign(tau.degree * v1.degree());
    let second = bider_oracle_words(tau, &v1, &rest).multiply();
    first.scaled(&HScalar::from_int(sign)).plus(&second)
}

pub fn laplacian_oracle<G: Generator>(tau: &PairingOracle<G>, a: &SymElement<G>) -> SymElement<G> {
    let mut out = SymElement::zero();
    for (w, c) in a.iter() {
        out.add_scaled(&laplacian_oracle_word(tau, w), c);
    }
    out
}

/// `μ ∘ exp(c ⟨-,-⟩_τ)` on `a ⊗ b`.
pub fn exp_bider_product<G: Generator>(tau: &PairingOracle<G>, c: &HScalar, x: &TensorElement<G>) -> SymElement<G> {
    let mut out = SymElement::zero();
    let mut term = x.clone();
    let mut k = 0u32;
    while !term.is_zero() {
        out.add_scaled(&term.multiply(), &(&c.pow(k) * &HScalar::from_rational(inv_factorial(k))));
        term = bider(tau, &term);
        k += 1;
    }
    out
}

/// The complex `(Sym V, Q)` with `Q` the Leibniz extension of `d`.
pub fn sym_complex<G: Generator>(d: &LinMap<G, G>) -> Complex<Word<G>> {
    Complex::new(BasisSpace::infinite(|w: &Word<G>| w.degree()), derivation_map(d))
}

fn fmt_elem<G: Generator>(a: &SymElement<G>) -> String {
    format!("{a:?}")
}

fn size_of<G: Generator>(a: &SymElement<G>) -> usize {
    a.max_length() + a.len()
}

/// Shrinks a failing element: first to a single failing word, then by
/// dropping letters from it.
pub fn shrink_element<G: Generator>(a: &SymElement<G>, fails: impl Fn(&SymElement<G>) -> bool) -> SymElement<G> {
    let mut cur = a.clone();
    if let Some((w, _)) = a.iter().find(|(w, _)| fails(&SymElement::basis((*w).clone()))) {
        cur = SymElement::basis(w.clone());
    }
    loop {
        let Some((w, c)) = cur.iter().next().filter(|_| cur.len() == 1).map(|(w, c)| (w.clone(), c.clone())) else {
            return cur;
        };
        let smaller = (0..w.len()).map(|i| SymElement::basis(w.without(i)).scaled(&c)).find(|s| fails(s));
        match smaller {
            Some(s) => cur = s,
            None => return cur,
        }
    }
}

/// Runs a property over sample elements, shrinking any failures.
pub fn check_elements<G: Generator>(
    name: &str,
    samples: &[SymElement<G>],
    prop: impl Fn(&SymElement<G>) -> Option<String> + Sync,
) -> CheckReport {
    check_all(name, samples, |a| {
        prop(a)?;
        let small = shrink_element(a, |s| prop(s).is_some());
        let detail = prop(&small).unwrap_or_default();
        Some(Counterexample::new(fmt_elem(&small), detail, size_of(&small)))
    })
}

/// Runs a property over sample pairs, shrinking each side in turn.
pub fn check_element_pairs<G: Generator>(
    name: &str,
    samples: &[(SymElement<G>, SymElement<G>)],
    prop: impl Fn(&SymElement<G>, &SymElement<G>) -> Option<String> + Sync,
) -> CheckReport {
    check_all(name, samples, |(a, b)| {
        prop(a, b)?;
        let a1 = shrink_element(a, |s| prop(s, b).is_some());
        let b1 = shrink_element(b, |s| prop(&a1, s).is_some());
        let detail = prop(&a1, &b1).unwrap_or_default();
        Some(Counterexample::new(format!("{} ⊗ {}", fmt_elem(&a1), fmt_elem(&b1)), detail, size_of(&a1) + size_of(&b1)))
    })
}

fn mismatch<G: Generator>(lhs: &SymElement<G>, rhs: &SymElement<G>) -> Option<String> {
    (lhs != rhs).then(|| format!("lhs - rhs = {:?}", lhs.minus(rhs)))
}

fn mismatch_t<G: Generator>(lhs: &TensorElement<G>, rhs: &TensorElement<G>) -> Option<String> {
    (lhs != rhs).then(|| format!("lhs - rhs = {:?}", lhs.minus(rhs)))
}

/// Closed-form `Δ_τ` equals the Leibniz-recursion oracle.
pub fn check_laplacian_oracle<G: Generator>(lap: &Laplacian<G>, samples: &[SymElement<G>]) -> CheckReport {
    check_elements("laplacian closed form = Leibniz oracle", samples, |a| {
        mismatch(&lap.apply(a), &laplacian_oracle(&lap.tau, a))
    })
}

/// Closed-form biderivation equals the recursive oracle.
pub fn check_bider_oracle<G: Generator>(tau: &PairingOracle<G>, samples: &[(SymElement<G>, SymElement<G>)]) -> CheckReport {
    check_element_pairs("biderivation closed form = recursive oracle", samples, |a, b| {
        let x = TensorElement::pure(a, b);
        mismatch_t(&bider(tau, &x), &bider_oracle(tau, &x))
    })
}

/// `γ ∘ ⟨-,-⟩ ∘ γ = s ⟨-,-⟩`.
pub fn check_bider_symmetry<G: Generator>(tau: &PairingOracle<G>, samples: &[(SymElement<G>, SymElement<G>)]) -> CheckReport {
    check_element_pairs("biderivation (anti-)symmetry", samples, |a, b| {
        let x = TensorElement::pure(a, b);
        let lhs = bider(tau, &x.braid()).braid();
        mismatch_t(&lhs, &bider(tau, &x).scaled(&HScalar::from_int(tau.symmetry)))
    })
}

/// `Δ(ab) = Δ(a)b + (-1)^{p|a|} aΔ(b) + μ⟨a,b⟩` on homogeneous words.
pub fn check_modified_leibniz<G: Generator>(lap: &Laplacian<G>, samples: &[(SymElement<G>, SymElement<G>)]) -> CheckReport {
    check_element_pairs("modified Leibniz rule", samples, |a, b| {
        let x = TensorElement::pure(a, b);
        let lhs = lap.apply(&a.mul(b));
        let rhs = lap.apply_tensor(&x).plus(&bider(&lap.tau, &x)).multiply();
        mismatch(&lhs, &rhs)
    })
}

/// `∂Δ_τ = Δ_{∂τ}` where `∂Δ = QΔ - (-1)^p ΔQ`.
pub fn check_differential_compat<G: Generator>(
    lap: &Laplacian<G>,
    d: &LinMap<G, G>,
    samples: &[SymElement<G>],
) -> CheckReport {
    let dlap = Laplacian { tau: lap.tau.differential(d) };
    let sign = HScalar::from_int(parity_sign(lap.degree()));
    check_elements("dΔ_τ = Δ_{dτ}", samples, |a| {
        let lhs = extend_derivation(d, &lap.apply(a)).minus(&lap.apply(&extend_derivation(d, a)).scaled(&sign));
        mismatch(&lhs, &dlap.apply(a))
    })
}

/// `Δ_τ Δ_τ' = (-1)^{pp'} Δ_τ' Δ_τ`.
pub fn check_commutation<G: Generator>(l1: &Laplacian<G>, l2: &Laplacian<G>, samples: &[SymElement<G>]) -> CheckReport {
    let sign = HScalar::from_int(parity_sign(l1.degree() * l2.degree()));
    check_elements("Laplacians graded-commute", samples, |a| {
        mismatch(&l1.apply(&l2.apply(a)), &l2.apply(&l1.apply(a)).scaled(&sign))
    })
}

/// `Δ^n ∘ μ = μ ∘ (Δ_⊗ + ⟨-,-⟩)^n` for `n ≤ n_max`.
pub fn check_binomial<G: Generator>(
    lap: &Laplacian<G>,
    samples: &[(SymElement<G>, SymElement<G>)],
    n_max: u32,
) -> CheckReport {
    check_element_pairs("binomial identity for Δ^n μ", samples, |a, b| {
        let mut lhs = a.mul(b);
        let mut x = TensorElement::pure(a, b);
        for n in 1..=n_max {
            lhs = lap.apply(&lhs);
            x = lap.apply_tensor(&x).plus(&bider(&lap.tau, &x));
            if let Some(m) = mismatch(&lhs, &x.multiply()) {
                return Some(format!("n = {n}: {m}"));
            }
        }
        None
    })
}

/// `Sym f ∘ Δ_τ = Δ_ω ∘ Sym f` and the matching biderivation identity,
/// given `ω ∘ (f ⊗ f) = τ`.
pub fn check_naturality<G: Generator, H: Generator>(
    f: &LinMap<G, H>,
    tau: &Laplacian<G>,
    omega: &Laplacian<H>,
    samples: &[(SymElement<G>, SymElement<G>)],
) -> CheckReport {
    check_element_pairs("naturality of Δ and ⟨-,-⟩", samples, |a, b| {
        let (fa, fb) = (sym_map(f, a), sym_map(f, b));
        if let Some(m) = mismatch(&sym_map(f, &tau.apply(a)), &omega.apply(&fa)) {
            return Some(format!("Laplacian: {m}"));
        }
        let lhs = sym_map_tensor(f, &bider_apply(&tau.tau, a, b));
        mismatch_t(&lhs, &bider_apply(&omega.tau, &fa, &fb)).map(|m| format!("biderivation: {m}"))
    })
}

/// `(Sym f ⊗ Sym f) ∘ ⟨-,-⟩_τ = ⟨-,-⟩_ω ∘ (Sym f ⊗ Sym f)`, given
/// `ω ∘ (f ⊗ f) = τ`; no symmetry assumption on the pairings.
pub fn check_bider_naturality<G: Generator, H: Generator>(
    f: &LinMap<G, H>,
    tau: &PairingOracle<G>,
    omega: &PairingOracle<H>,
    samples: &[(SymElement<G>, SymElement<G>)],
) -> CheckReport {
    check_element_pairs("naturality of ⟨-,-⟩", samples, |a, b| {
        let lhs = sym_map_tensor(f, &bider_apply(tau, a, b));
        mismatch_t(&lhs, &bider_apply(omega, &sym_map(f, a), &sym_map(f, b)))
    })
}

/// Random element with `terms` words of length `0..=max_len`.
pub fn random_element<G: Generator>(rng: &mut ChaCha8Rng, gens: &[G], max_len: usize, terms: usize) -> SymElement<G> {
    let mut out = SymElement::zero();
    for _ in 0..terms {
        let len = rng.gen_range(0..=max_len);
        let raw: Vec<G> = (0..len).map(|_| gens[rng.gen_range(0..gens.len())].clone()).collect();
        let c = crate::sampling::small_rational_scalar(rng);
        out.add_scaled(&SymElement::monomial(raw, &HScalar::one()), &c);
    }
    out
}

/// Random single word of length exactly `len` (possibly zero when an odd
/// letter repeats).
pub fn random_word<G: Generator>(rng: &mut ChaCha8Rng, gens: &[G], len: usize) -> SymElement<G> {
    let raw: Vec<G> = (0..len).map(|_| gens[rng.gen_range(0..gens.len())].clone()).collect();
    SymElement::monomial(raw, &HScalar::one())
}

/// A finite graded generator used for the abstract test space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbstractGen {
    pub deg: i64,
    pub id: u32,
}

impl Generator for AbstractGen {
    fn degree(&self) -> i64 {
        self.deg
    }
}

impl fmt::Debug for AbstractGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}[{}]", self.id, self.deg)
    }
}

/// A random finite cochain complex in degrees `-1, 0, 1` together with a
/// sampler of graded pairings on it.
pub struct AbstractSpace {
    pub gens: Vec<AbstractGen>,
    pub d: LinMap<AbstractGen, AbstractGen>,
}

impl AbstractSpace {
    pub fn random(rng: &mut ChaCha8Rng, size: usize) -> Self {
        let n_minus = size * 3 / 10;
        let n_plus = size * 3 / 10;
        let n_zero = size - n_minus - n_plus;
        let mut gens = Vec::with_capacity(size);
        let mut id = 0u32;
        for (deg, count) in [(-1, n_minus), (0, n_zero), (1, n_plus)] {
            for _ in 0..count {
                gens.push(AbstractGen { deg, id });
                id += 1;
            }
        }
        let by_deg = |d: i64| gens.iter().copied().filter(|g| g.deg == d).collect::<Vec<_>>();
        let (minus, zero, plus) = (by_deg(-1), by_deg(0), by_deg(1));
        let mut table: BTreeMap<AbstractGen, LinComb<AbstractGen>> = BTreeMap::new();
        // d b = r_b c_{π(b)}; d a = r_a (r_{b2} b1 - r_{b1} b2) with π(b1) = π(b2)
        let mut r_b = BTreeMap::new();
        let mut target = BTreeMap::new();
        for b in &zero {
            let r = rat_int(rng.gen_range(1..=3));
            let c = plus[rng.gen_range(0..plus.len())];
            table.insert(*b, LinComb::single(c, HScalar::from_rational(r.clone())));
            r_b.insert(*b, r);
            target.insert(*b, c);
        }
        for a in &minus {
            let b1 = zero[rng.gen_range(0..zero.len())];
            let partners: Vec<_> = zero.iter().copied().filter(|b| *b != b1 && target[b] == target[&b1]).collect();
            if partners.is_empty() {
                continue;
            }
            let b2 = partners[rng.gen_range(0..partners.len())];
            let s = rat_int(rng.gen_range(1..=2));
            let mut v = LinComb::zero();
            v.add_term(b1, &HScalar::from_rational(&s * &r_b[&b2]));
            v.add_term(b2, &HScalar::from_rational(-(&s * &r_b[&b1])));
            table.insert(*a, v);
        }
        let table = Arc::new(table);
        let d = LinMap::new(1, move |g: &AbstractGen| table.get(g).cloned().unwrap_or_default());
        Self { gens, d }
    }

    /// A random pairing of degree `p` and symmetry `s` with roughly
    /// `density` of the allowed entries nonzero.
    pub fn random_pairing(&self, rng: &mut ChaCha8Rng, p: i64, s: i64, density: f64) -> PairingOracle<AbstractGen> {
        let mut table: BTreeMap<(AbstractGen, AbstractGen), HScalar> = BTreeMap::new();
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i..] {
                if a.deg + b.deg + p != 0 || !rng.gen_bool(density) {
                    continue;
                }
                if a == b && s * koszul_sign(a.deg, a.deg) != 1 {
                    continue;
                }
                let v = crate::sampling::small_rational_scalar(rng);
                table.insert((*b, *a), signed(&v, s * koszul_sign(a.deg, b.deg)));
                table.insert((*a, *b), v);
            }
        }
        let table = Arc::new(table);
        PairingOracle::new(p, s, move |a, b| table.get(&(*a, *b)).cloned().unwrap_or_else(HScalar::zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    fn g(deg: i64, id: u32) -> AbstractGen {
        AbstractGen { deg, id }
    }

    #[test]
    fn normalize_signs() {
        let (a, b) = (g(1, 0), g(1, 1));
        assert_eq!(normalize(vec![b, a]), Some((Word(vec![a, b]), -1)));
        let e = g(0, 5);
        assert_eq!(normalize(vec![a, e]), Some((Word(vec![e, a]), 1)));
        assert_eq!(normalize(vec![b, e, a]), Some((Word(vec![e, a, b]), -1)));
        assert_eq!(normalize(vec![a, e, a]), None);
        assert_eq!(normalize(vec![e, e]), Some((Word(vec![e, e]), 1)));
    }

    #[test]
    fn multiplication_axioms() {
        let mut r = rng(3);
        let sp = AbstractSpace::random(&mut r, 12);
        for _ in 0..40 {
            let a = random_element(&mut r, &sp.gens, 3, 2);
            let b = random_element(&mut r, &sp.gens, 3, 2);
            let c = random_element(&mut r, &sp.gens, 2, 2);
            assert_eq!(a.mul(&SymElement::one()), a);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(TensorElement::pure(&a, &b).braid().multiply(), a.mul(&b));
        }
        let v = SymElement::generator(g(-1, 0));
        assert!(v.mul(&v).is_zero());
    }

    #[test]
    fn derivation_squares_to_zero() {
        let mut r = rng(5);
        let sp = AbstractSpace::random(&mut r, 20);
        for _ in 0..30 {
            let a = random_element(&mut r, &sp.gens, 4, 3);
            assert!(extend_derivation(&sp.d, &extend_derivation(&sp.d, &a)).is_zero());
        }
        let (v1, v2) = (sp.gens[0], sp.gens[10]);
        let prod = SymElement::generator(v1).mul(&SymElement::generator(v2));
        let lhs = extend_derivation(&sp.d, &prod);
        let dv1 = SymElement::from_linear(&sp.d.apply_gen(&v1));
        let dv2 = SymElement::from_linear(&sp.d.apply_gen(&v2));
        let rhs = dv1
            .mul(&SymElement::generator(v2))
            .plus(&SymElement::generator(v1).mul(&dv2).scaled(&HScalar::from_int(parity_sign(v1.deg))));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn small_laplacian_values() {
        let (a, b, c) = (g(-1, 0), g(0, 1), g(0, 2));
        let tau = PairingOracle::new(1, 1, move |x: &AbstractGen, y: &AbstractGen| {
            if (*x == a && *y == b) || (*x == b && *y == a) {
                HScalar::from_int(3)
            } else {
                HScalar::zero()
            }
        });
        let lap = Laplacian::new(tau.clone()).unwrap();
        assert!(lap.apply(&SymElement::one()).is_zero());
        assert!(lap.apply(&SymElement::generator(a)).is_zero());
        let ab = SymElement::generator(a).mul(&SymElement::generator(b));
        assert_eq!(lap.apply(&ab), SymElement::one().scaled(&HScalar::from_int(3)));
        let abc = ab.mul(&SymElement::generator(c));
        assert_eq!(lap.apply(&abc), SymElement::generator(c).scaled(&HScalar::from_int(3)));
        let anti = PairingOracle::new(0, -1, |_: &AbstractGen, _: &AbstractGen| HScalar::zero());
        assert!(Laplacian::new(anti).is_err());
    }

    #[test]
    fn bider_on_generators_and_units() {
        let mut r = rng(11);
        let sp = AbstractSpace::random(&mut r, 12);
        let tau = sp.random_pairing(&mut r, 0, -1, 0.8);
        assert!(tau.check(&sp.gens).passed());
        let (x, y) = (sp.gens[3], sp.gens[4]);
        let vx = SymElement::generator(x);
        let vy = SymElement::generator(y);
        let mut expect = TensorElement::zero();
        expect.add_term((Word::unit(), Word::unit()), &tau.eval(&x, &y));
        assert_eq!(bider_apply(&tau, &vx, &vy), expect);
        assert!(bider_apply(&tau, &vx, &SymElement::one()).is_zero());
    }

    #[test]
    fn closed_forms_match_oracles_small() {
        let mut r = rng(21);
        let sp = AbstractSpace::random(&mut r, 10);
        for (p, s) in [(1, 1), (0, 1), (0, -1), (-1, 1), (1, -1)] {
            let tau = sp.random_pairing(&mut r, p, s, 0.9);
            let pairs: Vec<_> = (0..60)
                .map(|_| {
                    let la = r.gen_range(0..=4);
                    let lb = r.gen_range(0..=4);
                    (random_word(&mut r, &sp.gens, la), random_word(&mut r, &sp.gens, lb))
                })
                .collect();
            assert!(check_bider_oracle(&tau, &pairs).passed(), "p={p} s={s}");
            assert!(check_bider_symmetry(&tau, &pairs).passed(), "p={p} s={s}");
            if s == 1 {
                let lap = Laplacian::new(tau).unwrap();
                let singles: Vec<_> = pairs.iter().map(|(a, b)| a.mul(b)).collect();
                assert!(check_laplacian_oracle(&lap, &singles).passed(), "p={p}");
                assert!(check_modified_leibniz(&lap, &pairs).passed(), "p={p}");
            }
        }
    }

    #[test]
    fn shrinking_finds_small_witness() {
        let (a, b) = (g(0, 0), g(0, 1));
        let elem = SymElement::monomial(vec![a, a, b, b], &HScalar::one()).plus(&SymElement::one());
        let small = shrink_element(&elem, |s| s.keys().any(|w| w.gens().contains(&b)));
        assert_eq!(small, SymElement::generator(b));
    }
}
