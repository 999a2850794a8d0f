//! BV quantization (`Q_ℏ`, time-ordered products), the Moyal-Weyl
//! quantization (`μ_ℏ`), the Dirac product `μ_D` and the time-ordering map
//! `T = exp(iℏ Δ_D)` relating them.

use std::sync::Arc;

use crate::bvtheory::{PairingKind, Site, Theory};
use crate::complexes::LinMap;
use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::scalar::{rat, GaussianRational, HScalar, Rational};
use crate::symalg::{
    bider, check_element_pairs, check_elements, exp_bider_product, extend_derivation, Generator, Laplacian,
    PairingOracle, SymElement, TensorElement, Word,
};
use crate::verify::{check_all, CheckReport, Counterexample};

/// `c · iℏ`.
fn i_hbar(c: Rational) -> HScalar {
    HScalar::monomial(1, GaussianRational::new(Rational::from_integer(0.into()), c))
}

fn sign_of(odd: bool) -> HScalar {
    HScalar::from_int(if odd { -1 } else { 1 })
}

fn mismatch(lhs: &SymElement<Site>, rhs: &SymElement<Site>) -> Option<String> {
    (lhs != rhs).then(|| format!("lhs - rhs = {:?}", lhs.minus(rhs)))
}

/// Homogeneous pieces of an element by total degree.
fn homogeneous_parts(a: &SymElement<Site>) -> Vec<(i64, SymElement<Site>)> {
    let mut degs: Vec<i64> = a.keys().map(Word::degree).collect();
    degs.sort_unstable();
    degs.dedup();
    degs.into_iter().map(|d| (d, a.filter(|w| w.degree() == d))).collect()
}

/// All generators occurring in `a` lie in `r`.
pub fn supported_in(a: &SymElement<Site>, r: &Region) -> bool {
    a.keys().all(|w| w.gens().iter().all(|s| r.contains(&s.point())))
}

/// Translation of every generator by `(dt, dx)`.
pub fn translate(th: &Theory, a: &SymElement<Site>, dt: i64, dx: i64) -> SymElement<Site> {
    let l = th.lattice();
    let mut out = SymElement::zero();
    for (w, c) in a.iter() {
        let raw: Vec<Site> = w.gens().iter().map(|s| Site { t: s.t + dt, x: l.wrap(s.x + dx), ..*s }).collect();
        out.add_scaled(&SymElement::monomial(raw, &HScalar::one()), c);
    }
    out
}

/// The quantized structures of one free BV theory.
pub struct Quantization {
    pub theory: Arc<Theory>,
    /// `Q_V = -Q` on generators.
    pub q: LinMap<Site, Site>,
    pub tau_bv: PairingOracle<Site>,
    pub tau_0: PairingOracle<Site>,
    pub tau_d: PairingOracle<Site>,
    pub delta_bv: Laplacian<Site>,
    pub delta_d: Laplacian<Site>,
}

impl Quantization {
    pub fn new(theory: &Arc<Theory>) -> Result<Self> {
        let tau_bv = theory.oracle(PairingKind::MinusOne);
        let tau_d = theory.oracle(PairingKind::Dirac);
        Ok(Self {
            theory: theory.clone(),
            q: theory.q_shifted(),
            tau_0: theory.oracle(PairingKind::Zero),
            delta_bv: Laplacian::new(tau_bv.clone())?,
            delta_d: Laplacian::new(tau_d.clone())?,
            tau_bv,
            tau_d,
        })
    }

    /// The classical differential `Q` on `Sym`.
    pub fn classical_q(&self, a: &SymElement<Site>) -> SymElement<Site> {
        extend_derivation(&self.q, a)
    }

    /// `Q_ℏ = Q + iℏ Δ_BV`.
    pub fn bv_differential(&self, a: &SymElement<Site>) -> SymElement<Site> {
        self.classical_q(a).plus(&self.delta_bv.apply(a).scaled(&i_hbar(rat(1, 1))))
    }

    /// `Q_ℏ` on an element of the region's algebra.
    pub fn bv_differential_in(&self, r: &Region, a: &SymElement<Site>) -> Result<SymElement<Site>> {
        if !supported_in(a, r) {
            return Err(Error::Precondition("element is not supported in the region".into()));
        }
        Ok(self.bv_differential(a))
    }

    /// `Q_ℏ⊗` on `a_1 ⊗ ⋯ ⊗ a_n`, followed by `μ^(n)`; the right side of
    /// the cochain-map identity for time-ordered products.
    fn multiply_after_tensor_differential(&self, inputs: &[SymElement<Site>]) -> SymElement<Site> {
        let mut out = SymElement::zero();
        for k in 0..inputs.len() {
            for (deg_before, head) in prefix_products(&inputs[..k]) {
                let mut term = head.mul(&self.bv_differential(&inputs[k]));
                for rest in &inputs[k + 1..] {
                    term = term.mul(rest);
                }
                out.add_scaled(&term, &sign_of(crate::scalar::is_odd(deg_before)));
            }
        }
        out
    }

    /// `μ^(n) ∘ ⊗ f_i∗` for a time-orderable tuple; `n = 0` gives `𝟙`.
    pub fn tpfa_product(&self, regions: &[Region], inputs: &[SymElement<Site>]) -> Result<SymElement<Site>> {
        self.check_tuple(regions, inputs)?;
        Ok(inputs.iter().fold(SymElement::one(), |acc, a| acc.mul(a)))
    }

    fn check_tuple(&self, regions: &[Region], inputs: &[SymElement<Site>]) -> Result<Vec<usize>> {
        if regions.len() != inputs.len() {
            return Err(Error::InvalidTuple("one input per region is required".into()));
        }
        let order = self
            .theory
            .lattice()
            .find_time_ordering(regions)?
            .ok_or_else(|| Error::InvalidTuple("tuple is not time-orderable".into()))?;
        for (i, (r, a)) in regions.iter().zip(inputs).enumerate() {
            if !supported_in(a, r) {
                return Err(Error::InvalidTuple(format!("input {i} is not supported in its region")));
            }
        }
        Ok(order)
    }

    /// Moyal-Weyl product `μ ∘ exp(iℏ/2 ⟨-,-⟩(0))`.
    pub fn moyal_mul(&self, a: &SymElement<Site>, b: &SymElement<Site>) -> SymElement<Site> {
        exp_bider_product(&self.tau_0, &i_hbar(rat(1, 2)), &TensorElement::pure(a, b))
    }

    /// Dirac product `μ ∘ exp(iℏ ⟨-,-⟩_D)`.
    pub fn dirac_mul(&self, a: &SymElement<Site>, b: &SymElement<Site>) -> SymElement<Site> {
        exp_bider_product(&self.tau_d, &i_hbar(rat(1, 1)), &TensorElement::pure(a, b))
    }

    /// `μ_ℏ^(n)`, nested to the left; `𝟙` for `n = 0`.
    pub fn moyal_product(&self, inputs: &[SymElement<Site>]) -> SymElement<Site> {
        inputs.iter().fold(SymElement::one(), |acc, a| self.moyal_mul(&acc, a))
    }

    pub fn dirac_product(&self, inputs: &[SymElement<Site>]) -> SymElement<Site> {
        inputs.iter().fold(SymElement::one(), |acc, a| self.dirac_mul(&acc, a))
    }

    /// `μ_ℏ^(n) ∘ γ_ρ` for a given ordering `ρ`, which must time-order the
    /// tuple.
    pub fn fa_product_with(
        &self,
        regions: &[Region],
        inputs: &[SymElement<Site>],
        order: &[usize],
    ) -> Result<SymElement<Site>> {
        self.check_tuple(regions, inputs)?;
        let permuted: Vec<Region> = order.iter().map(|&i| regions[i].clone()).collect();
        if order.len() != regions.len() || !self.theory.lattice().is_time_ordered(&permuted)? {
            return Err(Error::InvalidTuple("ordering does not time-order the tuple".into()));
        }
        let mut out = SymElement::zero();
        for (sign, parts) in permuted_expansion(inputs, order) {
            out.add_scaled(&self.moyal_product(&parts), &sign);
        }
        Ok(out)
    }

    /// The time-ordered product of the AQFT, using the canonical ordering.
    pub fn fa_product(&self, regions: &[Region], inputs: &[SymElement<Site>]) -> Result<SymElement<Site>> {
        let order = self.check_tuple(regions, inputs)?;
        self.fa_product_with(regions, inputs, &order)
    }

    /// The same product computed through the factorization of a tuple into
    /// the hull of its first `n-1` regions and the last one.
    pub fn fa_product_factorized(&self, regions: &[Region], inputs: &[SymElement<Site>]) -> Result<SymElement<Site>> {
        let order = self.check_tuple(regions, inputs)?;
        if regions.len() < 3 {
            return self.fa_product(regions, inputs);
        }
        let ordered: Vec<Region> = order.iter().map(|&i| regions[i].clone()).collect();
        let mut out = SymElement::zero();
        for (sign, parts) in permuted_expansion(inputs, &order) {
            let fact = self.theory.lattice().factorize_tuple(&ordered, &Region::all())?;
            let inner = self.fa_product_factorized(&fact.inner, &parts[..parts.len() - 1])?;
            let pair = [fact.outer.0.clone(), fact.outer.1.clone()];
            let outer = self.fa_product(&pair, &[inner, parts[parts.len() - 1].clone()])?;
            out.add_scaled(&outer, &sign);
        }
        Ok(out)
    }

    /// `exp(± iℏ Δ_D)`.
    pub fn time_ordering(&self, a: &SymElement<Site>, forward: bool) -> SymElement<Site> {
        let c = if forward { rat(1, 1) } else { rat(-1, 1) };
        self.delta_d.exp(&i_hbar(c), a)
    }

    pub fn verify_bv_square(&self, samples: &[SymElement<Site>]) -> CheckReport {
        check_elements("Q_hbar^2 = 0", samples, |a| {
            let sq = self.bv_differential(&self.bv_differential(a));
            (!sq.is_zero()).then(|| format!("Q_hbar^2 a = {sq:?}"))
        })
    }

    /// `Q_ℏ ∘ F(f) = F(f) ∘ Q_ℏ⊗` on homogeneous inputs.
    pub fn verify_tpfa_chain_map(&self, regions: &[Region], samples: &[Vec<SymElement<Site>>]) -> Result<CheckReport> {
        for s in samples {
            self.check_tuple(regions, s)?;
        }
        Ok(check_all("Q_hbar F(f) = F(f) Q_hbar", samples, |inputs| {
            let lhs = self.bv_differential(&inputs.iter().fold(SymElement::one(), |acc, a| acc.mul(a)));
            let rhs = self.multiply_after_tensor_differential(inputs);
            mismatch(&lhs, &rhs).map(|d| Counterexample::new(format!("{inputs:?}"), d, inputs.len()))
        }))
    }

    pub fn verify_moyal(&self, triples: &[(SymElement<Site>, SymElement<Site>, SymElement<Site>)]) -> Vec<CheckReport> {
        let one = SymElement::one();
        let pairs: Vec<_> = triples.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect();
        vec![
            check_all("mu_hbar associative", triples, |(a, b, c)| {
                let lhs = self.moyal_mul(&self.moyal_mul(a, b), c);
                let rhs = self.moyal_mul(a, &self.moyal_mul(b, c));
                mismatch(&lhs, &rhs).map(|d| Counterexample::new(format!("{a:?} | {b:?} | {c:?}"), d, 3))
            }),
            check_elements("mu_hbar unital", &pairs.iter().map(|p| p.0.clone()).collect::<Vec<_>>(), |a| {
                mismatch(&self.moyal_mul(&one, a), a).or_else(|| mismatch(&self.moyal_mul(a, &one), a))
            }),
            check_element_pairs("d mu_hbar = 0", &pairs, |a, b| {
                let lhs = self.classical_q(&self.moyal_mul(a, b));
                let mut rhs = self.moyal_mul(&self.classical_q(a), b);
                for (d, part) in homogeneous_parts(a) {
                    rhs.add_scaled(&self.moyal_mul(&part, &self.classical_q(b)), &sign_of(crate::scalar::is_odd(d)));
                }
                mismatch(&lhs, &rhs)
            }),
            check_element_pairs("mu_hbar = mu + O(hbar)", &pairs, |a, b| {
                mismatch(&self.moyal_mul(a, b).hbar_coefficient(0), &a.mul(b))
            }),
            check_element_pairs("[a,b]_hbar = i hbar {a,b}(0) + O(hbar^2)", &pairs, |a, b| {
                let comm = self.star_commutator(a, b);
                let bracket = bider(&self.tau_0, &TensorElement::pure(a, b)).multiply();
                let want = bracket.scaled(&HScalar::i());
                mismatch(&comm.hbar_coefficient(0), &SymElement::zero())
                    .or_else(|| mismatch(&comm.hbar_coefficient(1), &want))
            }),
        ]
    }

    /// `a ⋆ b - (-1)^{|a||b|} b ⋆ a`, split over homogeneous parts.
    pub fn star_commutator(&self, a: &SymElement<Site>, b: &SymElement<Site>) -> SymElement<Site> {
        let mut out = self.moyal_mul(a, b);
        for (da, pa) in homogeneous_parts(a) {
            for (db, pb) in homogeneous_parts(b) {
                let s = sign_of(crate::scalar::is_odd(da * db));
                out.add_scaled(&self.moyal_mul(&pb, &pa), &-s);
            }
        }
        out
    }

    /// Einstein causality on products of generators from two regions.
    pub fn verify_einstein_causality(&self, r1: &Region, r2: &Region, max_len: usize) -> Result<CheckReport> {
        let l = self.theory.lattice();
        if !l.causally_disjoint(r1, r2)? {
            return Err(Error::Precondition("regions are not causally disjoint".into()));
        }
        let pairs = generator_word_pairs(&self.theory, r1, r2, max_len)?;
        Ok(check_element_pairs("star commutator vanishes across causally disjoint regions", &pairs, |a, b| {
            let c = self.star_commutator(a, b);
            (!c.is_zero()).then(|| format!("[a,b] = {c:?}"))
        }))
    }

    /// A generator pair with nonzero star commutator.
    pub fn find_nonzero_commutator(&self, r1: &Region, r2: &Region) -> Result<Option<(Site, Site)>> {
        for (a, b) in generator_word_pairs(&self.theory, r1, r2, 1)? {
            if !self.star_commutator(&a, &b).is_zero() {
                let ga = a.keys().next().expect("generator").gens()[0];
                let gb = b.keys().next().expect("generator").gens()[0];
                return Ok(Some((ga, gb)));
            }
        }
        Ok(None)
    }

    pub fn verify_dirac(&self, triples: &[(SymElement<Site>, SymElement<Site>, SymElement<Site>)]) -> Vec<CheckReport> {
        let one = SymElement::one();
        let pairs: Vec<_> = triples.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect();
        vec![
            check_all("mu_D associative", triples, |(a, b, c)| {
                let lhs = self.dirac_mul(&self.dirac_mul(a, b), c);
                let rhs = self.dirac_mul(a, &self.dirac_mul(b, c));
                mismatch(&lhs, &rhs).map(|d| Counterexample::new(format!("{a:?} | {b:?} | {c:?}"), d, 3))
            }),
            check_element_pairs("mu_D unital and commutative", &pairs, |a, b| {
                let swapped = TensorElement::pure(a, b).braid();
                let rhs = exp_bider_product(&self.tau_d, &i_hbar(rat(1, 1)), &swapped);
                mismatch(&self.dirac_mul(&one, a), a).or_else(|| mismatch(&self.dirac_mul(a, b), &rhs))
            }),
        ]
    }

    /// A pair of generators with `Q μ_D ≠ μ_D Q⊗`.
    pub fn find_dirac_defect(&self, sites: &[Site]) -> Option<(Site, Site)> {
        sites.iter().flat_map(|a| sites.iter().map(move |b| (*a, *b))).find(|(a, b)| {
            let (va, vb) = (SymElement::generator(*a), SymElement::generator(*b));
            let lhs = self.classical_q(&self.dirac_mul(&va, &vb));
            let rhs = self
                .dirac_mul(&self.classical_q(&va), &vb)
                .plus(&self.dirac_mul(&va, &self.classical_q(&vb)).scaled(&sign_of(crate::scalar::is_odd(a.degree()))));
            lhs != rhs
        })
    }

    /// `⟨-,-⟩_D^k = (½⟨-,-⟩(0))^k` on a time-ordered pair, `k ≤ k_max`.
    pub fn verify_dirac_half_powers(
        &self,
        later: &Region,
        earlier: &Region,
        pairs: &[(SymElement<Site>, SymElement<Site>)],
        k_max: u32,
    ) -> Result<CheckReport> {
        if !self.theory.lattice().is_time_ordered(&[later.clone(), earlier.clone()])? {
            return Err(Error::Precondition("pair is not time-ordered".into()));
        }
        for (a, b) in pairs {
            if !supported_in(a, later) || !supported_in(b, earlier) {
                return Err(Error::Precondition("sample not supported in its region".into()));
            }
        }
        let half = self.tau_0.scaled(HScalar::from_rational(rat(1, 2)));
        Ok(check_element_pairs("<->_D^k = (1/2 <->(0))^k on time-ordered pairs", pairs, |a, b| {
            let mut x = TensorElement::pure(a, b);
            let mut y = x.clone();
            for k in 1..=k_max {
                x = bider(&self.tau_d, &x);
                y = bider(&half, &y);
                if x != y {
                    return Some(format!("differs at k = {k}"));
                }
            }
            None
        }))
    }

    /// `μ_D^(n) = F_A(f)` on a time-orderable tuple.
    pub fn verify_dirac_computes_fa(&self, regions: &[Region], samples: &[Vec<SymElement<Site>>]) -> Result<CheckReport> {
        let mut fa = Vec::with_capacity(samples.len());
        for s in samples {
            fa.push(self.fa_product(regions, s)?);
        }
        let indexed: Vec<usize> = (0..samples.len()).collect();
        Ok(check_all("mu_D^(n) = F_A(f)", &indexed, |&i| {
            mismatch(&self.dirac_product(&samples[i]), &fa[i])
                .map(|d| Counterexample::new(format!("{:?}", samples[i]), d, samples[i].len()))
        }))
    }

    pub fn verify_chain_map(&self, samples: &[SymElement<Site>]) -> CheckReport {
        check_elements("Q T = T Q_hbar", samples, |a| {
            let lhs = self.classical_q(&self.time_ordering(a, true));
            let rhs = self.time_ordering(&self.bv_differential(a), true);
            mismatch(&lhs, &rhs)
        })
    }

    pub fn verify_multiplicative(&self, pairs: &[(SymElement<Site>, SymElement<Site>)]) -> CheckReport {
        check_element_pairs("T mu = mu_D (T x T)", pairs, |a, b| {
            let lhs = self.time_ordering(&a.mul(b), true);
            let rhs = self.dirac_mul(&self.time_ordering(a, true), &self.time_ordering(b, true));
            mismatch(&lhs, &rhs)
        })
    }

    pub fn verify_inverse(&self, samples: &[SymElement<Site>]) -> CheckReport {
        check_elements("T^-1 T = id", samples, |a| {
            mismatch(&self.time_ordering(&self.time_ordering(a, true), false), a)
                .or_else(|| mismatch(&self.time_ordering(a, true).hbar_coefficient(0), &a.hbar_coefficient(0)))
        })
    }

    /// `Δ_D` commutes with lattice translations.
    pub fn verify_translation_naturality(&self, samples: &[SymElement<Site>], dt: i64, dx: i64) -> CheckReport {
        check_elements("Delta_D natural under translations", samples, |a| {
            let lhs = self.delta_d.apply(&translate(&self.theory, a, dt, dx));
            let rhs = translate(&self.theory, &self.delta_d.apply(a), dt, dx);
            mismatch(&lhs, &rhs)
        })
    }

    /// `T ∘ F(f) = F_A(f) ∘ T⊗`, with tuples of length `≥ 3` evaluated
    /// through their factorization.
    pub fn verify_factorization_compat(&self, regions: &[Region], samples: &[Vec<SymElement<Site>>]) -> Result<CheckReport> {
        let mut rhs = Vec::with_capacity(samples.len());
        for s in samples {
            let transformed: Vec<_> = s.iter().map(|a| self.time_ordering(a, true)).collect();
            rhs.push(self.fa_product_factorized(regions, &transformed)?);
        }
        let mut lhs = Vec::with_capacity(samples.len());
        for s in samples {
            lhs.push(self.time_ordering(&self.tpfa_product(regions, s)?, true));
        }
        let indexed: Vec<usize> = (0..samples.len()).collect();
        Ok(check_all(&format!("T F(f) = F_A(f) T, n = {}", regions.len()), &indexed, |&i| {
            mismatch(&lhs[i], &rhs[i]).map(|d| Counterexample::new(format!("{:?}", samples[i]), d, samples[i].len()))
        }))
    }

    /// `Q_ℏ` preserves the word-length filtration and induces `Sym^p Q` on
    /// the associated graded pieces.
    pub fn filtration_check(&self, samples: &[SymElement<Site>], p_max: usize) -> Vec<CheckReport> {
        let mut out = Vec::new();
        for p in 0..=p_max {
            let homog: Vec<_> = samples.iter().map(|a| a.length_part(p)).filter(|a| !a.is_zero()).collect();
            out.push(check_elements(&format!("filtration F_{p} preserved, graded piece = Sym^{p} Q"), &homog, |a| {
                let img = self.bv_differential(a);
                if img.max_length() > p {
                    return Some("image leaves the filtration".into());
                }
                mismatch(&img.length_part(p), &self.classical_q(a))
            }));
        }
        out
    }
}

/// Sums over choices of one word from each input: the running product of
/// the prefix and its total degree.
fn prefix_products(inputs: &[SymElement<Site>]) -> Vec<(i64, SymElement<Site>)> {
    let mut acc: Vec<(i64, SymElement<Site>)> = vec![(0, SymElement::one())];
    for a in inputs {
        let mut next = Vec::new();
        for (d, head) in &acc {
            for (deg, part) in homogeneous_parts(a) {
                next.push((d + deg, head.mul(&part)));
            }
        }
        acc = next;
    }
    acc
}

/// Expands `γ_ρ(a_1 ⊗ ⋯ ⊗ a_n)` into homogeneous tuples in the order
/// `ρ`, with their Koszul signs.
fn permuted_expansion(inputs: &[SymElement<Site>], order: &[usize]) -> Vec<(HScalar, Vec<SymElement<Site>>)> {
    let mut acc: Vec<(Vec<i64>, Vec<SymElement<Site>>)> = vec![(Vec::new(), Vec::new())];
    for a in inputs {
        let mut next = Vec::new();
        for (degs, parts) in &acc {
            for (d, part) in homogeneous_parts(a) {
                let mut degs = degs.clone();
                degs.push(d);
                let mut parts = parts.clone();
                parts.push(part);
                next.push((degs, parts));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(degs, parts)| {
            let mut odd = false;
            for x in 0..order.len() {
                for y in x + 1..order.len() {
                    if order[x] > order[y] && crate::scalar::is_odd(degs[order[x]] * degs[order[y]]) {
                        odd = !odd;
                    }
                }
            }
            (sign_of(odd), order.iter().map(|&i| parts[i].clone()).collect())
        })
        .collect()
}

/// Pairs of generator words of length `1..=max_len` drawn from `r1` and
/// `r2`; length one covers the full delta basis.
fn generator_word_pairs(
    th: &Theory,
    r1: &Region,
    r2: &Region,
    max_len: usize,
) -> Result<Vec<(SymElement<Site>, SymElement<Site>)>> {
    let basis = |r: &Region| -> Result<Vec<Site>> {
        let pts = r.points().ok_or_else(|| Error::Unsupported("delta basis of an infinite region".into()))?;
        Ok(th.model.delta_basis(pts.iter()))
    };
    let (b1, b2) = (basis(r1)?, basis(r2)?);
    let words = |b: &[Site]| -> Vec<SymElement<Site>> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            for raw in crate::sampling::multisets(b, len) {
                let w = SymElement::monomial(raw, &HScalar::one());
                if !w.is_zero() {
                    out.push(w);
                }
            }
        }
        out
    };
    let (w1, w2) = (words(&b1), words(&b2));
    Ok(w1.iter().flat_map(|a| w2.iter().map(move |b| (a.clone(), b.clone()))).collect())
}

/// The symmetric-power homotopy `π ∘ H ∘ s` built from a homotopy `h`
/// with `∂h = id - e` on generators, where
/// `H = Σ_k e^{⊗(k-1)} ⊗ h ⊗ id^{⊗(p-k)}` and `s` is the Koszul
/// symmetrization.
pub struct SymPowerHomotopy {
    pub e: LinMap<Site, Site>,
    pub h: LinMap<Site, Site>,
    pub q: LinMap<Site, Site>,
}

impl SymPowerHomotopy {
    /// `π H s` on one word.
    pub fn apply_word(&self, w: &Word<Site>) -> SymElement<Site> {
        let g = w.gens();
        let p = g.len();
        let mut out = SymElement::zero();
        let perms = permutations(p);
        let weight = HScalar::from_rational(crate::scalar::inv_factorial(p as u32));
        let e_img: Vec<SymElement<Site>> = g.iter().map(|v| SymElement::from_linear(&self.e.apply_gen(v))).collect();
        let h_img: Vec<SymElement<Site>> = g.iter().map(|v| SymElement::from_linear(&self.h.apply_gen(v))).collect();
        for perm in perms {
            let mut odd = false;
            for x in 0..p {
                for y in x + 1..p {
                    if perm[x] > perm[y] && crate::scalar::is_odd(g[perm[x]].degree() * g[perm[y]].degree()) {
                        odd = !odd;
                    }
                }
            }
            let mut prefix_deg = 0;
            let mut head = SymElement::one();
            for k in 0..p {
                let v = &g[perm[k]];
                let mut term = head.mul(&h_img[perm[k]]);
                for rest in &perm[k + 1..] {
                    term = term.mul(&SymElement::generator(g[*rest]));
                }
                let s = sign_of(odd ^ crate::scalar::is_odd(prefix_deg));
                out.add_scaled(&term, &(&s * &weight));
                head = head.mul(&e_img[perm[k]]);
                prefix_deg += v.degree();
            }
        }
        out
    }

    pub fn apply(&self, a: &SymElement<Site>) -> SymElement<Site> {
        let mut out = SymElement::zero();
        for (w, c) in a.iter() {
            out.add_scaled(&self.apply_word(w), c);
        }
        out
    }

    /// `∂H = QH + HQ = id - Sym^p(e)` on the given words.
    pub fn verify(&self, name: &str, words: &[Word<Site>]) -> CheckReport {
        check_all(name, words, |w| {
            let a = SymElement::basis(w.clone());
            let lhs = extend_derivation(&self.q, &self.apply(&a)).plus(&self.apply(&extend_derivation(&self.q, &a)));
            let sym_e = w.gens().iter().fold(SymElement::one(), |acc, v| {
                acc.mul(&SymElement::from_linear(&self.e.apply_gen(v)))
            });
            let rhs = a.minus(&sym_e);
            mismatch(&lhs, &rhs).map(|d| Counterexample::new(format!("{w:?}"), d, w.len()))
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvtheory::FreeBVModel;
    use crate::lattice::{Lattice, Point};

    fn quant() -> Quantization {
        let th = Theory::new(FreeBVModel::kg(Lattice::new(9, 1).unwrap(), rat(1, 1), rat(1, 1))).unwrap();
        Quantization::new(&th).unwrap()
    }

    fn site(deg: i64, t: i64, x: i64) -> Site {
        Site { deg, t, x, fiber: 0 }
    }

    #[test]
    fn generator_level_values() {
        let q = quant();
        let (a, b) = (site(1, 0, 0), site(0, 0, 0));
        let (va, vb) = (SymElement::generator(a), SymElement::generator(b));
        assert_eq!(q.bv_differential(&va), q.classical_q(&va));
        let ab = va.mul(&vb);
        let want = q.classical_q(&ab).plus(&SymElement::one().scaled(&i_hbar(q.theory.tau_minus1(&a, &b))));
        assert_eq!(q.bv_differential(&ab), want);
        let (c, d) = (site(1, 0, 0), site(1, 2, 0));
        let (vc, vd) = (SymElement::generator(c), SymElement::generator(d));
        let moyal = vc.mul(&vd).plus(&SymElement::one().scaled(&i_hbar(q.theory.tau_0(&c, &d) * rat(1, 2))));
        assert_eq!(q.moyal_mul(&vc, &vd), moyal);
        let dirac = vc.mul(&vd).plus(&SymElement::one().scaled(&i_hbar(q.theory.tau_d(&c, &d))));
        assert_eq!(q.dirac_mul(&vc, &vd), dirac);
        assert_eq!(q.time_ordering(&vc, true), vc);
        assert_eq!(q.time_ordering(&vc.mul(&vd), true), dirac);
    }

    #[test]
    fn tuple_validation() {
        let q = quant();
        let l = *q.theory.lattice();
        let d = l.causal_hull(&[Point { t: 0, x: 0 }, Point { t: 2, x: 0 }]).unwrap();
        assert_eq!(q.tpfa_product(&[], &[]).unwrap(), SymElement::one());
        let v = SymElement::generator(site(0, 1, 0));
        assert_eq!(q.tpfa_product(std::slice::from_ref(&d), std::slice::from_ref(&v)).unwrap(), v);
        assert!(q.tpfa_product(&[d.clone(), d.clone()], &[v.clone(), v.clone()]).is_err());
        let outside = SymElement::generator(site(0, 5, 0));
        assert!(q.tpfa_product(std::slice::from_ref(&d), &[outside]).is_err());
    }

    #[test]
    fn permutations_are_complete() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
