//! Green homotopies `Λ±`, `Λ`, `Λ_D` and the pairings `τ(-1)`, `τ(0)`,
//! `τ_D` on the shifted complex `F_c[1]`.
//!
//! Sections are stored with their bundle degree; the shifted degree of a
//! generator is one less. The shifted differential is `Q_V = -Q`.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::green::{Direction, GreenSolver};
use super::model::FreeBVModel;
use super::stencil::{Section, Site};
use crate::complexes::{BasisSpace, Complex, LinComb, LinMap};
use crate::error::Result;
use crate::scalar::{is_odd, rat, HScalar, Rational};
use crate::verify::{check_all, CheckReport, Counterexample};

/// Which combination of `G+` and `G-` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prop {
    Retarded,
    Advanced,
    /// `G = G+ - G-`.
    Causal,
    /// `G_D = (G+ + G-) / 2`.
    Dirac,
}

impl Prop {
    fn weights(self) -> [(Direction, Rational); 2] {
        let (one, zero, half) = (Rational::one(), Rational::zero(), rat(1, 2));
        match self {
            Prop::Retarded => [(Direction::Retarded, one), (Direction::Advanced, zero)],
            Prop::Advanced => [(Direction::Retarded, zero), (Direction::Advanced, one)],
            Prop::Causal => [(Direction::Retarded, one.clone()), (Direction::Advanced, -one)],
            Prop::Dirac => [(Direction::Retarded, half.clone()), (Direction::Advanced, half)],
        }
    }
}

/// A free BV model together with its Green operators.
pub struct Theory {
    pub model: FreeBVModel,
    pub green: Arc<GreenSolver>,
}

impl Theory {
    pub fn new(model: FreeBVModel) -> Result<Arc<Self>> {
        let green = Arc::new(GreenSolver::new(&model)?);
        Ok(Arc::new(Self { model, green }))
    }

    pub fn lattice(&self) -> &crate::lattice::Lattice {
        &self.model.lattice
    }

    /// `(G_prop δ_src)(at)`.
    pub fn green_at(&self, prop: Prop, src: &Site, at: &Site) -> Rational {
        let mut acc = Rational::zero();
        for (dir, w) in prop.weights() {
            if !w.is_zero() {
                acc += w * self.green.kernel_value(dir, src, at);
            }
        }
        acc
    }

    /// `(W G_prop δ_src)(at)`.
    pub fn lambda_at(&self, prop: Prop, src: &Site, at: &Site) -> Rational {
        if at.deg != src.deg - 1 {
            return Rational::zero();
        }
        self.model.w.eval_at(self.lattice(), at, |s| self.green_at(prop, src, s))
    }

    /// `G_prop φ` on `[t_lo, t_hi]`.
    pub fn green_apply(&self, prop: Prop, phi: &Section, t_lo: i64, t_hi: i64) -> Section {
        let mut out = Section::zero();
        for (dir, w) in prop.weights() {
            if !w.is_zero() {
                out.add_assign(&self.green.apply(dir, phi, t_lo, t_hi).scaled_rational(&w));
            }
        }
        out
    }

    /// `Λ_prop φ = W G_prop φ` on `[t_lo, t_hi]`.
    pub fn lambda_apply(&self, prop: Prop, phi: &Section, t_lo: i64, t_hi: i64) -> Section {
        let r = self.model.w.time_radius();
        let g = self.green_apply(prop, phi, t_lo - r, t_hi + r);
        self.model.apply_w(&g).filter(|s| s.t >= t_lo && s.t <= t_hi)
    }

    /// `G_prop W φ` on `[t_lo, t_hi]`; equals `lambda_apply` by the witness
    /// identities.
    pub fn lambda_apply_gw(&self, prop: Prop, phi: &Section, t_lo: i64, t_hi: i64) -> Section {
        self.green_apply(prop, &self.model.apply_w(phi), t_lo, t_hi)
    }

    /// `τ(-1)(a ⊗ b) = (-1)^{|a|} ∫(a, b)` with `|a|` the shifted degree.
    pub fn tau_minus1(&self, a: &Site, b: &Site) -> Rational {
        let v = self.model.pair_sites(a, b);
        if is_odd(a.shifted_degree()) {
            -v
        } else {
            v
        }
    }

    /// `∫(a, Λ_prop b)`.
    pub fn lambda_pairing(&self, prop: Prop, a: &Site, b: &Site) -> Rational {
        let m = 1 - a.deg;
        if m != b.deg - 1 {
            return Rational::zero();
        }
        let mut acc = Rational::zero();
        for f in 0..self.model.rank(m) {
            let g = self.model.metric.get(a.deg, m, a.fiber, f);
            if !g.is_zero() {
                let at = Site { deg: m, t: a.t, x: a.x, fiber: f };
                acc += g * self.lambda_at(prop, b, &at);
            }
        }
        acc
    }

    pub fn tau_0(&self, a: &Site, b: &Site) -> Rational {
        self.lambda_pairing(Prop::Causal, a, b)
    }

    pub fn tau_d(&self, a: &Site, b: &Site) -> Rational {
        self.lambda_pairing(Prop::Dirac, a, b)
    }

    /// Bilinear extension of a generator pairing to sections.
    pub fn pair_sections(&self, tau: impl Fn(&Site, &Site) -> Rational, u: &Section, v: &Section) -> HScalar {
        let mut acc = HScalar::zero();
        for (a, ca) in u.iter() {
            for (b, cb) in v.iter() {
                let t = tau(a, b);
                if !t.is_zero() {
                    acc.add_scaled(&(ca * cb), &t);
                }
            }
        }
        acc
    }

    /// `Q_V = -Q` on generators of `F_c[1]`.
    pub fn q_shifted(self: &Arc<Self>) -> LinMap<Site, Site> {
        let me = self.clone();
        LinMap::new(1, move |s: &Site| me.model.q.apply_site(me.lattice(), s).neg())
    }

    /// The ambient complex `F_c[1]` of compactly supported sections.
    pub fn ambient_complex(self: &Arc<Self>) -> Complex<Site> {
        Complex::new(BasisSpace::infinite(|s: &Site| s.shifted_degree()), self.q_shifted())
    }

    /// `(∂τ)(a ⊗ b) = -(-1)^p τ(Q_V a ⊗ b + (-1)^{|a|} a ⊗ Q_V b)`.
    pub fn pairing_differential(
        &self,
        tau: impl Fn(&Site, &Site) -> Rational,
        p: i64,
        a: &Site,
        b: &Site,
    ) -> Rational {
        let l = self.lattice();
        let qa = self.model.q.apply_site(l, a).neg();
        let qb = self.model.q.apply_site(l, b).neg();
        let mut inner = self.pair_sections(&tau, &qa, &Section::basis(*b));
        let right = self.pair_sections(&tau, &Section::basis(*a), &qb);
        if is_odd(a.shifted_degree()) {
            inner -= &right;
        } else {
            inner += &right;
        }
        let v = inner.as_rational().expect("rational pairing values");
        if is_odd(p) {
            v
        } else {
            -v
        }
    }

    /// Symmetry checks `τ∘γ = s τ` for the three pairings, plus
    /// `∂τ_D = τ(-1)`, on all given pairs.
    pub fn verify_structures(&self, pairs: &[(Site, Site)]) -> Vec<CheckReport> {
        let koszul = |a: &Site, b: &Site| is_odd(a.shifted_degree()) && is_odd(b.shifted_degree());
        let sym_check = |name: &str, tau: &(dyn Fn(&Site, &Site) -> Rational + Sync), s: i64| {
            check_all(name, pairs, |(a, b)| {
                let mut swapped = tau(b, a);
                if koszul(a, b) {
                    swapped = -swapped;
                }
                let want = if s > 0 { tau(a, b) } else { -tau(a, b) };
                (swapped != want).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("{swapped} vs {want}"), 2))
            })
        };
        let mut out = vec![
            sym_check("tau(-1) symmetric", &|a, b| self.tau_minus1(a, b), 1),
            sym_check("tau(0) antisymmetric", &|a, b| self.tau_0(a, b), -1),
            sym_check("tau_D symmetric", &|a, b| self.tau_d(a, b), 1),
        ];
        out.push(check_all("d tau_D = tau(-1)", pairs, |(a, b)| {
            let lhs = self.pairing_differential(|x, y| self.tau_d(x, y), 0, a, b);
            let rhs = self.tau_minus1(a, b);
            (lhs != rhs).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("{lhs} vs {rhs}"), 2))
        }));
        out
    }

    /// Lifts a generator pairing to the pairing oracle used by the algebra
    /// layer.
    pub fn oracle(self: &Arc<Self>, which: PairingKind) -> crate::symalg::PairingOracle<Site> {
        let me = self.clone();
        let (p, s) = match which {
            PairingKind::MinusOne => (1, 1),
            PairingKind::Zero => (0, -1),
            PairingKind::Dirac => (0, 1),
        };
        crate::symalg::PairingOracle::new(p, s, move |a: &Site, b: &Site| {
            let v = match which {
                PairingKind::MinusOne => me.tau_minus1(a, b),
                PairingKind::Zero => me.tau_0(a, b),
                PairingKind::Dirac => me.tau_d(a, b),
            };
            HScalar::from_rational(v)
        })
    }

    pub fn section(&self, terms: impl IntoIterator<Item = (Site, Rational)>) -> Section {
        terms.into_iter().map(|(s, c)| (s, HScalar::from_rational(c))).collect::<LinComb<Site>>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairingKind {
    MinusOne,
    Zero,
    Dirac,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn kg() -> Arc<Theory> {
        Theory::new(FreeBVModel::kg(Lattice::new(21, 1).unwrap(), rat(1, 1), rat(0, 1))).unwrap()
    }

    #[test]
    fn tau_minus1_on_kg_field_and_antifield() {
        let th = kg();
        let phi = Site { deg: 0, t: 0, x: 0, fiber: 0 };
        let anti = Site { deg: 1, t: 0, x: 0, fiber: 0 };
        // (-1)^{|φ|} (φ, φ‡) with |φ| = -1 and (φ, φ‡) = -1
        assert_eq!(th.tau_minus1(&phi, &anti), Rational::one());
        assert_eq!(th.tau_minus1(&anti, &phi), Rational::one());
        let far = Site { t: 3, ..anti };
        assert_eq!(th.tau_minus1(&phi, &far), Rational::zero());
    }

    #[test]
    fn pure_time_tau0() {
        let th = Theory::new(FreeBVModel::kg(Lattice::new(1, 1).unwrap(), rat(0, 1), rat(0, 1))).unwrap();
        let a = Site { deg: 1, t: 0, x: 0, fiber: 0 };
        let b = Site { deg: 1, t: 2, x: 0, fiber: 0 };
        // Λ b = G δ_2 as a degree-0 section; G δ_2 (0) = 0 - max(2 - 0, 0) = -2
        assert_eq!(th.green_at(Prop::Causal, &Site { deg: 0, ..b }, &Site { deg: 0, ..a }), rat(-2, 1));
        // ∫(a, Λb) pairs degree 1 with degree 0 through the block [[1]]
        assert_eq!(th.tau_0(&a, &b), rat(-2, 1));
        assert_eq!(th.tau_0(&b, &a), rat(2, 1));
    }

    #[test]
    fn lambda_orders_agree() {
        let th = Theory::new(FreeBVModel::maxwell2d(Lattice::new(11, 1).unwrap())).unwrap();
        let phi = th.section([(Site { deg: 1, t: 0, x: 3, fiber: 1 }, rat(1, 1)), (Site { deg: 2, t: 1, x: 4, fiber: 0 }, rat(-2, 3))]);
        for prop in [Prop::Retarded, Prop::Advanced, Prop::Causal, Prop::Dirac] {
            assert_eq!(th.lambda_apply(prop, &phi, -4, 5), th.lambda_apply_gw(prop, &phi, -4, 5));
        }
    }
}
