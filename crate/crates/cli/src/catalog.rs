//! The identities the verifier knows about, with the anchors used to cite
//! them in reports.

pub struct Entry {
    pub id: &'static str,
    pub suite: &'static str,
    pub anchor: &'static str,
    pub statement: &'static str,
    pub strategy: &'static str,
}

macro_rules! entries {
    ($( $id:literal, $suite:literal, $anchor:literal, $statement:literal, $strategy:literal; )*) => {
        pub const CATALOG: &[Entry] = &[
            $( Entry { id: $id, suite: $suite, anchor: $anchor, statement: $statement, strategy: $strategy }, )*
        ];
    };
}

entries! {
    "alg-laplacian-explicit", "algebra", "BV Laplacian of a word",
    "Δ_τ(v_1 ⋯ v_n) = Σ_{i<j} ± τ(v_i ⊗ v_j) v_1 ⋯ v̂_i ⋯ v̂_j ⋯ v_n, the unique second order operator with Δ_τ(v_1 v_2) = τ(v_1 ⊗ v_2).",
    "Closed-form signed sum compared with the recursion Δ(v·w) = (-1)^{p|v|} v Δ(w) + μ⟨v, w⟩_τ on random words over a random graded space.";
    "alg-bider-closed-form", "algebra", "biderivation extension of τ",
    "⟨-,-⟩_τ is the biderivation with ⟨v_1, v_2⟩_τ = τ(v_1 ⊗ v_2) 𝟙 ⊗ 𝟙.",
    "Closed-form double sum compared with recursion in the second slot plus graded symmetry, on random pairs of words.";
    "alg-d-laplacian", "algebra", "∂Δ_τ = Δ_∂τ",
    "Commutator of the Laplacian with the Leibniz differential equals the Laplacian of the differentiated pairing.",
    "Both sides applied to random elements over a random complex with d² = 0.";
    "alg-laplacian-commute", "algebra", "Δ_τ Δ_τ' = (-1)^{pp'} Δ_τ' Δ_τ",
    "Laplacians of two symmetric pairings graded-commute.",
    "Both compositions applied to random elements, for even/odd and odd/odd degree pairs.";
    "alg-binomial", "algebra", "Δ^n_τ ∘ μ = μ ∘ (Δ_τ⊗ + ⟨-,-⟩_τ)^n",
    "Powers of the Laplacian pass through the product via the tensor Laplacian plus the biderivation.",
    "Both sides on random pairs for n ≤ 3; the tensor Laplacian is Δ ⊗ 1 + (-1)^{p|a|} 1 ⊗ Δ.";
    "alg-naturality", "algebra", "Sym f ∘ Δ_τ = Δ_ω ∘ Sym f",
    "For a chain map f with ω ∘ (f ⊗ f) = τ, Sym f intertwines the Laplacians and the biderivations of all three pairings.",
    "f ranges over the inclusion of a region and a lattice translation, with ω = τ by translation invariance.";
    "def-metric-compat", "structures", "compatibility (3.1)",
    "∫(Qφ_1, φ_2) + (-1)^{|φ_1|} ∫(φ_1, Qφ_2) = 0 for compactly supported sections.",
    "Exact integral over all pairs of delta sections in the window.";
    "def-witness-i", "structures", "witness (i)",
    "P := QW + WQ is Green hyperbolic.",
    "The retarded and advanced solvers exist in every degree and their stencils stay inside the light cone.";
    "def-witness-ii", "structures", "witness (ii)",
    "QWW = WWQ.",
    "Stencil composition compared symbolically and on delta sections.";
    "def-witness-iii", "structures", "witness (iii)",
    "W is formally self-adjoint: ∫(Wφ_1, φ_2) = (-1)^{|φ_1|} ∫(φ_1, Wφ_2).",
    "Exact integral over all pairs of delta sections in the window.";
    "def-complex", "structures", "Q² = 0",
    "The linear differential squares to zero.",
    "Stencil composition compared symbolically and on delta sections.";
    "rem-commute", "structures", "PQ = QP, PW = WP, P self-adjoint",
    "The Green hyperbolic operator commutes with Q and W and is formally self-adjoint.",
    "Stencil identities plus exact integrals on the window.";
    "green-inverse", "structures", "PG_± = id, G_± P = id",
    "The retarded and advanced Green operators invert P on both sides.",
    "Solutions of delta sources on a finite time window; P G_± checked on the interior slices.";
    "green-support", "structures", "supp G_± φ ⊆ J_±(supp φ)",
    "Retarded solutions live in the causal future and advanced ones in the causal past.",
    "Every nonzero entry of G_± δ_s is tested against the discrete light cone of s.";
    "green-distinct", "structures", "G_+ ≠ G_-",
    "The two Green operators differ, so G = G_+ - G_- is nonzero.",
    "Some delta in the window has different retarded and advanced solutions.";
    "green-commute", "structures", "G_± commutes with Q and W",
    "G_± Q = Q G_± and G_± W = W G_± on compactly supported sections.",
    "Both sides on delta sources, compared on the interior slices.";
    "green-adjoint", "structures", "G_± adjoint to G_∓, G skew-adjoint",
    "∫(G_+ φ_1, φ_2) = ∫(φ_1, G_- φ_2) and ∫(Gφ_1, φ_2) + ∫(φ_1, Gφ_2) = 0.",
    "Exact integrals on all pairs of deltas in the window.";
    "struct-pairings", "structures", "symmetry of τ(-1), τ(0), τ_D",
    "τ(-1) and τ_D are graded symmetric, τ(0) graded antisymmetric.",
    "τ(w, v) compared with ±(-1)^{|v||w|} τ(v, w) on all pairs of deltas in the window.";
    "struct-dirac-trivializes", "structures", "∂τ_D = τ(-1)",
    "The Dirac pairing trivializes the shifted symplectic pairing.",
    "∂τ_D = -(-1)^p τ_D ∘ (Q ⊗ 1 + 1 ⊗ Q) evaluated exactly on all pairs of deltas.";
    "thm-3.7a-causality", "theorems", "τ(0) vanishes on causally disjoint supports",
    "τ(0)(φ_1, φ_2) = 0 whenever supp φ_1 and supp φ_2 are causally disjoint.",
    "Every pair of deltas from each configured spacelike pair of regions.";
    "thm-3.7b-quasi-inverse", "theorems", "Cauchy quasi-inverse",
    "For a Cauchy region with cutoff, g = [Q, χ_+]Λ is a quasi-inverse of the inclusion with ∂η = id - f g and ∂ζ = id - g f.",
    "η and ζ built from the cutoff; both homotopy identities checked on deltas across the slab, plus support of g and ζ.";
    "prop-3.8-half", "theorems", "τ_D = ½ τ(0) on time-ordered pairs",
    "On a time-ordered pair (later, earlier), τ_D agrees with ½ τ(0).",
    "Every pair of deltas from each configured time-ordered pair.";
    "bv-square", "quantization", "Q_ℏ := Q + iℏΔ_BV, Q_ℏ² = 0",
    "The quantum differential squares to zero.",
    "Q_ℏ² on random elements of bounded length.";
    "bv-filtration", "quantization", "word-length filtration",
    "Q_ℏ preserves the filtration by word length and induces Sym^p Q on the graded pieces.",
    "Image lengths and leading parts on homogeneous samples, p ≤ p_max.";
    "tpfa-chainmap", "quantization", "Q_ℏ F(f) = F(f) Q_ℏ^⊗",
    "The factorization product of the BV quantization is a chain map.",
    "Both sides on random inputs supported in each configured tuple.";
    "moyal-algebra", "quantization", "μ_ℏ := μ ∘ exp(iℏ/2 ⟨-,-⟩(0))",
    "μ_ℏ is associative, unital and compatible with Q.",
    "Random triples and pairs supported in a diamond.";
    "moyal-classical", "quantization", "μ_ℏ = μ + O(ℏ), [a, b]_ℏ = iℏ{a, b}(0) + O(ℏ²)",
    "The star product deforms the commutative product in the direction of the Poisson bracket.",
    "ℏ-coefficients of the product and the graded commutator on random pairs.";
    "einstein-causality", "quantization", "Einstein causality",
    "Observables in causally disjoint regions graded-commute under the star product.",
    "Star commutators of generators and products of generators from each spacelike pair.";
    "dirac-product", "quantization", "μ_D := μ ∘ exp(iℏ⟨-,-⟩_D)",
    "μ_D is associative, unital and graded commutative.",
    "Random triples and pairs supported in a diamond.";
    "lemma-4.5-dirac", "quantization", "μ_D^(n) = F_A(f) on time-ordered tuples",
    "On a time-orderable tuple the Dirac product computes the factorization product of the Moyal-Weyl algebra, and ⟨-,-⟩_D^k = (½⟨-,-⟩(0))^k on time-ordered pairs.",
    "Both sides on random inputs for every configured tuple; bracket powers for k ≤ 3.";
    "thm-4.6-chainmap", "comparison", "Q ◦ T_M = T_M ◦ Q_ℏ",
    "The time-ordering map T := exp(iℏΔ_D) intertwines the quantum and classical differentials: Q ◦ T_M = T_M ◦ Q_ℏ.",
    "All words of length ≤ 2 over a diamond plus random longer words.";
    "thm-4.6-multiplicative", "comparison", "T_N ◦ μ = μ_D ◦ (T_N ⊗ T_N)",
    "The time-ordering map turns the commutative product into the Dirac product.",
    "Random pairs of words supported in a diamond.";
    "thm-4.6-inverse", "comparison", "T^{-1} = exp(-iℏΔ_D)",
    "exp(-iℏΔ_D) inverts T and T reduces to the identity at ℏ = 0.",
    "Same words as the chain map check.";
    "thm-4.6-naturality", "comparison", "T natural in the region",
    "Δ_D commutes with pushforward along lattice translations and region inclusions.",
    "Translated words compared before and after Δ_D.";
    "thm-4.6-factorization", "comparison", "T_N ◦ F(f) = F_A(f) ◦ T_M^⊗",
    "T intertwines the factorization products of the BV and Moyal-Weyl quantizations.",
    "Every configured tuple, the Moyal-Weyl side evaluated through the factorization of the tuple.";
    "timeslice-sym-power", "timeslice", "∂H_p = id - Sym^p(g) Sym^p(f)",
    "The Cauchy quasi-inverse lifts to every symmetric power, so the inclusion of a Cauchy region is a quasi-isomorphism of BV quantizations.",
    "Homotopies Σ_k e^{⊗(k-1)} ⊗ h ⊗ id symmetrized, checked on random words of each length p ≤ p_max on a small ring.";
    "nontrivial", "all", "sanity of the sampled inputs",
    "Sampled inputs exercise the identity: some operator in it acts nontrivially.",
    "A failed record means the samples would have made the other checks vacuous.";
}

pub fn find(id: &str) -> Option<&'static Entry> {
    CATALOG.iter().find(|e| e.id == id)
}

pub fn explain(id: &str) -> Result<String, String> {
    match find(id) {
        Some(e) => Ok(format!(
            "{}\n  suite:     {}\n  anchor:    {}\n  statement: {}\n  checked:   {}\n",
            e.id, e.suite, e.anchor, e.statement, e.strategy
        )),
        None => {
            let ids: Vec<_> = CATALOG.iter().map(|e| e.id).collect();
            Err(format!("unknown identity {id:?}; valid ids:\n  {}", ids.join("\n  ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_unique_and_suites_known() {
        let mut ids: Vec<_> = CATALOG.iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CATALOG.len());
        for e in CATALOG {
            assert!(e.suite == "all" || crate::suites::SUITES.iter().any(|(n, _)| *n == e.suite), "{}", e.id);
        }
    }
}
