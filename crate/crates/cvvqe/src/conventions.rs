//! Sign and ordering conventions used throughout the crate.
//!
//! Every oracle comparison in the test suite pins these choices; change one
//! and the Fock-space cross-checks will fail loudly.
//!
//! # Quadratures
//!
//! Ladder operators obey `[a_j, a_k†] = δ_jk`. Quadratures are
//!
//! ```text
//! x_j = a_j + a_j†,     p_j = i (a_j† − a_j),     [x_j, p_k] = 2i δ_jk.
//! ```
//!
//! With this scaling the vacuum covariance matrix is the identity. The
//! quadrature vector is ordered `ξ = (x_1 … x_N, p_1 … p_N)` (xxpp layout),
//! and the symplectic form is `Ω = [[0, I], [−I, 0]]`, so `[ξ, ξᵀ] = 2iΩ`.
//!
//! # Covariance and symplectic action
//!
//! `V = Re⟨ξ ξᵀ⟩` for zero-mean states. A Gaussian unitary `G` acts in the
//! Heisenberg picture as `G† ξ G = S ξ` with `S` real symplectic
//! (`S Ω Sᵀ = Ω`); the state `G|0⟩` then has covariance `V = S Sᵀ`.
//!
//! # Elementary Gaussian gates
//!
//! * Squeezer on mode `j`: `Sq(s) = exp[(s/2)(a_j² − a_j†²)]`. For `s > 0`
//!   this squeezes the position quadrature: `x_j → e^{−s} x_j`, so the
//!   covariance of a squeezed vacuum is `diag(e^{−2s}, e^{2s})` and the
//!   variance factor of `x_j` is `r_j = e^{−2 s_j} ∈ (0, 1]` for `s_j ≥ 0`.
//!   In the Fock basis `Sq(s)|0⟩ = (cosh s)^{−1/2} Σ_n (−tanh s)^n
//!   √((2n)!)/(2^n n!) |2n⟩`; the alternating sign is part of the convention.
//! * Two-mode rotation on modes `(j, k)`, `j < k`:
//!   `BS(θ) = exp[θ (a_k† a_j − a_j† a_k)]`, whose complex mode map is the
//!   real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
//! * Phase shifter on mode `j`: `P(φ) = exp[i φ a_j† a_j]`, complex mode map
//!   `e^{iφ}`.
//!
//! "Complex mode map" means the matrix `u` with `G† a_j G = Σ_k u_{jk} a_k`;
//! the corresponding orthogonal symplectic matrix is
//! `O = [[Re u, −Im u], [Im u, Re u]]`.
//!
//! # Passive mesh
//!
//! An `N`-mode passive network takes `N²` parameters: a rectangular mesh of
//! `N(N−1)/2` two-mode cells, each consuming `(θ, φ)` consecutively, followed
//! by `N` output phases. Cell order: mesh layers `ℓ = 0 … N−1`; layer `ℓ`
//! couples the pairs `(i, i+1)` for `i = ℓ mod 2, ℓ mod 2 + 2, …`. A cell on
//! `(j, k)` applies the phase `P(φ)` on mode `j` first, then `BS(θ)`, i.e.
//! its complex map is `[[e^{iφ} cos θ, −sin θ], [e^{iφ} sin θ, cos θ]]`.
//!
//! The full `N²+N`-parameter Gaussian unitary applies the per-mode squeezers
//! first and the passive mesh second, so its symplectic matrix is
//! `S = O · diag(e^{−s_1} … e^{−s_N}, e^{s_1} … e^{s_N})` and the prepared
//! covariance is `V = O Z Oᵀ` with `Z = diag(r_1 … r_N, 1/r_1 … 1/r_N)`.
//!
//! # Pair contractions
//!
//! Second moments of ladder operators on a Gaussian state with covariance
//! `V` (indices `1 ≤ j, k ≤ N`):
//!
//! ```text
//! ⟨a_j† a_k†⟩ = ¼ [ V_jk − V_{j+N,k+N} − i (V_{j,k+N} + V_{j+N,k}) ]
//! ⟨a_j  a_k ⟩ = conj ⟨a_j† a_k†⟩
//! ⟨a_j† a_k ⟩ = ¼ [ V_jk + V_{j+N,k+N} + i (V_{j,k+N} − V_{j+N,k}) − 2δ_jk ]
//! ⟨a_j  a_k†⟩ = δ_jk + ⟨a_k† a_j⟩
//! ```
//!
//! Note the index order in the last identity: for `j ≠ k` the exchange picks
//! up the transposed mixed block, which matters whenever `V`'s xp block is
//! not symmetric (generic multimode squeezed states).
//!
//! # Bogoliubov maps
//!
//! A Gaussian unitary conjugates creation operators forward:
//!
//! ```text
//! G a_k† G† = Σ_j E_{kj} a_j† + F_{kj} a_j,
//! ```
//!
//! with `E E† − F F† = I` and `E Fᵀ = F Eᵀ`. In terms of the blocks
//! `[[A, B], [C, D]]` of `M = S⁻¹`,
//!
//! ```text
//! E = ½ [(A + D) + i (B − C)],     F = ½ [(A − D) − i (B + C)].
//! ```
//!
//! Under this convention a single squeezer gives `E = cosh s`,
//! `F = +sinh s`, and a passive network with complex map `u` gives
//! `E = uᵀ`, `F = 0`. The forward direction is the one needed to commute a
//! ladder operator leftward past a Gaussian unitary:
//! `G a_k† = (Σ_j E_{kj} a_j† + F_{kj} a_j) G`.
