#pragma once

#include "rmtlab/cutoff.hpp"
#include "rmtlab/ensemble.hpp"
#include "rmtlab/test_function.hpp"

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

namespace rmtlab {

using cplx = std::complex<double>;

/// t_X = N^{-eps} N eta Re m.
double t_statistic(cplx m, std::size_t n, double epsilon, double eta);
double t_statistic(const MatrixSample& sample, double epsilon, cplx w, cplx z);

/// 1 iff |Re m^{(a,a)}| >= N^eps / (2 N eta), with m^{(a,a)} the trace of the minor with row and
/// column a removed.
int chi_a_indicator(const MatrixSample& sample, std::size_t a, double epsilon, cplx w, cplx z);

/// Quadrature setup shared by the functionals: midpoint grid on the bounding square of supp f in
/// xi (z = z0 + N^{-s} xi) and the log-uniform grid on I_eps in w.
struct FunctionalConfig {
  Bump f;
  cplx z0{1.0, 0.0};
  double s = 0.25;
  double epsilon = 0.05;
  int xi_nodes = 12;
  int e_nodes = 48;
  int eta_nodes = 32;
  /// Fraction of nodes allowed to fail the m_c solve.
  double max_invalid_fraction = 1e-3;
};

struct FunctionalNode {
  cplx xi;
  double e = 0.0;
  double eta = 0.0;
  double weight = 0.0;  // dA(xi) dE deta
  double integrand_a = 0.0;
  double integrand_z = 0.0;
};

struct FunctionalResult {
  double a = 0.0;
  double z = 0.0;
  /// N int |Lap f| int chi |phi'| 2 N^eps / (N eta): bound on |A - Z|.
  double budget = 0.0;
  std::size_t nodes = 0;
  std::size_t invalid_nodes = 0;
  /// Fraction of nodes with h(t_X) = 1.
  double saturated_fraction = 0.0;
  std::vector<FunctionalNode> audit;
};

/// A_X and Z_X in one sweep (they share every node). Throws SolveError when more than
/// max_invalid_fraction of the nodes fail.
FunctionalResult evaluate_functionals(const Eigen::MatrixXcd& x, const FunctionalConfig& config,
                                      bool keep_audit = false);
double A_functional(const MatrixSample& sample, const FunctionalConfig& config);
double Z_functional(const MatrixSample& sample, const FunctionalConfig& config);

/// Entry swap state. k is the 1-based swap counter in 1..N^2; entry k has 0-based position
/// a = (k-1) / N, b = (k-1) % N. X_k takes X at positions <= k and X' above.
struct SwapState {
  std::size_t k = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  cplx w;
  cplx z;
  double v = 0.0;  // X'(a, b)
  double u = 0.0;  // X(a, b)
  Eigen::MatrixXcd q_tilde;  // X_{k-1} with entry (a,b) zeroed
  Eigen::MatrixXcd q;        // q_tilde - z
  Eigen::MatrixXcd R;        // (Q^* Q - w)^{-1}
  Eigen::MatrixXcd calR;     // (Q Q^* - w)^{-1}
  Eigen::MatrixXcd S;        // (Y_{k-1}^* Y_{k-1} - w)^{-1}
  Eigen::MatrixXcd T;        // (Y_k^* Y_k - w)^{-1}
  cplx m_R, m_S, m_T;
  /// |m_S - m_R| <= 4 / (N eta)
  bool interlacing_ok = true;

  std::size_t dimension() const { return static_cast<std::size_t>(q.rows()); }
};

/// X_k of the interpolation between X' (k = 0) and X (k = N^2).
Eigen::MatrixXcd interpolate(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& x_prime, std::size_t k);

SwapState swap_setup(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& x_prime, std::size_t k,
                     cplx w, cplx z);

/// The resolvent entries that the expansion coefficients are built from (Q, R, calR at (a, b)).
struct SwapEntries {
  cplx w;
  std::size_t dimension = 0;
  cplx R_bb, R2_bb;
  cplx QR_ab, QR2_ab;
  cplx RQs_ba, R2Qs_ba;
  cplx QRQs_aa, QR2Qs_aa;
  cplx calR_aa;
  cplx m_R;
};

SwapEntries swap_entries(const SwapState& state);

/// Entries from a full SVD of Q, in O(N) per w once the SVD is known.
class SvdEntries {
 public:
  SvdEntries(const Eigen::MatrixXcd& q, std::size_t a, std::size_t b);
  SwapEntries at(cplx w) const;

 private:
  std::size_t n_;
  Eigen::VectorXd s2_;
  Eigen::VectorXd s_;
  Eigen::VectorXd va2_;  // |V_bj|^2
  Eigen::VectorXd ua2_;  // |U_aj|^2
  Eigen::VectorXcd uv_;  // U_aj conj(V_bj)
  Eigen::VectorXcd vu_;  // V_bj conj(U_aj)
};

enum class PRoute {
  /// Power series of the rank-two Woodbury update; valid for complex Q.
  series,
  /// The closed-form products of resolvent entries; these assume a real Q (real z).
  explicit_real,
};

/// Re m_S - Re m_R = P1 v + P2 v^2 + P3 v^3 + O(v^4).
std::array<double, 3> p_coefficients(const SwapEntries& e, PRoute route = PRoute::series);
std::array<double, 3> p_coefficients(const SwapState& state, PRoute route = PRoute::series);

/// Exact Re m_{S(v)} - Re m_R where S(v) is the resolvent with entry (a,b) of Q replaced by v.
double exact_difference(const SwapState& state, double v);

struct ExpansionRow {
  double v = 0.0;
  double residual = 0.0;  // r(v)
  double scaled = 0.0;    // r(v) / v^4
};

std::vector<ExpansionRow> expansion_residual(const SwapState& state, const std::vector<double>& v_values,
                                             PRoute route = PRoute::series);

/// B_n = c^{n-1} (n h^{(n-1)}(t) + h^{(n)}(t) t) / n! with c = N^{1-eps} eta.
struct BCoefficients {
  std::array<double, 3> b{};
  double t = 0.0;
  double scale = 0.0;  // c
};

BCoefficients b_coefficients(double t, double scale);
BCoefficients b_coefficients(const SwapState& state, double epsilon);

/// sup over t of |B_n(t)| / c^{n-1} on a fine grid of t in [0, 3].
std::array<double, 3> b_sharp_constants();

/// script P_n for n = 1, 2, 3 of a sample whose entry (a, b) is zero; Q-tilde is the sample itself.
double script_p(const MatrixSample& sample, std::size_t a, std::size_t b, const FunctionalConfig& config,
                int n);
std::array<double, 3> script_p_all(const Eigen::MatrixXcd& q_tilde, std::size_t a, std::size_t b,
                                   const FunctionalConfig& config);

struct HalfGainReport {
  std::size_t dimension = 0;
  std::size_t trials = 0;
  cplx mean;
  double abs_mean = 0.0;
  double std_error = 0.0;
  double median_abs = 0.0;
  double ratio = 0.0;  // abs_mean / median_abs
  /// Same statistics pooled over all off-diagonal pairs (i, j) with i != j of every trial.
  double pooled_abs_mean = 0.0;
  double pooled_std_error = 0.0;
  double pooled_median_abs = 0.0;
  double pooled_ratio = 0.0;
};

/// Monte Carlo of h(t_X) (Y G)_{ab} over independent samples (seeds trial_seed(seed, t)).
/// Throws InsufficientTrials below min_trials.
HalfGainReport half_gain_probe(const EnsembleSpec& spec, std::size_t a, std::size_t b, cplx w, cplx z,
                               std::size_t trials, std::uint64_t seed, double epsilon = 0.05,
                               std::size_t min_trials = 2000);

/// CSV "re_xi,im_xi,E,eta,weight,integrand_a,integrand_z".
void write_functional_nodes_csv(std::ostream& out, const std::vector<FunctionalNode>& nodes);
/// CSV "v,residual,scaled".
void write_expansion_csv(std::ostream& out, const std::vector<ExpansionRow>& rows);

}  // namespace rmtlab
