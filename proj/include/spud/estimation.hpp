#pragma once

#include <cstddef>
#include <span>

#include "spud/index.hpp"

namespace spud {

/// psi(x) = d/dx log Gamma(x) for x > 0. Shifts the argument up to x >= 10 with
/// psi(x) = psi(x + 1) - 1/x, then evaluates the asymptotic expansion.
/// Throws DomainError for x <= 0 or non-finite x.
[[nodiscard]] double digamma(double x);

struct McEstimate {
    double m_c = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Relative stationarity gap 1 - m·(Σ_j psi(|d_j| + m) - n·psi(m)) / Σ_j |d⃗_j|
    /// at the returned m; zero at an exact fixed point.
    double residual = 0.0;
    /// Every document has length one, so any m is a fixed point.
    bool uninformative = false;
};

struct McOptions {
    double init = 200.0;
    double tol = 1e-8;
    std::size_t max_iter = 100;
};

/// Length pair of one document as the estimator sees it.
struct DocLengths {
    std::uint64_t tokens = 0;  // |d|
    std::uint64_t types = 0;   // |d⃗|
};

/// Background concentration m_c of the document-frequency DCM, found by
/// iterating m <- Σ_j |d⃗_j| / (Σ_j psi(|d_j| + m) - n·psi(m)) until the
/// relative change drops below tol. Empty documents are skipped.
///
/// Throws DomainError for a bad init or when no document is non-empty, and
/// DivergenceError (carrying the last iterate) if an iterate is not a positive
/// finite number. Hitting max_iter is reported through `converged`.
[[nodiscard]] McEstimate estimate_mc(std::span<DocLengths const> docs, McOptions const& options = {});
[[nodiscard]] McEstimate estimate_mc(InvertedIndex const& index, McOptions const& options = {});

/// The stationarity gap reported as McEstimate::residual.
[[nodiscard]] double mc_residual(std::span<DocLengths const> docs, double m_c);

/// mu' = omega / (1 - omega) · m_c, with omega taken as its shortest decimal
/// form (so omega = 0.8 yields exactly 4·m_c). Throws DomainError unless
/// 0 < omega < 1 and m_c > 0.
[[nodiscard]] double derive_mu_prime(double omega, double m_c);

struct SmoothingHyper {
    double omega = 0.0;
    double m_c = 0.0;
    double mu_prime = 0.0;
};

[[nodiscard]] SmoothingHyper compose_smoothing(double omega, double m_c);

struct DocSideEstimates {
    double m_d = 0.0;        // document DCM concentration, |d⃗|
    double lambda_jm = 0.0;  // chance of drawing an unseen term, |d⃗|/|d|
};

/// Throws DomainError for an empty document.
[[nodiscard]] DocSideEstimates doc_side_estimates(DocStats const& doc);

}  // namespace spud
