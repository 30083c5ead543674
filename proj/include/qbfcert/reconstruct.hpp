#pragma once

#include <cstdint>
#include <stdexcept>

#include "qbfcert/certs.hpp"
#include "qbfcert/formula.hpp"
#include "qbfcert/preprocess.hpp"
#include "qbfcert/trace.hpp"

namespace qbfcert {

class ReconstructError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReconstructOptions {
  /// Check the certificate against every intermediate formula while walking
  /// the trace backwards. Models go through check_model, so this is only
  /// practical for small universal counts.
  bool recheck_steps = false;
  std::uint64_t max_enum = kDefaultMaxEnum;
};

/// QU-resolution refutation of `f` from the equivalence class recorded in an
/// ElsRefute step. Uses at most 2|S| resolutions.
Refutation build_els_refutation(const Formula& f, const ElsRefute& step);

/// Certificate for the preprocessed formula: the ElsRefute refutation when
/// the trace ends with one, otherwise the DP solver's certificate.
Certificate final_certificate(const Formula& preprocessed, const Trace& trace);

/// Turns a certificate for the trace's output formula into one for
/// `original`. Input nodes of a refutation are matched to output clauses by
/// literal set. Throws ReconstructError (and TraceError on a bad trace).
Certificate reconstruct(const Formula& original, const Trace& trace, const Certificate& final_cert,
                        const ReconstructOptions& options = {});

struct CertifiedResult {
  bool verdict = false;
  Certificate certificate;
  PreprocessResult preprocessed;
};

/// preprocess, final_certificate, reconstruct.
CertifiedResult solve_certified(const Formula& f, const PreprocessConfig& config = {},
                                const ReconstructOptions& options = {});

}  // namespace qbfcert
