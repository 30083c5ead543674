// qbfcert: command line front end for generating, preprocessing, solving and
// certifying QBFs in QDIMACS form.
//
// Exit codes: 10 true, 20 false, 0 check passed, 1 check failed, 2 usage or IO error.
// solve, reconstruct and pipeline report the verdict; gen, prep and dot exit 0.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qbfcert/certs.hpp"
#include "qbfcert/families.hpp"
#include "qbfcert/formula.hpp"
#include "qbfcert/preprocess.hpp"
#include "qbfcert/reconstruct.hpp"
#include "qbfcert/solve.hpp"
#include "qbfcert/trace.hpp"

namespace {

using namespace qbfcert;

constexpr int kTrue = 10;
constexpr int kFalse = 20;
constexpr int kCheckOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

/// Writes to `path`, or to stdout when it is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

Formula read_formula(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::string> warnings;
  Formula f = parse_qdimacs(in, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << '\n';
  return f;
}

Trace read_trace(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_trace(in);
}

Certificate read_certificate(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse_certificate(in);
}

const char* verdict_word(bool v) { return v ? "TRUE" : "FALSE"; }

int verdict_code(bool v) { return v ? kTrue : kFalse; }

/// Model size counts and-gates, refutation size counts resolution steps.
std::string cert_size(const Certificate& c) {
  if (const auto* r = std::get_if<Refutation>(&c))
    return "refutation " + std::to_string(refutation_size(*r)) + " resolutions, " +
           std::to_string(r->nodes.size()) + " nodes";
  return "model " + std::to_string(model_size(std::get<Model>(c))) + " and-gates";
}

struct CheckOutcome {
  int code = kCheckOk;
  std::string text;
};

CheckOutcome check(const Formula& f, const Certificate& c, std::uint64_t max_enum) {
  if (const auto* r = std::get_if<Refutation>(&c)) {
    ProofCheck pc = check_refutation(f, *r);
    if (pc.ok) return {kCheckOk, "correct"};
    return {kCheckFailed, std::string("incorrect: ") + to_string(pc.fault) + " at node " + std::to_string(pc.node) +
                              ": " + pc.message};
  }
  ModelCheck mc = check_model(f, std::get<Model>(c), max_enum);
  switch (mc.verdict) {
    case ModelVerdict::kAccept:
      return {kCheckOk, "correct"};
    case ModelVerdict::kTooLarge:
      return {kUsage, "unknown: " + mc.message + " (raise --max-enum)"};
    case ModelVerdict::kScopeViolation:
      return {kCheckFailed, "incorrect: scope violation: " + mc.message};
    case ModelVerdict::kReject:
      break;
  }
  std::string text = "incorrect: " + mc.message;
  if (!mc.counterexample.empty()) {
    text += "; counterexample";
    for (auto [v, b] : mc.counterexample) text += " " + std::to_string(v) + "=" + (b ? "1" : "0");
  }
  return {kCheckFailed, text};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PrepFlags {
  std::string techniques = "all";
  std::int64_t ve_growth = 0;
  std::size_t max_iterations = 0;

  void add_to(CLI::App* app) {
    app->add_option("--techniques", techniques,
                    "Comma list from unit,pure,subsumption,selfsub,els,bce,ve, or all/none")
        ->capture_default_str();
    app->add_option("--ve-growth", ve_growth, "Allowed clause growth per eliminated variable")->capture_default_str();
    app->add_option("--max-iterations", max_iterations, "Fixpoint loop cap, 0 for unlimited")->capture_default_str();
  }

  PreprocessConfig config() const {
    PreprocessConfig c = parse_techniques(techniques);
    c.ve_growth = ve_growth;
    c.max_iterations = max_iterations;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QBF preprocessing with certificate reconstruction"};
  app.require_subcommand(1);
  int code = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "Write a generated formula as QDIMACS");
  std::string gen_family = "random";
  std::uint32_t gen_n = 3;
  RandomQcnfParams rp;
  std::string gen_out;
  gen->add_option("--family", gen_family, "iff or random")
      ->check(CLI::IsMember({"iff", "random"}))
      ->capture_default_str();
  gen->add_option("-n", gen_n, "Size of the iff family")->capture_default_str();
  gen->add_option("--seed", rp.seed, "Random seed")->capture_default_str();
  gen->add_option("--vars", rp.num_vars, "Number of variables")->capture_default_str();
  gen->add_option("--clauses", rp.num_clauses, "Number of clauses")->capture_default_str();
  gen->add_option("--min-len", rp.min_len, "Minimum clause length")->capture_default_str();
  gen->add_option("--max-len", rp.max_len, "Maximum clause length")->capture_default_str();
  gen->add_option("--universal-ratio", rp.universal_ratio, "Fraction of universal variables")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen->add_option("--out,-o", gen_out, "Output file (default stdout)");
  gen->callback([&] {
    Formula f = gen_family == "iff" ? gen_iff_family(gen_n) : gen_random_qcnf(rp);
    emit(gen_out, [&](std::ostream& o) { write_qdimacs(o, f); });
  });

  // prep
  auto* prep = app.add_subcommand("prep", "Preprocess a formula, writing the result and its trace");
  std::string prep_in, prep_out, prep_trace;
  PrepFlags prep_flags;
  prep->add_option("input", prep_in, "QDIMACS file")->required();
  prep->add_option("--out,-o", prep_out, "Simplified QDIMACS (default stdout)");
  prep->add_option("--trace", prep_trace, "Trace file")->required();
  prep_flags.add_to(prep);
  prep->callback([&] {
    PreprocessResult r = preprocess(read_formula(prep_in), prep_flags.config());
    emit(prep_out, [&](std::ostream& o) { write_qdimacs(o, r.formula); });
    emit(prep_trace, [&](std::ostream& o) { write_trace(o, r.trace); });
    if (r.verdict) std::cerr << "decided " << verdict_word(*r.verdict) << '\n';
  });

  // solve
  auto* solve = app.add_subcommand("solve", "Solve a formula and write its certificate");
  std::string solve_in, solve_cert;
  solve->add_option("input", solve_in, "QDIMACS file")->required();
  solve->add_option("--cert", solve_cert, "Certificate file (default stdout after the verdict)");
  solve->callback([&] {
    Formula f = read_formula(solve_in);
    SolveResult r = dp_solve(f);
    std::cout << verdict_word(r.verdict) << '\n';
    emit(solve_cert, [&](std::ostream& o) { write_certificate(o, r.certificate); });
    code = verdict_code(r.verdict);
  });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Lift a certificate of the preprocessed formula to the original");
  std::string rec_in, rec_trace, rec_cert, rec_out;
  ReconstructOptions rec_opts;
  rec->add_option("input", rec_in, "Original QDIMACS file")->required();
  rec->add_option("--trace", rec_trace, "Trace written by prep")->required();
  rec->add_option("--cert", rec_cert, "Certificate of the preprocessed formula")->required();
  rec->add_option("--out,-o", rec_out, "Reconstructed certificate (default stdout)");
  rec->add_flag("--recheck-steps", rec_opts.recheck_steps, "Check every intermediate certificate");
  rec->add_option("--max-enum", rec_opts.max_enum, "Universal assignment bound for model checks")
      ->capture_default_str();
  rec->callback([&] {
    Certificate c = reconstruct(read_formula(rec_in), read_trace(rec_trace), read_certificate(rec_cert), rec_opts);
    emit(rec_out, [&](std::ostream& o) { write_certificate(o, c); });
    code = verdict_code(std::holds_alternative<Model>(c));
  });

  // check
  auto* chk = app.add_subcommand("check", "Check a certificate against a formula");
  std::string chk_in, chk_cert;
  std::uint64_t chk_max_enum = kDefaultMaxEnum;
  chk->add_option("input", chk_in, "QDIMACS file")->required();
  chk->add_option("cert", chk_cert, "Certificate file")->required();
  chk->add_option("--max-enum", chk_max_enum, "Universal assignment bound for model checks")->capture_default_str();
  chk->callback([&] {
    CheckOutcome out = check(read_formula(chk_in), read_certificate(chk_cert), chk_max_enum);
    std::cout << out.text << '\n';
    code = out.code;
  });

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Preprocess, solve, reconstruct and check");
  std::string pipe_in, pipe_trace, pipe_cert, pipe_dot;
  PrepFlags pipe_flags;
  ReconstructOptions pipe_opts;
  pipe->add_option("input", pipe_in, "QDIMACS file")->required();
  pipe_flags.add_to(pipe);
  pipe->add_option("--trace", pipe_trace, "Also write the trace here");
  pipe->add_option("--cert", pipe_cert, "Also write the reconstructed certificate here");
  pipe->add_option("--dot", pipe_dot, "Also write the certificate as a graph here");
  pipe->add_flag("--recheck-steps", pipe_opts.recheck_steps, "Check every intermediate certificate");
  pipe->add_option("--max-enum", pipe_opts.max_enum, "Universal assignment bound for model checks")
      ->capture_default_str();
  pipe->callback([&] {
    auto t0 = std::chrono::steady_clock::now();
    Formula f = read_formula(pipe_in);
    const double t_parse = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    PreprocessResult pre = preprocess(f, pipe_flags.config());
    const double t_prep = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    Certificate fin = final_certificate(pre.formula, pre.trace);
    const double t_solve = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    Certificate cert = reconstruct(f, pre.trace, fin, pipe_opts);
    const double t_rec = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    CheckOutcome chk_out = check(f, cert, pipe_opts.max_enum);
    const double t_check = seconds_since(t0);

    const bool verdict = std::holds_alternative<Model>(cert);
    std::cout << verdict_word(verdict) << '\n'
              << "clauses " << f.num_clauses() << " -> " << pre.formula.num_clauses() << ", trace " << pre.trace.steps.size()
              << " steps\n"
              << "preprocessed certificate: " << cert_size(fin) << '\n'
              << "reconstructed certificate: " << cert_size(cert) << '\n'
              << "check: " << chk_out.text << '\n';
    std::printf("time parse %.6f prep %.6f solve %.6f reconstruct %.6f check %.6f\n", t_parse, t_prep, t_solve, t_rec,
                t_check);
    std::fflush(stdout);
    if (!pipe_trace.empty()) emit(pipe_trace, [&](std::ostream& o) { write_trace(o, pre.trace); });
    if (!pipe_cert.empty()) emit(pipe_cert, [&](std::ostream& o) { write_certificate(o, cert); });
    if (!pipe_dot.empty()) emit(pipe_dot, [&](std::ostream& o) { write_dot(o, cert); });
    code = chk_out.code == kCheckOk ? verdict_code(verdict) : chk_out.code;
  });

  // dot
  auto* dot = app.add_subcommand("dot", "Render a certificate as a Graphviz graph");
  std::string dot_cert, dot_out;
  dot->add_option("cert", dot_cert, "Certificate file")->required();
  dot->add_option("--out,-o", dot_out, "Output file (default stdout)");
  dot->callback([&] {
    Certificate c = read_certificate(dot_cert);
    emit(dot_out, [&](std::ostream& o) { write_dot(o, c); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return code;
}
