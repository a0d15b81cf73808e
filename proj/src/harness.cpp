#include "psar/harness.hpp"

#include "psar/comb.hpp"
#include "psar/psar.hpp"
#include "psar/realizations.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace psar::harness {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

// Fixed angle used where a probability check needs some phase value; the
// success probability is phase independent.
constexpr double kProbePhase = 0.7;

std::vector<double> q_default_grid() { return Grid{0.0, 0.1, 1.0}.points(); }

std::vector<double> phi_default_grid() {
  std::vector<double> phis;
  for (int i = 0; i <= 10; ++i) phis.push_back(i * kPi / 5.0);
  return phis;
}

double angle_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * kPi));
}

json decomposition_json(const RetrievedDecomposition& d) {
  return json{{"p_success", d.p_success},
              {"unitary_weight", d.unitary_weight},
              {"dephasing_weight", d.dephasing_weight},
              {"phase", d.phase},
              {"residual_norm", d.residual_norm}};
}

std::string outcome_name(const VqOutcome& o) {
  switch (o.kind) {
    case VqOutcome::Kind::SuccessBlock:
      return "success_block";
    case VqOutcome::Kind::Fail:
      return "fail";
    case VqOutcome::Kind::Complement:
      return "complement_" + std::to_string(o.complement_index);
  }
  return "unknown";
}

// --- randomized cross-check material (fixed seed, deterministic) ---------

Matrix random_matrix(std::mt19937& rng, long rows, long cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return m;
}

LabeledOperator random_density(std::mt19937& rng, const SpaceLayout& layout) {
  const long d = layout.total_dim();
  const Matrix g = random_matrix(rng, d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return {std::move(rho), layout};
}

KrausChannel random_channel(std::mt19937& rng, int dim, int n_kraus = 3) {
  std::vector<Matrix> ops;
  Matrix s = Matrix::Zero(dim, dim);
  for (int i = 0; i < n_kraus; ++i) {
    ops.push_back(random_matrix(rng, dim, dim));
    s += ops.back().adjoint() * ops.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Matrix inv_sqrt =
      es.eigenvectors() *
      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().adjoint();
  for (auto& k : ops) k = k * inv_sqrt;
  return KrausChannel(std::move(ops), dim, dim);
}

KrausChannel compose_channels(const KrausChannel& first,
                              const KrausChannel& second) {
  std::vector<Matrix> ops;
  for (const auto& b : second.kraus)
    for (const auto& a : first.kraus) ops.push_back(b * a);
  return KrausChannel(std::move(ops), first.dim_in, second.dim_out);
}

// --- selftest plumbing ----------------------------------------------------

struct Check {
  std::string name;
  double max_dev = 0.0;
  double tol = 0.0;
  bool failed_hard = false;  // exception or structural failure

  bool pass() const { return !failed_hard && max_dev <= tol; }
};

void observe(Check& check, double dev) {
  check.max_dev = std::max(check.max_dev, dev);
}

}  // namespace

Grid Grid::parse(const std::string& spec) {
  Grid g;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(spec);
  if (!(in >> g.start >> sep1 >> g.step >> sep2 >> g.end) || sep1 != ':' ||
      sep2 != ':' || !(in >> std::ws).eof())
    throw std::invalid_argument("grid must have the form start:step:end");
  if (g.step <= 0.0 || g.end < g.start)
    throw std::invalid_argument("grid requires step > 0 and end >= start");
  return g;
}

std::vector<double> Grid::points() const {
  const long count = std::lround((end - start) / step) + 1;
  std::vector<double> pts;
  for (long i = 0; i < count; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (v > end) v = end;
    pts.push_back(v);
  }
  return pts;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string figure_success_csv(const std::vector<int>& n_list,
                               const Grid& q_grid) {
  if (n_list.empty())
    throw std::invalid_argument("figure success: need at least one n");
  std::ostringstream out;
  out << "q";
  for (int n : n_list)
    out << ",depolarizing_n" << n << ",dephasing_n" << n;
  out << "\n";

  // Retrieval cross-check material, built once per n.
  std::vector<RetrievalOperator> checkers;
  for (int n : n_list)
    if (n <= kMaxUsesChoiRoute) checkers.push_back(retrieval_operator(n));

  for (double q : q_grid.points()) {
    out << format_number(q);
    for (int n : n_list) {
      const ClosedForm dep = depolarizing_closed_form(n, q);
      const ClosedForm deph = dephasing_closed_form(n, q);
      if (n <= kMaxUsesChoiRoute) {
        const auto& rs = *std::find_if(
            checkers.begin(), checkers.end(),
            [&](const RetrievalOperator& r) { return r.n_uses == n; });
        const LabeledOperator got = retrieve(
            rs, store(n, NoiseModel(NoiseKind::Depolarizing, q), {kProbePhase}));
        const double p = got.trace().real() / 2.0;
        if (std::abs(p - dep.p_success) > 1e-9)
          throw std::runtime_error(
              "figure success: closed form disagrees with retrieval at n=" +
              std::to_string(n) + ", q=" + format_number(q));
      }
      out << "," << format_number(dep.p_success) << ","
          << format_number(deph.p_success);
    }
    out << "\n";
  }
  return out.str();
}

std::string figure_noise_map_csv(const Grid& q_grid) {
  std::ostringstream out;
  out << "q,qprime_depolarizing,qprime_dephasing\n";
  for (double q : q_grid.points())
    out << format_number(q) << ","
        << format_number(depolarizing_closed_form(1, q).q_prime) << ","
        << format_number(dephasing_closed_form(1, q).q_prime) << "\n";
  return out.str();
}

std::string simulate_report(const SimulateOptions& opts) {
  const NoiseModel noise(opts.noise, opts.q);
  const PhaseAngle phi{opts.phi};
  json report{{"scheme", opts.scheme},
              {"noise", to_string(opts.noise)},
              {"q", opts.q},
              {"phi", opts.phi}};

  if (opts.scheme == "psar") {
    if (opts.n < 1) throw std::invalid_argument("psar scheme requires --n >= 1");
    const RetrievalOperator rs = retrieval_operator(opts.n);
    const LabeledOperator choi = retrieve(rs, store(opts.n, noise, phi));
    const RetrievedDecomposition d = decompose_retrieved(choi);
    const ClosedForm cf = opts.noise == NoiseKind::Depolarizing
                              ? depolarizing_closed_form(opts.n, opts.q)
                              : dephasing_closed_form(opts.n, opts.q);
    report["n"] = opts.n;
    report.update(decomposition_json(d));
    report["closed_form"] = {{"p_success", cf.p_success},
                             {"q_prime", cf.q_prime}};
    if (opts.format == "csv") {
      std::ostringstream out;
      out << "scheme,noise,q,phi,n,p_success,unitary_weight,dephasing_weight,"
             "phase,residual_norm\n"
          << "psar," << to_string(opts.noise) << "," << format_number(opts.q)
          << "," << format_number(opts.phi) << "," << opts.n << ","
          << format_number(d.p_success) << ","
          << format_number(d.unitary_weight) << ","
          << format_number(d.dephasing_weight) << ","
          << format_number(d.phase) << "," << format_number(d.residual_norm)
          << "\n";
      return out.str();
    }
  } else if (opts.scheme == "vmc") {
    if (opts.k < 1) throw std::invalid_argument("vmc scheme requires --k >= 1");
    const auto rounds = vmc_run(noise, phi, opts.k);
    report["k"] = opts.k;
    json arr = json::array();
    for (const auto& r : rounds)
      arr.push_back(
          {{"round", r.round_index},
           {"uses", r.uses_this_round},
           {"cumulative_uses", r.cumulative_uses},
           {"p_success", r.success_probability},
           {"p_conditional", r.conditional_success_probability},
           {"p_cumulative", r.cumulative_success},
           {"success", decomposition_json(r.success_channel)},
           {"failure", decomposition_json(r.failure_channel)}});
    report["rounds"] = std::move(arr);
    report["cumulative_success"] = rounds.back().cumulative_success;
    if (opts.format == "csv") {
      std::ostringstream out;
      out << "scheme,round,uses,cumulative_uses,p_success,p_conditional,"
             "p_cumulative,success_unitary_weight,success_phase,"
             "failure_unitary_weight,failure_phase\n";
      for (const auto& r : rounds)
        out << "vmc," << r.round_index << "," << r.uses_this_round << ","
            << r.cumulative_uses << "," << format_number(r.success_probability)
            << "," << format_number(r.conditional_success_probability) << ","
            << format_number(r.cumulative_success) << ","
            << format_number(r.success_channel.unitary_weight) << ","
            << format_number(r.success_channel.phase) << ","
            << format_number(r.failure_channel.unitary_weight) << ","
            << format_number(r.failure_channel.phase) << "\n";
      return out.str();
    }
  } else if (opts.scheme == "vq") {
    if (opts.n < 1) throw std::invalid_argument("vq scheme requires --n >= 1");
    const auto outcomes = vq_run(noise, phi, opts.n);
    report["n"] = opts.n;
    json arr = json::array();
    for (const auto& o : outcomes) {
      json entry{{"outcome", outcome_name(o)}, {"probability", o.probability}};
      if (o.probability > 0.0) {
        LabeledOperator normalized = o.choi;
        normalized.matrix /= o.probability;
        try {
          const RetrievedDecomposition d = decompose_retrieved(normalized);
          entry["in_family"] = true;
          entry["unitary_weight"] = d.unitary_weight;
          entry["dephasing_weight"] = d.dephasing_weight;
          entry["phase"] = d.phase;
          entry["residual_norm"] = d.residual_norm;
        } catch (const OutOfModelFamilyError& e) {
          entry["in_family"] = false;
          entry["residual_norm"] = e.residual();
        }
      }
      arr.push_back(std::move(entry));
    }
    report["outcomes"] = std::move(arr);
    if (opts.format == "csv") {
      std::ostringstream out;
      out << "scheme,outcome,probability,in_family,unitary_weight,"
             "dephasing_weight,phase,residual_norm\n";
      for (const auto& entry : report["outcomes"])
        out << "vq," << entry["outcome"].get<std::string>() << ","
            << format_number(entry["probability"].get<double>()) << ","
            << (entry.value("in_family", false) ? "1" : "0") << ","
            << format_number(entry.value("unitary_weight", 0.0)) << ","
            << format_number(entry.value("dephasing_weight", 0.0)) << ","
            << format_number(entry.value("phase", 0.0)) << ","
            << format_number(entry.value("residual_norm", 0.0)) << "\n";
      return out.str();
    }
  } else {
    throw std::invalid_argument("unknown scheme '" + opts.scheme +
                                "' (expected psar, vmc or vq)");
  }
  return report.dump(2) + "\n";
}

int run_selftest(std::ostream& out, const SelftestOptions& opts) {
  std::vector<Check> checks;

  // Closed-form agreement of the full retrieval, both noise models.
  for (const NoiseKind kind :
       {NoiseKind::Depolarizing, NoiseKind::Dephasing}) {
    Check check{to_string(kind) + " closed-form agreement", 0.0, 1e-9};
    try {
      for (int n = 1; n <= 4; ++n) {
        RetrievalOperator rs = retrieval_operator(n);
        if (opts.corrupt_retrieval) rs.op.matrix(0, 0) += 0.05;
        for (double q : q_default_grid()) {
          const ClosedForm cf = kind == NoiseKind::Depolarizing
                                    ? depolarizing_closed_form(n, q)
                                    : dephasing_closed_form(n, q);
          for (double phi : phi_default_grid()) {
            const RetrievedDecomposition d = decompose_retrieved(
                retrieve(rs, store(n, NoiseModel(kind, q), {phi})));
            observe(check, std::abs(d.p_success - cf.p_success));
            if (q > 0.0) {
              observe(check, std::abs(d.unitary_weight - cf.q_prime));
              observe(check, angle_distance(d.phase, phi));
            }
          }
        }
      }
    } catch (const std::exception&) {
      check.failed_hard = true;
    }
    checks.push_back(check);
  }

  // Binomial pattern vs retrieval coefficients.
  {
    Check check{"binomial coefficients vs retrieval", 0.0, 1e-10};
    for (int n = 1; n <= 4; ++n) {
      const RetrievalOperator rs = retrieval_operator(n);
      for (double q : q_default_grid()) {
        const LabeledOperator choi = retrieve(
            rs,
            store(n, NoiseModel(NoiseKind::Depolarizing, q), {kProbePhase}));
        const BinomialCoefficients b = binomial_expansion_check(n, q);
        observe(check, std::abs(std::abs(choi.matrix(0, 3)) - b.unitary_coeff));
        observe(check, std::abs(choi.matrix(0, 0).real() -
                                b.unitary_coeff - b.dephasing_coeff));
      }
    }
    checks.push_back(check);
  }

  std::mt19937 rng(12345);

  // apply_kraus against the Choi-contraction oracle.
  {
    Check check{"apply_kraus vs apply_choi", 0.0, 1e-12};
    const SpaceLayout two_qubits{{"X", 2}, {"Y", 2}};
    for (int trial = 0; trial < 100; ++trial) {
      const KrausChannel ch = random_channel(rng, 2);
      const LabeledOperator rho = random_density(rng, two_qubits);
      const LabeledOperator via_kraus = apply_kraus(ch, rho, "X");
      const LabeledOperator via_choi =
          apply_choi(kraus_to_choi(ch), rho, "X");
      observe(check, max_abs_diff(via_kraus.matrix, via_choi.matrix));
    }
    checks.push_back(check);
  }

  // Link product against Kraus composition.
  {
    Check check{"link product vs Kraus composition", 0.0, 1e-12};
    for (int trial = 0; trial < 100; ++trial) {
      const KrausChannel a = random_channel(rng, 2);
      const KrausChannel b = random_channel(rng, 2);
      const LabeledOperator linked =
          permute(link_product(kraus_to_choi(a, "b", "a"),
                               kraus_to_choi(b, "c", "b")),
                  {"c", "a"});
      const LabeledOperator composed =
          kraus_to_choi(compose_channels(a, b), "c", "a");
      observe(check, max_abs_diff(linked.matrix, composed.matrix));
    }
    checks.push_back(check);
  }

  // Link product associativity on chained triples.
  {
    Check check{"link product associativity", 0.0, 1e-11};
    for (int trial = 0; trial < 50; ++trial) {
      const LabeledOperator a =
          kraus_to_choi(random_channel(rng, 2), "b", "a");
      const LabeledOperator b =
          kraus_to_choi(random_channel(rng, 2), "c", "b");
      const LabeledOperator c =
          kraus_to_choi(random_channel(rng, 2), "d", "c");
      const LabeledOperator left = link_product(link_product(a, b), c);
      const LabeledOperator right = link_product(a, link_product(b, c));
      observe(check, max_abs_diff(left.matrix, right.matrix));
    }
    checks.push_back(check);
  }

  // Noise-channel Choi positivity and trace preservation.
  {
    Check check{"noise Choi PSD and trace-preserving", 0.0, 1e-9};
    for (const NoiseKind kind :
         {NoiseKind::Depolarizing, NoiseKind::Dephasing})
      for (double q : q_default_grid())
        for (double phi : phi_default_grid()) {
          const KrausChannel ch = noisy_phase_gate(NoiseModel(kind, q), {phi});
          const LabeledOperator choi = kraus_to_choi(ch);
          observe(check, std::max(0.0, -min_eigenvalue(choi)));
          const LabeledOperator reduced = partial_trace(choi, {"out"});
          observe(check,
                  max_abs_diff(reduced.matrix, Matrix::Identity(2, 2)));
        }
    checks.push_back(check);
  }

  // CNOT-feedback realization against its closed form.
  {
    Check check{"cnot-feedback rounds", 0.0, 1e-9};
    for (const NoiseKind kind :
         {NoiseKind::Depolarizing, NoiseKind::Dephasing})
      for (double q : {0.0, 0.3, 0.7, 1.0}) {
        const auto rounds = vmc_run(NoiseModel(kind, q), {kProbePhase}, 3);
        for (const auto& r : rounds) {
          const double qn = std::pow(q, r.cumulative_uses);
          observe(check, std::abs(r.success_probability -
                                  std::pow(0.5, r.round_index)));
          observe(check, std::abs(r.success_channel.unitary_weight - qn));
        }
      }
    checks.push_back(check);
  }

  // Virtual-qudit realization closed forms.
  {
    Check check{"virtual qudit dephasing", 0.0, 1e-10};
    for (int n = 1; n <= 5; ++n)
      for (double q : {0.0, 0.4, 0.8, 1.0}) {
        const auto outcomes =
            vq_run(NoiseModel(NoiseKind::Dephasing, q), {kProbePhase}, n);
        const auto [p, w_fail] = vq_dephasing_closed_form(n, q);
        observe(check, std::abs(outcomes.front().probability - p));
        // Success channel: q U + (1-q) diag, independent of n.
        LabeledOperator success = outcomes.front().choi;
        success.matrix /= outcomes.front().probability;
        observe(check, std::abs(std::abs(success.matrix(0, 3)) - q));
        // Failure channel: q^n U_{-n phi} + (1 - q^n) diag.
        for (const auto& o : outcomes)
          if (o.kind == VqOutcome::Kind::Fail) {
            LabeledOperator failure = o.choi;
            failure.matrix /= o.probability;
            observe(check,
                    std::abs(std::abs(failure.matrix(0, 3)) - w_fail));
          }
      }
    checks.push_back(check);
  }
  {
    Check check{"virtual qudit depolarizing n=2", 0.0, 1e-10};
    for (double q : q_default_grid()) {
      const auto outcomes =
          vq_run(NoiseModel(NoiseKind::Depolarizing, q), {kProbePhase}, 2);
      observe(check,
              std::abs(outcomes.front().probability - (3.0 + q) / 6.0));
    }
    checks.push_back(check);
  }

  bool all_pass = true;
  out << "check                                      max deviation  tolerance  status\n";
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass();
    out << std::left << std::setw(42) << c.name << " "
        << std::setw(14) << format_number(c.max_dev) << " "
        << std::setw(10) << format_number(c.tol) << " "
        << (c.pass() ? "pass" : "FAIL") << "\n";
  }
  out << (all_pass ? "selftest: all checks passed\n"
                   : "selftest: FAILURES detected\n");
  return all_pass ? 0 : 2;
}

}  // namespace psar::harness
