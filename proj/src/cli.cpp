#include "hkq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hkq/git_stability.hpp"
#include "hkq/hk_reduction.hpp"
#include "hkq/kempf_ness.hpp"
#include "hkq/moment_maps.hpp"
#include "hkq/strata.hpp"

namespace hkq {
namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- locations

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Semantic errors point at the first occurrence of the offending token.
[[noreturn]] void fail_at(std::string_view text, const std::string& token, const std::string& message) {
  const std::size_t pos = token.empty() ? std::string_view::npos : text.find(token);
  if (pos == std::string_view::npos) throw ParseError(message);
  const auto [line, column] = line_column(text, pos);
  throw ParseError(message, line, column);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is the 1-based offset of the last character read; step back to
    // the start of a string or number token that was read whole
    std::string message = e.what();
    std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    if (message.find("unexpected string literal") != std::string::npos && offset < text.size() &&
        text[offset] == '"') {
      std::size_t i = offset;
      while (i > 0) {
        --i;
        if (text[i] == '"' && (i == 0 || text[i - 1] != '\\')) break;
      }
      offset = i;
    } else if (message.find("unexpected number literal") != std::string::npos) {
      while (offset > 0 && std::string_view("0123456789+-.eE").find(text[offset - 1]) != std::string_view::npos) {
        --offset;
      }
    }
    const auto [line, column] = line_column(text, offset);
    const auto cut = message.find("syntax error");
    throw ParseError(cut == std::string::npos ? message : message.substr(cut), line, column);
  }
}

void check_schema(std::string_view text, const json& j) {
  if (!j.is_object()) throw ParseError("expected a JSON object", 1, 1);
  if (j.contains("schema") && j["schema"] != 1) fail_at(text, "\"schema\"", "unsupported schema version");
}

Rational rational_from(std::string_view text, const json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_unsigned()) return Rational(BigInt(v.get<unsigned long long>()));
  if (v.is_number_float()) return parse_rational(v.dump());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      return parse_rational(s);
    } catch (const ParseError& e) {
      fail_at(text, "\"" + s + "\"", e.what());
    }
  }
  fail_at(text, v.dump(), "expected a number or a rational string, got " + v.dump());
}

ExactComplex complex_from(std::string_view text, const json& v) {
  if (v.is_array()) {
    if (v.size() != 2) fail_at(text, v.dump(), "complex entries are [re, im] pairs");
    return {rational_from(text, v[0]), rational_from(text, v[1])};
  }
  return {rational_from(text, v), Rational(0)};
}

std::vector<ExactComplex> coords_from(std::string_view text, const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    fail_at(text, "{", std::string("missing array \"") + key + "\"");
  }
  std::vector<ExactComplex> out;
  for (const auto& v : j[key]) out.push_back(complex_from(text, v));
  return out;
}

std::string read_source(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  std::ifstream in(arg);
  if (!in) throw PreconditionError("cannot read input file '" + arg + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ------------------------------------------------------------------ output

json integer_json(const Rational& q) {
  const BigInt num = numerator(q);
  if (denominator(q) == 1 && num >= std::numeric_limits<long long>::min() &&
      num <= std::numeric_limits<long long>::max()) {
    return num.convert_to<long long>();
  }
  return to_string(q);
}

json big_json(const BigInt& b) { return integer_json(Rational(b)); }

json set_json(const IndexSet& s) {
  json a = json::array();
  for (auto i : s) a.push_back(i);
  return a;
}

json sets_json(const std::vector<IndexSet>& sets) {
  json a = json::array();
  for (const auto& s : sets) a.push_back(set_json(s));
  return a;
}

json stabilizer_json(const StabilizerInfo& s) {
  json inv = json::array();
  for (const auto& f : s.finite_invariants) inv.push_back(big_json(f));
  return {{"subtorus_rank", s.subtorus_rank}, {"finite_invariants", inv}, {"order", s.finite() ? big_json(s.finite_order()) : json(nullptr)}};
}

json certificate_json(const std::optional<Cocharacter>& c) {
  if (!c) return nullptr;
  json a = json::array();
  for (const auto& q : c->exact_value()) a.push_back(integer_json(q));
  return a;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  double r = std::strtod(buf, nullptr);
  return r == 0 ? 0.0 : r;  // no negative zero
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json ambient_json(const AmbientPoint& p) {
  json a = json::array();
  for (auto c : p.coords) a.push_back(complex_json(c));
  return {{"coords", a}};
}

json cotangent_json(const CotangentPoint& p) {
  json x = json::array(), z = json::array();
  for (auto c : p.x) x.push_back(complex_json(c));
  for (auto c : p.z) z.push_back(complex_json(c));
  return {{"x", x}, {"z", z}};
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(round12(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json weights_json(const WeightSystem& w) {
  json ws = json::array(), theta = json::array();
  for (const auto& b : w.weights()) ws.push_back(b);
  for (const auto& t : w.theta()) theta.push_back(to_string(t));
  return {{"rank", w.rank()}, {"weights", ws}, {"theta", theta}};
}

json header(const char* command) { return {{"schema", 1}, {"command", command}}; }

// Generic key/value rendering for --format table.
void flatten_table(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  const bool leaf_array = j.is_array() && std::none_of(j.begin(), j.end(), [](const json& e) {
                            return e.is_object() || (e.is_array() && !e.empty() && e[0].is_array());
                          });
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten_table(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
  } else if (j.is_array() && !leaf_array) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_table(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

std::string render_table(const json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten_table(j, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
  return out.str();
}

// ----------------------------------------------------------------- commands

struct Flags {
  std::string mode = "exact";
  std::optional<double> tol;
  std::optional<std::size_t> bound;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string format = "json";
  std::string trace;
  bool hyperkahler = false;
  bool certify = false;
};

struct Emit {
  Emit() = default;
  Emit(json b, int c = kExitSuccess) : body(std::move(b)), code(c) {}
  json body;
  int code = kExitSuccess;
  std::string csv;  // used by --format csv when the command supports it
  std::string table;
};

ExactAmbientPoint concat(const ExactCotangentPoint& p) {
  ExactAmbientPoint out{p.x};
  out.coords.insert(out.coords.end(), p.z.begin(), p.z.end());
  return out;
}

void require_size(const WeightSystem& w, std::size_t n, const char* what) {
  if (n != w.size()) {
    throw DimensionMismatch(std::string(what) + " has " + std::to_string(n) + " coordinates, weight system has " +
                            std::to_string(w.size()));
  }
}

Emit cmd_analyze(const std::string& weights_arg, const Flags& f) {
  const WeightSystem w = parse_weights(read_source(weights_arg));
  const std::size_t bound = f.bound.value_or(kDefaultStrataBound);
  if (w.size() > bound) {
    throw EnumerationBoundExceeded(std::to_string(w.size()) + " coordinates exceed the enumeration bound " +
                                   std::to_string(bound));
  }
  const WeightSystem d = doubled_weights(w);
  json j = header("analyze");
  j["weights"] = weights_json(w);
  j["unstable_maximal_supports"] = sets_json(unstable_maximal_supports(w, bound));
  j["unstable_components"] = sets_json(unstable_components(w, bound));
  j["cotangent_unstable_supports"] = sets_json(unstable_maximal_supports(d, 2 * bound));
  j["cotangent_unstable_components"] = sets_json(unstable_components(d, 2 * bound));
  j["compact"] = quotient_compact(w);
  const SmoothnessResult smooth = quotient_smooth(w, bound);
  j["smooth"] = smooth.smooth;
  j["offending_support"] = smooth.offending_support ? set_json(*smooth.offending_support) : json(nullptr);
  json strata = json::array();
  for (const auto& s : kahler_strata(w, bound)) {
    strata.push_back({{"stabilizer", stabilizer_json(s.stabilizer)}, {"open", s.open}, {"supports", sets_json(s.supports)}});
  }
  j["kahler_strata"] = strata;
  json hk = json::array();
  for (auto c : hk_candidate_strata(w, bound, f.threads)) {
    if (f.certify) c = certify_stratum(w, std::move(c), {f.seed, 64});
    json entry = {{"support_x", set_json(c.support_x)},
                  {"support_z", set_json(c.support_z)},
                  {"stabilizer", stabilizer_json(c.stabilizer)},
                  {"status", to_string(c.status)}};
    if (c.witness) entry["witness"] = cotangent_json(*c.witness);
    hk.push_back(entry);
  }
  j["hk_candidates"] = hk;
  return {j};
}

Emit cmd_classify(const std::string& weights_arg, const std::string& point_arg, const Flags& f) {
  const WeightSystem w = parse_weights(read_source(weights_arg));
  const PointInput input = parse_point(read_source(point_arg));
  const bool cotangent = std::holds_alternative<ExactCotangentPoint>(input);
  const WeightSystem target = cotangent ? doubled_weights(w) : w;
  const ExactAmbientPoint v = cotangent ? concat(std::get<ExactCotangentPoint>(input)) : std::get<ExactAmbientPoint>(input);
  if (cotangent) require_size(w, std::get<ExactCotangentPoint>(input).x.size(), "point");
  require_size(target, v.size(), "point");

  IndexSet supp;
  StabilityVerdict verdict;
  if (f.mode == "numeric") {
    const double threshold = f.tol.value_or(kDefaultSupportThreshold);
    supp = support(to_numeric(v), threshold);
    verdict = classify_point(target, to_numeric(v), threshold);
  } else {
    supp = support(v);
    verdict = classify_point(target, v);
  }
  json j = header("classify");
  j["space"] = cotangent ? "cotangent" : "base";
  j["mode"] = f.mode;
  j["support"] = set_json(supp);
  j["status"] = to_string(verdict.status);
  j["certificate"] = certificate_json(verdict.certificate);
  j["mu_weight"] = nullptr;
  if (verdict.certificate) {
    const MuWeight mw = mu_weight(target, supp, verdict.certificate->exact_value());
    j["mu_weight"] = mw.infinite ? json("inf") : json(to_string(mw.value));
  }
  return {j};
}

FlowTrace kn_trace(const WeightSystem& w, const AmbientPoint& v, const KNOutcome& out) {
  std::vector<double> dir(w.rank(), 0.0);
  double horizon = 30.0;
  if (out.status == KNStatus::diverged && out.certificate) {
    dir = out.certificate->to_numeric();
  } else if (out.xi_star.size() > 0 && out.xi_star.norm() > 0) {
    const Eigen::VectorXd unit = out.xi_star / out.xi_star.norm();
    dir.assign(unit.data(), unit.data() + unit.size());
    horizon = 2 * out.xi_star.norm();
  } else {
    dir[0] = 1.0;
    horizon = 2.0;
  }
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(horizon * i / 120.0);
  return flow_trace(w, v, dir, grid);
}

Emit cmd_kn(const std::string& weights_arg, const std::string& point_arg, const Flags& f) {
  const WeightSystem w = parse_weights(read_source(weights_arg));
  const PointInput input = parse_point(read_source(point_arg));
  KNOptions options;
  if (f.tol) options.tolerance = *f.tol;

  json j = header("kn");
  j["hyperkahler"] = f.hyperkahler;
  KNOutcome kahler;
  WeightSystem traced = w;
  AmbientPoint traced_point;
  if (f.hyperkahler) {
    if (!std::holds_alternative<ExactCotangentPoint>(input)) {
      throw PreconditionError("--hyperkahler needs a cotangent point {\"x\": ..., \"z\": ...}");
    }
    const CotangentPoint p = to_numeric(std::get<ExactCotangentPoint>(input));
    require_size(w, p.size(), "point");
    const KNHyperkahlerOutcome out = solve_hyperkahler(w, p, options);
    kahler = out.kahler;
    traced = doubled_weights(w);
    traced_point = flatten(p);
    j["status"] = to_string(kahler.status);
    j["iterations"] = kahler.iterations;
    j["residual"] = kahler.residual;
    j["hyperkahler_residual"] = kahler.status == KNStatus::converged ? json(out.hyperkahler_residual) : json(nullptr);
    j["xi_star"] = kahler.status == KNStatus::converged ? vector_json(kahler.xi_star) : json(nullptr);
    j["representative"] = kahler.status == KNStatus::converged ? cotangent_json(out.representative) : json(nullptr);
  } else {
    const bool cotangent = std::holds_alternative<ExactCotangentPoint>(input);
    if (cotangent) traced = doubled_weights(w);
    traced_point = cotangent ? flatten(to_numeric(std::get<ExactCotangentPoint>(input)))
                             : to_numeric(std::get<ExactAmbientPoint>(input));
    require_size(traced, traced_point.size(), "point");
    kahler = solve_kahler(traced, traced_point, options);
    j["status"] = to_string(kahler.status);
    j["iterations"] = kahler.iterations;
    j["residual"] = kahler.status == KNStatus::converged ? json(kahler.residual) : json(nullptr);
    j["xi_star"] = kahler.status == KNStatus::converged ? vector_json(kahler.xi_star) : json(nullptr);
    j["representative"] = kahler.status == KNStatus::converged
                              ? (cotangent ? cotangent_json(unflatten(kahler.representative))
                                           : ambient_json(kahler.representative))
                              : json(nullptr);
  }
  j["certificate"] = certificate_json(kahler.certificate);

  Emit e{j};
  if (!f.trace.empty() || f.format == "csv") {
    e.csv = flow_trace_csv(kn_trace(traced, traced_point, kahler));
    if (!f.trace.empty()) {
      std::ofstream out(f.trace);
      if (!out) throw PreconditionError("cannot write trace file '" + f.trace + "'");
      out << e.csv;
    }
  }
  return e;
}

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> parse_pairs(std::string_view text, Eigen::Index dim) {
  const json j = parse_json(text);
  check_schema(text, j);
  if (!j.contains("pairs") || !j["pairs"].is_array()) fail_at(text, "{", "missing array \"pairs\"");
  auto vec = [&](const json& a) {
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != dim) {
      fail_at(text, a.dump(), "tangent vectors need " + std::to_string(dim) + " real entries");
    }
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = to_double(rational_from(text, a[static_cast<std::size_t>(i)]));
    return v;
  };
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> out;
  for (const auto& pair : j["pairs"]) {
    if (!pair.is_object() || !pair.contains("u") || !pair.contains("v")) {
      fail_at(text, pair.dump(), "pairs are objects {\"u\": [...], \"v\": [...]}");
    }
    out.emplace_back(vec(pair["u"]), vec(pair["v"]));
  }
  return out;
}

Emit cmd_metric(const std::string& weights_arg, const std::string& point_arg, const std::string& pairs_arg,
                const Flags& f) {
  const WeightSystem w = parse_weights(read_source(weights_arg));
  const PointInput input = parse_point(read_source(point_arg));
  CotangentPoint p;
  if (const auto* cot = std::get_if<ExactCotangentPoint>(&input)) {
    p = to_numeric(*cot);
  } else {
    p.x = to_numeric(std::get<ExactAmbientPoint>(input)).coords;
    p.z.assign(p.x.size(), Complex(0, 0));
  }
  require_size(w, p.size(), "point");
  const double tol = f.tol.value_or(1e-9);

  json j = header("metric");
  const double initial = mu_hyperkahler(w, p).norm();
  j["initial_moment_residual"] = initial;
  j["normalized"] = false;
  if (initial > 1e-9) {
    const KNHyperkahlerOutcome out = solve_hyperkahler(w, p);
    if (out.kahler.status != KNStatus::converged) {
      throw PreconditionError("the point is unstable for the doubled weights; its orbit misses the moment-zero set");
    }
    p = out.representative;
    j["normalized"] = true;
  }
  const ReducedFrame frame = horizontal_frame(w, p);
  const double qdev = quaternion_check(frame);
  j["base_point"] = cotangent_json(p);
  j["moment_residual"] = mu_hyperkahler(w, p).norm();
  j["ambient_dimension"] = frame.ambient_dim();
  j["gauge_rank"] = frame.gauge_basis().cols();
  j["dimension"] = frame.dimension();
  j["quaternion_deviation"] = qdev;
  j["tolerance"] = tol;
  j["metric_gram"] = matrix_json(frame.metric_gram());
  j["omega_I_gram"] = matrix_json(frame.form_gram(Quaternion::I));
  j["omega_J_gram"] = matrix_json(frame.form_gram(Quaternion::J));
  j["omega_K_gram"] = matrix_json(frame.form_gram(Quaternion::K));

  bool ok = qdev <= tol;
  const bool on_zero_section = std::all_of(p.z.begin(), p.z.end(), [](Complex c) { return c == Complex(0, 0); });
  j["zero_section"] = nullptr;
  if (on_zero_section) {
    const ZeroSectionReport zs = zero_section_check(w, AmbientPoint{p.x});
    j["zero_section"] = {{"metric_discrepancy", zs.metric_discrepancy},
                         {"form_discrepancy", zs.form_discrepancy},
                         {"horizontality_residual", zs.horizontality_residual},
                         {"kahler_quotient_dimension", zs.kahler_quotient_dim}};
    ok = ok && zs.metric_discrepancy <= std::max(tol, 1e-8) && zs.form_discrepancy <= std::max(tol, 1e-8);
  }

  json pairs = json::array();
  if (!pairs_arg.empty()) {
    for (const auto& [u, v] : parse_pairs(read_source(pairs_arg), frame.ambient_dim())) {
      const Eigen::VectorXd pu = frame.project(u), pv = frame.project(v);
      pairs.push_back({{"g", round12(reduced_metric(frame, pu, pv))},
                       {"omega_I", round12(reduced_form(frame, Quaternion::I, pu, pv))},
                       {"omega_J", round12(reduced_form(frame, Quaternion::J, pu, pv))},
                       {"omega_K", round12(reduced_form(frame, Quaternion::K, pu, pv))},
                       {"u_vertical_part", round12(frame.horizontal_residual(u))},
                       {"v_vertical_part", round12(frame.horizontal_residual(v))}});
    }
  }
  j["pairs"] = pairs;
  j["passed"] = ok;
  return {j, ok ? kExitSuccess : kExitAssertion};
}

long long parse_count(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("expected an integer, got '" + s + "'");
}

Emit cmd_hirzebruch(const std::string& n_arg, const std::string& c0_arg, const std::string& c1_arg, const Flags& f) {
  const long long n = parse_count(n_arg);
  const Rational c0 = parse_rational(c0_arg), c1 = parse_rational(c1_arg);
  const HirzebruchReport r = hirzebruch_suite(n, c0, c1, f.seed);

  json j = header("hirzebruch");
  j["n"] = n;
  j["c0"] = to_string(c0);
  j["c1"] = to_string(c1);
  j["seed"] = f.seed;
  j["passed"] = r.passed();
  j["residual_order"] = big_json(r.residual_order);
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  json strata = json::array();
  for (const auto& c : r.certified_strata) {
    strata.push_back({{"support_x", set_json(c.support_x)},
                      {"support_z", set_json(c.support_z)},
                      {"stabilizer", stabilizer_json(c.stabilizer)},
                      {"status", to_string(c.status)},
                      {"witness", c.witness ? cotangent_json(*c.witness) : json(nullptr)},
                      {"log", c.log}});
  }
  j["strata"] = strata;

  Emit e{j, r.passed() ? kExitSuccess : kExitAssertion};
  std::ostringstream table, csv;
  std::size_t width = 5;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  table << "Hirzebruch suite n=" << n << " c0=" << to_string(c0) << " c1=" << to_string(c1) << "\n";
  table << std::left << std::setw(static_cast<int>(width) + 2) << "check" << "result  detail\n";
  csv << "check,passed,detail\n";
  for (const auto& c : r.checks) {
    table << std::left << std::setw(static_cast<int>(width) + 2) << c.name << (c.passed ? "PASS    " : "FAIL    ")
          << c.detail << "\n";
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), '"', '\'');
    csv << c.name << "," << (c.passed ? "true" : "false") << ",\"" << detail << "\"\n";
  }
  table << (r.passed() ? "all checks passed\n" : "some checks FAILED\n");
  e.table = table.str();
  e.csv = csv.str();
  return e;
}

}  // namespace

WeightSystem parse_weights(std::string_view text) {
  const json j = parse_json(text);
  check_schema(text, j);
  if (!j.contains("weights") || !j["weights"].is_array()) fail_at(text, "{", "missing array \"weights\"");
  std::vector<Weight> weights;
  for (const auto& b : j["weights"]) {
    if (!b.is_array()) fail_at(text, b.dump(), "each weight is an array of integers");
    Weight wt;
    for (const auto& e : b) {
      if (!e.is_number_integer()) fail_at(text, e.dump(), "weight entries must be integers, got " + e.dump());
      wt.push_back(e.get<std::int64_t>());
    }
    weights.push_back(std::move(wt));
  }
  std::size_t rank = 0;
  if (j.contains("rank")) {
    if (!j["rank"].is_number_integer() || j["rank"].get<long long>() < 1) {
      fail_at(text, "\"rank\"", "rank must be a positive integer");
    }
    rank = j["rank"].get<std::size_t>();
  } else if (!weights.empty()) {
    rank = weights.front().size();
  }
  std::vector<Rational> theta;
  if (!j.contains("theta") || !j["theta"].is_array()) fail_at(text, "{", "missing array \"theta\"");
  for (const auto& t : j["theta"]) theta.push_back(rational_from(text, t));
  try {
    return WeightSystem(rank, std::move(weights), std::move(theta));
  } catch (const DimensionMismatch& e) {
    fail_at(text, "\"weights\"", e.what());
  } catch (const PreconditionError& e) {
    fail_at(text, "\"weights\"", e.what());
  }
}

PointInput parse_point(std::string_view text) {
  const json j = parse_json(text);
  check_schema(text, j);
  if (j.contains("coords")) return ExactAmbientPoint{coords_from(text, j, "coords")};
  ExactCotangentPoint p{coords_from(text, j, "x"), coords_from(text, j, "z")};
  if (p.x.size() != p.z.size()) fail_at(text, "\"z\"", "x and z must have the same length");
  return p;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Torus quotients of T*C^n: stability, Kempf-Ness, hyperkahler reduction"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--mode", f.mode, "exact or numeric arithmetic")->check(CLI::IsMember({"exact", "numeric"}));
  app.add_option("--tol", f.tol, "numeric tolerance (support threshold, solver or check tolerance)");
  app.add_option("--bound", f.bound, "maximal number of coordinates for enumerations");
  app.add_option("--seed", f.seed, "seed for every randomized step");
  app.add_option("--threads", f.threads, "worker threads for enumerations")->check(CLI::Range(1u, 256u));
  app.add_option("--format", f.format, "json, table or csv")->check(CLI::IsMember({"json", "table", "csv"}));
  app.add_option("--trace", f.trace, "write the Kempf-Ness flow as CSV to this file");

  std::string weights, point, pairs, n_arg, c0_arg, c1_arg;
  auto* analyze = app.add_subcommand("analyze", "unstable loci, smoothness, compactness and strata");
  analyze->add_option("weights", weights, "weight system JSON file or inline JSON")->required();
  analyze->add_flag("--certify", f.certify, "search witnesses for hyperkahler stratum candidates");
  auto* classify = app.add_subcommand("classify", "stability of a point with an exact certificate");
  classify->add_option("weights", weights)->required();
  classify->add_option("point", point)->required();
  auto* kn = app.add_subcommand("kn", "Kempf-Ness normalization");
  kn->add_option("weights", weights)->required();
  kn->add_option("point", point)->required();
  kn->add_flag("--hyperkahler", f.hyperkahler, "solve on the hyperkahler moment level");
  auto* metric = app.add_subcommand("metric", "reduced metric and Kahler forms at a point");
  metric->add_option("weights", weights)->required();
  metric->add_option("point", point)->required();
  metric->add_option("pairs", pairs, "tangent pairs JSON {\"pairs\": [{\"u\": [...], \"v\": [...]}]}");
  auto* hirz = app.add_subcommand("hirzebruch", "Hirzebruch surface suite");
  hirz->add_option("n", n_arg)->required();
  hirz->add_option("c0", c0_arg)->required();
  hirz->add_option("c1", c1_arg)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }

  try {
    Emit e;
    if (*analyze) {
      e = cmd_analyze(weights, f);
    } else if (*classify) {
      e = cmd_classify(weights, point, f);
    } else if (*kn) {
      e = cmd_kn(weights, point, f);
    } else if (*metric) {
      e = cmd_metric(weights, point, pairs, f);
    } else {
      e = cmd_hirzebruch(n_arg, c0_arg, c1_arg, f);
    }
    if (f.format == "json") {
      out << e.body.dump(2) << "\n";
    } else if (f.format == "table") {
      out << (e.table.empty() ? render_table(e.body) : e.table);
    } else {
      if (e.csv.empty()) throw PreconditionError("--format csv is available for kn and hirzebruch only");
      out << e.csv;
    }
    if (e.code == kExitAssertion) err << "error: assertion failure\n";
    return e.code;
  } catch (const ParseError& e) {
    err << "error: ";
    if (e.line() > 0) err << "line " << e.line() << ", column " << e.column() << ": ";
    err << e.what() << "\n";
    return kExitPrecondition;
  } catch (const UndecidedError& e) {
    err << "undecided: " << e.what() << "\n";
    return kExitUndecided;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
}

}  // namespace hkq
