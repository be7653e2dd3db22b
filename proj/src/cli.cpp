#include "fql/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "fql/analysis.hpp"
#include "fql/carlitz.hpp"
#include "fql/error.hpp"
#include "fql/io.hpp"
#include "fql/operators.hpp"
#include "fql/solvers.hpp"

namespace fql::cli {

std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Series parse_literal(const FieldPtr& field, const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ParseError("empty literal");
  auto fail = [&](const std::string& why) { throw ParseError("literal '" + text + "': " + why); };

  Series acc = Series::zero(field);
  std::size_t pos = 0;
  bool first = true;
  while (pos < s.size()) {
    std::int64_t sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first) {
      fail("expected '+' or '-' between terms");
    }
    first = false;
    std::int64_t coeff = 1;
    bool have_digits = false;
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::size_t end = pos;
      while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
      if (end - pos > 18) fail("coefficient too large");
      coeff = std::stoll(s.substr(pos, end - pos));
      pos = end;
      have_digits = true;
    }
    Rational exponent = 0;
    if (pos < s.size() && s[pos] == '*') {
      if (!have_digits) fail("'*' needs a coefficient before it");
      ++pos;
      if (pos >= s.size() || s[pos] != 'x') fail("expected 'x' after '*'");
    } else if (have_digits && pos < s.size() && s[pos] == 'x') {
      fail("write a coefficient times x as c*x");
    }
    if (pos < s.size() && s[pos] == 'x') {
      ++pos;
      exponent = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        std::string e;
        if (pos < s.size() && s[pos] == '(') {
          const std::size_t close = s.find(')', pos);
          if (close == std::string::npos) fail("unbalanced parenthesis");
          e = s.substr(pos + 1, close - pos - 1);
          pos = close + 1;
        } else {
          std::size_t end = pos;
          while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
          e = s.substr(pos, end - pos);
          pos = end;
        }
        try {
          exponent = Rational::parse(e);
        } catch (const std::exception&) {
          fail("bad exponent '" + e + "'");
        }
        if (exponent.is_infinite()) fail("infinite exponent");
      }
    } else if (!have_digits) {
      fail("expected a number or 'x'");
    }
    acc += Series::monomial(field, field->from_int(sign * coeff), exponent);
  }
  return acc;
}

namespace {

std::string pretty(const Rational& r) {
  if (r.is_infinite()) return "inf";
  if (r.is_integer()) return std::to_string(r.num());
  return r.str();
}

struct Output {
  std::string name;
  std::string text;
};

/// Everything one invocation produces.
struct Job {
  std::vector<std::string> args;
  FieldPtr field;
  std::vector<std::pair<std::string, std::string>> record;  // manifest entries
  std::vector<std::string> human;
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<Output> outputs;
  int exit = ok;

  void both(const std::string& key, const std::string& value, const std::string& line) {
    kv.emplace_back(key, value);
    human.push_back(line);
  }
};

struct GlobalOpts {
  unsigned p = 2, v = 1, f = 1;
  std::string out_path, manifest_path;
  bool kv = false;
  CLI::Option* p_opt = nullptr;
  CLI::Option* v_opt = nullptr;
  CLI::Option* f_opt = nullptr;
};

bool explicit_field(const GlobalOpts& g) { return g.p_opt->count() || g.v_opt->count() || g.f_opt->count(); }

std::string read_input_file(const std::string& path) {
  try {
    return read_file(path);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError("cannot read '" + path + "': " + e.what());
  }
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string first_header_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return line;
  }
  return {};
}

/// Field of the run: explicit --p/--v/--f, else the header of the first file input, else F_2.
FieldPtr resolve_field(const GlobalOpts& g, const std::vector<std::string>& inputs) {
  if (explicit_field(g)) return FieldDesc::make(g.p, g.v, g.f);
  for (const auto& in : inputs) {
    if (in.size() > 1 && in[0] == '@') {
      const std::string path = in.substr(1);
      const std::string text = read_input_file(path);
      return with_path(path, [&] { return parse_field_header(first_header_line(text), 1); });
    }
  }
  return FieldDesc::make(g.p, g.v, g.f);
}

/// Input loader recording each input in the manifest.
class Inputs {
 public:
  explicit Inputs(Job& job) : job_(job) {}

  Document document(const std::string& name, const std::string& arg) {
    if (arg.size() < 2 || arg[0] != '@')
      throw ParseError("--" + name + " expects a file given as @path, got '" + arg + "'");
    const std::string path = arg.substr(1);
    const std::string text = read_input_file(path);
    job_.record.emplace_back("input." + name, arg + " digest=" + digest(text));
    Document doc = with_path(path, [&] { return parse_document(text); });
    if (!doc.field->same_as(*job_.field))
      throw DomainError("input " + path + " is over " + doc.field->header() + ", but the run uses " +
                        job_.field->header());
    return doc;
  }

  Series series(const std::string& name, const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
      Document d = document(name, arg);
      if (!std::holds_alternative<Series>(d.value)) throw ParseError("--" + name + " must be a series file");
      return std::get<Series>(d.value);
    }
    job_.record.emplace_back("input." + name, arg);
    return parse_literal(job_.field, arg);
  }

  SeriesMatrix matrix(const std::string& name, const std::string& arg) {
    Document d = document(name, arg);
    if (!std::holds_alternative<SeriesMatrix>(d.value)) throw ParseError("--" + name + " must be a matrix file");
    return std::get<SeriesMatrix>(d.value);
  }

 private:
  Job& job_;
};

Rational parse_rational_opt(const std::string& name, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const std::exception&) {
    throw ParseError("--" + name + " expects a rational number or 'inf', got '" + text + "'");
  }
}

std::string law_summary(const ValuationLaw& law) {
  if (!law.known()) return "none";
  return law.kind_name() + " start=" + std::to_string(law.start) + " offset=" + pretty(law.offset) +
         " rate=" + pretty(law.rate);
}

template <class C>
void summarize_expansion(Job& job, const std::string& prefix, const CarlitzExpansion<C>& c) {
  job.both(prefix + ".n", std::to_string(static_cast<std::int64_t>(c.size()) - 1),
           prefix + ": coefficients c_0..c_" + std::to_string(static_cast<std::int64_t>(c.size()) - 1));
  job.both(prefix + ".law", law_summary(c.law), prefix + ": valuation law " + law_summary(c.law));
}

std::vector<FieldElem> parse_codes(const std::string& text, const FieldDesc& field) {
  std::vector<FieldElem> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || used == 0) throw ParseError("branch script entries are integers, got '" + item + "'");
    if (v >= field.order()) throw ParseError("branch script entry " + item + " is not a field element code");
    out.push_back(FieldElem{static_cast<std::uint32_t>(v)});
  }
  return out;
}

std::string codes_string(const std::vector<FieldElem>& log) {
  std::string out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(log[i].code);
  }
  return out;
}

/// Random t in O outside F_q[x]: a sparse element with val(t) >= 1 known to precision prec.
std::vector<Series> random_points(const FieldPtr& field, int count, std::uint64_t seed, const Rational& prec) {
  std::mt19937_64 rng(seed);
  const std::int64_t top = prec.is_finite() ? std::max<std::int64_t>(2, prec.floor()) : 64;
  const Rational cutoff = prec.is_finite() ? prec : Rational(top);
  std::vector<Series> out;
  for (int i = 0; i < count; ++i) {
    std::vector<Series::Term> terms;
    terms.push_back({1, FieldElem{static_cast<std::uint32_t>(1 + rng() % (field->order() - 1))}});
    for (int k = 0; k < 6; ++k)
      terms.push_back({1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(top - 1)),
                       FieldElem{static_cast<std::uint32_t>(rng() % field->order())}});
    out.push_back(Series::from_terms(field, 1, std::move(terms), cutoff));
  }
  return out;
}

template <class C>
bool all_exact(const CarlitzExpansion<C>& c) {
  for (const auto& x : c.coeffs)
    if (coeff_precision(x).is_finite()) return false;
  return true;
}

void report_residuals(Job& job, const ResidualReport& rep) {
  const std::string verdict = rep.pass ? "PASS" : "FAIL";
  job.both("result", verdict, "residual check: " + verdict);
  job.both("threshold", pretty(rep.threshold), "required residual valuation >= " + pretty(rep.threshold));
  if (rep.first_failure)
    job.both("first_failure", std::to_string(*rep.first_failure),
             "first failing coefficient index: " + std::to_string(*rep.first_failure));
  for (const auto& e : rep.coefficientwise)
    job.both("coeff." + std::to_string(e.index), pretty(e.valuation),
             "  coefficient residual at index " + std::to_string(e.index) + ": val " + pretty(e.valuation) +
                 (e.pass ? "" : "  FAIL"));
  for (const auto& e : rep.pointwise)
    job.both("point." + std::to_string(e.index), pretty(e.valuation),
             "  point " + std::to_string(e.index) + ": residual val " + pretty(e.valuation) + (e.pass ? "" : "  FAIL"));
  if (!rep.pass) job.exit = domain_failure;
}

struct Opts {
  // carlitz
  std::int64_t j = 1;
  int i = 1;
  std::string t, prec_text, method = "recursion";
  bool e_poly = false;
  // solve
  std::string lambda, c0, c1 = "0", b0, b1, B0, nil, X, policy = "principal", script;
  std::vector<std::string> pi, w, b_list, points;
  std::string g_file, c_file, eq, B;
  int n = -1, K = 6, ng = 16, generic_from = 0, random_count = 0;
  std::int64_t a = 0, b = 0;
  std::uint64_t seed = 1;
  bool no_tail = false;
  std::string manifest_in;
};

std::vector<std::string> all_inputs(const Opts& o) {
  std::vector<std::string> v{o.t, o.lambda, o.c0, o.c1, o.b0, o.b1, o.B0, o.nil, o.X, o.g_file, o.c_file, o.B};
  for (const auto* list : {&o.pi, &o.w, &o.b_list, &o.points}) v.insert(v.end(), list->begin(), list->end());
  return v;
}

Rational opt_prec(const Opts& o, const Rational& dflt) {
  return o.prec_text.empty() ? dflt : parse_rational_opt("prec", o.prec_text);
}

std::vector<Series> load_points(Inputs& in, const Opts& o, const FieldPtr& field, const Rational& prec) {
  std::vector<Series> pts;
  for (std::size_t k = 0; k < o.points.size(); ++k) pts.push_back(in.series("t" + std::to_string(k), o.points[k]));
  if (o.random_count > 0) {
    for (auto& t : random_points(field, o.random_count, o.seed, prec)) pts.push_back(std::move(t));
  }
  return pts;
}

void cmd_bracket(Job& job, Inputs&, const Opts& o) {
  const Rational cap = opt_prec(o, Rational::infinity());
  const Series s = bracket(job.field, o.j, cap);
  job.both("value", s.to_string(), "[" + std::to_string(o.j) + "] = " + s.to_string());
  job.outputs.push_back({"", to_text(s)});
}

void cmd_factorial(Job& job, Inputs&, const Opts& o) {
  if (o.i < 0) throw std::invalid_argument("factorial index must be nonnegative");
  const Factorials fac = factorials(job.field, o.i);
  const std::string idx = std::to_string(o.i);
  job.both("D", fac.D.to_string(), "D_" + idx + " = " + fac.D.to_string());
  job.both("L", fac.L.to_string(), "L_" + idx + " = " + fac.L.to_string());
  job.outputs.push_back({"D", to_text(fac.D)});
  job.outputs.push_back({"L", to_text(fac.L)});
}

void cmd_feval(Job& job, Inputs& in, const Opts& o) {
  if (o.t.empty()) throw std::invalid_argument("feval needs --t");
  const Series t = in.series("t", o.t);
  const Rational prec = opt_prec(o, Rational::infinity());
  Series value = Series::zero(job.field);
  std::string label;
  if (o.e_poly) {
    const EMethod m = o.method == "product" ? EMethod::product : EMethod::recursion;
    if (o.method != "product" && o.method != "recursion")
      throw std::invalid_argument("--method is 'recursion' or 'product'");
    value = e_eval(o.i, t, m, prec);
    label = "e_";
  } else {
    value = f_eval(o.i, t, prec);
    label = "f_";
  }
  if (!o.prec_text.empty()) job.record.emplace_back("prec", pretty(prec));
  job.both("value", value.to_string(), label + std::to_string(o.i) + "(t) = " + value.to_string());
  job.both("valuation", pretty(value.valuation()), "valuation " + pretty(value.valuation()));
  job.outputs.push_back({"", to_text(value)});
}

void cmd_model(Job& job, Inputs& in, const Opts& o) {
  if (o.lambda.empty()) throw std::invalid_argument("solve model needs --lambda");
  const int N = o.n < 0 ? 8 : o.n;
  job.record.emplace_back("n", std::to_string(N));
  if (!o.lambda.empty() && o.lambda[0] == '@') {
    Document d = in.document("lambda", o.lambda);
    if (auto* L = std::get_if<SeriesMatrix>(&d.value)) {
      const SeriesMatrix C0 =
          o.c0.empty() ? SeriesMatrix::identity(job.field, L->rows()) : in.matrix("c0", o.c0);
      const CarlitzMatrixCoeffs c = model_matrix(*L, C0, N);
      summarize_expansion(job, "solution", c);
      job.outputs.push_back({"", to_text(c)});
      return;
    }
    if (!std::holds_alternative<Series>(d.value)) throw ParseError("--lambda must be a series or matrix file");
    const Series c0 = in.series("c0", o.c0.empty() ? "1" : o.c0);
    const CarlitzCoeffs c = model_scalar(std::get<Series>(d.value), c0, N);
    summarize_expansion(job, "solution", c);
    job.outputs.push_back({"", to_text(c)});
    return;
  }
  const Series lambda = in.series("lambda", o.lambda);
  const Series c0 = in.series("c0", o.c0.empty() ? "1" : o.c0);
  const CarlitzCoeffs c = model_scalar(lambda, c0, N);
  summarize_expansion(job, "solution", c);
  job.outputs.push_back({"", to_text(c)});
}

void cmd_system(Job& job, Inputs& in, const Opts& o) {
  if (o.pi.empty()) throw std::invalid_argument("solve system needs --pi for pi_0, pi_1, ...");
  std::vector<SeriesMatrix> pi;
  for (std::size_t k = 0; k < o.pi.size(); ++k) pi.push_back(in.matrix("pi" + std::to_string(k), o.pi[k]));
  const Rational prec = opt_prec(o, Rational(64));
  job.record.emplace_back("K", std::to_string(o.K));
  job.record.emplace_back("ng", std::to_string(o.ng));
  job.record.emplace_back("prec", pretty(prec));
  const WSolution sol = regular_system_W(std::move(pi), o.K, o.ng, prec);
  for (std::size_t k = 0; k < sol.w.size(); ++k) {
    job.both("w" + std::to_string(k) + ".valuation", pretty(sol.w[k].valuation()),
             "w_" + std::to_string(k) + ": valuation " + pretty(sol.w[k].valuation()));
    job.outputs.push_back({"w" + std::to_string(k), to_text(sol.w[k])});
  }
  summarize_expansion(job, "g", sol.g);
  job.outputs.push_back({"g", to_text(sol.g)});
}

void cmd_euler2(Job& job, Inputs& in, const Opts& o) {
  if (o.b0.empty() || o.b1.empty()) throw std::invalid_argument("solve euler2 needs --b0 and --b1");
  const Series b0 = in.series("b0", o.b0);
  const Series b1 = in.series("b1", o.b1);
  const int N = o.n < 0 ? 8 : o.n;
  const Rational prec = opt_prec(o, Rational(64));
  job.record.emplace_back("n", std::to_string(N));
  job.record.emplace_back("prec", pretty(prec));
  const EulerM2 r = euler_m2(b0, b1, N, prec);
  job.both("lambda1", r.lambda1.to_string(), "lambda_1 = " + r.lambda1.to_string());
  job.both("lambda2", r.lambda2.to_string(), "lambda_2 = " + r.lambda2.to_string());
  job.both("repeated", r.repeated ? "yes" : "no", r.repeated ? "repeated root" : "distinct roots");
  summarize_expansion(job, "psi1", r.psi1);
  summarize_expansion(job, "psi2", r.psi2);
  job.outputs.push_back({"psi1", to_text(r.psi1)});
  job.outputs.push_back({"psi2", to_text(r.psi2)});
}

void cmd_euler_general(Job& job, Inputs& in, const Opts& o) {
  if (o.B0.empty() || o.nil.empty() || o.X.empty())
    throw std::invalid_argument("solve euler-general needs --B0, --nil and --X");
  const SeriesMatrix B0 = in.matrix("B0", o.B0);
  const SeriesMatrix Nn = in.matrix("nil", o.nil);
  const SeriesMatrix X = in.matrix("X", o.X);
  const SeriesMatrix c0 = o.c0.empty() ? SeriesMatrix::identity(job.field, B0.rows()) : in.matrix("c0", o.c0);
  const int N = o.n < 0 ? 8 : o.n;
  job.record.emplace_back("n", std::to_string(N));
  const EulerGeneral r = euler_general(B0, Nn, X, c0, N);
  summarize_expansion(job, "psi", r.psi);
  summarize_expansion(job, "phi", r.phi);
  job.outputs.push_back({"B", to_text(r.B)});
  job.outputs.push_back({"psi", to_text(r.psi)});
  job.outputs.push_back({"phi", to_text(r.phi)});
}

void cmd_hypergeom(Job& job, Inputs& in, const Opts& o) {
  HypergeomOptions opt;
  opt.policy = parse_policy(o.policy);
  opt.seed = o.seed;
  opt.generic_from = o.generic_from;
  opt.script = parse_codes(o.script, *job.field);
  opt.prec = opt_prec(o, Rational(64));
  const int N = o.n < 0 ? 12 : o.n;
  const Series c0 = in.series("c0", o.c0.empty() ? "1" : o.c0);
  const Series c1 = in.series("c1", o.c1);
  job.record.emplace_back("a", std::to_string(o.a));
  job.record.emplace_back("b", std::to_string(o.b));
  job.record.emplace_back("n", std::to_string(N));
  job.record.emplace_back("policy", policy_name(opt.policy));
  job.record.emplace_back("seed", std::to_string(opt.seed));
  job.record.emplace_back("generic_from", std::to_string(opt.generic_from));
  job.record.emplace_back("prec", pretty(opt.prec));
  const HypergeomRun run = hypergeom_coeffs(o.a, o.b, c0, c1, N, opt);
  job.record.emplace_back("branch_log", codes_string(run.branch_log));
  job.both("branch_log", codes_string(run.branch_log), "branch log (theta codes): " + codes_string(run.branch_log));
  job.both("working_prec", pretty(run.working_prec), "working precision " + pretty(run.working_prec));
  summarize_expansion(job, "solution", run.coeffs);
  job.outputs.push_back({"", to_text(run.coeffs)});
}

void cmd_eval(Job& job, Inputs& in, const Opts& o) {
  if (o.c_file.empty()) throw std::invalid_argument("eval needs --c @file");
  if (o.points.empty()) throw std::invalid_argument("eval needs at least one --t");
  const Document d = in.document("c", o.c_file);
  const Rational prec = opt_prec(o, Rational(64));
  job.record.emplace_back("prec", pretty(prec));
  for (std::size_t k = 0; k < o.points.size(); ++k) {
    const Series t = in.series("t" + std::to_string(k), o.points[k]);
    const std::string name = o.points.size() == 1 ? "" : "t" + std::to_string(k);
    const std::string label = "u(t" + std::to_string(k) + ")";
    if (const auto* c = std::get_if<CarlitzCoeffs>(&d.value)) {
      const Series v = carlitz_eval(*c, t, prec, !o.no_tail);
      job.both("value." + std::to_string(k), v.to_string(), label + " = " + v.to_string());
      job.outputs.push_back({name, to_text(v)});
    } else if (const auto* cm = std::get_if<CarlitzMatrixCoeffs>(&d.value)) {
      const SeriesMatrix v = carlitz_eval(*cm, t, prec, !o.no_tail);
      job.both("valuation." + std::to_string(k), pretty(v.valuation()),
               label + ": matrix with valuation " + pretty(v.valuation()));
      job.outputs.push_back({name, to_text(v)});
    } else {
      throw ParseError("--c must hold a Carlitz expansion");
    }
  }
}

template <class C>
void classify_into(Job& job, const CarlitzExpansion<C>& c) {
  const RegularityReport r = classify(c);
  job.both("class", regularity_name(r.cls), std::string("class: ") + regularity_name(r.cls));
  job.both("mode", mode_name(r.mode), std::string("evidence: ") + mode_name(r.mode));
  if (r.gamma) job.both("gamma", pretty(*r.gamma), "gamma = " + pretty(*r.gamma));
  if (r.ball_exponent)
    job.both("ball_exponent", std::to_string(*r.ball_exponent),
             "analytic on every ball of radius q^-" + std::to_string(*r.ball_exponent));
  if (r.rho_val && r.i0)
    job.both("witness", "rho_val=" + pretty(*r.rho_val) + " i0=" + std::to_string(*r.i0),
             "witness: val(c_n) <= " + pretty(*r.rho_val) + " for n >= " + std::to_string(*r.i0));
  job.both("note", r.note, r.note);
  for (const auto& e : r.evidence)
    job.both("val." + std::to_string(e.n), e.zero ? "zero<" + pretty(e.valuation) : pretty(e.valuation),
             "  val(c_" + std::to_string(e.n) + ") = " +
                 (e.zero ? "zero to precision " + pretty(e.valuation) : pretty(e.valuation)));
}

void cmd_classify(Job& job, Inputs& in, const Opts& o) {
  if (o.c_file.empty()) throw std::invalid_argument("classify needs --c @file");
  const Document d = in.document("c", o.c_file);
  if (const auto* c = std::get_if<CarlitzCoeffs>(&d.value)) {
    classify_into(job, *c);
  } else if (const auto* cm = std::get_if<CarlitzMatrixCoeffs>(&d.value)) {
    classify_into(job, *cm);
  } else {
    throw ParseError("--c must hold a Carlitz expansion");
  }
}

void cmd_verify(Job& job, Inputs& in, const Opts& o) {
  if (o.eq.empty()) throw std::invalid_argument("verify needs --eq");
  job.record.emplace_back("eq", o.eq);
  if (o.eq == "system") {
    if (o.pi.empty() || o.w.empty() || o.g_file.empty())
      throw std::invalid_argument("verify --eq system needs --pi, --w and --g");
    WSolution sol;
    for (std::size_t k = 0; k < o.pi.size(); ++k) sol.pi.push_back(in.matrix("pi" + std::to_string(k), o.pi[k]));
    for (std::size_t k = 0; k < o.w.size(); ++k) sol.w.push_back(in.matrix("w" + std::to_string(k), o.w[k]));
    const Document g = in.document("g", o.g_file);
    if (!std::holds_alternative<CarlitzMatrixCoeffs>(g.value)) throw ParseError("--g must be a matrix expansion");
    sol.g = std::get<CarlitzMatrixCoeffs>(g.value);
    if (o.prec_text.empty()) throw std::invalid_argument("verify --eq system needs --prec");
    const Rational prec = opt_prec(o, Rational::infinity());
    job.record.emplace_back("prec", pretty(prec));
    report_residuals(job, residual_check(sol, load_points(in, o, job.field, prec), prec));
    return;
  }
  if (o.c_file.empty()) throw std::invalid_argument("verify needs --c @file");
  const Document d = in.document("c", o.c_file);

  auto target = [&](bool exact) {
    if (o.prec_text.empty() && !exact)
      throw std::invalid_argument("coefficients are truncated: pass --prec with the target residual precision");
    const Rational prec = opt_prec(o, Rational::infinity());
    job.record.emplace_back("prec", pretty(prec));
    return prec;
  };

  if (o.eq == "model" || o.eq == "euler" || o.eq == "hypergeom") {
    const auto* c = std::get_if<CarlitzCoeffs>(&d.value);
    if (!c) throw ParseError("--c must hold a scalar Carlitz expansion for --eq " + o.eq);
    ScalarEquation eq = ModelEq{Series::zero(job.field)};
    if (o.eq == "model") {
      if (o.lambda.empty()) throw std::invalid_argument("verify --eq model needs --lambda");
      eq = ModelEq{in.series("lambda", o.lambda)};
    } else if (o.eq == "euler") {
      if (o.b_list.empty()) throw std::invalid_argument("verify --eq euler needs --b for b_0, ..., b_(m-1)");
      EulerEq e;
      for (std::size_t k = 0; k < o.b_list.size(); ++k) e.b.push_back(in.series("b" + std::to_string(k), o.b_list[k]));
      eq = e;
    } else {
      if (o.b_list.size() != 1) throw std::invalid_argument("verify --eq hypergeom needs --a and one --b");
      std::int64_t b = 0;
      try {
        b = std::stoll(o.b_list[0]);
      } catch (const std::exception&) {
        throw ParseError("--b must be an integer for --eq hypergeom");
      }
      eq = HypergeomEq{o.a, b};
    }
    const Rational prec = target(all_exact(*c));
    report_residuals(job, residual_check(eq, *c, load_points(in, o, job.field, prec), prec));
    return;
  }
  if (o.eq == "matrix-model" || o.eq == "first-order") {
    const auto* c = std::get_if<CarlitzMatrixCoeffs>(&d.value);
    if (!c) throw ParseError("--c must hold a matrix Carlitz expansion for --eq " + o.eq);
    MatrixEquation eq = o.eq == "matrix-model" ? MatrixEquation{ModelMatrixEq{in.matrix("lambda", o.lambda)}}
                                               : MatrixEquation{FirstOrderMatrixEq{in.matrix("B", o.B)}};
    const Rational prec = target(all_exact(*c));
    report_residuals(job, residual_check(eq, *c, load_points(in, o, job.field, prec), prec));
    return;
  }
  throw std::invalid_argument("unknown --eq '" + o.eq +
                              "' (model, euler, hypergeom, matrix-model, first-order, system)");
}

std::string render_manifest(const Job& job, const std::string& output_digest) {
  std::ostringstream os;
  os << "# fql run manifest\n";
  for (std::size_t k = 0; k < job.args.size(); ++k) os << "arg." << k << ": " << job.args[k] << "\n";
  if (job.field) os << "field: " << job.field->header().substr(std::string("field ").size()) << "\n";
  for (const auto& [k, v] : job.record) os << k << ": " << v << "\n";
  os << "exit: " << job.exit << "\n";
  os << "output.digest: " << output_digest << "\n";
  return os.str();
}

std::string combined_output(const Job& job) {
  std::string all;
  for (const auto& o : job.outputs) {
    if (!o.name.empty()) all += "# " + o.name + "\n";
    all += o.text;
  }
  return all;
}

struct Result {
  int code = ok;
  std::string manifest;
};

Result execute(const std::vector<std::string>& args, bool dry, std::ostream& out, std::ostream& err);

int replay(const std::string& path, std::ostream& out, std::ostream& err) {
  const std::string text = read_input_file(path);
  std::map<std::int64_t, std::string> argmap;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("arg.", 0) != 0) continue;
    const auto colon = line.find(": ");
    if (colon == std::string::npos) throw ParseError(path + ": malformed argument line '" + line + "'");
    argmap[std::stoll(line.substr(4, colon - 4))] = line.substr(colon + 2);
  }
  if (argmap.empty()) throw ParseError(path + ": manifest records no arguments");
  std::vector<std::string> args;
  for (auto& [k, v] : argmap) args.push_back(v);
  if (args[0] == "replay") throw std::invalid_argument("a manifest cannot replay another replay");
  std::ostringstream sink_out, sink_err;
  const Result r = execute(args, true, sink_out, sink_err);
  if (r.manifest == text) {
    out << "replay: identical (" << args.size() << " arguments, exit " << r.code << ")\n";
    return ok;
  }
  out << "replay: DIFFERS\n";
  std::istringstream a(text), b(r.manifest);
  std::string la, lb;
  for (;;) {
    const bool ha = static_cast<bool>(std::getline(a, la));
    const bool hb = static_cast<bool>(std::getline(b, lb));
    if (!ha && !hb) break;
    if (!ha) la.clear();
    if (!hb) lb.clear();
    if (la != lb) out << "  recorded: " << la << "\n  replayed: " << lb << "\n";
  }
  if (!sink_err.str().empty()) err << sink_err.str();
  return domain_failure;
}

void add_option(CLI::App* app, const std::string& name, std::string& target, const std::string& help) {
  app->add_option(name, target, help);
}

void add_list(CLI::App* app, const std::string& name, std::vector<std::string>& target, const std::string& help) {
  app->add_option(name, target, help)->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

Result execute(const std::vector<std::string>& args, bool dry, std::ostream& out, std::ostream& err) {
  CLI::App app{"Carlitz differential equations over local fields of positive characteristic", "fql"};
  app.fallthrough();
  app.require_subcommand(1);
  GlobalOpts g;
  Opts o;
  g.p_opt = app.add_option("--p", g.p, "characteristic p (prime)");
  g.v_opt = app.add_option("--v", g.v, "q = p^v");
  g.f_opt = app.add_option("--f", g.f, "coefficient field F_(q^f)");
  app.add_option("-o,--output", g.out_path, "output file (prefix for multi-value results)");
  app.add_option("--manifest", g.manifest_path, "write a reproducibility manifest here");
  app.add_flag("--kv", g.kv, "machine-readable key: value output");

  auto* carlitz = app.add_subcommand("carlitz", "brackets, factorials and Carlitz polynomials");
  carlitz->require_subcommand(1);
  auto* s_bracket = carlitz->add_subcommand("bracket", "[j] = x^(q^j) - x");
  s_bracket->add_option("--j", o.j, "index (negative allowed)")->required();
  add_option(s_bracket, "--prec", o.prec_text, "absolute precision cap");
  auto* s_fact = carlitz->add_subcommand("factorial", "D_i and L_i");
  s_fact->add_option("--i", o.i, "index")->required();
  auto* s_feval = carlitz->add_subcommand("feval", "f_i(t), or e_i(t) with --e");
  s_feval->add_option("--i", o.i, "index")->required();
  add_option(s_feval, "--t", o.t, "point t (literal or @file)");
  add_option(s_feval, "--prec", o.prec_text, "precision for points outside F_q[x]");
  s_feval->add_flag("--e", o.e_poly, "evaluate e_i = D_i f_i instead");
  add_option(s_feval, "--method", o.method, "recursion or product (for --e)");

  auto* solve = app.add_subcommand("solve", "construct Carlitz expansions of solutions");
  solve->require_subcommand(1);
  auto* s_model = solve->add_subcommand("model", "tau d u = lambda u (scalar or matrix lambda)");
  add_option(s_model, "--lambda", o.lambda, "lambda (literal, @series or @matrix)");
  add_option(s_model, "--c0", o.c0, "c_0 (default 1, or identity for matrices)");
  s_model->add_option("-n,--n", o.n, "highest coefficient index (default 8)");
  auto* s_system = solve->add_subcommand("system", "tau d u = P(tau) u, P = sum pi_k tau^k");
  add_list(s_system, "--pi", o.pi, "pi_k matrix files, in order");
  s_system->add_option("--K", o.K, "number of w_k (default 6)");
  s_system->add_option("--ng", o.ng, "coefficients of the model solution g (default 16)");
  add_option(s_system, "--prec", o.prec_text, "working precision (default 64)");
  auto* s_e2 = solve->add_subcommand("euler2", "tau^2 d^2 u + b1 tau d u + b0 u = 0");
  add_option(s_e2, "--b0", o.b0, "b_0");
  add_option(s_e2, "--b1", o.b1, "b_1");
  s_e2->add_option("-n,--n", o.n, "highest coefficient index (default 8)");
  add_option(s_e2, "--prec", o.prec_text, "square-root precision for exact inputs (default 64)");
  auto* s_eg = solve->add_subcommand("euler-general", "tau d Phi = B Phi with B = X^-1 (B0 + N) X");
  add_option(s_eg, "--B0", o.B0, "diagonal part");
  add_option(s_eg, "--nil", o.nil, "nilpotent part");
  add_option(s_eg, "--X", o.X, "change of basis");
  add_option(s_eg, "--c0", o.c0, "initial coefficient (default identity)");
  s_eg->add_option("-n,--n", o.n, "highest coefficient index (default 8)");
  auto* s_hyp = solve->add_subcommand("hypergeom", "(Delta - [-a])(Delta - [-b]) u = d Delta u");
  s_hyp->add_option("--a", o.a, "a")->required();
  add_list(s_hyp, "--b", o.b_list, "b");
  add_option(s_hyp, "--c0", o.c0, "c_0 (default 1)");
  add_option(s_hyp, "--c1", o.c1, "c_1 (default 0)");
  s_hyp->add_option("-n,--n", o.n, "highest coefficient index (default 12)");
  add_option(s_hyp, "--policy", o.policy, "principal, generic or scripted");
  s_hyp->add_option("--seed", o.seed, "seed for the generic policy (default 1)");
  s_hyp->add_option("--generic-from", o.generic_from, "first step taking a unit root");
  add_option(s_hyp, "--script", o.script, "comma-separated theta codes for the scripted policy");
  add_option(s_hyp, "--prec", o.prec_text, "target residual precision (default 64)");

  auto* s_eval = app.add_subcommand("eval", "evaluate a Carlitz expansion");
  add_option(s_eval, "--c", o.c_file, "@expansion file");
  add_list(s_eval, "--t", o.points, "points (literal or @file)");
  add_option(s_eval, "--prec", o.prec_text, "precision (default 64)");
  s_eval->add_flag("--no-tail-bound", o.no_tail, "do not cap precision by the valuation law");

  auto* s_class = app.add_subcommand("classify", "regularity class of an expansion");
  add_option(s_class, "--c", o.c_file, "@expansion file");

  auto* s_verify = app.add_subcommand("verify", "residual check of a solution");
  add_option(s_verify, "--eq", o.eq, "model, euler, hypergeom, matrix-model, first-order or system");
  add_option(s_verify, "--c", o.c_file, "@expansion file");
  add_option(s_verify, "--lambda", o.lambda, "lambda (model: literal or @series; matrix-model: @matrix)");
  add_list(s_verify, "--b", o.b_list, "euler: b_0..b_(m-1); hypergeom: b");
  s_verify->add_option("--a", o.a, "hypergeom: a");
  add_option(s_verify, "--B", o.B, "first-order: @matrix");
  add_list(s_verify, "--pi", o.pi, "system: pi_k matrix files");
  add_list(s_verify, "--w", o.w, "system: w_k matrix files");
  add_option(s_verify, "--g", o.g_file, "system: @model solution file");
  add_list(s_verify, "--t", o.points, "points (literal or @file)");
  s_verify->add_option("--random-points", o.random_count, "additional random points outside F_q[x]");
  s_verify->add_option("--seed", o.seed, "seed for random points (default 1)");
  add_option(s_verify, "--prec", o.prec_text, "target precision (required for truncated data)");

  auto* s_replay = app.add_subcommand("replay", "rerun a manifest and compare outputs byte for byte");
  s_replay->add_option("manifest", o.manifest_in, "manifest path")->required();

  Result result;
  Job job;
  job.args = args;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    result.code = usage;
    return result;
  }

  try {
    if (s_replay->parsed()) {
      result.code = replay(o.manifest_in, out, err);
      return result;
    }
    if (s_hyp->parsed()) {
      if (o.b_list.size() != 1) throw std::invalid_argument("solve hypergeom needs exactly one --b");
      try {
        o.b = std::stoll(o.b_list[0]);
      } catch (const std::exception&) {
        throw ParseError("--b must be an integer");
      }
    }
    job.field = resolve_field(g, all_inputs(o));
    Inputs in(job);
    if (s_bracket->parsed()) cmd_bracket(job, in, o);
    else if (s_fact->parsed()) cmd_factorial(job, in, o);
    else if (s_feval->parsed()) cmd_feval(job, in, o);
    else if (s_model->parsed()) cmd_model(job, in, o);
    else if (s_system->parsed()) cmd_system(job, in, o);
    else if (s_e2->parsed()) cmd_euler2(job, in, o);
    else if (s_eg->parsed()) cmd_euler_general(job, in, o);
    else if (s_hyp->parsed()) cmd_hypergeom(job, in, o);
    else if (s_eval->parsed()) cmd_eval(job, in, o);
    else if (s_class->parsed()) cmd_classify(job, in, o);
    else if (s_verify->parsed()) cmd_verify(job, in, o);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    result.code = usage;
    return result;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    result.code = usage;
    return result;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    result.code = domain_failure;
    return result;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    result.code = domain_failure;
    return result;
  }

  const std::string all = combined_output(job);
  result.code = job.exit;
  std::string report;
  for (const auto& [k, v] : job.kv) report += k + ": " + v + "\n";
  result.manifest = render_manifest(job, digest(report + all));

  const bool single = job.outputs.size() == 1 && job.outputs[0].name.empty();
  if (!g.out_path.empty() && !job.outputs.empty() && !dry) {
    if (single) {
      write_file(g.out_path, job.outputs[0].text);
    } else {
      for (const auto& o2 : job.outputs) write_file(g.out_path + "." + o2.name, o2.text);
    }
  }
  const bool to_stdout = g.out_path.empty() && !job.outputs.empty();
  const std::string prefix = to_stdout ? "# " : "";
  if (g.kv) {
    for (const auto& [k, v] : job.kv) out << prefix << k << ": " << v << "\n";
  } else {
    for (const auto& line : job.human) out << prefix << line << "\n";
  }
  if (to_stdout) out << all;
  if (!g.manifest_path.empty() && !dry) write_file(g.manifest_path, result.manifest);
  return result;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return execute(args, false, out, err).code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return domain_failure;
  }
}

}  // namespace fql::cli
