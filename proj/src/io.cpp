#include "fql/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "fql/error.hpp"

namespace fql {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  for (auto w : split(s, ' ')) {
    w = trim(w);
    if (!w.empty()) out.push_back(w);
  }
  return out;
}

std::int64_t to_int(std::string_view s, int line) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
  return v;
}

Rational to_rational(std::string_view s, int line) {
  try {
    return Rational::parse(s);
  } catch (const std::exception&) {
    throw ParseError("expected a rational number or 'inf', got '" + std::string(s) + "'", line);
  }
}

// key=value pairs after the leading keyword.
std::map<std::string, std::string, std::less<>> keyvals(const std::vector<std::string_view>& w, std::size_t from,
                                                        int line) {
  std::map<std::string, std::string, std::less<>> out;
  for (std::size_t i = from; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value, got '" + std::string(w[i]) + "'", line);
    out.emplace(std::string(w[i].substr(0, eq)), std::string(w[i].substr(eq + 1)));
  }
  return out;
}

std::string require_key(const std::map<std::string, std::string, std::less<>>& kv, std::string_view key, int line) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("missing " + std::string(key) + "=", line);
  return it->second;
}

struct Line {
  std::string_view text;
  int number;
};

class Reader {
 public:
  explicit Reader(std::string_view text) {
    int number = 0;
    for (auto raw : split(text, '\n')) {
      ++number;
      auto t = trim(raw);
      if (t.empty() || t.front() == '#') continue;
      lines_.push_back({t, number});
    }
  }

  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const {
    if (done()) throw ParseError("unexpected end of input", lines_.empty() ? 0 : lines_.back().number);
    return lines_[pos_];
  }
  Line next() {
    Line l = peek();
    ++pos_;
    return l;
  }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

bool starts_with_word(std::string_view line, std::string_view word) {
  return line.substr(0, word.size()) == word && (line.size() == word.size() || line[word.size()] == ' ');
}

Series read_series(Reader& in, const FieldPtr& field) {
  const Line head = in.next();
  const auto w = words(head.text);
  if (w.empty() || w[0] != "series") throw ParseError("expected a 'series' block", head.number);
  const auto kv = keyvals(w, 1, head.number);
  const std::int64_t e = to_int(require_key(kv, "e", head.number), head.number);
  if (e <= 0) throw ParseError("ramification index e must be positive", head.number);
  const Rational prec = to_rational(require_key(kv, "prec", head.number), head.number);

  std::vector<Series::Term> terms;
  std::int64_t last = 0;
  bool first = true;
  while (!in.done()) {
    const Line& l = in.peek();
    const char c = l.text.front();
    if (!(c == '-' || (c >= '0' && c <= '9'))) break;
    in.next();
    const auto colon = l.text.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected '<exponent> : <coordinates>'", l.number);
    const Rational ex = to_rational(trim(l.text.substr(0, colon)), l.number);
    if (ex.is_infinite()) throw ParseError("infinite exponent", l.number);
    if (e % ex.den() != 0)
      throw ParseError("exponent " + ex.str() + " has denominator not dividing e=" + std::to_string(e), l.number);
    if (ex >= prec) throw ParseError("exponent " + ex.str() + " is not below the precision " + prec.str(), l.number);
    const std::int64_t n = checked_mul(ex.num(), e / ex.den());
    if (!first && n <= last) throw ParseError("exponents must be strictly increasing", l.number);
    std::vector<std::uint32_t> coords;
    for (auto part : split(trim(l.text.substr(colon + 1)), ',')) {
      const std::int64_t v = to_int(trim(part), l.number);
      if (v < 0 || v >= field->p()) throw ParseError("coordinate out of range for F_" + std::to_string(field->p()), l.number);
      coords.push_back(static_cast<std::uint32_t>(v));
    }
    if (coords.size() > field->degree()) throw ParseError("too many coordinates for the field", l.number);
    const FieldElem coeff = field->from_coords(coords);
    if (coeff.is_zero()) throw ParseError("zero coefficients are not stored", l.number);
    terms.push_back({n, coeff});
    last = n;
    first = false;
  }
  return Series::from_terms(field, e, std::move(terms), prec);
}

SeriesMatrix read_matrix(Reader& in, const FieldPtr& field) {
  const Line head = in.next();
  const auto w = words(head.text);
  if (w.size() != 3 || w[0] != "matrix") throw ParseError("expected 'matrix <rows> <cols>'", head.number);
  const std::int64_t r = to_int(w[1], head.number);
  const std::int64_t c = to_int(w[2], head.number);
  if (r <= 0 || c <= 0) throw ParseError("matrix dimensions must be positive", head.number);
  std::vector<Series> entries;
  for (std::int64_t i = 0; i < r * c; ++i) entries.push_back(read_series(in, field));
  return SeriesMatrix::from_entries(field, static_cast<std::size_t>(r), static_cast<std::size_t>(c), std::move(entries));
}

Value read_carlitz(Reader& in, const FieldPtr& field) {
  const Line head = in.next();
  const auto w = words(head.text);
  const auto kv = keyvals(w, 1, head.number);
  const std::int64_t n = to_int(require_key(kv, "n", head.number), head.number);
  if (n < 0) throw ParseError("n must be nonnegative", head.number);
  ValuationLaw law;
  if (auto it = kv.find("law"); it != kv.end()) {
    try {
      law.kind = ValuationLaw::parse_kind(it->second);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(ex.what(), head.number);
    }
    if (auto s = kv.find("law.start"); s != kv.end()) law.start = to_int(s->second, head.number);
    if (auto s = kv.find("law.offset"); s != kv.end()) law.offset = to_rational(s->second, head.number);
    if (auto s = kv.find("law.rate"); s != kv.end()) law.rate = to_rational(s->second, head.number);
  }
  if (in.done()) throw ParseError("carlitz expansion without coefficients", head.number);
  if (starts_with_word(in.peek().text, "matrix")) {
    CarlitzMatrixCoeffs out{field, {}, law};
    for (std::int64_t i = 0; i <= n; ++i) out.coeffs.push_back(read_matrix(in, field));
    return out;
  }
  CarlitzCoeffs out{field, {}, law};
  for (std::int64_t i = 0; i <= n; ++i) out.coeffs.push_back(read_series(in, field));
  return out;
}

void emit_series(std::ostringstream& os, const Series& s) {
  os << "series e=" << s.ramification() << " prec=" << s.precision().str() << "\n";
  for (const auto& t : s.terms())
    os << Rational(t.exp, s.ramification()).str() << " : " << s.desc().coords_string(t.coeff) << "\n";
}

void emit_matrix(std::ostringstream& os, const SeriesMatrix& m) {
  os << "matrix " << m.rows() << " " << m.cols() << "\n";
  for (const auto& s : m.entries()) emit_series(os, s);
}

void emit_law(std::ostringstream& os, const ValuationLaw& law) {
  if (!law.known()) return;
  os << " law=" << law.kind_name() << " law.start=" << law.start << " law.offset=" << law.offset.str()
     << " law.rate=" << law.rate.str();
}

}  // namespace

FieldPtr parse_field_header(std::string_view line, int line_no) {
  const auto w = words(line);
  if (w.empty() || w[0] != "field") throw ParseError("expected a 'field' header", line_no);
  const auto kv = keyvals(w, 1, line_no);
  const std::int64_t p = to_int(require_key(kv, "p", line_no), line_no);
  const std::int64_t v = kv.count("v") ? to_int(kv.find("v")->second, line_no) : 1;
  const std::int64_t f = kv.count("f") ? to_int(kv.find("f")->second, line_no) : 1;
  std::vector<std::uint32_t> modulus;
  if (auto it = kv.find("modulus"); it != kv.end()) {
    for (auto part : split(it->second, ',')) {
      const std::int64_t c = to_int(trim(part), line_no);
      if (c < 0) throw ParseError("negative modulus coefficient", line_no);
      modulus.push_back(static_cast<std::uint32_t>(c));
    }
  }
  if (p <= 0 || v <= 0 || f <= 0) throw ParseError("field parameters must be positive", line_no);
  try {
    return FieldDesc::make(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(f),
                           std::move(modulus));
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what(), line_no);
  }
}

std::string to_text(const Series& s) {
  std::ostringstream os;
  os << s.desc().header() << "\n";
  emit_series(os, s);
  return os.str();
}

std::string to_text(const SeriesMatrix& m) {
  std::ostringstream os;
  os << m.field()->header() << "\n";
  emit_matrix(os, m);
  return os.str();
}

std::string to_text(const CarlitzCoeffs& c) {
  std::ostringstream os;
  os << c.field->header() << "\n";
  os << "carlitz n=" << (static_cast<std::int64_t>(c.size()) - 1);
  emit_law(os, c.law);
  os << "\n";
  for (const auto& s : c.coeffs) emit_series(os, s);
  return os.str();
}

std::string to_text(const CarlitzMatrixCoeffs& c) {
  std::ostringstream os;
  os << c.field->header() << "\n";
  os << "carlitz n=" << (static_cast<std::int64_t>(c.size()) - 1);
  emit_law(os, c.law);
  os << "\n";
  for (const auto& m : c.coeffs) emit_matrix(os, m);
  return os.str();
}

std::string to_text(const Value& v) {
  return std::visit([](const auto& x) { return to_text(x); }, v);
}

Document parse_document(std::string_view text) {
  Reader in(text);
  if (in.done()) throw ParseError("empty input");
  const Line head = in.next();
  FieldPtr field = parse_field_header(head.text, head.number);
  if (in.done()) throw ParseError("field header without a value", head.number);
  const Line& body = in.peek();
  Document doc{field, Series::zero(field)};
  try {
    if (starts_with_word(body.text, "series")) {
      doc.value = read_series(in, field);
    } else if (starts_with_word(body.text, "matrix")) {
      doc.value = read_matrix(in, field);
    } else if (starts_with_word(body.text, "carlitz")) {
      doc.value = read_carlitz(in, field);
    } else {
      throw ParseError("expected 'series', 'matrix' or 'carlitz'", body.number);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ParseError(ex.what(), body.number);
  }
  if (!in.done()) throw ParseError("trailing content after the value", in.peek().number);
  return doc;
}

namespace {
template <class T>
T parse_as(std::string_view text, const char* what) {
  Document doc = parse_document(text);
  if (auto* v = std::get_if<T>(&doc.value)) return std::move(*v);
  throw ParseError(std::string("expected a ") + what);
}
}  // namespace

Series parse_series(std::string_view text) { return parse_as<Series>(text, "series"); }
SeriesMatrix parse_matrix(std::string_view text) { return parse_as<SeriesMatrix>(text, "matrix"); }
CarlitzCoeffs parse_carlitz(std::string_view text) { return parse_as<CarlitzCoeffs>(text, "scalar carlitz expansion"); }
CarlitzMatrixCoeffs parse_carlitz_matrix(std::string_view text) {
  return parse_as<CarlitzMatrixCoeffs>(text, "matrix carlitz expansion");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

}  // namespace fql
