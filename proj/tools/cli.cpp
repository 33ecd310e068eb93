#include "cli.hpp"

#include "klext/cache.hpp"
#include "klext/characters.hpp"
#include "klext/error.hpp"
#include "klext/extbounds.hpp"
#include "klext/klpoly.hpp"
#include "klext/rootsys.hpp"
#include "klext/weylaffine.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace klext::cli {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Options

struct Options {
  std::vector<std::string> system;  // "A 2" or "A2"
  std::string type;
  int rank = 0;
  std::int64_t l = 0;  // 0: default_level
  std::int64_t p = 2;
  std::uint32_t cutoff = 12;
  int workers = 1;
  std::string format = "json";
  std::string cache_dir;
  bool no_cache = false;
  bool finite = false;
  bool expand = false;
  bool dominant_only = false;
  bool costandard = false;
  std::size_t max_elements = GroupSlice::kDefaultMaxElements;
  std::vector<std::int64_t> ns{1};
  std::vector<std::int64_t> ms{0};
  std::string weight, weight2, lambda_minus, top;
  std::int64_t x = -1, y = -1;
  std::uint64_t seed = 1;
  std::size_t samples = 500;
  std::string config;
  bool verbose = false;
  std::vector<std::string> from_config;  // keys taken from the config file
};

struct Report {
  Json doc = Json::object();
  std::string table;  // key of the array rendered by the text and csv writers
};

// Exact integers go out as JSON numbers when they fit, as decimal strings otherwise.
Json big(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(v);
  return v.str();
}

Json coeffs(const IntPolynomial& p) {
  Json a = Json::array();
  if (p.is_zero()) return a;
  for (std::int64_t e = 0; e <= p.degree(); ++e) a.push_back(big(p.coefficient(static_cast<std::uint32_t>(e))));
  return a;
}

std::string label(bool exact, std::uint32_t cutoff) { return exact ? "exact" : "truncated@" + std::to_string(cutoff); }

Json system_json(const RootSystem& rs) { return Json{{"type", std::string(1, rs.type)}, {"rank", rs.rank}}; }

Json weight_list(const std::vector<Weight>& ws) {
  Json a = Json::array();
  for (const auto& w : ws) a.push_back(w.str());
  return a;
}

// ---------------------------------------------------------------------------
// Rendering

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> columns_of(const Json& rows) {
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  return cols;
}

void write_csv(const Report& r, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_quote(cells[i]);
    out << "\r\n";
  };
  if (r.table.empty() || !r.doc.contains(r.table)) {
    line({"key", "value"});
    for (const auto& [k, v] : r.doc.items()) line({k, cell(v)});
    return;
  }
  const auto& rows = r.doc.at(r.table);
  const auto cols = columns_of(rows);
  line(cols);
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const auto& c : cols) cells.push_back(row.contains(c) ? cell(row.at(c)) : "");
    line(cells);
  }
}

void write_text(const Report& r, std::ostream& out) {
  for (const auto& [k, v] : r.doc.items())
    if (k != r.table) out << k << ": " << cell(v) << "\n";
  if (r.table.empty() || !r.doc.contains(r.table)) return;
  const auto& rows = r.doc.at(r.table);
  const auto cols = columns_of(rows);
  std::vector<std::size_t> width(cols.size());
  std::vector<std::vector<std::string>> grid;
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const auto& c : cols) cells.push_back(row.contains(c) ? cell(row.at(c)) : "");
    grid.push_back(std::move(cells));
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    width[i] = cols[i].size();
    for (const auto& g : grid) width[i] = std::max(width[i], g[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += "  ";
      s += cells[i] + std::string(width[i] - cells[i].size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << "\n";
  };
  out << "\n";
  line(cols);
  for (const auto& g : grid) line(g);
}

void write(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "csv")
    write_csv(r, out);
  else if (format == "text")
    write_text(r, out);
  else
    out << r.doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Session: root system, group, slice and table, with the cache in front.

class Session {
 public:
  Session(const Options& o, std::ostream& err) : o_(o), err_(err) {
    auto [type, rank] = system_of(o);
    std::string why;
    if (!is_valid_type(type, rank, &why)) throw InvalidArgument(why);
    rs_ = build_root_system(type, rank);
    if (!o.no_cache) {
      if (!o.cache_dir.empty())
        cache_dir_ = o.cache_dir;
      else if (const char* env = std::getenv("KLEXT_CACHE_DIR"); env && *env)
        cache_dir_ = env;
    }
  }

  const RootSystem& roots() const { return rs_; }
  const Options& options() const { return o_; }

  std::shared_ptr<const AffineWeylGroup> group() {
    if (!group_) group_ = std::make_shared<const AffineWeylGroup>(rs_);
    return group_;
  }

  bool affine() const { return !o_.finite; }
  std::uint32_t cutoff() {
    // a finite slice is the whole group
    return affine() ? o_.cutoff : static_cast<std::uint32_t>(group()->finite().length(group()->finite().longest()));
  }

  std::int64_t level() const { return o_.l > 0 ? o_.l : default_level(rs_); }

  void warn_level() {
    for (const auto& w : level_warnings(rs_, level())) err_ << "warning: " << w << "\n";
  }

  std::shared_ptr<const GroupSlice> slice() {
    if (slice_) return slice_;
    if (cache_dir_) {
      const auto prefix = slice_file_name(rs_, affine(), 0);
      if (auto path = find_cached(*cache_dir_, prefix.substr(0, prefix.size() - 5), cutoff())) {
        try {
          slice_ = load_slice(*path, group(), affine(), cutoff());
          note("loaded " + path->string());
          return slice_;
        } catch (const CacheError& e) {
          err_ << "warning: " << e.what() << "; recomputing\n";
        }
      }
    }
    slice_ = std::make_shared<const GroupSlice>(group(), cutoff(), affine(), o_.max_elements);
    if (cache_dir_) store([&](const auto& dir) { save_slice(*slice_, dir / slice_file_name(rs_, affine(), cutoff())); });
    return slice_;
  }

  std::shared_ptr<const KLTable> table() {
    if (table_) return table_;
    if (cache_dir_) {
      const auto prefix = table_file_name(rs_, affine(), 0);
      if (auto path = find_cached(*cache_dir_, prefix.substr(0, prefix.size() - 5), cutoff())) {
        try {
          // the slice stored next to the table, cut down to the requested length
          auto stored = path->filename().string();
          auto cut = static_cast<std::uint32_t>(std::stoul(stored.substr(stored.rfind('L') + 1)));
          auto sl = load_slice(path->parent_path() / slice_file_name(rs_, affine(), cut), group(), affine(), cutoff());
          auto t = std::make_shared<KLTable>(load_table(*path, sl));
          slice_ = sl;
          table_ = t;
          note("loaded " + path->string());
          return table_;
        } catch (const CacheError& e) {
          err_ << "warning: " << e.what() << "; recomputing\n";
          slice_.reset();
        }
      }
    }
    auto sl = std::make_shared<const GroupSlice>(group(), cutoff(), affine(), o_.max_elements);
    auto t = std::make_shared<KLTable>(sl);
    t->fill(o_.workers);
    slice_ = sl;
    table_ = t;
    if (cache_dir_)
      store([&](const auto& dir) {
        save_slice(*sl, dir / slice_file_name(rs_, affine(), cutoff()));
        save_table(*t, dir / table_file_name(rs_, affine(), cutoff()));
      });
    return table_;
  }

  BlockContext block(const Weight& lambda_minus) {
    if (!affine()) throw InvalidArgument("this command needs the affine group; drop --finite");
    return BlockContext(table(), level(), lambda_minus);
  }
  BlockContext block() { return block(-2 * rs_.rho); }

  Weight parse_weight(const std::string& text, const char* what) const {
    if (text.empty()) throw InvalidArgument(std::string("missing ") + what);
    Weight w = Weight::parse(text);
    if (w.rank() != static_cast<std::size_t>(rs_.rank))
      throw InvalidArgument(std::string(what) + " " + w.str() + " does not have rank " + std::to_string(rs_.rank));
    return w;
  }

 private:
  static std::pair<char, int> system_of(const Options& o) {
    std::string type = o.type;
    int rank = o.rank;
    if (!o.system.empty()) {
      type = o.system[0];
      if (o.system.size() > 1) rank = std::stoi(o.system[1]);
    }
    if (type.size() > 1) {
      rank = std::stoi(type.substr(1));
      type = type.substr(0, 1);
    }
    if (type.size() != 1) throw InvalidArgument("missing root system type (e.g. `A 2` or --type A --rank 2)");
    if (rank <= 0) throw InvalidArgument("missing or invalid rank");
    return {static_cast<char>(std::toupper(static_cast<unsigned char>(type[0]))), rank};
  }

  void note(const std::string& msg) {
    if (o_.verbose) err_ << msg << "\n";
  }

  template <class F>
  void store(F&& f) {
    try {
      std::filesystem::path dir(*cache_dir_);
      std::filesystem::create_directories(dir);
      f(dir);
    } catch (const std::exception& e) {
      err_ << "warning: could not write the cache: " << e.what() << "\n";
    }
  }

  const Options& o_;
  std::ostream& err_;
  RootSystem rs_;
  std::optional<std::string> cache_dir_;
  std::shared_ptr<const AffineWeylGroup> group_;
  std::shared_ptr<const GroupSlice> slice_;
  std::shared_ptr<const KLTable> table_;
};

std::size_t index_arg(const Session& s, std::int64_t v, std::size_t size, const char* what) {
  (void)s;
  if (v < 0) throw InvalidArgument(std::string("missing ") + what);
  if (static_cast<std::size_t>(v) >= size)
    throw CoverageError(std::string(what) + " " + std::to_string(v) + " is outside the slice of " +
                        std::to_string(size) + " elements");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_info(Session& s) {
  const auto& rs = s.roots();
  Report r;
  auto& d = r.doc;
  d["type"] = std::string(1, rs.type);
  d["rank"] = rs.rank;
  d["cartan"] = rs.cartan;
  d["positive_roots"] = rs.positive_roots;
  d["h"] = rs.coxeter_number;
  d["weyl_order"] = rs.weyl_order;
  d["num_roots"] = rs.num_roots();
  d["torsion_exponent"] = rs.torsion_exponent;
  d["cartan_det"] = rs.cartan_det;
  d["rho"] = rs.rho.str();
  d["alpha0"] = rs.alpha0();
  d["alpha_max"] = rs.alpha_max();
  d["default_level"] = default_level(rs);
  return r;
}

Report cmd_enumerate(Session& s) {
  auto sl = s.slice();
  const auto& fin = sl->group().finite();
  Report r;
  r.table = "elements";
  auto& d = r.doc;
  d["system"] = system_json(s.roots());
  d["affine"] = sl->affine();
  d["cutoff"] = sl->cutoff();
  d["count"] = sl->size();
  Json counts = Json::array();
  for (std::uint32_t len = 0; len <= sl->cutoff(); ++len) {
    auto [a, b] = sl->shell(len);
    if (a == b && !sl->affine()) break;
    counts.push_back(b - a);
  }
  d["count_by_length"] = counts;
  Json rows = Json::array();
  for (std::size_t i = 0; i < sl->size(); ++i) {
    const auto& g = sl->element(i);
    rows.push_back(Json{{"index", i},
                        {"length", sl->length(i)},
                        {"finite_word", fin.reduced_word(g.w)},
                        {"translation", g.mu.str()},
                        {"dominant", sl->dominant(i)}});
  }
  d["elements"] = rows;
  return r;
}

Json kl_record(const KLTable& t, std::size_t x, std::size_t y) {
  const auto& sl = t.slice();
  const auto& p = t.P(x, y);
  return Json{{"x", x},
              {"y", y},
              {"length_x", sl.length(x)},
              {"length_y", sl.length(y)},
              {"polynomial", p.str("q")},
              {"polynomial_coeffs", coeffs(p)},
              {"mu", big(t.mu(x, y))}};
}

Report cmd_kl(Session& s) {
  auto t = s.table();
  const auto& sl = t->slice();
  const auto& o = s.options();
  Report r;
  r.table = "records";
  r.doc["system"] = system_json(s.roots());
  r.doc["affine"] = sl.affine();
  r.doc["cutoff"] = sl.cutoff();
  Json rows = Json::array();
  if (o.x >= 0 || o.y >= 0) {
    rows.push_back(kl_record(*t, index_arg(s, o.x, sl.size(), "--x"), index_arg(s, o.y, sl.size(), "--y")));
  } else {
    for (std::size_t y = 0; y < sl.size(); ++y) {
      if (o.dominant_only && !sl.dominant(y)) continue;
      for (const auto& e : t->row(y))
        if (!o.dominant_only || sl.dominant(e.x)) rows.push_back(kl_record(*t, e.x, y));
    }
  }
  r.doc["records"] = rows;
  return r;
}

Report cmd_mu(Session& s) {
  auto t = s.table();
  const auto& sl = t->slice();
  const auto& o = s.options();
  Report r;
  r.table = "records";
  r.doc["system"] = system_json(s.roots());
  r.doc["affine"] = sl.affine();
  r.doc["cutoff"] = sl.cutoff();
  Json rows = Json::array();
  if (o.x >= 0 || o.y >= 0) {
    auto x = index_arg(s, o.x, sl.size(), "--x"), y = index_arg(s, o.y, sl.size(), "--y");
    rows.push_back(Json{{"x", x}, {"y", y}, {"mu", big(t->mu(x, y))}});
  } else {
    for (std::size_t y = 0; y < sl.size(); ++y) {
      if (o.dominant_only && !sl.dominant(y)) continue;
      for (const auto& e : t->mu_row(y))
        if (!o.dominant_only || sl.dominant(e.z)) rows.push_back(Json{{"x", e.z}, {"y", y}, {"mu", big(e.mu)}});
    }
  }
  r.doc["records"] = rows;
  return r;
}

Report cmd_mu_sum(Session& s) {
  if (!s.affine()) throw InvalidArgument("mu-sum needs the affine group");
  auto t = s.table();
  const auto& sl = t->slice();
  const auto& o = s.options();
  const auto l = default_level(s.roots());
  Report r;
  r.table = "sums";
  r.doc["system"] = system_json(s.roots());
  r.doc["cutoff"] = sl.cutoff();
  r.doc["level"] = l;
  Json rows = Json::array();
  BigInt best = 0;
  for (std::size_t x = 0; x < sl.size(); ++x) {
    if (!sl.dominant(x)) continue;
    if (o.x >= 0 && static_cast<std::size_t>(o.x) != x) continue;
    auto v = mu_row_sum(*t, x);
    best = std::max(best, v.value);
    rows.push_back(Json{{"x", x},
                        {"length", sl.length(x)},
                        {"weight", sl.group().dot(sl.element(x), -2 * s.roots().rho, l).str()},
                        {"value", big(v.value)},
                        {"window", v.window},
                        {"missing", v.missing},
                        {"label", label(v.saturated, sl.cutoff())}});
  }
  if (o.x >= 0 && rows.empty()) throw InvalidArgument("--x must be a dominant element of the slice");
  r.doc["max"] = Json{{"value", big(best)}, {"label", label(false, sl.cutoff())}};
  r.doc["sums"] = rows;
  return r;
}

Report cmd_klsum(Session& s) {
  auto t = s.table();
  const auto& sl = t->slice();
  const auto& o = s.options();
  Report r;
  r.table = "sums";
  r.doc["system"] = system_json(s.roots());
  r.doc["cutoff"] = sl.cutoff();
  Json rows = Json::array();
  for (auto m : o.ms)
    for (std::size_t y = 0; y < sl.size(); ++y) {
      if (!sl.dominant(y)) continue;
      if (o.y >= 0 && static_cast<std::size_t>(o.y) != y) continue;
      rows.push_back(Json{{"y", y},
                          {"length", sl.length(y)},
                          {"m", m},
                          {"value", big(kl_coefficient_sum(*t, y, m))},
                          {"label", "exact"}});
    }
  r.doc["sums"] = rows;
  return r;
}

Report cmd_char(Session& s) {
  const auto& rs = s.roots();
  const auto lambda = s.parse_weight(s.options().weight, "--weight");
  auto ch = weyl_character(rs, lambda);
  Report r;
  r.table = "weights";
  r.doc["system"] = system_json(rs);
  r.doc["weight"] = lambda.str();
  r.doc["dimension"] = big(ch.dimension(rs));
  Json rows = Json::array();
  if (s.options().expand) {
    for (const auto& [mu, m] : ch.expand(rs)) rows.push_back(Json{{"weight", mu.str()}, {"multiplicity", big(m)}});
  } else {
    for (const auto& [mu, m] : ch.dominant)
      rows.push_back(Json{{"weight", mu.str()}, {"multiplicity", big(m)}, {"orbit_size", weyl_orbit(rs, mu).size()}});
  }
  r.doc["weights"] = rows;
  return r;
}

Report cmd_chikl(Session& s) {
  const auto& rs = s.roots();
  const auto lambda = s.parse_weight(s.options().weight, "--weight");
  s.warn_level();
  const auto l = s.level();
  auto t = s.table();
  auto terms = chi_kl(*t, lambda, l);
  auto f = factorize_weight(t->slice().group(), lambda, l);
  Report r;
  r.table = "terms";
  r.doc["system"] = system_json(rs);
  r.doc["weight"] = lambda.str();
  r.doc["level"] = l;
  r.doc["lambda_minus"] = f.lambda_minus.str();
  r.doc["length"] = t->slice().group().length(f.element);
  BigInt dim = 0;
  Json rows = Json::array();
  // highest weight first
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    auto dn = weyl_dimension(rs, it->first);
    dim += it->second * dn;
    rows.push_back(Json{{"weight", it->first.str()}, {"coefficient", big(it->second)}, {"weyl_dimension", big(dn)}});
  }
  r.doc["dimension"] = big(dim);
  r.doc["terms"] = rows;
  return r;
}

Report cmd_decomp(Session& s) {
  const auto& rs = s.roots();
  const auto& o = s.options();
  s.warn_level();
  const auto l = s.level();
  const Weight lm = o.lambda_minus.empty() ? -2 * rs.rho : s.parse_weight(o.lambda_minus, "--lambda-minus");
  const Weight top = o.top.empty() ? (2 * (l - 1)) * rs.rho : s.parse_weight(o.top, "--top");
  auto t = s.table();
  auto m = decomposition_matrix(*t, lm, l, top);
  auto chk = check_decomposition(rs, m);
  Report r;
  r.table = "matrix";
  auto& d = r.doc;
  d["system"] = system_json(rs);
  d["level"] = l;
  d["lambda_minus"] = lm.str();
  d["top"] = top.str();
  d["size"] = m.size();
  d["weights"] = weight_list(m.weights);
  Json a = Json::array(), dm = Json::array(), rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json ra = Json::array(), rd = Json::array();
    Json row{{"standard", m.weights[i].str()}};
    for (std::size_t j = 0; j < m.size(); ++j) {
      ra.push_back(big(m.signed_kl[i][j]));
      rd.push_back(big(m.decomp[i][j]));
      row[m.weights[j].str()] = big(m.decomp[i][j]);
    }
    a.push_back(ra);
    dm.push_back(rd);
    rows.push_back(row);
  }
  d["signed_kl"] = a;
  d["decomp"] = dm;
  d["check"] = Json{{"inverse_ok", chk.inverse_ok},
                    {"nonnegative", chk.nonnegative},
                    {"resubstitution_ok", chk.resubstitution_ok},
                    {"problems", chk.problems}};
  d["matrix"] = rows;
  return r;
}

Report cmd_tensor(Session& s) {
  const auto& rs = s.roots();
  const auto a = s.parse_weight(s.options().weight, "--weight");
  const auto b = s.parse_weight(s.options().weight2, "--weight2");
  CharacterCache cache(rs);
  auto prod = tensor_decompose(rs, a, b, s.options().workers, &cache);
  const auto da = weyl_dimension(rs, a), db = weyl_dimension(rs, b);
  BigInt length = 0;
  bool mult_ok = true;
  Json rows = Json::array();
  for (auto it = prod.rbegin(); it != prod.rend(); ++it) {
    auto dt = weyl_dimension(rs, it->first);
    length += it->second;
    if (it->second > dt) mult_ok = false;
    rows.push_back(Json{{"weight", it->first.str()}, {"multiplicity", big(it->second)}, {"dimension", big(dt)}});
  }
  Report r;
  r.table = "components";
  r.doc["system"] = system_json(rs);
  r.doc["lambda"] = a.str();
  r.doc["nu"] = b.str();
  r.doc["dim_lambda"] = big(da);
  r.doc["dim_nu"] = big(db);
  r.doc["length"] = big(length);
  r.doc["multiplicity_bound_ok"] = mult_ok;
  r.doc["length_bound_ok"] = length <= std::min(da, db);
  r.doc["components"] = rows;
  return r;
}

Json singular_json(const SingularTranslationReport& rep, const GroupSlice& sl) {
  Json secs = Json::array();
  for (const auto& sct : rep.sections) {
    Json j{{"length", sl.group().length(sct.v)}, {"translation", sct.v.mu.str()}, {"same_parity", sct.same_parity}};
    j["index"] = sct.index ? Json(*sct.index) : Json(nullptr);
    j["mu"] = big(sct.mu);
    secs.push_back(j);
  }
  return Json{{"lambda_minus", rep.lambda_minus.str()},
              {"stabilizer", rep.stabilizer},
              {"total", big(rep.total)},
              {"bound", big(rep.bound)},
              {"complete", rep.complete},
              {"sections", secs}};
}

Report cmd_ext1(Session& s) {
  const auto& o = s.options();
  s.warn_level();
  auto ctx = s.block();
  Report r;
  r.doc["system"] = system_json(s.roots());
  r.doc["level"] = ctx.level();
  if (o.x >= 0 || o.y >= 0) {
    auto x = index_arg(s, o.x, ctx.slice().size(), "--x"), y = index_arg(s, o.y, ctx.slice().size(), "--y");
    r.doc["x"] = x;
    r.doc["y"] = y;
    r.doc["value"] = big(ext1_simple_simple(ctx, x, y));
    return r;
  }
  const auto a = s.parse_weight(o.weight, "--weight"), b = s.parse_weight(o.weight2, "--weight2");
  r.doc["lambda"] = a.str();
  r.doc["nu"] = b.str();
  const auto fa = factorize_weight(ctx.group(), a, ctx.level());
  const auto fb = factorize_weight(ctx.group(), b, ctx.level());
  if (fa.lambda_minus == fb.lambda_minus && !fa.regular) {
    auto rep = singular_translation_report(ctx, a, b);
    r.doc["regular"] = false;
    r.doc["singular_report"] = singular_json(rep, ctx.slice());
    return r;
  }
  r.doc["regular"] = true;
  r.doc["linked"] = fa.lambda_minus == fb.lambda_minus;
  r.doc["value"] = big(ext1_simple_simple(ctx, a, b));
  if (fa.lambda_minus == fb.lambda_minus)
    r.doc["deltared_costandard"] = big(ext1_deltared_costandard(ctx, a, b));
  return r;
}

Report cmd_extn(Session& s) {
  const auto& o = s.options();
  s.warn_level();
  const auto n = o.ns.front();
  Report r;
  r.doc["system"] = system_json(s.roots());
  r.doc["level"] = s.level();
  r.doc["n"] = n;
  r.doc["kind"] = o.costandard ? "simple-costandard" : "simple-simple";
  std::size_t x, y;
  std::optional<BlockContext> ctx;
  if (o.x >= 0 || o.y >= 0) {
    ctx.emplace(s.block());
    x = index_arg(s, o.x, ctx->slice().size(), "--x");
    y = index_arg(s, o.y, ctx->slice().size(), "--y");
  } else {
    const auto a = s.parse_weight(o.weight, "--weight"), b = s.parse_weight(o.weight2, "--weight2");
    r.doc["lambda"] = a.str();
    r.doc["nu"] = b.str();
    const auto fa = factorize_weight(*s.group(), a, s.level());
    const auto fb = factorize_weight(*s.group(), b, s.level());
    if (fa.lambda_minus != fb.lambda_minus) {
      r.doc["linked"] = false;
      r.doc["value"] = 0;
      return r;
    }
    ctx.emplace(s.block(fa.lambda_minus));
    ctx->require_regular("extn");
    x = *ctx->element_of(a);
    y = *ctx->element_of(b);
  }
  r.doc["x"] = x;
  r.doc["y"] = y;
  if (o.costandard) {
    r.doc["value"] = big(extn_simple_costandard(*ctx, x, y, n));
    r.doc["series"] = coeffs(ext_costandard_series(*ctx, x, y));
  } else {
    r.doc["value"] = big(extn_simple_simple(*ctx, x, y, n));
  }
  return r;
}

Report cmd_extsum(Session& s) {
  const auto& o = s.options();
  s.warn_level();
  auto ctx = s.block();
  const auto n = o.ns.front();
  Report r;
  r.table = "sums";
  r.doc["system"] = system_json(s.roots());
  r.doc["level"] = ctx.level();
  r.doc["cutoff"] = ctx.slice().cutoff();
  r.doc["n"] = n;
  Json rows = Json::array();
  for (auto x : ctx.dominant_elements()) {
    if (o.x >= 0 && static_cast<std::size_t>(o.x) != x) continue;
    auto v = sum_ext_n(ctx, x, n);
    rows.push_back(Json{{"x", x},
                        {"length", ctx.slice().length(x)},
                        {"weight", ctx.weight(x).str()},
                        {"value", big(v.value)},
                        {"window", v.window},
                        {"missing", v.missing},
                        {"label", label(v.saturated, ctx.slice().cutoff())}});
  }
  if (o.x >= 0 && rows.empty()) throw InvalidArgument("--x must be a dominant element of the slice");
  r.doc["sums"] = rows;
  return r;
}

Report cmd_pim(Session& s) {
  const auto& rs = s.roots();
  const auto& o = s.options();
  s.warn_level();
  const auto l = s.level();
  auto t = s.table();
  std::vector<Weight> targets;
  if (!o.weight.empty()) {
    targets.push_back(s.parse_weight(o.weight, "--weight"));
  } else {
    // every restricted weight that is regular, plus the Steinberg weight
    std::vector<std::int64_t> c(static_cast<std::size_t>(rs.rank), 0);
    for (;;) {
      Weight w(c);
      auto f = factorize_weight(*s.group(), w, l);
      if (f.regular || w == (l - 1) * rs.rho) targets.push_back(w);
      std::size_t i = 0;
      for (; i < c.size(); ++i) {
        if (++c[i] < l) break;
        c[i] = 0;
      }
      if (i == c.size()) break;
    }
  }
  Report r;
  r.table = "pims";
  r.doc["system"] = system_json(rs);
  r.doc["level"] = l;
  r.doc["cutoff"] = t->slice().cutoff();
  Json rows = Json::array();
  for (const auto& w : targets) {
    auto p = pim_length(*t, w, l);
    std::string sections;
    Json mult = Json::array();
    for (const auto& [nu, c] : p.delta_multiplicities) {
      mult.push_back(Json{{"weight", nu.str()}, {"multiplicity", big(c)}});
      if (!sections.empty()) sections += " ";
      sections += nu.str() + (c == 1 ? "" : "x" + c.str());
    }
    rows.push_back(Json{{"lambda0", w.str()},
                        {"top", p.top.str()},
                        {"total_length", big(p.total_length)},
                        {"highest_weight_check", p.highest_weight_check},
                        {"singleton_block", p.singleton_block},
                        {"standard_sections", sections},
                        {"delta_multiplicities", mult}});
  }
  r.doc["pims"] = rows;
  return r;
}

Report cmd_bounds(Session& s, bool with_table) {
  const auto& rs = s.roots();
  const auto& o = s.options();
  BoundOptions opt;
  opt.p = o.p;
  opt.ns = o.ns;
  opt.ms = o.ms;
  opt.workers = o.workers;
  opt.level = o.l;
  std::shared_ptr<const KLTable> t;
  if (with_table) {
    t = s.table();
    opt.table = t.get();
  }
  auto reports = bound_constants(rs, opt);
  Report r;
  r.table = "reports";
  r.doc["system"] = system_json(rs);
  r.doc["p"] = o.p;
  r.doc["E_interpretation"] = "h^|Phi| * P((2h-2) rho)";
  bool ok = true;
  Json rows = Json::array();
  for (const auto& b : reports) {
    Json j{{"name", b.name}};
    j["parameter"] = b.parameter ? Json(*b.parameter) : Json(nullptr);
    j["formula_value"] = b.formula_value ? big(*b.formula_value) : Json(nullptr);
    j["empirical_value"] = b.empirical_value ? big(*b.empirical_value) : Json(nullptr);
    j["consistent"] = b.consistent();
    j["label"] = b.empirical_value ? label(false, t ? t->slice().cutoff() : 0) : "exact";
    j["provenance"] = b.provenance;
    ok = ok && b.consistent();
    rows.push_back(j);
  }
  r.doc["consistent"] = ok;
  r.doc["reports"] = rows;
  return r;
}

Report cmd_isogeny(Session& s) {
  const auto& rs = s.roots();
  if (rs.type != 'C') throw InvalidArgument("isogeny-map needs a type C system");
  const auto lambda = s.parse_weight(s.options().weight, "--weight");
  Report r;
  r.doc["system"] = system_json(rs);
  r.doc["target"] = Json{{"type", "B"}, {"rank", rs.rank}};
  r.doc["weight"] = lambda.str();
  r.doc["image"] = special_isogeny_image(rs, lambda).str();
  return r;
}

Report cmd_generic_shift(Session& s) {
  const auto& rs = s.roots();
  const auto& o = s.options();
  const std::int64_t c = *std::max_element(rs.alpha_max().begin(), rs.alpha_max().end());
  Report r;
  r.table = "values";
  r.doc["system"] = system_json(rs);
  r.doc["p"] = o.p;
  r.doc["c"] = c;
  r.doc["t"] = rs.torsion_exponent;
  Json rows = Json::array();
  for (auto n : o.ns)
    rows.push_back(Json{{"n", n},
                        {"e", largest_integer_e(c * rs.torsion_exponent * n, o.p)},
                        {"f", generic_shift(rs, o.p, n)}});
  r.doc["values"] = rows;
  return r;
}

// ---------------------------------------------------------------------------
// verify

struct Suite {
  std::string name;
  bool passed = true;
  bool skipped = false;
  std::size_t checked = 0;
  std::string detail;
  void fail(const std::string& why) {
    if (passed) detail = why;
    passed = false;
  }
};

Report cmd_verify(Session& s, int& exit_code) {
  const auto& o = s.options();
  auto t = s.table();
  const auto& sl = t->slice();
  const auto& rs = s.roots();
  std::vector<Suite> suites;

  {
    Suite su;
    su.name = "kl_axioms";
    for (std::size_t y = 0; y < sl.size(); ++y)
      for (const auto& e : t->row(y)) {
        ++su.checked;
        const auto d = static_cast<std::int64_t>(sl.length(y)) - static_cast<std::int64_t>(sl.length(e.x));
        if (!sl.bruhat_leq(e.x, y)) su.fail("entry outside the Bruhat interval");
        if (e.x == y && !(e.p == IntPolynomial::one())) su.fail("P_{x,x} != 1");
        if (e.x != y && 2 * e.p.degree() > d - 1) su.fail("degree bound violated");
        if (e.p.coefficient(0) != 1) su.fail("constant term != 1");
        if (!e.p.nonnegative()) su.fail("negative coefficient");
      }
    // support: every x <= y carries an entry
    for (std::size_t y = 0; y < sl.size(); ++y)
      if (sl.below(y).size() != t->row(y).size()) su.fail("row does not cover the Bruhat interval");
    suites.push_back(su);
  }
  {
    Suite su;
    su.name = "mu_parity_symmetry";
    for (std::size_t y = 0; y < sl.size(); ++y)
      for (const auto& e : t->mu_row(y)) {
        ++su.checked;
        if ((sl.length(y) + sl.length(e.z)) % 2 == 0) su.fail("mu nonzero for equal parity");
        if (t->mu(e.z, y) != t->mu(y, e.z)) su.fail("mu not symmetric");
      }
    suites.push_back(su);
  }
  {
    Suite su;
    su.name = "descent_independence";
    std::mt19937_64 rng(o.seed);
    std::vector<std::size_t> candidates;
    for (std::size_t y = 0; y < sl.size(); ++y)
      if (sl.length(y) >= 2) candidates.push_back(y);
    for (std::size_t k = 0; k < o.samples && !candidates.empty(); ++k) {
      const auto y = candidates[rng() % candidates.size()];
      const auto& row = t->row(y);
      const auto& e = row[rng() % row.size()];
      const Side side = rng() % 2 ? Side::right : Side::left;
      auto ds = t->descents(y, side);
      const int s_ = ds[rng() % ds.size()];
      ++su.checked;
      if (!(t->recompute_entry(e.x, y, side, s_) == e.p)) su.fail("recomputation with another descent differs");
    }
    suites.push_back(su);
  }
  {
    Suite su;
    su.name = "parallel_fill";
    KLTable par(t->slice_ptr());
    par.fill_parallel(std::max(o.workers, 4));
    for (std::size_t y = 0; y < sl.size(); ++y) {
      ++su.checked;
      const auto& a = t->row(y);
      const auto& b = par.row(y);
      if (a.size() != b.size()) {
        su.fail("row sizes differ");
        continue;
      }
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].x != b[i].x || !(a[i].p == b[i].p)) su.fail("parallel fill differs from serial");
    }
    suites.push_back(su);
  }
  if (sl.affine()) {
    BlockContext ctx = s.block();
    {
      Suite su;
    su.name = "ext1_equals_mu";
      for (auto x : ctx.dominant_elements())
        for (auto y : ctx.dominant_elements()) {
          ++su.checked;
          if (extn_simple_simple(ctx, x, y, 1) != t->mu(x, y)) su.fail("Ext^1 from the costandard sum differs from mu");
          if (extn_simple_simple(ctx, x, y, 0) != (x == y ? 1 : 0)) su.fail("Ext^0 is not the Kronecker delta");
        }
      suites.push_back(su);
    }
    {
      Suite su;
    su.name = "kl_sum_dual_path";
      for (auto y : ctx.dominant_elements())
        for (std::int64_t m = 0; m <= 2; ++m) {
          ++su.checked;
          if (kl_coefficient_sum(*t, y, m) != costandard_ext_sum(ctx, y, m)) su.fail("the two sums differ");
        }
      suites.push_back(su);
    }
    {
      Suite su;
    su.name = "decomposition_inverse";
      try {
        auto m = decomposition_matrix(*t, ctx.lambda_minus(), ctx.level(), (2 * (ctx.level() - 1)) * rs.rho);
        su.checked = m.size();
        auto chk = check_decomposition(rs, m);
        if (!chk.ok()) su.fail(chk.problems.empty() ? "check failed" : chk.problems.front());
      } catch (const CoverageError& e) {
        su.skipped = true;
        su.detail = e.what();
      }
      suites.push_back(su);
    }
    {
      Suite su;
    su.name = "bounds_consistency";
      BoundOptions opt;
      opt.table = t.get();
      opt.workers = o.workers;
      opt.p = 2;
      for (const auto& b : bound_constants(rs, opt)) {
        ++su.checked;
        if (!b.consistent()) su.fail(b.name + " empirical value exceeds the formula value");
      }
      suites.push_back(su);
    }
  }
  {
    Suite su;
    su.name = "weyl_dimension";
    // dominant weights with coordinates <= 2
    std::vector<std::int64_t> c(static_cast<std::size_t>(rs.rank), 0);
    for (std::size_t i = 0; i < c.size();) {
      Weight w(c);
      ++su.checked;
      if (weyl_character(rs, w).dimension(rs) != weyl_dimension(rs, w)) su.fail("Freudenthal dimension differs");
      for (i = 0; i < c.size(); ++i) {
        if (++c[i] <= 2) break;
        c[i] = 0;
      }
    }
    suites.push_back(su);
  }

  Report r;
  r.table = "suites";
  r.doc["system"] = system_json(rs);
  r.doc["affine"] = sl.affine();
  r.doc["cutoff"] = sl.cutoff();
  bool ok = true;
  Json rows = Json::array();
  for (const auto& su : suites) {
    ok = ok && su.passed;
    rows.push_back(Json{{"suite", su.name},
                        {"status", su.skipped ? "skipped" : (su.passed ? "pass" : "FAIL")},
                        {"checked", su.checked},
                        {"detail", su.detail}});
  }
  r.doc["passed"] = ok;
  r.doc["suites"] = rows;
  if (!ok) exit_code = kVerifyFailed;
  return r;
}

// ---------------------------------------------------------------------------
// Configuration file: keys mirror the long flag names; flags win.

void apply_config(const std::string& path, CLI::App* sub, Options& o) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const std::exception& e) {
    throw InvalidArgument("config file " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw InvalidArgument("config file " + path + " must hold a JSON object");
  // job-file spellings of the flag keys
  Json flat = Json::object();
  for (const auto& [key, value] : cfg.items()) {
    if (key == "system") {
      if (!value.is_object()) throw InvalidArgument("config file " + path + ": \"system\" must be {type, rank}");
      for (const auto& [k, v] : value.items()) {
        if (k != "type" && k != "rank") throw InvalidArgument("config file " + path + ": unknown key \"system." + k + "\"");
        flat[k] = v;
      }
    } else if (key == "l_or_p") {
      flat["l"] = value;
      flat["p"] = value;
    } else if (key == "commands") {
      if (!value.is_array()) throw InvalidArgument("config file " + path + ": \"commands\" must be a list");
      bool listed = false;
      for (const auto& c : value) listed = listed || (c.is_string() && c.get<std::string>() == sub->get_name());
      if (!listed) throw InvalidArgument("config file " + path + " does not list the command " + sub->get_name());
    } else {
      static const std::map<std::string, std::string> alias{
          {"length_cutoff", "cutoff"}, {"weight_cutoff", "top"}, {"output", "format"}, {"worker_count", "workers"}};
      auto a = alias.find(key);
      flat[a == alias.end() ? key : a->second] = value;
    }
  }
  cfg = std::move(flat);
  auto given = [&](const std::string& flag) {
    try {
      return sub->count(flag) > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  using Setter = std::function<void(const Json&)>;
  auto list = [](std::vector<std::int64_t>& v) {
    return [&v](const Json& j) { v = j.is_array() ? j.get<std::vector<std::int64_t>>() : std::vector<std::int64_t>{j.get<std::int64_t>()}; };
  };
  auto weight = [](std::string& v) {
    return [&v](const Json& j) {
      if (j.is_array()) {
        std::string s;
        for (const auto& c : j) s += (s.empty() ? "" : ",") + std::to_string(c.get<std::int64_t>());
        v = s;
      } else {
        v = j.get<std::string>();
      }
    };
  };
  const std::vector<std::tuple<std::string, std::string, Setter>> keys{
      {"type", "--type", [&](const Json& j) { o.type = j.get<std::string>(); }},
      {"rank", "--rank", [&](const Json& j) { o.rank = j.get<int>(); }},
      {"l", "--l", [&](const Json& j) { o.l = j.get<std::int64_t>(); }},
      {"p", "--p", [&](const Json& j) { o.p = j.get<std::int64_t>(); }},
      {"cutoff", "--cutoff", [&](const Json& j) { o.cutoff = j.get<std::uint32_t>(); }},
      {"workers", "--workers", [&](const Json& j) { o.workers = j.get<int>(); }},
      {"format", "--format", [&](const Json& j) { o.format = j.get<std::string>(); }},
      {"cache_dir", "--cache-dir", [&](const Json& j) { o.cache_dir = j.get<std::string>(); }},
      {"max_elements", "--max-elements", [&](const Json& j) { o.max_elements = j.get<std::size_t>(); }},
      {"finite", "--finite", [&](const Json& j) { o.finite = j.get<bool>(); }},
      {"n", "--n", list(o.ns)},
      {"m", "--m", list(o.ms)},
      {"weight", "--weight", weight(o.weight)},
      {"weight2", "--weight2", weight(o.weight2)},
      {"lambda_minus", "--lambda-minus", weight(o.lambda_minus)},
      {"top", "--top", weight(o.top)},
      {"x", "--x", [&](const Json& j) { o.x = j.get<std::int64_t>(); }},
      {"y", "--y", [&](const Json& j) { o.y = j.get<std::int64_t>(); }},
      {"seed", "--seed", [&](const Json& j) { o.seed = j.get<std::uint64_t>(); }},
      {"samples", "--samples", [&](const Json& j) { o.samples = j.get<std::size_t>(); }},
  };
  for (const auto& [key, value] : cfg.items()) {
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return std::get<0>(k) == key; });
    if (it == keys.end()) throw InvalidArgument("config file " + path + ": unknown key \"" + key + "\"");
    if (given(std::get<1>(*it))) continue;
    try {
      std::get<2>(*it)(value);
      o.from_config.push_back(key);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("config file " + path + ": bad value for \"" + key + "\"");
    }
  }
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("system", o.system, "root system, e.g. `A 2` or `A2`")->expected(0, 2);
  sub->add_option("--type", o.type, "root system type letter");
  sub->add_option("--rank", o.rank, "rank");
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text", "csv"}));
  sub->add_option("--config", o.config, "JSON configuration file; flags override its keys");
  sub->add_option("--cache-dir", o.cache_dir, "cache directory (default: $KLEXT_CACHE_DIR)");
  sub->add_flag("--no-cache", o.no_cache, "ignore the cache directory");
  sub->add_flag("--verbose", o.verbose, "report cache activity on stderr");
}

void add_slice(CLI::App* sub, Options& o) {
  sub->add_option("--cutoff", o.cutoff, "length cutoff of the group slice");
  sub->add_option("--workers", o.workers, "OpenMP workers for the table fill (0: all)");
  sub->add_option("--max-elements", o.max_elements, "resource cap on the slice size");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Kazhdan-Lusztig polynomials, characters and Ext bounds for affine Weyl groups", "klext"};
  app.require_subcommand(1);
  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, o);
    subs[name] = s;
    return s;
  };
  auto weights = [&](CLI::App* s, bool two) {
    s->add_option("--weight", o.weight, "weight in fundamental coordinates, e.g. 1,0");
    if (two) s->add_option("--weight2", o.weight2, "second weight");
  };
  auto level = [&](CLI::App* s) { s->add_option("--l", o.l, "level l (default: smallest admissible l > h)"); };
  auto indices = [&](CLI::App* s) {
    s->add_option("--x", o.x, "slice index of x");
    s->add_option("--y", o.y, "slice index of y");
  };

  sub("info", "root system data");
  add_slice(sub("enumerate", "elements of a group slice"), o);
  subs["enumerate"]->add_flag("--finite", o.finite, "finite Weyl group instead of the affine one");
  for (const char* name : {"kl", "mu"}) {
    auto* s = sub(name, std::string(name) == "kl" ? "KL polynomials P_{x,y}" : "nonzero mu(x,y)");
    add_slice(s, o);
    indices(s);
    s->add_flag("--finite", o.finite, "finite Weyl group instead of the affine one");
    s->add_flag("--dominant-only", o.dominant_only, "restrict to dominant elements");
  }
  {
    auto* s = sub("mu-sum", "sum over dominant y of mu(x,y), with saturation labels");
    add_slice(s, o);
    s->add_option("--x", o.x, "only this dominant element");
  }
  {
    auto* s = sub("klsum", "sum over dominant x <= y of c_{x,y}^[l(y)-l(x)-m]");
    add_slice(s, o);
    s->add_option("--m", o.ms, "m (repeatable)")->delimiter(',');
    s->add_option("--y", o.y, "only this dominant element");
  }
  {
    auto* s = sub("char", "Weyl character");
    weights(s, false);
    s->add_flag("--expand", o.expand, "list every weight, not only dominant ones");
  }
  {
    auto* s = sub("chikl", "Kazhdan-Lusztig character chi_KL");
    add_slice(s, o);
    weights(s, false);
    level(s);
  }
  {
    auto* s = sub("decomp", "decomposition matrix of a truncated block");
    add_slice(s, o);
    level(s);
    s->add_option("--lambda-minus", o.lambda_minus, "block representative (default: -2 rho)");
    s->add_option("--top", o.top, "weight ideal bound (default: 2(l-1) rho)");
  }
  {
    auto* s = sub("tensor", "tensor product decomposition over C");
    weights(s, true);
    s->add_option("--workers", o.workers, "OpenMP workers");
  }
  for (const char* name : {"ext1", "extn"}) {
    auto* s = sub(name, std::string(name) == "ext1" ? "dim Ext^1 between simple modules" : "dim Ext^n");
    add_slice(s, o);
    weights(s, true);
    indices(s);
    level(s);
    if (std::string(name) == "extn") {
      s->add_option("--n", o.ns, "degree n")->delimiter(',');
      s->add_flag("--costandard", o.costandard, "Ext^n(L(x), nabla(y)) instead of Ext^n(L(x), L(y))");
    }
  }
  {
    auto* s = sub("extsum", "sum over y of dim Ext^n(L(x), L(y)), with saturation labels");
    add_slice(s, o);
    level(s);
    s->add_option("--n", o.ns, "degree n")->delimiter(',');
    s->add_option("--x", o.x, "only this dominant element");
  }
  {
    auto* s = sub("pim", "standard sections and length of projective covers");
    add_slice(s, o);
    level(s);
    weights(s, false);
  }
  {
    auto* s = sub("bounds", "explicit constants, with empirical values when --cutoff is given");
    add_slice(s, o);
    level(s);
    s->add_option("--p", o.p, "p (or l) for the bound B_p and for f");
    s->add_option("--n", o.ns, "n for f and C' (repeatable)")->delimiter(',');
    s->add_option("--m", o.ms, "m for d and C'' (repeatable)")->delimiter(',');
  }
  weights(sub("isogeny-map", "weight map of the special isogeny C_r -> B_r in characteristic 2"), false);
  {
    auto* s = sub("generic-shift", "f(Phi, n) = e(c t(Phi) n) + 1");
    s->add_option("--p", o.p, "p");
    s->add_option("--n", o.ns, "n (repeatable)")->delimiter(',');
  }
  {
    auto* s = sub("verify", "run the invariant suites on a slice");
    add_slice(s, o);
    level(s);
    s->add_flag("--finite", o.finite, "finite Weyl group instead of the affine one");
    s->add_option("--seed", o.seed, "seed for the randomized recomputations");
    s->add_option("--samples", o.samples, "number of randomized recomputations");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    // help on a subcommand and the like
    if (e.get_exit_code() == 0) {
      for (auto* s : app.get_subcommands()) out << s->help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();
  try {
    if (!o.config.empty()) apply_config(o.config, active, o);
    if (o.format != "json" && o.format != "text" && o.format != "csv")
      throw InvalidArgument("unknown format " + o.format);
    if (o.workers < 0) throw InvalidArgument("--workers must be >= 0");
    if (o.max_elements == 0) throw InvalidArgument("--max-elements must be positive");
    for (auto n : o.ns)
      if (n < 0) throw InvalidArgument("--n must be >= 0");
    for (auto m : o.ms)
      if (m < 0) throw InvalidArgument("--m must be >= 0");
    Session s(o, err);
    int code = kOk;
    Report r;
    if (name == "info") r = cmd_info(s);
    else if (name == "enumerate") r = cmd_enumerate(s);
    else if (name == "kl") r = cmd_kl(s);
    else if (name == "mu") r = cmd_mu(s);
    else if (name == "mu-sum") r = cmd_mu_sum(s);
    else if (name == "klsum") r = cmd_klsum(s);
    else if (name == "char") r = cmd_char(s);
    else if (name == "chikl") r = cmd_chikl(s);
    else if (name == "decomp") r = cmd_decomp(s);
    else if (name == "tensor") r = cmd_tensor(s);
    else if (name == "ext1") r = cmd_ext1(s);
    else if (name == "extn") r = cmd_extn(s);
    else if (name == "extsum") r = cmd_extsum(s);
    else if (name == "pim") r = cmd_pim(s);
    else if (name == "bounds") r = cmd_bounds(s, active->count("--cutoff") > 0 || std::count(o.from_config.begin(), o.from_config.end(), "cutoff"));
    else if (name == "isogeny-map") r = cmd_isogeny(s);
    else if (name == "generic-shift") r = cmd_generic_shift(s);
    else if (name == "verify") r = cmd_verify(s, code);
    write(r, o.format, out);
    return code;
  } catch (const ResourceLimit& e) {
    err << "error: " << e.what() << "\n";
    return kResource;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const CoverageError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid number: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::out_of_range& e) {
    err << "error: number out of range: " << e.what() << "\n";
    return kInvalid;
  }
}

}  // namespace klext::cli
