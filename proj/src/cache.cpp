#include "klext/cache.hpp"

#include "klext/error.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>

namespace klext {

namespace {

constexpr char kSliceMagic[8] = {'K', 'L', 'X', 'S', 'L', 'I', 'C', 'E'};
constexpr char kTableMagic[8] = {'K', 'L', 'X', 'T', 'A', 'B', 'L', 'E'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  template <class T>
  void put(T v) {
    unsigned char b[sizeof(T)];
    auto u = static_cast<std::make_unsigned_t<T>>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xffu);
    bytes(b, sizeof(T));
  }
  void big(const BigInt& v) {
    put<std::uint8_t>(v < 0 ? 1 : 0);
    std::vector<unsigned char> mag;
    export_bits(v < 0 ? BigInt(-v) : v, std::back_inserter(mag), 8);
    put<std::uint32_t>(static_cast<std::uint32_t>(mag.size()));
    bytes(mag.data(), mag.size());
  }
  void finish_and_write(const std::filesystem::path& path) {
    put<std::uint64_t>(fnv1a(buf_.data(), buf_.size()));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw CacheError("cannot write cache file " + tmp.string());
      out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
      if (!out) throw CacheError("short write on " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot open cache file " + path_);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (buf_.size() < 8 + sizeof(std::uint64_t)) throw CacheError("cache file " + path_ + " is truncated");
    const std::size_t body = buf_.size() - sizeof(std::uint64_t);
    std::uint64_t stored = 0;
    for (std::size_t i = 0; i < 8; ++i) stored |= std::uint64_t(static_cast<unsigned char>(buf_[body + i])) << (8 * i);
    if (stored != fnv1a(buf_.data(), body)) throw CacheError("checksum mismatch in cache file " + path_);
    end_ = body;
  }
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw CacheError("cache file " + path_ + " ends early");
  }
  template <class T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  BigInt big() {
    const bool neg = get<std::uint8_t>() != 0;
    const auto n = get<std::uint32_t>();
    need(n);
    BigInt v;
    import_bits(v, buf_.begin() + static_cast<std::ptrdiff_t>(pos_), buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n), 8);
    pos_ += n;
    return neg ? BigInt(-v) : v;
  }
  void magic(const char (&m)[8]) {
    need(8);
    if (std::memcmp(buf_.data() + pos_, m, 8) != 0) throw CacheError("cache file " + path_ + " has the wrong magic");
    pos_ += 8;
  }
  bool at_end() const { return pos_ == end_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

struct Header {
  char type;
  std::uint32_t rank;
  bool affine;
  std::uint32_t cutoff;
  std::uint64_t count;
};

void write_header(Writer& w, const char (&m)[8], const Header& h) {
  w.bytes(m, 8);
  w.put<std::uint32_t>(kCacheFormatVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(h.type));
  w.put<std::uint32_t>(h.rank);
  w.put<std::uint8_t>(h.affine ? 1 : 0);
  w.put<std::uint32_t>(h.cutoff);
  w.put<std::uint64_t>(h.count);
}

Header read_header(Reader& r, const char (&m)[8], const RootSystem& rs, bool affine, std::uint32_t cutoff) {
  r.magic(m);
  const auto version = r.get<std::uint32_t>();
  if (version != kCacheFormatVersion)
    throw CacheError("cache file " + r.path() + " has format version " + std::to_string(version) + ", expected " +
                     std::to_string(kCacheFormatVersion));
  Header h;
  h.type = static_cast<char>(r.get<std::uint8_t>());
  h.rank = r.get<std::uint32_t>();
  h.affine = r.get<std::uint8_t>() != 0;
  h.cutoff = r.get<std::uint32_t>();
  h.count = r.get<std::uint64_t>();
  if (h.type != rs.type || h.rank != static_cast<std::uint32_t>(rs.rank) || h.affine != affine)
    throw CacheError("cache file " + r.path() + " describes a different group");
  if (h.cutoff < cutoff) throw CacheError("cache file " + r.path() + " has a smaller cutoff than requested");
  return h;
}

std::string stem(const RootSystem& rs, bool affine, std::uint32_t cutoff) {
  return rs.label() + (affine ? "_aff" : "_fin") + "_L" + std::to_string(cutoff) + ".bin";
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string slice_file_name(const RootSystem& rs, bool affine, std::uint32_t cutoff) {
  return "slice_" + stem(rs, affine, cutoff);
}

std::string table_file_name(const RootSystem& rs, bool affine, std::uint32_t cutoff) {
  return "kl_" + stem(rs, affine, cutoff);
}

void save_slice(const GroupSlice& slice, const std::filesystem::path& path) {
  const auto& rs = slice.group().roots();
  Writer w;
  write_header(w, kSliceMagic, {rs.type, static_cast<std::uint32_t>(rs.rank), slice.affine(), slice.cutoff(), slice.size()});
  for (std::size_t i = 0; i < slice.size(); ++i) {
    const auto& g = slice.element(i);
    w.put<std::uint32_t>(g.w);
    for (auto v : g.mu.coords()) w.put<std::int64_t>(v);
    w.put<std::uint32_t>(slice.length(i));
  }
  w.finish_and_write(path);
}

std::shared_ptr<const GroupSlice> load_slice(const std::filesystem::path& path,
                                             std::shared_ptr<const AffineWeylGroup> group, bool affine,
                                             std::uint32_t cutoff) {
  const auto& rs = group->roots();
  Reader r(path);
  auto h = read_header(r, kSliceMagic, rs, affine, cutoff);
  std::vector<AffineElement> elems;
  std::vector<std::uint32_t> lengths;
  for (std::uint64_t i = 0; i < h.count; ++i) {
    AffineElement g;
    g.w = r.get<std::uint32_t>();
    if (g.w >= group->finite().order()) throw CacheError("cache file " + r.path() + " has a bad finite part");
    g.mu = Weight(static_cast<std::size_t>(rs.rank));
    for (int k = 0; k < rs.rank; ++k) g.mu[k] = r.get<std::int64_t>();
    const auto len = r.get<std::uint32_t>();
    if (len <= cutoff) {
      elems.push_back(std::move(g));
      lengths.push_back(len);
    }
  }
  if (!r.at_end()) throw CacheError("cache file " + r.path() + " has trailing data");
  std::shared_ptr<const GroupSlice> slice;
  try {
    slice = std::make_shared<const GroupSlice>(group, cutoff, affine, std::move(elems));
  } catch (const InvariantViolation& e) {
    throw CacheError("cache file " + r.path() + " is inconsistent: " + e.what());
  }
  for (std::size_t i = 0; i < slice->size(); ++i)
    if (slice->length(i) != lengths[i]) throw CacheError("cache file " + r.path() + " stores a wrong length");
  return slice;
}

void save_table(const KLTable& table, const std::filesystem::path& path) {
  if (!table.complete()) throw InvalidArgument("save_table: table is not filled");
  const auto& sl = table.slice();
  const auto& rs = sl.group().roots();
  Writer w;
  write_header(w, kTableMagic, {rs.type, static_cast<std::uint32_t>(rs.rank), sl.affine(), sl.cutoff(), sl.size()});
  for (std::size_t y = 0; y < table.size(); ++y) {
    const auto& row = table.row(y);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(row.size()));
    for (const auto& e : row) {
      w.put<std::uint32_t>(e.x);
      w.put<std::uint32_t>(static_cast<std::uint32_t>(e.p.terms().size()));
      for (const auto& t : e.p.terms()) {
        w.put<std::uint32_t>(t.exp);
        w.big(t.coeff);
      }
    }
  }
  w.finish_and_write(path);
}

KLTable load_table(const std::filesystem::path& path, std::shared_ptr<const GroupSlice> slice) {
  const auto& rs = slice->group().roots();
  Reader r(path);
  auto h = read_header(r, kTableMagic, rs, slice->affine(), slice->cutoff());
  if (h.count < slice->size()) throw CacheError("cache file " + r.path() + " has too few rows");
  KLTable table(slice);
  for (std::uint64_t y = 0; y < slice->size(); ++y) {
    const auto n = r.get<std::uint32_t>();
    std::vector<KLTable::Entry> row;
    row.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      const auto x = r.get<std::uint32_t>();
      const auto nt = r.get<std::uint32_t>();
      std::vector<BigInt> dense;
      std::uint32_t last = 0;
      for (std::uint32_t t = 0; t < nt; ++t) {
        const auto e = r.get<std::uint32_t>();
        if (t > 0 && e <= last) throw CacheError("cache file " + r.path() + " has unsorted terms");
        last = e;
        if (e > 4096) throw CacheError("cache file " + r.path() + " has an implausible exponent");
        if (dense.size() <= e) dense.resize(e + 1);
        dense[e] = r.big();
      }
      if (x > y || (!row.empty() && x <= row.back().x) || !slice->bruhat_leq(x, y))
        throw CacheError("cache file " + r.path() + " has an entry outside the Bruhat interval");
      row.push_back({x, IntPolynomial::from_dense(dense)});
    }
    if (row.size() != slice->below(y).size()) throw CacheError("cache file " + r.path() + " has an incomplete row");
    table.set_row(y, std::move(row));
  }
  return table;
}

std::optional<std::filesystem::path> find_cached(const std::filesystem::path& dir, const std::string& prefix,
                                                 std::uint32_t cutoff) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return std::nullopt;
  const std::regex re(std::regex_replace(prefix, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") + R"((\d+)\.bin)");
  std::optional<std::filesystem::path> best;
  std::uint64_t best_cut = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, re)) continue;
    const auto c = std::stoull(m[1].str());
    if (c < cutoff) continue;
    if (!best || c < best_cut) {
      best = entry.path();
      best_cut = c;
    }
  }
  return best;
}

}  // namespace klext
