#include "klext/weight.hpp"

#include "klext/error.hpp"

#include <cctype>
#include <sstream>

namespace klext {

std::string Weight::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c_[i]);
  }
  return out + ")";
}

Weight Weight::parse(const std::string& text) {
  std::vector<std::int64_t> v;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    try {
      std::size_t used = 0;
      v.push_back(std::stoll(cur, &used));
      if (used != cur.size()) throw InvalidArgument("bad weight coordinate '" + cur + "'");
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad weight coordinate '" + cur + "'");
    }
    cur.clear();
  };
  for (char ch : text) {
    if (ch == '(' || ch == ')' || ch == '[' || ch == ']') continue;
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
      continue;
    }
    cur += ch;
  }
  flush();
  if (v.empty()) throw InvalidArgument("empty weight '" + text + "'");
  return Weight(std::move(v));
}

}  // namespace klext
