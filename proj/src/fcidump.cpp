#include "rbmci/fcidump.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>

#include "rbmci/errors.hpp"

namespace rbmci {

IntegralTable::IntegralTable(int n_orbitals, int n_electrons, int ms2)
    : n_orbitals_(n_orbitals), n_electrons_(n_electrons), ms2_(ms2) {
  if (n_orbitals < 1) throw domain_error("NORB must be at least 1");
  if (n_orbitals > 64) throw capacity_error("at most 64 spatial orbitals are supported");
  if (n_electrons <= 0 || n_electrons > 2 * n_orbitals)
    throw domain_error("NELEC must satisfy 0 < NELEC <= 2*NORB");
  if ((n_electrons + ms2) % 2 != 0 || std::abs(ms2) > n_electrons)
    throw domain_error("NELEC and MS2 are inconsistent");
  if (n_alpha() > n_orbitals || n_beta() > n_orbitals)
    throw domain_error("spin channel holds more electrons than orbitals");
  one_.assign(static_cast<std::size_t>(n_orbitals) * n_orbitals, 0.0);
}

void IntegralTable::check_index(int p) const {
  if (p < 1 || p > n_orbitals_)
    throw index_error("orbital index " + std::to_string(p) + " outside [1, " +
                      std::to_string(n_orbitals_) + "]");
}

double IntegralTable::one(int p, int q) const {
  check_index(p);
  check_index(q);
  return one_[static_cast<std::size_t>(p - 1) * n_orbitals_ + (q - 1)];
}

void IntegralTable::set_one(int p, int q, double value) {
  check_index(p);
  check_index(q);
  one_[static_cast<std::size_t>(p - 1) * n_orbitals_ + (q - 1)] = value;
  one_[static_cast<std::size_t>(q - 1) * n_orbitals_ + (p - 1)] = value;
}

std::uint64_t IntegralTable::canonical_key(int p, int q, int r, int s) noexcept {
  auto lo = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };
  auto first = lo(p, q);
  auto second = lo(r, s);
  if (second < first) std::swap(first, second);
  return (static_cast<std::uint64_t>(first.first) << 48) |
         (static_cast<std::uint64_t>(first.second) << 32) |
         (static_cast<std::uint64_t>(second.first) << 16) |
         static_cast<std::uint64_t>(second.second);
}

double IntegralTable::two_chem(int p, int q, int r, int s) const {
  check_index(p);
  check_index(q);
  check_index(r);
  check_index(s);
  auto it = two_.find(canonical_key(p, q, r, s));
  return it == two_.end() ? 0.0 : it->second;
}

void IntegralTable::set_two_chem(int p, int q, int r, int s, double value) {
  check_index(p);
  check_index(q);
  check_index(r);
  check_index(s);
  two_[canonical_key(p, q, r, s)] = value;
}

std::vector<std::pair<std::uint64_t, double>> IntegralTable::sorted_two() const {
  std::vector<std::pair<std::uint64_t, double>> out(two_.begin(), two_.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::optional<double> to_double(std::string token) {
  for (auto& c : token)
    if (c == 'd' || c == 'D') c = 'E';
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE) return std::nullopt;
  return v;
}

std::optional<long> to_long(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE) return std::nullopt;
  return v;
}

bool is_header_end(const std::string& line) {
  std::string u = upper(line);
  if (u.find("&END") != std::string::npos) return true;
  auto first = u.find_first_not_of(" \t\r");
  return first != std::string::npos && u[first] == '/';
}

}  // namespace

IntegralTable parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  bool header_closed = false;
  while (std::getline(in, line)) {
    ++line_no;
    const bool last = is_header_end(line);
    std::string chunk = line;
    if (last) {
      auto u = upper(chunk);
      auto pos = u.find("&END");
      chunk = pos != std::string::npos ? chunk.substr(0, pos) : std::string{};
    }
    header += chunk;
    header += ' ';
    if (last) {
      header_closed = true;
      break;
    }
  }
  if (!header_closed) throw parse_error("FCIDUMP header is not terminated by &END or /", line_no);

  // Tokenize: commas separate values, '=' starts a new key.
  std::string cleaned = header;
  {
    auto u = upper(cleaned);
    auto pos = u.find("&FCI");
    if (pos != std::string::npos) cleaned.erase(pos, 4);
  }
  for (auto& c : cleaned)
    if (c == ',') c = ' ';
  std::map<std::string, std::vector<std::string>> fields;
  std::string current;
  {
    std::istringstream ts(cleaned);
    std::string tok;
    while (ts >> tok) {
      auto eq = tok.find('=');
      if (eq != std::string::npos) {
        current = upper(tok.substr(0, eq));
        fields[current];
        std::string rest = tok.substr(eq + 1);
        if (!rest.empty()) fields[current].push_back(rest);
      } else if (!current.empty()) {
        fields[current].push_back(tok);
      } else {
        throw parse_error("unexpected token '" + tok + "' in FCIDUMP header", line_no);
      }
    }
  }
  auto scalar = [&](const std::string& key, std::optional<long> fallback) -> long {
    auto it = fields.find(key);
    if (it == fields.end() || it->second.empty()) {
      if (fallback) return *fallback;
      throw parse_error("FCIDUMP header is missing " + key, line_no);
    }
    auto v = to_long(it->second.front());
    if (!v) throw parse_error("FCIDUMP header field " + key + " is not an integer", line_no);
    return *v;
  };
  const long norb = scalar("NORB", std::nullopt);
  const long nelec = scalar("NELEC", std::nullopt);
  const long ms2 = scalar("MS2", 0);
  IntegralTable table = [&] {
    try {
      return IntegralTable(static_cast<int>(norb), static_cast<int>(nelec), static_cast<int>(ms2));
    } catch (const error& e) {
      throw parse_error(e.what(), line_no);
    }
  }();
  table.set_isym(static_cast<int>(scalar("ISYM", 1)));
  if (auto it = fields.find("ORBSYM"); it != fields.end()) {
    std::vector<int> sym;
    for (const auto& t : it->second) {
      auto v = to_long(t);
      if (!v) throw parse_error("ORBSYM entry '" + t + "' is not an integer", line_no);
      sym.push_back(static_cast<int>(*v));
    }
    table.set_orbsym(std::move(sym));
  }

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::array<std::string, 5> tok;
    std::size_t n = 0;
    std::string t;
    while (n < 5 && ls >> t) tok[n++] = t;
    if (n == 0) continue;
    if (n < 5) throw parse_error("integral line needs 5 fields", line_no);
    auto value = to_double(tok[0]);
    if (!value) throw parse_error("non-numeric integral value '" + tok[0] + "'", line_no);
    std::array<long, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      auto v = to_long(tok[k + 1]);
      if (!v) throw parse_error("non-integer orbital index '" + tok[k + 1] + "'", line_no);
      if (*v < 0 || *v > norb)
        throw index_error("line " + std::to_string(line_no) + ": orbital index " +
                          std::to_string(*v) + " outside [1, " + std::to_string(norb) + "]");
      idx[k] = *v;
    }
    const auto [i, j, k, l] = idx;
    if (i > 0 && j > 0 && k > 0 && l > 0) {
      table.set_two_chem(i, j, k, l, *value);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      table.set_one(i, j, *value);
    } else if (i == 0 && j == 0 && k == 0 && l == 0) {
      table.set_core_energy(*value);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      // orbital energy; not needed
    } else {
      throw parse_error("unrecognized integral index pattern", line_no);
    }
  }
  return table;
}

IntegralTable read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_error("cannot open FCIDUMP file '" + path + "'");
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const IntegralTable& table) {
  char buf[64];
  out << "&FCI NORB=" << table.n_orbitals() << ",NELEC=" << table.n_electrons()
      << ",MS2=" << table.ms2() << ",\n";
  if (!table.orbsym().empty()) {
    out << " ORBSYM=";
    for (int s : table.orbsym()) out << s << ',';
    out << '\n';
  }
  out << " ISYM=" << table.isym() << ",\n&END\n";
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ' ' << buf << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
  };
  table.for_each_two([&](int p, int q, int r, int s, double v) { emit(v, p, q, r, s); });
  for (int p = 1; p <= table.n_orbitals(); ++p)
    for (int q = 1; q <= p; ++q)
      if (table.one(p, q) != 0.0) emit(table.one(p, q), p, q, 0, 0);
  emit(table.core_energy(), 0, 0, 0, 0);
}

}  // namespace rbmci
