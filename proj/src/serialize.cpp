#include "macc/serialize.hpp"

#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

#include "macc/errors.hpp"

namespace macc {

namespace {

void write_star_rows(std::ostream& out, const StarArray& a) {
  for (std::uint64_t row = 0; row < a.rows(); ++row) {
    for (int col = 1; col <= a.cols(); ++col) {
      if (col > 1) out << ' ';
      out << (a.star(row, col) ? '*' : '.');
    }
    out << '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of input");
    ++number_;
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument("line " + std::to_string(number_) + ": " + what);
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

std::vector<std::string> split_entries(const std::string& line, int expected, const LineReader& reader) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto space = line.find(' ', start);
    out.push_back(line.substr(start, space - start));
    if (out.back().empty()) reader.fail("empty entry (entries are separated by single spaces)");
    if (space == std::string::npos) break;
    start = space + 1;
  }
  if (static_cast<int>(out.size()) != expected)
    reader.fail("expected " + std::to_string(expected) + " entries, found " + std::to_string(out.size()));
  return out;
}

void read_star_rows(LineReader& reader, StarArray& a, char name) {
  if (reader.next() != std::string(1, name)) reader.fail(std::string("expected section '") + name + "'");
  for (std::uint64_t row = 0; row < a.rows(); ++row) {
    const auto entries = split_entries(reader.next(), a.cols(), reader);
    for (int col = 1; col <= a.cols(); ++col) {
      const auto& e = entries[static_cast<std::size_t>(col - 1)];
      if (e == "*") a.set(row, col, true);
      else if (e == ".") a.set(row, col, false);
      else reader.fail("entry '" + e + "' is neither '*' nor '.'");
    }
  }
}

}  // namespace

std::string header_line(const LevelParams& p) {
  std::ostringstream out;
  out << "K'=" << p.k_prime() << " t=" << p.t() << " L=" << p.level() << " K=" << p.k() << " F=" << p.f() << " S=" << p.s();
  return out.str();
}

void write_arrays(std::ostream& out, const SchemeArrays& a) {
  out << header_line(a.params) << '\n';
  out << "C\n";
  write_star_rows(out, a.node_placement);
  out << "U\n";
  write_star_rows(out, a.user_retrieve);
  out << "Q\n";
  for (std::uint64_t row = 0; row < a.delivery.rows(); ++row) {
    for (int col = 1; col <= a.delivery.cols(); ++col) {
      if (col > 1) out << ' ';
      const auto v = a.delivery.at(row, col);
      if (v == DeliveryArray::kStar) out << '*';
      else out << format_label(a.label_tee(v), a.label_g(v));
    }
    out << '\n';
  }
}

std::string write_arrays(const SchemeArrays& arrays) {
  std::ostringstream out;
  write_arrays(out, arrays);
  return out.str();
}

SchemeArrays read_arrays(std::istream& in) {
  LineReader reader(in);
  static const std::regex header_re(R"(K'=(\d+) t=(\d+) L=(\d+) K=(\d+) F=(\d+) S=(\d+))");
  static const std::regex label_re(R"(\(\{(\d+(?:,\d+)*)\},(\d+)\))");
  std::smatch m;
  const std::string header = reader.next();
  if (!std::regex_match(header, m, header_re)) reader.fail("malformed header '" + header + "'");
  auto to_int = [&](const std::string& s) {
    try {
      return std::stoi(s);
    } catch (const std::exception&) {
      reader.fail("number '" + s + "' out of range");
    }
  };
  const LevelParams p(to_int(m[1]), to_int(m[2]), to_int(m[3]));
  if (std::to_string(p.k()) != m[4].str() || std::to_string(p.f()) != m[5].str() || std::to_string(p.s()) != m[6].str())
    reader.fail("header K/F/S inconsistent with K'=" + m[1].str() + " t=" + m[2].str() + " L=" + m[3].str() + " (expected " + header_line(p) + ")");
  if (p.f() * static_cast<std::uint64_t>(p.k()) > max_dense_cells()) throw ResourceLimit("array in input exceeds the dense-storage limit");

  const int k = p.k();
  SchemeArrays a{p, SubsetTable(p.k_prime(), p.t()), SubsetTable(p.k_prime(), p.t() + 1),
                 StarArray(p.f(), k), StarArray(p.f(), k), DeliveryArray(p.f(), k)};
  read_star_rows(reader, a.node_placement, 'C');
  read_star_rows(reader, a.user_retrieve, 'U');
  if (reader.next() != "Q") reader.fail("expected section 'Q'");
  for (std::uint64_t row = 0; row < p.f(); ++row) {
    const auto entries = split_entries(reader.next(), k, reader);
    for (int col = 1; col <= k; ++col) {
      const auto& e = entries[static_cast<std::size_t>(col - 1)];
      if (e == "*") continue;
      if (!std::regex_match(e, m, label_re)) reader.fail("malformed label '" + e + "'");
      MessageLabel label;
      std::istringstream items(m[1].str());
      for (std::string item; std::getline(items, item, ',');) label.tee_plus.push_back(to_int(item));
      label.g = to_int(m[2]);
      try {
        a.delivery.set(row, col, message_id(label, p));
      } catch (const InvalidArgument& err) {
        reader.fail(err.what());
      }
    }
  }
  std::string rest;
  while (std::getline(in, rest))
    if (!rest.empty()) reader.fail("trailing content after the Q section");
  return a;
}

SchemeArrays read_arrays(const std::string& text) {
  std::istringstream in(text);
  return read_arrays(in);
}

}  // namespace macc
