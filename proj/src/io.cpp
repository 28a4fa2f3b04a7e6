#include "netautocorr/io.hpp"

#include "netautocorr/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace netautocorr {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_skippable(const std::string& line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

bool parse_size(const std::string& s, std::size_t& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

std::string where(const std::string& origin, std::size_t line) {
    return origin + ":" + std::to_string(line);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json optional_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

} // namespace

std::vector<Edge> parse_edge_list(std::istream& in, const std::string& origin) {
    std::vector<Edge> edges;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (is_skippable(line)) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::string a, b, extra;
        fields >> a >> b;
        std::size_t i = 0;
        std::size_t j = 0;
        if (!parse_size(a, i) || !parse_size(b, j))
            throw IoError(where(origin, number) + ": expected two non-negative integer ids");
        if (fields >> extra) throw IoError(where(origin, number) + ": unexpected third field '" + extra + "'");
        edges.emplace_back(i, j);
    }
    return edges;
}

std::vector<Edge> read_edge_list(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_edge_list(in, path.string());
}

void write_edge_list(std::ostream& out, const WeightMatrix& w) {
    out << "# source target\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j : w.row_cols(i)) {
            if (i < j) out << i << ' ' << j << '\n';
        }
    }
}

AttributeTable AttributeTable::parse(std::istream& in, const std::string& origin) {
    AttributeTable t;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw IoError(origin + ": missing header row");
    t.header_ = split_csv(line);
    const auto id_it = std::find(t.header_.begin(), t.header_.end(), "id");
    if (id_it == t.header_.end()) throw IoError(origin + ": header has no 'id' column");
    const auto id_col = static_cast<std::size_t>(id_it - t.header_.begin());
    if (std::set<std::string>(t.header_.begin(), t.header_.end()).size() != t.header_.size())
        throw IoError(origin + ": duplicate column names in header");

    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != t.header_.size())
            throw IoError(where(origin, number) + ": expected " + std::to_string(t.header_.size()) + " fields, got " +
                          std::to_string(cells.size()));
        std::size_t id = 0;
        if (!parse_size(cells[id_col], id))
            throw IoError(where(origin, number) + ": id '" + cells[id_col] + "' is not a non-negative integer");
        rows.emplace_back(id, std::move(cells));
    }
    if (rows.empty()) throw IoError(origin + ": no data rows");

    t.rows_ = rows.size();
    t.cells_.assign(t.rows_, {});
    std::vector<char> seen(t.rows_, 0);
    for (auto& [id, cells] : rows) {
        if (id >= t.rows_)
            throw InvalidInput(origin + ": id " + std::to_string(id) + " out of range; ids must cover 0.." +
                               std::to_string(t.rows_ - 1));
        if (seen[id]) throw InvalidInput(origin + ": id " + std::to_string(id) + " appears more than once");
        seen[id] = 1;
        t.cells_[id] = std::move(cells);
    }
    return t;
}

AttributeTable AttributeTable::read(const std::filesystem::path& path) {
    auto in = open(path);
    return parse(in, path.string());
}

bool AttributeTable::has_column(const std::string& name) const {
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::vector<std::string> AttributeTable::column(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) throw InvalidInput("no column '" + name + "' in attribute table");
    const auto c = static_cast<std::size_t>(it - header_.begin());
    std::vector<std::string> out;
    out.reserve(rows_);
    for (const auto& row : cells_) out.push_back(row[c]);
    return out;
}

std::vector<double> AttributeTable::numeric(const std::string& name) const {
    const auto cells = column(name);
    std::vector<double> out(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!parse_double(cells[i], out[i]))
            throw InvalidInput("column '" + name + "', id " + std::to_string(i) + ": '" + cells[i] +
                               "' is not a finite number");
    }
    return out;
}

CoordinateSet parse_coordinates(std::istream& in, const std::string& origin) {
    const auto table = AttributeTable::parse(in, origin);
    std::vector<std::string> axes;
    for (const auto& c : table.columns()) {
        if (c != "id") axes.push_back(c);
    }
    if (axes.empty()) throw IoError(origin + ": no coordinate columns");
    std::vector<std::vector<double>> columns;
    for (const auto& a : axes) columns.push_back(table.numeric(a));
    std::vector<double> flat;
    flat.reserve(table.rows() * axes.size());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (const auto& col : columns) flat.push_back(col[i]);
    }
    return CoordinateSet(axes.size(), std::move(flat));
}

CoordinateSet read_coordinates(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_coordinates(in, path.string());
}

void write_coordinates(std::ostream& out, const CoordinateSet& coords) {
    static const char* names[] = {"x", "y", "z"};
    out << "id";
    for (std::size_t a = 0; a < coords.dim(); ++a) {
        out << ',';
        if (a < 3)
            out << names[a];
        else
            out << 'x' << a;
    }
    out << '\n';
    for (std::size_t i = 0; i < coords.size(); ++i) {
        out << i;
        for (double v : coords.point(i)) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_attribute(std::ostream& out, const std::string& name, const std::vector<double>& values) {
    out << "id," << name << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << format_double(values[i]) << '\n';
}

void write_attribute(std::ostream& out, const std::string& name, const std::vector<std::size_t>& values) {
    out << "id," << name << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
}

bool looks_integer(const std::vector<std::string>& cells) {
    for (const auto& c : cells) {
        long long v = 0;
        const char* begin = c.data();
        if (!c.empty() && *begin == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, c.data() + c.size(), v);
        if (c.empty() || ec != std::errc() || ptr != c.data() + c.size()) return false;
    }
    return true;
}

LabelCoding encode_labels(const std::vector<std::string>& labels) {
    LabelCoding coding;
    std::vector<std::string> distinct(labels.begin(), labels.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (looks_integer(distinct)) {
        std::stable_sort(distinct.begin(), distinct.end(),
                         [](const std::string& a, const std::string& b) { return std::stoll(a) < std::stoll(b); });
    }
    coding.names = distinct;
    std::map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < distinct.size(); ++c) index.emplace(distinct[c], c);
    coding.codes.reserve(labels.size());
    for (const auto& l : labels) coding.codes.push_back(index.at(l));
    return coding;
}

json to_json(const WeightSummary& s) {
    return {{"n", s.n}, {"s0", s.s0}, {"s1", s.s1}, {"s2", s.s2}};
}

json to_json(const NormalityDiagnostics& d) {
    return {{"ratio_sum", d.ratio_sum},
            {"ratio_max", d.ratio_max},
            {"threshold", d.threshold},
            {"verdict", to_string(d.verdict)}};
}

json to_json(const TestResult& r) {
    json j = {{"statistic_name", r.statistic_name},
              {"statistic", r.statistic},
              {"z", optional_json(r.z)},
              {"p_permutation", optional_json(r.p_permutation)},
              {"p_normal", optional_json(r.p_normal)},
              {"replicates", r.replicates},
              {"seed", r.seed},
              {"tail", to_string(r.tail)},
              {"n", r.n},
              {"s0", r.s0},
              {"diagnostics", to_json(r.diagnostics)}};
    if (const auto* m = std::get_if<MoranMoments>(&r.moments)) {
        j["moments"] = {{"mean", m->mean}, {"variance", m->variance}};
    } else if (const auto* p = std::get_if<PhiMoments>(&r.moments)) {
        j["moments"] = {{"mean", p->mean},   {"second_moment", p->second_moment}, {"variance", p->variance},
                        {"q1", p->q1},       {"q2", p->q2},                       {"q3", p->q3},
                        {"q22", p->q22}};
    } else {
        j["moments"] = nullptr;
    }
    if (r.category) {
        j["category"] = *r.category;
        j["category_count"] = r.category_count.value_or(0);
        j["skipped"] = r.skipped;
    }
    if (!r.null_draws.empty()) j["null_draws"] = r.null_draws;
    return j;
}

} // namespace netautocorr
