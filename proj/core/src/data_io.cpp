#include "tclab/data_io.hpp"

#include "tclab/decompositions.hpp"
#include "tclab/error.hpp"
#include "tclab/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tclab {

namespace {

Matrix orthonormal_columns(Rng& rng, std::size_t rows, std::size_t cols) {
    const Matrix g = rng.gaussian(rows, cols);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

}  // namespace

Tensor gen_low_tucker_rank(const Shape& shape, std::span<const std::size_t> ranks, std::uint64_t seed) {
    if (ranks.size() != shape.order()) {
        throw DimensionError("gen_low_tucker_rank: " + std::to_string(ranks.size()) + " ranks for order " +
                             std::to_string(shape.order()));
    }
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        if (ranks[n] < 1 || ranks[n] > shape[n]) {
            throw DomainError("gen_low_tucker_rank: rank " + std::to_string(ranks[n]) + " out of range for mode " +
                              std::to_string(n + 1) + " of size " + std::to_string(shape[n]));
        }
    }
    Rng rng(seed);
    Tensor t = rng.gaussian(Shape(std::vector<std::size_t>(ranks.begin(), ranks.end())));
    for (std::size_t n = 0; n < ranks.size(); ++n) {
        t = mode_n_product(t, n, orthonormal_columns(rng, shape[n], ranks[n]));
    }
    return t;
}

Tensor gen_low_tt_rank(const Shape& shape, std::span<const std::size_t> tt_ranks, std::uint64_t seed) {
    validate_tt_ranks(shape, tt_ranks);
    Rng rng(seed);
    std::vector<Tensor> cores;
    for (std::size_t k = 0; k < shape.order(); ++k) {
        const double stddev = 1.0 / std::sqrt(static_cast<double>(shape[k]));
        cores.push_back(rng.gaussian(Shape{tt_ranks[k], shape[k], tt_ranks[k + 1]}, stddev));
    }
    return tt_compose(cores);
}

std::vector<std::size_t> sample_mask(const Shape& shape, std::size_t count, std::uint64_t seed) {
    const std::size_t total = shape.size();
    if (count < 1 || count > total) {
        throw DomainError("sample_mask: count " + std::to_string(count) + " outside [1, " + std::to_string(total) +
                          "]");
    }
    Rng rng(seed);
    std::vector<std::size_t> pool(total);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // partial Fisher-Yates: the first `count` slots end up a uniform sample
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t j = k + rng.uniform_index(total - k);
        std::swap(pool[k], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// ---- tensor files -----------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'T', 'N', 'S', 'R', '1'};
constexpr const char* kTextHeader = "TNSR1-text";

template <typename T>
void put_le(std::ostream& out, T value) {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
        std::reverse(bytes.begin(), bytes.end());
        out.write(bytes.data(), sizeof(T));
    } else {
        out.write(reinterpret_cast<const char*>(&value), sizeof(T));
    }
}

template <typename T>
T get_le(std::istream& in, const std::string& what) {
    std::array<char, sizeof(T)> bytes{};
    if (!in.read(bytes.data(), sizeof(T))) throw SchemaError("tensor file: truncated " + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw SchemaError("cannot open " + path.string());
    return in;
}

double parse_double(std::string_view s, const std::string& context) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw SchemaError(context + ": not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::size_t parse_size(std::string_view s, const std::string& context) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw SchemaError(context + ": not a non-negative integer: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view chomp(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

void write_tensor(const std::filesystem::path& path, const Tensor& t, TensorFormat format) {
    if (format == TensorFormat::binary) {
        auto out = open_out(path, true);
        out.write(kMagic, sizeof(kMagic));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.order()));
        for (auto d : t.shape().dims()) put_le<std::uint64_t>(out, d);
        for (double v : t.values()) put_le<double>(out, v);
        if (!out) throw std::runtime_error("write failed: " + path.string());
        return;
    }
    auto out = open_out(path, false);
    out << kTextHeader << '\n' << t.order() << '\n';
    for (std::size_t n = 0; n < t.order(); ++n) out << (n ? " " : "") << t.dim(n);
    out << '\n';
    for (double v : t.values()) out << format_double(v) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    std::array<char, 5> head{};
    in.read(head.data(), head.size());
    if (!in) throw SchemaError("tensor file: " + path.string() + " is too short");
    std::string line;
    if (std::memcmp(head.data(), kMagic, sizeof(kMagic)) == 0 && in.peek() != '-') {
        const auto order = get_le<std::uint32_t>(in, "order");
        std::vector<std::size_t> dims(order);
        for (auto& d : dims) d = static_cast<std::size_t>(get_le<std::uint64_t>(in, "dims"));
        if (std::find(dims.begin(), dims.end(), std::size_t{0}) != dims.end()) {
            throw SchemaError("tensor file: zero dimension in " + path.string());
        }
        Tensor t(Shape(std::move(dims)));
        for (double& v : t.values()) v = get_le<double>(in, "payload");
        if (in.peek() != std::char_traits<char>::eof()) throw SchemaError("tensor file: trailing bytes");
        return t;
    }
    in.seekg(0);
    std::getline(in, line);
    if (chomp(line) != kTextHeader) throw SchemaError("tensor file: unrecognised header in " + path.string());
    std::getline(in, line);
    const std::size_t order = parse_size(chomp(line), "tensor file order");
    std::getline(in, line);
    std::istringstream dims_line{std::string(chomp(line))};
    std::vector<std::size_t> dims;
    std::string tok;
    while (dims_line >> tok) dims.push_back(parse_size(tok, "tensor file dims"));
    if (dims.size() != order) throw SchemaError("tensor file: order and dims disagree");
    Tensor t(Shape(std::move(dims)));
    std::size_t k = 0;
    while (std::getline(in, line)) {
        const auto s = chomp(line);
        if (s.empty()) continue;
        if (k >= t.size()) throw SchemaError("tensor file: payload longer than shape");
        t[k++] = parse_double(s, "tensor file payload");
    }
    if (k != t.size()) throw SchemaError("tensor file: payload has " + std::to_string(k) + " values, shape needs " +
                                         std::to_string(t.size()));
    return t;
}

void write_coordinate_csv(const std::filesystem::path& path, const Tensor& t,
                          std::optional<std::span<const std::size_t>> offsets) {
    auto out = open_out(path, false);
    for (std::size_t n = 0; n < t.order(); ++n) out << 'i' << n + 1 << ',';
    out << "value\n";
    auto emit = [&](std::size_t flat) {
        const auto idx = t.unravel(flat);
        for (auto i : idx) out << i + 1 << ',';
        out << format_double(t[flat]) << '\n';
    };
    if (offsets) {
        for (auto f : *offsets) emit(f);
    } else {
        for (std::size_t f = 0; f < t.size(); ++f) emit(f);
    }
}

// ---- datasets -------------------------------------------------------------

DatasetSpec dataset_spec(const std::string& name) {
    if (name == "ccds") return {"ccds", Shape{138, 17, 125}, std::nullopt};
    if (name == "meteo-uk") return {"meteo-uk", Shape{492, 5, 16}, std::size_t{1}};
    throw DomainError("unknown dataset '" + name + "' (expected ccds or meteo-uk)");
}

ObservationSet Dataset::observed() const {
    std::vector<std::size_t> offsets;
    std::vector<double> values;
    std::size_t m = 0;
    for (std::size_t f = 0; f < tensor.size(); ++f) {
        if (m < missing.size() && missing[m] == f) {
            ++m;
            continue;
        }
        offsets.push_back(f);
        values.push_back(tensor[f]);
    }
    return ObservationSet(tensor.shape(), std::move(offsets), std::move(values));
}

void zscore_slices(Tensor& t, std::size_t mode, std::span<const std::size_t> missing) {
    if (mode >= t.order()) throw DimensionError("zscore_slices: mode out of range");
    std::vector<char> absent(t.size(), 0);
    for (auto f : missing) absent.at(f) = 1;
    const auto strides = t.shape().strides();
    const std::size_t dim = t.dim(mode);
    std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
    std::vector<std::size_t> count(dim, 0);
    auto slot = [&](std::size_t f) { return (f / strides[mode]) % dim; };
    for (std::size_t f = 0; f < t.size(); ++f) {
        if (absent[f]) continue;
        const auto s = slot(f);
        sum[s] += t[f];
        ++count[s];
    }
    std::vector<double> mean(dim, 0.0);
    for (std::size_t s = 0; s < dim; ++s) {
        if (count[s] == 0) throw DomainError("zscore_slices: slice " + std::to_string(s + 1) + " has no entries");
        mean[s] = sum[s] / static_cast<double>(count[s]);
    }
    for (std::size_t f = 0; f < t.size(); ++f) {
        if (absent[f]) continue;
        const double d = t[f] - mean[slot(f)];
        sq[slot(f)] += d * d;
    }
    for (std::size_t s = 0; s < dim; ++s) {
        if (!(sq[s] > 0.0)) throw DomainError("zscore_slices: slice " + std::to_string(s + 1) + " is constant");
    }
    for (std::size_t f = 0; f < t.size(); ++f) {
        if (absent[f]) continue;
        const auto s = slot(f);
        t[f] = (t[f] - mean[s]) / std::sqrt(sq[s] / static_cast<double>(count[s]));
    }
}

namespace {

bool is_missing_token(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string low(s);
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
    return low.empty() || low == "na" || low == "nan";
}

Dataset load_coordinate_csv(const std::filesystem::path& path, const Shape& shape) {
    auto in = open_in(path, false);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file");
    const auto header = split_csv(chomp(line));
    const std::size_t order = shape.order();
    if (header.size() != order + 1) {
        throw DimensionError(path.string() + ": header has " + std::to_string(header.size()) + " columns, expected " +
                             std::to_string(order + 1));
    }
    for (std::size_t n = 0; n < order; ++n) {
        if (header[n] != "i" + std::to_string(n + 1)) {
            throw SchemaError(path.string() + ": header column " + std::to_string(n + 1) + " should be i" +
                              std::to_string(n + 1));
        }
    }
    if (header[order] != "value") throw SchemaError(path.string() + ": last header column should be value");

    Dataset ds{Tensor(shape), {}};
    std::vector<char> seen(shape.size(), 0);
    std::vector<char> gap(shape.size(), 0);
    MultiIndex idx(order);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto row = chomp(line);
        if (row.empty()) continue;
        const auto cells = split_csv(row);
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (cells.size() != order + 1) throw SchemaError(where + ": expected " + std::to_string(order + 1) + " fields");
        for (std::size_t n = 0; n < order; ++n) {
            const auto i = parse_size(cells[n], where);
            if (i < 1 || i > shape[n]) {
                throw DimensionError(where + ": index " + std::to_string(i) + " outside 1.." + std::to_string(shape[n]));
            }
            idx[n] = i - 1;
        }
        const auto f = ds.tensor.offset(idx);
        if (seen[f]) throw SchemaError(where + ": duplicate cell");
        seen[f] = 1;
        if (is_missing_token(cells[order])) {
            gap[f] = 1;
            continue;
        }
        const double v = parse_double(cells[order], where);
        if (!std::isfinite(v)) throw SchemaError(where + ": non-finite value");
        ds.tensor[f] = v;
    }
    for (std::size_t f = 0; f < shape.size(); ++f) {
        if (!seen[f] || gap[f]) ds.missing.push_back(f);
    }
    return ds;
}

}  // namespace

Dataset load_dataset_tensor(const std::filesystem::path& path, const DatasetSpec& spec) {
    if (!std::filesystem::exists(path)) throw SchemaError("no such file: " + path.string());
    Dataset ds;
    std::array<char, 5> head{};
    {
        std::ifstream probe(path, std::ios::binary);
        probe.read(head.data(), head.size());
    }
    if (std::memcmp(head.data(), kMagic, sizeof(kMagic)) == 0) {
        ds.tensor = read_tensor(path);
        if (ds.tensor.shape() != spec.shape) {
            throw DimensionError(path.string() + ": shape " + ds.tensor.shape().to_string() + " but " + spec.name +
                                 " expects " + spec.shape.to_string());
        }
        for (std::size_t f = 0; f < ds.tensor.size(); ++f) {
            if (std::isnan(ds.tensor[f])) {
                ds.missing.push_back(f);
                ds.tensor[f] = 0.0;
            }
        }
    } else {
        ds = load_coordinate_csv(path, spec.shape);
    }
    if (ds.missing.size() == ds.tensor.size()) throw SchemaError(path.string() + ": no observed cells");
    if (spec.zscore_mode) zscore_slices(ds.tensor, *spec.zscore_mode, ds.missing);
    return ds;
}

// ---- config -----------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    for (auto part : split_csv(s)) out.push_back(trim(part));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(s)) out.push_back(parse_size(item, "list"));
    return out;
}

std::string join_sizes(std::span<const std::size_t> v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + std::to_string(v[k]);
    return out;
}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw SchemaError("config line " + std::to_string(lineno) + ": missing '='");
        std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) throw SchemaError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[std::move(key)] = trim(std::string_view(body).substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string Config::dump() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

void Config::save(const std::filesystem::path& path) const {
    auto out = open_out(path, false);
    out << dump();
}

void Config::merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw SchemaError("config: missing key '" + key + "'");
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(get(key), "config key " + key); }

std::size_t Config::get_size(const std::string& key) const { return parse_size(get(key), "config key " + key); }

std::vector<std::string> Config::get_list(const std::string& key) const { return split_list(get(key)); }

std::vector<std::size_t> Config::get_size_list(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : get_list(key)) out.push_back(parse_size(item, "config key " + key));
    return out;
}

}  // namespace tclab
