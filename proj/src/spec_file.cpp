#include "rlr/spec_file.hpp"

#include "rlr/csv.hpp"
#include "rlr/error.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rlr {

namespace {

[[noreturn]] void spec_fail(const std::string& msg) { throw Error(Errc::SpecError, msg); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct Entry {
    std::string raw;
    int line;
};

class Table {
public:
    explicit Table(std::map<std::string, Entry> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string str(const std::string& key) const {
        const Entry& e = at(key);
        if (e.raw.size() < 2 || e.raw.front() != '"' || e.raw.back() != '"') {
            spec_fail(where(key) + " expects a quoted string");
        }
        return e.raw.substr(1, e.raw.size() - 2);
    }

    double num(const std::string& key) const { return to_num(key, at(key).raw); }

    long long integer(const std::string& key) const {
        const double v = num(key);
        if (v != static_cast<double>(static_cast<long long>(v))) spec_fail(where(key) + " expects an integer");
        return static_cast<long long>(v);
    }

    std::uint64_t u64(const std::string& key) const {
        const std::string& r = at(key).raw;
        std::uint64_t v = 0;
        const auto res = std::from_chars(r.data(), r.data() + r.size(), v);
        if (res.ec != std::errc() || res.ptr != r.data() + r.size()) {
            spec_fail(where(key) + " expects a nonnegative integer");
        }
        return v;
    }

    bool boolean(const std::string& key) const {
        const std::string& r = at(key).raw;
        if (r == "true") return true;
        if (r == "false") return false;
        spec_fail(where(key) + " expects true or false");
    }

    std::vector<double> list(const std::string& key) const {
        const std::string& r = at(key).raw;
        if (r.size() < 2 || r.front() != '[' || r.back() != ']') spec_fail(where(key) + " expects [a, b, ...]");
        std::vector<double> out;
        std::stringstream ss(r.substr(1, r.size() - 2));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            out.push_back(to_num(key, tok));
        }
        return out;
    }

    void check_known(const std::set<std::string>& known) const {
        for (const auto& [k, e] : kv_) {
            if (!known.count(k)) spec_fail("line " + std::to_string(e.line) + ": unknown key '" + k + "'");
        }
    }

private:
    const Entry& at(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) spec_fail("missing key '" + key + "'");
        return it->second;
    }

    std::string where(const std::string& key) const {
        return "line " + std::to_string(at(key).line) + ": '" + key + "'";
    }

    double to_num(const std::string& key, const std::string& tok) const {
        try {
            return csv::parse_double(tok);
        } catch (const Error&) {
            spec_fail(where(key) + " expects a number, got '" + tok + "'");
        }
    }

    std::map<std::string, Entry> kv_;
};

Table tokenize(const std::string& text) {
    std::map<std::string, Entry> kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']') spec_fail("line " + std::to_string(lineno) + ": bad table header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) spec_fail("line " + std::to_string(lineno) + ": empty table name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) spec_fail("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) spec_fail("line " + std::to_string(lineno) + ": empty key or value");
        if (!section.empty()) key = section + "." + key;
        if (kv.count(key)) spec_fail("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.emplace(key, Entry{value, lineno});
    }
    return Table(std::move(kv));
}

Model parse_model(const std::string& s) {
    if (s == "multitask") return Model::Multitask;
    if (s == "matrix_response") return Model::MatrixResponse;
    spec_fail("unknown model '" + s + "'");
}

PreprocessMode parse_mode(const std::string& s) {
    if (s == "heavy_both") return PreprocessMode::HeavyBoth;
    if (s == "heavy_response_only") return PreprocessMode::HeavyResponseOnly;
    spec_fail("unknown mode '" + s + "'");
}

TargetKind parse_target_kind(const std::string& s) {
    if (s == "v7_projector") return TargetKind::V7Projector;
    if (s == "normalized_product_blocks") return TargetKind::NormalizedProductBlocks;
    if (s == "binary_images") return TargetKind::BinaryImages;
    spec_fail("unknown target kind '" + s + "'");
}

DistKind parse_dist_kind(const std::string& s) {
    if (s == "gaussian_iid") return DistKind::GaussianIid;
    if (s == "mvt") return DistKind::Mvt;
    if (s == "scaled_t_iid") return DistKind::ScaledTIid;
    if (s == "t_product_noise") return DistKind::TProductNoise;
    if (s == "t_column_noise") return DistKind::TColumnNoise;
    if (s == "wishart_centered_t") return DistKind::WishartCenteredT;
    spec_fail("unknown distribution kind '" + s + "'");
}

DistSpec parse_dist(const Table& t, const std::string& table) {
    DistSpec d;
    d.kind = parse_dist_kind(t.str(table + ".kind"));
    if (t.has(table + ".nu")) d.nu = t.num(table + ".nu");
    if (t.has(table + ".scale")) d.scale = t.num(table + ".scale");
    return d;
}

} // namespace

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& base_dir) {
    const Table t = tokenize(text);
    t.check_known({"model", "mode", "n_grid", "eta_grid", "replications", "lambda_const", "seed",
                   "target.kind", "target.d1", "target.d2", "target.rank", "target.blocks", "target.path",
                   "covspec.kind", "covspec.nu", "covspec.scale", "noisespec.kind", "noisespec.nu",
                   "noisespec.scale", "solver.max_iters", "solver.tol"});

    ExperimentSpec spec;
    spec.model = parse_model(t.str("model"));
    spec.lambda_const = spec.model == Model::Multitask ? kDefaultLambdaConstMultitask
                                                       : kDefaultLambdaConstMatrixResponse;
    if (t.has("mode")) spec.mode = parse_mode(t.str("mode"));

    spec.target.kind = parse_target_kind(t.str("target.kind"));
    if (t.has("target.d1")) spec.target.d1 = t.integer("target.d1");
    spec.target.d2 = t.has("target.d2") ? t.integer("target.d2") : spec.target.d1;
    if (t.has("target.rank")) spec.target.rank = static_cast<int>(t.integer("target.rank"));
    if (t.has("target.blocks")) spec.target.blocks = static_cast<int>(t.integer("target.blocks"));
    if (t.has("target.path")) {
        std::filesystem::path p = t.str("target.path");
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        spec.target.path = p.string();
    }
    if (spec.target.kind == TargetKind::BinaryImages) {
        spec.target.d1 = kImageRows;
        spec.target.d2 = kImageCols;
        spec.target.blocks = 4;
    }

    if (t.has("covspec.kind")) spec.covspec = parse_dist(t, "covspec");
    spec.noisespec = parse_dist(t, "noisespec");

    for (double n : t.list("n_grid")) {
        if (n != static_cast<double>(static_cast<long long>(n))) spec_fail("n_grid entries must be integers");
        spec.n_grid.push_back(static_cast<Eigen::Index>(n));
    }
    if (t.has("eta_grid")) spec.eta_grid = t.list("eta_grid");
    if (t.has("replications")) spec.replications = static_cast<int>(t.integer("replications"));
    if (t.has("lambda_const")) spec.lambda_const = t.num("lambda_const");
    if (t.has("seed")) spec.seed = t.u64("seed");
    if (t.has("solver.max_iters")) spec.max_iters = static_cast<int>(t.integer("solver.max_iters"));
    if (t.has("solver.tol")) spec.tol = t.num("solver.tol");

    validate(spec);
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_experiment_spec(ss.str(), dir.empty() ? "." : dir.string());
}

} // namespace rlr
