#include "ding/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ding/error.hpp"
#include "ding/mask_io.hpp"
#include "ding/random.hpp"
#include "ding/sample_io.hpp"

namespace ding {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                out.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) {
        out.push_back(current);
    }
    return out;
}

bool parse_double(const std::string& token, double& value) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& token : split_list(text)) {
        double v = 0.0;
        if (!parse_double(token, v)) {
            fail(ErrorKind::Config, "'" + token + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source) {
    KeyValueFile file;
    file.source_ = std::move(source);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const auto where = file.source_ + ":" + std::to_string(number) + ": ";
        if (eq == std::string::npos) {
            fail(ErrorKind::Config, where + "expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            fail(ErrorKind::Config, where + "empty key");
        }
        if (file.entries_.contains(key)) {
            fail(ErrorKind::Config, where + "duplicate key '" + key + "' (first set on line " +
                                        std::to_string(file.entries_.at(key).line) + ")");
        }
        file.used_[key] = false;
        file.entries_.emplace(std::move(key), Entry{std::move(value), number});
    }
    return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        fail(ErrorKind::Io, "cannot open config " + path.string());
    }
    return parse(in, path.string());
}

void KeyValueFile::error_at(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    const std::string line = it == entries_.end() ? "" : std::to_string(it->second.line) + ": ";
    fail(ErrorKind::Config, source_ + ":" + line + key + ": " + message);
}

const KeyValueFile::Entry& KeyValueFile::entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        fail(ErrorKind::Config, source_ + ": missing required key '" + key + "'");
    }
    used_[key] = true;
    return it->second;
}

bool KeyValueFile::has(const std::string& key) const {
    return entries_.contains(key);
}

const std::string& KeyValueFile::raw(const std::string& key) const {
    return entry(key).value;
}

std::string KeyValueFile::get_string(const std::string& key) const {
    return entry(key).value;
}

double KeyValueFile::get_double(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(entry(key).value, v)) {
        error_at(key, "expected a number, got '" + entry(key).value + "'");
    }
    return v;
}

std::uint64_t KeyValueFile::get_uint(const std::string& key) const {
    const std::string& text = entry(key).value;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        error_at(key, "expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

bool KeyValueFile::get_bool(const std::string& key) const {
    const std::string& text = entry(key).value;
    if (text == "true" || text == "on" || text == "yes" || text == "1") {
        return true;
    }
    if (text == "false" || text == "off" || text == "no" || text == "0") {
        return false;
    }
    error_at(key, "expected a boolean, got '" + text + "'");
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
    try {
        return parse_number_list(entry(key).value);
    } catch (const Error& e) {
        error_at(key, e.what());
    }
}

std::vector<std::string> KeyValueFile::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) {
            break;
        }
        out.push_back(it->first);
    }
    return out;
}

void KeyValueFile::check_all_used() const {
    for (const auto& [key, used] : used_) {
        if (!used) {
            error_at(key, "unknown key");
        }
    }
}

std::string KeyValueFile::canonical() const {
    std::string out;
    for (const auto& [key, entry] : entries_) {
        out += key + "=" + entry.value + "\n";
    }
    return out;
}

GaussianMixture read_prior_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        fail(ErrorKind::Io, "cannot open prior CSV " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        try {
            rows.push_back(parse_number_list(line));
        } catch (const Error&) {
            if (rows.empty() && number == 1) {
                continue;  // header
            }
            fail(ErrorKind::Config, path.string() + ":" + std::to_string(number) +
                                        ": non-numeric prior row");
        }
    }
    if (rows.empty()) {
        fail(ErrorKind::Config, path.string() + ": no prior components");
    }

    const std::size_t cols = rows.front().size();
    std::size_t d = 0;
    bool diagonal = false;
    if (cols >= 3 && (cols - 1) % 2 == 0) {
        d = (cols - 1) / 2;
        diagonal = true;
    }
    for (std::size_t k = 1; k * k + k + 1 <= cols; ++k) {
        if (k * k + k + 1 == cols && k > 1) {
            d = k;
            diagonal = false;
        }
    }
    if (d == 0) {
        fail(ErrorKind::Config, path.string() + ": cannot infer dimension from " +
                                    std::to_string(cols) + " columns");
    }

    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    const auto di = static_cast<Eigen::Index>(d);
    for (const auto& row : rows) {
        if (row.size() != cols) {
            fail(ErrorKind::Config, path.string() + ": rows have different column counts");
        }
        weights.push_back(row[0]);
        means.push_back(Eigen::Map<const Eigen::VectorXd>(row.data() + 1, di));
        if (diagonal) {
            covs.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data() + 1 + d, di).asDiagonal());
        } else {
            covs.push_back(
                Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                    row.data() + 1 + d, di, di));
        }
    }
    return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
}

void write_prior_csv(std::ostream& out, const GaussianMixture& mixture) {
    const Eigen::Index d = mixture.dim();
    out << "weight";
    for (Eigen::Index i = 0; i < d; ++i) {
        out << ",mean_" << i;
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out << ",cov_" << i << "_" << j;
        }
    }
    out << "\n" << std::setprecision(17);
    for (std::size_t k = 0; k < mixture.size(); ++k) {
        out << mixture.weight(k);
        for (Eigen::Index i = 0; i < d; ++i) {
            out << "," << mixture.mean(k)[i];
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                out << "," << mixture.covariance(k)(i, j);
            }
        }
        out << "\n";
    }
}

SamplerConfig ExperimentConfig::sampler_for(Method method) const {
    SamplerConfig cfg = sampler;
    cfg.method = method;
    cfg.grid = make_grid(steps, spacing);
    cfg.seed = seed;
    cfg.n_chains = n_chains;
    if (const auto it = overrides.find(method); it != overrides.end()) {
        const MethodOverrides& o = it->second;
        cfg.eta = o.eta.value_or(cfg.eta);
        cfg.gamma = o.gamma.value_or(cfg.gamma);
        cfg.dps_scale = o.zeta.value_or(cfg.dps_scale);
        cfg.diffpir_lambda = o.lambda.value_or(cfg.diffpir_lambda);
        cfg.ding_nz = o.ding_nz.value_or(cfg.ding_nz);
        cfg.final_replacement = o.final_replacement.value_or(cfg.final_replacement);
    }
    return cfg;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

GaussianMixture parse_inline_prior(const KeyValueFile& kv) {
    const std::uint64_t count = kv.get_uint("prior.components");
    if (count == 0) {
        fail(ErrorKind::Config, kv.source() + ": prior.components must be >= 1");
    }
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (std::uint64_t k = 0; k < count; ++k) {
        const std::string p = "prior." + std::to_string(k) + ".";
        weights.push_back(kv.get_double(p + "weight"));
        const Eigen::VectorXd mean = to_vector(kv.get_doubles(p + "mean"));
        const auto d = mean.size();
        if (kv.has(p + "variance")) {
            const auto var = kv.get_doubles(p + "variance");
            if (static_cast<Eigen::Index>(var.size()) != d) {
                fail(ErrorKind::Config, kv.source() + ": " + p + "variance needs " +
                                            std::to_string(d) + " entries");
            }
            covs.emplace_back(to_vector(var).asDiagonal());
        } else if (kv.has(p + "covariance")) {
            const auto cov = kv.get_doubles(p + "covariance");
            if (static_cast<Eigen::Index>(cov.size()) != d * d) {
                fail(ErrorKind::Config, kv.source() + ": " + p + "covariance needs " +
                                            std::to_string(d * d) + " entries");
            }
            covs.push_back(
                Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                    cov.data(), d, d));
        } else {
            covs.push_back(Eigen::MatrixXd::Identity(d, d));
        }
        means.push_back(mean);
    }
    try {
        return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
    } catch (const Error& e) {
        fail(ErrorKind::Config, kv.source() + ": invalid prior: " + e.what());
    }
}

MaskOperator parse_mask(const KeyValueFile& kv, const std::filesystem::path& base, Eigen::Index d) {
    MaskOperator mask;
    int sources = 0;
    if (kv.has("mask")) {
        ++sources;
        mask = MaskOperator::from_vector(to_vector(kv.get_doubles("mask")));
    }
    if (kv.has("mask.prefix")) {
        ++sources;
        mask = MaskOperator::prefix(d, static_cast<Eigen::Index>(kv.get_uint("mask.prefix")));
    }
    if (kv.has("mask.pgm")) {
        ++sources;
        mask = MaskOperator(read_pgm(resolve(base, kv.get_string("mask.pgm"))).data());
    }
    if (kv.has("mask.dmsk")) {
        ++sources;
        mask = MaskOperator(read_dmsk(resolve(base, kv.get_string("mask.dmsk"))).data());
    }
    if (sources != 1) {
        fail(ErrorKind::Config,
             kv.source() + ": exactly one of mask, mask.prefix, mask.pgm, mask.dmsk is required");
    }
    if (mask.dim() != d) {
        fail(ErrorKind::Config, kv.source() + ": mask has " + std::to_string(mask.dim()) +
                                    " entries, prior dimension is " + std::to_string(d));
    }
    return mask;
}

Eigen::VectorXd parse_reference(const KeyValueFile& kv, const std::filesystem::path& base,
                                const GaussianMixture& prior, std::uint64_t seed) {
    Eigen::VectorXd x;
    int sources = 0;
    if (kv.has("x_star")) {
        ++sources;
        x = to_vector(kv.get_doubles("x_star"));
    }
    if (kv.has("x_star.file")) {
        ++sources;
        const Eigen::MatrixXd rows = read_dsmp(resolve(base, kv.get_string("x_star.file")));
        if (rows.rows() < 1) {
            fail(ErrorKind::Config, kv.source() + ": x_star.file holds no sample");
        }
        x = rows.row(0).transpose();
    }
    if (kv.has("x_star.component")) {
        ++sources;
        const std::uint64_t k = kv.get_uint("x_star.component");
        if (k >= prior.size()) {
            fail(ErrorKind::Config, kv.source() + ": x_star.component out of range");
        }
        const GaussianMixture component({1.0}, {prior.mean(k)}, {prior.covariance(k)});
        RandomStream rng = derive_stream(seed, "x_star", 0);
        x = component.sample(rng);
    }
    if (sources != 1) {
        fail(ErrorKind::Config,
             kv.source() + ": exactly one of x_star, x_star.file, x_star.component is required");
    }
    if (x.size() != prior.dim()) {
        fail(ErrorKind::Config, kv.source() + ": x_star dimension does not match the prior");
    }
    return x;
}

void parse_overrides(const KeyValueFile& kv, ExperimentConfig& cfg) {
    for (const std::string& key : kv.keys_with_prefix("method.")) {
        const auto dot = key.find('.', 7);
        if (dot == std::string::npos) {
            fail(ErrorKind::Config, kv.source() + ": malformed override key '" + key + "'");
        }
        Method method;
        try {
            method = parse_method(key.substr(7, dot - 7));
        } catch (const Error& e) {
            fail(ErrorKind::Config, kv.source() + ": " + key + ": " + e.what());
        }
        const std::string field = key.substr(dot + 1);
        MethodOverrides& o = cfg.overrides[method];
        if (field == "eta") {
            o.eta = kv.get_double(key);
        } else if (field == "gamma") {
            o.gamma = kv.get_double(key);
        } else if (field == "zeta") {
            o.zeta = kv.get_double(key);
        } else if (field == "lambda") {
            o.lambda = kv.get_double(key);
        } else if (field == "ding_nz") {
            o.ding_nz = kv.get_uint(key);
        } else if (field == "final_replacement") {
            o.final_replacement = kv.get_bool(key);
        } else {
            kv.raw(key);
            fail(ErrorKind::Config, kv.source() + ": unknown override field in '" + key + "'");
        }
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& source,
                                         const std::filesystem::path& base_dir) {
    const KeyValueFile kv = KeyValueFile::parse(in, source);
    ExperimentConfig cfg;
    cfg.source = source;
    cfg.config_hash = hash_label(kv.canonical());

    auto wrap = [&](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Io) {
                throw;
            }
            fail(ErrorKind::Config, source + ": " + e.what());
        }
    };

    if (kv.has("seed")) {
        cfg.seed = kv.get_uint("seed");
    }
    if (kv.has("prior.csv")) {
        cfg.prior = std::make_shared<const GaussianMixture>(
            read_prior_csv(resolve(base_dir, kv.get_string("prior.csv"))));
    } else {
        cfg.prior = std::make_shared<const GaussianMixture>(parse_inline_prior(kv));
    }

    wrap([&] {
        if (kv.has("schedule")) {
            cfg.schedule = Schedule::parse(kv.get_string("schedule"));
        }
        if (kv.has("grid.steps")) {
            cfg.steps = kv.get_uint("grid.steps");
        }
        if (kv.has("grid.spacing")) {
            cfg.spacing = parse_spacing(kv.get_string("grid.spacing"));
        }
        make_grid(cfg.steps, cfg.spacing);
    });

    if (!kv.has("methods")) {
        fail(ErrorKind::Config, source + ": missing required key 'methods'");
    }
    for (const auto& name : split_list(kv.get_string("methods"))) {
        wrap([&] { cfg.methods.push_back(parse_method(name)); });
    }
    if (cfg.methods.empty()) {
        fail(ErrorKind::Config, source + ": 'methods' lists no method");
    }

    if (kv.has("eta")) cfg.sampler.eta = kv.get_double("eta");
    if (kv.has("gamma")) cfg.sampler.gamma = kv.get_double("gamma");
    if (kv.has("zeta")) cfg.sampler.dps_scale = kv.get_double("zeta");
    if (kv.has("lambda")) cfg.sampler.diffpir_lambda = kv.get_double("lambda");
    if (kv.has("ding_nz")) cfg.sampler.ding_nz = kv.get_uint("ding_nz");
    if (kv.has("final_replacement")) cfg.sampler.final_replacement = kv.get_bool("final_replacement");
    parse_overrides(kv, cfg);

    if (kv.has("chains")) cfg.n_chains = kv.get_uint("chains");
    if (kv.has("output")) cfg.output_dir = resolve(base_dir, kv.get_string("output"));
    if (kv.has("observation.noisy")) cfg.noisy_observation = kv.get_bool("observation.noisy");
    if (kv.has("evaluation.oracle_samples")) {
        cfg.oracle_samples = kv.get_uint("evaluation.oracle_samples");
    }
    if (kv.has("evaluation.projections")) cfg.projections = kv.get_uint("evaluation.projections");
    if (kv.has("evaluation.peak")) cfg.peak = kv.get_double("evaluation.peak");

    wrap([&] { cfg.mask = parse_mask(kv, base_dir, cfg.prior->dim()); });
    wrap([&] { cfg.x_star = parse_reference(kv, base_dir, *cfg.prior, cfg.seed); });

    kv.check_all_used();

    wrap([&] {
        for (Method m : cfg.methods) {
            cfg.sampler_for(m).validate();
        }
        require(cfg.projections >= 1, ErrorKind::InvalidParameter,
                "evaluation.projections must be >= 1");
        require(cfg.peak > 0.0, ErrorKind::InvalidParameter, "evaluation.peak must be positive");
    });
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        fail(ErrorKind::Io, "cannot open config " + path.string());
    }
    return parse_experiment_config(in, path.string(), path.parent_path());
}

}  // namespace ding
