#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ding/gmm_prior.hpp"
#include "ding/guidance.hpp"
#include "ding/problem.hpp"
#include "ding/schedule.hpp"

namespace ding {

/// Flat "key = value" text file. '#' starts a comment; keys are dotted paths
/// such as method.ding.gamma. Every error names the source and line.
class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in, std::string source);
    static KeyValueFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    const std::string& raw(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// Whitespace- or comma-separated numbers.
    std::vector<double> get_doubles(const std::string& key) const;

    /// Keys that start with prefix.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    /// Throws ErrorKind::Config naming the first key that was never read.
    void check_all_used() const;

    /// Sorted "key=value" lines; hashed into sample provenance.
    std::string canonical() const;

    const std::string& source() const { return source_; }

private:
    struct Entry {
        std::string value;
        std::size_t line;
    };

    [[noreturn]] void error_at(const std::string& key, const std::string& message) const;
    const Entry& entry(const std::string& key) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
    mutable std::map<std::string, bool> used_;
};

/// Parses comma/whitespace separated doubles, or throws ErrorKind::Config.
std::vector<double> parse_number_list(const std::string& text);

/// Prior components from CSV. Each row is `weight, mean..., cov...` where the
/// covariance part holds either d variances (diagonal) or d*d entries
/// (row-major full matrix). A leading non-numeric header line is skipped.
GaussianMixture read_prior_csv(const std::filesystem::path& path);
void write_prior_csv(std::ostream& out, const GaussianMixture& mixture);

/// Per-method overrides of the shared sampler settings.
struct MethodOverrides {
    std::optional<double> eta;
    std::optional<double> gamma;
    std::optional<double> zeta;
    std::optional<double> lambda;
    std::optional<std::size_t> ding_nz;
    std::optional<bool> final_replacement;
};

struct ExperimentConfig {
    std::string source;
    std::uint64_t config_hash = 0;

    std::shared_ptr<const GaussianMixture> prior;
    Schedule schedule;
    std::size_t steps = 50;
    Spacing spacing = Spacing::Uniform;

    std::vector<Method> methods;
    SamplerConfig sampler;  ///< shared defaults; method and grid filled per method
    std::map<Method, MethodOverrides> overrides;

    MaskOperator mask;
    Eigen::VectorXd x_star;
    bool noisy_observation = false;

    std::size_t n_chains = 1000;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";

    std::size_t oracle_samples = 0;  ///< 0 means n_chains
    std::size_t projections = 128;
    double peak = 1.0;

    /// Shared defaults with the method's overrides applied.
    SamplerConfig sampler_for(Method method) const;
};

/// Relative paths inside the file resolve against base_dir.
ExperimentConfig parse_experiment_config(std::istream& in, const std::string& source,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace ding
