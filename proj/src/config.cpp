#include "molchan/config.hpp"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "molchan/error.hpp"

namespace molchan {

namespace {

namespace pt = boost::property_tree;

const std::vector<std::string> kScenarioKeys = {"n_tx", "diffusion_coeff", "mean_distance", "distance_halfwidth",
                                                "receiver_radius", "symbol_duration", "num_taps"};
const std::vector<std::string> kExperimentKeys = {
    "sequence_source", "base_pattern", "k0",        "bits",          "epsilon",      "estimators", "taps_list",
    "lengths_list",    "num_trials",   "master_seed", "lsse_bound", "tap_threshold", "prior_draws"};

pt::ptree read_ini(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const std::vector<std::string>* known = nullptr;
        if (section == "scenario") known = &kScenarioKeys;
        if (section == "experiment") known = &kExperimentKeys;
        if (!known) throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (std::find(known->begin(), known->end(), key) == known->end())
                throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
    return tree;
}

std::string strip_comment(std::string text)
{
    const auto pos = text.find_first_of(";#");
    if (pos != std::string::npos) text.erase(pos);
    boost::algorithm::trim(text);
    return text;
}

template <class T>
void read_value(const pt::ptree& section, const std::string& key, T& target)
{
    const auto node = section.get_child_optional(key);
    if (!node) return;
    const std::string text = strip_comment(node->data());
    std::istringstream stream(text);
    T value{};
    stream >> value;
    if (!stream || !(stream >> std::ws).eof()) throw ConfigError("bad value '" + text + "' for key '" + key + "'");
    target = value;
}

void read_bool(const pt::ptree& section, const std::string& key, bool& target)
{
    const auto node = section.get_child_optional(key);
    if (!node) return;
    const std::string text = boost::algorithm::to_lower_copy(strip_comment(node->data()));
    if (text == "true" || text == "1" || text == "yes") {
        target = true;
    } else if (text == "false" || text == "0" || text == "no") {
        target = false;
    } else {
        throw ConfigError("bad boolean '" + text + "' for key '" + key + "'");
    }
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> items;
    boost::algorithm::split(items, text, boost::algorithm::is_any_of(", "), boost::algorithm::token_compress_on);
    std::erase_if(items, [](const std::string& s) { return s.empty(); });
    return items;
}

std::vector<int> read_int_list(const pt::ptree& section, const std::string& key, std::vector<int> fallback)
{
    const auto node = section.get_child_optional(key);
    if (!node) return fallback;
    std::vector<int> values;
    for (const std::string& item : split_list(strip_comment(node->data()))) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ConfigError("bad integer '" + item + "' in '" + key + "'");
        values.push_back(value);
    }
    return values;
}

TrainingSequence read_bits(const std::string& text, const std::string& key)
{
    if (text == "fig1-base") return fig1_base();
    try {
        return TrainingSequence::parse(text);
    } catch (const Error& e) {
        throw ConfigError("bad bit string for '" + key + "': " + e.what());
    }
}

PhysicalScenario scenario_from(const pt::ptree& tree)
{
    PhysicalScenario scenario;
    const auto section = tree.get_child_optional("scenario");
    if (!section) return scenario;
    read_value(*section, "n_tx", scenario.n_tx);
    read_value(*section, "diffusion_coeff", scenario.diffusion_coeff);
    read_value(*section, "mean_distance", scenario.mean_distance);
    read_value(*section, "distance_halfwidth", scenario.distance_halfwidth);
    read_value(*section, "receiver_radius", scenario.receiver_radius);
    read_value(*section, "symbol_duration", scenario.symbol_duration);
    read_value(*section, "num_taps", scenario.num_taps);
    try {
        scenario.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return scenario;
}

std::ifstream open(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file) throw IoError("cannot read configuration '" + path.string() + "'");
    return file;
}

}  // namespace

PhysicalScenario parse_scenario_config(std::istream& in)
{
    return scenario_from(read_ini(in));
}

PhysicalScenario load_scenario_config(const std::filesystem::path& path)
{
    auto file = open(path);
    return parse_scenario_config(file);
}

ExperimentSpec parse_experiment_config(std::istream& in)
{
    const pt::ptree tree = read_ini(in);
    ExperimentSpec spec;
    spec.scenario = scenario_from(tree);
    if (const auto section = tree.get_child_optional("experiment")) {
        const pt::ptree& s = *section;
        if (auto v = s.get_optional<std::string>("sequence_source"))
            spec.sequence.source = parse_sequence_source(strip_comment(*v));
        if (auto v = s.get_optional<std::string>("base_pattern"))
            spec.sequence.base = read_bits(strip_comment(*v), "base_pattern");
        if (auto v = s.get_optional<std::string>("bits")) spec.sequence.bits = read_bits(strip_comment(*v), "bits");
        read_value(s, "k0", spec.sequence.k0);
        read_value(s, "epsilon", spec.sequence.epsilon);
        if (auto v = s.get_optional<std::string>("estimators")) {
            spec.estimators.clear();
            for (const std::string& item : split_list(strip_comment(*v))) spec.estimators.push_back(parse_estimator(item));
        }
        spec.taps_list = read_int_list(s, "taps_list", spec.taps_list);
        spec.lengths_list = read_int_list(s, "lengths_list", spec.lengths_list);
        read_value(s, "num_trials", spec.num_trials);
        read_value(s, "master_seed", spec.master_seed);
        read_bool(s, "lsse_bound", spec.lsse_bound);
        read_value(s, "tap_threshold", spec.tap_threshold);
        read_value(s, "prior_draws", spec.prior_draws);
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path)
{
    auto file = open(path);
    return parse_experiment_config(file);
}

}  // namespace molchan
