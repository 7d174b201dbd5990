#include "molchan/types.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "molchan/error.hpp"

namespace molchan {

void PhysicalScenario::validate(bool require_symbol_duration) const
{
    if (n_tx <= 0) throw ArgumentError("n_tx must be positive");
    if (!(diffusion_coeff > 0.0)) throw ArgumentError("diffusion_coeff must be positive");
    if (!(mean_distance > 0.0)) throw ArgumentError("mean_distance must be positive");
    if (!(distance_halfwidth >= 0.0) || !(distance_halfwidth < mean_distance))
        throw ArgumentError("distance_halfwidth must lie in [0, mean_distance)");
    if (!(receiver_radius > 0.0)) throw ArgumentError("receiver_radius must be positive");
    if (num_taps < 1) throw ArgumentError("num_taps must be at least 1");
    if (symbol_duration < 0.0 || (require_symbol_duration && !(symbol_duration > 0.0)))
        throw ArgumentError("symbol_duration must be positive");
}

double PhysicalScenario::receiver_volume() const
{
    return 4.0 / 3.0 * std::numbers::pi * receiver_radius * receiver_radius * receiver_radius;
}

Eigen::VectorXd Cir::as_vector() const
{
    Eigen::VectorXd v(num_params());
    for (int l = 0; l < num_taps(); ++l) v(l) = taps[static_cast<std::size_t>(l)];
    v(num_taps()) = noise_mean;
    return v;
}

Cir Cir::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v)
{
    if (v.size() < 2) throw ArgumentError("a CIR vector needs at least one tap and the noise mean");
    Cir cir;
    cir.taps.assign(v.data(), v.data() + v.size() - 1);
    cir.noise_mean = v(v.size() - 1);
    return cir;
}

bool Cir::non_negative() const
{
    return noise_mean >= 0.0 && std::all_of(taps.begin(), taps.end(), [](double c) { return c >= 0.0; });
}

TrainingSequence::TrainingSequence(std::vector<std::uint8_t> symbols) : symbols_(std::move(symbols))
{
    for (auto s : symbols_)
        if (s > 1) throw ArgumentError("training symbols must be 0 or 1");
}

TrainingSequence TrainingSequence::parse(std::string_view bits)
{
    std::vector<std::uint8_t> symbols;
    for (char ch : bits) {
        if (ch == '0' || ch == '1')
            symbols.push_back(static_cast<std::uint8_t>(ch - '0'));
        else if (ch != ' ' && ch != ',' && ch != '[' && ch != ']' && ch != '\t')
            throw ArgumentError("invalid character in training sequence: '" + std::string(1, ch) + "'");
    }
    if (symbols.empty()) throw ArgumentError("empty training sequence");
    return TrainingSequence(std::move(symbols));
}

TrainingSequence TrainingSequence::repeated(const TrainingSequence& base, int length)
{
    if (base.length() == 0) throw ArgumentError("cannot repeat an empty sequence");
    if (length < 1) throw ArgumentError("sequence length must be positive");
    std::vector<std::uint8_t> symbols(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) symbols[static_cast<std::size_t>(i)] = base.symbols_[static_cast<std::size_t>(i % base.length())];
    return TrainingSequence(std::move(symbols));
}

std::string TrainingSequence::to_string() const
{
    std::string out;
    out.reserve(symbols_.size());
    for (auto s : symbols_) out.push_back(static_cast<char>('0' + s));
    return out;
}

TrainingSequence fig1_base()
{
    return TrainingSequence({1, 1, 0, 0, 1, 0, 0, 1, 0, 1});
}

Eigen::VectorXd ObservationVector::as_vector() const
{
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]);
    return v;
}

int num_observations(const TrainingSequence& seq, int num_taps)
{
    if (num_taps < 1) throw ArgumentError("number of taps must be at least 1");
    if (seq.length() < num_taps) throw ArgumentError("training sequence shorter than the channel memory");
    return seq.length() - num_taps + 1;
}

int infer_num_taps(const TrainingSequence& seq, const ObservationVector& obs)
{
    const int taps = seq.length() - obs.size() + 1;
    if (obs.size() < 1 || taps < 1)
        throw ArgumentError("observation vector length " + std::to_string(obs.size()) +
                            " does not fit a training sequence of length " + std::to_string(seq.length()));
    return taps;
}

Eigen::MatrixXd design_matrix(const TrainingSequence& seq, int num_taps)
{
    const int rows = num_observations(seq, num_taps);
    Eigen::MatrixXd s(rows, num_taps + 1);
    for (int i = 0; i < rows; ++i) {
        const int k = num_taps + i;  // 1-based sample index
        for (int l = 1; l <= num_taps; ++l) s(i, l - 1) = seq.at(k - l + 1);
        s(i, num_taps) = 1.0;
    }
    return s;
}

ActiveSet::ActiveSet(std::uint32_t mask, int num_taps) : mask_(mask), num_taps_(num_taps)
{
    if (num_taps < 1 || num_taps > 30) throw ArgumentError("unsupported number of taps");
    if (mask & ~full_mask(num_taps)) throw ArgumentError("active set mask exceeds the parameter count");
}

ActiveSet ActiveSet::full(int num_taps)
{
    return ActiveSet(full_mask(num_taps), num_taps);
}

int ActiveSet::size() const
{
    return std::popcount(mask_);
}

std::vector<int> ActiveSet::indices() const
{
    std::vector<int> out;
    for (int i = 0; i <= num_taps_; ++i)
        if (contains(i)) out.push_back(i);
    return out;
}

std::string ActiveSet::to_string() const
{
    std::string out = "{";
    bool first = true;
    for (int i : indices()) {
        if (!first) out += ",";
        out += i == num_taps_ ? std::string("n") : std::to_string(i + 1);
        first = false;
    }
    return out + "}";
}

std::vector<ActiveSet> ActiveSet::enumerate(int num_taps)
{
    if (num_taps < 1 || num_taps > 20) throw ArgumentError("subset enumeration supports 1..20 taps");
    const std::uint32_t full = full_mask(num_taps);
    std::vector<ActiveSet> sets;
    sets.reserve(full);
    for (std::uint32_t m = 1; m <= full; ++m) sets.emplace_back(m, num_taps);
    std::sort(sets.begin(), sets.end(), [](const ActiveSet& a, const ActiveSet& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.indices() < b.indices();
    });
    return sets;
}

Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& design, const ActiveSet& active)
{
    const auto cols = active.indices();
    Eigen::MatrixXd out(design.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = design.col(cols[j]);
    return out;
}

}  // namespace molchan
