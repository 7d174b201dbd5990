#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace molchan {

/// Physical inputs used to synthesize ground-truth CIRs.
///
/// Defaults: 10^5 molecules per release,
/// D = 4.365e-10 m^2/s, 500 nm mean distance and a 45 nm transparent receiver.
/// symbol_duration = 0 means "not chosen yet" (see choose_symbol_params).
struct PhysicalScenario {
    std::int64_t n_tx = 100000;
    double diffusion_coeff = 4.365e-10;  // m^2/s
    double mean_distance = 500e-9;       // m
    double distance_halfwidth = 0.0;     // m, distance ~ mean + U[-halfwidth, halfwidth]
    double receiver_radius = 45e-9;      // m
    double symbol_duration = 0.0;        // s
    int num_taps = 1;

    /// Throws ArgumentError when a physical invariant is violated. The
    /// symbol duration is only checked when require_symbol_duration is set.
    void validate(bool require_symbol_duration = false) const;

    double receiver_volume() const;
};

/// Channel impulse response: L tap means plus the external noise mean,
/// all in expected molecule counts per sample.
struct Cir {
    std::vector<double> taps;
    double noise_mean = 0.0;

    int num_taps() const { return static_cast<int>(taps.size()); }
    int num_params() const { return num_taps() + 1; }

    /// [c_1, ..., c_L, c_n]
    Eigen::VectorXd as_vector() const;
    static Cir from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

    bool non_negative() const;
};

/// Binary ON-OFF training sequence s[1..K].
class TrainingSequence {
public:
    TrainingSequence() = default;
    explicit TrainingSequence(std::vector<std::uint8_t> symbols);

    /// Parses a string of '0'/'1' characters; separators ' ', ',', '[', ']' are ignored.
    static TrainingSequence parse(std::string_view bits);

    /// Cyclically repeats `base` until length K (truncating the last copy).
    static TrainingSequence repeated(const TrainingSequence& base, int length);

    int length() const { return static_cast<int>(symbols_.size()); }
    std::span<const std::uint8_t> symbols() const { return symbols_; }

    /// 1-based access, s[k] for k in 1..K.
    std::uint8_t at(int k) const { return symbols_[static_cast<std::size_t>(k - 1)]; }

    std::string to_string() const;

    friend bool operator==(const TrainingSequence&, const TrainingSequence&) = default;

private:
    std::vector<std::uint8_t> symbols_;
};

/// The preset base pattern 1100100101 whose repetitions form the sweep sequences.
TrainingSequence fig1_base();

/// Molecule counts r[L..K].
struct ObservationVector {
    std::vector<std::int64_t> counts;

    int size() const { return static_cast<int>(counts.size()); }
    Eigen::VectorXd as_vector() const;
};

/// Design matrix S with rows s_k = [s[k], s[k-1], ..., s[k-L+1], 1] for k = L..K.
Eigen::MatrixXd design_matrix(const TrainingSequence& seq, int num_taps);

/// Number of observations K - L + 1; throws ArgumentError if K < L or L < 1.
int num_observations(const TrainingSequence& seq, int num_taps);

/// Channel memory implied by a sequence/observation pair, L = K - len(r) + 1.
int infer_num_taps(const TrainingSequence& seq, const ObservationVector& obs);

/// Non-empty subset of F = {1, ..., L, n}. Bit i (0 <= i < L) selects tap i+1,
/// bit L selects the noise mean.
class ActiveSet {
public:
    ActiveSet() = default;
    ActiveSet(std::uint32_t mask, int num_taps);

    static ActiveSet full(int num_taps);

    /// All 2^(L+1) - 1 subsets: decreasing cardinality, lexicographic order of
    /// the ascending index lists within equal cardinality (n sorts last).
    static std::vector<ActiveSet> enumerate(int num_taps);

    std::uint32_t mask() const { return mask_; }
    int num_taps() const { return num_taps_; }
    int size() const;
    bool contains(int param) const { return (mask_ >> param) & 1U; }
    bool is_full() const { return mask_ == full_mask(num_taps_); }

    /// Parameter indices (0-based, noise = L) in increasing order.
    std::vector<int> indices() const;

    /// e.g. "{1,3,n}"
    std::string to_string() const;

    static std::uint32_t full_mask(int num_taps) { return (std::uint32_t{1} << (num_taps + 1)) - 1; }

    friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

private:
    std::uint32_t mask_ = 0;
    int num_taps_ = 0;
};

/// Columns of `design` selected by `active`.
Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& design, const ActiveSet& active);

}  // namespace molchan
