// Spatial-modulation signal model: constellations, bit mapping, Rayleigh
// channels, AWGN, channel-estimation error and candidate enumeration.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sm {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;
using Bits = std::vector<std::uint8_t>;

/// Engine used for every stochastic draw. One instance per trial.
using Rng = std::mt19937_64;

/// Dense complex matrix, column-major so that a transmit-antenna column is
/// contiguous.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    cdouble& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    const cdouble& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    std::span<const cdouble> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
    std::span<const cdouble> data() const noexcept { return data_; }

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cdouble> data_;
};

/// Unit-average-energy QAM alphabet. Symbol index q is the natural-binary
/// value of its label, so labels()[q] == q and the bit pattern of q is what
/// the modulator transmits.
class Constellation {
public:
    /// Validates size (power of two), unit average energy and that labels
    /// form a permutation of all log2(M)-bit patterns.
    Constellation(std::vector<cdouble> points, std::vector<std::uint32_t> labels);

    std::size_t order() const noexcept { return points_.size(); }
    unsigned bits_per_symbol() const noexcept { return bits_; }
    std::span<const cdouble> points() const noexcept { return points_; }
    std::span<const std::uint32_t> labels() const noexcept { return labels_; }
    const cdouble& operator[](std::size_t q) const { return points_[q]; }
    double energy(std::size_t q) const { return std::norm(points_[q]); }

    /// Label of symbol q as a string of '0'/'1', MSB first.
    std::string label_string(std::size_t q) const;

    /// Rectangular grid size (columns along I, rows along Q).
    std::size_t grid_i() const noexcept { return grid_i_; }
    std::size_t grid_q() const noexcept { return grid_q_; }

private:
    friend Constellation build_qam(std::size_t order);

    std::vector<cdouble> points_;
    std::vector<std::uint32_t> labels_;
    unsigned bits_ = 0;
    std::size_t grid_i_ = 0;
    std::size_t grid_q_ = 1;
};

/// Gray-labeled rectangular QAM with 2 <= M <= 128. Odd bit counts use a
/// 2^ceil(k/2) x 2^floor(k/2) grid (BPSK for M = 2, 4x2 for M = 8).
/// Throws std::invalid_argument for unsupported orders.
Constellation build_qam(std::size_t order);

/// Returns log2(n) for a power of two, throws std::invalid_argument otherwise.
unsigned exact_log2(std::size_t n);

/// Active antenna and symbol carried by one channel use.
struct SmFrame {
    std::size_t antenna = 0;
    std::size_t symbol = 0;

    friend bool operator==(const SmFrame&, const SmFrame&) = default;
};

/// Bits per channel use: log2(N_t) + log2(M).
unsigned spectral_efficiency(std::size_t n_tx, std::size_t order);

/// The first log2(N_t) bits select the antenna (natural binary, MSB first),
/// the remaining log2(M) bits select the symbol.
SmFrame split_bits(std::span<const std::uint8_t> bits, std::size_t n_tx, std::size_t order);
Bits merge_bits(const SmFrame& frame, std::size_t n_tx, std::size_t order);

struct ChannelPair {
    CMatrix h_true;
    CMatrix h_est;
    double sigma_e2 = 0.0;
};

struct ReceivedVector {
    CVector y;
    double sigma_n2 = 0.0;
};

/// Receiver channel-knowledge model.
struct CsirModel {
    enum class Kind { perfect, fixed, variable };

    Kind kind = Kind::perfect;
    double sigma_e2 = 0.0;  // only meaningful for Kind::fixed

    static CsirModel perfect() { return {}; }
    static CsirModel fixed(double sigma_e2);
    static CsirModel variable() { return {Kind::variable, 0.0}; }

    /// Error variance applied at the given linear SNR.
    double error_variance(double snr_linear) const;

    friend bool operator==(const CsirModel&, const CsirModel&) = default;
};

std::string to_string(const CsirModel& model);

/// snr = 1 / sigma_n^2 with unit symbol energy and unit-variance channel.
double db_to_linear(double db);
double noise_variance_for_snr_db(double snr_db);

/// Transmitted vector h_{antenna} * s_{symbol} through the true channel.
CVector sm_encode(const SmFrame& frame, const ChannelPair& channel, const Constellation& c);

/// N_r x N_t matrix of i.i.d. CN(0, 1) entries.
CMatrix sample_channel(Rng& rng, std::size_t n_rx, std::size_t n_tx);

/// N_r entries of CN(0, sigma_n2). Throws std::invalid_argument if sigma_n2 < 0.
CVector sample_noise(Rng& rng, std::size_t n_rx, double sigma_n2);

/// h_est = h_true + E, E i.i.d. CN(0, sigma_e2). No draws are made in
/// perfect mode. Variable mode requires snr_linear > 0.
ChannelPair apply_csir_error(const CMatrix& h_true, const CsirModel& model, double snr_linear, Rng& rng);

/// The M*N_t hypotheses x_j = h_est[:, a] * s_q with j = a * M + q.
class CandidateSet {
public:
    CandidateSet(const CMatrix& h_est, const Constellation& c);

    std::size_t size() const noexcept { return count_; }
    std::size_t n_rx() const noexcept { return n_rx_; }
    std::size_t order() const noexcept { return order_; }

    std::span<const cdouble> operator[](std::size_t j) const { return {data_.data() + j * n_rx_, n_rx_}; }

    std::size_t antenna_of(std::size_t j) const noexcept { return j / order_; }
    std::size_t symbol_of(std::size_t j) const noexcept { return j % order_; }
    std::size_t index_of(const SmFrame& f) const noexcept { return f.antenna * order_ + f.symbol; }

private:
    std::size_t n_rx_ = 0;
    std::size_t order_ = 0;
    std::size_t count_ = 0;
    std::vector<cdouble> data_;
};

CandidateSet enumerate_candidates(const ChannelPair& channel, const Constellation& c);

}  // namespace sm
