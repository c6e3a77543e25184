#include "sm/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sm {

unsigned exact_log2(std::size_t n)
{
    if (n == 0 || !std::has_single_bit(n)) {
        throw std::invalid_argument("value " + std::to_string(n) + " is not a power of two");
    }
    return static_cast<unsigned>(std::countr_zero(n));
}

Constellation::Constellation(std::vector<cdouble> points, std::vector<std::uint32_t> labels)
    : points_(std::move(points)), labels_(std::move(labels)), grid_i_(points_.size())
{
    bits_ = exact_log2(points_.size());
    if (labels_.size() != points_.size()) {
        throw std::invalid_argument("constellation: label count differs from point count");
    }
    std::vector<bool> seen(points_.size(), false);
    for (auto l : labels_) {
        if (l >= points_.size() || seen[l]) {
            throw std::invalid_argument("constellation: labels are not a permutation");
        }
        seen[l] = true;
    }
    double energy = 0.0;
    for (const auto& p : points_) energy += std::norm(p);
    energy /= static_cast<double>(points_.size());
    if (std::abs(energy - 1.0) > 1e-12) {
        throw std::invalid_argument("constellation: average energy is not unity");
    }
}

std::string Constellation::label_string(std::size_t q) const
{
    std::string s(bits_, '0');
    for (unsigned b = 0; b < bits_; ++b) {
        if ((labels_[q] >> (bits_ - 1 - b)) & 1u) s[b] = '1';
    }
    return s;
}

namespace {

std::uint32_t gray_decode(std::uint32_t g)
{
    std::uint32_t n = g;
    for (std::uint32_t shift = g >> 1; shift != 0; shift >>= 1) n ^= shift;
    return n;
}

}  // namespace

Constellation build_qam(std::size_t order)
{
    if (order < 2 || order > 128 || !std::has_single_bit(order)) {
        throw std::invalid_argument("QAM order must be a power of two in [2, 128], got " +
                                    std::to_string(order));
    }
    const unsigned k = exact_log2(order);
    const unsigned k_i = (k + 1) / 2;
    const unsigned k_q = k / 2;
    const std::size_t levels_i = std::size_t{1} << k_i;
    const std::size_t levels_q = std::size_t{1} << k_q;

    // mean energy of an L-level PAM with unit spacing 2 is (L^2 - 1) / 3
    const double li = static_cast<double>(levels_i);
    const double lq = static_cast<double>(levels_q);
    const double scale = 1.0 / std::sqrt((li * li - 1.0) / 3.0 + (lq * lq - 1.0) / 3.0);

    std::vector<cdouble> points(order);
    std::vector<std::uint32_t> labels(order);
    const std::uint32_t q_mask = (1u << k_q) - 1u;
    for (std::uint32_t q = 0; q < order; ++q) {
        const auto gi = gray_decode(q >> k_q);
        const auto gq = gray_decode(q & q_mask);
        const double re = 2.0 * gi - (li - 1.0);
        const double im = 2.0 * gq - (lq - 1.0);
        points[q] = cdouble(re * scale, im * scale);
        labels[q] = q;
    }
    Constellation c(std::move(points), std::move(labels));
    c.grid_i_ = levels_i;
    c.grid_q_ = levels_q;
    return c;
}

unsigned spectral_efficiency(std::size_t n_tx, std::size_t order)
{
    return exact_log2(n_tx) + exact_log2(order);
}

SmFrame split_bits(std::span<const std::uint8_t> bits, std::size_t n_tx, std::size_t order)
{
    const unsigned ka = exact_log2(n_tx);
    const unsigned ks = exact_log2(order);
    if (bits.size() != ka + ks) {
        throw std::invalid_argument("split_bits: expected " + std::to_string(ka + ks) + " bits, got " +
                                    std::to_string(bits.size()));
    }
    SmFrame f;
    for (unsigned b = 0; b < ka; ++b) f.antenna = (f.antenna << 1) | (bits[b] & 1u);
    for (unsigned b = 0; b < ks; ++b) f.symbol = (f.symbol << 1) | (bits[ka + b] & 1u);
    return f;
}

Bits merge_bits(const SmFrame& frame, std::size_t n_tx, std::size_t order)
{
    const unsigned ka = exact_log2(n_tx);
    const unsigned ks = exact_log2(order);
    if (frame.antenna >= n_tx || frame.symbol >= order) {
        throw std::invalid_argument("merge_bits: frame index out of range");
    }
    Bits bits(ka + ks);
    for (unsigned b = 0; b < ka; ++b) bits[b] = (frame.antenna >> (ka - 1 - b)) & 1u;
    for (unsigned b = 0; b < ks; ++b) bits[ka + b] = (frame.symbol >> (ks - 1 - b)) & 1u;
    return bits;
}

CsirModel CsirModel::fixed(double sigma_e2)
{
    if (!(sigma_e2 >= 0.0) || !std::isfinite(sigma_e2)) {
        throw std::invalid_argument("CSIR error variance must be finite and nonnegative");
    }
    return {Kind::fixed, sigma_e2};
}

double CsirModel::error_variance(double snr_linear) const
{
    switch (kind) {
    case Kind::perfect:
        return 0.0;
    case Kind::fixed:
        return sigma_e2;
    case Kind::variable:
        if (!(snr_linear > 0.0)) {
            throw std::invalid_argument("variable CSIR requires a positive SNR");
        }
        return 1.0 / snr_linear;
    }
    return 0.0;
}

std::string to_string(const CsirModel& model)
{
    switch (model.kind) {
    case CsirModel::Kind::perfect:
        return "perfect";
    case CsirModel::Kind::fixed:
        return "fixed(" + std::to_string(model.sigma_e2) + ")";
    case CsirModel::Kind::variable:
        return "variable";
    }
    return "?";
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double noise_variance_for_snr_db(double snr_db) { return 1.0 / db_to_linear(snr_db); }

CVector sm_encode(const SmFrame& frame, const ChannelPair& channel, const Constellation& c)
{
    if (frame.antenna >= channel.h_true.cols() || frame.symbol >= c.order()) {
        throw std::invalid_argument("sm_encode: frame index out of range");
    }
    const auto column = channel.h_true.col(frame.antenna);
    const cdouble s = c[frame.symbol];
    CVector x(column.size());
    std::transform(column.begin(), column.end(), x.begin(), [s](cdouble h) { return h * s; });
    return x;
}

namespace {

cdouble complex_gaussian(Rng& rng, std::normal_distribution<double>& component)
{
    const double re = component(rng);
    const double im = component(rng);
    return {re, im};
}

}  // namespace

CMatrix sample_channel(Rng& rng, std::size_t n_rx, std::size_t n_tx)
{
    CMatrix h(n_rx, n_tx);
    std::normal_distribution<double> component(0.0, std::sqrt(0.5));
    for (std::size_t c = 0; c < n_tx; ++c) {
        for (std::size_t r = 0; r < n_rx; ++r) h(r, c) = complex_gaussian(rng, component);
    }
    return h;
}

CVector sample_noise(Rng& rng, std::size_t n_rx, double sigma_n2)
{
    if (!(sigma_n2 >= 0.0)) {
        throw std::invalid_argument("noise variance must be nonnegative");
    }
    CVector w(n_rx);
    if (sigma_n2 == 0.0) return w;
    std::normal_distribution<double> component(0.0, std::sqrt(sigma_n2 / 2.0));
    for (auto& e : w) e = complex_gaussian(rng, component);
    return w;
}

ChannelPair apply_csir_error(const CMatrix& h_true, const CsirModel& model, double snr_linear, Rng& rng)
{
    ChannelPair pair{h_true, h_true, model.error_variance(snr_linear)};
    if (pair.sigma_e2 == 0.0) return pair;
    std::normal_distribution<double> component(0.0, std::sqrt(pair.sigma_e2 / 2.0));
    for (std::size_t c = 0; c < h_true.cols(); ++c) {
        for (std::size_t r = 0; r < h_true.rows(); ++r) pair.h_est(r, c) += complex_gaussian(rng, component);
    }
    return pair;
}

CandidateSet::CandidateSet(const CMatrix& h_est, const Constellation& c)
    : n_rx_(h_est.rows()), order_(c.order()), count_(h_est.cols() * c.order()), data_(count_ * n_rx_)
{
    for (std::size_t a = 0; a < h_est.cols(); ++a) {
        const auto column = h_est.col(a);
        for (std::size_t q = 0; q < order_; ++q) {
            cdouble* out = data_.data() + (a * order_ + q) * n_rx_;
            for (std::size_t n = 0; n < n_rx_; ++n) out[n] = column[n] * c[q];
        }
    }
}

CandidateSet enumerate_candidates(const ChannelPair& channel, const Constellation& c)
{
    return CandidateSet(channel.h_est, c);
}

}  // namespace sm
